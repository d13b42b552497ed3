//! Two qubits resonantly coupled to one lossy cavity mode (damped
//! Tavis-Cummings model) in the interaction picture.
//!
//! Computational basis: qubit A ⊗ qubit B ⊗ Fock, with each qubit ordered
//! `(|g>, |e>)`. The two-qubit block therefore runs `gg, ge, eg, ee` and a
//! composite index is `(2*a + b) * fock_dim + n`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator_algebra::{kron, kron_kets, ComplexMatrix, DensityMatrix, C64, I, ONE, ZERO};

/// Slack allowed on the closed parameter intervals, so that values such as
/// `PI / 2.0` computed elsewhere are accepted.
const RANGE_SLACK: f64 = 1e-12;

pub const QUBIT_A: usize = 0;
pub const QUBIT_B: usize = 1;
pub const CAVITY: usize = 2;

pub const KET_G: [C64; 2] = [ONE, ZERO];
pub const KET_E: [C64; 2] = [ZERO, ONE];

/// Coupling regime; Γ/Ω = 2 is the boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    Strong,
    Critical,
    Weak,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Coupling strength Ω.
    pub omega: f64,
    /// Cavity decay rate in units of Ω.
    pub gamma_ratio: f64,
    /// Largest photon number kept in the truncated Fock space.
    pub fock_cutoff: usize,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            omega: 1.0,
            gamma_ratio: 0.2,
            fock_cutoff: 2,
        }
    }
}

impl ModelParams {
    pub fn new(omega: f64, gamma_ratio: f64, fock_cutoff: usize) -> Result<Self> {
        let p = Self {
            omega,
            gamma_ratio,
            fock_cutoff,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_gamma_ratio(gamma_ratio: f64) -> Result<Self> {
        Self::new(1.0, gamma_ratio, 2)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega.is_finite() && self.omega > 0.0) {
            return Err(Error::invalid_argument(format!(
                "omega must be positive, got {}",
                self.omega
            )));
        }
        if !(self.gamma_ratio.is_finite() && self.gamma_ratio >= 0.0) {
            return Err(Error::invalid_argument(format!(
                "gamma ratio must be non-negative, got {}",
                self.gamma_ratio
            )));
        }
        if self.fock_cutoff < 1 {
            return Err(Error::invalid_argument("fock cutoff must be at least 1"));
        }
        Ok(())
    }

    /// Cavity decay rate Γ.
    pub fn gamma(&self) -> f64 {
        self.gamma_ratio * self.omega
    }

    pub fn fock_dim(&self) -> usize {
        self.fock_cutoff + 1
    }

    pub fn dims(&self) -> Vec<usize> {
        space_dims(self.fock_dim())
    }

    pub fn regime(&self) -> Regime {
        if self.gamma_ratio < 2.0 {
            Regime::Strong
        } else if self.gamma_ratio > 2.0 {
            Regime::Weak
        } else {
            Regime::Critical
        }
    }
}

/// Initial-state family `α|ge0> + β|eg0> + γ|gg1>` with
/// `α = sinθ cosφ`, `β = sinθ sinφ`, `γ = cosθ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateParams {
    pub theta: f64,
    pub phi: f64,
}

impl StateParams {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(theta.is_finite() && (-RANGE_SLACK..=FRAC_PI_2 + RANGE_SLACK).contains(&theta)) {
            return Err(Error::invalid_argument(format!(
                "theta must lie in [0, pi/2], got {theta}"
            )));
        }
        if !(phi.is_finite() && (-RANGE_SLACK..=PI + RANGE_SLACK).contains(&phi)) {
            return Err(Error::invalid_argument(format!(
                "phi must lie in [0, pi], got {phi}"
            )));
        }
        Ok(Self { theta, phi })
    }

    pub fn alpha(&self) -> f64 {
        self.theta.sin() * self.phi.cos()
    }

    pub fn beta(&self) -> f64 {
        self.theta.sin() * self.phi.sin()
    }

    pub fn gamma(&self) -> f64 {
        self.theta.cos()
    }

    /// Amplitude on the subradiant state, `(β - α)/√2`.
    pub fn subradiant_amplitude(&self) -> f64 {
        (self.beta() - self.alpha()) * FRAC_1_SQRT_2
    }

    /// Amplitude on the superradiant state, `(α + β)/√2`.
    pub fn superradiant_amplitude(&self) -> f64 {
        (self.alpha() + self.beta()) * FRAC_1_SQRT_2
    }
}

pub fn space_dims(fock_dim: usize) -> Vec<usize> {
    vec![2, 2, fock_dim]
}

/// Composite index of `|a, b, n>` with `a, b ∈ {0 = g, 1 = e}`.
#[inline]
pub fn basis_index(a: usize, b: usize, n: usize, fock_dim: usize) -> usize {
    (2 * a + b) * fock_dim + n
}

pub fn fock_ket(n: usize, fock_dim: usize) -> Vec<C64> {
    let mut v = vec![ZERO; fock_dim];
    v[n] = ONE;
    v
}

pub fn basis_ket(a: usize, b: usize, n: usize, fock_dim: usize) -> Vec<C64> {
    let mut v = vec![ZERO; 4 * fock_dim];
    v[basis_index(a, b, n, fock_dim)] = ONE;
    v
}

/// `(|eg> - |ge>)/√2` on the two-qubit space.
pub fn subradiant_ket() -> Vec<C64> {
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    vec![ZERO, -h, h, ZERO]
}

/// `(|eg> + |ge>)/√2` on the two-qubit space.
pub fn superradiant_ket() -> Vec<C64> {
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    vec![ZERO, h, h, ZERO]
}

/// Unitary whose columns are the collective states `|0>=|gg>, |+>, |->,
/// |2>=|ee>` written in the bare two-qubit basis.
pub fn collective_basis() -> ComplexMatrix {
    let cols = [
        vec![ONE, ZERO, ZERO, ZERO],
        superradiant_ket(),
        subradiant_ket(),
        vec![ZERO, ZERO, ZERO, ONE],
    ];
    let mut u = ComplexMatrix::zeros(4);
    for (j, col) in cols.iter().enumerate() {
        for (i, &x) in col.iter().enumerate() {
            u[(i, j)] = x;
        }
    }
    u
}

/// Raising operator `|e><g|` of a single qubit.
pub fn qubit_raising() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(2);
    m[(1, 0)] = ONE;
    m
}

/// Truncated annihilation operator on `fock_dim` levels.
pub fn fock_annihilation(fock_dim: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(fock_dim);
    for n in 1..fock_dim {
        m[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    m
}

pub fn sigma_plus_a(fock_dim: usize) -> ComplexMatrix {
    kron(
        &kron(&qubit_raising(), &ComplexMatrix::identity(2)),
        &ComplexMatrix::identity(fock_dim),
    )
}

pub fn sigma_plus_b(fock_dim: usize) -> ComplexMatrix {
    kron(
        &kron(&ComplexMatrix::identity(2), &qubit_raising()),
        &ComplexMatrix::identity(fock_dim),
    )
}

pub fn cavity_annihilation(fock_dim: usize) -> ComplexMatrix {
    kron(&ComplexMatrix::identity(4), &fock_annihilation(fock_dim))
}

/// `a†a` on the composite space.
pub fn photon_number(fock_dim: usize) -> ComplexMatrix {
    let diag: Vec<f64> = (0..4 * fock_dim).map(|k| (k % fock_dim) as f64).collect();
    ComplexMatrix::from_real_diagonal(&diag)
}

/// `σ⁺_Aσ⁻_A + σ⁺_Bσ⁻_B + a†a`.
pub fn excitation_number(fock_dim: usize) -> ComplexMatrix {
    let diag: Vec<f64> = (0..4 * fock_dim)
        .map(|k| {
            let n = k % fock_dim;
            let ab = k / fock_dim;
            (n + (ab >> 1) + (ab & 1)) as f64
        })
        .collect();
    ComplexMatrix::from_real_diagonal(&diag)
}

/// `Ω(σ⁺_A a + σ⁺_B a) + h.c.` at exact resonance.
pub fn interaction_hamiltonian(p: &ModelParams) -> ComplexMatrix {
    let f = p.fock_dim();
    let a = cavity_annihilation(f);
    let sum = &sigma_plus_a(f).matmul(&a) + &sigma_plus_b(f).matmul(&a);
    (&sum + &sum.adjoint()).scale_real(p.omega)
}

/// Projector onto `|->⊗|0>`.
pub fn subradiant_vacuum_projector(fock_dim: usize) -> ComplexMatrix {
    assert!(fock_dim >= 1, "fock dimension must be positive");
    let ket = kron_kets(&[&subradiant_ket(), &fock_ket(0, fock_dim)]);
    ComplexMatrix::outer(&ket)
}

/// Projector onto the atomic subradiant state for any photon number,
/// `|-><-| ⊗ 1_c`.
pub fn subradiant_projector(fock_dim: usize) -> ComplexMatrix {
    kron(
        &ComplexMatrix::outer(&subradiant_ket()),
        &ComplexMatrix::identity(fock_dim),
    )
}

/// Matrix-valued right-hand side of the master equation with the
/// operator nonzeros cached, so each evaluation costs O(nnz · dim).
#[derive(Clone, Debug)]
pub struct Lindbladian {
    dim: usize,
    fock_dim: usize,
    hamiltonian: ComplexMatrix,
    /// (row, col, value) of H.
    h_terms: Vec<(usize, usize, C64)>,
    /// (row, col, value) of a; entries are real.
    lowering: Vec<(usize, usize, f64)>,
    photons: Vec<f64>,
    gamma: f64,
}

impl Lindbladian {
    pub fn new(p: &ModelParams) -> Result<Self> {
        p.validate()?;
        let fock_dim = p.fock_dim();
        let dim = 4 * fock_dim;
        let hamiltonian = interaction_hamiltonian(p);
        let h_terms = nonzeros(&hamiltonian);
        let lowering = nonzeros(&cavity_annihilation(fock_dim))
            .into_iter()
            .map(|(i, j, v)| (i, j, v.re))
            .collect();
        let photons = (0..dim).map(|k| (k % fock_dim) as f64).collect();
        Ok(Self {
            dim,
            fock_dim,
            hamiltonian,
            h_terms,
            lowering,
            photons,
            gamma: p.gamma(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn fock_dim(&self) -> usize {
        self.fock_dim
    }

    pub fn hamiltonian(&self) -> &ComplexMatrix {
        &self.hamiltonian
    }

    /// `out = -i[H, rho] - (Γ/2)(a†a rho - 2 a rho a† + rho a†a)`.
    pub fn apply_into(&self, rho: &ComplexMatrix, out: &mut ComplexMatrix) {
        let n = self.dim;
        debug_assert_eq!(rho.dim(), n);
        debug_assert_eq!(out.dim(), n);
        let r = rho.entries();
        let o = out.entries_mut();

        let half_gamma = 0.5 * self.gamma;
        for i in 0..n {
            for j in 0..n {
                o[i * n + j] = r[i * n + j] * (-half_gamma * (self.photons[i] + self.photons[j]));
            }
        }
        // -i H rho
        for &(i, k, h) in &self.h_terms {
            let coef = -I * h;
            for j in 0..n {
                o[i * n + j] += coef * r[k * n + j];
            }
        }
        // +i rho H
        for &(k, j, h) in &self.h_terms {
            let coef = I * h;
            for i in 0..n {
                o[i * n + j] += coef * r[i * n + k];
            }
        }
        if self.gamma != 0.0 {
            for &(i, k, a1) in &self.lowering {
                for &(j, l, a2) in &self.lowering {
                    o[i * n + j] += r[k * n + l] * (self.gamma * a1 * a2);
                }
            }
        }
    }

    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim);
        self.apply_into(rho, &mut out);
        out
    }
}

fn nonzeros(m: &ComplexMatrix) -> Vec<(usize, usize, C64)> {
    let n = m.dim();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let v = m[(i, j)];
            if v != ZERO {
                out.push((i, j, v));
            }
        }
    }
    out
}

/// Right-hand side of the master equation for a state on the space of `p`.
pub fn lindblad_rhs(rho: &DensityMatrix, p: &ModelParams) -> Result<ComplexMatrix> {
    let expected = p.dims();
    if rho.dims() != expected.as_slice() {
        return Err(Error::invalid_argument(format!(
            "state dims {:?} do not match model dims {expected:?}",
            rho.dims()
        )));
    }
    Ok(Lindbladian::new(p)?.apply(rho.matrix()))
}

/// Ket `α|ge0> + β|eg0> + γ|gg1>`.
pub fn correlated_ket(s: &StateParams, fock_dim: usize) -> Vec<C64> {
    assert!(
        fock_dim >= 2,
        "the correlated state needs the one-photon level"
    );
    let mut psi = vec![ZERO; 4 * fock_dim];
    psi[basis_index(0, 1, 0, fock_dim)] = C64::new(s.alpha(), 0.0);
    psi[basis_index(1, 0, 0, fock_dim)] = C64::new(s.beta(), 0.0);
    psi[basis_index(0, 0, 1, fock_dim)] = C64::new(s.gamma(), 0.0);
    psi
}

/// `|Ψ><Ψ|` for the system-cavity correlated initial state.
pub fn initial_state_correlated(s: &StateParams, fock_cutoff: usize) -> Result<DensityMatrix> {
    if fock_cutoff < 1 {
        return Err(Error::invalid_argument("fock cutoff must be at least 1"));
    }
    let f = fock_cutoff + 1;
    DensityMatrix::pure(&correlated_ket(s, f), space_dims(f))
}

/// Reduced two-qubit state shared by both initial states.
pub fn initial_qubit_state(s: &StateParams) -> ComplexMatrix {
    let (a, b, g) = (s.alpha(), s.beta(), s.gamma());
    ComplexMatrix::from_real_rows(&[
        &[g * g, 0.0, 0.0, 0.0],
        &[0.0, a * a, a * b, 0.0],
        &[0.0, a * b, b * b, 0.0],
        &[0.0, 0.0, 0.0, 0.0],
    ])
    .expect("4x4 literal")
}

/// Reduced cavity state `diag(α² + β², γ²)` embedded in `fock_dim` levels.
pub fn initial_cavity_state(s: &StateParams, fock_dim: usize) -> ComplexMatrix {
    let mut diag = vec![0.0; fock_dim];
    diag[0] = s.alpha().powi(2) + s.beta().powi(2);
    diag[1] = s.gamma().powi(2);
    ComplexMatrix::from_real_diagonal(&diag)
}

/// `ρ_AB ⊗ ρ_c` with the same marginals as the correlated state.
pub fn initial_state_factorized(s: &StateParams, fock_cutoff: usize) -> Result<DensityMatrix> {
    if fock_cutoff < 1 {
        return Err(Error::invalid_argument("fock cutoff must be at least 1"));
    }
    let f = fock_cutoff + 1;
    DensityMatrix::new(
        kron(&initial_qubit_state(s), &initial_cavity_state(s, f)),
        space_dims(f),
    )
}
