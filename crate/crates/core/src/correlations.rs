//! Mutual information, classical correlation and quantum discord of a
//! two-qubit state, with the classical part maximized over rank-one
//! projective measurements on qubit B.

use std::f64::consts::{FRAC_PI_2, TAU};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{QUBIT_A, QUBIT_B};
use crate::operator_algebra::{
    hermitian_eigenvalues_2x2, kron, spectrum_entropy, von_neumann_entropy, ComplexMatrix,
    DensityMatrix, C64, ZERO,
};

/// Outcomes with smaller probability are dropped from the conditional entropy.
pub const MIN_OUTCOME_PROBABILITY: f64 = 1e-12;
/// Discord values in `[-DISCORD_FLOOR, 0)` are clamped to zero.
pub const DISCORD_FLOOR: f64 = 1e-6;
/// Classical correlation values in `[-CLASSICAL_FLOOR, 0)` are clamped to zero.
pub const CLASSICAL_FLOOR: f64 = 1e-9;

/// Coarse search grid over the measurement parameters.
pub const GRID_THETA_POINTS: usize = 60;
pub const GRID_PHI_POINTS: usize = 120;
const REFINE_MAX_SWEEPS: usize = 50;
const REFINE_MIN_GAIN: f64 = 1e-10;
const GOLDEN_TOL: f64 = 1e-10;
const GOLDEN_MAX_ITERS: usize = 200;

/// Projective measurement on qubit B onto
/// `{cosϑ|e> + e^{iφ} sinϑ|g>, e^{-iφ} sinϑ|e> - cosϑ|g>}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MeasurementBasis {
    pub theta: f64,
    pub phi: f64,
}

impl MeasurementBasis {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(theta.is_finite() && (0.0..=FRAC_PI_2).contains(&theta)) {
            return Err(Error::invalid_argument(format!(
                "measurement theta must lie in [0, pi/2], got {theta}"
            )));
        }
        if !(phi.is_finite() && (0.0..TAU).contains(&phi)) {
            return Err(Error::invalid_argument(format!(
                "measurement phi must lie in [0, 2pi), got {phi}"
            )));
        }
        Ok(Self { theta, phi })
    }

    /// The two outcome kets in the `(|g>, |e>)` basis of qubit B.
    pub fn kets(&self) -> [[C64; 2]; 2] {
        let (s, c) = self.theta.sin_cos();
        let phase = C64::from_polar(1.0, self.phi);
        [
            [phase * s, C64::new(c, 0.0)],
            [C64::new(-c, 0.0), phase.conj() * s],
        ]
    }

    /// Rank-one projectors on qubit B.
    pub fn projectors(&self) -> [ComplexMatrix; 2] {
        let [k0, k1] = self.kets();
        [ComplexMatrix::outer(&k0), ComplexMatrix::outer(&k1)]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CorrelationTriple {
    pub mutual_info: f64,
    pub classical: f64,
    pub discord: f64,
    pub argmax_basis: MeasurementBasis,
}

fn require_two_qubit(rho: &DensityMatrix) -> Result<()> {
    if rho.dims() != [2, 2] {
        return Err(Error::invalid_state(format!(
            "expected a two-qubit state, got dims {:?}",
            rho.dims()
        )));
    }
    Ok(())
}

/// `S(ρ_A) + S(ρ_B) - S(ρ_AB)` in bits.
pub fn mutual_information(rho_ab: &DensityMatrix) -> Result<f64> {
    require_two_qubit(rho_ab)?;
    let s_a = von_neumann_entropy(&rho_ab.partial_trace(&[QUBIT_A])?)?;
    let s_b = von_neumann_entropy(&rho_ab.partial_trace(&[QUBIT_B])?)?;
    let s_ab = von_neumann_entropy(rho_ab)?;
    Ok(s_a + s_b - s_ab)
}

/// Unnormalized conditional state of A for outcome ket `psi` on B:
/// returns `(p, σ_00, σ_11, σ_01)` with `σ = <psi|_B ρ |psi>_B`.
#[inline]
fn conditional_block(rho: &ComplexMatrix, psi: &[C64; 2]) -> (f64, f64, f64, C64) {
    let mut sigma = [[ZERO; 2]; 2];
    for (a, row) in sigma.iter_mut().enumerate() {
        for (a2, out) in row.iter_mut().enumerate() {
            let mut acc = ZERO;
            for b in 0..2 {
                let left = psi[b].conj();
                for b2 in 0..2 {
                    acc += left * rho[(2 * a + b, 2 * a2 + b2)] * psi[b2];
                }
            }
            *out = acc;
        }
    }
    let d0 = sigma[0][0].re;
    let d1 = sigma[1][1].re;
    (d0 + d1, d0, d1, sigma[0][1])
}

/// Two-outcome ensemble `{(p_i, ρ_{A|i})}` produced by measuring B.
pub fn conditional_ensemble(
    rho_ab: &DensityMatrix,
    basis: &MeasurementBasis,
) -> Result<Vec<(f64, DensityMatrix)>> {
    require_two_qubit(rho_ab)?;
    basis
        .kets()
        .iter()
        .map(|psi| {
            let (p, d0, d1, off) = conditional_block(rho_ab.matrix(), psi);
            let cond = if p < MIN_OUTCOME_PROBABILITY {
                ComplexMatrix::identity(2).scale_real(0.5)
            } else {
                let mut m = ComplexMatrix::zeros(2);
                m[(0, 0)] = C64::new(d0 / p, 0.0);
                m[(1, 1)] = C64::new(d1 / p, 0.0);
                m[(0, 1)] = off / p;
                m[(1, 0)] = off.conj() / p;
                m
            };
            Ok((p.max(0.0), DensityMatrix::new(cond, vec![2])?))
        })
        .collect()
}

/// `Σ_i p_i S(ρ_{A|i})`.
fn conditional_entropy(rho: &ComplexMatrix, basis: &MeasurementBasis) -> Result<f64> {
    let mut total = 0.0;
    for psi in basis.kets().iter() {
        let (p, d0, d1, off) = conditional_block(rho, psi);
        if p < MIN_OUTCOME_PROBABILITY {
            continue;
        }
        let [l0, l1] = hermitian_eigenvalues_2x2(d0 / p, d1 / p, off / p);
        total += p * spectrum_entropy(&[l0, l1])?;
    }
    Ok(total)
}

/// `J = S(ρ_A) - Σ_i p_i S(ρ_{A|i})` for one measurement on B.
pub fn measurement_information(rho_ab: &DensityMatrix, basis: &MeasurementBasis) -> Result<f64> {
    require_two_qubit(rho_ab)?;
    let s_a = von_neumann_entropy(&rho_ab.partial_trace(&[QUBIT_A])?)?;
    Ok(s_a - conditional_entropy(rho_ab.matrix(), basis)?)
}

pub fn grid_theta(i: usize) -> f64 {
    FRAC_PI_2 * i as f64 / (GRID_THETA_POINTS - 1) as f64
}

pub fn grid_phi(j: usize) -> f64 {
    TAU * j as f64 / GRID_PHI_POINTS as f64
}

struct Objective<'a> {
    rho: &'a ComplexMatrix,
    s_a: f64,
}

impl Objective<'_> {
    fn eval(&self, theta: f64, phi: f64) -> Result<f64> {
        Ok(self.s_a - conditional_entropy(self.rho, &MeasurementBasis { theta, phi })?)
    }
}

/// Maximize `f` on `[lo, hi]` by golden-section search.
fn golden_section_max(
    lo: f64,
    hi: f64,
    mut f: impl FnMut(f64) -> Result<f64>,
) -> Result<(f64, f64)> {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    for _ in 0..GOLDEN_MAX_ITERS {
        if b - a <= GOLDEN_TOL {
            break;
        }
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 >= f2 { (x1, f1) } else { (x2, f2) })
}

/// Coarse-grid maximum of `J`, ties going to the first grid index in
/// theta-major order.
pub fn coarse_grid_maximum(rho_ab: &DensityMatrix) -> Result<(f64, MeasurementBasis)> {
    require_two_qubit(rho_ab)?;
    let obj = Objective {
        rho: rho_ab.matrix(),
        s_a: von_neumann_entropy(&rho_ab.partial_trace(&[QUBIT_A])?)?,
    };
    let (v, t, p) = grid_search(&obj)?;
    Ok((v, MeasurementBasis { theta: t, phi: p }))
}

fn grid_search(obj: &Objective<'_>) -> Result<(f64, f64, f64)> {
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for i in 0..GRID_THETA_POINTS {
        let theta = grid_theta(i);
        for j in 0..GRID_PHI_POINTS {
            let phi = grid_phi(j);
            let v = obj.eval(theta, phi)?;
            if v > best.0 {
                best = (v, theta, phi);
            }
        }
    }
    Ok(best)
}

/// Classical correlation `max_Π J_Π` and the maximizing basis.
///
/// Exhaustive 60×120 grid, then alternating golden-section refinement on
/// each coordinate within one grid spacing of the incumbent.
pub fn classical_correlation(rho_ab: &DensityMatrix) -> Result<(f64, MeasurementBasis)> {
    require_two_qubit(rho_ab)?;
    let obj = Objective {
        rho: rho_ab.matrix(),
        s_a: von_neumann_entropy(&rho_ab.partial_trace(&[QUBIT_A])?)?,
    };
    let (mut best, mut theta, mut phi) = grid_search(&obj)?;

    let d_theta = grid_theta(1);
    let d_phi = grid_phi(1);
    for _ in 0..REFINE_MAX_SWEEPS {
        let start = best;

        let lo = (theta - d_theta).max(0.0);
        let hi = (theta + d_theta).min(FRAC_PI_2);
        let (t, v) = golden_section_max(lo, hi, |t| obj.eval(t, phi))?;
        if v > best {
            best = v;
            theta = t;
        }

        let (p, v) = golden_section_max(phi - d_phi, phi + d_phi, |p| obj.eval(theta, p))?;
        if v > best {
            best = v;
            phi = p.rem_euclid(TAU);
            if phi >= TAU {
                phi = 0.0;
            }
        }

        if best - start < REFINE_MIN_GAIN {
            break;
        }
    }

    if best < -CLASSICAL_FLOOR {
        return Err(Error::invalid_state(format!(
            "classical correlation {best:e} is negative"
        )));
    }
    Ok((best.max(0.0), MeasurementBasis { theta, phi }))
}

/// Mutual information, classical correlation and discord. The triple
/// satisfies `mutual_info == classical + discord` exactly.
pub fn correlations(rho_ab: &DensityMatrix) -> Result<CorrelationTriple> {
    let mutual = mutual_information(rho_ab)?;
    let (mut classical, argmax_basis) = classical_correlation(rho_ab)?;
    let mut discord = mutual - classical;
    if discord < 0.0 {
        if discord < -DISCORD_FLOOR {
            return Err(Error::invalid_state(format!(
                "discord {discord:e} below numerical floor (I = {mutual}, C = {classical})"
            )));
        }
        discord = 0.0;
        classical = mutual;
    }
    Ok(CorrelationTriple {
        mutual_info: classical + discord,
        classical,
        discord,
        argmax_basis,
    })
}

/// Projectors `1_A ⊗ Π_i` on the two-qubit space.
pub fn two_qubit_projectors(basis: &MeasurementBasis) -> [ComplexMatrix; 2] {
    let id = ComplexMatrix::identity(2);
    let [p0, p1] = basis.projectors();
    [kron(&id, &p0), kron(&id, &p1)]
}
