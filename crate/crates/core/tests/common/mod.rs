//! Test-only oracles and random-state generators. Nothing here calls into
//! the crate's correlation or integration code paths.

#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_2, TAU};

use cavity_discord::operator_algebra::{ComplexMatrix, DensityMatrix, C64};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn random_complex_matrix(rng: &mut StdRng, dim: usize) -> ComplexMatrix {
    let entries = (0..dim * dim)
        .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    ComplexMatrix::new(dim, entries).unwrap()
}

/// `G G† / Tr(G G†)` for a random complex `G`.
pub fn random_density(rng: &mut StdRng, dims: &[usize]) -> DensityMatrix {
    let dim = dims.iter().product();
    let g = random_complex_matrix(rng, dim);
    let mut m = g.matmul(&g.adjoint());
    let tr = m.trace().re;
    m = m.scale_real(1.0 / tr);
    m.hermitize();
    DensityMatrix::new(m, dims.to_vec()).unwrap()
}

pub fn random_ket(rng: &mut StdRng, dim: usize) -> Vec<C64> {
    let v: Vec<C64> = (0..dim)
        .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

/// Unitary from Gram-Schmidt orthonormalization of a random matrix's columns.
pub fn random_unitary(rng: &mut StdRng, dim: usize) -> ComplexMatrix {
    let g = random_complex_matrix(rng, dim);
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(dim);
    for j in 0..dim {
        let mut v: Vec<C64> = (0..dim).map(|i| g[(i, j)]).collect();
        for q in &cols {
            let proj: C64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi -= proj * qi;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        cols.push(v.into_iter().map(|z| z / norm).collect());
    }
    let mut u = ComplexMatrix::zeros(dim);
    for (j, col) in cols.iter().enumerate() {
        for (i, &x) in col.iter().enumerate() {
            u[(i, j)] = x;
        }
    }
    u
}

fn h2(p: f64) -> f64 {
    let f = |x: f64| if x > 0.0 { -x * x.ln() } else { 0.0 };
    (f(p) + f(1.0 - p)) / std::f64::consts::LN_2
}

/// Entropy in bits of a qubit with Bloch vector length `b`.
pub fn bloch_entropy(b: f64) -> f64 {
    h2(0.5 * (1.0 + b.min(1.0)))
}

fn paulis() -> [ComplexMatrix; 3] {
    let mut x = ComplexMatrix::zeros(2);
    x[(0, 1)] = C64::new(1.0, 0.0);
    x[(1, 0)] = C64::new(1.0, 0.0);
    let mut y = ComplexMatrix::zeros(2);
    y[(0, 1)] = C64::new(0.0, -1.0);
    y[(1, 0)] = C64::new(0.0, 1.0);
    let z = ComplexMatrix::from_real_diagonal(&[1.0, -1.0]);
    [x, y, z]
}

fn kron2(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(4);
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out[(2 * i + k, 2 * j + l)] = a[(i, j)] * b[(k, l)];
                }
            }
        }
    }
    out
}

fn expect(rho: &ComplexMatrix, op: &ComplexMatrix) -> f64 {
    rho.matmul(op).trace().re
}

/// Pauli decomposition `ρ = (1 + r·σ⊗1 + 1⊗s·σ + Σ T_ij σ_i⊗σ_j) / 4`.
pub struct BlochForm {
    pub r: [f64; 3],
    pub s: [f64; 3],
    pub t: [[f64; 3]; 3],
}

impl BlochForm {
    pub fn of(rho: &ComplexMatrix) -> Self {
        let p = paulis();
        let id = ComplexMatrix::identity(2);
        let mut r = [0.0; 3];
        let mut s = [0.0; 3];
        let mut t = [[0.0; 3]; 3];
        for i in 0..3 {
            r[i] = expect(rho, &kron2(&p[i], &id));
            s[i] = expect(rho, &kron2(&id, &p[i]));
            for j in 0..3 {
                t[i][j] = expect(rho, &kron2(&p[i], &p[j]));
            }
        }
        Self { r, s, t }
    }

    /// `S(ρ_A) - Σ_± p_± S(ρ_{A|±})` for measuring B along unit vector `n`.
    pub fn information(&self, n: [f64; 3]) -> f64 {
        let s_a = bloch_entropy(norm3(self.r));
        let sn: f64 = (0..3).map(|j| self.s[j] * n[j]).sum();
        let tn: [f64; 3] = std::array::from_fn(|i| (0..3).map(|j| self.t[i][j] * n[j]).sum());
        let mut cond = 0.0;
        for sign in [1.0, -1.0] {
            let p = 0.5 * (1.0 + sign * sn);
            if p < 1e-14 {
                continue;
            }
            let v: [f64; 3] =
                std::array::from_fn(|i| (self.r[i] + sign * tn[i]) / (1.0 + sign * sn));
            cond += p * bloch_entropy(norm3(v));
        }
        s_a - cond
    }
}

fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// Bloch vector of `cosϑ|e> + e^{iφ} sinϑ|g>` in the `(|g>, |e>)` basis.
pub fn measurement_direction(theta: f64, phi: f64) -> [f64; 3] {
    let ket = [
        C64::from_polar(theta.sin(), phi),
        C64::new(theta.cos(), 0.0),
    ];
    let p = paulis();
    std::array::from_fn(|k| {
        let v = p[k].mat_vec(&ket);
        (ket[0].conj() * v[0] + ket[1].conj() * v[1]).re
    })
}

/// Brute-force classical correlation on a 600×1200 grid over the same
/// measurement family.
pub fn fine_grid_classical(rho: &ComplexMatrix) -> f64 {
    let form = BlochForm::of(rho);
    let (nt, np) = (600usize, 1200usize);
    let mut best = f64::NEG_INFINITY;
    for i in 0..nt {
        let theta = FRAC_PI_2 * i as f64 / (nt - 1) as f64;
        for j in 0..np {
            let phi = TAU * j as f64 / np as f64;
            best = best.max(form.information(measurement_direction(theta, phi)));
        }
    }
    best
}

/// Mutual information from the eigenvalues of ρ and its marginal Bloch vectors.
pub fn bloch_mutual_information(rho: &ComplexMatrix, joint_entropy: f64) -> f64 {
    let form = BlochForm::of(rho);
    bloch_entropy(norm3(form.r)) + bloch_entropy(norm3(form.s)) - joint_entropy
}
