//! Dense complex-matrix primitives: products, tensor products, partial
//! trace, Hermitian eigendecomposition and von Neumann entropy.
//!
//! Composite spaces are ordered (qubit A, qubit B, cavity) and tensor
//! products follow the row-major Kronecker convention
//! `kron(a, b)[i*db + k, j*db + l] = a[i, j] * b[k, l]`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Tolerance on |Tr(rho) - 1| for a valid density matrix.
pub const TRACE_TOL: f64 = 1e-9;
/// Tolerance on max |rho - rho^dagger| for a valid density matrix.
pub const HERMITICITY_TOL: f64 = 1e-9;
/// Most negative eigenvalue accepted in a valid density matrix.
pub const NEGATIVITY_TOL: f64 = 1e-8;

/// Dense square complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<C64>,
}

impl ComplexMatrix {
    pub fn new(dim: usize, entries: Vec<C64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid_argument("matrix dimension must be positive"));
        }
        if entries.len() != dim * dim {
            return Err(Error::invalid_argument(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                entries.len()
            )));
        }
        Ok(Self { dim, entries })
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        Self {
            dim,
            entries: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d: Vec<C64> = diag.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::from_diagonal(&d)
    }

    /// Build from rows of real entries.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let dim = rows.len();
        let entries = rows
            .iter()
            .flat_map(|r| r.iter().map(|&x| C64::new(x, 0.0)))
            .collect();
        Self::new(dim, entries)
    }

    /// `|v><v|` for a (not necessarily normalized) ket.
    pub fn outer(v: &[C64]) -> Self {
        let dim = v.len();
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = v[i] * v[j].conj();
            }
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    #[inline]
    pub fn entries_mut(&mut self) -> &mut [C64] {
        &mut self.entries
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|&x| x * s).collect(),
        }
    }

    /// `self += s * other`
    pub fn add_scaled(&mut self, s: f64, other: &Self) {
        debug_assert_eq!(self.dim, other.dim);
        for (a, &b) in self.entries.iter_mut().zip(&other.entries) {
            *a += b * s;
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch in matmul");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a == ZERO {
                    continue;
                }
                let row = &other.entries[k * n..(k + 1) * n];
                let dst = &mut out.entries[i * n..(i + 1) * n];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn mat_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.dim, v.len(), "dimension mismatch in mat_vec");
        let n = self.dim;
        (0..n)
            .map(|i| (0..n).map(|j| self.entries[i * n + j] * v[j]).sum())
            .collect()
    }

    /// `<u| self |v>`
    pub fn sandwich(&self, u: &[C64], v: &[C64]) -> C64 {
        let mv = self.mat_vec(v);
        u.iter().zip(&mv).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &self.matmul(other) - &other.matmul(self)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch in max_abs_diff");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - self^dagger`.
    pub fn hermiticity_deviation(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    /// `(self + self^dagger) / 2`, in place.
    pub fn hermitize(&mut self) {
        let n = self.dim;
        for i in 0..n {
            self.entries[i * n + i].im = 0.0;
            for j in (i + 1)..n {
                let avg = (self.entries[i * n + j] + self.entries[j * n + i].conj()) * 0.5;
                self.entries[i * n + j] = avg;
                self.entries[j * n + i] = avg.conj();
            }
        }
    }

    /// `U self U^dagger`
    pub fn conjugate_by(&self, u: &Self) -> Self {
        u.matmul(self).matmul(&u.adjoint())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.entries[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.entries[i * self.dim + j]
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in add");
        ComplexMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in sub");
        ComplexMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for j in 0..self.dim {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Kronecker product.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (da, db) = (a.dim, b.dim);
    let n = da * db;
    let mut out = ComplexMatrix::zeros(n);
    for i in 0..da {
        for j in 0..da {
            let aij = a[(i, j)];
            if aij == ZERO {
                continue;
            }
            for k in 0..db {
                for l in 0..db {
                    out[(i * db + k, j * db + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Kronecker product of a list of kets.
pub fn kron_kets(kets: &[&[C64]]) -> Vec<C64> {
    kets.iter().fold(vec![ONE], |acc, k| {
        acc.iter()
            .flat_map(|&a| k.iter().map(move |&b| a * b))
            .collect()
    })
}

/// Partial trace of a matrix on the composite space `dims`, keeping the
/// subsystems listed in `keep` (in their original order).
pub fn partial_trace_matrix(
    m: &ComplexMatrix,
    dims: &[usize],
    keep: &[usize],
) -> Result<ComplexMatrix> {
    let total: usize = dims.iter().product();
    if total != m.dim() {
        return Err(Error::invalid_argument(format!(
            "subsystem dims {dims:?} do not match matrix dimension {}",
            m.dim()
        )));
    }
    let mut keep_sorted = keep.to_vec();
    keep_sorted.sort_unstable();
    keep_sorted.dedup();
    if keep_sorted.is_empty() || keep_sorted.len() == dims.len() {
        return Err(Error::invalid_argument(
            "keep must be a nonempty proper subset of subsystems",
        ));
    }
    if keep_sorted.iter().any(|&k| k >= dims.len()) {
        return Err(Error::invalid_argument(format!(
            "subsystem index out of range in {keep:?}"
        )));
    }
    let traced: Vec<usize> = (0..dims.len())
        .filter(|i| !keep_sorted.contains(i))
        .collect();
    let kept_dims: Vec<usize> = keep_sorted.iter().map(|&k| dims[k]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&k| dims[k]).collect();
    let dk: usize = kept_dims.iter().product();
    let dt: usize = traced_dims.iter().product();

    // strides of each subsystem in the full row-major index
    let mut strides = vec![1usize; dims.len()];
    for s in (0..dims.len().saturating_sub(1)).rev() {
        strides[s] = strides[s + 1] * dims[s + 1];
    }
    let offset = |digits_of: usize, sub_dims: &[usize], subs: &[usize]| -> usize {
        let mut rem = digits_of;
        let mut idx = 0;
        for (pos, &sd) in sub_dims.iter().enumerate().rev() {
            idx += (rem % sd) * strides[subs[pos]];
            rem /= sd;
        }
        idx
    };
    let kept_offsets: Vec<usize> = (0..dk)
        .map(|i| offset(i, &kept_dims, &keep_sorted))
        .collect();
    let traced_offsets: Vec<usize> = (0..dt).map(|t| offset(t, &traced_dims, &traced)).collect();

    let mut out = ComplexMatrix::zeros(dk);
    for (i, &oi) in kept_offsets.iter().enumerate() {
        for (j, &oj) in kept_offsets.iter().enumerate() {
            out[(i, j)] = traced_offsets.iter().map(|&t| m[(oi + t, oj + t)]).sum();
        }
    }
    Ok(out)
}

/// Density operator on a composite space, validated on construction.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    dims: Vec<usize>,
}

impl DensityMatrix {
    /// Validates unit trace, Hermiticity and positivity within the
    /// crate-wide tolerances.
    pub fn new(matrix: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        Self::with_negativity_tolerance(matrix, dims, NEGATIVITY_TOL)
    }

    /// As [`DensityMatrix::new`], accepting eigenvalues down to `-negativity`.
    pub fn with_negativity_tolerance(
        matrix: ComplexMatrix,
        dims: Vec<usize>,
        negativity: f64,
    ) -> Result<Self> {
        let total: usize = dims.iter().product();
        if dims.is_empty() || total != matrix.dim() {
            return Err(Error::invalid_argument(format!(
                "subsystem dims {dims:?} do not match matrix dimension {}",
                matrix.dim()
            )));
        }
        let tr = matrix.trace();
        if (tr - ONE).norm() >= TRACE_TOL {
            return Err(Error::invalid_state(format!("trace {tr} differs from 1")));
        }
        let herm = matrix.hermiticity_deviation();
        if herm >= HERMITICITY_TOL {
            return Err(Error::invalid_state(format!(
                "hermiticity deviation {herm:e}"
            )));
        }
        let min_eig = min_eigenvalue(&matrix)?;
        if min_eig <= -negativity {
            return Err(Error::invalid_state(format!(
                "negative eigenvalue {min_eig:e}"
            )));
        }
        Ok(Self { matrix, dims })
    }

    /// Pure state `|psi><psi|`; `psi` must be normalized.
    pub fn pure(psi: &[C64], dims: Vec<usize>) -> Result<Self> {
        Self::new(ComplexMatrix::outer(psi), dims)
    }

    #[inline]
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    #[inline]
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        partial_trace(self, keep)
    }

    /// `Tr(rho O)`, real part.
    pub fn expectation(&self, op: &ComplexMatrix) -> f64 {
        self.matrix.matmul(op).trace().re
    }

    pub fn purity(&self) -> f64 {
        self.matrix.matmul(&self.matrix).trace().re
    }
}

/// Reduced density matrix on the subsystems in `keep`.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let reduced = partial_trace_matrix(&rho.matrix, &rho.dims, keep)?;
    let mut keep_sorted = keep.to_vec();
    keep_sorted.sort_unstable();
    keep_sorted.dedup();
    let dims = keep_sorted.iter().map(|&k| rho.dims[k]).collect();
    DensityMatrix::new(reduced, dims)
}

/// Eigenvalues (ascending) and the unitary whose columns are the matching
/// eigenvectors.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl Eigen {
    /// `V diag(values) V^dagger`
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.values.len();
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = (0..n)
                    .map(|k| self.vectors[(i, k)] * self.values[k] * self.vectors[(j, k)].conj())
                    .sum();
            }
        }
        out
    }

    pub fn vector(&self, k: usize) -> Vec<C64> {
        (0..self.values.len())
            .map(|i| self.vectors[(i, k)])
            .collect()
    }
}

const JACOBI_MAX_SWEEPS: usize = 100;

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
pub fn hermitian_eigendecomposition(m: &ComplexMatrix) -> Result<Eigen> {
    let herm = m.hermiticity_deviation();
    if herm >= HERMITICITY_TOL {
        return Err(Error::invalid_argument(format!(
            "matrix is not Hermitian (deviation {herm:e})"
        )));
    }
    let n = m.dim();
    let mut a = m.clone();
    a.hermitize();
    let mut v = ComplexMatrix::identity(n);

    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| a[(p, q)].norm_sqr())
            .sum();
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let b = a[(p, q)];
                let mag = b.norm();
                if mag <= 1e-300 {
                    continue;
                }
                let phase = b / mag; // e^{i phi}
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let phase_conj = phase.conj();
                // G = diag(1, e^{-i phi}) * [[c, s], [-s, c]] on (p, q)
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * c - akq * phase_conj * s;
                    a[(k, q)] = akp * s + akq * phase_conj * c;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * c - aqk * phase * s;
                    a[(q, k)] = apk * s + aqk * phase * c;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)].im = 0.0;
                a[(q, q)].im = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c - vkq * phase_conj * s;
                    v[(k, q)] = vkp * s + vkq * phase_conj * c;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&k| a[(k, k)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for r in 0..n {
            vectors[(r, new_col)] = v[(r, old_col)];
        }
    }
    Ok(Eigen { values, vectors })
}

/// Eigenvalues (ascending) of a 2x2 Hermitian matrix, closed form.
#[inline]
pub fn hermitian_eigenvalues_2x2(a: f64, d: f64, b: C64) -> [f64; 2] {
    let mean = 0.5 * (a + d);
    let half_gap = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    [mean - half_gap, mean + half_gap]
}

pub(crate) fn min_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    if m.dim() == 2 {
        let e = hermitian_eigenvalues_2x2(m[(0, 0)].re, m[(1, 1)].re, m[(0, 1)]);
        return Ok(e[0]);
    }
    let eig = hermitian_eigendecomposition(m)?;
    Ok(eig.values[0])
}

/// Shannon entropy in bits of a spectrum, with `0 log 0 = 0`.
///
/// Eigenvalues down to `-NEGATIVITY_TOL` are treated as zero; anything
/// more negative is rejected.
pub fn spectrum_entropy(eigenvalues: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for &l in eigenvalues {
        if l < -NEGATIVITY_TOL {
            return Err(Error::invalid_state(format!("negative eigenvalue {l:e}")));
        }
        if l > 0.0 {
            s -= l * l.log2();
        }
    }
    Ok(s)
}

/// Von Neumann entropy `-Tr(rho log2 rho)` in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    matrix_entropy(rho.matrix())
}

/// Entropy of a Hermitian, unit-trace matrix that has not been wrapped as
/// a [`DensityMatrix`].
pub fn matrix_entropy(m: &ComplexMatrix) -> Result<f64> {
    if m.dim() == 2 {
        return spectrum_entropy(&hermitian_eigenvalues_2x2(
            m[(0, 0)].re,
            m[(1, 1)].re,
            m[(0, 1)],
        ));
    }
    let eig = hermitian_eigendecomposition(m)?;
    spectrum_entropy(&eig.values)
}
