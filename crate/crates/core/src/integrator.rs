//! Fixed-step RK4 integration of the master equation, plus the closed-form
//! solution of the single-excitation sector used to check it.

use std::f64::consts::SQRT_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{
    basis_ket, fock_ket, subradiant_ket, superradiant_ket, Lindbladian, ModelParams, StateParams,
    QUBIT_A, QUBIT_B,
};
use crate::operator_algebra::{
    kron_kets, min_eigenvalue, partial_trace_matrix, ComplexMatrix, DensityMatrix, C64, ONE,
};

/// Trace drift that aborts an integration.
pub const MAX_TRACE_DRIFT: f64 = 1e-7;
/// Most negative eigenvalue tolerated at a sample before aborting.
pub const MAX_NEGATIVITY: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegrationConfig {
    /// Step, in units of 1/Ω.
    pub dt: f64,
    /// Final time, in units of 1/Ω.
    pub t_max: f64,
    /// Steps between recorded samples.
    pub sample_every: usize,
}

impl Default for IntegrationConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            t_max: 30.0,
            sample_every: 100,
        }
    }
}

impl IntegrationConfig {
    pub fn new(dt: f64, t_max: f64, sample_every: usize) -> Result<Self> {
        let cfg = Self {
            dt,
            t_max,
            sample_every,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::invalid_argument(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if !(self.t_max.is_finite() && self.t_max > 0.0) {
            return Err(Error::invalid_argument(format!(
                "t_max must be positive, got {}",
                self.t_max
            )));
        }
        if self.sample_every < 1 {
            return Err(Error::invalid_argument("sample_every must be at least 1"));
        }
        if self.sample_interval() > self.t_max {
            return Err(Error::invalid_argument(format!(
                "dt * sample_every = {} exceeds t_max = {}",
                self.sample_interval(),
                self.t_max
            )));
        }
        Ok(())
    }

    pub fn sample_interval(&self) -> f64 {
        self.dt * self.sample_every as f64
    }

    /// Number of recorded samples, including `t = 0`.
    pub fn num_samples(&self) -> usize {
        // the slack absorbs ratios such as 30 / 0.1 landing just below an integer
        (self.t_max / self.sample_interval() + 1e-9).floor() as usize + 1
    }

    pub fn num_steps(&self) -> usize {
        (self.num_samples() - 1) * self.sample_every
    }
}

#[derive(Clone, Debug)]
pub struct Sample {
    /// Dimensionless time Ωt.
    pub omega_t: f64,
    pub rho_full: DensityMatrix,
    /// Two-qubit state with the cavity traced out.
    pub rho_ab: DensityMatrix,
}

#[derive(Clone, Debug, Default)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.omega_t)
    }
}

struct Rk4Workspace {
    k1: ComplexMatrix,
    k2: ComplexMatrix,
    k3: ComplexMatrix,
    k4: ComplexMatrix,
    stage: ComplexMatrix,
}

impl Rk4Workspace {
    fn new(dim: usize) -> Self {
        Self {
            k1: ComplexMatrix::zeros(dim),
            k2: ComplexMatrix::zeros(dim),
            k3: ComplexMatrix::zeros(dim),
            k4: ComplexMatrix::zeros(dim),
            stage: ComplexMatrix::zeros(dim),
        }
    }

    fn stage_from(&mut self, rho: &ComplexMatrix, h: f64, which: usize) {
        let k = match which {
            1 => &self.k1,
            2 => &self.k2,
            _ => &self.k3,
        };
        for ((s, &r), &d) in self
            .stage
            .entries_mut()
            .iter_mut()
            .zip(rho.entries())
            .zip(k.entries())
        {
            *s = r + d * h;
        }
    }

    fn step(&mut self, gen: &Lindbladian, rho: &mut ComplexMatrix, h: f64) {
        gen.apply_into(rho, &mut self.k1);
        self.stage_from(rho, 0.5 * h, 1);
        gen.apply_into(&self.stage, &mut self.k2);
        self.stage_from(rho, 0.5 * h, 2);
        gen.apply_into(&self.stage, &mut self.k3);
        self.stage_from(rho, h, 3);
        gen.apply_into(&self.stage, &mut self.k4);
        let w = h / 6.0;
        for (i, r) in rho.entries_mut().iter_mut().enumerate() {
            *r += (self.k1.entries()[i]
                + (self.k2.entries()[i] + self.k3.entries()[i]) * 2.0
                + self.k4.entries()[i])
                * w;
        }
    }
}

fn failure(omega_t: f64, reason: impl Into<String>) -> Error {
    Error::IntegrationFailure {
        omega_t,
        reason: reason.into(),
    }
}

fn make_sample(rho: &ComplexMatrix, dims: &[usize], omega_t: f64) -> Result<Sample> {
    let min_eig = min_eigenvalue(rho).map_err(|e| failure(omega_t, e.to_string()))?;
    if min_eig < -MAX_NEGATIVITY {
        return Err(failure(
            omega_t,
            format!("eigenvalue {min_eig:e} below -{MAX_NEGATIVITY:e}"),
        ));
    }
    let rho_full =
        DensityMatrix::with_negativity_tolerance(rho.clone(), dims.to_vec(), MAX_NEGATIVITY)
            .map_err(|e| failure(omega_t, e.to_string()))?;
    let reduced = partial_trace_matrix(rho_full.matrix(), dims, &[QUBIT_A, QUBIT_B])
        .map_err(|e| failure(omega_t, e.to_string()))?;
    let rho_ab = DensityMatrix::with_negativity_tolerance(reduced, vec![2, 2], MAX_NEGATIVITY)
        .map_err(|e| failure(omega_t, e.to_string()))?;
    Ok(Sample {
        omega_t,
        rho_full,
        rho_ab,
    })
}

/// Integrate the master equation from `rho0` with classical RK4 at fixed
/// step, Hermitizing after every step and recording every
/// `cfg.sample_every` steps.
pub fn integrate(
    rho0: &DensityMatrix,
    p: &ModelParams,
    cfg: &IntegrationConfig,
) -> Result<Trajectory> {
    cfg.validate()?;
    let dims = p.dims();
    if rho0.dims() != dims.as_slice() {
        return Err(Error::invalid_argument(format!(
            "initial state dims {:?} do not match model dims {dims:?}",
            rho0.dims()
        )));
    }
    let gen = Lindbladian::new(p)?;
    let h = cfg.dt / p.omega;
    let mut ws = Rk4Workspace::new(gen.dim());
    let mut rho = rho0.matrix().clone();

    let mut samples = Vec::with_capacity(cfg.num_samples());
    samples.push(make_sample(&rho, &dims, 0.0)?);
    for step in 1..=cfg.num_steps() {
        ws.step(&gen, &mut rho, h);
        rho.hermitize();
        let omega_t = step as f64 * cfg.dt;
        let drift = (rho.trace() - ONE).norm();
        if !drift.is_finite() || drift > MAX_TRACE_DRIFT {
            return Err(failure(omega_t, format!("trace drift {drift:e}")));
        }
        if step % cfg.sample_every == 0 {
            samples.push(make_sample(&rho, &dims, omega_t)?);
        }
    }
    Ok(Trajectory { samples })
}

/// `exp(-i M t)` for `M = [[0, g], [g, -iΓ/2]]`, applied to `(c_plus, c_cav)`.
fn coupled_block_propagate(g: f64, gamma: f64, t: f64, c_plus: C64, c_cav: C64) -> (C64, C64) {
    // M = -iΓ/4 · 1 + K with K = [[iΓ/4, g], [g, -iΓ/4]] and K² = s² · 1
    let q = C64::new(0.0, 0.25 * gamma);
    let s = Complex64::new(g * g - gamma * gamma / 16.0, 0.0).sqrt();
    let st = s * t;
    let cos_st = st.cos();
    let sin_over_s = if s.norm() * t.abs() < 1e-6 {
        C64::new(t, 0.0) * (ONE - st * st / 6.0)
    } else {
        st.sin() / s
    };
    let damp = (-0.25 * gamma * t).exp();
    let mi = C64::new(0.0, -1.0);
    let plus = cos_st * c_plus + mi * sin_over_s * (q * c_plus + g * c_cav);
    let cav = cos_st * c_cav + mi * sin_over_s * (g * c_plus - q * c_cav);
    (plus * damp, cav * damp)
}

/// Exact `ρ(t)` for the correlated single-excitation initial state, at
/// physical time `t` on the Fock space of `p`.
pub fn analytic_single_excitation(
    s: &StateParams,
    p: &ModelParams,
    t: f64,
) -> Result<DensityMatrix> {
    p.validate()?;
    let f = p.fock_dim();
    let g = SQRT_2 * p.omega;
    let c_minus = C64::new(s.subradiant_amplitude(), 0.0);
    let (c_plus, c_cav) = coupled_block_propagate(
        g,
        p.gamma(),
        t,
        C64::new(s.superradiant_amplitude(), 0.0),
        C64::new(s.gamma(), 0.0),
    );

    let vac = fock_ket(0, f);
    let plus0 = kron_kets(&[&superradiant_ket(), &vac]);
    let minus0 = kron_kets(&[&subradiant_ket(), &vac]);
    let gg1 = basis_ket(0, 0, 1, f);
    let psi: Vec<C64> = (0..4 * f)
        .map(|i| c_plus * plus0[i] + c_minus * minus0[i] + c_cav * gg1[i])
        .collect();
    let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();

    let mut rho = ComplexMatrix::outer(&psi);
    rho[(0, 0)] += C64::new((1.0 - norm).max(0.0), 0.0);
    DensityMatrix::new(rho, p.dims())
}

/// Long-time two-qubit state: mean of `rho_ab` over the last
/// `tail_fraction` of the samples.
pub fn steady_state_estimate(traj: &Trajectory, tail_fraction: f64) -> Result<DensityMatrix> {
    if traj.len() < 10 {
        return Err(Error::invalid_argument(format!(
            "need at least 10 samples, got {}",
            traj.len()
        )));
    }
    if !(tail_fraction > 0.0 && tail_fraction <= 0.5) {
        return Err(Error::invalid_argument(format!(
            "tail fraction must be in (0, 0.5], got {tail_fraction}"
        )));
    }
    let tail = tail_len(traj.len(), tail_fraction);
    let mut acc = ComplexMatrix::zeros(4);
    for sample in &traj.samples[traj.len() - tail..] {
        acc.add_scaled(1.0, sample.rho_ab.matrix());
    }
    let mut mean = acc.scale_real(1.0 / tail as f64);
    mean.hermitize();
    DensityMatrix::new(mean, vec![2, 2])
}

/// Number of trailing samples covered by `fraction` of `n`, at least one.
pub fn tail_len(n: usize, fraction: f64) -> usize {
    ((n as f64 * fraction).ceil() as usize).clamp(1, n)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_4};

    use super::*;
    use crate::model::{initial_state_correlated, space_dims, subradiant_vacuum_projector};

    #[test]
    fn config_validation_and_sample_count() {
        assert!(IntegrationConfig::new(0.0, 1.0, 1).is_err());
        assert!(IntegrationConfig::new(1e-3, 0.0, 1).is_err());
        assert!(IntegrationConfig::new(1e-3, 1.0, 0).is_err());
        assert!(IntegrationConfig::new(0.1, 1.0, 20).is_err());
        let cfg = IntegrationConfig::default();
        assert_eq!(cfg.num_samples(), 301);
        assert_eq!(cfg.num_steps(), 30_000);
        let odd = IntegrationConfig::new(1e-2, 1.05, 10).unwrap();
        assert_eq!(odd.num_samples(), 11);
    }

    #[test]
    fn vacuum_is_stationary() {
        let p = ModelParams::with_gamma_ratio(1.0).unwrap();
        let rho0 = DensityMatrix::pure(&basis_ket(0, 0, 0, 3), space_dims(3)).unwrap();
        let cfg = IntegrationConfig::new(1e-2, 2.0, 10).unwrap();
        let traj = integrate(&rho0, &p, &cfg).unwrap();
        assert_eq!(traj.len(), 21);
        for s in &traj.samples {
            assert_eq!(s.rho_full.matrix(), rho0.matrix());
        }
        let ss = steady_state_estimate(&traj, 0.2).unwrap();
        assert_eq!(
            ss.matrix(),
            &ComplexMatrix::from_real_diagonal(&[1.0, 0.0, 0.0, 0.0])
        );
    }

    #[test]
    fn subradiant_vacuum_is_stationary() {
        let p = ModelParams::with_gamma_ratio(0.2).unwrap();
        let rho0 = DensityMatrix::new(subradiant_vacuum_projector(3), space_dims(3)).unwrap();
        let cfg = IntegrationConfig::new(1e-2, 2.0, 10).unwrap();
        let traj = integrate(&rho0, &p, &cfg).unwrap();
        for s in &traj.samples {
            assert!(s.rho_full.matrix().max_abs_diff(rho0.matrix()) < 1e-15);
        }
    }

    #[test]
    fn rejects_mismatched_initial_state() {
        let p = ModelParams::with_gamma_ratio(1.0).unwrap();
        let s = StateParams::new(FRAC_PI_3, FRAC_PI_4).unwrap();
        let rho0 = initial_state_correlated(&s, 3).unwrap();
        let cfg = IntegrationConfig::new(1e-2, 1.0, 10).unwrap();
        assert!(matches!(
            integrate(&rho0, &p, &cfg),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn unstable_step_reports_failure_time() {
        // dt far beyond the RK4 stability region for Γ = 50Ω
        let p = ModelParams::with_gamma_ratio(50.0).unwrap();
        let s = StateParams::new(0.3, 1.0).unwrap();
        let rho0 = initial_state_correlated(&s, 2).unwrap();
        let cfg = IntegrationConfig::new(0.5, 50.0, 1).unwrap();
        match integrate(&rho0, &p, &cfg) {
            Err(Error::IntegrationFailure { omega_t, .. }) => assert!(omega_t > 0.0),
            other => panic!("expected integration failure, got {other:?}"),
        }
    }

    #[test]
    fn analytic_at_zero_is_initial_state() {
        let s = StateParams::new(FRAC_PI_3, 3.0 * FRAC_PI_4).unwrap();
        let p = ModelParams::with_gamma_ratio(0.2).unwrap();
        let rho = analytic_single_excitation(&s, &p, 0.0).unwrap();
        let rho0 = initial_state_correlated(&s, 2).unwrap();
        assert!(rho.matrix().max_abs_diff(rho0.matrix()) < 1e-15);
    }

    #[test]
    fn analytic_vacuum_rabi_oscillation() {
        let s = StateParams::new(0.0, 0.0).unwrap();
        let p = ModelParams::new(1.3, 0.0, 2).unwrap();
        let gg1 = basis_ket(0, 0, 1, 3)
            .iter()
            .position(|z| *z == ONE)
            .unwrap();
        for k in 0..50 {
            let t = 0.137 * k as f64;
            let rho = analytic_single_excitation(&s, &p, t).unwrap();
            let expected = (SQRT_2 * p.omega * t).cos().powi(2);
            assert!((rho.matrix()[(gg1, gg1)].re - expected).abs() < 1e-13);
        }
    }

    #[test]
    fn analytic_long_time_limit() {
        let s = StateParams::new(FRAC_PI_3, 3.0 * FRAC_PI_4).unwrap();
        let p = ModelParams::with_gamma_ratio(5.0).unwrap();
        let rho = analytic_single_excitation(&s, &p, 200.0).unwrap();
        let mut expected = subradiant_vacuum_projector(3).scale_real(0.75);
        expected[(0, 0)] += C64::new(0.25, 0.0);
        assert!(rho.matrix().max_abs_diff(&expected) < 1e-12);
    }

    #[test]
    fn analytic_near_critical_damping_is_continuous() {
        // Γ = 4√2 Ω makes the coupled block defective
        let s = StateParams::new(0.7, 0.4).unwrap();
        let crit = ModelParams::with_gamma_ratio(4.0 * SQRT_2).unwrap();
        let near = ModelParams::with_gamma_ratio(4.0 * SQRT_2 + 1e-9).unwrap();
        let a = analytic_single_excitation(&s, &crit, 1.7).unwrap();
        let b = analytic_single_excitation(&s, &near, 1.7).unwrap();
        assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-8);
    }

    #[test]
    fn steady_state_rejects_bad_inputs() {
        let p = ModelParams::with_gamma_ratio(1.0).unwrap();
        let rho0 = DensityMatrix::pure(&basis_ket(0, 0, 0, 3), space_dims(3)).unwrap();
        let short = integrate(&rho0, &p, &IntegrationConfig::new(0.1, 0.5, 1).unwrap()).unwrap();
        assert!(steady_state_estimate(&short, 0.2).is_err());
        let long = integrate(&rho0, &p, &IntegrationConfig::new(0.1, 2.0, 1).unwrap()).unwrap();
        assert!(steady_state_estimate(&long, 0.0).is_err());
        assert!(steady_state_estimate(&long, 0.6).is_err());
        assert!(steady_state_estimate(&long, 0.5).is_ok());
    }

    #[test]
    fn tail_len_rounds_up() {
        assert_eq!(tail_len(301, 0.2), 61);
        assert_eq!(tail_len(10, 0.2), 2);
        assert_eq!(tail_len(3, 0.01), 1);
    }
}
