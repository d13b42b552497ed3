//! Scenario configuration, trajectory analysis and CSV output.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correlations::{correlations, CorrelationTriple};
use crate::error::{Error, Result};
use crate::integrator::{integrate, tail_len, IntegrationConfig, Trajectory};
use crate::model::{initial_state_correlated, initial_state_factorized, ModelParams, StateParams};
use crate::operator_algebra::DensityMatrix;

pub const CSV_HEADER: &str = "omega_t,mutual_information,classical_correlation,quantum_discord";
pub const SUMMARY_HEADER: &str = "value,initial_discord,early_max_discord,early_max_omega_t,early_min_discord,early_min_omega_t,tail_mutual_information,tail_classical_correlation,tail_quantum_discord";

/// Fraction of trailing samples averaged for long-time values.
pub const TAIL_FRACTION: f64 = 0.2;
/// Early extrema are searched over `Ωt ∈ [0, EARLY_WINDOW]`.
pub const EARLY_WINDOW: f64 = 5.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioKind {
    /// `α|ge0> + β|eg0> + γ|gg1>`.
    Correlated,
    /// `ρ_AB ⊗ ρ_c` with the same marginals.
    Factorized,
}

impl ScenarioKind {
    pub fn initial_state(&self, s: &StateParams, fock_cutoff: usize) -> Result<DensityMatrix> {
        match self {
            ScenarioKind::Correlated => initial_state_correlated(s, fock_cutoff),
            ScenarioKind::Factorized => initial_state_factorized(s, fock_cutoff),
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScenarioKind::Correlated => "correlated",
            ScenarioKind::Factorized => "factorized",
        })
    }
}

impl FromStr for ScenarioKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "correlated" => Ok(ScenarioKind::Correlated),
            "factorized" => Ok(ScenarioKind::Factorized),
            other => Err(Error::Config(format!(
                "unknown scenario {other:?} (expected correlated or factorized)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    pub state_theta: f64,
    pub state_phi: f64,
    pub gamma_ratio: f64,
    pub t_max: f64,
    pub dt: f64,
    pub sample_every: usize,
    pub output_path: PathBuf,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            scenario: ScenarioKind::Correlated,
            state_theta: std::f64::consts::FRAC_PI_3,
            state_phi: 3.0 * std::f64::consts::FRAC_PI_4,
            gamma_ratio: 0.2,
            t_max: 30.0,
            dt: 1e-3,
            sample_every: 100,
            output_path: PathBuf::from("discord.csv"),
        }
    }
}

impl ScenarioConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.state_params()?;
        self.model_params()?;
        self.integration_config()?;
        Ok(())
    }

    pub fn state_params(&self) -> Result<StateParams> {
        StateParams::new(self.state_theta, self.state_phi).map_err(into_config)
    }

    pub fn model_params(&self) -> Result<ModelParams> {
        ModelParams::new(1.0, self.gamma_ratio, 2).map_err(into_config)
    }

    pub fn integration_config(&self) -> Result<IntegrationConfig> {
        IntegrationConfig::new(self.dt, self.t_max, self.sample_every).map_err(into_config)
    }
}

fn into_config(e: Error) -> Error {
    match e {
        Error::InvalidArgument(msg) => Error::Config(msg),
        other => other,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScenarioRow {
    pub omega_t: f64,
    pub triple: CorrelationTriple,
}

#[derive(Clone, Debug)]
pub struct ScenarioResult {
    pub config: ScenarioConfig,
    pub trajectory: Trajectory,
    pub rows: Vec<ScenarioRow>,
}

/// Discord value at a given time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TimedDiscord {
    pub omega_t: f64,
    pub discord: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TailAverage {
    pub mutual_info: f64,
    pub classical: f64,
    pub discord: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScenarioSummary {
    pub initial: CorrelationTriple,
    /// Largest discord over the early window.
    pub early_max: TimedDiscord,
    /// Smallest discord over the early window.
    pub early_min: TimedDiscord,
    /// Early-window sample farthest from the initial discord.
    pub extremum: TimedDiscord,
    pub tail: TailAverage,
}

impl ScenarioResult {
    pub fn summary(&self) -> ScenarioSummary {
        summarize(&self.rows)
    }

    pub fn discord(&self) -> impl Iterator<Item = f64> + '_ {
        self.rows.iter().map(|r| r.triple.discord)
    }
}

pub fn summarize(rows: &[ScenarioRow]) -> ScenarioSummary {
    assert!(!rows.is_empty(), "cannot summarize an empty scenario");
    let initial = rows[0].triple;
    let timed = |r: &ScenarioRow| TimedDiscord {
        omega_t: r.omega_t,
        discord: r.triple.discord,
    };
    let early: Vec<&ScenarioRow> = rows
        .iter()
        .filter(|r| r.omega_t <= EARLY_WINDOW + 1e-9)
        .collect();

    let mut early_max = timed(early[0]);
    let mut early_min = timed(early[0]);
    let mut extremum = timed(early[0]);
    for r in &early {
        let d = r.triple.discord;
        if d > early_max.discord {
            early_max = timed(r);
        }
        if d < early_min.discord {
            early_min = timed(r);
        }
        if (d - initial.discord).abs() > (extremum.discord - initial.discord).abs() {
            extremum = timed(r);
        }
    }

    let n_tail = tail_len(rows.len(), TAIL_FRACTION);
    let tail_rows = &rows[rows.len() - n_tail..];
    let mean = |f: fn(&CorrelationTriple) -> f64| {
        tail_rows.iter().map(|r| f(&r.triple)).sum::<f64>() / n_tail as f64
    };
    let tail = TailAverage {
        mutual_info: mean(|t| t.mutual_info),
        classical: mean(|t| t.classical),
        discord: mean(|t| t.discord),
    };
    ScenarioSummary {
        initial,
        early_max,
        early_min,
        extremum,
        tail,
    }
}

/// Build the initial state, integrate and evaluate correlations at every
/// sample. No files are written.
pub fn simulate(cfg: &ScenarioConfig) -> Result<ScenarioResult> {
    cfg.validate()?;
    let p = cfg.model_params()?;
    let rho0 = cfg
        .scenario
        .initial_state(&cfg.state_params()?, p.fock_cutoff)?;
    let trajectory = integrate(&rho0, &p, &cfg.integration_config()?)?;
    let rows = trajectory
        .samples
        .par_iter()
        .map(|s| {
            Ok(ScenarioRow {
                omega_t: s.omega_t,
                triple: correlations(&s.rho_ab)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScenarioResult {
        config: cfg.clone(),
        trajectory,
        rows,
    })
}

/// Simulate, write the CSV to `cfg.output_path` and return the summary.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioSummary> {
    let result = simulate(cfg)?;
    write_csv(&cfg.output_path, &result.rows)?;
    Ok(result.summary())
}

/// `%.12g`-style formatting: 12 significant digits, trailing zeros
/// trimmed, exponent form outside `[1e-5, 1e12)`.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..12).contains(&exp) {
        let m = trim_fraction(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (11 - exp) as usize;
        trim_fraction(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn csv_string(rows: &[ScenarioRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let t = &r.triple;
        out.push_str(&format!(
            "{},{},{},{}\n",
            format_sig(r.omega_t),
            format_sig(t.mutual_info),
            format_sig(t.classical),
            format_sig(t.discord)
        ));
    }
    out
}

pub fn write_csv(path: &Path, rows: &[ScenarioRow]) -> Result<()> {
    write_file(path, &csv_string(rows))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepParameter {
    GammaRatio,
    StateTheta,
    StatePhi,
    Scenario,
}

impl SweepParameter {
    pub fn name(&self) -> &'static str {
        match self {
            SweepParameter::GammaRatio => "gamma_ratio",
            SweepParameter::StateTheta => "state_theta",
            SweepParameter::StatePhi => "state_phi",
            SweepParameter::Scenario => "scenario",
        }
    }

    /// Copy of `base` with this parameter set to `value`.
    pub fn apply(&self, base: &ScenarioConfig, value: &str) -> Result<ScenarioConfig> {
        let mut cfg = base.clone();
        let number = || {
            value.trim().parse::<f64>().map_err(|_| {
                Error::Config(format!(
                    "cannot parse {value:?} as a number for {}",
                    self.name()
                ))
            })
        };
        match self {
            SweepParameter::GammaRatio => cfg.gamma_ratio = number()?,
            SweepParameter::StateTheta => cfg.state_theta = number()?,
            SweepParameter::StatePhi => cfg.state_phi = number()?,
            SweepParameter::Scenario => cfg.scenario = value.parse()?,
        }
        Ok(cfg)
    }
}

impl FromStr for SweepParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "gammaRatio" | "gamma_ratio" | "gamma-ratio" => Ok(SweepParameter::GammaRatio),
            "stateTheta" | "state_theta" | "state-theta" | "theta" => {
                Ok(SweepParameter::StateTheta)
            }
            "statePhi" | "state_phi" | "state-phi" => Ok(SweepParameter::StatePhi),
            "scenario" => Ok(SweepParameter::Scenario),
            other => Err(Error::Config(format!(
                "cannot sweep {other:?} (expected gammaRatio, stateTheta, statePhi or scenario)"
            ))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SweepEntry {
    pub value: String,
    pub output_path: PathBuf,
    pub summary: ScenarioSummary,
}

#[derive(Clone, Debug)]
pub struct SweepReport {
    pub parameter: SweepParameter,
    pub entries: Vec<SweepEntry>,
    pub summary_path: PathBuf,
}

fn sanitize(label: &str) -> String {
    label
        .trim()
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '.' || c == '-' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// `<dir>/<stem>_<suffix>.<ext>` from the base output path.
fn derived_path(base: &Path, suffix: &str) -> PathBuf {
    let stem = base
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("discord");
    let ext = base.extension().and_then(|s| s.to_str()).unwrap_or("csv");
    base.with_file_name(format!("{stem}_{suffix}.{ext}"))
}

pub fn sweep_output_path(base: &Path, parameter: SweepParameter, value: &str) -> PathBuf {
    derived_path(base, &format!("{}_{}", parameter.name(), sanitize(value)))
}

pub fn sweep_summary_path(base: &Path) -> PathBuf {
    derived_path(base, "summary")
}

/// Run `base` once per value of `parameter`, concurrently. Each point
/// writes its own CSV; the combined summary table follows the order of
/// `values`.
pub fn run_sweep(
    base: &ScenarioConfig,
    parameter: SweepParameter,
    values: &[String],
) -> Result<SweepReport> {
    if values.is_empty() {
        return Err(Error::Config("sweep needs at least one value".into()));
    }
    let configs = values
        .iter()
        .map(|v| {
            let mut cfg = parameter.apply(base, v)?;
            cfg.output_path = sweep_output_path(&base.output_path, parameter, v);
            cfg.validate()?;
            Ok((v.trim().to_string(), cfg))
        })
        .collect::<Result<Vec<_>>>()?;

    let entries = configs
        .par_iter()
        .map(|(value, cfg)| {
            let summary = run_scenario(cfg)?;
            Ok(SweepEntry {
                value: value.clone(),
                output_path: cfg.output_path.clone(),
                summary,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let summary_path = sweep_summary_path(&base.output_path);
    write_file(&summary_path, &summary_table(&entries))?;
    Ok(SweepReport {
        parameter,
        entries,
        summary_path,
    })
}

pub fn summary_table(entries: &[SweepEntry]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for e in entries {
        let s = &e.summary;
        let cells = [
            format_sig(s.initial.discord),
            format_sig(s.early_max.discord),
            format_sig(s.early_max.omega_t),
            format_sig(s.early_min.discord),
            format_sig(s.early_min.omega_t),
            format_sig(s.tail.mutual_info),
            format_sig(s.tail.classical),
            format_sig(s.tail.discord),
        ];
        out.push_str(&e.value);
        for c in cells {
            out.push(',');
            out.push_str(&c);
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn format_sig_matches_printf_g() {
        assert_eq!(format_sig(0.0), "0");
        assert_eq!(format_sig(-0.0), "0");
        assert_eq!(format_sig(30.0), "30");
        assert_eq!(format_sig(0.1), "0.1");
        assert_eq!(format_sig(0.8112781244591328), "0.811278124459");
        assert_eq!(format_sig(-1.25), "-1.25");
        assert_eq!(format_sig(1.5e-7), "1.5e-07");
        assert_eq!(format_sig(1.0e-5), "1e-05");
        assert_eq!(format_sig(0.000123456789012345), "0.000123456789012");
        assert_eq!(format_sig(9.99999999999995), "10");
        assert_eq!(format_sig(2.0e13), "2e+13");
    }

    #[test]
    fn config_json_round_trip_and_defaults() {
        let cfg =
            ScenarioConfig::from_json_str(r#"{"scenario": "factorized", "gamma_ratio": 5.0}"#)
                .unwrap();
        assert_eq!(cfg.scenario, ScenarioKind::Factorized);
        assert_eq!(cfg.gamma_ratio, 5.0);
        assert_eq!(cfg.t_max, 30.0);
        assert_eq!(cfg.sample_every, 100);
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(ScenarioConfig::from_json_str(&text).unwrap(), cfg);
        assert!(ScenarioConfig::from_json_str(r#"{"gamma": 1}"#).is_err());
    }

    #[test]
    fn config_validation_reports_config_errors() {
        let bad = ScenarioConfig {
            state_theta: 2.0,
            ..Default::default()
        };
        assert!(matches!(bad.validate(), Err(Error::Config(_))));
        let bad = ScenarioConfig {
            gamma_ratio: -1.0,
            ..Default::default()
        };
        assert!(matches!(bad.validate(), Err(Error::Config(_))));
        let bad = ScenarioConfig {
            dt: 1.0,
            sample_every: 100,
            ..Default::default()
        };
        assert!(matches!(bad.validate(), Err(Error::Config(_))));
        assert!(ScenarioConfig::default().validate().is_ok());
    }

    #[test]
    fn sweep_parameter_parsing() {
        assert_eq!(
            "gammaRatio".parse::<SweepParameter>().unwrap(),
            SweepParameter::GammaRatio
        );
        assert_eq!(
            "state_phi".parse::<SweepParameter>().unwrap(),
            SweepParameter::StatePhi
        );
        assert!("dt".parse::<SweepParameter>().is_err());
        let cfg = SweepParameter::Scenario
            .apply(&ScenarioConfig::default(), "factorized")
            .unwrap();
        assert_eq!(cfg.scenario, ScenarioKind::Factorized);
        assert!(SweepParameter::GammaRatio
            .apply(&ScenarioConfig::default(), "fast")
            .is_err());
    }

    #[test]
    fn sweep_paths() {
        let base = Path::new("out/run.csv");
        assert_eq!(
            sweep_output_path(base, SweepParameter::GammaRatio, "0.2"),
            PathBuf::from("out/run_gamma_ratio_0.2.csv")
        );
        assert_eq!(
            sweep_summary_path(base),
            PathBuf::from("out/run_summary.csv")
        );
        assert_eq!(sanitize(" a/b c "), "a_b_c");
    }
}
