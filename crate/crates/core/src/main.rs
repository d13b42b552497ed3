use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cavity_discord::scenario::{
    run_scenario, run_sweep, ScenarioConfig, ScenarioKind, SweepParameter,
};
use cavity_discord::Error;

#[derive(Parser, Debug)]
#[command(
    name = "cavity-discord",
    version,
    about = "Discord dynamics of two qubits in a common lossy cavity"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one scenario and write its CSV.
    Run(ScenarioArgs),
    /// Run one scenario per value of a parameter.
    Sweep {
        /// gammaRatio, stateTheta, statePhi or scenario
        #[arg(long)]
        vary: String,
        /// Comma-separated values for the swept parameter.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        values: Vec<String>,
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
}

#[derive(Args, Debug)]
struct ScenarioArgs {
    /// JSON config; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    scenario: Option<String>,
    /// State angle θ in radians.
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<f64>,
    /// State phase φ in radians.
    #[arg(long = "state-phi", allow_hyphen_values = true)]
    state_phi: Option<f64>,
    /// Cavity decay rate Γ/Ω.
    #[arg(long = "gamma-ratio", allow_hyphen_values = true)]
    gamma_ratio: Option<f64>,
    /// Final time in units of 1/Ω.
    #[arg(long = "t-max", allow_hyphen_values = true)]
    t_max: Option<f64>,
    /// RK4 step in units of 1/Ω.
    #[arg(long, allow_hyphen_values = true)]
    dt: Option<f64>,
    #[arg(long = "sample-every")]
    sample_every: Option<usize>,
    /// Output CSV path.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl ScenarioArgs {
    fn resolve(&self) -> Result<ScenarioConfig, Error> {
        let mut cfg = match &self.config {
            Some(path) => ScenarioConfig::from_json_file(path)?,
            None => ScenarioConfig::default(),
        };
        if let Some(s) = &self.scenario {
            cfg.scenario = s.parse::<ScenarioKind>()?;
        }
        if let Some(v) = self.theta {
            cfg.state_theta = v;
        }
        if let Some(v) = self.state_phi {
            cfg.state_phi = v;
        }
        if let Some(v) = self.gamma_ratio {
            cfg.gamma_ratio = v;
        }
        if let Some(v) = self.t_max {
            cfg.t_max = v;
        }
        if let Some(v) = self.dt {
            cfg.dt = v;
        }
        if let Some(v) = self.sample_every {
            cfg.sample_every = v;
        }
        if let Some(p) = &self.out {
            cfg.output_path = p.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Config(_) | Error::InvalidArgument(_) => 1,
        Error::IntegrationFailure { .. } | Error::InvalidState(_) => 2,
        Error::Io { .. } => 3,
    }
}

fn execute(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Run(args) => {
            let cfg = args.resolve()?;
            let summary = run_scenario(&cfg)?;
            let json = serde_json::json!({
                "output_path": cfg.output_path,
                "summary": summary,
            });
            println!(
                "{}",
                serde_json::to_string_pretty(&json).expect("summary serializes")
            );
        }
        Command::Sweep {
            vary,
            values,
            scenario,
        } => {
            let parameter: SweepParameter = vary.parse()?;
            let base = scenario.resolve()?;
            let report = run_sweep(&base, parameter, &values)?;
            let entries: Vec<_> = report
                .entries
                .iter()
                .map(|e| serde_json::json!({"value": e.value, "output_path": e.output_path, "summary": e.summary}))
                .collect();
            let json = serde_json::json!({
                "parameter": parameter.name(),
                "summary_path": report.summary_path,
                "entries": entries,
            });
            println!(
                "{}",
                serde_json::to_string_pretty(&json).expect("summary serializes")
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
