use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qfpe_cli::config::ScenarioConfig;
use qfpe_cli::runner::{self, CircuitKind};
use qfpe_cli::CliError;

/// Quantum-circuit prediction step for the Fokker-Planck equation.
#[derive(Parser)]
#[command(name = "qfpe", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario: classical reference vs quantum prediction.
    Run(ScenarioArgs),
    /// Verify the Fourier diagonalization of the grid operators.
    Eigencheck {
        /// Comma-separated operator sizes.
        #[arg(long, value_delimiter = ',', default_values_t = [4usize, 8, 16, 32, 64])]
        sizes: Vec<usize>,
    },
    /// Gate tallies and cost-model figures for the prediction circuit.
    Gatecount(ScenarioArgs),
    /// Print a circuit as text, one gate per line.
    DumpCircuit {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Which circuit to print.
        #[arg(long, value_enum)]
        kind: KindArg,
        /// Print the inverse transform (qft only).
        #[arg(long)]
        inverse: bool,
    },
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Qft,
    Drift,
    Diffusion,
    Prediction,
}

impl From<KindArg> for CircuitKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Qft => CircuitKind::Qft,
            KindArg::Drift => CircuitKind::Drift,
            KindArg::Diffusion => CircuitKind::Diffusion,
            KindArg::Prediction => CircuitKind::Prediction,
        }
    }
}

/// Configuration sources, applied lowest to highest: defaults, --preset,
/// --config file, then the individual flags below (each named after its
/// config key).
#[derive(Args, Default)]
struct ScenarioArgs {
    /// Start from a bundled scenario: scenario1 (mu_v=-1) or scenario2
    /// (mu_v=2).
    #[arg(long)]
    preset: Option<String>,
    /// key=value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "n_x")]
    n_x: Option<usize>,
    #[arg(long = "n_v")]
    n_v: Option<usize>,
    #[arg(long = "delta_x")]
    delta_x: Option<f64>,
    #[arg(long)]
    x0: Option<f64>,
    #[arg(long = "v_min", allow_hyphen_values = true)]
    v_min: Option<f64>,
    #[arg(long = "v_max", allow_hyphen_values = true)]
    v_max: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long = "nu_v")]
    nu_v: Option<f64>,
    #[arg(long = "mu_x", allow_hyphen_values = true)]
    mu_x: Option<f64>,
    #[arg(long = "sigma_x")]
    sigma_x: Option<f64>,
    #[arg(long = "mu_v", allow_hyphen_values = true)]
    mu_v: Option<f64>,
    #[arg(long = "sigma_v")]
    sigma_v: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long = "reencode_each_step")]
    reencode_each_step: Option<bool>,
    #[arg(long = "out_dir")]
    out_dir: Option<PathBuf>,
}

impl ScenarioArgs {
    fn has_any_source(&self) -> bool {
        self.preset.is_some()
            || self.config.is_some()
            || self.n_x.is_some()
            || self.n_v.is_some()
            || self.delta_x.is_some()
            || self.x0.is_some()
            || self.v_min.is_some()
            || self.v_max.is_some()
            || self.dt.is_some()
            || self.q.is_some()
            || self.nu_v.is_some()
            || self.mu_x.is_some()
            || self.sigma_x.is_some()
            || self.mu_v.is_some()
            || self.sigma_v.is_some()
            || self.steps.is_some()
            || self.reencode_each_step.is_some()
            || self.out_dir.is_some()
    }

    fn resolve(&self) -> Result<ScenarioConfig, CliError> {
        let mut cfg = match &self.preset {
            Some(name) => ScenarioConfig::preset(name)?,
            None => ScenarioConfig::default(),
        };
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        if let Some(v) = self.n_x {
            cfg.n_x = v;
        }
        if let Some(v) = self.n_v {
            cfg.n_v = v;
        }
        if let Some(v) = self.delta_x {
            cfg.delta_x = v;
        }
        if let Some(v) = self.x0 {
            cfg.x0 = v;
        }
        if let Some(v) = self.v_min {
            cfg.v_min = v;
        }
        if let Some(v) = self.v_max {
            cfg.v_max = v;
        }
        if let Some(v) = self.dt {
            cfg.dt = v;
        }
        if let Some(v) = self.q {
            cfg.q = v;
        }
        if let Some(v) = self.nu_v {
            cfg.nu_v = Some(v);
        }
        if let Some(v) = self.mu_x {
            cfg.mu_x = Some(v);
        }
        if let Some(v) = self.sigma_x {
            cfg.sigma_x = Some(v);
        }
        if let Some(v) = self.mu_v {
            cfg.mu_v = v;
        }
        if let Some(v) = self.sigma_v {
            cfg.sigma_v = Some(v);
        }
        if let Some(v) = self.steps {
            cfg.steps = v;
        }
        if let Some(v) = self.reencode_each_step {
            cfg.reencode_each_step = v;
        }
        if let Some(v) = &self.out_dir {
            cfg.out_dir = Some(v.clone());
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run(args) => {
            let cfg = args.resolve()?;
            let out_dir = runner::resolve_out_dir(args.out_dir.as_deref(), &cfg);
            runner::run_scenario(&cfg, &out_dir)?;
            Ok(())
        }
        Command::Eigencheck { sizes } => {
            let report = runner::eigencheck(&sizes)?;
            print!("{report}");
            Ok(())
        }
        Command::Gatecount(args) => {
            if !args.has_any_source() {
                return Err(CliError::Config(
                    "gatecount needs a configuration: pass --preset, --config, or \
                     explicit flags"
                        .into(),
                ));
            }
            let cfg = args.resolve()?;
            let report = runner::gatecount(&cfg)?;
            print!("{report}");
            Ok(())
        }
        Command::DumpCircuit {
            scenario,
            kind,
            inverse,
        } => {
            let cfg = scenario.resolve()?;
            let text = runner::dump_circuit(&cfg, kind.into(), inverse)?;
            print!("{text}");
            Ok(())
        }
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = dispatch(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
