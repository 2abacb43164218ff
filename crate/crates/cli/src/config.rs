//! Scenario configuration: defaults, presets, the key=value file format,
//! and validation.
//!
//! Precedence, lowest to highest: built-in defaults, preset, config file,
//! command-line flags. Every file key doubles as a long flag of the same
//! name.

use std::path::{Path, PathBuf};

use crate::CliError;

/// Parameters of one prediction run. Optional fields have derived
/// defaults resolved against the grid, see the `resolved_*` methods.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    /// Position register width in qubits (grid size `2^n_x`).
    pub n_x: usize,
    /// Velocity register width in qubits.
    pub n_v: usize,
    pub delta_x: f64,
    pub x0: f64,
    pub v_min: f64,
    pub v_max: f64,
    pub dt: f64,
    /// Wick coefficient of the unitary diffusion surrogate.
    pub q: f64,
    /// Classical diffusion coefficient; defaults to `q`.
    pub nu_v: Option<f64>,
    /// Initial Gaussian center in x; defaults to the grid midpoint.
    pub mu_x: Option<f64>,
    /// Initial Gaussian width in x; defaults to `2.5 * delta_x`.
    pub sigma_x: Option<f64>,
    pub mu_v: f64,
    /// Initial Gaussian width in v; defaults to `5 * delta_v`.
    pub sigma_v: Option<f64>,
    pub steps: usize,
    /// Re-encode `sqrt(|psi|^2)` between steps instead of propagating the
    /// amplitude state coherently.
    pub reencode_each_step: bool,
    pub out_dir: Option<PathBuf>,
}

/// Total qubits the statevector simulator will accept.
pub const QUBIT_CAP: usize = 24;

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            n_x: 6,
            n_v: 6,
            delta_x: 1.0,
            x0: 0.0,
            v_min: -3.75,
            v_max: 3.75,
            dt: 1.0,
            q: 0.5,
            nu_v: None,
            mu_x: None,
            sigma_x: None,
            mu_v: 0.0,
            sigma_v: None,
            steps: 1,
            reencode_each_step: false,
            out_dir: None,
        }
    }
}

impl ScenarioConfig {
    /// Reference scenario with the packet drifting left (`mu_v = -1`).
    pub fn scenario1() -> Self {
        ScenarioConfig {
            mu_v: -1.0,
            ..ScenarioConfig::default()
        }
    }

    /// Reference scenario with a faster rightward drift (`mu_v = 2`).
    pub fn scenario2() -> Self {
        ScenarioConfig {
            mu_v: 2.0,
            ..ScenarioConfig::default()
        }
    }

    pub fn preset(name: &str) -> Result<Self, CliError> {
        match name {
            "scenario1" => Ok(Self::scenario1()),
            "scenario2" => Ok(Self::scenario2()),
            other => Err(CliError::Config(format!(
                "unknown preset '{other}' (expected scenario1 or scenario2)"
            ))),
        }
    }

    pub fn len_x(&self) -> usize {
        1usize << self.n_x
    }

    pub fn len_v(&self) -> usize {
        1usize << self.n_v
    }

    pub fn delta_v(&self) -> f64 {
        (self.v_max - self.v_min) / (self.len_v() - 1) as f64
    }

    pub fn resolved_nu_v(&self) -> f64 {
        self.nu_v.unwrap_or(self.q)
    }

    pub fn resolved_mu_x(&self) -> f64 {
        self.mu_x
            .unwrap_or_else(|| self.x0 + self.delta_x * (self.len_x() / 2) as f64)
    }

    pub fn resolved_sigma_x(&self) -> f64 {
        self.sigma_x.unwrap_or(2.5 * self.delta_x)
    }

    pub fn resolved_sigma_v(&self) -> f64 {
        self.sigma_v.unwrap_or(5.0 * self.delta_v())
    }

    /// Applies one `key=value` assignment from a file line or a flag.
    pub fn apply_kv(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let bad = |what: &str| {
            CliError::Config(format!("invalid value '{value}' for {key}: expected {what}"))
        };
        match key {
            "n_x" => self.n_x = value.parse().map_err(|_| bad("a qubit count"))?,
            "n_v" => self.n_v = value.parse().map_err(|_| bad("a qubit count"))?,
            "delta_x" => self.delta_x = value.parse().map_err(|_| bad("a number"))?,
            "x0" => self.x0 = value.parse().map_err(|_| bad("a number"))?,
            "v_min" => self.v_min = value.parse().map_err(|_| bad("a number"))?,
            "v_max" => self.v_max = value.parse().map_err(|_| bad("a number"))?,
            "dt" => self.dt = value.parse().map_err(|_| bad("a number"))?,
            "q" => self.q = value.parse().map_err(|_| bad("a number"))?,
            "nu_v" => self.nu_v = Some(value.parse().map_err(|_| bad("a number"))?),
            "mu_x" => self.mu_x = Some(value.parse().map_err(|_| bad("a number"))?),
            "sigma_x" => self.sigma_x = Some(value.parse().map_err(|_| bad("a number"))?),
            "mu_v" => self.mu_v = value.parse().map_err(|_| bad("a number"))?,
            "sigma_v" => self.sigma_v = Some(value.parse().map_err(|_| bad("a number"))?),
            "steps" => self.steps = value.parse().map_err(|_| bad("a positive integer"))?,
            "reencode_each_step" => {
                self.reencode_each_step = value.parse().map_err(|_| bad("true or false"))?
            }
            "out_dir" => self.out_dir = Some(PathBuf::from(value)),
            other => {
                return Err(CliError::Config(format!("unknown config key '{other}'")));
            }
        }
        Ok(())
    }

    /// Applies a key=value config file on top of the current values.
    /// Lines are `key=value`; blank lines and `#` comments are skipped;
    /// unknown keys are errors.
    pub fn apply_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Config(format!("cannot read config file {}: {e}", path.display()))
        })?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!(
                    "{}:{}: expected key=value, got '{line}'",
                    path.display(),
                    lineno + 1
                ))
            })?;
            self.apply_kv(key.trim(), value.trim()).map_err(|e| {
                CliError::Config(format!("{}:{}: {e}", path.display(), lineno + 1))
            })?;
        }
        Ok(())
    }

    /// Checks invariants. Cap violations are reported apart from ordinary
    /// argument errors because they carry a dedicated exit code.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.n_x < 1 || self.n_v < 1 {
            return Err(CliError::Config(
                "n_x and n_v must both be at least 1".into(),
            ));
        }
        if self.n_x + self.n_v > QUBIT_CAP {
            return Err(CliError::Cap(format!(
                "n_x + n_v = {} exceeds the {QUBIT_CAP}-qubit simulator cap",
                self.n_x + self.n_v
            )));
        }
        if !(self.delta_x > 0.0) {
            return Err(CliError::Config("delta_x must be positive".into()));
        }
        if !(self.v_max > self.v_min) {
            return Err(CliError::Config("v_max must exceed v_min".into()));
        }
        if !(self.dt >= 0.0) {
            return Err(CliError::Config("dt must be nonnegative".into()));
        }
        if !(self.q >= 0.0) {
            return Err(CliError::Config("q must be nonnegative".into()));
        }
        if let Some(nu) = self.nu_v {
            if !(nu >= 0.0) {
                return Err(CliError::Config("nu_v must be nonnegative".into()));
            }
        }
        for (name, value) in [("sigma_x", self.sigma_x), ("sigma_v", self.sigma_v)] {
            if let Some(s) = value {
                if !(s > 0.0) {
                    return Err(CliError::Config(format!("{name} must be positive")));
                }
            }
        }
        if self.steps < 1 {
            return Err(CliError::Config("steps must be at least 1".into()));
        }
        Ok(())
    }
}
