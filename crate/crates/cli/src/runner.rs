//! Execution of the prediction pipeline and the diagnostic subcommands,
//! plus the artifact writers.
//!
//! Artifact formats are frozen: CSVs carry a one-line header, floats are
//! printed with `{:.16e}` (17 significant digits, which round-trips `f64`),
//! and identical configurations produce bit-identical files.

use std::fmt::Write as _;
use std::ops::Range;
use std::path::{Path, PathBuf};

use ndarray::Array1;
use qfpe::analysis::{compare, spectral_comparison, SpectralRow};
use qfpe::circuit::{
    diffusion_circuit, drift_circuit, gate_count_report, prediction_circuit, qft_circuit,
    GateCountReport,
};
use qfpe::classical::build_generator;
use qfpe::grid::{amplitude_encode, build_grid, decode_density, devectorize, gaussian_density, vectorize};
use qfpe::spectral::{dft_matrix, dvv_eigenvalues, dvv_matrix, dx_eigenvalues, dx_matrix};
use qfpe::statevec::load_state;
use qfpe::{Circuit, Density, Grid, Metrics};

use crate::config::ScenarioConfig;
use crate::CliError;

/// Everything one scenario run produces, before serialization.
pub struct ScenarioArtifacts {
    pub grid: Grid,
    pub initial: Density,
    pub classical: Density,
    pub quantum: Density,
    /// Classical-vs-quantum error metrics on the joint density.
    pub metrics: Metrics,
    /// Per-velocity-mode diffusion table, evaluated on the initial state.
    pub spectral: Vec<SpectralRow<f64>>,
    pub gate_report: GateCountReport,
}

fn fmt_f(x: f64) -> String {
    format!("{:.16e}", x)
}

/// Builds the grid described by a validated configuration.
pub fn grid_of(cfg: &ScenarioConfig) -> Result<Grid, CliError> {
    Ok(build_grid(
        cfg.n_x, cfg.n_v, cfg.delta_x, cfg.x0, cfg.v_min, cfg.v_max,
    )?)
}

/// Runs the full pipeline for one configuration: initial Gaussian,
/// classical reference `exp(steps*dt*L) p`, quantum prediction over
/// `steps` circuit applications, metrics, spectral table, gate report.
pub fn execute(cfg: &ScenarioConfig) -> Result<ScenarioArtifacts, CliError> {
    cfg.validate()?;
    let grid = grid_of(cfg)?;
    let nu_v = cfg.resolved_nu_v();

    let initial = gaussian_density(
        &grid,
        cfg.resolved_mu_x(),
        cfg.resolved_sigma_x(),
        cfg.mu_v,
        cfg.resolved_sigma_v(),
    )?;
    let p0 = vectorize(&initial);

    let generator = build_generator(&grid, nu_v)?;
    let horizon = cfg.steps as f64 * cfg.dt;
    let p_classical = generator.expm_apply(horizon, &p0)?;
    drop(generator);
    let classical = devectorize(&p_classical, &grid)?;

    let psi0 = amplitude_encode(&p0)?;
    let circuit = prediction_circuit(&grid, cfg.dt, cfg.q)?;
    let mut sim = load_state(&psi0)?;
    for step in 0..cfg.steps {
        sim.run(&circuit)?;
        if cfg.reencode_each_step && step + 1 < cfg.steps {
            let density = decode_density(&sim.extract(), &grid)?;
            sim = load_state(&amplitude_encode(&vectorize(&density))?)?;
        }
    }
    let quantum = decode_density(&sim.extract(), &grid)?;

    let metrics = compare(&classical, &quantum, "classical", "quantum")?;
    let spectral = spectral_comparison(&p0, &psi0, &grid, nu_v, cfg.q, cfg.dt)?;
    let gate_report = gate_count_report(&circuit);

    Ok(ScenarioArtifacts {
        grid,
        initial,
        classical,
        quantum,
        metrics,
        spectral,
        gate_report,
    })
}

fn marginal_csv(coordinates: &[f64], masses: &Array1<f64>) -> String {
    let mut out = String::from("coordinate,mass\n");
    for (c, m) in coordinates.iter().zip(masses.iter()) {
        let _ = writeln!(out, "{},{}", fmt_f(*c), fmt_f(*m));
    }
    out
}

/// The metrics file body; also what `run` prints to stdout.
pub fn metrics_text(metrics: &Metrics) -> String {
    format!(
        "l2_error={}\ntotal_variation={}\nmean_error={}\ncov_error={}\n",
        fmt_f(metrics.l2_error),
        fmt_f(metrics.total_variation),
        fmt_f(metrics.mean_error),
        fmt_f(metrics.cov_error),
    )
}

fn spectral_csv(rows: &[SpectralRow<f64>]) -> String {
    let mut out = String::from(
        "m,mu_m,classical_damping,phase_spectral_re,phase_spectral_im,\
         phase_circuit_re,phase_circuit_im,p_hat_abs,psi_hat_abs\n",
    );
    for row in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            row.m,
            fmt_f(row.mu),
            fmt_f(row.classical_damping),
            fmt_f(row.phase_spectral.re),
            fmt_f(row.phase_spectral.im),
            fmt_f(row.phase_circuit.re),
            fmt_f(row.phase_circuit.im),
            fmt_f(row.p_hat_abs),
            fmt_f(row.psi_hat_abs),
        );
    }
    out
}

/// Resolves the output directory: explicit flag, then the `QFPE_OUT_DIR`
/// environment variable, then the config file value, then `out`.
pub fn resolve_out_dir(flag: Option<&Path>, cfg: &ScenarioConfig) -> PathBuf {
    if let Some(dir) = flag {
        return dir.to_path_buf();
    }
    if let Ok(dir) = std::env::var("QFPE_OUT_DIR") {
        if !dir.is_empty() {
            return PathBuf::from(dir);
        }
    }
    cfg.out_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from("out"))
}

/// Writes the six marginal CSVs, `metrics.txt`, `spectral.csv`, and
/// `gates.txt` into `dir`, creating it if needed.
pub fn write_artifacts(artifacts: &ScenarioArtifacts, dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)?;
    let marginal_files = [
        ("init", &artifacts.initial),
        ("classical", &artifacts.classical),
        ("quantum", &artifacts.quantum),
    ];
    for (label, density) in marginal_files {
        let (px, pv) = qfpe::analysis::marginals(density);
        std::fs::write(
            dir.join(format!("marginal_x_{label}.csv")),
            marginal_csv(&artifacts.grid.x_axis, &px),
        )?;
        std::fs::write(
            dir.join(format!("marginal_v_{label}.csv")),
            marginal_csv(&artifacts.grid.v_axis, &pv),
        )?;
    }
    std::fs::write(dir.join("metrics.txt"), metrics_text(&artifacts.metrics))?;
    std::fs::write(dir.join("spectral.csv"), spectral_csv(&artifacts.spectral))?;
    std::fs::write(
        dir.join("gates.txt"),
        format!("{}\n", artifacts.gate_report),
    )?;
    Ok(())
}

/// `run` subcommand: execute, write artifacts, print the metrics and the
/// artifact location.
pub fn run_scenario(cfg: &ScenarioConfig, out_dir: &Path) -> Result<ScenarioArtifacts, CliError> {
    let artifacts = execute(cfg)?;
    write_artifacts(&artifacts, out_dir)?;
    print!("{}", metrics_text(&artifacts.metrics));
    println!("artifacts_dir={}", out_dir.display());
    Ok(artifacts)
}

/// `eigencheck` subcommand: verifies the Fourier diagonalization of both
/// derivative operators at each size and reports the worst deviations.
/// Any deviation above `1e-10` is a numerical-consistency failure.
pub fn eigencheck(sizes: &[usize]) -> Result<String, CliError> {
    if sizes.is_empty() {
        return Err(CliError::Config("eigencheck needs at least one size".into()));
    }
    let mut out = String::new();
    let mut worst_overall: f64 = 0.0;
    for &n in sizes {
        if n < 2 {
            return Err(CliError::Config(format!(
                "size {n} is too small; the operators need at least 2 points"
            )));
        }
        if !n.is_power_of_two() {
            let _ = writeln!(
                out,
                "warning: N={n} is not a power of two; the circulant spectra below are \
                 still exact, but no qubit register maps onto this size"
            );
        }
        let q = dft_matrix::<f64>(n)?;
        let q_dag = q.t().mapv(|z| z.conj());

        // Unit spacings: the deviation scales linearly with 1/spacing and
        // the acceptance threshold is far above accumulated roundoff.
        let dx = dx_matrix::<f64>(n, 1.0)?.matrix.mapv(|e| num_c(e));
        let lambda = dx_eigenvalues::<f64>(n, 1.0)?.eigenvalues;
        let dx_dev = diag_deviation(&q_dag.dot(&dx).dot(&q), &lambda);

        let dvv = dvv_matrix::<f64>(n, 1.0)?.matrix.mapv(|e| num_c(e));
        let mu = dvv_eigenvalues::<f64>(n, 1.0)?.eigenvalues;
        let dvv_dev = diag_deviation(&q_dag.dot(&dvv).dot(&q), &mu);

        worst_overall = worst_overall.max(dx_dev).max(dvv_dev);
        let _ = writeln!(
            out,
            "N={n} dx_deviation={} dvv_deviation={}",
            fmt_f(dx_dev),
            fmt_f(dvv_dev)
        );
    }
    let _ = writeln!(out, "worst={}", fmt_f(worst_overall));
    if worst_overall > 1e-10 {
        return Err(CliError::Numeric(format!(
            "diagonalization deviation {worst_overall:e} exceeds 1e-10\n{out}"
        )));
    }
    Ok(out)
}

fn num_c(e: f64) -> num_complex::Complex<f64> {
    num_complex::Complex::new(e, 0.0)
}

fn diag_deviation(
    transformed: &ndarray::Array2<num_complex::Complex<f64>>,
    eigenvalues: &Array1<num_complex::Complex<f64>>,
) -> f64 {
    let n = eigenvalues.len();
    let mut worst: f64 = 0.0;
    for r in 0..n {
        for c in 0..n {
            let expect = if r == c {
                eigenvalues[r]
            } else {
                num_complex::Complex::new(0.0, 0.0)
            };
            worst = worst.max((transformed[[r, c]] - expect).norm());
        }
    }
    worst
}

/// `gatecount` subcommand: the tallies for the configured prediction
/// circuit, followed by a square-register sweep showing how the per-variant
/// counts, the per-qubit cost model, and the honest diagonal-entry totals
/// grow.
pub fn gatecount(cfg: &ScenarioConfig) -> Result<String, CliError> {
    cfg.validate()?;
    let grid = grid_of(cfg)?;
    let report = gate_count_report(&prediction_circuit(&grid, cfg.dt, cfg.q)?);
    let mut out = format!("{report}\n\nsweep n_x=n_v=n\n");
    let _ = writeln!(out, "n qft_gates total_gates model_cost diagonal_entries");
    for n in 2..=8usize {
        let sweep_grid = build_grid::<f64>(n, n, 1.0, 0.0, -1.0, 1.0)?;
        let qft = gate_count_report(&qft_circuit::<f64>(n, 0..n, false)?);
        let pred = gate_count_report(&prediction_circuit(&sweep_grid, cfg.dt, cfg.q)?);
        let _ = writeln!(
            out,
            "{n} {} {} {} {}",
            qft.total_gates, pred.total_gates, pred.model_cost, pred.diagonal_entries
        );
    }
    Ok(out)
}

/// Which circuit `dump-circuit` prints.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CircuitKind {
    Qft,
    Drift,
    Diffusion,
    Prediction,
}

/// `dump-circuit` subcommand: builds the requested circuit from the
/// configuration and returns its text form. The QFT variant acts on the
/// position register and honors `inverse`; for the other kinds `inverse`
/// is rejected.
pub fn dump_circuit(
    cfg: &ScenarioConfig,
    kind: CircuitKind,
    inverse: bool,
) -> Result<String, CliError> {
    cfg.validate()?;
    if inverse && kind != CircuitKind::Qft {
        return Err(CliError::Config(
            "--inverse only applies to the qft circuit".into(),
        ));
    }
    let circuit: Circuit = match kind {
        CircuitKind::Qft => {
            let register: Range<usize> = 0..cfg.n_x;
            qft_circuit(cfg.n_x, register, inverse)?
        }
        CircuitKind::Drift => drift_circuit(&grid_of(cfg)?, cfg.dt)?,
        CircuitKind::Diffusion => diffusion_circuit(&grid_of(cfg)?, cfg.q, cfg.dt)?,
        CircuitKind::Prediction => prediction_circuit(&grid_of(cfg)?, cfg.dt, cfg.q)?,
    };
    Ok(circuit.dump())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_config() -> ScenarioConfig {
        ScenarioConfig {
            n_x: 2,
            n_v: 2,
            delta_x: 1.0,
            x0: 0.0,
            v_min: -1.5,
            v_max: 1.5,
            dt: 0.5,
            q: 0.4,
            ..ScenarioConfig::default()
        }
    }

    #[test]
    fn identity_run_matches_to_roundoff() {
        // dt = 0 and q = 0: both paths are the identity, so every metric
        // collapses to numerical noise.
        let mut cfg = tiny_config();
        cfg.dt = 0.0;
        cfg.q = 0.0;
        let artifacts = execute(&cfg).unwrap();
        assert!(artifacts.metrics.l2_error < 1e-10);
        assert!(artifacts.metrics.total_variation < 1e-10);
        assert!(artifacts.metrics.mean_error < 1e-10);
        assert!(artifacts.metrics.cov_error < 1e-10);
    }

    #[test]
    fn masses_stay_normalized() {
        let artifacts = execute(&tiny_config()).unwrap();
        assert!((artifacts.initial.total_mass() - 1.0).abs() < 1e-12);
        assert!((artifacts.classical.total_mass() - 1.0).abs() < 1e-9);
        assert!((artifacts.quantum.total_mass() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn reencoding_changes_only_multi_step_runs() {
        let mut one = tiny_config();
        one.steps = 1;
        let mut one_re = one.clone();
        one_re.reencode_each_step = true;
        let a = execute(&one).unwrap();
        let b = execute(&one_re).unwrap();
        assert_eq!(a.quantum.values, b.quantum.values);

        let mut three = tiny_config();
        three.steps = 3;
        let mut three_re = three.clone();
        three_re.reencode_each_step = true;
        let a = execute(&three).unwrap();
        let b = execute(&three_re).unwrap();
        assert!((&a.quantum.values - &b.quantum.values)
            .iter()
            .any(|d| d.abs() > 1e-15));
        assert!((b.quantum.total_mass() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn eigencheck_report_modes() {
        let report = eigencheck(&[4, 8]).unwrap();
        assert!(report.contains("N=4 dx_deviation="));
        assert!(report.contains("worst="));
        let report = eigencheck(&[3]).unwrap();
        assert!(report.contains("warning: N=3"));
        assert!(matches!(eigencheck(&[]), Err(CliError::Config(_))));
        assert!(matches!(eigencheck(&[1]), Err(CliError::Config(_))));
    }

    #[test]
    fn dump_rejects_inverse_off_qft() {
        let cfg = tiny_config();
        assert!(dump_circuit(&cfg, CircuitKind::Qft, true).is_ok());
        assert!(matches!(
            dump_circuit(&cfg, CircuitKind::Drift, true),
            Err(CliError::Config(_))
        ));
    }
}
