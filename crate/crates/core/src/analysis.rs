//! Comparison metrics on joint densities and the two computable error
//! diagnostics for the unitary diffusion surrogate.
//!
//! The surrogate rotates Fourier modes where true diffusion damps them. For
//! a real amplitude field psi the density evolution it induces differs from
//! the true one at the rate `2*nu_v*(D_v psi)^2`: the squared velocity
//! gradient of the amplitude. [`diffusion_residual`] evaluates that field,
//! [`residual_rate_check`] verifies it against an actual short-time
//! evolution, and [`spectral_comparison`] tabulates damping factors against
//! unit-modulus phase factors mode by mode.

use ndarray::{Array1, Array2};
use num_complex::Complex;

use crate::classical::{classical_diffusion_spectral, expm};
use crate::error::{Error, Result};
use crate::float::{real, tol, Real};
use crate::grid::{AmplitudeState, DensityGrid, PhaseSpaceGrid};
use crate::spectral::{dft_matrix, dvv_eigenvalues, dvv_matrix};

/// The four comparison metrics between two joint densities.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport<F> {
    /// Frobenius norm of the elementwise difference.
    pub l2_error: F,
    /// Half the l1 distance; in `[0, 1]` for nonnegative mass-1 inputs.
    pub total_variation: F,
    /// Euclidean distance between the two `(E[x], E[v])` mean vectors.
    pub mean_error: F,
    /// Frobenius distance between the two 2x2 covariance matrices.
    pub cov_error: F,
    pub label_a: String,
    pub label_b: String,
}

/// First and second moments of a joint density under the grid coordinates.
#[derive(Debug, Clone, Copy)]
pub struct Moments<F> {
    pub mean_x: F,
    pub mean_v: F,
    pub cov_xx: F,
    pub cov_xv: F,
    pub cov_vv: F,
}

/// Computes mean and covariance of a (possibly slightly signed) mass array.
pub fn moments<F: Real>(density: &DensityGrid<F>) -> Moments<F> {
    let grid = &density.grid;
    let mut mean_x = F::zero();
    let mut mean_v = F::zero();
    let mut xx = F::zero();
    let mut xv = F::zero();
    let mut vv = F::zero();
    for i in 0..grid.len_x() {
        let x = grid.x_axis[i];
        for j in 0..grid.len_v() {
            let v = grid.v_axis[j];
            let mass = density.values[[i, j]];
            mean_x += mass * x;
            mean_v += mass * v;
            xx += mass * x * x;
            xv += mass * x * v;
            vv += mass * v * v;
        }
    }
    Moments {
        mean_x,
        mean_v,
        cov_xx: xx - mean_x * mean_x,
        cov_xv: xv - mean_x * mean_v,
        cov_vv: vv - mean_v * mean_v,
    }
}

/// All four metrics between two densities on the same grid. Works on the
/// full joint arrays, not the marginals.
pub fn compare<F: Real>(
    a: &DensityGrid<F>,
    b: &DensityGrid<F>,
    label_a: &str,
    label_b: &str,
) -> Result<MetricsReport<F>> {
    if a.grid != b.grid {
        return Err(Error::DimensionMismatch(
            "densities live on different grids".into(),
        ));
    }
    let mut sq = F::zero();
    let mut abs = F::zero();
    for (&ma, &mb) in a.values.iter().zip(b.values.iter()) {
        let d = ma - mb;
        sq += d * d;
        abs += d.abs();
    }
    let ma = moments(a);
    let mb = moments(b);
    let dx = ma.mean_x - mb.mean_x;
    let dv = ma.mean_v - mb.mean_v;
    let cxx = ma.cov_xx - mb.cov_xx;
    let cxv = ma.cov_xv - mb.cov_xv;
    let cvv = ma.cov_vv - mb.cov_vv;
    Ok(MetricsReport {
        l2_error: sq.sqrt(),
        total_variation: abs * real::<F>(0.5),
        mean_error: (dx * dx + dv * dv).sqrt(),
        cov_error: (cxx * cxx + real::<F>(2.0) * cxv * cxv + cvv * cvv).sqrt(),
        label_a: label_a.to_string(),
        label_b: label_b.to_string(),
    })
}

/// Position and velocity marginals (row sums, column sums).
pub fn marginals<F: Real>(density: &DensityGrid<F>) -> (Array1<F>, Array1<F>) {
    let n_x = density.grid.len_x();
    let n_v = density.grid.len_v();
    let mut p_x = Array1::zeros(n_x);
    let mut p_v = Array1::zeros(n_v);
    for i in 0..n_x {
        for j in 0..n_v {
            let mass = density.values[[i, j]];
            p_x[i] += mass;
            p_v[j] += mass;
        }
    }
    (p_x, p_v)
}

/// Pointwise rate field `2*nu_v*(D_v psi)^2` on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualField<F> {
    /// `N_x x N_v` array, entries nonnegative.
    pub values: Array2<F>,
}

/// Checks that the state is (numerically) real and returns it as an
/// `N_x x N_v` real field.
fn real_field<F: Real>(
    state: &AmplitudeState<F>,
    grid: &PhaseSpaceGrid<F>,
) -> Result<Array2<F>> {
    let n_x = grid.len_x();
    let n_v = grid.len_v();
    if state.amplitudes.len() != n_x * n_v {
        return Err(Error::DimensionMismatch(format!(
            "state has {} amplitudes, grid needs {}",
            state.amplitudes.len(),
            n_x * n_v
        )));
    }
    let mut worst = F::zero();
    for a in state.amplitudes.iter() {
        worst = worst.max(a.im.abs());
    }
    if worst > tol::<F>(1e-10) {
        return Err(Error::Domain(format!(
            "residual diagnostics require a real amplitude field; imaginary part reaches {worst:e}"
        )));
    }
    Ok(Array2::from_shape_fn((n_x, n_v), |(i, j)| {
        state.amplitudes[j * n_x + i].re
    }))
}

/// Evaluates `2*nu_v*(D_v psi)^2` with the periodic central difference
/// along the velocity axis. Defined for real psi only.
pub fn diffusion_residual<F: Real>(
    state: &AmplitudeState<F>,
    grid: &PhaseSpaceGrid<F>,
    nu_v: F,
) -> Result<ResidualField<F>> {
    if nu_v < F::zero() {
        return Err(Error::InvalidArgument(
            "diffusion coefficient must be nonnegative".into(),
        ));
    }
    let psi = real_field(state, grid)?;
    let n_x = grid.len_x();
    let n_v = grid.len_v();
    let half_inv = (real::<F>(2.0) * grid.delta_v).recip();
    let two_nu = real::<F>(2.0) * nu_v;
    let values = Array2::from_shape_fn((n_x, n_v), |(i, j)| {
        let up = psi[[i, (j + 1) % n_v]];
        let down = psi[[i, (j + n_v - 1) % n_v]];
        let grad = (up - down) * half_inv;
        two_nu * grad * grad
    });
    Ok(ResidualField { values })
}

/// Result of [`residual_rate_check`].
#[derive(Debug, Clone)]
pub struct ResidualRateCheck<F> {
    /// Measured density discrepancy rate between amplitude-level diffusion
    /// and density-level diffusion over one short interval `delta`.
    pub observed: Array2<F>,
    /// The closed-form rate `2*nu_v*(D_v psi)^2`.
    pub predicted: Array2<F>,
    /// `max |observed - predicted|` over the grid.
    pub max_abs_gap: F,
}

/// Evolves psi by REAL amplitude diffusion `exp(delta*nu_v*D_vv)` (dense
/// exponential along the velocity axis), squares it, subtracts the classical
/// density diffusion of `|psi|^2` over the same interval, divides by
/// `delta`, and compares the resulting rate field against
/// [`diffusion_residual`].
///
/// `delta` must satisfy `delta <= 1e-3 * delta_v^2 / nu_v` so the expansion
/// in `delta` is actually short-time.
pub fn residual_rate_check<F: Real>(
    state: &AmplitudeState<F>,
    grid: &PhaseSpaceGrid<F>,
    nu_v: F,
    delta: F,
) -> Result<ResidualRateCheck<F>> {
    if !(nu_v > F::zero()) {
        return Err(Error::InvalidArgument(
            "rate check needs a positive diffusion coefficient".into(),
        ));
    }
    if !(delta > F::zero()) {
        return Err(Error::InvalidArgument("delta must be positive".into()));
    }
    let cap = real::<F>(1e-3) * grid.delta_v * grid.delta_v / nu_v;
    if delta > cap {
        return Err(Error::InvalidArgument(format!(
            "delta {delta:e} too large; the short-time expansion needs delta <= {cap:e}"
        )));
    }
    let psi = real_field(state, grid)?;
    let n_x = grid.len_x();
    let n_v = grid.len_v();

    // exp(delta*nu_v*D_vv) as a dense real matrix on the velocity axis.
    let dvv = dvv_matrix::<F>(n_v, grid.delta_v)?.matrix;
    let scaled = dvv.mapv(|e| Complex::new(e * delta * nu_v, F::zero()));
    let propagator_c = expm(&scaled)?;
    let mut worst_imag = F::zero();
    for z in propagator_c.iter() {
        worst_imag = worst_imag.max(z.im.abs());
    }
    if worst_imag > tol::<F>(1e-10) {
        return Err(Error::Consistency(format!(
            "imaginary residue {worst_imag:e} in a real diffusion propagator"
        )));
    }
    let propagator = propagator_c.mapv(|z| z.re);

    // Amplitude route: diffuse psi, then square.
    let mut amp_density = Array2::zeros((n_x, n_v));
    for i in 0..n_x {
        for row in 0..n_v {
            let mut acc = F::zero();
            for j in 0..n_v {
                acc += propagator[[row, j]] * psi[[i, j]];
            }
            amp_density[[i, row]] = acc * acc;
        }
    }

    // Density route: diffuse |psi|^2 directly.
    let p0 = Array1::from_shape_fn(n_x * n_v, |idx| {
        let (i, j) = (idx % n_x, idx / n_x);
        psi[[i, j]] * psi[[i, j]]
    });
    let p1 = classical_diffusion_spectral(&p0, grid, nu_v, delta)?;

    let inv_delta = delta.recip();
    let observed = Array2::from_shape_fn((n_x, n_v), |(i, j)| {
        (amp_density[[i, j]] - p1[j * n_x + i]) * inv_delta
    });
    let predicted = diffusion_residual(state, grid, nu_v)?.values;
    let mut max_abs_gap = F::zero();
    for (o, p) in observed.iter().zip(predicted.iter()) {
        max_abs_gap = max_abs_gap.max((*o - *p).abs());
    }
    Ok(ResidualRateCheck {
        observed,
        predicted,
        max_abs_gap,
    })
}

/// One row of the per-mode diffusion comparison table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralRow<F> {
    /// Velocity Fourier mode index.
    pub m: usize,
    /// Second-derivative eigenvalue `mu_m`.
    pub mu: F,
    /// True diffusion factor `exp(dt*nu_v*mu_m)`, in `(0, 1]`.
    pub classical_damping: F,
    /// Unit-modulus factor `exp(i*q*dt*mu_m/2)`: the half-angle convention
    /// that appears when the density evolution is sketched directly in the
    /// spectral domain.
    pub phase_spectral: Complex<F>,
    /// Unit-modulus factor `exp(i*q*dt*mu_m)`: the angle the diffusion
    /// circuit actually applies. Both conventions are tabulated so the
    /// factor-of-two mismatch between them stays visible in diagnostics.
    pub phase_circuit: Complex<F>,
    /// Aggregate magnitude of velocity mode `m` of the density: the l2 norm
    /// over position columns of the transformed array.
    pub p_hat_abs: F,
    /// Same aggregate for the amplitude field.
    pub psi_hat_abs: F,
}

/// Builds the per-mode table for a density / amplitude pair.
pub fn spectral_comparison<F: Real>(
    p: &Array1<F>,
    state: &AmplitudeState<F>,
    grid: &PhaseSpaceGrid<F>,
    nu_v: F,
    q: F,
    dt: F,
) -> Result<Vec<SpectralRow<F>>> {
    let n_x = grid.len_x();
    let n_v = grid.len_v();
    if p.len() != n_x * n_v || state.amplitudes.len() != n_x * n_v {
        return Err(Error::DimensionMismatch(
            "density and state must match the grid size".into(),
        ));
    }
    let qm = dft_matrix::<F>(n_v)?;
    let q_dag = qm.t().mapv(|z| z.conj());
    let to_matrix = |get: &dyn Fn(usize) -> Complex<F>| {
        Array2::from_shape_fn((n_v, n_x), |(j, i)| get(j * n_x + i))
    };
    let p_hat = q_dag.dot(&to_matrix(&|idx| Complex::new(p[idx], F::zero())));
    let psi_hat = q_dag.dot(&to_matrix(&|idx| state.amplitudes[idx]));
    let mu = dvv_eigenvalues::<F>(n_v, grid.delta_v)?.eigenvalues;
    let half = real::<F>(0.5);
    let rows = (0..n_v)
        .map(|m| {
            let mu_m = mu[m].re;
            let row_norm = |hat: &Array2<Complex<F>>| {
                (0..n_x)
                    .map(|i| hat[[m, i]].norm_sqr())
                    .sum::<F>()
                    .sqrt()
            };
            SpectralRow {
                m,
                mu: mu_m,
                classical_damping: (dt * nu_v * mu_m).exp(),
                phase_spectral: Complex::from_polar(F::one(), q * dt * mu_m * half),
                phase_circuit: Complex::from_polar(F::one(), q * dt * mu_m),
                p_hat_abs: row_norm(&p_hat),
                psi_hat_abs: row_norm(&psi_hat),
            }
        })
        .collect();
    Ok(rows)
}
