//! Discretized position-velocity state space, Gaussian initialization, and
//! the density <-> amplitude encoding.
//!
//! Conventions used everywhere downstream:
//! * the position axis has `N_x = 2^n_x` points `x_i = x0 + i*delta_x`,
//! * the velocity axis has `N_v = 2^n_v` points `v_j = v_min + j*delta_v`
//!   with `delta_v = (v_max - v_min)/(N_v - 1)`, so both interval endpoints
//!   are grid points,
//! * a joint density is a matrix `values[i, j]` of probability masses, and
//!   its vectorized form stacks velocity columns: `out[j*N_x + i]`.

use ndarray::{Array1, Array2};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::float::{real, tol, Real};

/// Uniform grid over one position and one velocity axis.
///
/// Immutable after construction; cheap to clone (two short axis vectors).
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpaceGrid<F> {
    /// Qubit count of the position register.
    pub n_x: usize,
    /// Qubit count of the velocity register.
    pub n_v: usize,
    /// Position spacing.
    pub delta_x: F,
    /// Velocity spacing.
    pub delta_v: F,
    /// Position of grid point 0.
    pub x0: F,
    /// Velocity of grid point 0.
    pub v_min: F,
    /// `x_i = x0 + i*delta_x`, length `2^n_x`.
    pub x_axis: Vec<F>,
    /// `v_j = v_min + j*delta_v`, length `2^n_v`.
    pub v_axis: Vec<F>,
}

impl<F: Real> PhaseSpaceGrid<F> {
    /// Number of position grid points, `2^n_x`.
    pub fn len_x(&self) -> usize {
        1 << self.n_x
    }

    /// Number of velocity grid points, `2^n_v`.
    pub fn len_v(&self) -> usize {
        1 << self.n_v
    }

    /// Total number of joint grid cells, `N_x * N_v`.
    pub fn len(&self) -> usize {
        self.len_x() * self.len_v()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Total qubit count of the combined register.
    pub fn n_qubits(&self) -> usize {
        self.n_x + self.n_v
    }
}

/// Builds the uniform grid. The velocity spacing is endpoint-inclusive:
/// `delta_v = (v_max - v_min)/(N_v - 1)`, so `v_axis` runs from `v_min` to
/// `v_max` exactly.
pub fn build_grid<F: Real>(
    n_x: usize,
    n_v: usize,
    delta_x: F,
    x0: F,
    v_min: F,
    v_max: F,
) -> Result<PhaseSpaceGrid<F>> {
    if n_x < 1 || n_v < 1 {
        return Err(Error::InvalidArgument(
            "qubit counts must be at least 1".into(),
        ));
    }
    if !(delta_x > F::zero()) {
        return Err(Error::InvalidArgument(
            "position spacing must be positive".into(),
        ));
    }
    if !(v_max > v_min) {
        return Err(Error::InvalidArgument(
            "velocity range requires v_max > v_min".into(),
        ));
    }
    let n_points_x = 1usize << n_x;
    let n_points_v = 1usize << n_v;
    let delta_v = (v_max - v_min) / real::<F>((n_points_v - 1) as f64);
    let x_axis = (0..n_points_x)
        .map(|i| x0 + delta_x * real::<F>(i as f64))
        .collect();
    let v_axis = (0..n_points_v)
        .map(|j| v_min + delta_v * real::<F>(j as f64))
        .collect();
    Ok(PhaseSpaceGrid {
        n_x,
        n_v,
        delta_x,
        delta_v,
        x0,
        v_min,
        x_axis,
        v_axis,
    })
}

/// Joint probability masses on a [`PhaseSpaceGrid`], `values[i, j]` with
/// `i` the position index and `j` the velocity index.
///
/// Densities produced by [`gaussian_density`] and
/// [`decode_density`] are nonnegative with total mass 1. The classical
/// reference propagator can introduce tiny negative cells (central
/// differences are not positivity-preserving); those are deliberately kept
/// as-is so metric comparisons see the mathematical object that was actually
/// computed.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityGrid<F> {
    pub values: Array2<F>,
    pub grid: PhaseSpaceGrid<F>,
}

impl<F: Real> DensityGrid<F> {
    /// Total mass (sum of all cells).
    pub fn total_mass(&self) -> F {
        self.values.iter().copied().sum()
    }
}

/// Complex amplitude vector of length `N_x * N_v` with unit l2 norm.
/// Index layout matches [`vectorize`]: `amplitudes[j*N_x + i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeState<F> {
    pub amplitudes: Array1<Complex<F>>,
}

impl<F: Real> AmplitudeState<F> {
    /// l2 norm of the amplitude vector.
    pub fn norm(&self) -> F {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<F>()
            .sqrt()
    }
}

/// Separable Gaussian initial density, renormalized to total mass 1.
///
/// The result is an exact outer product of the two normalized 1-D mass
/// vectors, so its marginals coincide with the factors.
pub fn gaussian_density<F: Real>(
    grid: &PhaseSpaceGrid<F>,
    mu_x: F,
    sigma_x: F,
    mu_v: F,
    sigma_v: F,
) -> Result<DensityGrid<F>> {
    if !(sigma_x > F::zero()) || !(sigma_v > F::zero()) {
        return Err(Error::InvalidArgument(
            "standard deviations must be positive".into(),
        ));
    }
    let half = real::<F>(0.5);
    let factor = |axis: &[F], mu: F, sigma: F| -> Vec<F> {
        let mut m: Vec<F> = axis
            .iter()
            .map(|&c| {
                let z = (c - mu) / sigma;
                (-half * z * z).exp()
            })
            .collect();
        let s: F = m.iter().copied().sum();
        for w in &mut m {
            *w /= s;
        }
        m
    };
    let mx = factor(&grid.x_axis, mu_x, sigma_x);
    let mv = factor(&grid.v_axis, mu_v, sigma_v);
    let values = Array2::from_shape_fn((grid.len_x(), grid.len_v()), |(i, j)| mx[i] * mv[j]);
    Ok(DensityGrid {
        values,
        grid: grid.clone(),
    })
}

/// Stacks the density matrix column by column: `out[j*N_x + i] = values[i, j]`.
pub fn vectorize<F: Real>(density: &DensityGrid<F>) -> Array1<F> {
    let n_x = density.grid.len_x();
    let n_v = density.grid.len_v();
    Array1::from_shape_fn(n_x * n_v, |idx| density.values[[idx % n_x, idx / n_x]])
}

/// Inverse of [`vectorize`].
pub fn devectorize<F: Real>(p: &Array1<F>, grid: &PhaseSpaceGrid<F>) -> Result<DensityGrid<F>> {
    let n_x = grid.len_x();
    let n_v = grid.len_v();
    if p.len() != n_x * n_v {
        return Err(Error::DimensionMismatch(format!(
            "mass vector has length {}, grid needs {}",
            p.len(),
            n_x * n_v
        )));
    }
    let values = Array2::from_shape_fn((n_x, n_v), |(i, j)| p[j * n_x + i]);
    Ok(DensityGrid {
        values,
        grid: grid.clone(),
    })
}

/// Square-root encoding of a probability mass vector into amplitudes.
///
/// Requires nonnegative entries and total mass 1 within `1e-9`; the output
/// is renormalized to unit l2 norm at machine precision, so downstream norm
/// checks with tighter tolerances hold.
pub fn amplitude_encode<F: Real>(p: &Array1<F>) -> Result<AmplitudeState<F>> {
    for (idx, &mass) in p.iter().enumerate() {
        if mass < F::zero() {
            return Err(Error::Domain(format!(
                "negative probability mass {mass:e} at index {idx}"
            )));
        }
    }
    let total: F = p.iter().copied().sum();
    if (total - F::one()).abs() > tol::<F>(1e-9) {
        return Err(Error::Normalization(format!(
            "total mass {total} deviates from 1 beyond 1e-9"
        )));
    }
    let mut amplitudes = Array1::from_iter(p.iter().map(|&m| Complex::new(m.sqrt(), F::zero())));
    let norm = amplitudes
        .iter()
        .map(|a: &Complex<F>| a.norm_sqr())
        .sum::<F>()
        .sqrt();
    amplitudes.mapv_inplace(|a| a / norm);
    Ok(AmplitudeState { amplitudes })
}

/// Recovers the density from an amplitude state: `values[i, j] = |amp[j*N_x+i]|^2`.
///
/// The state must still be normalized within `1e-6`; a circuit-evolved state
/// that has drifted beyond that indicates a broken gate kernel rather than
/// ordinary round-off.
pub fn decode_density<F: Real>(
    state: &AmplitudeState<F>,
    grid: &PhaseSpaceGrid<F>,
) -> Result<DensityGrid<F>> {
    let n_x = grid.len_x();
    let n_v = grid.len_v();
    if state.amplitudes.len() != n_x * n_v {
        return Err(Error::DimensionMismatch(format!(
            "state has {} amplitudes, grid needs {}",
            state.amplitudes.len(),
            n_x * n_v
        )));
    }
    let norm = state.norm();
    if (norm - F::one()).abs() > tol::<F>(1e-6) {
        return Err(Error::Consistency(format!(
            "amplitude norm {norm} deviates from 1 beyond 1e-6"
        )));
    }
    let values = Array2::from_shape_fn((n_x, n_v), |(i, j)| {
        state.amplitudes[j * n_x + i].norm_sqr()
    });
    Ok(DensityGrid {
        values,
        grid: grid.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoint_inclusive_velocity_axis() {
        let g: PhaseSpaceGrid<f64> = build_grid(2, 2, 0.5, 0.0, -1.0, 1.0).unwrap();
        assert_eq!(g.x_axis, vec![0.0, 0.5, 1.0, 1.5]);
        assert!((g.v_axis[1] + 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(*g.v_axis.last().unwrap(), 1.0);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(build_grid::<f64>(0, 1, 1.0, 0.0, 0.0, 1.0).is_err());
        assert!(build_grid::<f64>(1, 1, 0.0, 0.0, 0.0, 1.0).is_err());
        assert!(build_grid::<f64>(1, 1, 1.0, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn f32_instantiation_round_trips() {
        let g: PhaseSpaceGrid<f32> = build_grid(2, 2, 1.0, 0.0, -1.0, 1.0).unwrap();
        let d = gaussian_density(&g, 1.5, 1.0, 0.0, 0.5).unwrap();
        let psi = amplitude_encode(&vectorize(&d)).unwrap();
        let back = decode_density(&psi, &g).unwrap();
        let worst = d
            .values
            .iter()
            .zip(back.values.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f32, f32::max);
        assert!(worst < 1e-6);
    }
}
