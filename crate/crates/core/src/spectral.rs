//! Circulant shift and derivative matrices, the DFT matrix that
//! diagonalizes them, and their closed-form eigenvalue tables.
//!
//! Sign convention: the forward DFT uses the positive phase sign,
//! `Q[m, n] = exp(+2*pi*i*m*n/N) / sqrt(N)`, matching the quantum Fourier
//! transform circuit in [`crate::circuit`]. With that choice the cyclic
//! left-shift `S_-` has eigenvalues `exp(+2*pi*i*k/N)` and the central
//! first derivative `D_x = (S_- - S_+)/(2*delta)` has eigenvalues
//! `(i/delta)*sin(2*pi*k/N)`.

use ndarray::{Array1, Array2};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::float::{real, Real};

/// Which circulant operator a matrix represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CirculantKind {
    /// Cyclic left shift: `(S_- psi)_j = psi_{j+1}` (ones on the
    /// superdiagonal plus the `(N-1, 0)` corner).
    ShiftMinus,
    /// Cyclic right shift, the transpose of `ShiftMinus`.
    ShiftPlus,
    /// Central first derivative `(S_- - S_+)/(2*delta)`.
    FirstDerivative,
    /// Central second derivative `(S_- + S_+ - 2I)/delta^2`.
    SecondDerivative,
}

/// Dense real circulant matrix tagged with its role.
#[derive(Debug, Clone, PartialEq)]
pub struct CirculantOperator<F> {
    pub size: usize,
    pub matrix: Array2<F>,
    pub kind: CirculantKind,
}

/// Eigenvalues of a circulant operator, indexed by Fourier mode `k = 0..N-1`
/// in the same order the positive-sign DFT produces (no frequency
/// reshuffling).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralTable<F> {
    pub eigenvalues: Array1<Complex<F>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftDirection {
    Plus,
    Minus,
}

fn require_size(n: usize) -> Result<()> {
    if n < 2 {
        Err(Error::InvalidArgument(format!(
            "circulant operators need size >= 2, got {n}"
        )))
    } else {
        Ok(())
    }
}

fn require_spacing<F: Real>(delta: F) -> Result<()> {
    if delta > F::zero() {
        Ok(())
    } else {
        Err(Error::InvalidArgument("spacing must be positive".into()))
    }
}

/// Cyclic shift permutation matrix of the given direction.
pub fn shift_matrix<F: Real>(n: usize, direction: ShiftDirection) -> Result<CirculantOperator<F>> {
    require_size(n)?;
    let mut matrix = Array2::zeros((n, n));
    for row in 0..n {
        match direction {
            ShiftDirection::Minus => matrix[[row, (row + 1) % n]] = F::one(),
            ShiftDirection::Plus => matrix[[row, (row + n - 1) % n]] = F::one(),
        }
    }
    let kind = match direction {
        ShiftDirection::Minus => CirculantKind::ShiftMinus,
        ShiftDirection::Plus => CirculantKind::ShiftPlus,
    };
    Ok(CirculantOperator {
        size: n,
        matrix,
        kind,
    })
}

/// Central-difference first derivative on a periodic grid,
/// `(S_- - S_+)/(2*delta_x)`. Antisymmetric.
pub fn dx_matrix<F: Real>(n: usize, delta_x: F) -> Result<CirculantOperator<F>> {
    require_size(n)?;
    require_spacing(delta_x)?;
    let minus = shift_matrix::<F>(n, ShiftDirection::Minus)?.matrix;
    let plus = shift_matrix::<F>(n, ShiftDirection::Plus)?.matrix;
    let scale = (real::<F>(2.0) * delta_x).recip();
    let matrix = (minus - plus).mapv(|e| e * scale);
    Ok(CirculantOperator {
        size: n,
        matrix,
        kind: CirculantKind::FirstDerivative,
    })
}

/// Central-difference second derivative on a periodic grid,
/// `(S_+ + S_- - 2I)/delta_v^2`. Symmetric with zero row sums.
pub fn dvv_matrix<F: Real>(n: usize, delta_v: F) -> Result<CirculantOperator<F>> {
    require_size(n)?;
    require_spacing(delta_v)?;
    let minus = shift_matrix::<F>(n, ShiftDirection::Minus)?.matrix;
    let plus = shift_matrix::<F>(n, ShiftDirection::Plus)?.matrix;
    let scale = (delta_v * delta_v).recip();
    let two = real::<F>(2.0);
    let mut matrix = minus + plus;
    for d in 0..n {
        matrix[[d, d]] -= two;
    }
    matrix.mapv_inplace(|e| e * scale);
    Ok(CirculantOperator {
        size: n,
        matrix,
        kind: CirculantKind::SecondDerivative,
    })
}

/// Unitary DFT matrix with the positive forward phase sign:
/// `Q[m, n] = exp(+2*pi*i*(m*n mod N)/N) / sqrt(N)`.
///
/// The modular reduction of `m*n` keeps the phase argument small, which
/// matters for the exactness of entries like `Q[1, 1] = i/2` at `N = 4`.
pub fn dft_matrix<F: Real>(n: usize) -> Result<Array2<Complex<F>>> {
    require_size(n)?;
    let scale = real::<F>(1.0 / (n as f64).sqrt());
    let step = real::<F>(2.0) * F::PI() / real::<F>(n as f64);
    Ok(Array2::from_shape_fn((n, n), |(m, col)| {
        let angle = step * real::<F>(((m * col) % n) as f64);
        Complex::from_polar(scale, angle)
    }))
}

/// Eigenvalues of [`dx_matrix`]: `lambda_k = (i/delta_x) * sin(2*pi*k/N)`,
/// purely imaginary.
pub fn dx_eigenvalues<F: Real>(n: usize, delta_x: F) -> Result<SpectralTable<F>> {
    require_size(n)?;
    require_spacing(delta_x)?;
    let step = real::<F>(2.0) * F::PI() / real::<F>(n as f64);
    let eigenvalues = Array1::from_shape_fn(n, |k| {
        Complex::new(F::zero(), (step * real::<F>(k as f64)).sin() / delta_x)
    });
    Ok(SpectralTable { eigenvalues })
}

/// Eigenvalues of [`dvv_matrix`]: `mu_m = -(4/delta_v^2) * sin^2(pi*m/N)`,
/// real, nonpositive, with `mu_0 = 0`.
pub fn dvv_eigenvalues<F: Real>(n: usize, delta_v: F) -> Result<SpectralTable<F>> {
    require_size(n)?;
    require_spacing(delta_v)?;
    let step = F::PI() / real::<F>(n as f64);
    let scale = real::<F>(-4.0) / (delta_v * delta_v);
    let eigenvalues = Array1::from_shape_fn(n, |m| {
        let s = (step * real::<F>(m as f64)).sin();
        Complex::new(scale * s * s, F::zero())
    });
    Ok(SpectralTable { eigenvalues })
}
