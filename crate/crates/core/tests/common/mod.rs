//! Helpers shared by the integration test suites. Everything here is
//! deliberately independent of the crate's own linear-algebra routines so
//! it can serve as an oracle for them.

#![allow(dead_code)]

use ndarray::{Array1, Array2};
use num_complex::Complex;

pub type C64 = Complex<f64>;

/// Kronecker product, left factor owning the slow index: the row index of
/// the result is `i_left * rows(b) + i_right`.
pub fn kron<T>(a: &Array2<T>, b: &Array2<T>) -> Array2<T>
where
    T: Copy + std::ops::Mul<Output = T>,
{
    let (ar, ac) = (a.nrows(), a.ncols());
    let (br, bc) = (b.nrows(), b.ncols());
    Array2::from_shape_fn((ar * br, ac * bc), |(r, c)| {
        a[[r / br, c / bc]] * b[[r % br, c % bc]]
    })
}

pub fn to_complex(m: &Array2<f64>) -> Array2<C64> {
    m.mapv(|e| Complex::new(e, 0.0))
}

pub fn eye(n: usize) -> Array2<C64> {
    Array2::from_shape_fn((n, n), |(r, c)| {
        Complex::new(if r == c { 1.0 } else { 0.0 }, 0.0)
    })
}

pub fn diag(entries: &[C64]) -> Array2<C64> {
    let n = entries.len();
    Array2::from_shape_fn((n, n), |(r, c)| {
        if r == c {
            entries[r]
        } else {
            Complex::new(0.0, 0.0)
        }
    })
}

/// Largest entry modulus of the elementwise difference.
pub fn max_dev(a: &Array2<C64>, b: &Array2<C64>) -> f64 {
    assert_eq!(a.dim(), b.dim());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn max_dev_vec(a: &Array1<C64>, b: &Array1<C64>) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn max_dev_real(a: &Array1<f64>, b: &Array1<f64>) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Small deterministic pseudo-random stream for oracle inputs; a fixed
/// linear congruential generator keeps the suites reproducible without
/// pulling in an RNG dependency.
pub struct Lcg(u64);

impl Lcg {
    pub fn new(seed: u64) -> Self {
        Lcg(seed.max(1))
    }

    pub fn next_u64(&mut self) -> u64 {
        // Constants from Knuth's MMIX generator.
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        self.0
    }

    /// Uniform in [0, 1).
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform in [lo, hi).
    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    pub fn complex(&mut self) -> C64 {
        Complex::new(self.range(-1.0, 1.0), self.range(-1.0, 1.0))
    }

    /// Random complex unit vector of the given length.
    pub fn unit_vector(&mut self, len: usize) -> Array1<C64> {
        let mut v = Array1::from_shape_fn(len, |_| self.complex());
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.mapv_inplace(|z| z / norm);
        v
    }

    /// Random probability mass vector (nonnegative, sums to 1).
    pub fn mass_vector(&mut self, len: usize) -> Array1<f64> {
        let mut v = Array1::from_shape_fn(len, |_| self.uniform());
        let total: f64 = v.sum();
        v.mapv_inplace(|m| m / total);
        v
    }
}
