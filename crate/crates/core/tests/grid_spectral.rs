//! Grid construction, Gaussian initialization, encoding round trips, and
//! the circulant/DFT spectral identities.

mod common;

use approx::assert_relative_eq;
use common::{diag, max_dev, to_complex, Lcg};
use ndarray::{array, Array1, Array2};
use num_complex::Complex;
use qfpe::error::Error;
use qfpe::grid::{
    amplitude_encode, build_grid, decode_density, devectorize, gaussian_density, vectorize,
    AmplitudeState, DensityGrid,
};
use qfpe::spectral::{
    dft_matrix, dvv_eigenvalues, dvv_matrix, dx_eigenvalues, dx_matrix, shift_matrix,
    ShiftDirection,
};

#[test]
fn build_grid_reference_setup() {
    let g = build_grid::<f64>(6, 6, 1.0, 0.0, -3.75, 3.75).unwrap();
    assert_eq!(g.len_x(), 64);
    assert_eq!(g.len_v(), 64);
    assert_relative_eq!(g.delta_v, 7.5 / 63.0, max_relative = 1e-15);
    assert_relative_eq!(g.v_axis[0], -3.75);
    assert_relative_eq!(*g.v_axis.last().unwrap(), 3.75, epsilon = 1e-12);
    for j in 1..g.len_v() {
        assert!((g.v_axis[j] - g.v_axis[j - 1] - g.delta_v).abs() < 1e-12);
    }
}

#[test]
fn build_grid_two_point_velocity_axis() {
    let g = build_grid::<f64>(1, 1, 1.0, 0.0, 0.0, 1.0).unwrap();
    assert_eq!(g.v_axis, vec![0.0, 1.0]);
    assert_eq!(g.delta_v, 1.0);
}

#[test]
fn build_grid_four_point_axes() {
    let g = build_grid::<f64>(2, 2, 0.5, 0.0, -1.0, 1.0).unwrap();
    assert_eq!(g.x_axis, vec![0.0, 0.5, 1.0, 1.5]);
    let expected = [-1.0, -1.0 / 3.0, 1.0 / 3.0, 1.0];
    for (got, want) in g.v_axis.iter().zip(expected.iter()) {
        assert_relative_eq!(got, want, epsilon = 1e-15);
    }
}

#[test]
fn gaussian_density_has_unit_mass() {
    let g = build_grid::<f64>(3, 3, 0.7, -2.0, -1.5, 2.5).unwrap();
    let d = gaussian_density(&g, 0.0, 1.0, 0.3, 0.8).unwrap();
    assert_relative_eq!(d.total_mass(), 1.0, epsilon = 1e-12);
    assert!(d.values.iter().all(|&m| m >= 0.0));
}

#[test]
fn gaussian_density_concentrates_in_one_cell() {
    let g = build_grid::<f64>(3, 2, 1.0, 0.0, -1.0, 1.0).unwrap();
    let d = gaussian_density(&g, g.x_axis[3], 0.01 * g.delta_x, 0.0, 1.0).unwrap();
    let cell_mass: f64 = (0..g.len_v()).map(|j| d.values[[3, j]]).sum();
    assert!(cell_mass > 0.999);
}

#[test]
fn gaussian_density_mean_matches_symmetric_center() {
    let g = build_grid::<f64>(2, 2, 1.0, 0.0, -1.0, 1.0).unwrap();
    let mu_v = 0.0; // midpoint of the symmetric velocity axis
    let d = gaussian_density(&g, 1.5, 1.0, mu_v, 0.6).unwrap();
    let mean_v: f64 = (0..g.len_v())
        .map(|j| g.v_axis[j] * (0..g.len_x()).map(|i| d.values[[i, j]]).sum::<f64>())
        .sum();
    assert!((mean_v - mu_v).abs() < 1e-10);
}

#[test]
fn gaussian_density_is_separable() {
    let g = build_grid::<f64>(3, 3, 0.5, 1.0, -2.0, 2.0).unwrap();
    let d = gaussian_density(&g, 2.2, 0.9, -0.4, 0.7).unwrap();
    let px: Vec<f64> = (0..g.len_x())
        .map(|i| (0..g.len_v()).map(|j| d.values[[i, j]]).sum())
        .collect();
    let pv: Vec<f64> = (0..g.len_v())
        .map(|j| (0..g.len_x()).map(|i| d.values[[i, j]]).sum())
        .collect();
    for i in 0..g.len_x() {
        for j in 0..g.len_v() {
            assert!((d.values[[i, j]] - px[i] * pv[j]).abs() < 1e-14);
        }
    }
}

#[test]
fn gaussian_density_rejects_bad_sigma() {
    let g = build_grid::<f64>(1, 1, 1.0, 0.0, 0.0, 1.0).unwrap();
    assert!(matches!(
        gaussian_density(&g, 0.0, 0.0, 0.0, 1.0),
        Err(Error::InvalidArgument(_))
    ));
    assert!(gaussian_density(&g, 0.0, 1.0, 0.0, -0.1).is_err());
}

#[test]
fn vectorize_stacks_velocity_columns() {
    let g = build_grid::<f64>(1, 1, 1.0, 0.0, 0.0, 1.0).unwrap();
    let d = DensityGrid {
        values: array![[0.1, 0.2], [0.3, 0.4]],
        grid: g.clone(),
    };
    let p = vectorize(&d);
    assert_eq!(p, Array1::from(vec![0.1, 0.3, 0.2, 0.4]));
    let back = devectorize(&p, &g).unwrap();
    assert_eq!(back.values, d.values);
}

#[test]
fn vectorize_index_law() {
    let g = build_grid::<f64>(2, 3, 1.0, 0.0, -1.0, 1.0).unwrap();
    let mut rng = Lcg::new(7);
    let values = Array2::from_shape_fn((g.len_x(), g.len_v()), |_| rng.uniform());
    let d = DensityGrid {
        values: values.clone(),
        grid: g.clone(),
    };
    let p = vectorize(&d);
    for i in 0..g.len_x() {
        for j in 0..g.len_v() {
            assert_eq!(p[j * g.len_x() + i], values[[i, j]]);
        }
    }
}

#[test]
fn vectorize_uniform_density_is_constant() {
    let g = build_grid::<f64>(2, 2, 1.0, 0.0, -1.0, 1.0).unwrap();
    let n = g.len() as f64;
    let d = DensityGrid {
        values: Array2::from_elem((g.len_x(), g.len_v()), 1.0 / n),
        grid: g.clone(),
    };
    assert!(vectorize(&d).iter().all(|&m| m == 1.0 / n));
}

#[test]
fn devectorize_rejects_wrong_length() {
    let g = build_grid::<f64>(1, 1, 1.0, 0.0, 0.0, 1.0).unwrap();
    let p = Array1::from(vec![0.5, 0.5]);
    assert!(matches!(
        devectorize(&p, &g),
        Err(Error::DimensionMismatch(_))
    ));
}

#[test]
fn amplitude_encode_point_mass_and_uniform() {
    let p = Array1::from(vec![1.0, 0.0, 0.0, 0.0]);
    let psi = amplitude_encode(&p).unwrap();
    assert_eq!(psi.amplitudes[0], Complex::new(1.0, 0.0));
    assert_eq!(psi.amplitudes[1], Complex::new(0.0, 0.0));

    let n = 8usize;
    let uniform = Array1::from_elem(n, 1.0 / n as f64);
    let psi = amplitude_encode(&uniform).unwrap();
    for a in psi.amplitudes.iter() {
        assert_relative_eq!(a.re, (1.0 / n as f64).sqrt(), epsilon = 1e-15);
    }
}

#[test]
fn amplitude_encode_square_roots() {
    let p = Array1::from(vec![0.25, 0.75]);
    let psi = amplitude_encode(&p).unwrap();
    assert_relative_eq!(psi.amplitudes[0].re, 0.5, epsilon = 1e-15);
    assert_relative_eq!(psi.amplitudes[1].re, 0.75f64.sqrt(), epsilon = 1e-15);
}

#[test]
fn amplitude_encode_rejects_bad_input() {
    let negative = Array1::from(vec![1.1, -0.1]);
    assert!(matches!(
        amplitude_encode(&negative),
        Err(Error::Domain(_))
    ));
    let off_mass = Array1::from(vec![0.6, 0.6]);
    assert!(matches!(
        amplitude_encode(&off_mass),
        Err(Error::Normalization(_))
    ));
}

#[test]
fn decode_round_trips_and_handles_complex_phases() {
    let g = build_grid::<f64>(1, 1, 1.0, 0.0, 0.0, 1.0).unwrap();
    let mut rng = Lcg::new(3);
    let p = rng.mass_vector(4);
    let psi = amplitude_encode(&p).unwrap();
    let d = decode_density(&psi, &g).unwrap();
    let back = vectorize(&d);
    for (a, b) in back.iter().zip(p.iter()) {
        assert!((a - b).abs() < 1e-12);
    }

    let s = std::f64::consts::FRAC_1_SQRT_2;
    let psi = AmplitudeState {
        amplitudes: Array1::from(vec![
            Complex::new(s, 0.0),
            Complex::new(0.0, s),
            Complex::new(0.0, 0.0),
            Complex::new(0.0, 0.0),
        ]),
    };
    let d = decode_density(&psi, &g).unwrap();
    let p = vectorize(&d);
    assert_relative_eq!(p[0], 0.5, epsilon = 1e-15);
    assert_relative_eq!(p[1], 0.5, epsilon = 1e-15);
}

#[test]
fn decode_rejects_denormalized_states() {
    let g = build_grid::<f64>(1, 1, 1.0, 0.0, 0.0, 1.0).unwrap();
    let p = Array1::from(vec![0.25; 4]);
    let mut psi = amplitude_encode(&p).unwrap();
    psi.amplitudes.mapv_inplace(|a| a * (1.0 + 2e-6));
    assert!(matches!(
        decode_density(&psi, &g),
        Err(Error::Consistency(_))
    ));
}

#[test]
fn shift_matrix_small_cases() {
    let s2 = shift_matrix::<f64>(2, ShiftDirection::Minus).unwrap().matrix;
    assert_eq!(s2, array![[0.0, 1.0], [1.0, 0.0]]);
    let s2p = shift_matrix::<f64>(2, ShiftDirection::Plus).unwrap().matrix;
    assert_eq!(s2p, s2);

    let s4 = shift_matrix::<f64>(4, ShiftDirection::Minus).unwrap().matrix;
    assert_eq!(s4.row(0).to_vec(), vec![0.0, 1.0, 0.0, 0.0]);
    assert_eq!(s4.row(3).to_vec(), vec![1.0, 0.0, 0.0, 0.0]);
}

#[test]
fn shift_matrices_are_inverse_permutations() {
    let minus = shift_matrix::<f64>(8, ShiftDirection::Minus).unwrap().matrix;
    let plus = shift_matrix::<f64>(8, ShiftDirection::Plus).unwrap().matrix;
    let product = plus.dot(&minus);
    for r in 0..8 {
        for c in 0..8 {
            assert_eq!(product[[r, c]], if r == c { 1.0 } else { 0.0 });
        }
    }
}

#[test]
fn dx_matrix_row_and_exact_nullspace() {
    let dx = dx_matrix::<f64>(4, 1.0).unwrap().matrix;
    assert_eq!(dx.row(0).to_vec(), vec![0.0, 0.5, 0.0, -0.5]);
    for c in 0..4 {
        assert_eq!(dx.column(c).sum(), 0.0);
    }
    let constant = Array1::from_elem(4, 3.2);
    assert!(dx.dot(&constant).iter().all(|&e| e == 0.0));
    // Antisymmetry is exact by construction.
    assert_eq!(dx.t().to_owned(), dx.mapv(|e| -e));
}

#[test]
fn dvv_matrix_row_and_semidefiniteness() {
    let dvv = dvv_matrix::<f64>(4, 1.0).unwrap().matrix;
    assert_eq!(dvv.row(0).to_vec(), vec![-2.0, 1.0, 0.0, 1.0]);
    let constant = Array1::from_elem(4, -1.7);
    assert!(dvv.dot(&constant).iter().all(|&e| e == 0.0));
    assert_eq!(dvv.t().to_owned(), dvv);

    // Quadratic-form check of negative semidefiniteness at N = 8.
    let d8 = dvv_matrix::<f64>(8, 0.4).unwrap().matrix;
    let mut rng = Lcg::new(11);
    for _ in 0..200 {
        let x = Array1::from_shape_fn(8, |_| rng.range(-1.0, 1.0));
        let quad = x.dot(&d8.dot(&x));
        let scale = x.dot(&x);
        assert!(quad <= 1e-12 * scale, "xT D x = {quad}");
    }
}

#[test]
fn dft_matrix_small_values() {
    let q2 = dft_matrix::<f64>(2).unwrap();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    assert!(max_dev(
        &q2,
        &array![
            [Complex::new(s, 0.0), Complex::new(s, 0.0)],
            [Complex::new(s, 0.0), Complex::new(-s, 0.0)]
        ]
    ) < 1e-15);

    let q4 = dft_matrix::<f64>(4).unwrap();
    assert!((q4[[1, 1]] - Complex::new(0.0, 0.5)).norm() < 1e-15);
}

#[test]
fn dft_matrix_is_unitary() {
    let q = dft_matrix::<f64>(16).unwrap();
    let q_dag = q.t().mapv(|z| z.conj());
    let product = q.dot(&q_dag);
    let mut dev: f64 = 0.0;
    for r in 0..16 {
        for c in 0..16 {
            let expect = Complex::new(if r == c { 1.0 } else { 0.0 }, 0.0);
            dev = dev.max((product[[r, c]] - expect).norm());
        }
    }
    assert!(dev < 1e-12);
}

#[test]
fn dx_eigenvalue_examples() {
    let table = dx_eigenvalues::<f64>(4, 1.0).unwrap().eigenvalues;
    let expect = [
        Complex::new(0.0, 0.0),
        Complex::new(0.0, 1.0),
        Complex::new(0.0, 0.0),
        Complex::new(0.0, -1.0),
    ];
    for (got, want) in table.iter().zip(expect.iter()) {
        assert!((got - want).norm() < 1e-12);
    }

    let table8 = dx_eigenvalues::<f64>(8, 0.5).unwrap().eigenvalues;
    assert!((table8[1] - Complex::new(0.0, 2.0f64.sqrt())).norm() < 1e-14);
    for k in 1..8 {
        assert!((table8[k] + table8[8 - k]).norm() < 1e-12);
    }
}

#[test]
fn dvv_eigenvalue_examples() {
    let table = dvv_eigenvalues::<f64>(4, 1.0).unwrap().eigenvalues;
    let expect = [0.0, -2.0, -4.0, -2.0];
    for (got, want) in table.iter().zip(expect.iter()) {
        assert!((got.re - want).abs() < 1e-12);
        assert_eq!(got.im, 0.0);
    }

    let delta_v = 7.5 / 63.0;
    let table64 = dvv_eigenvalues::<f64>(64, delta_v).unwrap().eigenvalues;
    assert_relative_eq!(table64[32].re, -282.24, max_relative = 1e-12);
    for m in 0..64 {
        assert!(table64[m].re <= 0.0);
        assert!((table64[m].re - table64[(64 - m) % 64].re).abs() < 1e-9);
    }
    assert_eq!(table64[0].re, 0.0);
}

#[test]
fn dft_diagonalizes_both_derivative_operators() {
    for &n in &[4usize, 8, 16, 32, 64] {
        let delta_x = 0.31;
        let delta_v = 0.17;
        let q = dft_matrix::<f64>(n).unwrap();
        let q_dag = q.t().mapv(|z| z.conj());

        let dx = to_complex(&dx_matrix::<f64>(n, delta_x).unwrap().matrix);
        let lambda = dx_eigenvalues::<f64>(n, delta_x).unwrap().eigenvalues;
        let dev = max_dev(&q_dag.dot(&dx).dot(&q), &diag(&lambda.to_vec()));
        assert!(dev < 1e-10, "first derivative, N={n}: {dev:e}");

        let dvv = to_complex(&dvv_matrix::<f64>(n, delta_v).unwrap().matrix);
        let mu = dvv_eigenvalues::<f64>(n, delta_v).unwrap().eigenvalues;
        let dev = max_dev(&q_dag.dot(&dvv).dot(&q), &diag(&mu.to_vec()));
        assert!(dev < 1e-10, "second derivative, N={n}: {dev:e}");
    }
}

#[test]
fn dft_diagonalizes_the_shift() {
    for &n in &[4usize, 8, 32] {
        let q = dft_matrix::<f64>(n).unwrap();
        let q_dag = q.t().mapv(|z| z.conj());
        let s_minus = to_complex(&shift_matrix::<f64>(n, ShiftDirection::Minus).unwrap().matrix);
        let omega: Vec<Complex<f64>> = (0..n)
            .map(|k| Complex::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / n as f64))
            .collect();
        let dev = max_dev(&q_dag.dot(&s_minus).dot(&q), &diag(&omega));
        assert!(dev < 1e-10, "shift spectrum N={n}: {dev:e}");
    }
}

#[test]
fn derivative_spectrum_is_shift_spectrum_difference() {
    let n = 16;
    let delta_x = 0.42;
    let lambda = dx_eigenvalues::<f64>(n, delta_x).unwrap().eigenvalues;
    for k in 0..n {
        let angle = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
        let forward = Complex::from_polar(1.0, angle);
        let backward = Complex::from_polar(1.0, -angle);
        let expect = (forward - backward) / Complex::new(2.0 * delta_x, 0.0);
        assert!((lambda[k] - expect).norm() < 1e-12);
    }
}
