use std::f64::consts::PI;

use ndarray::Array2;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;
use specshock::kernels::{FilterSpec, RskResponse};
use specshock::spectral::*;

fn periodic(n: usize, start: f64, extent: f64, f: impl FnMut(f64) -> f64) -> SpectralField {
    let axis = Axis::periodic(start, extent, n).unwrap();
    SpectralField::from_samples(axis, axis.coords().into_iter().map(f).collect()).unwrap()
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn constant_has_only_the_mean_mode() {
    let f = periodic(16, -1.0, 2.0, |_| 3.0);
    let c = dft_coefficients(&f).unwrap();
    assert!((c[[0, 0]] - Complex64::new(6.0, 0.0)).norm() < 1e-12);
    for k in 1..16 {
        assert!(c[[k, 0]].norm() < 1e-12);
    }
}

#[test]
fn sine_has_two_modes() {
    let l = 3.0;
    let f = periodic(32, 0.0, l, |x| (2.0 * PI * x / l).sin());
    let c = dft_coefficients(&f).unwrap();
    assert!((c[[1, 0]] - Complex64::new(0.0, -l / 2.0)).norm() < 1e-12);
    assert!((c[[31, 0]] - Complex64::new(0.0, l / 2.0)).norm() < 1e-12);
    for k in 2..31 {
        assert!(c[[k, 0]].norm() < 1e-12, "mode {k}");
    }
}

#[test]
fn offset_origin_keeps_the_convention() {
    // Same function sampled on a shifted window must give the same coefficients.
    let a = dft_coefficients(&periodic(16, 0.0, 2.0 * PI, |x| (x + 1.0).cos())).unwrap();
    let b = dft_coefficients(&periodic(16, -PI, 2.0 * PI, |x| (x + 1.0).cos())).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).norm() < 1e-12);
    }
}

#[test]
fn round_trip_random_2d() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let grid = Grid::two_d(
        Axis::periodic(0.0, 2.0, 16).unwrap(),
        Axis::periodic(-1.0, 3.0, 12).unwrap(),
    );
    let values = Array2::from_shape_fn(grid.shape(), |_| rng.gen_range(-1.0..1.0));
    let field = SpectralField::new(grid.clone(), values.clone()).unwrap();
    let back = field_from_coefficients(&grid, &dft_coefficients(&field).unwrap()).unwrap();
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for (a, b) in back.values().iter().zip(&values) {
        assert!((a - b).abs() <= 1e-12 * scale);
    }
}

#[test]
fn non_finite_samples_are_rejected() {
    let axis = Axis::periodic(0.0, 1.0, 8).unwrap();
    let mut v = vec![0.0; 8];
    v[3] = f64::NAN;
    assert!(SpectralField::from_samples(axis, v).is_err());
}

#[test]
fn parseval() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (n, l) = (64, 5.0);
    let f = periodic(n, 0.0, l, |_| rng.gen_range(-2.0..2.0));
    let dx = l / n as f64;
    let physical: f64 = f.samples().iter().map(|v| v * v).sum::<f64>() * dx;
    let spectral: f64 = dft_coefficients(&f).unwrap().iter().map(|c| c.norm_sqr()).sum::<f64>() / l;
    assert!((physical - spectral).abs() <= 1e-10 * physical);
}

#[test]
fn filtered_derivative_of_one_mode() {
    let (n, l, k) = (64, 2.0 * PI, 5.0);
    let f = periodic(n, 0.0, l, |x| (k * x).sin());
    let dx = l / n as f64;
    let eta = RskResponse::new(&FilterSpec::rsk(32, 1.5, dx).unwrap());
    let resp = sampled_response(n, dx, |w| eta.at(w));
    let d = diff_filtered(&f, &resp, 0).unwrap();
    let want: Vec<f64> = f
        .grid()
        .axis(0)
        .coords()
        .iter()
        .map(|x| eta.at(k) * k * (k * x).cos())
        .collect();
    assert!(max_diff(&d.samples(), &want) < 1e-10);
}

#[test]
fn nyquist_mode_has_no_derivative() {
    let n = 16;
    let f = periodic(n, 0.0, n as f64, |x| (PI * x).cos());
    let d = differentiate(&f, 0).unwrap();
    assert!(d.samples().iter().all(|v| v.abs() < 1e-12));
}

#[test]
fn spectral_accuracy() {
    let err = |n: usize| {
        let f = periodic(n, 0.0, 2.0 * PI, |x| x.sin().exp());
        let d = differentiate(&f, 0).unwrap();
        let want: Vec<f64> = f
            .grid()
            .axis(0)
            .coords()
            .iter()
            .map(|x| x.cos() * x.sin().exp())
            .collect();
        max_diff(&d.samples(), &want)
    };
    let e: Vec<f64> = [8, 16, 32].iter().map(|&n| err(n)).collect();
    assert!(e[1] / e[0] < 0.5f64.powi(8), "{e:?}");
    assert!(e[2] < 1e-12, "{e:?}");
}

#[test]
fn filtering_twice_squares_the_response() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let n = 48;
    let f = periodic(n, 0.0, 1.0, |_| rng.gen_range(-1.0..1.0));
    let dx = 1.0 / n as f64;
    let eta = RskResponse::new(&FilterSpec::rsk(32, 1.1, dx).unwrap());
    let resp = sampled_response(n, dx, |w| eta.at(w));
    let squared: Vec<f64> = resp.iter().map(|v| v * v).collect();
    let twice = filter_fourier(&filter_fourier(&f, &resp).unwrap(), &resp).unwrap();
    let once = filter_fourier(&f, &squared).unwrap();
    assert!(max_diff(&twice.samples(), &once.samples()) < 1e-12);
}

#[test]
fn mirror_extension_example() {
    let axis = Axis::nodal(0.0, 3.0, 4).unwrap();
    let f = SpectralField::from_samples(axis, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
    let e = mirror_extend(&f, 0).unwrap();
    assert_eq!(e.samples(), vec![1.0, 2.0, 3.0, 4.0, 4.0, 3.0, 2.0, 1.0]);
    assert!(e.grid().axis(0).is_periodic());
    assert_eq!(e.grid().axis(0).extent(), 8.0);
    assert_eq!(restrict(&e, 0, &axis).unwrap().samples(), f.samples());
}

#[test]
fn extension_of_a_symmetric_field_repeats() {
    let axis = Axis::nodal(0.0, 5.0, 6).unwrap();
    let f = SpectralField::from_samples(axis, vec![1.0, 5.0, 2.0, 2.0, 5.0, 1.0]).unwrap();
    let e = mirror_extend(&f, 0).unwrap().samples();
    assert_eq!(e[..6], e[6..]);
}

// exp(cos x) sampled at half-integer nodes of [0, π]: the mirror planes sit
// half a cell outside the first and last samples.
fn cell_centred(n: usize) -> (SpectralField, f64) {
    let dx = PI / n as f64;
    let axis = Axis::nodal(0.5 * dx, PI - 0.5 * dx, n).unwrap();
    let f = SpectralField::from_samples(axis, axis.coords().into_iter().map(|x| x.cos().exp()).collect()).unwrap();
    (f, dx)
}

#[test]
fn extended_derivative_matches_sixth_order_differences() {
    let n = 64;
    let (f, dx) = cell_centred(n);
    let e = mirror_extend(&f, 0).unwrap();
    let d = differentiate(&e, 0).unwrap().samples();
    let u = f.samples();
    for i in 3..n - 3 {
        let fd =
            (-u[i - 3] + 9.0 * u[i - 2] - 45.0 * u[i - 1] + 45.0 * u[i + 1] - 9.0 * u[i + 2] + u[i + 3]) / (60.0 * dx);
        assert!((d[i] - fd).abs() < 10.0 * dx.powi(4), "i={i}: {} vs {fd}", d[i]);
    }
}

#[test]
fn extended_derivative_is_odd_about_mirrors() {
    let n = 32;
    let (f, dx) = cell_centred(n);
    let eta = RskResponse::new(&FilterSpec::rsk(32, 2.0, dx).unwrap());
    let e = mirror_extend(&f, 0).unwrap();
    let d = diff_filtered(&e, &sampled_response(2 * n, dx, |w| eta.at(w)), 0)
        .unwrap()
        .samples();
    for k in 0..n {
        assert!((d[k] + d[2 * n - 1 - k]).abs() < 1e-12);
    }
    // the derivative vanishes at the planes themselves
    assert!((d[0] + d[2 * n - 1]).abs() < 1e-12 && (d[n - 1] + d[n]).abs() < 1e-12);
    assert!(d[0].abs() < 2.0 * dx && d[n - 1].abs() < 2.0 * dx);
}

#[test]
fn response_length_is_checked() {
    let f = periodic(16, 0.0, 1.0, |x| x);
    assert!(diff_filtered(&f, &[1.0; 8], 0).is_err());
    assert!(filter_fourier(&f, &[1.0; 8]).is_err());
}

proptest! {
    #[test]
    fn derivative_of_low_modes_is_exact(k in 1i32..15, phase in 0.0f64..6.3) {
        let k = k as f64;
        let f = periodic(32, 0.0, 2.0 * PI, |x| (k * x + phase).sin());
        let d = differentiate(&f, 0).unwrap().samples();
        let want: Vec<f64> = f.grid().axis(0).coords().iter().map(|x| k * (k * x + phase).cos()).collect();
        prop_assert!(max_diff(&d, &want) < 1e-11);
    }

    #[test]
    fn filtering_keeps_the_mean(seed in 0u64..1000, r in 0.5f64..4.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = periodic(32, 0.0, 1.0, |_| rng.gen_range(-1.0..1.0));
        let dx = 1.0 / 32.0;
        let eta = RskResponse::new(&FilterSpec::rsk(32, r, dx).unwrap());
        let g = filter_fourier(&f, &sampled_response(32, dx, |w| eta.at(w))).unwrap();
        prop_assert!((g.mean() - f.mean()).abs() < 1e-14);
    }
}
