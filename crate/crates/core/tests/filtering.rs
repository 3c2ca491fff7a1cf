use std::f64::consts::PI;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use specshock::filtering::*;
use specshock::kernels::{halfshift_response_at, halfshift_weights, FilterSpec};
use specshock::spectral::{filter_fourier, sampled_response, Axis, SpectralField};

fn rsk(r: f64) -> FilterSpec {
    FilterSpec::rsk(32, r, 1.0).unwrap()
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn random_steps(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let pieces = rng.gen_range(1..6);
    let mut cuts: Vec<usize> = (0..pieces).map(|_| rng.gen_range(1..n)).collect();
    cuts.sort_unstable();
    let mut v = rng.gen_range(-1.0..1.0);
    (0..n)
        .map(|i| {
            if cuts.contains(&i) {
                v = rng.gen_range(-1.0..1.0);
            }
            v
        })
        .collect()
}

#[test]
fn constants_predict_to_constants() {
    let m = predict_midpoints(&[1.0; 40], &rsk(3.2), BoundaryKind::Mirror).unwrap();
    assert!(m.values.iter().all(|v| (v - 1.0).abs() < 1e-10));
    assert_eq!(m.values.len(), 40 + 64);
    let p = predict_midpoints(&[1.0; 40], &rsk(3.2), BoundaryKind::Periodic).unwrap();
    assert_eq!(p.values.len(), 40);
}

#[test]
fn prediction_of_one_mode() {
    // a cosine is shifted by half a cell and scaled by the half-shift response
    let (n, k) = (96usize, 2.0 * PI * 7.0 / 96.0);
    let u: Vec<f64> = (0..n).map(|i| (k * i as f64).cos()).collect();
    let spec = rsk(2.0);
    let m = predict_midpoints(&u, &spec, BoundaryKind::Periodic).unwrap();
    let h = halfshift_response_at(&halfshift_weights(&spec), 1.0, k);
    let want: Vec<f64> = (0..n).map(|i| h * (k * (i as f64 + 0.5)).cos()).collect();
    assert!(max_diff(&m.values, &want) < 1e-13);
}

#[test]
fn reconstruction_of_one_mode() {
    let (n, k) = (64usize, 2.0 * PI * 5.0 / 64.0);
    let u: Vec<f64> = (0..n).map(|i| (k * i as f64).sin()).collect();
    let (p, r) = (rsk(1.6), rsk(2.0));
    let out = physical_filter(&u, &p, &r, BoundaryKind::Periodic).unwrap();
    let gain = HalfShiftFilter::new(&p, &r).response(1.0, k);
    let want: Vec<f64> = u.iter().map(|v| gain * v).collect();
    assert!(max_diff(&out, &want) < 1e-13);
    // the stepwise route agrees with the fused filter
    let mids = predict_midpoints(&u, &p, BoundaryKind::Periodic).unwrap();
    let two_step = reconstruct_nodes(&mids, &r, n).unwrap();
    assert!(max_diff(&out, &two_step) < 1e-14);
}

#[test]
fn stepwise_and_fused_agree_on_mirror_lanes() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let u: Vec<f64> = (0..50).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let (p, r) = (rsk(1.6), rsk(2.0));
    let mids = predict_midpoints(&u, &p, BoundaryKind::Mirror).unwrap();
    let a = reconstruct_nodes(&mids, &r, u.len()).unwrap();
    let b = physical_filter(&u, &p, &r, BoundaryKind::Mirror).unwrap();
    assert!(max_diff(&a, &b) < 1e-14);
}

#[test]
fn too_wide_reconstruction_is_a_contract_error() {
    let mids = predict_midpoints(&[1.0; 10], &FilterSpec::lagrange(2, 1.0).unwrap(), BoundaryKind::Mirror).unwrap();
    assert!(reconstruct_nodes(&mids, &FilterSpec::lagrange(4, 1.0).unwrap(), 10).is_err());
}

#[test]
fn physical_matches_fourier_on_smooth_fields() {
    let n = 128;
    let axis = Axis::periodic(0.0, 1.0, n).unwrap();
    let dx = axis.spacing();
    let xs = axis.coords();
    let u: Vec<f64> = xs
        .iter()
        .map(|x| (2.0 * PI * x).sin().exp() + 0.3 * (6.0 * PI * x).cos())
        .collect();
    for (rp, rr) in [(1.6, 2.0), (2.24, 2.8), (2.56, 3.2)] {
        let (p, r) = (
            FilterSpec::rsk(32, rp, dx).unwrap(),
            FilterSpec::rsk(32, rr, dx).unwrap(),
        );
        let phys = physical_filter(&u, &p, &r, BoundaryKind::Periodic).unwrap();
        let f = HalfShiftFilter::new(&p, &r);
        let resp = sampled_response(n, dx, |w| f.response(dx, w));
        let four = filter_fourier(&SpectralField::from_samples(axis, u.clone()).unwrap(), &resp).unwrap();
        assert!(max_diff(&phys, &four.samples()) <= 1e-6, "r = {rr}");
    }
}

#[test]
fn lagrange_postprocess_keeps_low_order_polynomials_in_the_interior() {
    let u: Vec<f64> = (0..30)
        .map(|i| {
            let x = i as f64 * 0.1;
            1.0 + x - 0.5 * x * x + 0.1 * x * x * x
        })
        .collect();
    let out = postprocess_lagrange(&u, 4, BoundaryKind::Mirror).unwrap();
    assert!(max_diff(&out[8..22], &u[8..22]) < 1e-12);
    assert!(postprocess_lagrange(&u, 3, BoundaryKind::Mirror).is_err());
}

#[test]
fn total_variation_examples() {
    assert_eq!(total_variation(&[0.0, 1.0, 0.0, 2.0], false), 4.0);
    assert_eq!(total_variation(&[0.0, 1.0, 0.0, 2.0], true), 6.0);
    assert_eq!(total_variation(&[3.0], true), 0.0);
    assert_eq!(total_variation(&[], false), 0.0);
}

#[test]
fn sensor_examples() {
    let cfg = SensorConfig::new(DEFAULT_TV_THRESHOLD, MonitoredField::Density).unwrap();
    assert!(!sensor_should_filter(1.0, 1.0, &cfg));
    assert!(!sensor_should_filter(1.0, 1.00005, &cfg));
    assert!(sensor_should_filter(1.0, 1.001, &cfg));
    assert!(!sensor_should_filter(2.0, 1.0, &cfg));
    assert!(sensor_should_filter(0.0, 1e-9, &cfg));
    assert!(SensorConfig::new(1.0, MonitoredField::Scalar).is_err());
    assert!(SensorConfig::new(0.5, MonitoredField::Scalar).is_err());
    assert!(SensorConfig::new(f64::INFINITY, MonitoredField::Scalar).is_err());
}

#[test]
fn local_filter_leaves_smooth_far_field_alone() {
    let n = 80;
    let u: Vec<f64> = (0..n)
        .map(|i| (0.2 * i as f64).sin() + if i > 40 { 3.0 } else { 0.0 })
        .collect();
    assert_eq!(steepest_jump(&u), Some(40));
    let out = local_filter_near_shock(&u, 6).unwrap();
    for i in (0..35).chain(47..n) {
        assert_eq!(out[i].to_bits(), u[i].to_bits(), "sample {i}");
    }
}

#[test]
fn local_filter_damps_ripples_at_the_step() {
    let n = 100;
    let ripple = |i: usize| 1e-3 * (0.3 * i as f64).sin();
    // Gibbs-like wiggle next to the step plus a small ripple far away
    let mut u: Vec<f64> = (0..n).map(|i| ripple(i) + if i >= 50 { 1.0 } else { 0.0 }).collect();
    for (k, d) in [(47, -0.04), (48, 0.08), (49, -0.1), (50, 0.1), (51, -0.08), (52, 0.04)] {
        u[k] += d;
    }
    let out = local_filter_near_shock(&u, 6).unwrap();
    assert_eq!(&out[..40], &u[..40]);
    assert_eq!(&out[60..], &u[60..]);
    assert!(total_variation(&out[40..60], false) < total_variation(&u[40..60], false));
}

#[test]
fn window_covering_everything_is_global() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let u = random_steps(&mut rng, 30);
    let global = postprocess_lagrange(&u, 4, BoundaryKind::Mirror).unwrap();
    let local = local_filter_near_shock(&u, 100).unwrap();
    assert_eq!(local, global);
}

#[test]
fn flat_lane_has_no_jump_to_filter() {
    assert_eq!(steepest_jump(&[2.0]), None);
    assert_eq!(local_filter_near_shock(&[2.0], 3).unwrap(), vec![2.0]);
    assert!(local_filter_near_shock(&[2.0, 1.0], 0).is_err());
}

// Both kernels overshoot at a jump, so the total variation of a step grows.
// The check is kept runnable for reference.
#[test]
#[ignore = "the half-shift filters are not total-variation diminishing"]
fn filters_never_increase_total_variation() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (p, r) = (rsk(2.56), rsk(3.2));
    for _ in 0..1000 {
        let u = random_steps(&mut rng, 64);
        let tv = total_variation(&u, false);
        let a = physical_filter(&u, &p, &r, BoundaryKind::Mirror).unwrap();
        let b = postprocess_lagrange(&u, 4, BoundaryKind::Mirror).unwrap();
        assert!(total_variation(&a, false) <= tv * (1.0 + 1e-12));
        assert!(total_variation(&b, false) <= tv * (1.0 + 1e-12));
    }
}

#[test]
fn overshoot_at_a_step_is_bounded() {
    // What does hold: the filtered step stays within a few percent of its range.
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (p, r) = (rsk(2.56), rsk(3.2));
    for _ in 0..200 {
        let u = random_steps(&mut rng, 64);
        let (lo, hi) = u.iter().fold((f64::MAX, f64::MIN), |(a, b), &v| (a.min(v), b.max(v)));
        let span = hi - lo;
        for v in physical_filter(&u, &p, &r, BoundaryKind::Mirror).unwrap() {
            assert!(v >= lo - 0.2 * span && v <= hi + 0.2 * span);
        }
    }
}

proptest! {
    #[test]
    fn periodic_filter_keeps_the_mean(seed in 0u64..10_000, r in 0.7f64..3.2, n in 16usize..128) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..3.0)).collect();
        let out = physical_filter(&u, &rsk(0.8 * r), &rsk(r), BoundaryKind::Periodic).unwrap();
        let (m0, m1) = (u.iter().sum::<f64>() / n as f64, out.iter().sum::<f64>() / n as f64);
        prop_assert!((m1 - m0).abs() <= 1e-10 * m0.abs() + 1e-12);
    }

    #[test]
    fn local_filter_is_local(seed in 0u64..10_000, w in 1usize..10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u: Vec<f64> = (0..60).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let s = steepest_jump(&u).unwrap();
        let out = local_filter_near_shock(&u, w).unwrap();
        for i in 0..u.len() {
            if i + w <= s || i > s + w {
                prop_assert_eq!(out[i].to_bits(), u[i].to_bits());
            }
        }
    }

    #[test]
    fn filtering_constants_is_exact(c in -5.0f64..5.0, r in 0.7f64..3.2) {
        let u = vec![c; 33];
        for bc in [BoundaryKind::Mirror, BoundaryKind::Outflow, BoundaryKind::Periodic] {
            let out = physical_filter(&u, &rsk(0.8 * r), &rsk(r), bc).unwrap();
            prop_assert!(out.iter().all(|v| (v - c).abs() <= 1e-13 * c.abs().max(1.0)));
        }
    }
}
