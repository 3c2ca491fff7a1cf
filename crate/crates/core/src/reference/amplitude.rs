//! Amplitude of the entropy waves transmitted through a shock.

use ndarray::Array2;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::filtering::steepest_jump;
use crate::spectral::Grid;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeOptions {
    /// Interpolation refinement factor.
    pub refine: usize,
    /// Length in `x` of the moving average that defines the local mean state.
    pub window: f64,
    /// Samples next to the shock left out of the analysis.
    pub guard: usize,
}

impl AmplitudeOptions {
    pub fn new(window: f64) -> Self {
        AmplitudeOptions {
            refine: 8,
            window,
            guard: 8,
        }
    }
}

/// Deviation of the post-shock density from its local mean.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeProfile {
    /// Shock location (midpoint of the steepest jump).
    pub shock: f64,
    pub x: Vec<f64>,
    /// Signed deviation; in 2D the maximum over `y` at each `x`.
    pub deviation: Vec<f64>,
    /// `max_y |deviation|`.
    pub envelope: Vec<f64>,
    /// Local extrema `(x, value)` of `deviation`.
    pub extrema: Vec<(f64, f64)>,
}

/// Trigonometric interpolation of the even extension of `u` onto a grid
/// `refine` times denser. Both end samples are reproduced exactly.
fn interpolate_even(u: &[f64], refine: usize) -> Vec<f64> {
    let n = u.len();
    if n < 2 || refine == 1 {
        return u.to_vec();
    }
    let m = 2 * (n - 1);
    let mut buf: Vec<Complex64> = (0..m)
        .map(|k| Complex64::new(if k < n { u[k] } else { u[m - k] }, 0.0))
        .collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(m).process(&mut buf);
    let big = m * refine;
    let mut spec = vec![Complex64::new(0.0, 0.0); big];
    let half = m / 2;
    for k in 0..half {
        spec[k] = buf[k];
        if k > 0 {
            spec[big - k] = buf[m - k];
        }
    }
    // split the Nyquist coefficient so the interpolant stays real
    spec[half] = buf[half] * 0.5;
    spec[big - half] = buf[half] * 0.5;
    planner.plan_fft_inverse(big).process(&mut spec);
    spec[..=(n - 1) * refine].iter().map(|c| c.re / m as f64).collect()
}

/// Mean of the piecewise-linear interpolant of `u` over `[i - h, i + h]`
/// (in sample units) for every `i` with the whole window inside the lane.
fn moving_average(u: &[f64], h: f64) -> Vec<f64> {
    // cumulative trapezoid integral at the samples
    let mut cum = vec![0.0; u.len()];
    for i in 1..u.len() {
        cum[i] = cum[i - 1] + 0.5 * (u[i - 1] + u[i]);
    }
    let integral = |t: f64| {
        let k = (t.floor() as usize).min(u.len() - 2);
        let f = t - k as f64;
        let slope = u[k + 1] - u[k];
        cum[k] + f * u[k] + 0.5 * f * f * slope
    };
    let last = (u.len() - 1) as f64;
    (0..u.len())
        .map(|i| {
            let (a, b) = (i as f64 - h, i as f64 + h);
            if a < 0.0 || b > last {
                f64::NAN
            } else {
                (integral(b) - integral(a)) / (2.0 * h)
            }
        })
        .collect()
}

/// Post-shock entropy-wave amplitude along `x`.
///
/// The shock is located from the `y`-averaged density. The post-shock side
/// (the denser one) is interpolated onto a grid `refine` times finer, the
/// mean over a window of length `window` is subtracted, and in 2D the maximum over
/// `y` is taken at each `x`. Points closer than half a window to either end
/// of the post-shock region are dropped.
pub fn entropy_amplitude_profile(rho: &Array2<f64>, grid: &Grid, opts: &AmplitudeOptions) -> Result<AmplitudeProfile> {
    let (nx, ny) = rho.dim();
    if (nx, ny) != grid.shape() {
        return Err(Error::Contract("density does not match the grid".into()));
    }
    if opts.refine == 0 || !(opts.window > 0.0) {
        return Err(Error::Contract("refinement and window must be positive".into()));
    }
    let axis = grid.axis(0);
    let dx = axis.spacing();
    let mean: Vec<f64> = (0..nx).map(|i| rho.row(i).sum() / ny as f64).collect();
    let jumps: Vec<f64> = mean.windows(2).map(|p| (p[1] - p[0]).abs()).collect();
    let s = steepest_jump(&mean).ok_or_else(|| Error::Analysis("too few samples".into()))?;
    let mut sorted = jumps.clone();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];
    if !(jumps[s] > 10.0 * median && jumps[s] > 0.0) {
        return Err(Error::Analysis("no detectable shock in the density".into()));
    }
    let g = opts.guard.max(1);
    let side = |lo: usize, hi: usize| mean[lo..hi].iter().sum::<f64>() / (hi - lo) as f64;
    let left_mean = side(s.saturating_sub(g), s + 1);
    let right_mean = side(s + 1, (s + 1 + g).min(nx));
    let (lo, hi) = if left_mean > right_mean {
        (
            0,
            s.checked_sub(g)
                .ok_or_else(|| Error::Analysis("shock too close to the boundary".into()))?,
        )
    } else {
        (s + 1 + g, nx - 1)
    };
    if hi <= lo + 2 {
        return Err(Error::Analysis("post-shock region too short".into()));
    }
    let r = opts.refine;
    let dxf = dx / r as f64;
    let h = 0.5 * opts.window / dxf;
    let w = h.ceil() as usize;
    let len = (hi - lo) * r + 1;
    if len <= 2 * w {
        return Err(Error::Analysis(
            "post-shock region shorter than the averaging window".into(),
        ));
    }
    let keep = w..len - w;
    let mut deviation = vec![f64::NEG_INFINITY; keep.len()];
    let mut envelope = vec![0.0f64; keep.len()];
    for j in 0..ny {
        let lane: Vec<f64> = (lo..=hi).map(|i| rho[[i, j]]).collect();
        let fine = interpolate_even(&lane, r);
        let base = moving_average(&fine, h);
        for (k, i) in keep.clone().enumerate() {
            let d = fine[i] - base[i];
            deviation[k] = deviation[k].max(d);
            envelope[k] = envelope[k].max(d.abs());
        }
    }
    let x0 = axis.coord(lo);
    let x: Vec<f64> = keep.map(|i| x0 + i as f64 * dxf).collect();
    let extrema = deviation
        .windows(3)
        .enumerate()
        .filter(|(_, p)| (p[1] > p[0] && p[1] >= p[2]) || (p[1] < p[0] && p[1] <= p[2]))
        .map(|(k, p)| (x[k + 1], p[1]))
        .collect();
    Ok(AmplitudeProfile {
        shock: axis.coord(s) + 0.5 * dx,
        x,
        deviation,
        envelope,
        extrema,
    })
}

/// Mean distance between successive maxima of the profile inside `range`.
pub fn mean_wavelength(profile: &AmplitudeProfile, range: (f64, f64)) -> Option<f64> {
    let peaks: Vec<f64> = profile
        .extrema
        .iter()
        .filter(|(x, v)| *v > 0.0 && *x >= range.0 && *x <= range.1)
        .map(|(x, _)| *x)
        .collect();
    if peaks.len() < 2 {
        return None;
    }
    Some((peaks[peaks.len() - 1] - peaks[0]) / (peaks.len() - 1) as f64)
}
