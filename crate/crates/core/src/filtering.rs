//! Physical-domain filtering and the total-variation sensor.
//!
//! The physical filter interpolates nodal values to midpoints with one
//! half-shift kernel and then back to the nodes with another. Both steps are
//! symmetric convolutions, so on a periodic grid the composite acts as the
//! Fourier multiplier `H_predict(ω) * H_reconstruct(ω)`.

use crate::error::{Error, Result};
use crate::kernels::{halfshift_weights, FilterSpec};

/// Treatment of one end of a lane.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    /// Wrap around; both ends of the lane must be periodic.
    Periodic,
    /// Even mirror half a cell beyond the end sample.
    Mirror,
    /// Solid wall through the end sample; the wall-normal component is odd.
    Reflective,
    /// Zeroth-order (constant) extrapolation.
    Outflow,
    /// Prescribed state: the end sample is held fixed and ghosts copy it.
    Inflow,
}

/// Where a ghost sample takes its value from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GhostSource {
    pub index: usize,
    /// Number of reflections through a reflective low end, modulo two.
    pub low_odd: bool,
    pub high_odd: bool,
}

/// Resolve (possibly out-of-range) lane index `i` to a physical sample.
pub fn ghost_source(i: isize, n: usize, lo: BoundaryKind, hi: BoundaryKind) -> Result<GhostSource> {
    if n == 0 {
        return Err(Error::Contract("empty lane".into()));
    }
    if (lo == BoundaryKind::Periodic) != (hi == BoundaryKind::Periodic) {
        return Err(Error::Contract("periodic boundaries must be paired".into()));
    }
    let n_i = n as isize;
    if lo == BoundaryKind::Periodic {
        return Ok(GhostSource {
            index: i.rem_euclid(n_i) as usize,
            low_odd: false,
            high_odd: false,
        });
    }
    let mut k = i;
    let (mut low_odd, mut high_odd) = (false, false);
    // Each pass moves k strictly toward the valid range, or clamps it.
    while k < 0 || k >= n_i {
        if k < 0 {
            match lo {
                BoundaryKind::Mirror => k = -1 - k,
                BoundaryKind::Reflective => {
                    if n == 1 {
                        k = 0;
                    } else {
                        k = -k;
                        low_odd = !low_odd;
                    }
                }
                _ => k = 0,
            }
        } else {
            match hi {
                BoundaryKind::Mirror => k = 2 * n_i - 1 - k,
                BoundaryKind::Reflective => {
                    if n == 1 {
                        k = 0;
                    } else {
                        k = 2 * (n_i - 1) - k;
                        high_odd = !high_odd;
                    }
                }
                _ => k = n_i - 1,
            }
        }
    }
    Ok(GhostSource {
        index: k as usize,
        low_odd,
        high_odd,
    })
}

/// Ghost-extended copy of a scalar lane, `pad` samples on each side.
///
/// Reflective ends mirror scalars evenly; components that must flip sign at a
/// wall are handled by the caller using [`ghost_source`].
pub fn extend_lane(u: &[f64], pad: usize, lo: BoundaryKind, hi: BoundaryKind) -> Result<Vec<f64>> {
    let n = u.len();
    (-(pad as isize)..(n + pad) as isize)
        .map(|i| ghost_source(i, n, lo, hi).map(|g| u[g.index]))
        .collect()
}

/// Two-step half-shift filter with precomputed weights.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfShiftFilter {
    predict: Vec<f64>,
    reconstruct: Vec<f64>,
}

impl HalfShiftFilter {
    pub fn new(predict: &FilterSpec, reconstruct: &FilterSpec) -> Self {
        HalfShiftFilter {
            predict: halfshift_weights(predict),
            reconstruct: halfshift_weights(reconstruct),
        }
    }

    /// Ghost samples required on each side of a lane.
    pub fn ghosts(&self) -> usize {
        self.predict.len() + self.reconstruct.len()
    }

    /// Filter the `out.len()` physical samples of a lane that carries
    /// [`Self::ghosts`] extra samples on each side.
    pub fn apply_extended(&self, ext: &[f64], out: &mut [f64]) {
        let g = self.ghosts();
        let n = out.len();
        debug_assert_eq!(ext.len(), n + 2 * g);
        let wr = self.reconstruct.len();
        // midpoints k + 1/2 for k in -wr ..= n - 1 + wr - 1, stored from index 0
        let mids: Vec<f64> = (0..n + 2 * wr - 1)
            .map(|m| {
                let k = g + m - wr; // position of node k in ext
                self.predict
                    .iter()
                    .enumerate()
                    .map(|(j, w)| w * (ext[k - j] + ext[k + 1 + j]))
                    .sum()
            })
            .collect();
        for (i, o) in out.iter_mut().enumerate() {
            let c = i + wr; // mids[c] is midpoint i + 1/2
            *o = self
                .reconstruct
                .iter()
                .enumerate()
                .map(|(j, w)| w * (mids[c - 1 - j] + mids[c + j]))
                .sum();
        }
    }

    /// Filter a scalar lane with the given end treatments.
    pub fn apply(&self, u: &[f64], lo: BoundaryKind, hi: BoundaryKind) -> Result<Vec<f64>> {
        let ext = extend_lane(u, self.ghosts(), lo, hi)?;
        let mut out = vec![0.0; u.len()];
        self.apply_extended(&ext, &mut out);
        Ok(out)
    }

    /// Fourier multiplier equivalent to the filter on a periodic grid.
    pub fn response(&self, spacing: f64, omega: f64) -> f64 {
        crate::kernels::halfshift_response_at(&self.predict, spacing, omega)
            * crate::kernels::halfshift_response_at(&self.reconstruct, spacing, omega)
    }
}

/// Midpoint values `u_{k+1/2}` for `k` in `first .. first + values.len()`.
#[derive(Debug, Clone, PartialEq)]
pub struct Midpoints {
    pub first: isize,
    pub values: Vec<f64>,
    pub periodic: bool,
}

impl Midpoints {
    fn get(&self, k: isize) -> Result<f64> {
        if self.periodic {
            return Ok(self.values[k.rem_euclid(self.values.len() as isize) as usize]);
        }
        let idx = k - self.first;
        if idx < 0 || idx as usize >= self.values.len() {
            return Err(Error::Contract(format!("midpoint {k} outside the predicted range")));
        }
        Ok(self.values[idx as usize])
    }
}

/// Predict midpoint values from nodal values.
///
/// Periodic lanes give `N` midpoints; otherwise the range is padded by the
/// filter half-width on both sides so that a reconstruction of the same width fits.
pub fn predict_midpoints(u: &[f64], spec: &FilterSpec, bc: BoundaryKind) -> Result<Midpoints> {
    if u.is_empty() {
        return Err(Error::Contract("empty lane".into()));
    }
    let w = halfshift_weights(spec);
    let width = w.len() as isize;
    let n = u.len() as isize;
    let periodic = bc == BoundaryKind::Periodic;
    let (first, last) = if periodic { (0, n - 1) } else { (-width, n - 1 + width) };
    let node = |i: isize| ghost_source(i, u.len(), bc, bc).map(|g| u[g.index]);
    let mut values = Vec::with_capacity((last - first + 1) as usize);
    for k in first..=last {
        let mut acc = 0.0;
        for (j, wj) in w.iter().enumerate() {
            let j = j as isize;
            acc += wj * (node(k - j)? + node(k + 1 + j)?);
        }
        values.push(acc);
    }
    Ok(Midpoints {
        first,
        values,
        periodic,
    })
}

/// Reconstruct nodal values from midpoint values.
pub fn reconstruct_nodes(mids: &Midpoints, spec: &FilterSpec, n: usize) -> Result<Vec<f64>> {
    let w = halfshift_weights(spec);
    (0..n as isize)
        .map(|i| {
            let mut acc = 0.0;
            for (j, wj) in w.iter().enumerate() {
                let j = j as isize;
                acc += wj * (mids.get(i - 1 - j)? + mids.get(i + j)?);
            }
            Ok(acc)
        })
        .collect()
}

/// Two-step physical filter: predict with `predict`, reconstruct with `reconstruct`.
pub fn physical_filter(
    u: &[f64],
    predict: &FilterSpec,
    reconstruct: &FilterSpec,
    bc: BoundaryKind,
) -> Result<Vec<f64>> {
    if u.is_empty() {
        return Err(Error::Contract("empty lane".into()));
    }
    HalfShiftFilter::new(predict, reconstruct).apply(u, bc, bc)
}

/// `Σ |u_{i+1} - u_i|`, including the wrap-around pair when `periodic`.
pub fn total_variation(u: &[f64], periodic: bool) -> f64 {
    let interior: f64 = u.windows(2).map(|p| (p[1] - p[0]).abs()).sum();
    match (periodic, u.first(), u.last()) {
        (true, Some(a), Some(b)) if u.len() > 1 => interior + (a - b).abs(),
        _ => interior,
    }
}

/// Which field drives the filter sensor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonitoredField {
    Scalar,
    Density,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorConfig {
    threshold: f64,
    monitored: MonitoredField,
}

/// Default total-variation growth ratio that triggers filtering.
pub const DEFAULT_TV_THRESHOLD: f64 = 1.0 + 1e-4;

impl SensorConfig {
    pub fn new(threshold: f64, monitored: MonitoredField) -> Result<Self> {
        if !(threshold > 1.0) || !threshold.is_finite() {
            return Err(Error::Contract(format!(
                "sensor threshold must exceed 1, got {threshold}"
            )));
        }
        Ok(SensorConfig { threshold, monitored })
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn monitored(&self) -> MonitoredField {
        self.monitored
    }
}

/// True when the total variation grew by more than the configured ratio.
pub fn sensor_should_filter(tv_prev: f64, tv_curr: f64, cfg: &SensorConfig) -> bool {
    if tv_prev == 0.0 {
        return tv_curr > 0.0;
    }
    tv_curr > cfg.threshold * tv_prev
}

fn lagrange_order(order: usize) -> Result<FilterSpec> {
    if order != 2 && order != 4 {
        return Err(Error::Contract(format!(
            "Lagrange post-processing order must be 2 or 4, got {order}"
        )));
    }
    FilterSpec::lagrange(order, 1.0)
}

/// One pass of the two-step filter with Lagrange weights on both steps.
pub fn postprocess_lagrange(u: &[f64], order: usize, bc: BoundaryKind) -> Result<Vec<f64>> {
    let spec = lagrange_order(order)?;
    physical_filter(u, &spec, &spec, bc)
}

/// Index `s` of the steepest jump `|u_{s+1} - u_s|`.
pub fn steepest_jump(u: &[f64]) -> Option<usize> {
    u.windows(2)
        .enumerate()
        .map(|(i, p)| (i, (p[1] - p[0]).abs()))
        .fold(None, |best: Option<(usize, f64)>, (i, d)| match best {
            Some((_, bd)) if bd >= d => best,
            _ => Some((i, d)),
        })
        .map(|(i, _)| i)
}

/// Lagrange-4 post-processing restricted to the samples within
/// `window_halfwidth` of the steepest jump; all other samples are untouched.
pub fn local_filter_near_shock(u: &[f64], window_halfwidth: usize) -> Result<Vec<f64>> {
    local_filter_near_shock_with(u, window_halfwidth, 4, BoundaryKind::Mirror)
}

pub fn local_filter_near_shock_with(
    u: &[f64],
    window_halfwidth: usize,
    order: usize,
    bc: BoundaryKind,
) -> Result<Vec<f64>> {
    if window_halfwidth == 0 {
        return Err(Error::Contract("window half-width must be at least 1".into()));
    }
    let Some(s) = steepest_jump(u) else {
        return Ok(u.to_vec());
    };
    filter_window(u, s, window_halfwidth, order, bc)
}

/// Lagrange post-processing of the samples `[s - (w - 1), s + w]` around the
/// jump between `s` and `s + 1`.
pub fn filter_window(u: &[f64], s: usize, window_halfwidth: usize, order: usize, bc: BoundaryKind) -> Result<Vec<f64>> {
    if u.is_empty() || s >= u.len() {
        return Err(Error::Contract("window centre outside the lane".into()));
    }
    let filtered = postprocess_lagrange(u, order, bc)?;
    let lo = s.saturating_sub(window_halfwidth.saturating_sub(1));
    let hi = (s + window_halfwidth).min(u.len() - 1);
    let mut out = u.to_vec();
    out[lo..=hi].copy_from_slice(&filtered[lo..=hi]);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn ghost_rules() {
        use BoundaryKind::*;
        let g = |i, lo, hi| ghost_source(i, 4, lo, hi).unwrap().index;
        assert_eq!(g(-1, Periodic, Periodic), 3);
        assert_eq!(g(5, Periodic, Periodic), 1);
        assert_eq!(g(-1, Mirror, Mirror), 0);
        assert_eq!(g(-2, Mirror, Mirror), 1);
        assert_eq!(g(4, Mirror, Mirror), 3);
        assert_eq!(g(-1, Reflective, Reflective), 1);
        assert_eq!(g(4, Reflective, Reflective), 2);
        assert_eq!(g(-7, Outflow, Outflow), 0);
        assert_eq!(g(9, Outflow, Mirror), 0);
        assert_eq!(g(6, Outflow, Mirror), 1);
        assert!(ghost_source(-1, 4, Periodic, Mirror).is_err());
        let s = ghost_source(-2, 4, Reflective, Outflow).unwrap();
        assert!(s.low_odd && !s.high_odd);
    }

    #[test]
    fn total_variation_examples() {
        assert_eq!(total_variation(&[2.0; 5], false), 0.0);
        let ramp: Vec<f64> = (0..11).map(|i| i as f64 / 10.0).collect();
        assert!((total_variation(&ramp, false) - 1.0).abs() < 1e-15);
        assert_eq!(total_variation(&[0.0, 1.0, 0.0, 1.0], false), 3.0);
        assert_eq!(total_variation(&[0.0, 1.0, 0.0, 1.0], true), 4.0);
    }

    #[test]
    fn sensor_examples() {
        let cfg = SensorConfig::new(1.0001, MonitoredField::Scalar).unwrap();
        assert!(!sensor_should_filter(1.0, 1.0, &cfg));
        assert!(sensor_should_filter(1.0, 1.01, &cfg));
        assert!(!sensor_should_filter(0.0, 0.0, &cfg));
        assert!(sensor_should_filter(0.0, 1e-3, &cfg));
        assert!(SensorConfig::new(1.0, MonitoredField::Density).is_err());
    }

    #[test]
    fn constant_preserved_by_rsk_halfshift() {
        let spec = FilterSpec::rsk(32, 3.2, 0.1).unwrap();
        let mids = predict_midpoints(&[1.0; 64], &spec, BoundaryKind::Periodic).unwrap();
        assert!(mids.values.iter().all(|v| (v - 1.0).abs() < 1e-10));
        let nodes = reconstruct_nodes(&mids, &spec, 64).unwrap();
        assert!(nodes.iter().all(|v| (v - 1.0).abs() < 1e-10));
    }

    #[test]
    fn lagrange_midpoints_exact_for_linear() {
        let spec = FilterSpec::lagrange(2, 0.5).unwrap();
        let u: Vec<f64> = (0..16).map(|i| 3.0 - 0.25 * i as f64).collect();
        let mids = predict_midpoints(&u, &spec, BoundaryKind::Outflow).unwrap();
        // interior midpoints only: the constant-extrapolated ghosts are not linear
        for k in 1..13 {
            let idx = (k - mids.first) as usize;
            assert!((mids.values[idx] - (3.0 - 0.25 * (k as f64 + 0.5))).abs() < 1e-12);
        }
    }

    #[test]
    fn midpoints_of_a_mode() {
        let n = 64;
        let l = 2.0;
        let dx = l / n as f64;
        let spec = FilterSpec::rsk(32, 2.0, dx).unwrap();
        let u: Vec<f64> = (0..n).map(|i| (2.0 * PI * i as f64 * dx / l).sin()).collect();
        let mids = predict_midpoints(&u, &spec, BoundaryKind::Periodic).unwrap();
        let h = crate::kernels::halfshift_response(&spec, &[2.0 * PI / l])[0];
        for (i, m) in mids.values.iter().enumerate() {
            let x = (i as f64 + 0.5) * dx;
            assert!((m - h * (2.0 * PI * x / l).sin()).abs() < 1e-8);
        }
    }

    #[test]
    fn reconstruct_range_checked() {
        let narrow = FilterSpec::rsk(2, 1.0, 1.0).unwrap();
        let wide = FilterSpec::rsk(6, 1.0, 1.0).unwrap();
        let mids = predict_midpoints(&[1.0; 10], &narrow, BoundaryKind::Mirror).unwrap();
        assert!(matches!(reconstruct_nodes(&mids, &wide, 10), Err(Error::Contract(_))));
    }

    #[test]
    fn reflective_symmetric_field_stays_symmetric() {
        let spec = FilterSpec::rsk(8, 1.5, 1.0).unwrap();
        let n = 21;
        let u: Vec<f64> = (0..n)
            .map(|i| {
                let x = i as f64 - 10.0;
                (-(x * x) / 8.0).exp() + if x.abs() < 3.0 { 0.5 } else { 0.0 }
            })
            .collect();
        let f = physical_filter(&u, &spec, &spec, BoundaryKind::Reflective).unwrap();
        for i in 0..n {
            assert!((f[i] - f[n - 1 - i]).abs() < 1e-12);
        }
    }

    #[test]
    fn postprocess_rejects_other_orders() {
        assert!(postprocess_lagrange(&[0.0; 8], 3, BoundaryKind::Mirror).is_err());
    }

    #[test]
    fn quadratic_survives_lagrange4_in_interior() {
        let u: Vec<f64> = (0..40).map(|i| 0.5 + 0.1 * i as f64 - 0.003 * (i * i) as f64).collect();
        let f = postprocess_lagrange(&u, 4, BoundaryKind::Outflow).unwrap();
        for i in 8..32 {
            assert!((f[i] - u[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn local_filter_leaves_far_field_bit_identical() {
        let mut u: Vec<f64> = (0..100).map(|i| if i < 50 { 1.0 } else { 0.0 }).collect();
        for (i, v) in u.iter_mut().enumerate() {
            *v += 1e-3 * (0.7 * i as f64).sin();
        }
        let f = local_filter_near_shock(&u, 6).unwrap();
        for i in (0..44).chain(56..100) {
            assert_eq!(f[i].to_bits(), u[i].to_bits());
        }
        let whole = local_filter_near_shock(&u, 200).unwrap();
        assert_eq!(whole, postprocess_lagrange(&u, 4, BoundaryKind::Mirror).unwrap());
    }
}
