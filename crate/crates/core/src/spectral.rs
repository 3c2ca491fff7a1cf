//! Fourier transforms, filtered spectral differentiation and symmetric
//! domain extension.
//!
//! Coefficients use the `Δ`-scaled convention
//! `û(ω_n) = Δ Σ_j u(x_j) e^{-i ω_n x_j}` with inverse
//! `u(x_j) = (1/L) Σ_n û(ω_n) e^{i ω_n x_j}`, `ω_n = 2πn/L`.
//! Spectra are stored in transform order: `n = 0, 1, .., N/2 - 1, -N/2, .., -1`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Arc;

use ndarray::{Array2, Axis as NdAxis};
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// One coordinate direction of a uniform grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    start: f64,
    spacing: f64,
    points: usize,
    periodic: bool,
}

impl Axis {
    /// `points` samples `start + jΔ`, `Δ = extent / points`, wrapping at `start + extent`.
    pub fn periodic(start: f64, extent: f64, points: usize) -> Result<Self> {
        if points < 4 || !points.is_multiple_of(2) {
            return Err(Error::Contract(format!(
                "periodic axis needs an even point count >= 4, got {points}"
            )));
        }
        if !(extent > 0.0 && extent.is_finite() && start.is_finite()) {
            return Err(Error::Contract(format!("bad periodic extent {extent}")));
        }
        Ok(Axis {
            start,
            spacing: extent / points as f64,
            points,
            periodic: true,
        })
    }

    /// `points` samples including both end points of `[start, end]`.
    pub fn nodal(start: f64, end: f64, points: usize) -> Result<Self> {
        if points < 2 {
            return Err(Error::Contract(format!("nodal axis needs >= 2 points, got {points}")));
        }
        if !(end > start && start.is_finite() && end.is_finite()) {
            return Err(Error::Contract(format!("bad interval [{start}, {end}]")));
        }
        Ok(Axis {
            start,
            spacing: (end - start) / (points - 1) as f64,
            points,
            periodic: false,
        })
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic
    }

    /// Period length for periodic axes, covered interval otherwise.
    pub fn extent(&self) -> f64 {
        if self.periodic {
            self.spacing * self.points as f64
        } else {
            self.spacing * (self.points - 1) as f64
        }
    }

    pub fn coord(&self, i: usize) -> f64 {
        self.start + i as f64 * self.spacing
    }

    pub fn coords(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.coord(i)).collect()
    }
}

/// Uniform tensor-product grid in one or two dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    axes: Vec<Axis>,
}

impl Grid {
    pub fn one_d(x: Axis) -> Self {
        Grid { axes: vec![x] }
    }

    pub fn two_d(x: Axis, y: Axis) -> Self {
        Grid { axes: vec![x, y] }
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axis(&self, k: usize) -> &Axis {
        &self.axes[k]
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    /// Array shape `(nx, ny)`; one-dimensional grids use `ny = 1`.
    pub fn shape(&self) -> (usize, usize) {
        match self.axes.len() {
            1 => (self.axes[0].points, 1),
            _ => (self.axes[0].points, self.axes[1].points),
        }
    }

    pub fn min_spacing(&self) -> f64 {
        self.axes.iter().map(|a| a.spacing).fold(f64::INFINITY, f64::min)
    }
}

/// Samples of a real field on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    values: Array2<f64>,
}

impl SpectralField {
    pub fn new(grid: Grid, values: Array2<f64>) -> Result<Self> {
        if values.dim() != grid.shape() {
            return Err(Error::Contract(format!(
                "samples of shape {:?} on a grid of shape {:?}",
                values.dim(),
                grid.shape()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Data("non-finite sample".into()));
        }
        Ok(SpectralField { grid, values })
    }

    pub fn from_samples(axis: Axis, samples: Vec<f64>) -> Result<Self> {
        let n = samples.len();
        let values = Array2::from_shape_vec((n, 1), samples).map_err(|e| Error::Contract(e.to_string()))?;
        Self::new(Grid::one_d(axis), values)
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let (nx, ny) = grid.shape();
        let x = grid.axis(0).coords();
        let y = if grid.dim() > 1 {
            grid.axis(1).coords()
        } else {
            vec![0.0]
        };
        let values = Array2::from_shape_fn((nx, ny), |(i, j)| f(x[i], y[j]));
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn into_values(self) -> Array2<f64> {
        self.values
    }

    /// Samples of a one-dimensional field.
    pub fn samples(&self) -> Vec<f64> {
        self.values.iter().copied().collect()
    }

    pub fn mean(&self) -> f64 {
        self.values.mean().unwrap_or(0.0)
    }
}

/// Angular wavenumbers of a length-`m` transform with sample spacing `spacing`.
pub fn wavenumbers(m: usize, spacing: f64) -> Vec<f64> {
    let extent = m as f64 * spacing;
    (0..m)
        .map(|k| {
            let n = if k < m / 2 { k as i64 } else { k as i64 - m as i64 };
            2.0 * PI * n as f64 / extent
        })
        .collect()
}

type PlanPair = (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>);

/// Shared FFT plans keyed by transform length.
pub struct FftPlans {
    planner: FftPlanner<f64>,
    plans: HashMap<usize, PlanPair>,
}

impl Default for FftPlans {
    fn default() -> Self {
        FftPlans {
            planner: FftPlanner::new(),
            plans: HashMap::new(),
        }
    }
}

impl FftPlans {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&mut self, len: usize) -> (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>) {
        let planner = &mut self.planner;
        self.plans
            .entry(len)
            .or_insert_with(|| (planner.plan_fft_forward(len), planner.plan_fft_inverse(len)))
            .clone()
    }
}

impl std::fmt::Debug for FftPlans {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FftPlans")
            .field("lengths", &self.plans.keys().collect::<Vec<_>>())
            .finish()
    }
}

/// A diagonal Fourier multiplier on lanes of a fixed length.
///
/// The multiplier must map real lanes to real lanes (even real part, odd
/// imaginary part, real at the Nyquist index), which lets two real lanes be
/// processed in one complex transform.
pub struct LaneOperator {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    multiplier: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl LaneOperator {
    pub fn new(plans: &mut FftPlans, multiplier: Vec<Complex64>) -> Self {
        let (forward, inverse) = plans.get(multiplier.len());
        let scratch_len = forward.get_inplace_scratch_len().max(inverse.get_inplace_scratch_len());
        let len = multiplier.len() as f64;
        let multiplier = multiplier.into_iter().map(|m| m / len).collect();
        LaneOperator {
            forward,
            inverse,
            multiplier,
            scratch: vec![Complex64::default(); scratch_len],
        }
    }

    /// `i ω η(ω)` with the Nyquist entry zeroed.
    pub fn derivative(plans: &mut FftPlans, len: usize, spacing: f64, response: impl Fn(f64) -> f64) -> Self {
        let mult = wavenumbers(len, spacing)
            .into_iter()
            .enumerate()
            .map(|(k, w)| {
                if len.is_multiple_of(2) && k == len / 2 {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(0.0, w * response(w))
                }
            })
            .collect();
        Self::new(plans, mult)
    }

    /// Real response `η(ω)`.
    pub fn filter(plans: &mut FftPlans, len: usize, spacing: f64, response: impl Fn(f64) -> f64) -> Self {
        let mult = wavenumbers(len, spacing)
            .into_iter()
            .map(|w| Complex64::new(response(w), 0.0))
            .collect();
        Self::new(plans, mult)
    }

    pub fn len(&self) -> usize {
        self.multiplier.len()
    }

    pub fn is_empty(&self) -> bool {
        self.multiplier.is_empty()
    }

    /// Apply the multiplier in place.
    pub fn apply(&mut self, lane: &mut [Complex64]) {
        debug_assert_eq!(lane.len(), self.multiplier.len());
        self.forward.process_with_scratch(lane, &mut self.scratch);
        for (v, m) in lane.iter_mut().zip(&self.multiplier) {
            *v *= m;
        }
        self.inverse.process_with_scratch(lane, &mut self.scratch);
    }
}

/// How an extended sample relates to the physical sample it copies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Image {
    Direct,
    /// Mirrored across the low end.
    Low,
    /// Mirrored across the high end.
    High,
    /// Mirrored across the high end, then across the image of the low end.
    HighLow,
}

/// Symmetry used to turn a non-periodic lane into a periodic one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetry {
    Periodic,
    /// Mirror planes half a cell beyond the end samples: `[a b c] -> [a b c c b a]`.
    HalfSample,
    /// Mirror planes through the end samples: `[a b c] -> [a b c b]`.
    WholeSample,
}

/// Index map from an extended periodic lane back to the physical lane.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extension {
    sources: Vec<(usize, Image)>,
    points: usize,
}

impl Extension {
    /// `distinct_ends` requests a four-fold extension so that the two ends may
    /// use different ghost rules.
    pub fn new(points: usize, symmetry: Symmetry, distinct_ends: bool) -> Result<Self> {
        let n = points;
        let mut sources: Vec<(usize, Image)> = (0..n).map(|i| (i, Image::Direct)).collect();
        match symmetry {
            Symmetry::Periodic => {}
            Symmetry::HalfSample => {
                sources.extend((0..n).rev().map(|i| (i, Image::High)));
                if distinct_ends {
                    sources.extend((0..n).map(|i| (i, Image::HighLow)));
                    sources.extend((0..n).rev().map(|i| (i, Image::Low)));
                }
            }
            Symmetry::WholeSample => {
                if n < 3 {
                    return Err(Error::Contract("whole-sample extension needs >= 3 points".into()));
                }
                if distinct_ends {
                    sources.extend((0..n - 1).rev().map(|i| (i, Image::High)));
                    sources.extend((1..n).map(|i| (i, Image::HighLow)));
                    sources.extend((1..n - 1).rev().map(|i| (i, Image::Low)));
                } else {
                    sources.extend((1..n - 1).rev().map(|i| (i, Image::High)));
                }
            }
        }
        Ok(Extension { sources, points })
    }

    pub fn len(&self) -> usize {
        self.sources.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sources.is_empty()
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn sources(&self) -> &[(usize, Image)] {
        &self.sources
    }

    /// Even extension of `values` (all images copy their source unchanged).
    pub fn even(&self, values: &[f64]) -> Vec<f64> {
        self.sources.iter().map(|&(i, _)| values[i]).collect()
    }
}

fn lane_axis(field: &SpectralField, axis: usize) -> Result<NdAxis> {
    if axis >= field.grid.dim() {
        return Err(Error::Contract(format!(
            "axis {axis} out of range for a {}-d field",
            field.grid.dim()
        )));
    }
    Ok(NdAxis(axis))
}

/// Δ-scaled Fourier coefficients of a field on a periodic grid.
pub fn dft_coefficients(field: &SpectralField) -> Result<Array2<Complex64>> {
    if field.grid.axes().iter().any(|a| !a.periodic) {
        return Err(Error::Contract("dft_coefficients requires a periodic grid".into()));
    }
    if field.values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Data("non-finite sample".into()));
    }
    let mut plans = FftPlans::new();
    let mut out = field.values.mapv(|v| Complex64::new(v, 0.0));
    for (k, axis) in field.grid.axes().iter().enumerate() {
        let (fwd, _) = plans.get(axis.points);
        let omegas = wavenumbers(axis.points, axis.spacing);
        let mut buf = vec![Complex64::default(); axis.points];
        for mut lane in out.lanes_mut(NdAxis(k)) {
            for (b, v) in buf.iter_mut().zip(lane.iter()) {
                *b = *v;
            }
            fwd.process(&mut buf);
            for ((v, b), w) in lane.iter_mut().zip(&buf).zip(&omegas) {
                // phase for grids that do not start at the origin
                let phase = Complex64::from_polar(1.0, -w * axis.start);
                *v = b * phase * axis.spacing;
            }
        }
    }
    Ok(out)
}

/// Inverse of [`dft_coefficients`]; the imaginary part is discarded.
pub fn field_from_coefficients(grid: &Grid, coeffs: &Array2<Complex64>) -> Result<SpectralField> {
    if coeffs.dim() != grid.shape() {
        return Err(Error::Contract("coefficient shape does not match grid".into()));
    }
    let mut plans = FftPlans::new();
    let mut data = coeffs.clone();
    for (k, axis) in grid.axes().iter().enumerate() {
        let (_, inv) = plans.get(axis.points);
        let omegas = wavenumbers(axis.points, axis.spacing);
        let mut buf = vec![Complex64::default(); axis.points];
        let scale = 1.0 / axis.extent();
        for mut lane in data.lanes_mut(NdAxis(k)) {
            for ((b, v), w) in buf.iter_mut().zip(lane.iter()).zip(&omegas) {
                *b = v * Complex64::from_polar(1.0, w * axis.start);
            }
            inv.process(&mut buf);
            for (v, b) in lane.iter_mut().zip(&buf) {
                *v = b * scale;
            }
        }
    }
    SpectralField::new(grid.clone(), data.mapv(|c| c.re))
}

/// Apply a real Fourier multiplier along one axis of `values`.
///
/// Non-periodic axes are even-extended with `symmetry`, transformed, and
/// restricted back to the physical samples.
pub fn apply_along_axis(values: &mut Array2<f64>, axis: usize, extension: &Extension, op: &mut LaneOperator) {
    let len = extension.len();
    debug_assert_eq!(len, op.len());
    let mut buf = vec![Complex64::default(); len];
    let mut lanes: Vec<_> = values.lanes_mut(NdAxis(axis)).into_iter().collect();
    let mut k = 0;
    while k < lanes.len() {
        let pair = k + 1 < lanes.len();
        for (b, &(src, _)) in buf.iter_mut().zip(extension.sources()) {
            let im = if pair { lanes[k + 1][src] } else { 0.0 };
            *b = Complex64::new(lanes[k][src], im);
        }
        op.apply(&mut buf);
        for i in 0..extension.points() {
            lanes[k][i] = buf[i].re;
            if pair {
                lanes[k + 1][i] = buf[i].im;
            }
        }
        k += 2;
    }
}

fn extension_for(axis: &Axis) -> Result<Extension> {
    if axis.periodic {
        Extension::new(axis.points, Symmetry::Periodic, false)
    } else {
        Extension::new(axis.points, Symmetry::HalfSample, false)
    }
}

fn check_response(field: &SpectralField, response: &[f64]) -> Result<()> {
    for axis in field.grid.axes() {
        let len = extension_for(axis)?.len();
        if response.len() != len {
            return Err(Error::Contract(format!(
                "response has {} entries, transform length is {len}",
                response.len()
            )));
        }
    }
    if response.iter().any(|v| !v.is_finite()) {
        return Err(Error::Data("non-finite response".into()));
    }
    Ok(())
}

fn response_operator(plans: &mut FftPlans, response: &[f64], derivative_of: Option<f64>) -> LaneOperator {
    let len = response.len();
    match derivative_of {
        None => LaneOperator::new(plans, response.iter().map(|&r| Complex64::new(r, 0.0)).collect()),
        Some(spacing) => {
            let mult = wavenumbers(len, spacing)
                .into_iter()
                .zip(response)
                .enumerate()
                .map(|(k, (w, r))| {
                    if k == len / 2 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        Complex64::new(0.0, w * r)
                    }
                })
                .collect();
            LaneOperator::new(plans, mult)
        }
    }
}

/// Windowed Fourier filtering: multiply the spectrum by `response` (transform
/// order) along every axis.
///
/// Non-periodic axes are even-extended to twice their length first, so the
/// response must then have `2N` entries.
pub fn filter_fourier(field: &SpectralField, response: &[f64]) -> Result<SpectralField> {
    check_response(field, response)?;
    let mut plans = FftPlans::new();
    let mut values = field.values.clone();
    for (k, axis) in field.grid.axes().iter().enumerate() {
        let ext = extension_for(axis)?;
        let mut op = response_operator(&mut plans, response, None);
        apply_along_axis(&mut values, k, &ext, &mut op);
    }
    SpectralField::new(field.grid.clone(), values)
}

/// Filtered spectral derivative along `axis`; `response` covers that axis only.
pub fn diff_filtered(field: &SpectralField, response: &[f64], axis: usize) -> Result<SpectralField> {
    let nd = lane_axis(field, axis)?;
    let ax = field.grid.axis(axis);
    let ext = extension_for(ax)?;
    if response.len() != ext.len() {
        return Err(Error::Contract(format!(
            "response has {} entries, transform length is {}",
            response.len(),
            ext.len()
        )));
    }
    let mut plans = FftPlans::new();
    let mut op = response_operator(&mut plans, response, Some(ax.spacing));
    let mut values = field.values.clone();
    apply_along_axis(&mut values, nd.index(), &ext, &mut op);
    SpectralField::new(field.grid.clone(), values)
}

/// Plain spectral derivative (`η ≡ 1`).
pub fn differentiate(field: &SpectralField, axis: usize) -> Result<SpectralField> {
    let ax = field.grid.axis(lane_axis(field, axis)?.index());
    let len = extension_for(ax)?.len();
    diff_filtered(field, &vec![1.0; len], axis)
}

/// Even (half-sample) mirror extension along `axis` onto a periodic grid of twice the length.
pub fn mirror_extend(field: &SpectralField, axis: usize) -> Result<SpectralField> {
    let nd = lane_axis(field, axis)?;
    let ax = field.grid.axis(axis);
    let n = ax.points;
    let ext = Extension::new(n, Symmetry::HalfSample, false)?;
    let doubled = Axis::periodic(ax.start, 2.0 * n as f64 * ax.spacing, 2 * n)?;
    let mut axes = field.grid.axes().to_vec();
    axes[axis] = doubled;
    let grid = Grid { axes };
    let mut values = Array2::zeros(grid.shape());
    for (src, mut dst) in field.values.lanes(nd).into_iter().zip(values.lanes_mut(nd)) {
        for (d, &(i, _)) in dst.iter_mut().zip(ext.sources()) {
            *d = src[i];
        }
    }
    SpectralField::new(grid, values)
}

/// Keep the first `points` samples along `axis`.
pub fn restrict(field: &SpectralField, axis: usize, template: &Axis) -> Result<SpectralField> {
    let nd = lane_axis(field, axis)?;
    let mut axes = field.grid.axes().to_vec();
    axes[axis] = *template;
    let grid = Grid { axes };
    let values = field
        .values
        .slice_axis(nd, ndarray::Slice::from(0..template.points))
        .to_owned();
    SpectralField::new(grid, values)
}

/// Closed-form RSK response sampled on the transform wavenumbers of a lane.
pub fn sampled_response(len: usize, spacing: f64, response: impl Fn(f64) -> f64) -> Vec<f64> {
    wavenumbers(len, spacing).into_iter().map(response).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn periodic_field(n: usize, extent: f64, f: impl Fn(f64) -> f64) -> SpectralField {
        let axis = Axis::periodic(0.0, extent, n).unwrap();
        SpectralField::from_samples(axis, axis.coords().into_iter().map(f).collect()).unwrap()
    }

    #[test]
    fn axis_validation() {
        assert!(Axis::periodic(0.0, 1.0, 7).is_err());
        assert!(Axis::periodic(0.0, 1.0, 2).is_err());
        assert!(Axis::nodal(1.0, 0.0, 5).is_err());
        let a = Axis::periodic(0.0, 2.0, 64).unwrap();
        assert!((a.spacing() * 64.0 - 2.0).abs() < 1e-15);
        let b = Axis::nodal(-1.0, 3.0, 129).unwrap();
        assert_eq!(b.spacing(), 1.0 / 32.0);
        assert_eq!(b.coord(128), 3.0);
    }

    #[test]
    fn constant_has_single_coefficient() {
        let f = periodic_field(16, 3.0, |_| 2.5);
        let c = dft_coefficients(&f).unwrap();
        assert!((c[[0, 0]].re - 2.5 * 3.0).abs() < 1e-12);
        for k in 1..16 {
            assert!(c[[k, 0]].norm() < 1e-12);
        }
    }

    #[test]
    fn sine_coefficients() {
        let l = 2.0;
        let f = periodic_field(32, l, |x| (2.0 * PI * x / l).sin());
        let c = dft_coefficients(&f).unwrap();
        assert!((c[[1, 0]] - Complex64::new(0.0, -l / 2.0)).norm() < 1e-12);
        assert!((c[[31, 0]] - Complex64::new(0.0, l / 2.0)).norm() < 1e-12);
        for k in 2..31 {
            assert!(c[[k, 0]].norm() < 1e-12);
        }
    }

    #[test]
    fn non_finite_samples_rejected() {
        let axis = Axis::periodic(0.0, 1.0, 4).unwrap();
        assert!(matches!(
            SpectralField::from_samples(axis, vec![0.0, f64::NAN, 0.0, 0.0]),
            Err(Error::Data(_))
        ));
    }

    #[test]
    fn derivative_of_sine() {
        let l = 2.0 * PI;
        for k in [1.0, 3.0, 7.0] {
            let f = periodic_field(32, l, |x| (k * x).sin());
            let d = differentiate(&f, 0).unwrap();
            let x = f.grid().axis(0).coords();
            for (i, v) in d.samples().iter().enumerate() {
                assert!((v - k * (k * x[i]).cos()).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn mirror_extension_layout() {
        let axis = Axis::nodal(0.0, 3.0, 4).unwrap();
        let f = SpectralField::from_samples(axis, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let e = mirror_extend(&f, 0).unwrap();
        assert_eq!(e.samples(), vec![1.0, 2.0, 3.0, 4.0, 4.0, 3.0, 2.0, 1.0]);
        let back = restrict(&e, 0, &axis).unwrap();
        assert_eq!(back.samples(), f.samples());
    }

    #[test]
    fn whole_sample_and_fourfold_layouts() {
        let whole = Extension::new(4, Symmetry::WholeSample, false).unwrap();
        let idx: Vec<usize> = whole.sources().iter().map(|s| s.0).collect();
        assert_eq!(idx, vec![0, 1, 2, 3, 2, 1]);
        let four = Extension::new(4, Symmetry::WholeSample, true).unwrap();
        let idx: Vec<usize> = four.sources().iter().map(|s| s.0).collect();
        assert_eq!(idx, vec![0, 1, 2, 3, 2, 1, 0, 1, 2, 3, 2, 1]);
        let half4 = Extension::new(3, Symmetry::HalfSample, true).unwrap();
        let idx: Vec<usize> = half4.sources().iter().map(|s| s.0).collect();
        assert_eq!(idx, vec![0, 1, 2, 2, 1, 0, 0, 1, 2, 2, 1, 0]);
        assert_eq!(half4.sources()[6].1, Image::HighLow);
        assert_eq!(half4.sources()[11].1, Image::Low);
    }

    #[test]
    fn two_dimensional_derivative() {
        let ax = Axis::periodic(0.0, 2.0 * PI, 16).unwrap();
        let ay = Axis::periodic(0.0, 2.0 * PI, 8).unwrap();
        let f = SpectralField::from_fn(Grid::two_d(ax, ay), |x, y| x.sin() * (2.0 * y).cos()).unwrap();
        let dy = differentiate(&f, 1).unwrap();
        let expected = SpectralField::from_fn(f.grid().clone(), |x, y| -2.0 * x.sin() * (2.0 * y).sin()).unwrap();
        let err = (dy.values() - expected.values())
            .mapv(f64::abs)
            .fold(0.0_f64, |a, &b| a.max(b));
        assert!(err < 1e-12);
    }
}
