//! Delta-type kernels used as lowpass filters.
//!
//! Two families are provided: the regularized Shannon kernel (a sinc
//! interpolant under a Gaussian window of width `sigma = r * spacing`) and
//! the Lagrange interpolation kernel. Both are used through their half-shift
//! weights, which interpolate nodal values to cell midpoints, and through
//! their Fourier-domain magnitude responses.

use std::f64::consts::{PI, SQRT_2};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelFamily {
    Rsk,
    Lagrange,
}

/// Complete description of a lowpass filter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterSpec {
    family: KernelFamily,
    half_width: usize,
    ratio: f64,
    spacing: f64,
}

/// Half-width used for physical-domain RSK filtering unless overridden.
pub const DEFAULT_HALF_WIDTH: usize = 32;

impl FilterSpec {
    pub fn rsk(half_width: usize, ratio: f64, spacing: f64) -> Result<Self> {
        if !(ratio > 0.0 && ratio.is_finite()) {
            return Err(Error::Contract(format!("ratio must be positive, got {ratio}")));
        }
        Self::checked(KernelFamily::Rsk, half_width, ratio, spacing)
    }

    /// Lagrange filter with `half_width` points on each side of a midpoint.
    pub fn lagrange(half_width: usize, spacing: f64) -> Result<Self> {
        Self::checked(KernelFamily::Lagrange, half_width, f64::NAN, spacing)
    }

    fn checked(family: KernelFamily, half_width: usize, ratio: f64, spacing: f64) -> Result<Self> {
        if half_width == 0 {
            return Err(Error::Contract("half width must be at least 1".into()));
        }
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::Contract(format!("spacing must be positive, got {spacing}")));
        }
        Ok(FilterSpec {
            family,
            half_width,
            ratio,
            spacing,
        })
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    /// `sigma / spacing`; NaN for the Lagrange family.
    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn sigma(&self) -> f64 {
        self.ratio * self.spacing
    }

    /// Same filter on a different grid spacing.
    pub fn with_spacing(&self, spacing: f64) -> Result<Self> {
        Self::checked(self.family, self.half_width, self.ratio, spacing)
    }

    /// Same family and width with a different ratio.
    pub fn with_ratio(&self, ratio: f64) -> Result<Self> {
        match self.family {
            KernelFamily::Rsk => Self::rsk(self.half_width, ratio, self.spacing),
            KernelFamily::Lagrange => Ok(*self),
        }
    }
}

/// Regularized Shannon kernel evaluated at `offset` from its centre.
pub fn rsk_value(offset: f64, spec: &FilterSpec) -> Result<f64> {
    if spec.family != KernelFamily::Rsk {
        return Err(Error::Contract("rsk_value requires an RSK filter".into()));
    }
    if !offset.is_finite() {
        return Err(Error::Domain(format!("non-finite offset {offset}")));
    }
    Ok(rsk_unchecked(offset, spec.spacing, spec.sigma()))
}

fn rsk_unchecked(offset: f64, spacing: f64, sigma: f64) -> f64 {
    let window = (-offset * offset / (2.0 * sigma * sigma)).exp();
    if offset == 0.0 {
        return 1.0;
    }
    let arg = PI * offset / spacing;
    arg.sin() / arg * window
}

/// Lagrange cardinal polynomial for node `j` of the stencil `x_k = k * spacing`,
/// `k = -W..=W`, evaluated at `x`.
pub fn lagrange_weight(j: i64, x: f64, spec: &FilterSpec) -> Result<f64> {
    if spec.family != KernelFamily::Lagrange {
        return Err(Error::Contract("lagrange_weight requires a Lagrange filter".into()));
    }
    let w = spec.half_width as i64;
    if j < -w || j > w {
        return Err(Error::Domain(format!("node {j} outside [-{w}, {w}]")));
    }
    if !x.is_finite() {
        return Err(Error::Domain(format!("non-finite position {x}")));
    }
    let nodes: Vec<f64> = (-w..=w).map(|k| k as f64 * spec.spacing).collect();
    Ok(cardinal(&nodes, (j + w) as usize, x))
}

fn cardinal(nodes: &[f64], j: usize, x: f64) -> f64 {
    let xj = nodes[j];
    nodes
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != j)
        .map(|(_, &xk)| (x - xk) / (xj - xk))
        .product()
}

/// Weights `w[m]` applied to the samples at offsets `±(m + 1/2) * spacing`
/// when interpolating to a midpoint, `m = 0..W`. They sum to one over both sides.
pub fn halfshift_weights(spec: &FilterSpec) -> Vec<f64> {
    let w = spec.half_width;
    let mut weights: Vec<f64> = match spec.family {
        KernelFamily::Rsk => (0..w)
            .map(|m| rsk_unchecked((m as f64 + 0.5) * spec.spacing, spec.spacing, spec.sigma()))
            .collect(),
        KernelFamily::Lagrange => {
            // Nodes at half-integer offsets, symmetric about the midpoint.
            let nodes: Vec<f64> = (0..2 * w).map(|k| k as f64 - w as f64 + 0.5).collect();
            (0..w).map(|m| cardinal(&nodes, w + m, 0.0)).collect()
        }
    };
    let total: f64 = 2.0 * weights.iter().sum::<f64>();
    for v in &mut weights {
        *v /= total;
    }
    weights
}

/// Magnitude response of the half-shift interpolation at angular wavenumber `omega`.
pub fn halfshift_response_at(weights: &[f64], spacing: f64, omega: f64) -> f64 {
    weights
        .iter()
        .enumerate()
        .map(|(m, w)| 2.0 * w * ((m as f64 + 0.5) * omega * spacing).cos())
        .sum()
}

pub fn halfshift_response(spec: &FilterSpec, wavenumbers: &[f64]) -> Vec<f64> {
    let weights = halfshift_weights(spec);
    wavenumbers
        .iter()
        .map(|&w| halfshift_response_at(&weights, spec.spacing, w))
        .collect()
}

/// Continuous Fourier image of the RSK, normalized to one at zero wavenumber.
pub fn rsk_response(spec: &FilterSpec, wavenumbers: &[f64]) -> Result<Vec<f64>> {
    if spec.family != KernelFamily::Rsk {
        return Err(Error::Contract("rsk_response requires an RSK filter".into()));
    }
    let response = RskResponse::new(spec);
    Ok(wavenumbers.iter().map(|&w| response.at(w)).collect())
}

/// Precomputed closed-form RSK response.
#[derive(Debug, Clone, Copy)]
pub struct RskResponse {
    scale: f64,
    band: f64,
    norm: f64,
}

impl RskResponse {
    pub fn new(spec: &FilterSpec) -> Self {
        let scale = spec.sigma() / SQRT_2;
        let band = PI / spec.spacing;
        RskResponse {
            scale,
            band,
            norm: libm::erf(scale * band),
        }
    }

    pub fn at(&self, omega: f64) -> f64 {
        if omega == 0.0 {
            return 1.0;
        }
        let a = libm::erf(self.scale * (self.band - omega));
        let b = libm::erf(self.scale * (self.band + omega));
        0.5 * (a + b) / self.norm
    }
}

/// Half-shift Lagrange response at `ω_n = 2πn / (N Δ)`, `n = 0..=N/2`.
pub fn lagrange_response(spec: &FilterSpec, n: usize) -> Result<Vec<f64>> {
    if spec.family != KernelFamily::Lagrange {
        return Err(Error::Contract("lagrange_response requires a Lagrange filter".into()));
    }
    if n < 2 {
        return Err(Error::Contract(format!("grid size {n} too small")));
    }
    let extent = n as f64 * spec.spacing;
    let omegas: Vec<f64> = (0..=n / 2).map(|k| 2.0 * PI * k as f64 / extent).collect();
    Ok(halfshift_response(spec, &omegas).into_iter().map(f64::abs).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rsk(r: f64) -> FilterSpec {
        FilterSpec::rsk(DEFAULT_HALF_WIDTH, r, 1.0).unwrap()
    }

    #[test]
    fn rsk_is_interpolatory() {
        let spec = FilterSpec::rsk(8, 3.2, 0.25).unwrap();
        assert_eq!(rsk_value(0.0, &spec).unwrap(), 1.0);
        for k in 1..=8 {
            let x = k as f64 * 0.25;
            assert!(rsk_value(x, &spec).unwrap().abs() < 1e-15);
            assert!(rsk_value(-x, &spec).unwrap().abs() < 1e-15);
        }
    }

    #[test]
    fn rsk_value_matches_series_evaluation() {
        // sinc(pi/2) = 2/pi, window exp(-0.25 / (2 * 3.2^2)); exp by Taylor series.
        let spec = rsk(3.2);
        let arg: f64 = -0.25 / (2.0 * 3.2 * 3.2);
        let (mut term, mut sum) = (1.0_f64, 1.0_f64);
        for k in 1..40 {
            term *= arg / k as f64;
            sum += term;
        }
        let expected = std::f64::consts::FRAC_2_PI * sum;
        assert!((rsk_value(0.5, &spec).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn rsk_rejects_non_finite_offset() {
        assert!(matches!(rsk_value(f64::NAN, &rsk(1.0)), Err(Error::Domain(_))));
        assert!(matches!(rsk_value(f64::INFINITY, &rsk(1.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn rsk_is_even() {
        let spec = rsk(2.1);
        for x in [0.3, 1.7, 4.45, 11.2] {
            assert_eq!(rsk_value(x, &spec).unwrap(), rsk_value(-x, &spec).unwrap());
        }
    }

    #[test]
    fn lagrange_cardinal_properties() {
        let spec = FilterSpec::lagrange(4, 0.5).unwrap();
        for j in -4..=4 {
            for k in -4..=4 {
                let v = lagrange_weight(j, k as f64 * 0.5, &spec).unwrap();
                let expected = if j == k { 1.0 } else { 0.0 };
                assert!((v - expected).abs() < 1e-14);
            }
        }
        for x in [-1.9, -0.33, 0.1, 0.77, 1.4] {
            let s: f64 = (-4..=4).map(|j| lagrange_weight(j, x, &spec).unwrap()).sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
        assert!(matches!(lagrange_weight(5, 0.0, &spec), Err(Error::Domain(_))));
    }

    #[test]
    fn spec_validation() {
        assert!(FilterSpec::rsk(0, 1.0, 1.0).is_err());
        assert!(FilterSpec::rsk(4, 0.0, 1.0).is_err());
        assert!(FilterSpec::rsk(4, 1.0, -1.0).is_err());
        assert!(FilterSpec::lagrange(2, 0.1).is_ok());
    }

    #[test]
    fn rsk_response_basics() {
        let spec = rsk(3.2);
        let v = rsk_response(&spec, &[0.0, 0.2 * PI, -0.2 * PI]).unwrap();
        assert_eq!(v[0], 1.0);
        assert!(v[1] > 0.999);
        assert_eq!(v[1], v[2]);
    }

    #[test]
    fn lagrange_response_endpoints() {
        for w in [1, 2, 4, 8, 16] {
            let spec = FilterSpec::lagrange(w, 0.1).unwrap();
            let resp = lagrange_response(&spec, 64).unwrap();
            assert!((resp[0] - 1.0).abs() < 1e-12);
            assert!(resp[32].abs() < 1e-12);
        }
    }

    #[test]
    fn lagrange_halfshift_reproduces_polynomials() {
        let spec = FilterSpec::lagrange(3, 1.0).unwrap();
        let w = halfshift_weights(&spec);
        // degree <= 5 polynomial sampled at ±(m+1/2), interpolated to 0
        let p = |x: f64| 1.0 - 2.0 * x + 0.5 * x.powi(2) + x.powi(3) - 0.1 * x.powi(5);
        let approx: f64 = w
            .iter()
            .enumerate()
            .map(|(m, wm)| wm * (p(m as f64 + 0.5) + p(-(m as f64) - 0.5)))
            .sum();
        assert!((approx - p(0.0)).abs() < 1e-12);
    }
}
