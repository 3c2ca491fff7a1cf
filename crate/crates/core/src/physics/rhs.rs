//! Pseudospectral right-hand side `-∇·F(U)` with boundary-aware extensions.

use ndarray::Array2;
use rustfft::num_complex::Complex64;

use super::mapping::{Mapping, Metrics};
use super::{Fields, System};
use crate::error::{Error, Result};
use crate::filtering::{ghost_source, BoundaryKind};
use crate::spectral::{Extension, FftPlans, Grid, Image, LaneOperator, Symmetry};

/// How conserved components transform when mirrored across one end of a lane.
#[derive(Debug, Clone, PartialEq)]
pub enum GhostRule {
    Even,
    /// Negate one component (the wall-normal momentum of a straight wall).
    Flip(usize),
    /// Reflect the momentum `(q[1], q[2])` about the given unit normal, one per lane.
    Reflect(Vec<[f64; 2]>),
}

impl GhostRule {
    #[inline]
    /// Transform the components of a point mirrored across this end.
    pub fn reflect(&self, q: &mut [f64], lane: usize) {
        match self {
            GhostRule::Even => {}
            GhostRule::Flip(c) => q[*c] = -q[*c],
            GhostRule::Reflect(normals) => {
                let n = normals[lane];
                let dot = q[1] * n[0] + q[2] * n[1];
                q[1] -= 2.0 * dot * n[0];
                q[2] -= 2.0 * dot * n[1];
            }
        }
    }
}

/// Periodic extension of the lanes along one axis.
#[derive(Debug, Clone, PartialEq)]
pub struct LanePlan {
    pub axis: usize,
    pub extension: Extension,
    pub lo: GhostRule,
    pub hi: GhostRule,
    pub kinds: (BoundaryKind, BoundaryKind),
}

fn symmetry_for(lo: BoundaryKind, hi: BoundaryKind) -> Result<(Symmetry, bool)> {
    use BoundaryKind::*;
    match (lo, hi) {
        (Periodic, Periodic) => Ok((Symmetry::Periodic, false)),
        (Periodic, _) | (_, Periodic) => Err(Error::Contract("periodic boundaries must be paired".into())),
        (Reflective, _) | (_, Reflective) => Ok((Symmetry::WholeSample, lo != hi)),
        // mirror planes through the end nodes; a half-cell offset makes inflow ends unstable
        _ => Ok((Symmetry::WholeSample, false)),
    }
}

impl LanePlan {
    pub fn new(
        system: &System,
        grid: &Grid,
        axis: usize,
        kinds: (BoundaryKind, BoundaryKind),
        metrics: Option<&Metrics>,
    ) -> Result<Self> {
        let n = grid.axis(axis).points();
        let (symmetry, mut distinct) = symmetry_for(kinds.0, kinds.1)?;
        let rule = |kind: BoundaryKind, end: usize| -> Result<GhostRule> {
            if kind != BoundaryKind::Reflective {
                return Ok(GhostRule::Even);
            }
            let Some(normal_mom) = system.momentum(axis) else {
                return Ok(GhostRule::Even);
            };
            match metrics {
                None => Ok(GhostRule::Flip(normal_mom)),
                Some(m) => {
                    let lanes = lane_count(grid, axis);
                    Ok(GhostRule::Reflect(
                        (0..lanes)
                            .map(|l| {
                                let (i, j) = node(axis, end, l);
                                m.unit_normal(axis, i, j)
                            })
                            .collect(),
                    ))
                }
            }
        };
        let lo = rule(kinds.0, 0)?;
        let hi = rule(kinds.1, n - 1)?;
        // curved walls reflect about a different normal at each end
        if matches!(lo, GhostRule::Reflect(_)) && matches!(hi, GhostRule::Reflect(_)) {
            distinct = true;
        }
        Ok(LanePlan {
            axis,
            extension: Extension::new(n, symmetry, distinct)?,
            lo,
            hi,
            kinds,
        })
    }

    pub fn len(&self) -> usize {
        self.extension.len()
    }

    pub fn is_empty(&self) -> bool {
        self.extension.is_empty()
    }

    /// Write the extended lane `lane` of every component into `buf[c][..len]`.
    pub fn extend(&self, fields: &Fields, lane: usize, buf: &mut [Vec<f64>]) {
        let nc = fields.len();
        let mut q = [0.0; 4];
        for (k, &(src, image)) in self.extension.sources().iter().enumerate() {
            let (i, j) = node(self.axis, src, lane);
            for c in 0..nc {
                q[c] = fields[c][[i, j]];
            }
            match image {
                Image::Direct => {}
                Image::Low => self.lo.reflect(&mut q, lane),
                Image::High => self.hi.reflect(&mut q, lane),
                Image::HighLow => {
                    self.hi.reflect(&mut q, lane);
                    self.lo.reflect(&mut q, lane);
                }
            }
            for c in 0..nc {
                buf[c][k] = q[c];
            }
        }
    }

    /// Physical node behind extended index `k` of `lane`.
    #[inline]
    pub fn source_node(&self, k: usize, lane: usize) -> (usize, usize) {
        node(self.axis, self.extension.sources()[k].0, lane)
    }
}

#[inline]
fn node(axis: usize, along: usize, lane: usize) -> (usize, usize) {
    if axis == 0 {
        (along, lane)
    } else {
        (lane, along)
    }
}

fn lane_count(grid: &Grid, axis: usize) -> usize {
    let (nx, ny) = grid.shape();
    if axis == 0 {
        ny
    } else {
        nx
    }
}

/// Spectral evaluation of `U_t = -(F_x + G_y)`, or of its strong-conservation
/// form on a mapped grid.
pub struct SpectralRhs {
    system: System,
    grid: Grid,
    plans: Vec<(LanePlan, LaneOperator)>,
    metrics: Option<Metrics>,
    /// Discrete metric-identity residuals multiplying `F` and `G`.
    correction: Option<[Array2<f64>; 2]>,
    fixed: Vec<(usize, usize)>,
    ext: Vec<Vec<f64>>,
    flux: Vec<Vec<f64>>,
    lane: Vec<Complex64>,
}

impl std::fmt::Debug for SpectralRhs {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralRhs")
            .field("system", &self.system)
            .field("grid", &self.grid)
            .field("curvilinear", &self.metrics.is_some())
            .finish()
    }
}

impl SpectralRhs {
    /// Plain spectral derivatives (`η ≡ 1`).
    pub fn new(
        system: System,
        grid: &Grid,
        boundaries: &[(BoundaryKind, BoundaryKind)],
        mapping: Option<&dyn Mapping>,
    ) -> Result<Self> {
        Self::with_response(system, grid, boundaries, mapping, &|_| 1.0)
    }

    /// Derivatives windowed by `response(ω)`.
    pub fn with_response(
        system: System,
        grid: &Grid,
        boundaries: &[(BoundaryKind, BoundaryKind)],
        mapping: Option<&dyn Mapping>,
        response: &dyn Fn(f64) -> f64,
    ) -> Result<Self> {
        if boundaries.len() != grid.dim() {
            return Err(Error::Contract(format!(
                "{} boundary pairs for a {}-d grid",
                boundaries.len(),
                grid.dim()
            )));
        }
        if let (System::Euler { dim, .. }, d) = (system, grid.dim()) {
            if dim != d {
                return Err(Error::Contract(format!("{dim}-d gas on a {d}-d grid")));
            }
        }
        let metrics = mapping.map(|m| Metrics::new(m, grid)).transpose()?;
        let mut fft = FftPlans::new();
        let mut plans = Vec::new();
        let mut fixed = Vec::new();
        for (axis, &kinds) in boundaries.iter().enumerate() {
            let plan = LanePlan::new(&system, grid, axis, kinds, metrics.as_ref())?;
            let op = LaneOperator::derivative(&mut fft, plan.len(), grid.axis(axis).spacing(), response);
            let n = grid.axis(axis).points();
            if kinds.0 == BoundaryKind::Inflow {
                fixed.push((axis, 0));
            }
            if kinds.1 == BoundaryKind::Inflow {
                fixed.push((axis, n - 1));
            }
            plans.push((plan, op));
        }
        let longest = plans.iter().map(|(p, _)| p.len()).max().unwrap_or(0);
        let nc = system.components();
        let mut rhs = SpectralRhs {
            system,
            grid: grid.clone(),
            plans,
            metrics,
            correction: None,
            fixed,
            ext: vec![vec![0.0; longest]; nc],
            flux: vec![vec![0.0; longest]; nc],
            lane: vec![Complex64::default(); longest],
        };
        if let Some(m) = rhs.metrics.clone() {
            let neg = |a: &Array2<f64>| a.mapv(|v| -v);
            let cx = rhs.scalar_divergence(&m.y_eta, &neg(&m.y_xi));
            let cy = rhs.scalar_divergence(&neg(&m.x_eta), &m.x_xi);
            rhs.correction = Some([cx, cy]);
        }
        Ok(rhs)
    }

    pub fn system(&self) -> &System {
        &self.system
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn metrics(&self) -> Option<&Metrics> {
        self.metrics.as_ref()
    }

    pub fn lane_plans(&self) -> impl Iterator<Item = &LanePlan> {
        self.plans.iter().map(|(p, _)| p)
    }

    /// Nodes held fixed by inflow boundaries, as `(axis, index along axis)`.
    pub fn fixed_nodes(&self) -> &[(usize, usize)] {
        &self.fixed
    }

    /// `D_0 a + D_1 b` with even extensions.
    fn scalar_divergence(&mut self, a: &Array2<f64>, b: &Array2<f64>) -> Array2<f64> {
        let mut out = Array2::zeros(a.dim());
        for (axis, src) in [a, b].into_iter().enumerate().take(self.plans.len()) {
            let (plan, op) = &mut self.plans[axis];
            let len = plan.len();
            for lane in 0..lane_count(&self.grid, axis) {
                for k in 0..len {
                    let (i, j) = plan.source_node(k, lane);
                    self.lane[k] = Complex64::new(src[[i, j]], 0.0);
                }
                op.apply(&mut self.lane[..len]);
                for k in 0..plan.extension.points() {
                    let (i, j) = node(axis, k, lane);
                    out[[i, j]] += self.lane[k].re;
                }
            }
        }
        out
    }

    /// Evaluate the time derivative of `q` into `out`.
    ///
    /// Intermediate Runge–Kutta stages may be slightly inadmissible, so only
    /// finiteness is checked here; positivity is enforced on accepted steps.
    pub fn evaluate(&mut self, q: &Fields, out: &mut Fields) -> Result<()> {
        let nc = self.system.components();
        if q.len() != nc || out.len() != nc || q.iter().chain(out.iter()).any(|a| a.dim() != self.grid.shape()) {
            return Err(Error::Contract(
                "field layout does not match the system and grid".into(),
            ));
        }
        let (nx, ny) = self.grid.shape();
        let mut point = [0.0; 4];
        for i in 0..nx {
            for j in 0..ny {
                for (c, name) in self.system.names().iter().enumerate() {
                    if !q[c][[i, j]].is_finite() {
                        return Err(Error::state(name, "non-finite value"));
                    }
                }
            }
        }
        for o in out.iter_mut() {
            o.fill(0.0);
        }
        for (plan, op) in self.plans.iter_mut() {
            let axis = plan.axis;
            let len = plan.len();
            let n = plan.extension.points();
            let mut flux = [0.0; 4];
            for lane in 0..lane_count(&self.grid, axis) {
                plan.extend(q, lane, &mut self.ext);
                for k in 0..len {
                    let (a, b) = match &self.metrics {
                        None => {
                            if axis == 0 {
                                (1.0, 0.0)
                            } else {
                                (0.0, 1.0)
                            }
                        }
                        Some(m) => {
                            let (i, j) = plan.source_node(k, lane);
                            m.face_normal(axis, i, j)
                        }
                    };
                    for c in 0..nc {
                        point[c] = self.ext[c][k];
                    }
                    self.system.directional_flux(&point[..nc], a, b, &mut flux);
                    for c in 0..nc {
                        self.flux[c][k] = flux[c];
                    }
                }
                let mut c = 0;
                while c < nc {
                    let pair = c + 1 < nc;
                    for k in 0..len {
                        let im = if pair { self.flux[c + 1][k] } else { 0.0 };
                        self.lane[k] = Complex64::new(self.flux[c][k], im);
                    }
                    op.apply(&mut self.lane[..len]);
                    for k in 0..n {
                        let (i, j) = node(axis, k, lane);
                        out[c][[i, j]] += self.lane[k].re;
                        if pair {
                            out[c + 1][[i, j]] += self.lane[k].im;
                        }
                    }
                    c += 2;
                }
            }
        }
        match (&self.metrics, &self.correction) {
            (Some(m), Some([cx, cy])) => {
                let mut f = [0.0; 4];
                let mut g = [0.0; 4];
                for i in 0..nx {
                    for j in 0..ny {
                        for c in 0..nc {
                            point[c] = q[c][[i, j]];
                        }
                        self.system.directional_flux(&point[..nc], 1.0, 0.0, &mut f);
                        self.system.directional_flux(&point[..nc], 0.0, 1.0, &mut g);
                        let jac = m.jacobian[[i, j]];
                        for c in 0..nc {
                            let div = out[c][[i, j]] - f[c] * cx[[i, j]] - g[c] * cy[[i, j]];
                            out[c][[i, j]] = -div / jac;
                        }
                    }
                }
            }
            _ => {
                for o in out.iter_mut() {
                    o.mapv_inplace(|v| -v);
                }
            }
        }
        for &(axis, idx) in &self.fixed {
            for o in out.iter_mut() {
                o.index_axis_mut(ndarray::Axis(axis), idx).fill(0.0);
            }
        }
        Ok(())
    }

    /// Stable step for the given CFL number.
    pub fn stable_dt(&self, q: &Fields, cfl: f64) -> Result<f64> {
        stable_dt(&self.grid, &self.system, q, cfl, self.metrics.as_ref())
    }
}

fn stable_dt(grid: &Grid, system: &System, q: &Fields, cfl: f64, metrics: Option<&Metrics>) -> Result<f64> {
    if !(cfl > 0.0 && cfl <= 1.0) {
        return Err(Error::Contract(format!("CFL number must lie in (0, 1], got {cfl}")));
    }
    let nc = system.components();
    let (nx, ny) = grid.shape();
    let mut point = [0.0; 4];
    let mut rate: f64 = 0.0;
    for i in 0..nx {
        for j in 0..ny {
            for c in 0..nc {
                point[c] = q[c][[i, j]];
            }
            if let Some(k) = point[..nc].iter().position(|v| !v.is_finite()) {
                return Err(Error::state(system.names()[k], "non-finite value"));
            }
            for axis in 0..grid.dim() {
                let (a, b, scale) = match metrics {
                    None => {
                        if axis == 0 {
                            (1.0, 0.0, 1.0)
                        } else {
                            (0.0, 1.0, 1.0)
                        }
                    }
                    Some(m) => {
                        let (a, b) = m.face_normal(axis, i, j);
                        (a, b, 1.0 / m.jacobian[[i, j]].abs())
                    }
                };
                let speed = system.max_speed(&point[..nc], a, b) * scale;
                rate = rate.max(speed / grid.axis(axis).spacing());
            }
        }
    }
    if rate > 0.0 {
        Ok(cfl / rate)
    } else {
        Ok(cfl * grid.min_spacing())
    }
}

/// `Δt = cfl / max(speed / Δ)` over nodes and axes, with speed `|u| + c`
/// for gases and `|f'(u)|` for scalar laws.
pub fn dt_from_cfl(grid: &Grid, system: &System, q: &Fields, cfl: f64) -> Result<f64> {
    stable_dt(grid, system, q, cfl, None)
}

/// Time derivative on a mapped grid.
pub fn curvilinear_rhs(
    q: &Fields,
    system: System,
    grid: &Grid,
    boundaries: &[(BoundaryKind, BoundaryKind)],
    mapping: &dyn Mapping,
) -> Result<Fields> {
    let mut rhs = SpectralRhs::new(system, grid, boundaries, Some(mapping))?;
    let mut out = vec![Array2::zeros(grid.shape()); q.len()];
    rhs.evaluate(q, &mut out)?;
    Ok(out)
}

/// Copy of `q` with `pad` ghost layers beyond one end of `axis`, mirrored
/// through the wall node with the wall-normal momentum negated.
pub fn apply_reflective_bc(q: &Fields, system: &System, axis: usize, high: bool, pad: usize) -> Result<Fields> {
    let Some(first) = q.first() else {
        return Err(Error::Contract("no fields".into()));
    };
    if first.ndim() != 2 || axis > 1 {
        return Err(Error::Contract(format!("axis {axis} out of range")));
    }
    let n = first.shape()[axis];
    let normal = system.momentum(axis);
    let (lo_kind, hi_kind) = if high {
        (BoundaryKind::Outflow, BoundaryKind::Reflective)
    } else {
        (BoundaryKind::Reflective, BoundaryKind::Outflow)
    };
    let range: Vec<isize> = if high {
        (0..(n + pad) as isize).collect()
    } else {
        (-(pad as isize)..n as isize).collect()
    };
    let mut shape = [first.dim().0, first.dim().1];
    shape[axis] += pad;
    let mut out = vec![Array2::zeros((shape[0], shape[1])); q.len()];
    for (k, &i) in range.iter().enumerate() {
        let src = ghost_source(i, n, lo_kind, hi_kind)?;
        let odd = src.low_odd ^ src.high_odd;
        for (c, (dst, f)) in out.iter_mut().zip(q).enumerate() {
            let sign = if odd && Some(c) == normal { -1.0 } else { 1.0 };
            let from = f.index_axis(ndarray::Axis(axis), src.index);
            dst.index_axis_mut(ndarray::Axis(axis), k)
                .zip_mut_with(&from, |d, s| *d = sign * s);
        }
    }
    Ok(out)
}
