//! Classical RK4 time stepping and the sensor-driven filtering loop.

use ndarray::{Array2, Axis as NdAxis};
use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::filtering::{
    filter_window, ghost_source, postprocess_lagrange, sensor_should_filter, steepest_jump, total_variation,
    BoundaryKind, HalfShiftFilter, MonitoredField, SensorConfig, DEFAULT_TV_THRESHOLD,
};
use crate::kernels::{FilterSpec, RskResponse, DEFAULT_HALF_WIDTH};
use crate::physics::{
    init_problem, Fields, GhostRule, LanePlan, PostProcess, ProblemSpec, Setup, SpectralRhs, System, TimeStep,
};
use crate::spectral::{FftPlans, Grid, LaneOperator};

/// Where the lowpass filter is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterDomain {
    Fourier,
    Physical,
}

/// What to do when an accepted gas state has a nonpositive pressure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PressurePolicy {
    /// Stop with a state error.
    Abort,
    /// Record the minimum pressure in the diagnostics and continue. Density
    /// must still stay positive.
    Monitor,
}

/// Ratio multiplier of the prediction step of the physical filter.
pub const DEFAULT_PREDICT_SCALE: f64 = 0.8;

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub problem: ProblemSpec,
    /// RSK filter; its spacing is replaced by each axis spacing.
    pub filter: FilterSpec,
    /// The prediction step of the physical filter uses `ratio * predict_scale`.
    pub predict_scale: f64,
    pub sensor: SensorConfig,
    pub filter_domain: FilterDomain,
    pub filter_enabled: bool,
    pub pressure_policy: PressurePolicy,
    pub time_step: TimeStep,
    pub t_final: f64,
    /// Record diagnostics every `cadence` steps (and after the last one).
    pub cadence: usize,
    pub postprocess: bool,
}

impl SimulationConfig {
    /// Defaults of the problem: tabulated ratio, `W = 32`, the problem's step
    /// and final time, pressure monitored rather than enforced, and physical
    /// filtering when a wall is present or a Mach 3 shock starts from a sharp
    /// jump.
    pub fn from_problem(problem: ProblemSpec) -> Result<Self> {
        let filter = FilterSpec::rsk(DEFAULT_HALF_WIDTH, problem.ratio, problem.grid.axis(0).spacing())?;
        let monitored = match problem.system {
            System::Scalar(_) => MonitoredField::Scalar,
            System::Euler { .. } => MonitoredField::Density,
        };
        let strong_shock = matches!(
            problem.setup,
            Setup::ShockEntropy { .. } | Setup::ShuOsher { .. } | Setup::ObliqueEntropy { .. }
        );
        let domain = if problem.has_reflective_boundary() || strong_shock {
            FilterDomain::Physical
        } else {
            FilterDomain::Fourier
        };
        Ok(SimulationConfig {
            filter,
            predict_scale: DEFAULT_PREDICT_SCALE,
            sensor: SensorConfig::new(DEFAULT_TV_THRESHOLD, monitored)?,
            filter_domain: domain,
            filter_enabled: true,
            pressure_policy: PressurePolicy::Monitor,
            time_step: problem.time_step,
            t_final: problem.t_final,
            cadence: 1,
            postprocess: true,
            problem,
        })
    }

    pub fn validate(&self) -> Result<()> {
        match self.time_step {
            TimeStep::Fixed(dt) if !(dt > 0.0 && dt.is_finite()) => {
                return Err(Error::Contract(format!("time step must be positive, got {dt}")));
            }
            TimeStep::Cfl(c) if !(c > 0.0 && c <= 1.0) => {
                return Err(Error::Contract(format!("CFL number must lie in (0, 1], got {c}")));
            }
            _ => {}
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return Err(Error::Contract(format!(
                "final time must be nonnegative, got {}",
                self.t_final
            )));
        }
        if self.problem.has_reflective_boundary() && self.filter_domain == FilterDomain::Fourier {
            return Err(Error::Contract(
                "reflective boundaries require the physical-domain filter".into(),
            ));
        }
        if !(self.predict_scale > 0.0) {
            return Err(Error::Contract("prediction ratio scale must be positive".into()));
        }
        if self.cadence == 0 {
            return Err(Error::Contract("output cadence must be at least 1".into()));
        }
        Ok(())
    }
}

/// One classical four-stage Runge–Kutta step.
pub fn rk4_step<F>(q: &Fields, dt: f64, mut rhs: F) -> Result<Fields>
where
    F: FnMut(&Fields, &mut Fields) -> Result<()>,
{
    let zeros = || -> Fields { q.iter().map(|a| Array2::zeros(a.dim())).collect() };
    let axpy =
        |base: &Fields, k: &Fields, h: f64| -> Fields { base.iter().zip(k).map(|(b, k)| b + &(k * h)).collect() };
    let mut k1 = zeros();
    rhs(q, &mut k1)?;
    let mut k2 = zeros();
    rhs(&axpy(q, &k1, 0.5 * dt), &mut k2)?;
    let mut k3 = zeros();
    rhs(&axpy(q, &k2, 0.5 * dt), &mut k3)?;
    let mut k4 = zeros();
    rhs(&axpy(q, &k3, dt), &mut k4)?;
    let h = dt / 6.0;
    Ok(q.iter()
        .enumerate()
        .map(|(c, u)| {
            let mut out = u.clone();
            ndarray::Zip::from(&mut out)
                .and(&k1[c])
                .and(&k2[c])
                .and(&k3[c])
                .and(&k4[c])
                .for_each(|o, a, b, cc, d| *o += h * (a + 2.0 * b + 2.0 * cc + d));
            out
        })
        .collect())
}

/// Componentwise lowpass filter of a system on its grid.
pub struct SystemFilter {
    kind: FilterKind,
    plans: Vec<LanePlan>,
    fixed: Vec<(usize, usize)>,
    lanes: Vec<usize>,
}

enum FilterKind {
    Fourier(Vec<LaneOperator>),
    Physical(Vec<HalfShiftFilter>),
}

impl std::fmt::Debug for SystemFilter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let kind = match self.kind {
            FilterKind::Fourier(_) => "fourier",
            FilterKind::Physical(_) => "physical",
        };
        f.debug_struct("SystemFilter").field("kind", &kind).finish()
    }
}

impl SystemFilter {
    pub fn new(rhs: &SpectralRhs, filter: &FilterSpec, predict_scale: f64, domain: FilterDomain) -> Result<Self> {
        let grid = rhs.grid();
        let plans: Vec<LanePlan> = rhs.lane_plans().cloned().collect();
        let mut fft = FftPlans::new();
        let kind = match domain {
            FilterDomain::Fourier => FilterKind::Fourier(
                plans
                    .iter()
                    .map(|p| {
                        let h = grid.axis(p.axis).spacing();
                        let resp = RskResponse::new(&filter.with_spacing(h)?);
                        Ok(LaneOperator::filter(&mut fft, p.len(), h, |w| resp.at(w)))
                    })
                    .collect::<Result<_>>()?,
            ),
            FilterDomain::Physical => FilterKind::Physical(
                plans
                    .iter()
                    .map(|p| {
                        let recon = filter.with_spacing(grid.axis(p.axis).spacing())?;
                        let predict = recon.with_ratio(recon.ratio() * predict_scale)?;
                        Ok(HalfShiftFilter::new(&predict, &recon))
                    })
                    .collect::<Result<_>>()?,
            ),
        };
        let (nx, ny) = grid.shape();
        Ok(SystemFilter {
            kind,
            lanes: plans.iter().map(|p| if p.axis == 0 { ny } else { nx }).collect(),
            plans,
            fixed: rhs.fixed_nodes().to_vec(),
        })
    }

    /// Filter every component of `q` in place along each axis in turn.
    pub fn apply(&mut self, q: &mut Fields) -> Result<()> {
        let held: Vec<(usize, usize, Fields)> = self
            .fixed
            .iter()
            .map(|&(axis, idx)| {
                let f = q
                    .iter()
                    .map(|a| a.index_axis(NdAxis(axis), idx).to_owned().insert_axis(NdAxis(axis)))
                    .collect();
                (axis, idx, f)
            })
            .collect();
        let nc = q.len();
        for (a, plan) in self.plans.iter().enumerate() {
            let n = plan.extension.points();
            match &mut self.kind {
                FilterKind::Fourier(ops) => {
                    let op = &mut ops[a];
                    let len = plan.len();
                    let mut ext = vec![vec![0.0; len]; nc];
                    let mut buf = vec![Complex64::default(); len];
                    for lane in 0..self.lanes[a] {
                        plan.extend(q, lane, &mut ext);
                        let mut c = 0;
                        while c < nc {
                            let pair = c + 1 < nc;
                            for k in 0..len {
                                buf[k] = Complex64::new(ext[c][k], if pair { ext[c + 1][k] } else { 0.0 });
                            }
                            op.apply(&mut buf);
                            for k in 0..n {
                                let (i, j) = plan.source_node(k, lane);
                                q[c][[i, j]] = buf[k].re;
                                if pair {
                                    q[c + 1][[i, j]] = buf[k].im;
                                }
                            }
                            c += 2;
                        }
                    }
                }
                FilterKind::Physical(filters) => {
                    let f = &filters[a];
                    let g = f.ghosts();
                    let (lo, hi) = physical_kinds(plan.kinds);
                    let sources = (-(g as isize)..(n + g) as isize)
                        .map(|i| ghost_source(i, n, lo, hi))
                        .collect::<Result<Vec<_>>>()?;
                    let mut ext = vec![vec![0.0; n + 2 * g]; nc];
                    let mut out = vec![0.0; n];
                    let mut point = [0.0; 4];
                    for lane in 0..self.lanes[a] {
                        for (k, s) in sources.iter().enumerate() {
                            let (i, j) = if plan.axis == 0 {
                                (s.index, lane)
                            } else {
                                (lane, s.index)
                            };
                            for c in 0..nc {
                                point[c] = q[c][[i, j]];
                            }
                            if s.high_odd {
                                plan.hi.reflect(&mut point, lane);
                            }
                            if s.low_odd {
                                plan.lo.reflect(&mut point, lane);
                            }
                            for c in 0..nc {
                                ext[c][k] = point[c];
                            }
                        }
                        for c in 0..nc {
                            f.apply_extended(&ext[c], &mut out);
                            for (k, v) in out.iter().enumerate() {
                                let (i, j) = if plan.axis == 0 { (k, lane) } else { (lane, k) };
                                q[c][[i, j]] = *v;
                            }
                        }
                    }
                }
            }
        }
        for (axis, idx, f) in held {
            for (dst, src) in q.iter_mut().zip(f) {
                dst.index_axis_mut(NdAxis(axis), idx)
                    .assign(&src.index_axis(NdAxis(axis), 0));
            }
        }
        Ok(())
    }
}

fn physical_kinds(kinds: (BoundaryKind, BoundaryKind)) -> (BoundaryKind, BoundaryKind) {
    let map = |k| match k {
        BoundaryKind::Inflow => BoundaryKind::Outflow,
        other => other,
    };
    (map(kinds.0), map(kinds.1))
}

/// Per-step record of the run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostic {
    pub step: usize,
    pub t: f64,
    /// Total variation of the monitored field after the step (and filter).
    pub tv: f64,
    pub filtered: bool,
    /// `Σ ρ ΔV` (or `Σ u Δx`).
    pub mass: f64,
    /// Smallest pressure over the grid; `None` for scalar laws.
    pub min_pressure: Option<f64>,
    /// Largest `|wall-normal velocity|` on reflective ends; `None` without walls.
    pub wall_normal_speed: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct SimulationOutput {
    /// Final fields after any post-processing.
    pub fields: Fields,
    /// Final fields before post-processing.
    pub raw: Fields,
    pub t: f64,
    pub steps: usize,
    pub filter_count: usize,
    /// Accepted steps whose state had a nonpositive pressure somewhere.
    pub nonpositive_pressure_steps: usize,
    pub diagnostics: Vec<Diagnostic>,
}

/// A run stopped by an inadmissible state; `last_state` is the last finite
/// accepted state.
#[derive(Debug, Clone)]
pub struct SimulationAbort {
    pub error: Error,
    pub step: usize,
    pub t: f64,
    pub last_state: Fields,
    pub diagnostics: Vec<Diagnostic>,
}

impl std::fmt::Display for SimulationAbort {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "simulation aborted at t = {}: {}", self.t, self.error)
    }
}

impl std::error::Error for SimulationAbort {}

impl From<Error> for SimulationAbort {
    fn from(error: Error) -> Self {
        SimulationAbort {
            error,
            step: 0,
            t: 0.0,
            last_state: Vec::new(),
            diagnostics: Vec::new(),
        }
    }
}

/// Total variation of the monitored (first) component, summed over every lane
/// of every axis.
pub fn field_total_variation(values: &Array2<f64>, grid: &Grid) -> f64 {
    let mut tv = 0.0;
    for (axis, ax) in grid.axes().iter().enumerate() {
        for lane in values.lanes(NdAxis(axis)) {
            let lane: Vec<f64> = lane.to_vec();
            tv += total_variation(&lane, ax.is_periodic());
        }
    }
    tv
}

fn wall_normal_speed(rhs: &SpectralRhs, q: &Fields) -> Option<f64> {
    let mut worst: Option<f64> = None;
    let (nx, ny) = q[0].dim();
    for plan in rhs.lane_plans() {
        let (len, lanes) = if plan.axis == 0 { (nx, ny) } else { (ny, nx) };
        for (rule, i) in [(&plan.lo, 0), (&plan.hi, len - 1)] {
            for l in 0..lanes {
                let node = if plan.axis == 0 { [i, l] } else { [l, i] };
                let momentum = match rule {
                    GhostRule::Even => continue,
                    GhostRule::Flip(c) => q[*c][node],
                    GhostRule::Reflect(normals) => q[1][node] * normals[l][0] + q[2][node] * normals[l][1],
                };
                let v = (momentum / q[0][node]).abs();
                worst = Some(worst.map_or(v, |w| w.max(v)));
            }
        }
    }
    worst
}

fn mass(values: &Array2<f64>, grid: &Grid) -> f64 {
    let cell: f64 = grid.axes().iter().map(|a| a.spacing()).product();
    values.sum() * cell
}

fn check_finite(system: &System, q: &Fields) -> Result<()> {
    for (a, name) in q.iter().zip(system.names()) {
        if a.iter().any(|v| !v.is_finite()) {
            return Err(Error::state(name, "non-finite value"));
        }
    }
    Ok(())
}

/// Finite values and positive density everywhere; returns the minimum
/// pressure, which is an error only under [`PressurePolicy::Abort`].
fn check_fields(system: &System, q: &Fields, policy: PressurePolicy) -> Result<Option<f64>> {
    check_finite(system, q)?;
    let nc = q.len();
    let mut point = [0.0; 4];
    let mut min_p: Option<f64> = None;
    for idx in ndarray::indices(q[0].dim()) {
        for c in 0..nc {
            point[c] = q[c][idx];
        }
        if let Some(p) = system.pressure(&point[..nc]) {
            if point[0] <= 0.0 {
                return Err(Error::state("rho", format!("nonpositive density {}", point[0])));
            }
            if p <= 0.0 && policy == PressurePolicy::Abort {
                return Err(Error::state("p", format!("nonpositive pressure {p}")));
            }
            min_p = Some(min_p.map_or(p, |m| m.min(p)));
        }
    }
    Ok(min_p)
}

/// Run the configured problem from its initial data.
pub fn run_simulation(cfg: &SimulationConfig) -> std::result::Result<SimulationOutput, SimulationAbort> {
    let q0 = init_problem(&cfg.problem)?;
    run_simulation_from(cfg, q0)
}

/// Run the configured problem from the given initial fields.
pub fn run_simulation_from(
    cfg: &SimulationConfig,
    q0: Fields,
) -> std::result::Result<SimulationOutput, SimulationAbort> {
    cfg.validate()?;
    let problem = &cfg.problem;
    let grid = &problem.grid;
    let system = problem.system;
    let mut min_p = check_fields(&system, &q0, PressurePolicy::Abort)?;
    let mut nonpositive_pressure_steps = 0;
    let mut rhs = SpectralRhs::new(system, grid, &problem.boundaries, problem.mapping())?;
    let mut filter = SystemFilter::new(&rhs, &cfg.filter, cfg.predict_scale, cfg.filter_domain)?;

    let mut q = q0;
    let mut t = 0.0;
    let mut step = 0;
    let mut filter_count = 0;
    let mut tv_prev = field_total_variation(&q[0], grid);
    let mut diagnostics = vec![Diagnostic {
        step: 0,
        t: 0.0,
        tv: tv_prev,
        filtered: false,
        mass: mass(&q[0], grid),
        min_pressure: min_p,
        wall_normal_speed: wall_normal_speed(&rhs, &q),
    }];
    let fixed_steps = match cfg.time_step {
        TimeStep::Fixed(dt) => Some((cfg.t_final / dt * (1.0 + 1e-12)).floor() as usize),
        TimeStep::Cfl(_) => None,
    };
    let abort = |error: Error, step: usize, t: f64, q: &Fields, diagnostics: &Vec<Diagnostic>| SimulationAbort {
        error: error.at_step(step),
        step,
        t,
        last_state: q.clone(),
        diagnostics: diagnostics.clone(),
    };
    loop {
        let dt = match (cfg.time_step, fixed_steps) {
            (TimeStep::Fixed(dt), Some(n)) => {
                if step >= n {
                    break;
                }
                dt
            }
            (TimeStep::Cfl(c), _) => {
                let remaining = cfg.t_final - t;
                if remaining <= 1e-12 * cfg.t_final.max(1.0) {
                    break;
                }
                let dt = rhs
                    .stable_dt(&q, c)
                    .map_err(|e| abort(e, step + 1, t, &q, &diagnostics))?;
                dt.min(remaining)
            }
            _ => unreachable!(),
        };
        let mut next =
            rk4_step(&q, dt, |u, out| rhs.evaluate(u, out)).map_err(|e| abort(e, step + 1, t, &q, &diagnostics))?;
        // raw Gibbs undershoots may dip below zero; admissibility is
        // required of the accepted, possibly filtered, state
        check_finite(&system, &next).map_err(|e| abort(e, step + 1, t, &q, &diagnostics))?;
        let mut tv = field_total_variation(&next[0], grid);
        let filtered = cfg.filter_enabled && sensor_should_filter(tv_prev, tv, &cfg.sensor);
        if filtered {
            filter
                .apply(&mut next)
                .map_err(|e| abort(e, step + 1, t, &q, &diagnostics))?;
            tv = field_total_variation(&next[0], grid);
            filter_count += 1;
        }
        min_p =
            check_fields(&system, &next, cfg.pressure_policy).map_err(|e| abort(e, step + 1, t, &q, &diagnostics))?;
        if min_p.is_some_and(|p| p <= 0.0) {
            nonpositive_pressure_steps += 1;
        }
        tv_prev = tv;
        q = next;
        t += dt;
        step += 1;
        if step % cfg.cadence == 0 {
            diagnostics.push(Diagnostic {
                step,
                t,
                tv,
                filtered,
                mass: mass(&q[0], grid),
                min_pressure: min_p,
                wall_normal_speed: wall_normal_speed(&rhs, &q),
            });
        }
    }
    if diagnostics.last().map(|d| d.step) != Some(step) {
        diagnostics.push(Diagnostic {
            step,
            t,
            tv: tv_prev,
            filtered: false,
            mass: mass(&q[0], grid),
            min_pressure: min_p,
            wall_normal_speed: wall_normal_speed(&rhs, &q),
        });
    }
    let fields = if cfg.postprocess {
        postprocess_fields(problem, &q)?
    } else {
        q.clone()
    };
    Ok(SimulationOutput {
        fields,
        raw: q,
        t,
        steps: step,
        filter_count,
        nonpositive_pressure_steps,
        diagnostics,
    })
}

/// Apply the problem's final post-processing filter to one-dimensional fields.
pub fn postprocess_fields(problem: &ProblemSpec, q: &Fields) -> Result<Fields> {
    if problem.grid.dim() != 1 {
        return Ok(q.clone());
    }
    let bc = if problem.is_periodic() {
        BoundaryKind::Periodic
    } else {
        BoundaryKind::Mirror
    };
    let lane = |a: &Array2<f64>| a.column(0).to_vec();
    let back = |v: Vec<f64>| Array2::from_shape_vec((v.len(), 1), v).map_err(|e| Error::Contract(e.to_string()));
    match problem.postprocess {
        PostProcess::None => Ok(q.clone()),
        PostProcess::Global { order } => q
            .iter()
            .map(|a| back(postprocess_lagrange(&lane(a), order, bc)?))
            .collect(),
        PostProcess::Local { order, halfwidth } => {
            let Some(s) = steepest_jump(&lane(&q[0])) else {
                return Ok(q.clone());
            };
            q.iter()
                .map(|a| back(filter_window(&lane(a), s, halfwidth, order, bc)?))
                .collect()
        }
    }
}
