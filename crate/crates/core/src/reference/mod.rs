//! Exact and reference solutions, entropy-wave amplitude extraction and the
//! error norms used to report accuracy.

mod amplitude;
mod nonconvex;
mod riemann;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::physics::{
    composite_profile, isentropic_vortex_state, w_shape_profile, AdvectionProfile, ProblemSpec, Setup, GAMMA,
};
use crate::spectral::{Axis, Grid};

pub use amplitude::{entropy_amplitude_profile, mean_wavelength, AmplitudeOptions, AmplitudeProfile};
pub use nonconvex::{llf_nonconvex, nonconvex_exact, nonconvex_reference, ReferenceCache, NONCONVEX_REFERENCE_POINTS};
pub use riemann::{riemann_exact, RiemannSolution, Wave};

/// Discrete error norms between a computed field and a reference.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub l1: f64,
    pub l2: f64,
    /// Number of samples that entered the sums.
    pub n: usize,
    pub field: String,
    pub time: f64,
}

/// `L1 = Σ|f - g| / M`, `L2 = sqrt(Σ|f - g|² / M)` over all `M` entries.
///
/// For a square `(N+1) × (N+1)` array this is `(N+1)^-2 ΣΣ|e|` and
/// `(N+1)^-1 sqrt(ΣΣ|e|²)`. Periodic data should be closed with
/// [`periodic_closure`] first so that both ends of each axis are counted.
pub fn error_norms(f: &Array2<f64>, reference: &Array2<f64>, field: &str, time: f64) -> Result<ErrorReport> {
    if f.dim() != reference.dim() {
        return Err(Error::Contract(format!(
            "shape mismatch: {:?} vs {:?}",
            f.dim(),
            reference.dim()
        )));
    }
    let n = f.len();
    if n == 0 {
        return Err(Error::Data("empty fields".into()));
    }
    let (mut s1, mut s2) = (0.0, 0.0);
    for (a, b) in f.iter().zip(reference) {
        let e = (a - b).abs();
        s1 += e;
        s2 += e * e;
    }
    Ok(ErrorReport {
        l1: s1 / n as f64,
        l2: (s2 / n as f64).sqrt(),
        n,
        field: field.to_string(),
        time,
    })
}

/// Append the first row/column along every periodic axis.
pub fn periodic_closure(a: &Array2<f64>, grid: &Grid) -> Array2<f64> {
    let (nx, ny) = a.dim();
    let px = grid.axis(0).is_periodic();
    let py = grid.dim() == 2 && grid.axis(1).is_periodic();
    let mx = nx + px as usize;
    let my = ny + py as usize;
    Array2::from_shape_fn((mx, my), |(i, j)| a[[i % nx, j % ny]])
}

/// Translate `u0` at unit speed on a periodic axis.
pub fn advection_exact(u0: impl Fn(f64) -> f64, axis: &Axis, t: f64) -> Vec<f64> {
    let (a, l) = (axis.start(), axis.extent());
    axis.coords()
        .into_iter()
        .map(|x| u0(a + (x - t - a).rem_euclid(l)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BurgersKind {
    /// `u = 1` left of the origin, `0` right of it.
    Shock,
    /// `u = 0` left of the origin, `1` right of it.
    Rarefaction,
}

/// Entropy solution of Burgers' equation for the two Riemann problems.
pub fn burgers_exact(kind: BurgersKind, x: f64, t: f64) -> f64 {
    match kind {
        BurgersKind::Shock => {
            if x - 0.5 * t <= 0.0 {
                1.0
            } else {
                0.0
            }
        }
        BurgersKind::Rarefaction => {
            if x <= 0.0 {
                0.0
            } else if x >= t {
                1.0
            } else {
                x / t
            }
        }
    }
}

/// Density of the isentropic vortex advected by the unit free stream.
pub fn isentropic_vortex_exact(grid: &Grid, t: f64, center: (f64, f64), lambda: f64, eta: f64) -> Result<Array2<f64>> {
    if grid.dim() != 2 {
        return Err(Error::Contract("the vortex lives on a 2D grid".into()));
    }
    let (ax, ay) = (grid.axis(0), grid.axis(1));
    let period = (ax.extent(), ay.extent());
    let c = (center.0 + t, center.1 + t);
    let (xs, ys) = (ax.coords(), ay.coords());
    Ok(Array2::from_shape_fn(grid.shape(), |(i, j)| {
        isentropic_vortex_state(xs[i], ys[j], c, period, lambda, eta).rho
    }))
}

/// Reference values of the first conserved component (`u` or `ρ`) of a
/// benchmark at time `t`, or `None` when the benchmark has no closed-form or
/// cached reference.
pub fn problem_reference(problem: &ProblemSpec, t: f64) -> Result<Option<Array2<f64>>> {
    let grid = &problem.grid;
    let column = |v: Vec<f64>| Array2::from_shape_vec((v.len(), 1), v).expect("column shape");
    let xs = grid.axis(0).coords();
    let r = match &problem.setup {
        Setup::Advection(profile) => {
            let f = match profile {
                AdvectionProfile::Composite => composite_profile,
                AdvectionProfile::WShape => w_shape_profile,
            };
            column(advection_exact(f, grid.axis(0), t))
        }
        Setup::BurgersShock => column(xs.iter().map(|&x| burgers_exact(BurgersKind::Shock, x, t)).collect()),
        Setup::BurgersRarefaction => column(
            xs.iter()
                .map(|&x| burgers_exact(BurgersKind::Rarefaction, x, t))
                .collect(),
        ),
        Setup::Nonconvex => column(nonconvex_reference(&xs, t)?),
        Setup::ShockTube { left, right, x0 } => {
            let sol = RiemannSolution::new(*left, *right, GAMMA)?;
            column(xs.iter().map(|&x| sol.sample((x - x0) / t).rho).collect())
        }
        Setup::IsentropicVortex {
            lambda,
            eta_vortex,
            center,
        } => isentropic_vortex_exact(grid, t, *center, *lambda, *eta_vortex)?,
        _ => return Ok(None),
    };
    Ok(Some(r))
}

/// Error norms of the first component against [`problem_reference`], with
/// periodic axes closed.
pub fn problem_errors(problem: &ProblemSpec, values: &Array2<f64>, t: f64) -> Result<Option<ErrorReport>> {
    let Some(reference) = problem_reference(problem, t)? else {
        return Ok(None);
    };
    let g = &problem.grid;
    let name = problem.system.names()[0];
    error_norms(&periodic_closure(values, g), &periodic_closure(&reference, g), name, t).map(Some)
}
