//! Flux functions, gas states, boundary treatment and the benchmark problems.

mod mapping;
mod problems;
mod rhs;

pub use mapping::{AffineMapping, CylinderMapping, Mapping, Metrics};
pub use problems::{
    composite_profile, init_problem, isentropic_vortex_state, tabulated_ratio, w_shape_profile, AdvectionProfile,
    PostProcess, ProblemSpec, Setup, TimeStep,
};
pub use rhs::{apply_reflective_bc, curvilinear_rhs, dt_from_cfl, GhostRule, LanePlan, SpectralRhs};

use ndarray::Array2;

use crate::error::{Error, Result};

/// Ratio of specific heats used by every gas problem.
pub const GAMMA: f64 = 1.4;

/// Conserved variables, one array per component, each shaped like the grid.
pub type Fields = Vec<Array2<f64>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalarFlux {
    Advection,
    Burgers,
    Nonconvex,
}

pub fn scalar_flux(u: f64, kind: ScalarFlux) -> f64 {
    match kind {
        ScalarFlux::Advection => u,
        ScalarFlux::Burgers => 0.5 * u * u,
        ScalarFlux::Nonconvex => 0.25 * (u * u - 1.0) * (u * u - 4.0),
    }
}

/// `f'(u)`.
pub fn scalar_speed(u: f64, kind: ScalarFlux) -> f64 {
    match kind {
        ScalarFlux::Advection => 1.0,
        ScalarFlux::Burgers => u,
        ScalarFlux::Nonconvex => u * u * u - 2.5 * u,
    }
}

/// Primitive gas variables; `v` is zero in one dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Primitive {
    pub rho: f64,
    pub u: f64,
    pub v: f64,
    pub p: f64,
}

impl Primitive {
    pub fn new_1d(rho: f64, u: f64, p: f64) -> Self {
        Primitive { rho, u, v: 0.0, p }
    }

    pub fn new_2d(rho: f64, u: f64, v: f64, p: f64) -> Self {
        Primitive { rho, u, v, p }
    }

    pub fn sound_speed(&self, gamma: f64) -> f64 {
        (gamma * self.p / self.rho).sqrt()
    }
}

/// Conserved gas state at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerState {
    pub rho: f64,
    pub mom_x: f64,
    pub mom_y: f64,
    pub energy: f64,
    pub gamma: f64,
}

impl EulerState {
    pub fn pressure(&self) -> f64 {
        let ke = 0.5 * (self.mom_x * self.mom_x + self.mom_y * self.mom_y) / self.rho;
        (self.gamma - 1.0) * (self.energy - ke)
    }

    /// Fail with a state error unless `ρ > 0` and `p > 0`.
    pub fn validate(&self) -> Result<()> {
        let vals = [self.rho, self.mom_x, self.mom_y, self.energy];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::state("state", "non-finite conserved variable"));
        }
        if self.rho <= 0.0 {
            return Err(Error::state("rho", format!("nonpositive density {}", self.rho)));
        }
        let p = self.pressure();
        if p <= 0.0 {
            return Err(Error::state("p", format!("nonpositive pressure {p}")));
        }
        Ok(())
    }
}

pub fn conserved_from_primitive(prim: Primitive, gamma: f64) -> Result<EulerState> {
    let finite = [prim.rho, prim.u, prim.v, prim.p].iter().all(|v| v.is_finite());
    if !finite {
        return Err(Error::state("state", "non-finite primitive variable"));
    }
    if prim.rho <= 0.0 {
        return Err(Error::state("rho", format!("nonpositive density {}", prim.rho)));
    }
    if prim.p <= 0.0 {
        return Err(Error::state("p", format!("nonpositive pressure {}", prim.p)));
    }
    Ok(EulerState {
        rho: prim.rho,
        mom_x: prim.rho * prim.u,
        mom_y: prim.rho * prim.v,
        energy: prim.p / (gamma - 1.0) + 0.5 * prim.rho * (prim.u * prim.u + prim.v * prim.v),
        gamma,
    })
}

pub fn primitive_from_conserved(state: &EulerState) -> Result<Primitive> {
    state.validate()?;
    Ok(Primitive {
        rho: state.rho,
        u: state.mom_x / state.rho,
        v: state.mom_y / state.rho,
        p: state.pressure(),
    })
}

/// `(ρu, ρu² + p, u(E + p))`.
pub fn euler_flux_1d(state: &EulerState) -> Result<[f64; 3]> {
    let f = euler_flux_2d(state, 0)?;
    Ok([f[0], f[1], f[3]])
}

/// `F` (axis 0) or `G` (axis 1) of the two-dimensional Euler equations.
pub fn euler_flux_2d(state: &EulerState, axis: usize) -> Result<[f64; 4]> {
    state.validate()?;
    let (a, b) = match axis {
        0 => (1.0, 0.0),
        1 => (0.0, 1.0),
        _ => return Err(Error::Contract(format!("flux axis {axis} out of range"))),
    };
    let q = [state.rho, state.mom_x, state.mom_y, state.energy];
    let mut out = [0.0; 4];
    euler_directional_flux(&q, state.gamma, a, b, &mut out);
    Ok(out)
}

/// `a F + b G` for `q = (ρ, ρu, ρv, E)`, without admissibility checks.
#[inline]
pub(crate) fn euler_directional_flux(q: &[f64], gamma: f64, a: f64, b: f64, out: &mut [f64]) {
    let rho = q[0];
    let u = q[1] / rho;
    let v = q[2] / rho;
    let p = (gamma - 1.0) * (q[3] - 0.5 * (q[1] * u + q[2] * v));
    let un = a * u + b * v;
    out[0] = rho * un;
    out[1] = q[1] * un + a * p;
    out[2] = q[2] * un + b * p;
    out[3] = (q[3] + p) * un;
}

/// The conservation law being solved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum System {
    Scalar(ScalarFlux),
    /// `dim` is 1 (components ρ, ρu, E) or 2 (ρ, ρu, ρv, E).
    Euler {
        dim: usize,
        gamma: f64,
    },
}

impl System {
    pub fn components(&self) -> usize {
        match self {
            System::Scalar(_) => 1,
            System::Euler { dim, .. } => dim + 2,
        }
    }

    pub fn names(&self) -> &'static [&'static str] {
        match self {
            System::Scalar(_) => &["u"],
            System::Euler { dim: 1, .. } => &["rho", "rho_u", "E"],
            System::Euler { .. } => &["rho", "rho_u", "rho_v", "E"],
        }
    }

    /// Index of the momentum component along `axis`, if any.
    pub fn momentum(&self, axis: usize) -> Option<usize> {
        match self {
            System::Euler { dim, .. } if axis < *dim => Some(1 + axis),
            _ => None,
        }
    }

    fn widen(&self, q: &[f64]) -> [f64; 4] {
        match self {
            System::Euler { dim: 1, .. } => [q[0], q[1], 0.0, q[2]],
            _ => [q[0], q[1], q[2], q[3]],
        }
    }

    /// Flux through a face with (unnormalized) normal `(a, b)`.
    #[inline]
    pub(crate) fn directional_flux(&self, q: &[f64], a: f64, b: f64, out: &mut [f64]) {
        match *self {
            System::Scalar(kind) => out[0] = a * scalar_flux(q[0], kind),
            System::Euler { dim: 1, gamma } => {
                let mut full = [0.0; 4];
                euler_directional_flux(&self.widen(q), gamma, a, 0.0, &mut full);
                out[0] = full[0];
                out[1] = full[1];
                out[2] = full[3];
            }
            System::Euler { gamma, .. } => euler_directional_flux(q, gamma, a, b, out),
        }
    }

    /// Largest characteristic speed through a face with normal `(a, b)`.
    pub fn max_speed(&self, q: &[f64], a: f64, b: f64) -> f64 {
        match *self {
            System::Scalar(kind) => (a * scalar_speed(q[0], kind)).abs(),
            System::Euler { gamma, .. } => {
                let w = self.widen(q);
                let (u, v) = (w[1] / w[0], w[2] / w[0]);
                let p = (gamma - 1.0) * (w[3] - 0.5 * w[0] * (u * u + v * v));
                // |p| keeps the estimate finite through transient undershoots
                let c = (gamma * p.abs() / w[0].abs()).sqrt();
                (a * u + b * v).abs() + c * a.hypot(b)
            }
        }
    }

    /// Gas pressure of a point, `None` for scalar laws.
    pub fn pressure(&self, q: &[f64]) -> Option<f64> {
        match *self {
            System::Scalar(_) => None,
            System::Euler { gamma, .. } => {
                let w = self.widen(q);
                Some((gamma - 1.0) * (w[3] - 0.5 * (w[1] * w[1] + w[2] * w[2]) / w[0]))
            }
        }
    }

    /// State error unless the point is finite and, for gases, has `ρ, p > 0`.
    pub fn check(&self, q: &[f64]) -> Result<()> {
        let names = self.names();
        for (v, name) in q.iter().zip(names) {
            if !v.is_finite() {
                return Err(Error::state(name, "non-finite value"));
            }
        }
        if let System::Euler { gamma, .. } = *self {
            let w = self.widen(q);
            EulerState {
                rho: w[0],
                mom_x: w[1],
                mom_y: w[2],
                energy: w[3],
                gamma,
            }
            .validate()?;
        }
        Ok(())
    }

    /// Conserved components of a primitive state in this system's layout.
    pub fn conserved(&self, prim: Primitive) -> Result<Vec<f64>> {
        match *self {
            System::Scalar(_) => Err(Error::Contract("scalar laws have no gas state".into())),
            System::Euler { dim, gamma } => {
                let s = conserved_from_primitive(prim, gamma)?;
                Ok(if dim == 1 {
                    vec![s.rho, s.mom_x, s.energy]
                } else {
                    vec![s.rho, s.mom_x, s.mom_y, s.energy]
                })
            }
        }
    }

    /// Primitive state of one point.
    pub fn primitive(&self, q: &[f64]) -> Result<Primitive> {
        match *self {
            System::Scalar(_) => Err(Error::Contract("scalar laws have no gas state".into())),
            System::Euler { gamma, .. } => {
                let w = self.widen(q);
                primitive_from_conserved(&EulerState {
                    rho: w[0],
                    mom_x: w[1],
                    mom_y: w[2],
                    energy: w[3],
                    gamma,
                })
            }
        }
    }
}

/// Gas state behind a planar shock moving along `x` at `shock_speed`
/// through the `upstream` gas.
pub fn shock_jump(upstream: Primitive, shock_speed: f64, gamma: f64) -> Result<Primitive> {
    let c = upstream.sound_speed(gamma);
    let w = upstream.u - shock_speed;
    let m2 = (w / c).powi(2);
    if !(m2 > 1.0) {
        return Err(Error::Contract(format!(
            "relative Mach number {} does not admit a shock",
            m2.sqrt()
        )));
    }
    let ratio = (gamma + 1.0) * m2 / ((gamma - 1.0) * m2 + 2.0);
    Ok(Primitive {
        rho: upstream.rho * ratio,
        u: shock_speed + w / ratio,
        v: upstream.v,
        p: upstream.p * (2.0 * gamma * m2 - (gamma - 1.0)) / (gamma + 1.0),
    })
}

/// Right-moving shock of Mach number `mach` relative to the gas ahead of it.
/// Returns the post-shock state and the shock speed.
pub fn moving_shock(ahead: Primitive, mach: f64, gamma: f64) -> Result<(Primitive, f64)> {
    let speed = ahead.u + mach * ahead.sound_speed(gamma);
    Ok((shock_jump(ahead, speed, gamma)?, speed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_flux_values() {
        assert_eq!(scalar_flux(2.0, ScalarFlux::Burgers), 2.0);
        for u in [-2.0, -1.0, 1.0, 2.0] {
            assert_eq!(scalar_flux(u, ScalarFlux::Nonconvex), 0.0);
        }
        assert_eq!(scalar_flux(0.0, ScalarFlux::Nonconvex), 1.0);
        assert_eq!(scalar_flux(-0.3, ScalarFlux::Advection), -0.3);
    }

    #[test]
    fn speed_is_flux_derivative() {
        for kind in [ScalarFlux::Advection, ScalarFlux::Burgers, ScalarFlux::Nonconvex] {
            for u in [-2.7, -0.4, 0.0, 1.3, 2.9] {
                let h = 1e-6;
                let fd = (scalar_flux(u + h, kind) - scalar_flux(u - h, kind)) / (2.0 * h);
                assert!((fd - scalar_speed(u, kind)).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn euler_flux_examples() {
        let s = conserved_from_primitive(Primitive::new_1d(1.0, 0.0, 1.0), GAMMA).unwrap();
        assert!((s.energy - 2.5).abs() < 1e-15);
        assert_eq!(euler_flux_1d(&s).unwrap(), [0.0, 1.0, 0.0]);
        let g = euler_flux_2d(&s, 1).unwrap();
        assert_eq!(g, [0.0, 0.0, 1.0, 0.0]);
        let bad = EulerState {
            rho: 1.0,
            mom_x: 0.0,
            mom_y: 0.0,
            energy: -1.0,
            gamma: GAMMA,
        };
        assert!(matches!(euler_flux_1d(&bad), Err(Error::State { .. })));
    }

    #[test]
    fn mach3_shock_matches_tabulated_state() {
        let (post, speed) = moving_shock(Primitive::new_1d(1.0, 0.0, 1.0), 3.0, GAMMA).unwrap();
        assert!((post.rho - 3.85714).abs() < 1e-5);
        assert!((post.u - 2.629369).abs() < 1e-6);
        assert!((post.p - 10.33333).abs() < 1e-5);
        assert!((speed - 3.0 * 1.4f64.sqrt()).abs() < 1e-14);
        assert!(shock_jump(Primitive::new_1d(1.0, 0.0, 1.0), 0.5, GAMMA).is_err());
    }
}
