//! Exact solution of the one-dimensional Euler Riemann problem.

use crate::error::{Error, Result};
use crate::physics::Primitive;

/// One of the two nonlinear waves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Wave {
    Shock {
        speed: f64,
    },
    /// Head and tail speeds.
    Rarefaction {
        head: f64,
        tail: f64,
    },
}

/// Star-region state and wave pattern for a pair of constant states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiemannSolution {
    pub left: Primitive,
    pub right: Primitive,
    pub gamma: f64,
    pub p_star: f64,
    pub u_star: f64,
    pub rho_star_left: f64,
    pub rho_star_right: f64,
    pub left_wave: Wave,
    pub right_wave: Wave,
}

struct Side {
    rho: f64,
    p: f64,
    c: f64,
}

impl Side {
    fn new(s: Primitive, gamma: f64) -> Self {
        Side {
            rho: s.rho,
            p: s.p,
            c: (gamma * s.p / s.rho).sqrt(),
        }
    }

    /// Velocity change across the wave and its derivative in `p`.
    fn f(&self, p: f64, g: f64) -> (f64, f64) {
        if p > self.p {
            let a = 2.0 / ((g + 1.0) * self.rho);
            let b = (g - 1.0) / (g + 1.0) * self.p;
            let q = (a / (p + b)).sqrt();
            ((p - self.p) * q, q * (1.0 - 0.5 * (p - self.p) / (p + b)))
        } else {
            let e = (g - 1.0) / (2.0 * g);
            let r = (p / self.p).powf(e);
            (
                2.0 * self.c / (g - 1.0) * (r - 1.0),
                r / (self.rho * self.c) * (self.p / p),
            )
        }
    }

    fn star_density(&self, p: f64, g: f64) -> f64 {
        let ratio = p / self.p;
        if p > self.p {
            let k = (g - 1.0) / (g + 1.0);
            self.rho * (ratio + k) / (ratio * k + 1.0)
        } else {
            self.rho * ratio.powf(1.0 / g)
        }
    }
}

impl RiemannSolution {
    pub fn new(left: Primitive, right: Primitive, gamma: f64) -> Result<Self> {
        for s in [left, right] {
            if !(s.rho > 0.0 && s.p > 0.0 && s.u.is_finite()) {
                return Err(Error::state(
                    if s.rho > 0.0 { "p" } else { "rho" },
                    "inadmissible Riemann data",
                ));
            }
        }
        let g = gamma;
        let (l, r) = (Side::new(left, g), Side::new(right, g));
        let du = right.u - left.u;
        if 2.0 * (l.c + r.c) / (g - 1.0) <= du {
            return Err(Error::Vacuum);
        }
        let phi = |p: f64| {
            let (fl, dl) = l.f(p, g);
            let (fr, dr) = r.f(p, g);
            (fl + fr + du, dl + dr)
        };
        // bracket the root of the increasing pressure function
        let mut lo = 0.0;
        let mut hi = left.p.max(right.p).max(1e-300);
        while phi(hi).0 < 0.0 {
            lo = hi;
            hi *= 2.0;
        }
        // two-rarefaction estimate as the Newton start
        let e = (g - 1.0) / (2.0 * g);
        let tr = ((l.c + r.c - 0.5 * (g - 1.0) * du) / (l.c / left.p.powf(e) + r.c / right.p.powf(e))).powf(1.0 / e);
        let mut p = if tr > lo && tr < hi { tr } else { 0.5 * (lo + hi) };
        for _ in 0..200 {
            let (v, d) = phi(p);
            if v == 0.0 {
                break;
            }
            if v < 0.0 {
                lo = p;
            } else {
                hi = p;
            }
            let mut next = p - v / d;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            let change = (next - p).abs() / (0.5 * (next + p));
            p = next;
            if change < 1e-12 {
                break;
            }
        }
        let (fl, _) = l.f(p, g);
        let (fr, _) = r.f(p, g);
        let u = 0.5 * (left.u + right.u) + 0.5 * (fr - fl);
        let rho_l = l.star_density(p, g);
        let rho_r = r.star_density(p, g);
        let shock_speed = |side: &Side, u0: f64, sign: f64| {
            u0 + sign * side.c * ((g + 1.0) / (2.0 * g) * p / side.p + (g - 1.0) / (2.0 * g)).sqrt()
        };
        let left_wave = if p > left.p {
            Wave::Shock {
                speed: shock_speed(&l, left.u, -1.0),
            }
        } else {
            Wave::Rarefaction {
                head: left.u - l.c,
                tail: u - l.c * (p / left.p).powf(e),
            }
        };
        let right_wave = if p > right.p {
            Wave::Shock {
                speed: shock_speed(&r, right.u, 1.0),
            }
        } else {
            Wave::Rarefaction {
                head: right.u + r.c,
                tail: u + r.c * (p / right.p).powf(e),
            }
        };
        Ok(RiemannSolution {
            left,
            right,
            gamma,
            p_star: p,
            u_star: u,
            rho_star_left: rho_l,
            rho_star_right: rho_r,
            left_wave,
            right_wave,
        })
    }

    /// State at the similarity coordinate `xi = x / t`.
    pub fn sample(&self, xi: f64) -> Primitive {
        let g = self.gamma;
        let star = |rho: f64| Primitive::new_1d(rho, self.u_star, self.p_star);
        // inside a fan: sign = +1 for the left wave, -1 for the right
        let fan = |s: Primitive, sign: f64| {
            let c = (g * s.p / s.rho).sqrt();
            let k = 2.0 / (g + 1.0) + sign * (g - 1.0) / ((g + 1.0) * c) * (s.u - xi);
            let k = k.max(0.0);
            let rho = s.rho * k.powf(2.0 / (g - 1.0));
            let u = 2.0 / (g + 1.0) * (sign * c + 0.5 * (g - 1.0) * s.u + xi);
            let p = s.p * k.powf(2.0 * g / (g - 1.0));
            Primitive::new_1d(rho, u, p)
        };
        if xi <= self.u_star {
            match self.left_wave {
                Wave::Shock { speed } => {
                    if xi <= speed {
                        self.left
                    } else {
                        star(self.rho_star_left)
                    }
                }
                Wave::Rarefaction { head, tail } => {
                    if xi <= head {
                        self.left
                    } else if xi >= tail {
                        star(self.rho_star_left)
                    } else {
                        fan(self.left, 1.0)
                    }
                }
            }
        } else {
            match self.right_wave {
                Wave::Shock { speed } => {
                    if xi >= speed {
                        self.right
                    } else {
                        star(self.rho_star_right)
                    }
                }
                Wave::Rarefaction { head, tail } => {
                    if xi >= head {
                        self.right
                    } else if xi <= tail {
                        star(self.rho_star_right)
                    } else {
                        fan(self.right, -1.0)
                    }
                }
            }
        }
    }
}

/// Exact Riemann solution sampled at `xi = x / t`.
pub fn riemann_exact(left: Primitive, right: Primitive, xi: f64, gamma: f64) -> Result<Primitive> {
    Ok(RiemannSolution::new(left, right, gamma)?.sample(xi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physics::GAMMA;

    #[test]
    fn sod_star_state() {
        let s = RiemannSolution::new(
            Primitive::new_1d(1.0, 0.0, 1.0),
            Primitive::new_1d(0.125, 0.0, 0.1),
            GAMMA,
        )
        .unwrap();
        // textbook values for Sod's problem
        assert!((s.p_star - 0.30313).abs() < 1e-5);
        assert!((s.u_star - 0.92745).abs() < 1e-5);
        assert!((s.rho_star_left - 0.42632).abs() < 1e-5);
        assert!((s.rho_star_right - 0.26557).abs() < 1e-5);
    }

    #[test]
    fn vacuum_is_reported() {
        let l = Primitive::new_1d(1.0, -10.0, 0.4);
        let r = Primitive::new_1d(1.0, 10.0, 0.4);
        assert_eq!(RiemannSolution::new(l, r, GAMMA), Err(Error::Vacuum));
    }
}
