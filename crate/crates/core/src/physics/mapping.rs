use ndarray::Array2;

use crate::error::{Error, Result};
use crate::spectral::Grid;

/// Smooth map from the computational `(ξ, η)` plane to the physical plane.
pub trait Mapping: std::fmt::Debug + Send + Sync {
    fn map(&self, xi: f64, eta: f64) -> (f64, f64);

    /// `[[x_ξ, x_η], [y_ξ, y_η]]`.
    fn jacobian(&self, xi: f64, eta: f64) -> [[f64; 2]; 2];
}

/// Grid lines of an annular sector around the unit cylinder.
///
/// `ξ = 0` is the outer (inlet) boundary and `ξ = 1` the cylinder surface;
/// `η` sweeps the angle `θ(2η - 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylinderMapping {
    pub rx: f64,
    pub ry: f64,
    pub theta: f64,
}

impl Default for CylinderMapping {
    fn default() -> Self {
        CylinderMapping {
            rx: 3.0,
            ry: 6.0,
            theta: 5.0 * std::f64::consts::PI / 12.0,
        }
    }
}

impl Mapping for CylinderMapping {
    fn map(&self, xi: f64, eta: f64) -> (f64, f64) {
        let phi = self.theta * (2.0 * eta - 1.0);
        (
            -(self.rx - (self.rx - 1.0) * xi) * phi.cos(),
            (self.ry - (self.ry - 1.0) * xi) * phi.sin(),
        )
    }

    fn jacobian(&self, xi: f64, eta: f64) -> [[f64; 2]; 2] {
        let phi = self.theta * (2.0 * eta - 1.0);
        let (s, c) = phi.sin_cos();
        let ax = self.rx - (self.rx - 1.0) * xi;
        let ay = self.ry - (self.ry - 1.0) * xi;
        [
            [(self.rx - 1.0) * c, 2.0 * self.theta * ax * s],
            [-(self.ry - 1.0) * s, 2.0 * self.theta * ay * c],
        ]
    }
}

/// `x = x0 + sx ξ`, `y = y0 + sy η`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineMapping {
    pub origin: (f64, f64),
    pub scale: (f64, f64),
}

impl AffineMapping {
    pub fn identity() -> Self {
        AffineMapping {
            origin: (0.0, 0.0),
            scale: (1.0, 1.0),
        }
    }
}

impl Mapping for AffineMapping {
    fn map(&self, xi: f64, eta: f64) -> (f64, f64) {
        (self.origin.0 + self.scale.0 * xi, self.origin.1 + self.scale.1 * eta)
    }

    fn jacobian(&self, _xi: f64, _eta: f64) -> [[f64; 2]; 2] {
        [[self.scale.0, 0.0], [0.0, self.scale.1]]
    }
}

/// Metric terms of a mapping sampled on a computational grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Metrics {
    pub x: Array2<f64>,
    pub y: Array2<f64>,
    pub x_xi: Array2<f64>,
    pub x_eta: Array2<f64>,
    pub y_xi: Array2<f64>,
    pub y_eta: Array2<f64>,
    pub jacobian: Array2<f64>,
}

impl Metrics {
    pub fn new(mapping: &dyn Mapping, grid: &Grid) -> Result<Self> {
        if grid.dim() != 2 {
            return Err(Error::Contract("curvilinear metrics need a 2-d grid".into()));
        }
        let (xi, eta) = (grid.axis(0).coords(), grid.axis(1).coords());
        let shape = grid.shape();
        let mut m = Metrics {
            x: Array2::zeros(shape),
            y: Array2::zeros(shape),
            x_xi: Array2::zeros(shape),
            x_eta: Array2::zeros(shape),
            y_xi: Array2::zeros(shape),
            y_eta: Array2::zeros(shape),
            jacobian: Array2::zeros(shape),
        };
        for (i, &a) in xi.iter().enumerate() {
            for (j, &b) in eta.iter().enumerate() {
                let (x, y) = mapping.map(a, b);
                let jac = mapping.jacobian(a, b);
                let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
                if !det.is_finite() || det.abs() < 1e-12 {
                    return Err(Error::Mapping(format!("singular Jacobian {det} at ({a}, {b})")));
                }
                m.x[[i, j]] = x;
                m.y[[i, j]] = y;
                m.x_xi[[i, j]] = jac[0][0];
                m.x_eta[[i, j]] = jac[0][1];
                m.y_xi[[i, j]] = jac[1][0];
                m.y_eta[[i, j]] = jac[1][1];
                m.jacobian[[i, j]] = det;
            }
        }
        let first = m.jacobian[[0, 0]].signum();
        if m.jacobian.iter().any(|d| d.signum() != first) {
            return Err(Error::Mapping("Jacobian changes sign: the mapping folds".into()));
        }
        Ok(m)
    }

    /// Unnormalized face normal for fluxes along computational `axis`.
    #[inline]
    pub fn face_normal(&self, axis: usize, i: usize, j: usize) -> (f64, f64) {
        if axis == 0 {
            (self.y_eta[[i, j]], -self.x_eta[[i, j]])
        } else {
            (-self.y_xi[[i, j]], self.x_xi[[i, j]])
        }
    }

    /// Unit normal `∇ξ / |∇ξ|` (axis 0) or `∇η / |∇η|` (axis 1) at a node.
    pub fn unit_normal(&self, axis: usize, i: usize, j: usize) -> [f64; 2] {
        let (a, b) = self.face_normal(axis, i, j);
        let n = a.hypot(b);
        [a / n, b / n]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cylinder_surface_is_unit_circle_in_x() {
        let m = CylinderMapping::default();
        let (x, y) = m.map(1.0, 0.5);
        assert!((x + 1.0).abs() < 1e-15 && y.abs() < 1e-15);
        let (x, _) = m.map(0.0, 0.5);
        assert!((x + 3.0).abs() < 1e-15);
    }

    #[test]
    fn singular_mapping_rejected() {
        #[derive(Debug)]
        struct Collapse;
        impl Mapping for Collapse {
            fn map(&self, xi: f64, _eta: f64) -> (f64, f64) {
                (xi, 0.0)
            }
            fn jacobian(&self, _xi: f64, _eta: f64) -> [[f64; 2]; 2] {
                [[1.0, 0.0], [0.0, 0.0]]
            }
        }
        use crate::spectral::Axis;
        let g = Grid::two_d(Axis::nodal(0.0, 1.0, 5).unwrap(), Axis::nodal(0.0, 1.0, 5).unwrap());
        assert!(matches!(Metrics::new(&Collapse, &g), Err(Error::Mapping(_))));
    }
}
