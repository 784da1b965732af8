use crate::fock::{policy, PhasePoint};
use crate::phasespace::WindowShape;
use crate::{Error, Result};

/// Midpoint rule on a window: cells of side h = 2L/res centred at
/// -L + (i + 1/2) h, each weighted h^2/(2 pi hbar). A disk grid keeps the cells
/// whose centre lies within L.
#[derive(Clone, Debug)]
pub struct QuadratureGrid {
    pub hbar: f64,
    pub half_width: f64,
    pub resolution: usize,
    pub shape: WindowShape,
    pub nodes: Vec<PhasePoint>,
    pub weights: Vec<f64>,
}

impl QuadratureGrid {
    pub fn midpoint(hbar: f64, half_width: f64, resolution: usize, shape: WindowShape) -> Result<Self> {
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::InvalidHbar(hbar));
        }
        if !(half_width.is_finite() && half_width > 0.0) || resolution == 0 {
            return Err(Error::InvalidWindow(format!("quadrature L={half_width} res={resolution}")));
        }
        let h = 2.0 * half_width / resolution as f64;
        let w = h * h / (2.0 * std::f64::consts::PI * hbar);
        let mut nodes = Vec::new();
        for ip in 0..resolution {
            for ix in 0..resolution {
                let xi = PhasePoint::new(-half_width + (ix as f64 + 0.5) * h, -half_width + (ip as f64 + 0.5) * h);
                if shape == WindowShape::Square || xi.norm() <= half_width {
                    nodes.push(xi);
                }
            }
        }
        let weights = vec![w; nodes.len()];
        Ok(Self { hbar, half_width, resolution, shape, nodes, weights })
    }

    /// Disk grid covering radius `radius` plus a 7 sqrt(hbar) margin, with cell
    /// side about `spacing_factor` sqrt(hbar): the coherent-state scale sets
    /// both the margin and the needed resolution.
    pub fn for_radius(hbar: f64, radius: f64, spacing_factor: f64) -> Result<Self> {
        let l = radius + 7.0 * hbar.sqrt();
        let res = ((2.0 * l) / (spacing_factor * hbar.sqrt())).ceil() as usize;
        Self::midpoint(hbar, l, res.max(8), WindowShape::Disk)
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.resolution as f64
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Radius of the largest disk the grid covers.
    pub fn inner_radius(&self) -> f64 {
        self.half_width
    }

    /// Levels whose Husimi mass outside the covered disk is at most `tol`;
    /// operators built from this grid are only meaningful on those levels.
    pub fn reliable_levels(&self, tol: f64) -> usize {
        policy::reliable_levels(self.hbar, self.inner_radius(), tol)
    }

    /// sum of weights times 2 pi hbar: the covered area.
    pub fn area(&self) -> f64 {
        self.weights.iter().sum::<f64>() * 2.0 * std::f64::consts::PI * self.hbar
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_area() {
        let q = QuadratureGrid::midpoint(0.5, 3.0, 40, WindowShape::Square).unwrap();
        assert_eq!(q.len(), 1600);
        assert!((q.area() - 36.0).abs() < 1e-10);
        let d = QuadratureGrid::midpoint(0.5, 3.0, 200, WindowShape::Disk).unwrap();
        assert!((d.area() - std::f64::consts::PI * 9.0).abs() < 0.05);
    }
}
