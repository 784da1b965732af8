use serde::{Deserialize, Serialize};

use crate::fock::PhasePoint;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowShape {
    Square,
    Disk,
}

/// Finite region on which sup norms are taken: the nodes
/// -L + i 2L/(res-1), i < res, on each axis, optionally cut to |xi| <= L.
/// Every sup norm over a window is a lower bound for the norm on R^2.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub half_width: f64,
    pub resolution: usize,
    pub shape: WindowShape,
}

impl Window {
    pub fn new(half_width: f64, resolution: usize, shape: WindowShape) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidWindow(format!("half-width {half_width} must be positive")));
        }
        if resolution < 33 || resolution % 2 == 0 {
            return Err(Error::InvalidWindow(format!("resolution {resolution} must be odd and >= 33")));
        }
        Ok(Self { half_width, resolution, shape })
    }

    pub fn square(half_width: f64, resolution: usize) -> Result<Self> {
        Self::new(half_width, resolution, WindowShape::Square)
    }

    pub fn disk(half_width: f64, resolution: usize) -> Result<Self> {
        Self::new(half_width, resolution, WindowShape::Disk)
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.resolution - 1) as f64
    }

    pub fn axis(&self, i: usize) -> f64 {
        // symmetric form keeps the centre node at exactly 0
        let c = (self.resolution - 1) / 2;
        (i as f64 - c as f64) * self.spacing()
    }

    pub fn contains(&self, xi: PhasePoint) -> bool {
        let l = self.half_width * (1.0 + 1e-12);
        match self.shape {
            WindowShape::Square => xi.x.abs() <= l && xi.p.abs() <= l,
            WindowShape::Disk => xi.norm() <= l,
        }
    }

    /// Grid nodes with their (ix, ip) indices, x index fastest.
    pub fn indexed_nodes(&self) -> Vec<(usize, usize, PhasePoint)> {
        let n = self.resolution;
        let mut out = Vec::with_capacity(n * n);
        for ip in 0..n {
            for ix in 0..n {
                let xi = PhasePoint::new(self.axis(ix), self.axis(ip));
                if self.contains(xi) {
                    out.push((ix, ip, xi));
                }
            }
        }
        out
    }

    pub fn nodes(&self) -> Vec<PhasePoint> {
        self.indexed_nodes().into_iter().map(|n| n.2).collect()
    }

    /// Radius of the smallest disk containing the window.
    pub fn radius(&self) -> f64 {
        match self.shape {
            WindowShape::Square => self.half_width * std::f64::consts::SQRT_2,
            WindowShape::Disk => self.half_width,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(Window::square(4.0, 32).is_err());
        assert!(Window::square(4.0, 31).is_err());
        assert!(Window::square(0.0, 33).is_err());
        assert!(Window::square(4.0, 33).is_ok());
    }

    #[test]
    fn nodes_are_symmetric_and_include_the_edges() {
        let w = Window::square(2.0, 33);
        let w = w.unwrap();
        assert_eq!(w.axis(0), -2.0);
        assert_eq!(w.axis(16), 0.0);
        assert_eq!(w.axis(32), 2.0);
        assert_eq!(w.nodes().len(), 33 * 33);
        let d = Window::disk(2.0, 33).unwrap();
        let nd = d.nodes().len();
        assert!(nd < 33 * 33 && nd > 750);
        assert!(d.nodes().iter().all(|p| p.norm() <= 2.0 + 1e-9));
    }
}
