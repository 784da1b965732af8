use std::fmt;
use std::sync::Arc;

use faer::c64;

use super::flow::{classical_flow, ClassicalHamiltonian};
use super::{symplectic_form, Window};
use crate::fock::PhasePoint;
use crate::{Error, Result};

/// A named real function of one variable, with an optional exact derivative.
#[derive(Clone)]
pub struct RealFn {
    pub name: String,
    pub f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub derivative: Option<Arc<dyn Fn(f64) -> f64 + Send + Sync>>,
}

impl RealFn {
    pub fn new(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self { name: name.into(), f: Arc::new(f), derivative: None }
    }

    pub fn with_derivative(mut self, d: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.derivative = Some(Arc::new(d));
        self
    }

    pub fn zero() -> Self {
        Self::new("0", |_| 0.0).with_derivative(|_| 0.0)
    }

    pub fn cos(k: f64) -> Self {
        Self::new(format!("cos({k}x)"), move |x| (k * x).cos()).with_derivative(move |x| -k * (k * x).sin())
    }

    pub fn call(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    /// Exact derivative when known, otherwise a central difference.
    pub fn diff(&self, x: f64) -> f64 {
        match &self.derivative {
            Some(d) => d(x),
            None => {
                let h = 1e-5 * (1.0 + x.abs());
                (self.call(x + h) - self.call(x - h)) / (2.0 * h)
            }
        }
    }
}

impl fmt::Debug for RealFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)
    }
}

/// One term w e^{i sigma(eta, xi)} of a finite Fourier sum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Atom {
    pub weight: c64,
    pub eta: PhasePoint,
}

impl Atom {
    pub fn new(weight: c64, eta: PhasePoint) -> Self {
        Self { weight, eta }
    }
}

/// Values on the full square lattice of a window, x index fastest. Nodes
/// outside a disk window hold NaN.
#[derive(Clone, Debug)]
pub struct SampledGrid {
    pub window: Window,
    pub values: Vec<c64>,
}

impl SampledGrid {
    pub fn at(&self, ix: usize, ip: usize) -> c64 {
        self.values[ip * self.window.resolution + ix]
    }

    /// Bilinear interpolation.
    pub fn interpolate(&self, xi: PhasePoint) -> Result<c64> {
        let w = &self.window;
        let l = w.half_width;
        let outside = || Error::OutsideWindow { x: xi.x, p: xi.p, half_width: l };
        if !(xi.x.abs() <= l * (1.0 + 1e-12) && xi.p.abs() <= l * (1.0 + 1e-12)) {
            return Err(outside());
        }
        let h = w.spacing();
        let last = w.resolution - 1;
        let locate = |v: f64| {
            let u = ((v + l) / h).clamp(0.0, last as f64);
            let i = (u.floor() as usize).min(last - 1);
            (i, u - i as f64)
        };
        let (ix, tx) = locate(xi.x);
        let (ip, tp) = locate(xi.p);
        let mut acc = c64::new(0.0, 0.0);
        for (dx, wx) in [(0, 1.0 - tx), (1, tx)] {
            for (dp, wp) in [(0, 1.0 - tp), (1, tp)] {
                let wgt = wx * wp;
                if wgt == 0.0 {
                    continue;
                }
                let v = self.at(ix + dx, ip + dp);
                if v.re.is_nan() {
                    return Err(outside());
                }
                acc += v * wgt;
            }
        }
        Ok(acc)
    }
}

/// A classical observable.
#[derive(Clone, Debug)]
pub enum PhaseSpaceFunction {
    Constant(c64),
    /// e^{i sigma(eta, xi)}
    WeylExponential(PhasePoint),
    /// sum_j w_j e^{i sigma(eta_j, xi)}
    FourierMeasure(Vec<Atom>),
    /// f(x)
    Position(RealFn),
    /// g(p)
    Momentum(RealFn),
    /// (p^2/(2m) + V(x) - z)^{-1}
    ClassicalResolvent { mass: f64, potential: RealFn, z: c64 },
    /// height * e^{-|xi - center|^2 / (2 width^2)}
    Gaussian { center: PhasePoint, width: f64, height: f64 },
    /// p^2/(2m) + V(x)
    Hamiltonian(ClassicalHamiltonian),
    Sampled(SampledGrid),
    /// f(xi - shift)
    Translated(Box<PhaseSpaceFunction>, PhasePoint),
    /// f o Phi_t, Phi_t the Hamiltonian flow
    Evolved { f: Box<PhaseSpaceFunction>, hamiltonian: ClassicalHamiltonian, t: f64 },
    /// sum_j c_j f_j
    Sum(Vec<(c64, PhaseSpaceFunction)>),
    Product(Box<PhaseSpaceFunction>, Box<PhaseSpaceFunction>),
    /// {f, g} by derivatives of the factors
    Bracket(Box<PhaseSpaceFunction>, Box<PhaseSpaceFunction>),
    Custom { name: String, f: PointFn },
}

/// Shared closure on phase space.
#[derive(Clone)]
pub struct PointFn(pub Arc<dyn Fn(PhasePoint) -> c64 + Send + Sync>);

impl fmt::Debug for PointFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<fn>")
    }
}

fn atoms_value(atoms: &[Atom], xi: PhasePoint) -> c64 {
    atoms.iter().map(|a| a.weight * c64::cis(symplectic_form(a.eta, xi))).sum()
}

impl PhaseSpaceFunction {
    pub fn constant(c: f64) -> Self {
        Self::Constant(c64::new(c, 0.0))
    }

    pub fn atoms(atoms: impl IntoIterator<Item = (c64, PhasePoint)>) -> Self {
        Self::FourierMeasure(atoms.into_iter().map(|(w, e)| Atom::new(w, e)).collect())
    }

    /// cos(k x) as two Fourier atoms at eta = (0, +-k).
    pub fn cos_x(k: f64) -> Self {
        let half = c64::new(0.5, 0.0);
        Self::atoms([(half, PhasePoint::new(0.0, k)), (half, PhasePoint::new(0.0, -k))])
    }

    /// cos(k p) as two Fourier atoms at eta = (-+k, 0).
    pub fn cos_p(k: f64) -> Self {
        let half = c64::new(0.5, 0.0);
        Self::atoms([(half, PhasePoint::new(k, 0.0)), (half, PhasePoint::new(-k, 0.0))])
    }

    pub fn custom(name: impl Into<String>, f: impl Fn(PhasePoint) -> c64 + Send + Sync + 'static) -> Self {
        Self::Custom { name: name.into(), f: PointFn(Arc::new(f)) }
    }

    /// Atom list when the function is a finite Fourier sum.
    pub fn as_atoms(&self) -> Option<Vec<Atom>> {
        match self {
            Self::Constant(c) => Some(vec![Atom::new(*c, PhasePoint::ORIGIN)]),
            Self::WeylExponential(eta) => Some(vec![Atom::new(c64::new(1.0, 0.0), *eta)]),
            Self::FourierMeasure(a) => Some(a.clone()),
            Self::Sum(terms) => {
                let mut out = Vec::new();
                for (c, f) in terms {
                    out.extend(f.as_atoms()?.into_iter().map(|a| Atom::new(a.weight * c, a.eta)));
                }
                Some(out)
            }
            _ => None,
        }
    }

    pub fn evaluate(&self, xi: PhasePoint) -> Result<c64> {
        Ok(match self {
            Self::Constant(c) => *c,
            Self::WeylExponential(eta) => c64::cis(symplectic_form(*eta, xi)),
            Self::FourierMeasure(atoms) => atoms_value(atoms, xi),
            Self::Position(f) => c64::new(f.call(xi.x), 0.0),
            Self::Momentum(g) => c64::new(g.call(xi.p), 0.0),
            Self::ClassicalResolvent { mass, potential, z } => {
                (c64::new(xi.p * xi.p / (2.0 * mass) + potential.call(xi.x), 0.0) - z).inv()
            }
            Self::Gaussian { center, width, height } => {
                c64::new(height * (-(xi - *center).norm_sq() / (2.0 * width * width)).exp(), 0.0)
            }
            Self::Hamiltonian(h) => c64::new(h.energy(xi), 0.0),
            Self::Sampled(grid) => grid.interpolate(xi)?,
            Self::Translated(f, s) => f.evaluate(xi - *s)?,
            Self::Evolved { f, hamiltonian, t } => f.evaluate(classical_flow(hamiltonian, xi, *t, f64::INFINITY)?)?,
            Self::Sum(terms) => {
                let mut acc = c64::new(0.0, 0.0);
                for (c, f) in terms {
                    acc += c * f.evaluate(xi)?;
                }
                acc
            }
            Self::Product(f, g) => f.evaluate(xi)? * g.evaluate(xi)?,
            Self::Bracket(f, g) => {
                let (fx, fp) = f.gradient(xi)?;
                let (gx, gp) = g.gradient(xi)?;
                fp * gx - fx * gp
            }
            Self::Custom { f, .. } => (f.0)(xi),
        })
    }

    /// (d/dx, d/dp) at xi; exact for the closed forms, central differences
    /// otherwise.
    pub fn gradient(&self, xi: PhasePoint) -> Result<(c64, c64)> {
        let i = c64::new(0.0, 1.0);
        Ok(match self {
            Self::Constant(_) => (c64::new(0.0, 0.0), c64::new(0.0, 0.0)),
            Self::WeylExponential(_) | Self::FourierMeasure(_) => {
                let atoms = self.as_atoms().unwrap_or_default();
                let mut gx = c64::new(0.0, 0.0);
                let mut gp = c64::new(0.0, 0.0);
                for a in &atoms {
                    let v = a.weight * c64::cis(symplectic_form(a.eta, xi));
                    gx += v * i * a.eta.p;
                    gp -= v * i * a.eta.x;
                }
                (gx, gp)
            }
            Self::Position(f) => (c64::new(f.diff(xi.x), 0.0), c64::new(0.0, 0.0)),
            Self::Momentum(g) => (c64::new(0.0, 0.0), c64::new(g.diff(xi.p), 0.0)),
            Self::Hamiltonian(h) => {
                let (hx, hp) = h.gradient(xi);
                (c64::new(hx, 0.0), c64::new(hp, 0.0))
            }
            Self::Gaussian { center, width, .. } => {
                let v = self.evaluate(xi)?;
                let d = xi - *center;
                let s = -1.0 / (width * width);
                (v * (s * d.x), v * (s * d.p))
            }
            Self::Translated(f, s) => f.gradient(xi - *s)?,
            Self::Sum(terms) => {
                let mut gx = c64::new(0.0, 0.0);
                let mut gp = c64::new(0.0, 0.0);
                for (c, f) in terms {
                    let (a, b) = f.gradient(xi)?;
                    gx += c * a;
                    gp += c * b;
                }
                (gx, gp)
            }
            Self::Product(f, g) => {
                let (fv, gv) = (f.evaluate(xi)?, g.evaluate(xi)?);
                let (fx, fp) = f.gradient(xi)?;
                let (gx, gp) = g.gradient(xi)?;
                (fx * gv + fv * gx, fp * gv + fv * gp)
            }
            Self::Sampled(grid) => {
                // one lattice spacing keeps the stencil on grid nodes
                let h = grid.window.spacing();
                self.central_difference(xi, h)?
            }
            _ => self.central_difference(xi, 1e-5)?,
        })
    }

    fn central_difference(&self, xi: PhasePoint, h: f64) -> Result<(c64, c64)> {
        let dx = PhasePoint::new(h, 0.0);
        let dp = PhasePoint::new(0.0, h);
        let gx = (self.evaluate(xi + dx)? - self.evaluate(xi - dx)?) / (2.0 * h);
        let gp = (self.evaluate(xi + dp)? - self.evaluate(xi - dp)?) / (2.0 * h);
        Ok((gx, gp))
    }

    /// Samples on the full square lattice of `window`; nodes outside a disk
    /// window are stored as NaN.
    pub fn sample(&self, window: &Window) -> Result<PhaseSpaceFunction> {
        use rayon::prelude::*;
        let n = window.resolution;
        let values = (0..n * n)
            .into_par_iter()
            .map(|k| {
                let xi = PhasePoint::new(window.axis(k % n), window.axis(k / n));
                if window.contains(xi) {
                    self.evaluate(xi)
                } else {
                    Ok(c64::new(f64::NAN, f64::NAN))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::Sampled(SampledGrid { window: *window, values }))
    }

    /// Values at the nodes of `window` in `Window::nodes` order.
    pub fn values_on(&self, window: &Window) -> Result<Vec<c64>> {
        use rayon::prelude::*;
        if let Self::Sampled(grid) = self {
            if grid.window == *window {
                return Ok(window.indexed_nodes().into_iter().map(|(ix, ip, _)| grid.at(ix, ip)).collect());
            }
        }
        window.nodes().into_par_iter().map(|xi| self.evaluate(xi)).collect()
    }

    pub fn scale(self, c: c64) -> Self {
        match self {
            Self::FourierMeasure(atoms) => {
                Self::FourierMeasure(atoms.into_iter().map(|a| Atom::new(a.weight * c, a.eta)).collect())
            }
            other => Self::Sum(vec![(c, other)]),
        }
    }

    pub fn sub(self, other: PhaseSpaceFunction) -> Self {
        Self::Sum(vec![(c64::new(1.0, 0.0), self), (c64::new(-1.0, 0.0), other)])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_values() {
        let k = 1.3;
        let f = PhaseSpaceFunction::WeylExponential(PhasePoint::new(0.0, k));
        let xi = PhasePoint::new(0.7, -2.0);
        assert!((f.evaluate(xi).unwrap() - c64::cis(k * 0.7)).norm() < 1e-15);
        assert_eq!(PhaseSpaceFunction::constant(1.0).evaluate(xi).unwrap(), c64::new(1.0, 0.0));
        let r = PhaseSpaceFunction::ClassicalResolvent { mass: 1.0, potential: RealFn::zero(), z: c64::new(0.0, 1.0) };
        let p = 1.5;
        let want = (c64::new(p * p / 2.0, -1.0)).inv();
        assert!((r.evaluate(PhasePoint::new(0.0, p)).unwrap() - want).norm() < 1e-15);
        let c = PhaseSpaceFunction::cos_x(2.0);
        assert!((c.evaluate(xi).unwrap().re - (1.4f64).cos()).abs() < 1e-15);
        let c = PhaseSpaceFunction::cos_p(2.0);
        assert!((c.evaluate(xi).unwrap().re - (4.0f64).cos()).abs() < 1e-15);
    }

    #[test]
    fn sampled_interpolation_is_exact_on_bilinear_data() {
        let w = Window::square(3.0, 33).unwrap();
        let f = PhaseSpaceFunction::custom("bilinear", |xi| c64::new(1.0 + 2.0 * xi.x - xi.p + 0.5 * xi.x * xi.p, 0.0));
        let s = f.sample(&w).unwrap();
        for xi in [PhasePoint::new(0.123, -2.9), PhasePoint::new(3.0, 3.0), PhasePoint::new(-1.01, 0.5)] {
            assert!((s.evaluate(xi).unwrap() - f.evaluate(xi).unwrap()).norm() < 1e-12);
        }
        assert!(matches!(s.evaluate(PhasePoint::new(3.5, 0.0)), Err(Error::OutsideWindow { .. })));
    }

    #[test]
    fn gradient_of_atoms_matches_differences() {
        let f = PhaseSpaceFunction::atoms([
            (c64::new(0.5, 0.2), PhasePoint::new(1.0, -0.5)),
            (c64::new(-0.3, 0.0), PhasePoint::new(0.2, 2.0)),
        ]);
        let xi = PhasePoint::new(0.4, 0.9);
        let (gx, gp) = f.gradient(xi).unwrap();
        let (dx, dp) = f.central_difference(xi, 1e-5).unwrap();
        assert!((gx - dx).norm() < 1e-8 && (gp - dp).norm() < 1e-8);
    }
}
