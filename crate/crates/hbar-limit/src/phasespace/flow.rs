use super::function::{Atom, PhaseSpaceFunction, RealFn};
use crate::fock::PhasePoint;
use crate::{Error, Result};

/// H(x, p) = p^2/(2m) + V(x). The harmonic case is flagged so its flow is the
/// exact rotation instead of an integrator.
#[derive(Clone, Debug)]
pub struct ClassicalHamiltonian {
    pub mass: f64,
    pub potential: RealFn,
    harmonic: bool,
}

impl ClassicalHamiltonian {
    pub fn new(mass: f64, potential: RealFn) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::InvalidParameter { key: "mass".into(), reason: format!("must be positive, got {mass}") });
        }
        Ok(Self { mass, potential, harmonic: false })
    }

    /// (p^2 + x^2)/2
    pub fn oscillator() -> Self {
        let v = RealFn::new("x^2/2", |x| 0.5 * x * x).with_derivative(|x| x);
        Self { mass: 1.0, potential: v, harmonic: true }
    }

    /// (p^2 + x^2)/2 + g x^4
    pub fn quartic(g: f64) -> Self {
        let v = RealFn::new(format!("x^2/2+{g}x^4"), move |x| 0.5 * x * x + g * x.powi(4))
            .with_derivative(move |x| x + 4.0 * g * x.powi(3));
        Self { mass: 1.0, potential: v, harmonic: g == 0.0 }
    }

    pub fn is_harmonic(&self) -> bool {
        self.harmonic
    }

    pub fn describe(&self) -> String {
        format!("p^2/(2*{})+{}", self.mass, self.potential.name)
    }

    pub fn energy(&self, xi: PhasePoint) -> f64 {
        xi.p * xi.p / (2.0 * self.mass) + self.potential.call(xi.x)
    }

    /// (dH/dx, dH/dp)
    pub fn gradient(&self, xi: PhasePoint) -> (f64, f64) {
        (self.potential.diff(xi.x), xi.p / self.mass)
    }

    /// x' = dH/dp, p' = -dH/dx
    fn vector_field(&self, xi: PhasePoint) -> PhasePoint {
        let (hx, hp) = self.gradient(xi);
        PhasePoint::new(hp, -hx)
    }

    fn rk4(&self, xi: PhasePoint, t: f64, steps: usize, bound: f64) -> Result<PhasePoint> {
        let dt = t / steps as f64;
        let mut y = xi;
        for s in 0..steps {
            let k1 = self.vector_field(y);
            let k2 = self.vector_field(y + (0.5 * dt) * k1);
            let k3 = self.vector_field(y + (0.5 * dt) * k2);
            let k4 = self.vector_field(y + dt * k3);
            y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            if !y.is_finite() || y.norm() > bound {
                return Err(Error::FlowEscaped { time: (s + 1) as f64 * dt, bound });
            }
        }
        Ok(y)
    }
}

/// Phi_t(xi). Exact rotation for the oscillator; otherwise RK4 with the step
/// count doubled until two successive results agree to 1e-11. Errors when the
/// trajectory leaves the disk of radius `bound`.
pub fn classical_flow(h: &ClassicalHamiltonian, xi: PhasePoint, t: f64, bound: f64) -> Result<PhasePoint> {
    if t == 0.0 {
        return Ok(xi);
    }
    if h.harmonic {
        let (s, c) = t.sin_cos();
        let out = PhasePoint::new(c * xi.x + s * xi.p, -s * xi.x + c * xi.p);
        if out.norm() > bound {
            return Err(Error::FlowEscaped { time: t, bound });
        }
        return Ok(out);
    }
    let mut steps = ((t.abs() / 0.02).ceil() as usize).max(4);
    let mut prev = h.rk4(xi, t, steps, bound)?;
    loop {
        steps *= 2;
        let next = h.rk4(xi, t, steps, bound)?;
        if (next - prev).norm() <= 1e-11 * (1.0 + next.norm()) || steps > 1 << 20 {
            return Ok(next);
        }
        prev = next;
    }
}

/// f o Phi_t. For the oscillator a Fourier sum stays a Fourier sum with every
/// frequency rotated counterclockwise by t.
pub fn classical_evolve(h: &ClassicalHamiltonian, f: &PhaseSpaceFunction, t: f64) -> PhaseSpaceFunction {
    if t == 0.0 {
        return f.clone();
    }
    if h.harmonic {
        if let Some(atoms) = f.as_atoms() {
            let (s, c) = t.sin_cos();
            return PhaseSpaceFunction::FourierMeasure(
                atoms
                    .into_iter()
                    .map(|a| Atom::new(a.weight, PhasePoint::new(c * a.eta.x - s * a.eta.p, s * a.eta.x + c * a.eta.p)))
                    .collect(),
            );
        }
    }
    PhaseSpaceFunction::Evolved { f: Box::new(f.clone()), hamiltonian: h.clone(), t }
}

#[cfg(test)]
mod tests {
    use super::*;
    use faer::c64;

    #[test]
    fn oscillator_orientation() {
        let h = ClassicalHamiltonian::oscillator();
        let y = classical_flow(&h, PhasePoint::new(1.0, 0.0), std::f64::consts::FRAC_PI_2, f64::INFINITY).unwrap();
        assert!((y - PhasePoint::new(0.0, -1.0)).norm() < 1e-15);
        assert_eq!(classical_flow(&h, PhasePoint::new(0.3, 0.2), 0.0, 1.0).unwrap(), PhasePoint::new(0.3, 0.2));
    }

    #[test]
    fn integrator_matches_rotation() {
        // g = 0 through the integrator path
        let v = RealFn::new("x^2/2", |x| 0.5 * x * x).with_derivative(|x| x);
        let h = ClassicalHamiltonian::new(1.0, v).unwrap();
        let xi = PhasePoint::new(0.7, -1.2);
        let exact = classical_flow(&ClassicalHamiltonian::oscillator(), xi, 2.3, f64::INFINITY).unwrap();
        let num = classical_flow(&h, xi, 2.3, f64::INFINITY).unwrap();
        assert!((exact - num).norm() < 1e-10);
    }

    #[test]
    fn quartic_energy_conservation() {
        let h = ClassicalHamiltonian::quartic(0.05);
        let xi = PhasePoint::new(1.5, 0.5);
        let e0 = h.energy(xi);
        for t in [1.0, 5.0, 10.0] {
            let y = classical_flow(&h, xi, t, 100.0).unwrap();
            assert!((h.energy(y) - e0).abs() <= 1e-8, "t={t}");
        }
    }

    #[test]
    fn escape_is_reported() {
        let v = RealFn::new("-x^4", |x| -x.powi(4)).with_derivative(|x| -4.0 * x.powi(3));
        let h = ClassicalHamiltonian::new(1.0, v).unwrap();
        let r = classical_flow(&h, PhasePoint::new(1.0, 1.0), 5.0, 10.0);
        assert!(matches!(r, Err(Error::FlowEscaped { .. })));
    }

    #[test]
    fn evolution_composes_with_forward_flow() {
        let h = ClassicalHamiltonian::oscillator();
        let f = PhaseSpaceFunction::atoms([(c64::new(1.0, 0.0), PhasePoint::new(0.4, 1.0))]);
        let t = 0.8;
        let e = classical_evolve(&h, &f, t);
        let xi = PhasePoint::new(-0.3, 0.9);
        let direct = f.evaluate(classical_flow(&h, xi, t, f64::INFINITY).unwrap()).unwrap();
        assert!((e.evaluate(xi).unwrap() - direct).norm() < 1e-14);
    }
}
