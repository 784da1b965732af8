//! Classical observables: functions on phase space R^2 with closed forms where
//! they exist and grid samples where they do not.

mod flow;
mod function;
mod measure;
mod ops;
mod window;

pub use flow::{classical_evolve, classical_flow, ClassicalHamiltonian};
pub use function::{Atom, PhaseSpaceFunction, PointFn, RealFn, SampledGrid};
pub use measure::{mu_d_integral, mu_d_polynomial};
pub use ops::{
    classical_modulus, fourier_product, gaussian_smooth, poisson_bracket, sup_distance, sup_norm,
    translate_classical, AngularSampling,
};
pub use window::{Window, WindowShape};

use crate::fock::PhasePoint;

/// sigma(x,p; x',p') = p x' - p' x.
pub fn symplectic_form(xi: PhasePoint, eta: PhasePoint) -> f64 {
    xi.p * eta.x - eta.p * xi.x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symplectic_values() {
        assert_eq!(symplectic_form(PhasePoint::new(0.0, 1.0), PhasePoint::new(1.0, 0.0)), 1.0);
        let a = PhasePoint::new(0.3, -1.7);
        let b = PhasePoint::new(2.0, 0.4);
        assert_eq!(symplectic_form(a, a), 0.0);
        assert_eq!(symplectic_form(a, b), -symplectic_form(b, a));
    }
}
