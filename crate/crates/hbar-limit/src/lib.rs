//! Numerics for the classical limit of quantum mechanics in phase space.
//!
//! Quantum observables live on truncated oscillator (Fock) spaces at a fixed
//! hbar; classical observables are functions on phase space. The comparison
//! maps between the two (Husimi symbols and anti-Wick quantization), moduli of
//! continuity, Wigner transforms and the convergence experiments are built on
//! top of those two sides.
//!
//! Only one degree of freedom (phase space R^2) is implemented.

pub mod correspondence;
mod error;
pub mod fock;
mod linalg;
pub mod limits;
pub mod phasespace;
pub mod quadrature;

pub use error::{Error, Result};
pub use faer::c64;

/// A result paired with the truncation or quadrature defect it carries.
#[derive(Clone, Debug)]
pub struct WithDefect<T> {
    pub value: T,
    pub defect: f64,
}

impl<T> WithDefect<T> {
    pub fn new(value: T, defect: f64) -> Self {
        Self { value, defect }
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> WithDefect<U> {
        WithDefect { value: f(self.value), defect: self.defect }
    }
}
