//! Truncated oscillator representation at fixed hbar.
//!
//! Basis vectors |n>, n < dim, are oscillator eigenstates. Everything exact in
//! closed form (Weyl operators, coherent vectors) is computed as the exact
//! compression onto the first `dim` levels; products of compressions are only
//! reliable on low levels, which is why callers measure norms on blocks.

mod displacement;
mod hamiltonian;
mod operators;
pub mod policy;
mod wkb;

use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock};

use faer::{c64, Mat};
use serde::{Deserialize, Serialize};

use crate::{linalg, Error, Result};

pub use displacement::{coherent_amplitudes, coherent_band, displacement_matrix, displacement_rows};
pub use hamiltonian::{
    function_of_momentum, function_of_position, heisenberg_evolve, oscillator_hamiltonian,
    resolvent, Propagator, schrodinger_hamiltonian,
};
pub use operators::{
    block_norm, coherent_projector, coherent_tail, coherent_vector, operator_norm, phase_space_translate,
    scaled_weyl_observable, weyl_operator,
};
pub use wkb::build_wkb_vector;
pub(crate) use operators::matrix_norm;

/// Planck's constant in the units of the phase-space coordinates.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct HbarValue(f64);

impl HbarValue {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value > 0.0 {
            Ok(Self(value))
        } else {
            Err(Error::InvalidHbar(value))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// A point (x, p) of the phase space R^2.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub x: f64,
    pub p: f64,
}

impl PhasePoint {
    pub const ORIGIN: PhasePoint = PhasePoint { x: 0.0, p: 0.0 };

    pub const fn new(x: f64, p: f64) -> Self {
        Self { x, p }
    }

    pub fn from_polar(r: f64, theta: f64) -> Self {
        Self { x: r * theta.cos(), p: r * theta.sin() }
    }

    pub fn norm_sq(self) -> f64 {
        self.x * self.x + self.p * self.p
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.p.is_finite()
    }

    /// Displacement parameter alpha = (x + i p) / sqrt(2 hbar).
    pub fn alpha(self, hbar: f64) -> c64 {
        c64::new(self.x, self.p) / (2.0 * hbar).sqrt()
    }
}

impl Add for PhasePoint {
    type Output = PhasePoint;
    fn add(self, o: PhasePoint) -> PhasePoint {
        PhasePoint::new(self.x + o.x, self.p + o.p)
    }
}

impl Sub for PhasePoint {
    type Output = PhasePoint;
    fn sub(self, o: PhasePoint) -> PhasePoint {
        PhasePoint::new(self.x - o.x, self.p - o.p)
    }
}

impl Neg for PhasePoint {
    type Output = PhasePoint;
    fn neg(self) -> PhasePoint {
        PhasePoint::new(-self.x, -self.p)
    }
}

impl Mul<PhasePoint> for f64 {
    type Output = PhasePoint;
    fn mul(self, v: PhasePoint) -> PhasePoint {
        PhasePoint::new(self * v.x, self * v.p)
    }
}

struct SpaceInner {
    hbar: HbarValue,
    dim: usize,
    ladder: Mat<c64>,
    position: Mat<c64>,
    momentum: Mat<c64>,
    position_basis: OnceLock<Result<PositionBasis, String>>,
}

/// Eigen-decomposition of the truncated position operator: nodes sqrt(hbar) u_k
/// with u_k the Gauss-Hermite nodes, and the orthogonal eigenvector matrix.
pub(crate) struct PositionBasis {
    pub nodes: Vec<f64>,
    pub vectors: Mat<f64>,
}

/// Span of the first `dim` oscillator levels at a given hbar, with the ladder,
/// position and momentum matrices cached at construction.
#[derive(Clone)]
pub struct FockSpace(Arc<SpaceInner>);

impl std::fmt::Debug for FockSpace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FockSpace").field("hbar", &self.hbar()).field("dim", &self.dim()).finish()
    }
}

impl PartialEq for FockSpace {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.hbar() == other.hbar() && self.dim() == other.dim())
    }
}

/// Builds the truncated space. `dof` must be 1.
pub fn make_space(hbar: f64, dim: usize, dof: usize) -> Result<FockSpace> {
    let hbar = HbarValue::new(hbar)?;
    if dim < 2 {
        return Err(Error::DimensionTooSmall(dim));
    }
    if dof != 1 {
        return Err(Error::UnsupportedDof(dof));
    }
    let h = hbar.get();
    let ladder = Mat::from_fn(dim, dim, |i, j| {
        if j == i + 1 {
            c64::new((j as f64).sqrt(), 0.0)
        } else {
            c64::new(0.0, 0.0)
        }
    });
    let s = (h / 2.0).sqrt();
    // Q = sqrt(hbar/2)(a + a^dag), P = i sqrt(hbar/2)(a^dag - a)
    let position = Mat::from_fn(dim, dim, |i, j| {
        let v = if j == i + 1 {
            (j as f64).sqrt()
        } else if i == j + 1 {
            (i as f64).sqrt()
        } else {
            0.0
        };
        c64::new(s * v, 0.0)
    });
    let momentum = Mat::from_fn(dim, dim, |i, j| {
        if i == j + 1 {
            c64::new(0.0, s * (i as f64).sqrt())
        } else if j == i + 1 {
            c64::new(0.0, -s * (j as f64).sqrt())
        } else {
            c64::new(0.0, 0.0)
        }
    });
    Ok(FockSpace(Arc::new(SpaceInner {
        hbar,
        dim,
        ladder,
        position,
        momentum,
        position_basis: OnceLock::new(),
    })))
}

impl FockSpace {
    pub fn new(hbar: f64, dim: usize) -> Result<Self> {
        make_space(hbar, dim, 1)
    }

    pub fn hbar(&self) -> f64 {
        self.0.hbar.get()
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    pub fn dof(&self) -> usize {
        1
    }

    /// Annihilation operator a.
    pub fn ladder(&self) -> &Mat<c64> {
        &self.0.ladder
    }

    pub fn position(&self) -> &Mat<c64> {
        &self.0.position
    }

    pub fn momentum(&self) -> &Mat<c64> {
        &self.0.momentum
    }

    /// Same hbar, different truncation.
    pub fn with_dim(&self, dim: usize) -> Result<FockSpace> {
        make_space(self.hbar(), dim, 1)
    }

    pub(crate) fn position_basis(&self) -> Result<&PositionBasis> {
        let cached = self.0.position_basis.get_or_init(|| {
            let n = self.dim();
            let s = (self.hbar() / 2.0).sqrt();
            let q = Mat::from_fn(n, n, |i, j| {
                if j == i + 1 {
                    s * (j as f64).sqrt()
                } else if i == j + 1 {
                    s * (i as f64).sqrt()
                } else {
                    0.0
                }
            });
            linalg::real_symmetric_eigen(q.as_ref())
                .map(|(nodes, vectors)| PositionBasis { nodes, vectors })
                .map_err(|e| e.to_string())
        });
        cached.as_ref().map_err(|e| Error::LinearAlgebra(e.clone()))
    }

    pub(crate) fn check_same(&self, other: &FockSpace) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::SpaceMismatch {
                left_hbar: self.hbar(),
                left_dim: self.dim(),
                right_hbar: other.hbar(),
                right_dim: other.dim(),
            })
        }
    }
}

/// A bounded operator represented by its matrix on a truncated space.
#[derive(Clone, Debug)]
pub struct FockOperator {
    space: FockSpace,
    matrix: Mat<c64>,
    self_adjoint: bool,
}

impl FockOperator {
    pub fn new(space: &FockSpace, matrix: Mat<c64>) -> Result<Self> {
        let n = space.dim();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::ShapeMismatch { rows: matrix.nrows(), cols: matrix.ncols(), dim: n });
        }
        Ok(Self { space: space.clone(), matrix, self_adjoint: false })
    }

    /// Marks the operator self-adjoint after checking the residual
    /// ||M - M^dag|| <= 1e-12 ||M|| (entrywise max as the norm proxy).
    pub fn into_self_adjoint(mut self) -> Result<Self> {
        let r = self.hermitian_residual();
        if r > 1e-12 {
            return Err(Error::NotSelfAdjoint(r));
        }
        self.self_adjoint = true;
        Ok(self)
    }

    /// Symmetrizes away rounding and marks the operator self-adjoint.
    pub(crate) fn hermitize(mut self) -> Self {
        let n = self.dim();
        let m = &self.matrix;
        self.matrix = Mat::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
        self.self_adjoint = true;
        self
    }

    pub fn hermitian_residual(&self) -> f64 {
        let m = &self.matrix;
        let n = self.dim();
        let mut scale = 0.0_f64;
        let mut res = 0.0_f64;
        for j in 0..n {
            for i in 0..n {
                scale = scale.max(m[(i, j)].norm());
                res = res.max((m[(i, j)] - m[(j, i)].conj()).norm());
            }
        }
        if scale == 0.0 {
            0.0
        } else {
            res / scale
        }
    }

    pub fn identity(space: &FockSpace) -> Self {
        let n = space.dim();
        Self { space: space.clone(), matrix: Mat::identity(n, n), self_adjoint: true }
    }

    pub fn zero(space: &FockSpace) -> Self {
        let n = space.dim();
        Self { space: space.clone(), matrix: Mat::zeros(n, n), self_adjoint: true }
    }

    pub fn space(&self) -> &FockSpace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn matrix(&self) -> &Mat<c64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Mat<c64> {
        self.matrix
    }

    pub fn is_self_adjoint(&self) -> bool {
        self.self_adjoint
    }

    pub fn entry(&self, m: usize, n: usize) -> c64 {
        self.matrix[(m, n)]
    }

    pub fn adjoint(&self) -> Self {
        Self {
            space: self.space.clone(),
            matrix: linalg::adjoint(self.matrix.as_ref()),
            self_adjoint: self.self_adjoint,
        }
    }

    pub fn mul(&self, other: &FockOperator) -> Result<Self> {
        self.space.check_same(&other.space)?;
        Ok(Self {
            space: self.space.clone(),
            matrix: linalg::mul(self.matrix.as_ref(), other.matrix.as_ref()),
            self_adjoint: false,
        })
    }

    pub fn add(&self, other: &FockOperator) -> Result<Self> {
        self.space.check_same(&other.space)?;
        Ok(Self {
            space: self.space.clone(),
            matrix: &self.matrix + &other.matrix,
            self_adjoint: self.self_adjoint && other.self_adjoint,
        })
    }

    pub fn sub(&self, other: &FockOperator) -> Result<Self> {
        self.space.check_same(&other.space)?;
        Ok(Self {
            space: self.space.clone(),
            matrix: &self.matrix - &other.matrix,
            self_adjoint: self.self_adjoint && other.self_adjoint,
        })
    }

    pub fn scale(&self, c: c64) -> Self {
        let n = self.dim();
        Self {
            space: self.space.clone(),
            matrix: Mat::from_fn(n, n, |i, j| self.matrix[(i, j)] * c),
            self_adjoint: self.self_adjoint && c.im == 0.0,
        }
    }

    /// [self, other]
    pub fn commutator(&self, other: &FockOperator) -> Result<Self> {
        let ab = self.mul(other)?;
        let ba = other.mul(self)?;
        ab.sub(&ba)
    }

    /// Top-left `levels` x `levels` block of the matrix.
    pub fn block(&self, levels: usize) -> Mat<c64> {
        let b = levels.min(self.dim());
        self.matrix.as_ref().submatrix(0, 0, b, b).to_owned()
    }

    /// Compression onto the first `dim` levels of the same hbar.
    pub fn truncate(&self, dim: usize) -> Result<Self> {
        let space = self.space.with_dim(dim.min(self.dim()))?;
        Ok(Self { matrix: self.block(space.dim()), space, self_adjoint: self.self_adjoint })
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[c64]) -> Vec<c64> {
        let n = self.dim();
        let mut out = vec![c64::new(0.0, 0.0); n];
        for (j, &vj) in v.iter().enumerate().take(n) {
            if vj == c64::new(0.0, 0.0) {
                continue;
            }
            let col = self.matrix.col(j);
            for (i, o) in out.iter_mut().enumerate() {
                *o += col[i] * vj;
            }
        }
        out
    }

    pub fn trace(&self) -> c64 {
        (0..self.dim()).map(|i| self.matrix[(i, i)]).sum()
    }
}

/// Unit vector on a truncated space.
#[derive(Clone, Debug)]
pub struct StateVector {
    space: FockSpace,
    amplitudes: Vec<c64>,
}

impl StateVector {
    /// Normalizes `amplitudes`; rejects the zero vector and non-finite entries.
    pub fn new(space: &FockSpace, amplitudes: Vec<c64>) -> Result<Self> {
        if amplitudes.len() != space.dim() {
            return Err(Error::ShapeMismatch { rows: amplitudes.len(), cols: 1, dim: space.dim() });
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::NonFinite(format!("state norm {norm}")));
        }
        let amplitudes = amplitudes.into_iter().map(|a| a / norm).collect();
        Ok(Self { space: space.clone(), amplitudes })
    }

    pub fn basis(space: &FockSpace, n: usize) -> Result<Self> {
        let mut v = vec![c64::new(0.0, 0.0); space.dim()];
        *v.get_mut(n).ok_or(Error::ShapeMismatch { rows: n + 1, cols: 1, dim: space.dim() })? =
            c64::new(1.0, 0.0);
        Self::new(space, v)
    }

    pub fn space(&self) -> &FockSpace {
        &self.space
    }

    pub fn amplitudes(&self) -> &[c64] {
        &self.amplitudes
    }

    pub fn inner(&self, other: &StateVector) -> c64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn expectation(&self, x: &FockOperator) -> Result<c64> {
        self.space.check_same(x.space())?;
        let xv = x.apply(&self.amplitudes);
        Ok(self.amplitudes.iter().zip(&xv).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn projector(&self) -> DensityOperator {
        let n = self.space.dim();
        let a = &self.amplitudes;
        DensityOperator {
            space: self.space.clone(),
            matrix: Mat::from_fn(n, n, |i, j| a[i] * a[j].conj()),
        }
    }
}

/// Positive unit-trace operator on a truncated space.
#[derive(Clone, Debug)]
pub struct DensityOperator {
    space: FockSpace,
    matrix: Mat<c64>,
}

impl DensityOperator {
    /// Checks trace 1 (1e-10) and positivity (min eigenvalue >= -1e-10).
    pub fn new(space: &FockSpace, matrix: Mat<c64>) -> Result<Self> {
        let op = FockOperator::new(space, matrix)?;
        let r = op.hermitian_residual();
        if r > 1e-10 {
            return Err(Error::NotSelfAdjoint(r));
        }
        let tr = op.trace();
        if (tr - c64::new(1.0, 0.0)).norm() > 1e-10 {
            return Err(Error::InvalidParameter {
                key: "trace".into(),
                reason: format!("density operator has trace {tr}"),
            });
        }
        let min = linalg::hermitian_eigenvalues(op.matrix.as_ref())?.into_iter().fold(f64::INFINITY, f64::min);
        if min < -1e-10 {
            return Err(Error::InvalidParameter {
                key: "positivity".into(),
                reason: format!("density operator has eigenvalue {min}"),
            });
        }
        Ok(Self { space: space.clone(), matrix: op.matrix })
    }

    /// Wraps a Hermitian matrix without the positivity check. Used for
    /// quasi-states whose failure of positivity is itself the measurement.
    pub fn unchecked(space: &FockSpace, matrix: Mat<c64>) -> Result<Self> {
        let op = FockOperator::new(space, matrix)?;
        Ok(Self { space: space.clone(), matrix: op.matrix })
    }

    /// Mixture sum_i w_i |psi_i><psi_i|, weights renormalized to sum 1.
    pub fn mixture(states: &[(f64, StateVector)]) -> Result<Self> {
        let space = states
            .first()
            .map(|s| s.1.space().clone())
            .ok_or_else(|| Error::InvalidParameter { key: "states".into(), reason: "empty mixture".into() })?;
        let total: f64 = states.iter().map(|s| s.0).sum();
        let n = space.dim();
        let mut m = Mat::<c64>::zeros(n, n);
        for (w, s) in states {
            s.space().check_same(&space)?;
            let a = s.amplitudes();
            for j in 0..n {
                for i in 0..n {
                    m[(i, j)] += a[i] * a[j].conj() * (w / total);
                }
            }
        }
        Self::new(&space, m)
    }

    pub fn space(&self) -> &FockSpace {
        &self.space
    }

    pub fn matrix(&self) -> &Mat<c64> {
        &self.matrix
    }

    pub fn as_operator(&self) -> FockOperator {
        FockOperator { space: self.space.clone(), matrix: self.matrix.clone(), self_adjoint: true }
    }

    /// tr(rho X)
    pub fn expectation(&self, x: &FockOperator) -> Result<c64> {
        self.space.check_same(x.space())?;
        let n = self.space.dim();
        let mut s = c64::new(0.0, 0.0);
        for j in 0..n {
            for i in 0..n {
                s += self.matrix[(i, j)] * x.matrix[(j, i)];
            }
        }
        Ok(s)
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        linalg::hermitian_eigenvalues(self.matrix.as_ref())
    }

    pub fn purity(&self) -> f64 {
        let n = self.space.dim();
        let mut s = 0.0;
        for j in 0..n {
            for i in 0..n {
                s += self.matrix[(i, j)].norm_sqr();
            }
        }
        s
    }
}

/// Either kind of quantum state, for routines that only need expectations.
pub trait QuantumState {
    fn space(&self) -> &FockSpace;
    fn expectation(&self, x: &FockOperator) -> Result<c64>;
}

impl QuantumState for StateVector {
    fn space(&self) -> &FockSpace {
        StateVector::space(self)
    }
    fn expectation(&self, x: &FockOperator) -> Result<c64> {
        StateVector::expectation(self, x)
    }
}

impl QuantumState for DensityOperator {
    fn space(&self) -> &FockSpace {
        DensityOperator::space(self)
    }
    fn expectation(&self, x: &FockOperator) -> Result<c64> {
        DensityOperator::expectation(self, x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oscillator_diagonal_on_untruncated_block() {
        for (h, dim) in [(1.0, 4), (0.5, 4), (0.25, 6)] {
            let s = make_space(h, dim, 1).unwrap();
            let q = s.position();
            let p = s.momentum();
            let hosc = &linalg::mul(q.as_ref(), q.as_ref()) + &linalg::mul(p.as_ref(), p.as_ref());
            for n in 0..dim - 1 {
                assert!((0.5 * hosc[(n, n)].re - h * (n as f64 + 0.5)).abs() < 1e-14);
                for m in 0..dim - 1 {
                    if m != n {
                        assert!(hosc[(m, n)].norm() < 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn ccr_defect_on_first_levels() {
        let s = make_space(1.0, 12, 1).unwrap();
        let a = s.ladder();
        let ad = linalg::adjoint(a.as_ref());
        let c = &(a * &ad) - &(&ad * a);
        for i in 0..11 {
            for j in 0..11 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((c[(i, j)] - c64::new(want, 0.0)).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn rejects_bad_construction() {
        assert!(matches!(make_space(1.0, 1, 1), Err(Error::DimensionTooSmall(1))));
        assert!(matches!(make_space(1.0, 8, 2), Err(Error::UnsupportedDof(2))));
        assert!(matches!(make_space(0.0, 8, 1), Err(Error::InvalidHbar(_))));
        assert!(matches!(make_space(f64::NAN, 8, 1), Err(Error::InvalidHbar(_))));
    }

    #[test]
    fn position_and_momentum_are_self_adjoint() {
        let s = make_space(0.3, 10, 1).unwrap();
        for m in [s.position(), s.momentum()] {
            let op = FockOperator::new(&s, m.clone()).unwrap();
            assert!(op.into_self_adjoint().is_ok());
        }
    }
}
