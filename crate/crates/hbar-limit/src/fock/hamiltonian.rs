use faer::{c64, Mat};

use super::{FockOperator, FockSpace};
use crate::{linalg, Error, Result};

/// H = (P^2 + Q^2)/2, diagonal hbar(n + 1/2).
pub fn oscillator_hamiltonian(space: &FockSpace) -> FockOperator {
    let n = space.dim();
    let h = space.hbar();
    let m = Mat::from_fn(n, n, |i, j| {
        if i == j {
            c64::new(h * (i as f64 + 0.5), 0.0)
        } else {
            c64::new(0.0, 0.0)
        }
    });
    FockOperator { space: space.clone(), matrix: m, self_adjoint: true }
}

/// Compression of P^2 = (hbar/2)(2 a^dag a + 1 - a^2 - a^dag^2).
fn momentum_squared(space: &FockSpace) -> Mat<c64> {
    let n = space.dim();
    let h = space.hbar();
    Mat::from_fn(n, n, |i, j| {
        let v = if i == j {
            0.5 * h * (2.0 * i as f64 + 1.0)
        } else if i == j + 2 || j == i + 2 {
            let lo = i.min(j) as f64;
            -0.5 * h * ((lo + 1.0) * (lo + 2.0)).sqrt()
        } else {
            0.0
        };
        c64::new(v, 0.0)
    })
}

/// V(Q) through the eigenbasis of the truncated position matrix.
pub fn function_of_position(space: &FockSpace, f: &dyn Fn(f64) -> f64) -> Result<FockOperator> {
    let basis = space.position_basis()?;
    let values: Vec<f64> = basis.nodes.iter().map(|&q| f(q)).collect();
    if let Some(bad) = basis.nodes.iter().zip(&values).find(|(_, v)| !v.is_finite()) {
        return Err(Error::NonFinite(format!("function value at node {}", bad.0)));
    }
    let n = space.dim();
    let u = &basis.vectors;
    let scaled = Mat::from_fn(n, n, |i, k| c64::new(u[(i, k)] * values[k], 0.0));
    let uc = Mat::from_fn(n, n, |i, k| c64::new(u[(i, k)], 0.0));
    let m = linalg::mul_adj(scaled.as_ref(), uc.as_ref());
    Ok(FockOperator { space: space.clone(), matrix: m, self_adjoint: false }.hermitize())
}

/// f(P) = R f(Q) R^dag with R = diag(i^n), since R Q R^dag = P.
pub fn function_of_momentum(space: &FockSpace, f: &dyn Fn(f64) -> f64) -> Result<FockOperator> {
    let fq = function_of_position(space, f)?;
    let n = space.dim();
    let ipow = |k: usize| match k % 4 {
        0 => c64::new(1.0, 0.0),
        1 => c64::new(0.0, 1.0),
        2 => c64::new(-1.0, 0.0),
        _ => c64::new(0.0, -1.0),
    };
    let m = Mat::from_fn(n, n, |i, j| ipow(i) * fq.matrix[(i, j)] * ipow(j).conj());
    Ok(FockOperator { space: space.clone(), matrix: m, self_adjoint: true })
}

/// H = P^2/(2m) + V(Q).
pub fn schrodinger_hamiltonian(space: &FockSpace, mass: f64, potential: &dyn Fn(f64) -> f64) -> Result<FockOperator> {
    if !(mass.is_finite() && mass > 0.0) {
        return Err(Error::InvalidParameter { key: "mass".into(), reason: format!("must be positive, got {mass}") });
    }
    let v = function_of_position(space, potential)?;
    let p2 = momentum_squared(space);
    let m = Mat::from_fn(space.dim(), space.dim(), |i, j| p2[(i, j)] / (2.0 * mass) + v.matrix[(i, j)]);
    Ok(FockOperator { space: space.clone(), matrix: m, self_adjoint: true })
}

fn require_self_adjoint(h: &FockOperator) -> Result<()> {
    if h.is_self_adjoint() {
        Ok(())
    } else {
        Err(Error::NotSelfAdjoint(h.hermitian_residual()))
    }
}

/// (H - z)^{-1} for self-adjoint H and Im z != 0.
pub fn resolvent(h: &FockOperator, z: c64) -> Result<FockOperator> {
    require_self_adjoint(h)?;
    if z.im == 0.0 || !z.im.is_finite() || !z.re.is_finite() {
        return Err(Error::RealSpectralParameter);
    }
    let n = h.dim();
    let shifted = Mat::from_fn(n, n, |i, j| if i == j { h.matrix[(i, j)] - z } else { h.matrix[(i, j)] });
    let m = linalg::solve(shifted.as_ref(), Mat::<c64>::identity(n, n).as_ref());
    FockOperator::new(h.space(), m)
}

/// Eigendecomposition of a Hamiltonian, reused across evolution times.
#[derive(Clone, Debug)]
pub struct Propagator {
    hbar: f64,
    energies: Vec<f64>,
    vectors: Mat<c64>,
    space: FockSpace,
}

impl Propagator {
    pub fn new(h: &FockOperator) -> Result<Self> {
        require_self_adjoint(h)?;
        let (energies, vectors) = linalg::hermitian_eigen(h.matrix().as_ref())?;
        Ok(Self { hbar: h.space().hbar(), energies, vectors, space: h.space().clone() })
    }

    /// e^{itH/hbar}
    pub fn unitary(&self, t: f64) -> Mat<c64> {
        let n = self.energies.len();
        let u = &self.vectors;
        let scaled = Mat::from_fn(n, n, |i, k| u[(i, k)] * c64::cis(t * self.energies[k] / self.hbar));
        linalg::mul_adj(scaled.as_ref(), u.as_ref())
    }

    /// gamma_t(X) = e^{itH/hbar} X e^{-itH/hbar}
    pub fn evolve(&self, x: &FockOperator, t: f64) -> Result<FockOperator> {
        self.space.check_same(x.space())?;
        if t == 0.0 {
            return Ok(x.clone());
        }
        let v = self.unitary(t);
        let vx = linalg::mul(v.as_ref(), x.matrix().as_ref());
        let m = linalg::mul_adj(vx.as_ref(), v.as_ref());
        let out = FockOperator { space: self.space.clone(), matrix: m, self_adjoint: false };
        Ok(if x.is_self_adjoint() { out.hermitize() } else { out })
    }
}

/// gamma_t(X) = e^{itH/hbar} X e^{-itH/hbar}.
pub fn heisenberg_evolve(h: &FockOperator, x: &FockOperator, t: f64) -> Result<FockOperator> {
    Propagator::new(h)?.evolve(x, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{block_norm, make_space, operator_norm, scaled_weyl_observable, PhasePoint};

    #[test]
    fn spectrum_of_oscillator() {
        for h in [1.0, 0.5, 0.25] {
            let s = make_space(h, 6, 1).unwrap();
            let o = oscillator_hamiltonian(&s);
            for n in 0..6 {
                assert_eq!(o.entry(n, n).re, h * (n as f64 + 0.5));
            }
        }
    }

    #[test]
    fn quadratic_potential_reproduces_oscillator() {
        let s = make_space(0.7, 40, 1).unwrap();
        let h = schrodinger_hamiltonian(&s, 1.0, &|x| 0.5 * x * x).unwrap();
        let o = oscillator_hamiltonian(&s);
        let b = 20;
        assert!(linalg::max_abs_diff(h.block(b).as_ref(), o.block(b).as_ref()) < 1e-8);
    }

    #[test]
    fn free_hamiltonian_is_nonnegative() {
        let s = make_space(1.0, 30, 1).unwrap();
        let h = schrodinger_hamiltonian(&s, 1.0, &|_| 0.0).unwrap();
        let ev = linalg::hermitian_eigenvalues(h.matrix().as_ref()).unwrap();
        assert!(ev[0] > -1e-12);
    }

    #[test]
    fn cosine_vacuum_expectation() {
        for hbar in [1.0, 0.3] {
            let s = make_space(hbar, 60, 1).unwrap();
            let v = function_of_position(&s, &f64::cos).unwrap();
            assert!((v.entry(0, 0).re - (-hbar / 4.0).exp()).abs() < 1e-12);
            let w = function_of_momentum(&s, &f64::cos).unwrap();
            assert!((w.entry(0, 0).re - (-hbar / 4.0).exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn momentum_rotation_matches_p() {
        let s = make_space(0.5, 30, 1).unwrap();
        let p = function_of_momentum(&s, &|x| x).unwrap();
        assert!(linalg::max_abs_diff(p.matrix().as_ref(), s.momentum().as_ref()) < 1e-12);
    }

    #[test]
    fn non_finite_potential_rejected() {
        let s = make_space(1.0, 10, 1).unwrap();
        assert!(matches!(schrodinger_hamiltonian(&s, 1.0, &|x| 1.0 / (x - x)), Err(Error::NonFinite(_))));
    }

    #[test]
    fn oscillator_resolvent_spectrum_and_identity() {
        let s = make_space(1.0, 20, 1).unwrap();
        let h = oscillator_hamiltonian(&s);
        let z = c64::new(0.0, 1.0);
        let r = resolvent(&h, z).unwrap();
        for n in 0..20 {
            let want = (c64::new(n as f64 + 0.5, 0.0) - z).inv();
            assert!((r.entry(n, n) - want).norm() < 1e-14);
        }
        assert!(operator_norm(&r).unwrap() <= 1.0 + 1e-12);
        let zp = c64::new(0.3, -2.0);
        let rp = resolvent(&h, zp).unwrap();
        let lhs = r.sub(&rp).unwrap();
        let rhs = r.mul(&rp).unwrap().scale(z - zp);
        assert!(linalg::max_abs_diff(lhs.matrix().as_ref(), rhs.matrix().as_ref()) < 1e-8);
        assert!(matches!(resolvent(&h, c64::new(1.0, 0.0)), Err(Error::RealSpectralParameter)));
    }

    #[test]
    fn resolvent_of_schrodinger_operator_is_bounded() {
        let s = make_space(0.25, 80, 1).unwrap();
        let h = schrodinger_hamiltonian(&s, 1.0, &f64::cos).unwrap();
        let r = resolvent(&h, c64::new(0.5, 0.5)).unwrap();
        assert!(operator_norm(&r).unwrap() <= 2.0 + 1e-8);
    }

    #[test]
    fn oscillator_evolution_rotates_weyl_observables() {
        let s = make_space(0.5, 80, 1).unwrap();
        let h = oscillator_hamiltonian(&s);
        let eta = PhasePoint::new(1.0, 0.5);
        let e = scaled_weyl_observable(&s, eta).unwrap().value;
        for t in [0.3, 1.0, 2.5] {
            let g = heisenberg_evolve(&h, &e, t).unwrap();
            let (c, sn) = (t.cos(), t.sin());
            let rotated = PhasePoint::new(c * eta.x - sn * eta.p, sn * eta.x + c * eta.p);
            let want = scaled_weyl_observable(&s, rotated).unwrap().value;
            assert!(block_norm(&g.sub(&want).unwrap(), 40).unwrap() < 1e-8, "t={t}");
        }
    }

    #[test]
    fn evolution_is_a_group_and_isometric() {
        let s = make_space(1.0, 40, 1).unwrap();
        let h = oscillator_hamiltonian(&s);
        let x = function_of_position(&s, &f64::sin).unwrap();
        let p = Propagator::new(&h).unwrap();
        let lhs = p.evolve(&p.evolve(&x, 0.4).unwrap(), 0.9).unwrap();
        let rhs = p.evolve(&x, 1.3).unwrap();
        assert!(linalg::max_abs_diff(lhs.matrix().as_ref(), rhs.matrix().as_ref()) < 1e-8);
        let n0 = operator_norm(&x).unwrap();
        assert!((operator_norm(&rhs).unwrap() - n0).abs() < 1e-8);
        let nsa = FockOperator::new(&s, s.ladder().clone()).unwrap();
        assert!(matches!(heisenberg_evolve(&nsa, &x, 1.0), Err(Error::NotSelfAdjoint(_))));
    }
}
