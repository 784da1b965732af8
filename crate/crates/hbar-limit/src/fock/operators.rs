use faer::{c64, Mat};
use statrs::function::gamma::gamma_lr;

use super::displacement::{coherent_amplitudes, displacement_matrix};
use super::{DensityOperator, FockOperator, FockSpace, PhasePoint, StateVector};
use crate::{linalg, Error, Result, WithDefect};

fn check_point(xi: PhasePoint) -> Result<()> {
    if xi.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite(format!("phase point ({}, {})", xi.x, xi.p)))
    }
}

/// Mass a coherent state with parameter |alpha|^2 = a loses past level dim-1.
pub fn coherent_tail(dim: usize, a: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else {
        gamma_lr(dim as f64, a)
    }
}

/// W(xi) = exp(i(p Q - x P)/hbar) compressed onto the space. The defect is the
/// largest column-norm loss among the lower half of the levels, i.e. the worst
/// diagonal entry of W^dag W - 1 on that block.
pub fn weyl_operator(space: &FockSpace, xi: PhasePoint) -> Result<WithDefect<FockOperator>> {
    check_point(xi)?;
    let n = space.dim();
    let matrix = displacement_matrix(n, xi.alpha(space.hbar()));
    let mut defect = 0.0_f64;
    for j in 0..n / 2 {
        let col: f64 = (0..n).map(|i| matrix[(i, j)].norm_sqr()).sum();
        defect = defect.max((1.0 - col).abs());
    }
    let mut op = FockOperator::new(space, matrix)?;
    op.self_adjoint = xi == PhasePoint::ORIGIN;
    Ok(WithDefect::new(op, defect))
}

/// E_hbar(eta) = W(hbar eta).
pub fn scaled_weyl_observable(space: &FockSpace, eta: PhasePoint) -> Result<WithDefect<FockOperator>> {
    check_point(eta)?;
    weyl_operator(space, space.hbar() * eta)
}

/// W(xi)|0>, renormalized after truncation; the defect is the mass that was cut.
pub fn coherent_vector(space: &FockSpace, xi: PhasePoint) -> Result<WithDefect<StateVector>> {
    check_point(xi)?;
    let alpha = xi.alpha(space.hbar());
    let amps = coherent_amplitudes(space.dim(), alpha);
    let defect = coherent_tail(space.dim(), alpha.norm_sqr());
    Ok(WithDefect::new(StateVector::new(space, amps)?, defect))
}

/// |chi_xi><chi_xi|.
pub fn coherent_projector(space: &FockSpace, xi: PhasePoint) -> Result<WithDefect<DensityOperator>> {
    Ok(coherent_vector(space, xi)?.map(|v| v.projector()))
}

/// alpha_xi(X) = W(xi) X W(-xi).
pub fn phase_space_translate(space: &FockSpace, x: &FockOperator, xi: PhasePoint) -> Result<FockOperator> {
    space.check_same(x.space())?;
    check_point(xi)?;
    if xi == PhasePoint::ORIGIN {
        return Ok(x.clone());
    }
    let w = displacement_matrix(space.dim(), xi.alpha(space.hbar()));
    let wx = linalg::mul(w.as_ref(), x.matrix().as_ref());
    let mut out = FockOperator::new(space, linalg::mul_adj(wx.as_ref(), w.as_ref()))?;
    if x.is_self_adjoint() {
        out = out.hermitize();
    }
    Ok(out)
}

/// Largest singular value; spectral radius for self-adjoint operators.
pub fn operator_norm(x: &FockOperator) -> Result<f64> {
    matrix_norm(x.matrix(), x.is_self_adjoint())
}

/// Norm of the top-left `levels` x `levels` block.
pub fn block_norm(x: &FockOperator, levels: usize) -> Result<f64> {
    matrix_norm(&x.block(levels), x.is_self_adjoint())
}

pub(crate) fn matrix_norm(m: &Mat<c64>, self_adjoint: bool) -> Result<f64> {
    if m.nrows() == 0 {
        return Ok(0.0);
    }
    if self_adjoint {
        let ev = linalg::hermitian_eigenvalues(m.as_ref())?;
        Ok(ev.iter().fold(0.0_f64, |a, v| a.max(v.abs())))
    } else {
        linalg::spectral_norm(m.as_ref())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::make_space;
    use crate::phasespace::symplectic_form;

    #[test]
    fn weyl_at_origin_is_identity() {
        let s = make_space(1.0, 16, 1).unwrap();
        let w = weyl_operator(&s, PhasePoint::ORIGIN).unwrap().value;
        assert_eq!(linalg::max_abs_diff(w.matrix().as_ref(), Mat::<c64>::identity(16, 16).as_ref()), 0.0);
    }

    #[test]
    fn vacuum_expectation_is_gaussian() {
        let s = make_space(1.0, 64, 1).unwrap();
        let w = weyl_operator(&s, PhasePoint::new(2.0, 0.0)).unwrap().value;
        assert!((w.entry(0, 0) - c64::new((-1.0f64).exp(), 0.0)).norm() < 1e-14);
        for (x, p, h) in [(1.0, -2.0, 0.5), (3.0, 1.0, 1.0), (0.3, 0.2, 0.01)] {
            let s = make_space(h, 200, 1).unwrap();
            let w = weyl_operator(&s, PhasePoint::new(x, p)).unwrap().value;
            let want = (-(x * x + p * p) / (4.0 * h)).exp();
            assert!((w.entry(0, 0) - c64::new(want, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn weyl_relation_on_low_block() {
        let s = make_space(1.0, 64, 1).unwrap();
        let xi = PhasePoint::new(1.0, 0.0);
        let eta = PhasePoint::new(0.0, 1.0);
        let a = weyl_operator(&s, xi).unwrap().value;
        let b = weyl_operator(&s, eta).unwrap().value;
        let ab = a.mul(&b).unwrap();
        let phase = c64::cis(symplectic_form(xi, eta) / 2.0);
        let c = weyl_operator(&s, xi + eta).unwrap().value.scale(phase);
        let diff = ab.sub(&c).unwrap();
        assert!(block_norm(&diff, 32).unwrap() < 1e-6);
    }

    #[test]
    fn scaled_commutator() {
        let s = make_space(1.0, 64, 1).unwrap();
        let eta = PhasePoint::new(1.0, 0.0);
        let etap = PhasePoint::new(0.0, 1.0);
        let a = scaled_weyl_observable(&s, eta).unwrap().value;
        let b = scaled_weyl_observable(&s, etap).unwrap().value;
        let lhs = a.commutator(&b).unwrap();
        let f = 2.0 * (symplectic_form(eta, etap) / 2.0).sin();
        let rhs = scaled_weyl_observable(&s, eta + etap).unwrap().value.scale(c64::new(0.0, f));
        assert!(block_norm(&lhs.sub(&rhs).unwrap(), 32).unwrap() < 1e-6);
    }

    #[test]
    fn coherent_overlap_and_energy() {
        let s = make_space(1.0, 80, 1).unwrap();
        let a = coherent_vector(&s, PhasePoint::ORIGIN).unwrap().value;
        assert_eq!(a.amplitudes()[0], c64::new(1.0, 0.0));
        let b = coherent_vector(&s, PhasePoint::new(2.0, 0.0)).unwrap().value;
        assert!((a.inner(&b).norm() - (-1.0f64).exp()).abs() < 1e-14);

        let s = make_space(0.5, 120, 1).unwrap();
        let h = crate::fock::oscillator_hamiltonian(&s);
        let xi = PhasePoint::new(1.5, -2.0);
        let v = coherent_vector(&s, xi).unwrap().value;
        let e = v.expectation(&h).unwrap();
        assert!((e.re - (0.25 + xi.norm_sq() / 2.0)).abs() < 1e-10);
    }

    #[test]
    fn projector_is_pure() {
        let s = make_space(0.25, 60, 1).unwrap();
        let g = coherent_projector(&s, PhasePoint::new(1.0, 1.0)).unwrap().value;
        assert!((g.purity() - 1.0).abs() < 1e-10);
        assert!((operator_norm(&g.as_operator()).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn translation_eigenvector_phase() {
        let s = make_space(1.0, 64, 1).unwrap();
        let xi = PhasePoint::new(1.0, 0.0);
        let eta = PhasePoint::new(0.0, 1.0);
        let w = weyl_operator(&s, eta).unwrap().value;
        let t = phase_space_translate(&s, &w, xi).unwrap();
        // sigma((1,0),(0,1)) = -1
        let want = w.scale(c64::cis(-1.0));
        assert!(block_norm(&t.sub(&want).unwrap(), 32).unwrap() < 1e-6);
    }

    #[test]
    fn translation_group_law() {
        let s = make_space(1.0, 64, 1).unwrap();
        let x = crate::fock::function_of_position(&s, &|q: f64| q.cos()).unwrap();
        let xi = PhasePoint::new(0.4, -0.3);
        let eta = PhasePoint::new(-0.2, 0.5);
        let lhs = phase_space_translate(&s, &phase_space_translate(&s, &x, eta).unwrap(), xi).unwrap();
        let rhs = phase_space_translate(&s, &x, xi + eta).unwrap();
        assert!(block_norm(&lhs.sub(&rhs).unwrap(), 24).unwrap() < 1e-8);
    }

    #[test]
    fn unitary_norm() {
        let s = make_space(1.0, 64, 1).unwrap();
        let w = weyl_operator(&s, PhasePoint::new(1.0, 0.5)).unwrap();
        assert!(w.defect < 1e-12);
        assert!((block_norm(&w.value, 32).unwrap() - 1.0).abs() < 1e-6);
        assert!((operator_norm(&FockOperator::identity(&s)).unwrap() - 1.0).abs() < 1e-14);
    }
}
