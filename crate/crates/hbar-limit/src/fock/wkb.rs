//! Projection of a WKB wavefunction A(y) e^{iS(y)/hbar} onto the number basis.
//!
//! <n|phi> = int psi_n(y) phi(y) dy with psi_n(y) = hbar^{-1/4} h_n(y/sqrt(hbar))
//! and h_n the Hermite functions. Gauss-Hermite quadrature on the nodes u_k of
//! the truncated position matrix gives
//!   <n|phi> ~ hbar^{1/4} sum_k w_k h_n(u_k) phi(sqrt(hbar) u_k),
//! w_k = 1 / sum_{j<N} h_j(u_k)^2 (Christoffel weight times e^{u_k^2}).
//! h_n(u) is tiny for n << u^2 at the outer nodes, so the recurrence carries a
//! log scale like the displacement ladder.

use faer::c64;

use super::{FockSpace, StateVector};
use crate::{quadrature, Error, Result, WithDefect};

const RESCALE_AT: f64 = 1e150;
const LN_RESCALE: f64 = 345.387_763_949_106_8;

/// h_n(u) for n < out.len(), from h_0 = pi^{-1/4} e^{-u^2/2} and
/// h_{n+1} = sqrt(2/(n+1)) u h_n - sqrt(n/(n+1)) h_{n-1}.
fn hermite_functions(u: f64, out: &mut [f64]) {
    let mut log_scale = -0.25 * std::f64::consts::PI.ln() - 0.5 * u * u;
    let mut prev = 0.0_f64;
    let mut cur = 1.0_f64;
    out[0] = log_scale.exp();
    for n in 0..out.len() - 1 {
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * u * cur - (nf / (nf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE_AT {
            prev /= RESCALE_AT;
            cur /= RESCALE_AT;
            log_scale += LN_RESCALE;
        }
        out[n + 1] = cur * log_scale.exp();
    }
}

/// Unit vector approximating A(y) e^{iS(y)/hbar}, with A normalized on
/// [-window, window] and set to zero outside. The defect is the mass the
/// truncated basis failed to capture, |1 - sum |c_n|^2|.
pub fn build_wkb_vector(
    space: &FockSpace,
    amplitude: &dyn Fn(f64) -> f64,
    action: &dyn Fn(f64) -> f64,
    window: f64,
) -> Result<WithDefect<StateVector>> {
    if !(window.is_finite() && window > 0.0) {
        return Err(Error::InvalidWindow(format!("wkb window {window}")));
    }
    let mass = quadrature::integrate(&|y| amplitude(y).powi(2), -window, window, 1e-12);
    if !(mass.is_finite() && mass > 0.0) {
        return Err(Error::NonFinite(format!("amplitude mass {mass}")));
    }
    let norm = mass.sqrt();
    let hbar = space.hbar();
    let sq = hbar.sqrt();
    let n = space.dim();
    let nodes = &space.position_basis()?.nodes;

    let mut coeffs = vec![c64::new(0.0, 0.0); n];
    let mut h = vec![0.0; n];
    for &q in nodes {
        if q.abs() > window {
            continue;
        }
        let a = amplitude(q) / norm;
        let s = action(q);
        if !a.is_finite() || !s.is_finite() {
            return Err(Error::NonFinite(format!("wkb data at y = {q}")));
        }
        if a == 0.0 {
            continue;
        }
        hermite_functions(q / sq, &mut h);
        let w = 1.0 / h.iter().map(|v| v * v).sum::<f64>();
        let phi = c64::from_polar(a * w * hbar.powf(0.25), s / hbar);
        for (c, &hn) in coeffs.iter_mut().zip(&h) {
            *c += phi * hn;
        }
    }
    let captured: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
    let defect = (1.0 - captured).abs();
    Ok(WithDefect::new(StateVector::new(space, coeffs)?, defect))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{make_space, policy};

    fn ground(y: f64) -> f64 {
        std::f64::consts::PI.powf(-0.25) * (-0.5 * y * y).exp()
    }

    #[test]
    fn ground_profile_gives_vacuum() {
        let s = make_space(1.0, 40, 1).unwrap();
        let v = build_wkb_vector(&s, &ground, &|_| 0.0, 10.0).unwrap();
        assert!((v.value.amplitudes()[0].norm() - 1.0).abs() < 1e-6);
        assert!(v.defect < 1e-6);
    }

    #[test]
    fn linear_action_shifts_momentum() {
        let hbar = 0.1;
        let dim = policy::dim_for_reach(hbar, 5.0).unwrap();
        let s = make_space(hbar, dim, 1).unwrap();
        let v = build_wkb_vector(&s, &ground, &|y| y, 8.0).unwrap();
        assert!(v.defect < 1e-6, "defect {}", v.defect);
        let p = crate::fock::FockOperator::new(&s, s.momentum().clone()).unwrap();
        let mean = v.value.expectation(&p).unwrap();
        assert!((mean.re - 1.0).abs() < 1e-3, "{mean}");
        let q = crate::fock::FockOperator::new(&s, s.position().clone()).unwrap();
        assert!(v.value.expectation(&q).unwrap().norm() < 1e-8);
    }
}
