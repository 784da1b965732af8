//! Truncation dimensions.
//!
//! A coherent state at distance R from the origin has Poisson(A) level
//! occupation with A = R^2/(2 hbar). Keeping A + 8 sqrt(A) + 16 levels leaves a
//! tail mass below 1e-13 for every A, which is what the closed-form tests need.

use statrs::function::gamma::gamma_ur;

use crate::{Error, Result};

/// Upper bound on any dimension chosen by policy.
pub const MAX_DIM: usize = 2048;

/// Levels needed to hold a Poisson(a) occupation.
pub fn coherent_cutoff(a: f64) -> usize {
    (a + 8.0 * a.sqrt() + 16.0).ceil() as usize
}

/// Dimension for states and Weyl operators reaching phase-space radius `reach`.
pub fn dim_for_reach(hbar: f64, reach: f64) -> Result<usize> {
    capped(coherent_cutoff(reach * reach / (2.0 * hbar)))
}

/// Extra room for operators built by functional calculus of truncated Q, P or
/// H, whose top levels are distorted by the cut.
pub fn functional_dim(base: usize) -> Result<usize> {
    capped((1.25 * base as f64).ceil() as usize + 40)
}

pub fn capped(needed: usize) -> Result<usize> {
    if needed > MAX_DIM {
        Err(Error::DimensionPolicy { needed, cap: MAX_DIM })
    } else {
        Ok(needed.max(2))
    }
}

/// Largest B such that every level n < B has Husimi mass at most `tol` outside
/// the disk of radius `radius`. Level n's Husimi density is Gamma(n+1)
/// distributed in |xi|^2/(2 hbar), so the worst level is B-1.
pub fn reliable_levels(hbar: f64, radius: f64, tol: f64) -> usize {
    let a = radius * radius / (2.0 * hbar);
    let mut b = 0;
    while b < MAX_DIM && gamma_ur((b + 1) as f64, a) <= tol {
        b += 1;
    }
    b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cutoff_tail_is_negligible() {
        use statrs::function::gamma::gamma_lr;
        for a in [0.5, 8.0, 64.0, 512.0] {
            let n = coherent_cutoff(a);
            // P(Poisson(a) >= n) = P(Gamma(n) <= a)
            assert!(gamma_lr(n as f64, a) < 1e-13, "a={a}");
        }
    }

    #[test]
    fn reliable_levels_grow_with_radius() {
        let b4 = reliable_levels(1.0, 4.0, 1e-6);
        let b8 = reliable_levels(1.0, 8.0, 1e-6);
        assert!(b4 < b8);
        assert!(gamma_ur(b8 as f64, 32.0) <= 1e-6);
        assert!(gamma_ur((b8 + 1) as f64, 32.0) > 1e-6);
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(dim_for_reach(1e-4, 10.0), Err(Error::DimensionPolicy { .. })));
    }
}
