use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma_lr;

use crate::fock::{block_norm, displacement_rows, FockOperator, FockSpace, PhasePoint};
use crate::phasespace::AngularSampling;
use crate::{linalg, Error, Result};

/// ||alpha_xi(X) - X|| on the first `levels` levels. Uses the exact rows of
/// W(xi), so only truncation of X itself enters, and only through levels the
/// shift couples to the block.
fn translation_gap(space: &FockSpace, x: &FockOperator, xi: PhasePoint, levels: usize) -> Result<f64> {
    let b = levels.min(space.dim());
    let wb = displacement_rows(b, space.dim(), xi.alpha(space.hbar()));
    let t = linalg::mul_adj(linalg::mul(wb.as_ref(), x.matrix().as_ref()).as_ref(), wb.as_ref());
    let xb = x.block(b);
    let d = &t - &xb;
    crate::fock::matrix_norm(&d, x.is_self_adjoint())
}

/// m_hbar(X, lambda) sampled at the points of `sampling` (a lower bound), with
/// norms taken on the first `levels` levels.
pub fn quantum_modulus(
    space: &FockSpace,
    x: &FockOperator,
    lambda: f64,
    sampling: &AngularSampling,
    levels: usize,
) -> Result<f64> {
    space.check_same(x.space())?;
    if !(lambda >= 0.0) {
        return Err(Error::InvalidParameter { key: "lambda".into(), reason: format!("must be >= 0, got {lambda}") });
    }
    let gaps = sampling
        .points(lambda)
        .into_par_iter()
        .map(|xi| translation_gap(space, x, xi, levels))
        .collect::<Result<Vec<_>>>()?;
    Ok(gaps.into_iter().fold(0.0, f64::max))
}

/// Sampled modulus of continuity: nondecreasing `values` at increasing
/// `lambdas`, capped by `cap` = 2||X||, which also bounds it beyond the range.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModulusProfile {
    pub lambdas: Vec<f64>,
    pub values: Vec<f64>,
    /// None on the classical side.
    pub hbar: Option<f64>,
    pub cap: f64,
}

impl ModulusProfile {
    pub fn new(lambdas: Vec<f64>, values: Vec<f64>, hbar: Option<f64>, cap: f64) -> Result<Self> {
        if lambdas.len() != values.len() || lambdas.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidParameter { key: "profile".into(), reason: "lambdas must increase and match values".into() });
        }
        // enforce the two invariants: running max, then the cap
        let mut run = 0.0_f64;
        let values = values
            .into_iter()
            .map(|v| {
                run = run.max(v);
                run.min(cap)
            })
            .collect();
        Ok(Self { lambdas, values, hbar, cap })
    }

    /// Profile of a modulus that vanishes identically.
    pub fn zero(hbar: Option<f64>) -> Self {
        Self { lambdas: vec![], values: vec![], hbar, cap: 0.0 }
    }

    /// Upper step interpolation: the value at the first sampled lambda at or
    /// above the argument; the cap beyond the range.
    pub fn value_at(&self, lambda: f64) -> f64 {
        if lambda <= 0.0 {
            return 0.0;
        }
        match self.lambdas.iter().position(|&l| l >= lambda) {
            Some(j) => self.values[j],
            None => self.cap,
        }
    }
}

/// Quantum modulus profile on the radial ladder r_j = sqrt(lambda_max) 2^{-j/2},
/// j < rungs, each radius sampled at the directions of `sampling`.
pub fn modulus_profile(
    space: &FockSpace,
    x: &FockOperator,
    lambda_max: f64,
    rungs: usize,
    sampling: &AngularSampling,
    levels: usize,
) -> Result<ModulusProfile> {
    let dirs = sampling.directions();
    let r0 = lambda_max.sqrt();
    let radii: Vec<f64> = (0..rungs).rev().map(|j| r0 * 0.5f64.powf(j as f64 / 2.0)).collect();
    let jobs: Vec<(usize, PhasePoint)> =
        radii.iter().enumerate().flat_map(|(i, &r)| dirs.iter().map(move |d| (i, r * *d))).collect();
    let gaps = jobs
        .par_iter()
        .map(|(i, xi)| translation_gap(space, x, *xi, levels).map(|g| (*i, g)))
        .collect::<Result<Vec<_>>>()?;
    let mut per_radius = vec![0.0_f64; radii.len()];
    for (i, g) in gaps {
        per_radius[i] = per_radius[i].max(g);
    }
    let cap = 2.0 * block_norm(x, levels)?;
    ModulusProfile::new(radii.iter().map(|r| r * r).collect(), per_radius, Some(space.hbar()), cap)
}

/// int mu_d(dtheta) m(2 hbar' theta) for the step interpolation of the profile,
/// summed exactly against the Gamma(d) distribution function.
pub fn estim_bound(profile: &ModulusProfile, hbar_prime: f64, d: usize) -> f64 {
    let d = d.max(1) as f64;
    let cdf = |lambda: f64| gamma_lr(d, lambda / (2.0 * hbar_prime));
    let mut total = 0.0;
    let mut prev = 0.0;
    for (l, v) in profile.lambdas.iter().zip(&profile.values) {
        let c = cdf(*l);
        total += v * (c - prev);
        prev = c;
    }
    total + profile.cap * (1.0 - prev)
}

/// Moduli m_hbar(A_hbar, lambda) for every scheduled hbar and lambda.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EquicontinuityTable {
    pub hbars: Vec<f64>,
    pub lambdas: Vec<f64>,
    /// values[i][j] at hbars[i], lambdas[j]
    pub values: Vec<Vec<f64>>,
    pub equicontinuous: bool,
}

impl EquicontinuityTable {
    /// Is there a scanned lambda > 0 and an hbar cut such that every modulus
    /// at smaller hbar stays at or below eps?
    pub fn achieves(&self, eps: f64) -> bool {
        let mut order: Vec<usize> = (0..self.hbars.len()).collect();
        order.sort_by(|&a, &b| self.hbars[a].total_cmp(&self.hbars[b]));
        (0..self.lambdas.len()).filter(|&j| self.lambdas[j] > 0.0).any(|j| {
            // the smallest hbar must be inside every tail, so check it first
            order.first().is_some_and(|&i| self.values[i][j] <= eps)
        })
    }
}

/// Scans moduli of an hbar-sequence. `generator` returns the operator at a
/// given hbar and the number of reliable levels to measure it on. Verdict:
/// equicontinuous when eps = 0.5 and eps = 0.1 are both achieved.
pub fn equicontinuity_scan(
    generator: &(dyn Fn(f64) -> Result<(FockOperator, usize)> + Sync),
    schedule: &[f64],
    lambdas: &[f64],
    sampling: &AngularSampling,
) -> Result<EquicontinuityTable> {
    let values = schedule
        .iter()
        .map(|&h| {
            let (x, levels) = generator(h)?;
            lambdas.iter().map(|&l| quantum_modulus(x.space(), &x, l, sampling, levels)).collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = EquicontinuityTable { hbars: schedule.to_vec(), lambdas: lambdas.to_vec(), values, equicontinuous: false };
    table.equicontinuous = table.achieves(0.5) && table.achieves(0.1);
    Ok(table)
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{make_space, policy, scaled_weyl_observable, weyl_operator};
    use crate::phasespace::mu_d_integral;

    #[test]
    fn modulus_of_scaled_weyl_is_hbar_independent() {
        let want = 2.0 * 0.5f64.sin();
        for hbar in [1.0, 0.25] {
            let s = make_space(hbar, policy::dim_for_reach(hbar, 3.0).unwrap(), 1).unwrap();
            let e = scaled_weyl_observable(&s, PhasePoint::new(0.0, 1.0)).unwrap().value;
            let sampling = AngularSampling::new(16);
            assert_eq!(quantum_modulus(&s, &e, 0.0, &sampling, 10).unwrap(), 0.0);
            let m = quantum_modulus(&s, &e, 1.0, &sampling, 10).unwrap();
            assert!((m - want).abs() < 1e-6, "hbar={hbar} m={m}");
        }
    }

    #[test]
    fn rapidly_oscillating_unitary_saturates() {
        let hbar = 1.0 / 32.0;
        let s = make_space(hbar, policy::dim_for_reach(hbar, 1.8).unwrap(), 1).unwrap();
        let w = weyl_operator(&s, PhasePoint::new(1.0, 0.0)).unwrap().value;
        let m = quantum_modulus(&s, &w, 0.5, &AngularSampling::new(32), 12).unwrap();
        assert!(m >= 1.9, "{m}");
    }

    #[test]
    fn profile_invariants_and_bound() {
        let hbar = 0.5;
        let s = make_space(hbar, policy::dim_for_reach(hbar, 5.0).unwrap(), 1).unwrap();
        let eta = PhasePoint::new(0.0, 1.0);
        let e = scaled_weyl_observable(&s, eta).unwrap().value;
        let p = modulus_profile(&s, &e, 24.0 * hbar, 12, &AngularSampling::new(16), 12).unwrap();
        assert!(p.values.windows(2).all(|w| w[0] <= w[1]));
        assert!(p.values.iter().all(|&v| v <= p.cap));
        let bound = estim_bound(&p, hbar, 1);
        assert!(bound <= p.cap + 1e-12);
        // ||X - j_hbar0 j0hbar X|| = 1 - e^{-hbar eta^2/2}
        assert!(1.0 - (-hbar / 2.0f64).exp() <= bound);
        let quad = mu_d_integral(&|t| p.value_at(2.0 * hbar * t), 1);
        assert!((quad - bound).abs() < 1e-6, "{quad} {bound}");
        assert_eq!(estim_bound(&ModulusProfile::zero(Some(hbar)), hbar, 1), 0.0);
    }
}
