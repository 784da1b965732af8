//! Time evolution, resolvents, and the oscillating counterexample.

use std::f64::consts::PI;

use super::{
    all_rows_check, choose_dim, cut_defect, fmt_num, nonincreasing_check, per_hbar, Check, ExperimentConfig, Outcome,
    ReportRow,
};
use crate::correspondence::{husimi_symbol, quantum_modulus};
use crate::fock::{
    oscillator_hamiltonian, operator_norm, policy, resolvent as quantum_resolvent, scaled_weyl_observable, schrodinger_hamiltonian,
    weyl_operator, FockSpace, Propagator,
};
use crate::phasespace::{
    classical_evolve, sup_distance, sup_norm, AngularSampling, Atom, ClassicalHamiltonian,
    PhaseSpaceFunction, RealFn,
};
use crate::{c64, Result};

pub(crate) fn evolution(cfg: &ExperimentConfig) -> Result<Outcome> {
    let w = cfg.window()?;
    let eta = cfg.point("eta")?;
    let times = cfg.numbers("times")?;
    let g = cfg.number("quartic")?;
    let tq = cfg.number("t")?;
    let osc = ClassicalHamiltonian::oscillator();
    let quartic = ClassicalHamiltonian::quartic(g);
    let a0 = PhaseSpaceFunction::WeylExponential(eta);
    let emax = w.nodes().into_iter().map(|xi| quartic.energy(xi)).fold(0.0, f64::max);

    let rows = per_hbar(cfg.schedule.values(), |hbar| {
        let mut out = Vec::new();
        let damp = (-hbar * eta.norm_sq() / 4.0).exp();
        let ah0 = PhaseSpaceFunction::FourierMeasure(vec![Atom::new(c64::new(damp, 0.0), eta)]);

        // The oscillator is diagonal, so truncation commutes with evolution.
        let reach = w.radius() + hbar * eta.norm();
        let n = choose_dim(cfg, policy::dim_for_reach(hbar, reach))?;
        let space = FockSpace::new(hbar, n)?;
        let e = scaled_weyl_observable(&space, eta)?;
        let prop = Propagator::new(&oscillator_hamiltonian(&space))?;
        let defect = e.defect + cut_defect(n, hbar, reach, 1.0);
        for &t in &times {
            let at = prop.evolve(&e.value, t)?;
            let sym = husimi_symbol(&space, &at, &w)?;
            let exact = sup_distance(&sym.value, &classical_evolve(&osc, &ah0, t), &w)?;
            let limit = sup_distance(&sym.value, &classical_evolve(&osc, &a0, t), &w)?;
            let tag = fmt_num(t);
            out.push(ReportRow::new(hbar, n, &format!("oscillator_exact(t={tag})"), exact, Some(0.0), defect));
            out.push(ReportRow::new(hbar, n, &format!("oscillator_limit(t={tag})"), limit, Some(1.0 - damp), defect));
        }
        let back = prop.evolve(&e.value, 2.0 * PI)?;
        let period = operator_norm(&back.sub(&e.value)?)?;
        out.push(ReportRow::new(hbar, n, "periodicity", period, Some(0.0), e.defect));

        // Quartic: functional-calculus Hamiltonian, so the functional margin.
        let reach_q = (2.0 * emax).sqrt() + hbar * eta.norm();
        let nq = choose_dim(cfg, policy::functional_dim(policy::dim_for_reach(hbar, reach_q)?))?;
        let space_q = FockSpace::new(hbar, nq)?;
        let h = schrodinger_hamiltonian(&space_q, 1.0, &|x| 0.5 * x * x + g * x.powi(4))?;
        let eq = scaled_weyl_observable(&space_q, eta)?;
        let at = Propagator::new(&h)?.evolve(&eq.value, tq)?;
        let sym = husimi_symbol(&space_q, &at, &w)?;
        let limit = sup_distance(&sym.value, &classical_evolve(&quartic, &a0, tq), &w)?;
        let smeared = sup_distance(&sym.value, &classical_evolve(&quartic, &ah0, tq), &w)?;
        let dq = eq.defect + cut_defect(nq, hbar, reach_q, 1.0);
        out.push(ReportRow::new(hbar, nq, "quartic_limit", limit, None, dq));
        out.push(ReportRow::new(hbar, nq, "quartic_exactness", smeared, None, dq));
        Ok(out)
    })?;

    let tol_exact = cfg.number("tol_exact")?;
    let mut checks: Vec<Check> = times
        .iter()
        .map(|&t| {
            let m = format!("oscillator_exact(t={})", fmt_num(t));
            all_rows_check(&rows, &m, &m, |r| r.value <= tol_exact)
        })
        .collect();
    let tol_period = cfg.number("tol_period")?;
    checks.push(all_rows_check(&rows, "periodicity", "periodicity", |r| r.value <= tol_period));
    checks.push(nonincreasing_check(&rows, "quartic_limit"));
    let tol_final = cfg.number("tol_final")?;
    let last = rows.iter().rev().find(|r| r.metric == "quartic_limit").map(|r| r.value).unwrap_or(f64::NAN);
    checks.push(Check::new("quartic_limit_final", last <= tol_final, format!("{last:.4e} <= {tol_final}")));
    Ok(Outcome { primary: "quartic_limit", rows, checks, notes: vec![], schedule: None })
}

fn potential(name: &str) -> (RealFn, fn(f64) -> f64) {
    match name {
        "cos" => (RealFn::cos(1.0), f64::cos),
        _ => (RealFn::zero(), |_| 0.0),
    }
}

pub(crate) fn resolvent_metric(name: &str) -> String {
    format!("resolvent_{name}")
}

pub(crate) fn resolvent(cfg: &ExperimentConfig) -> Result<Outcome> {
    let w = cfg.window()?;
    let z = cfg.complex("z")?;
    let names = cfg.choices("potentials")?;
    if z.im == 0.0 {
        return Err(crate::Error::RealSpectralParameter);
    }
    let rows = per_hbar(cfg.schedule.values(), |hbar| {
        let n = choose_dim(cfg, policy::functional_dim(policy::dim_for_reach(hbar, w.radius())?))?;
        let space = FockSpace::new(hbar, n)?;
        let mut out = Vec::new();
        for name in &names {
            let (v, vf) = potential(name);
            let h = schrodinger_hamiltonian(&space, 1.0, &vf)?;
            let r = quantum_resolvent(&h, z)?;
            let sym = husimi_symbol(&space, &r, &w)?;
            let r0 = PhaseSpaceFunction::ClassicalResolvent { mass: 1.0, potential: v, z };
            let value = sup_distance(&sym.value, &r0, &w)?;
            let norm = 1.0 / z.im.abs();
            out.push(ReportRow::new(hbar, n, &resolvent_metric(name), value, None, cut_defect(n, hbar, w.radius(), norm)));
        }
        Ok(out)
    })?;

    // Coulomb: at xi = (x_n, p_n) on the zero-energy curve p^2/2 = 1/|x| the
    // resolvent has modulus 1/|z|; a shift by x_n (<= eps^2) kills it.
    let coulomb = PhaseSpaceFunction::ClassicalResolvent {
        mass: 1.0,
        potential: RealFn::new("coulomb", |x: f64| -1.0 / x.abs()),
        z,
    };
    let floor = cfg.number("coulomb_floor")?;
    let mut coulomb_rows = Vec::new();
    for eps in cfg.numbers("coulomb_eps")? {
        let p = 10.0 / (eps * eps);
        let x = 2.0 / (p * p);
        let xi = crate::fock::PhasePoint::new(x, p);
        let shifted = crate::fock::PhasePoint::new(2.0 * x, p);
        let gap = (coulomb.evaluate(xi)? - coulomb.evaluate(shifted)?).norm();
        coulomb_rows.push(ReportRow::new(0.0, 0, &format!("coulomb_modulus(eps={})", fmt_num(eps)), gap, Some(1.0 / z.norm()), 0.0));
    }
    let worst = coulomb_rows.iter().map(|r| r.value).fold(f64::INFINITY, f64::min);

    let tol_final = cfg.number("tol_final")?;
    let mut checks = Vec::new();
    for name in &names {
        let m = resolvent_metric(name);
        checks.push(nonincreasing_check(&rows, &m));
        let last = rows.iter().rev().find(|r| r.metric == m).map(|r| r.value).unwrap_or(f64::NAN);
        checks.push(Check::new(&format!("{m}_final"), last <= tol_final, format!("{last:.4e} <= {tol_final}")));
    }
    checks.push(Check::new(
        "coulomb_not_uniformly_continuous",
        worst >= floor,
        format!("smallest modulus lower bound {worst:.4} >= {floor}"),
    ));
    let primary = names.last().map(|n| if n == "cos" { "resolvent_cos" } else { "resolvent_zero" }).unwrap_or("resolvent_zero");
    let mut all = rows;
    all.extend(coulomb_rows);
    Ok(Outcome { primary, rows: all, checks, notes: vec![], schedule: None })
}

pub(crate) fn oscillation_counterexample(cfg: &ExperimentConfig) -> Result<Outcome> {
    let w = cfg.window()?;
    let eta = cfg.point("eta")?;
    let lambda = cfg.number("lambda")?;
    let sampling = AngularSampling::seeded(cfg.count("angles")?, cfg.seed);
    let rows = per_hbar(cfg.schedule.values(), |hbar| {
        let reach = w.radius() + eta.norm();
        let n = choose_dim(cfg, policy::dim_for_reach(hbar, reach))?;
        let space = FockSpace::new(hbar, n)?;
        let x = weyl_operator(&space, eta)?;
        let sym = husimi_symbol(&space, &x.value, &w)?;
        let husimi = sup_norm(&sym.value, &w)?;
        let levels = policy::coherent_cutoff(lambda / (2.0 * hbar)).min(n);
        let m = quantum_modulus(&space, &x.value, lambda, &sampling, levels)?;
        // sup over |xi| <= sqrt(lambda) of |e^{i sigma(xi, eta)/hbar} - 1|
        let phase = lambda.sqrt() * eta.norm() / hbar;
        let m_ref = if phase >= PI { 2.0 } else { 2.0 * (phase / 2.0).sin() };
        let defect = x.defect + cut_defect(n, hbar, reach, 1.0);
        Ok(vec![
            ReportRow::new(hbar, n, "husimi_norm", husimi, Some((-eta.norm_sq() / (4.0 * hbar)).exp()), defect),
            ReportRow::new(hbar, n, "modulus", m, Some(m_ref), defect),
        ])
    })?;
    let hmax = cfg.number("hbar_max")?;
    let tol = cfg.number("tol_husimi")?;
    let floor = cfg.number("modulus_floor")?;
    let small: Vec<ReportRow> = rows.iter().filter(|r| r.hbar <= hmax * (1.0 + 1e-12)).cloned().collect();
    let checks = vec![
        all_rows_check(&small, "husimi_norm", "husimi_vanishes", |r| r.value <= r.reference.unwrap_or(0.0) + tol),
        all_rows_check(&small, "modulus", "modulus_stays_large", |r| r.value >= floor),
    ];
    let notes = vec![format!(
        "assertions apply for hbar <= {hmax}: symbols vanish while the modulus stays near 2, so the sequence is not convergent"
    )];
    Ok(Outcome { primary: "husimi_norm", rows, checks, notes, schedule: None })
}
