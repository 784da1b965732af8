//! Experiments comparing Husimi symbols of quantized observables with their
//! classical counterparts on a window.

use super::{
    all_rows_check, choose_dim, cut_defect, nonincreasing_check, per_hbar, rate_check, reference_check, ExperimentConfig,
    Outcome, ReportRow,
};
use crate::correspondence::{antiwick_closed_form, compare, husimi_symbol, QuadratureGrid};
use crate::fock::{
    function_of_momentum, function_of_position, policy, scaled_weyl_observable, FockOperator, FockSpace, PhasePoint,
};
use crate::phasespace::{
    fourier_product, poisson_bracket, sup_distance, symplectic_form, Atom, PhaseSpaceFunction, RealFn,
};
use crate::{c64, linalg, Error, Result};

fn damped(atoms: &[Atom], hbar: f64) -> PhaseSpaceFunction {
    PhaseSpaceFunction::FourierMeasure(
        atoms.iter().map(|a| Atom::new(a.weight * (-hbar * a.eta.norm_sq() / 4.0).exp(), a.eta)).collect(),
    )
}

fn one(eta: PhasePoint) -> Vec<Atom> {
    vec![Atom::new(c64::new(1.0, 0.0), eta)]
}

fn quantized(space: &FockSpace, atoms: &[Atom]) -> Result<FockOperator> {
    antiwick_closed_form(space, &PhaseSpaceFunction::FourierMeasure(atoms.to_vec()))?
        .ok_or_else(|| Error::Unsupported { op: "closed-form quantization", form: "atoms".into() })
}

pub(crate) fn position_momentum(cfg: &ExperimentConfig) -> Result<Outcome> {
    let w = cfg.window()?;
    let k = cfg.number("k")?;
    let rows = per_hbar(cfg.schedule.values(), |hbar| {
        let n = choose_dim(cfg, policy::functional_dim(policy::dim_for_reach(hbar, w.radius())?))?;
        let space = FockSpace::new(hbar, n)?;
        let reference = 1.0 - (-hbar * k * k / 4.0).exp();
        let mut out = Vec::new();
        for (name, op, f0) in [
            ("position", function_of_position(&space, &|x| (k * x).cos())?, PhaseSpaceFunction::Position(RealFn::cos(k))),
            ("momentum", function_of_momentum(&space, &|p| (k * p).cos())?, PhaseSpaceFunction::Momentum(RealFn::cos(k))),
        ] {
            let sym = husimi_symbol(&space, &op, &w)?;
            let value = sup_distance(&sym.value, &f0, &w)?;
            out.push(ReportRow::new(hbar, n, name, value, Some(reference), cut_defect(n, hbar, w.radius(), 1.0)));
        }
        Ok(out)
    })?;
    let tol = cfg.number("tol_reference")?;
    let checks = vec![
        reference_check(&rows, "position", tol),
        reference_check(&rows, "momentum", tol),
        nonincreasing_check(&rows, "position"),
        nonincreasing_check(&rows, "momentum"),
    ];
    Ok(Outcome { primary: "position", rows, checks, notes: vec![], schedule: None })
}

fn atom_limit(cfg: &ExperimentConfig, atoms: Vec<Atom>, metric: &'static str) -> Result<Outcome> {
    let w = cfg.window()?;
    let reach = atoms.iter().map(|a| a.eta.norm()).fold(0.0, f64::max);
    let f0 = PhaseSpaceFunction::FourierMeasure(atoms.clone());
    let rows = per_hbar(cfg.schedule.values(), |hbar| {
        let n = choose_dim(cfg, policy::dim_for_reach(hbar, w.radius() + hbar * reach))?;
        let space = FockSpace::new(hbar, n)?;
        let mut op = FockOperator::zero(&space);
        let mut defect = 0.0;
        for a in &atoms {
            let e = scaled_weyl_observable(&space, a.eta)?;
            defect += a.weight.norm() * e.defect;
            op = op.add(&e.value.scale(a.weight))?;
        }
        let sym = husimi_symbol(&space, &op, &w)?;
        let value = sup_distance(&sym.value, &f0, &w)?;
        let reference = sup_distance(&damped(&atoms, hbar), &f0, &w)?;
        let total: f64 = atoms.iter().map(|a| a.weight.norm()).sum();
        defect += cut_defect(n, hbar, w.radius(), total);
        Ok(vec![ReportRow::new(hbar, n, metric, value, Some(reference), defect)])
    })?;
    let tol = cfg.number("tol_reference")?;
    let checks = vec![reference_check(&rows, metric, tol), nonincreasing_check(&rows, metric)];
    Ok(Outcome { primary: metric, rows, checks, notes: vec![], schedule: None })
}

pub(crate) fn weyl_limit(cfg: &ExperimentConfig) -> Result<Outcome> {
    atom_limit(cfg, one(cfg.point("eta")?), "weyl_distance")
}

pub(crate) fn fourier_measure(cfg: &ExperimentConfig) -> Result<Outcome> {
    atom_limit(cfg, cfg.atoms("atoms")?, "fourier_distance")
}

pub(crate) fn product(cfg: &ExperimentConfig) -> Result<Outcome> {
    let w = cfg.window()?;
    let eta = cfg.point("eta")?;
    let etap = cfg.point("eta_prime")?;
    let (a0, b0) = (one(eta), one(etap));
    let ab0 = PhaseSpaceFunction::FourierMeasure(fourier_product(&a0, &b0));
    let sigma = symplectic_form(eta, etap);
    let rows = per_hbar(cfg.schedule.values(), |hbar| {
        let reach = w.radius() + hbar * (eta.norm() + etap.norm());
        let n = choose_dim(cfg, policy::dim_for_reach(hbar, reach))?;
        let space = FockSpace::new(hbar, n)?;
        let ab = quantized(&space, &a0)?.mul(&quantized(&space, &b0)?)?;
        let sym = husimi_symbol(&space, &ab, &w)?;
        let value = sup_distance(&sym.value, &ab0, &w)?;
        let decay = -hbar * (eta.norm_sq() + etap.norm_sq() + (eta + etap).norm_sq()) / 4.0;
        let reference = (c64::new(decay, hbar * sigma / 2.0).exp() - c64::new(1.0, 0.0)).norm();
        Ok(vec![ReportRow::new(hbar, n, "product_distance", value, Some(reference), cut_defect(n, hbar, reach, 1.0))])
    })?;
    let checks = vec![
        reference_check(&rows, "product_distance", cfg.number("tol_reference")?),
        nonincreasing_check(&rows, "product_distance"),
        rate_check(&rows, "product_distance", cfg.number("rate_low")?, cfg.number("rate_high")?),
    ];
    Ok(Outcome { primary: "product_distance", rows, checks, notes: vec![], schedule: None })
}

pub(crate) fn bracket(cfg: &ExperimentConfig) -> Result<Outcome> {
    let w = cfg.window()?;
    let eta = cfg.point("eta")?;
    let etap = cfg.point("eta_prime")?;
    let (a0, b0) = (one(eta), one(etap));
    let classical = poisson_bracket(&PhaseSpaceFunction::FourierMeasure(a0.clone()), &PhaseSpaceFunction::FourierMeasure(b0.clone()))?;
    let sigma = symplectic_form(eta, etap);
    let rows = per_hbar(cfg.schedule.values(), |hbar| {
        let reach = w.radius() + hbar * (eta.norm() + etap.norm());
        let n = choose_dim(cfg, policy::dim_for_reach(hbar, reach))?;
        let space = FockSpace::new(hbar, n)?;
        let i_over_h = c64::new(0.0, 1.0 / hbar);
        let exact = -(2.0 / hbar) * (hbar * sigma / 2.0).sin();

        // Factor of (i/hbar)[E(eta), E(eta')] along E(eta + eta'), on levels
        // whose coherent rings stay inside the window.
        let e1 = scaled_weyl_observable(&space, eta)?.value;
        let e2 = scaled_weyl_observable(&space, etap)?.value;
        let g = scaled_weyl_observable(&space, eta + etap)?.value;
        let k = e1.commutator(&e2)?.scale(i_over_h);
        let levels = policy::reliable_levels(hbar, w.radius(), 1e-12).clamp(2, n);
        let (kb, gb) = (k.block(levels), g.block(levels));
        let mut num = c64::new(0.0, 0.0);
        let mut den = 0.0;
        for j in 0..levels {
            for i in 0..levels {
                num += gb[(i, j)].conj() * kb[(i, j)];
                den += gb[(i, j)].norm_sqr();
            }
        }
        let factor = num / den;
        let residual = linalg::frobenius((&kb - &faer::Mat::from_fn(levels, levels, |i, j| gb[(i, j)] * factor)).as_ref())
            / den.sqrt();

        let c = quantized(&space, &a0)?.commutator(&quantized(&space, &b0)?)?.scale(i_over_h);
        let sym = husimi_symbol(&space, &c, &w)?;
        let value = sup_distance(&sym.value, &classical, &w)?;
        let damp = (-hbar * (eta.norm_sq() + etap.norm_sq() + (eta + etap).norm_sq()) / 4.0).exp();
        let reference = (damp * exact + sigma).abs();
        let defect = cut_defect(n, hbar, reach, 2.0 / hbar);
        Ok(vec![
            ReportRow::new(hbar, n, "factor", factor.re, Some(exact), residual + factor.im.abs()),
            ReportRow::new(hbar, n, "factor_deviation", (factor.re + sigma).abs(), Some((exact + sigma).abs()), residual),
            ReportRow::new(hbar, n, "bracket_distance", value, Some(reference), defect),
        ])
    })?;
    let tol_factor = cfg.number("tol_factor")?;
    let (fr, frt) = (cfg.number("factor_rate")?, cfg.number("factor_rate_tol")?);
    let (mr, mrt) = (cfg.number("metric_rate")?, cfg.number("metric_rate_tol")?);
    let checks = vec![
        all_rows_check(&rows, "factor", "factor_exact", |r| {
            (r.value - r.reference.unwrap_or(f64::NAN)).abs() <= tol_factor && r.defect <= tol_factor
        }),
        rate_check(&rows, "factor_deviation", fr - frt, fr + frt),
        reference_check(&rows, "bracket_distance", cfg.number("tol_reference")?),
        nonincreasing_check(&rows, "bracket_distance"),
        rate_check(&rows, "bracket_distance", mr - mrt, mr + mrt),
    ];
    Ok(Outcome { primary: "bracket_distance", rows, checks, notes: vec![], schedule: None })
}

pub(crate) fn basic_sequence(cfg: &ExperimentConfig) -> Result<Outcome> {
    let w = cfg.window()?;
    let hp = cfg.number("hbar_prime")?;
    let eta = cfg.point("eta")?;
    let spacing = cfg.number("spacing")?;
    let target = damped(&one(eta), hp);
    let rows = per_hbar(cfg.schedule.values(), |hbar| {
        let q = QuadratureGrid::for_radius(hbar, w.radius(), spacing)?;
        let n = choose_dim(cfg, policy::dim_for_reach(hbar, q.half_width))?;
        let space = FockSpace::new(hbar, n)?;
        let from = FockSpace::new(hp, policy::dim_for_reach(hp, q.half_width + hp * eta.norm())?)?;
        let x = scaled_weyl_observable(&from, eta)?;
        let xh = compare(&space, &from, &x.value, &q)?;
        let sym = husimi_symbol(&space, &xh.value, &w)?;
        let value = sup_distance(&sym.value, &target, &w)?;
        let reference = (-hp * eta.norm_sq() / 4.0).exp() * (1.0 - (-hbar * eta.norm_sq() / 2.0).exp());
        let defect = xh.defect + x.defect + cut_defect(n, hbar, w.radius(), 1.0);
        Ok(vec![ReportRow::new(hbar, n, "basic_distance", value, Some(reference), defect)])
    })?;
    let checks = vec![
        reference_check(&rows, "basic_distance", cfg.number("tol_reference")?),
        nonincreasing_check(&rows, "basic_distance"),
    ];
    Ok(Outcome { primary: "basic_distance", rows, checks, notes: vec![], schedule: None })
}
