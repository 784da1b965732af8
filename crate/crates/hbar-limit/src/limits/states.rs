//! Experiments on states: concentration, characteristic functions, WKB and
//! Wigner constructions.

use rayon::prelude::*;
use statrs::function::gamma::gamma_lr;

use super::{
    all_rows_check, choose_dim, cut_defect, slope_of as slope, nonincreasing_check, per_hbar,
    reference_check, Check, ExperimentConfig, HbarSchedule, Outcome, ReportRow,
};
use crate::correspondence::{
    antiwick_closed_form, characteristic_function, coherent_matrix, thermal_operator, wigner_inverse_quantize,
    QuadratureGrid,
};
use crate::fock::{
    build_wkb_vector, coherent_vector, oscillator_hamiltonian, policy, scaled_weyl_observable, schrodinger_hamiltonian,
    weyl_operator, FockOperator, FockSpace, PhasePoint, StateVector,
};
use crate::phasespace::{symplectic_form, PhaseSpaceFunction, WindowShape};
use crate::quadrature::{gauss_legendre, integrate};
use crate::{c64, linalg, Error, Result};

fn label(p: PhasePoint) -> String {
    format!("{}:{}", super::fmt_num(p.x), super::fmt_num(p.p))
}

pub(crate) fn point_measure(cfg: &ExperimentConfig) -> Result<Outcome> {
    let etas = cfg.points("etas")?;
    let xis = cfg.points("xis")?;
    let base = cfg.count("dim")?;
    let rows = per_hbar(cfg.schedule.values(), |hbar| {
        let n = choose_dim(cfg, policy::capped(base))?;
        let space = FockSpace::new(hbar, n)?;
        let vacuum = StateVector::basis(&space, 0)?;
        let table = characteristic_function(&vacuum, &etas)?;
        let damping = |eta: PhasePoint| (-hbar * eta.norm_sq() / 4.0).exp();
        let char_dev = table.max_deviation(&|eta| c64::new(damping(eta), 0.0));
        let point = table.max_deviation(&|_| c64::new(1.0, 0.0));
        let point_ref = etas.iter().map(|&e| 1.0 - damping(e)).fold(0.0, f64::max);
        let mut out = vec![
            ReportRow::new(hbar, n, "char_deviation", char_dev, Some(0.0), 0.0),
            ReportRow::new(hbar, n, "point_distance", point, Some(point_ref), 0.0),
        ];
        // Compression of a positive operator to the first n/2 levels, whose
        // entries are exact: 1 - cos(u) <= u^2/2 <= |xi|^2 H.
        let h = oscillator_hamiltonian(&space);
        let one = FockOperator::identity(&space);
        for &xi in &xis {
            let e = scaled_weyl_observable(&space, xi)?.value;
            let cos = e.add(&e.adjoint())?.scale(c64::new(0.5, 0.0));
            let op = cos.sub(&one)?.add(&h.scale(c64::new(xi.norm_sq(), 0.0)))?;
            let block = op.block(n / 2);
            let eig = linalg::hermitian_eigenvalues(block.as_ref())?;
            let min = eig.iter().copied().fold(f64::INFINITY, f64::min);
            out.push(ReportRow::new(hbar, n, &format!("cos_min_eigenvalue(xi={})", label(xi)), min, None, 0.0));
        }
        Ok(out)
    })?;
    let tol_char = cfg.number("tol_char")?;
    let tol_eig = cfg.number("tol_eig")?;
    let mut checks = vec![
        all_rows_check(&rows, "char_deviation", "characteristic_values", |r| r.value <= tol_char),
        reference_check(&rows, "point_distance", 1e-3),
        nonincreasing_check(&rows, "point_distance"),
    ];
    for &xi in &xis {
        let m = format!("cos_min_eigenvalue(xi={})", label(xi));
        checks.push(all_rows_check(&rows, &m, &m, |r| r.value >= -tol_eig));
    }
    Ok(Outcome { primary: "point_distance", rows, checks, notes: vec![], schedule: None })
}

pub(crate) fn eigenstate(cfg: &ExperimentConfig) -> Result<Outcome> {
    let levels = cfg.counts("levels")?;
    let lambda = cfg.number("lambda")?;
    let width = cfg.number("width")?;
    let mut sorted = levels.clone();
    sorted.sort_unstable();
    sorted.dedup();
    let hbars: Vec<f64> = sorted.iter().map(|&n| lambda / (n as f64 + 0.5)).collect();
    let schedule = HbarSchedule::new(hbars.clone())?;
    let (gx, gw) = gauss_legendre(64);
    let angles = 64;

    let parts = sorted
        .par_iter()
        .zip(hbars.par_iter())
        .map(|(&level, &hbar)| -> Result<Vec<ReportRow>> {
            let n = choose_dim(cfg, policy::functional_dim(policy::coherent_cutoff(level as f64 + 1.0)))?;
            if level >= n {
                return Err(Error::DimensionTooSmall(n));
            }
            let space = FockSpace::new(hbar, n)?;
            let h = schrodinger_hamiltonian(&space, 1.0, &|x| 0.5 * x * x)?;
            let (vals, vecs) = linalg::hermitian_eigen(h.matrix().as_ref())?;
            let psi: Vec<c64> = (0..n).map(|i| vecs[(i, level)]).collect();
            let energy_defect = (vals[level] - hbar * (level as f64 + 0.5)).abs() / hbar;

            // Annulus in s = |xi|^2: d^2 xi = ds dtheta / 2.
            let eps = width * (hbar * lambda).sqrt();
            let (s1, s2) = ((2.0 * lambda - eps).max(0.0), 2.0 * lambda + eps);
            let half = 0.5 * (s2 - s1);
            let mut nodes = Vec::with_capacity(gx.len() * angles);
            for j in 0..angles {
                let theta = 2.0 * std::f64::consts::PI * j as f64 / angles as f64;
                for &x in &gx {
                    let s = s1 + half * (x + 1.0);
                    nodes.push(PhasePoint::from_polar(s.sqrt(), theta));
                }
            }
            let c = coherent_matrix(hbar, n, &nodes);
            let q: Vec<f64> = (0..nodes.len())
                .map(|k| (0..n).map(|i| c[(i, k)].conj() * psi[i]).sum::<c64>().norm_sqr())
                .collect();
            // dxi/(2 pi hbar) = (ds / (2 hbar)) (dtheta / (2 pi))
            let marginals: Vec<f64> = (0..angles)
                .map(|j| (0..gx.len()).map(|i| gw[i] * half * q[j * gx.len() + i] / (2.0 * hbar)).sum())
                .collect();
            let mass = marginals.iter().sum::<f64>() / angles as f64;
            let k = level as f64 + 1.0;
            let reference = gamma_lr(k, s2 / (2.0 * hbar)) - gamma_lr(k, s1 / (2.0 * hbar));
            let mean = mass;
            let spread = marginals.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b))
                - marginals.iter().fold(f64::INFINITY, |a, &b| a.min(b));
            let defect = energy_defect + cut_defect(n, hbar, s2.sqrt(), 1.0);
            Ok(vec![
                ReportRow::new(hbar, n, "annulus_mass", mass, Some(reference), defect),
                ReportRow::new(hbar, n, "outside_mass", 1.0 - mass, Some(1.0 - reference), defect),
                ReportRow::new(hbar, n, "angular_variation", spread / mean, Some(0.0), defect),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<ReportRow> = parts.into_iter().flatten().collect();

    let floor = cfg.number("mass_floor")?;
    let tol_angular = cfg.number("tol_angular")?;
    let masses: Vec<f64> = rows.iter().filter(|r| r.metric == "annulus_mass").map(|r| r.value).collect();
    let increasing = masses.windows(2).all(|w| w[1] > w[0]);
    let top = rows.iter().rev().find(|r| r.metric == "angular_variation").map(|r| r.value).unwrap_or(f64::NAN);
    let checks = vec![
        all_rows_check(&rows, "annulus_mass", "annulus_mass_floor", |r| r.value >= floor),
        Check::new(
            "annulus_mass_increasing",
            increasing,
            masses.iter().map(|m| format!("{m:.6}")).collect::<Vec<_>>().join(" < "),
        ),
        reference_check(&rows, "annulus_mass", 1e-3),
        Check::new("angular_uniformity", top <= tol_angular, format!("variation {top:.3e} at the top level")),
    ];
    let notes = vec![format!("schedule derived from levels {sorted:?}: hbar = lambda/(n + 1/2); any given schedule is ignored")];
    Ok(Outcome { primary: "outside_mass", rows, checks, notes, schedule: Some(schedule) })
}

pub(crate) fn wkb(cfg: &ExperimentConfig) -> Result<Outcome> {
    let y_window = cfg.number("y_window")?;
    let p0 = cfg.number("p0")?;
    let curvature = if cfg.choices("action")?[0] == "quadratic" { cfg.number("curvature")? } else { 0.0 };
    let etas = cfg.points("etas")?;
    let (slope_tol, floor) = (cfg.number("tol_slope")?, cfg.number("tol_floor")?);
    let amp = |y: f64| std::f64::consts::PI.powf(-0.25) * (-0.5 * y * y).exp();
    let action = move |y: f64| p0 * y + 0.5 * curvature * y * y;
    let ds = move |y: f64| p0 + curvature * y;
    let max_ds = p0.abs() + curvature.abs() * y_window;

    // Limit: int |A|^2 e^{i(p y - x S'(y))} dy over the window, A normalized there.
    let mass = integrate(&|y| amp(y).powi(2), -y_window, y_window, 1e-14);
    let oracle = |eta: PhasePoint| {
        let ph = |y: f64| eta.p * y - eta.x * ds(y);
        let re = integrate(&|y| amp(y).powi(2) * ph(y).cos(), -y_window, y_window, 1e-13);
        let im = integrate(&|y| amp(y).powi(2) * ph(y).sin(), -y_window, y_window, 1e-13);
        c64::new(re, im) / mass
    };
    let limits: Vec<c64> = etas.iter().map(|&e| oracle(e)).collect();

    let rows = per_hbar(cfg.schedule.values(), |hbar| {
        let reach = y_window.hypot(max_ds + 1.0);
        let n = choose_dim(cfg, policy::dim_for_reach(hbar, reach))?;
        let space = FockSpace::new(hbar, n)?;
        let psi = build_wkb_vector(&space, &amp, &action, y_window)?;
        let table = characteristic_function(&psi.value, &etas)?;
        let dev = (0..etas.len()).map(|k| (table.value(k) - limits[k]).norm()).fold(0.0, f64::max);
        Ok(vec![ReportRow::new(hbar, n, "char_deviation", dev, None, psi.defect)])
    })?;
    let checks = vec![all_rows_check(&rows, "char_deviation", "wkb_characteristic", |r| {
        r.value <= floor.max(slope_tol * r.hbar)
    })];
    let notes = vec![format!("tolerance per row: max({floor}, {slope_tol} hbar)")];
    Ok(Outcome { primary: "char_deviation", rows, checks, notes, schedule: None })
}

/// <chi_a, j_hbar0(bump) chi_b> by the anti-Wick integral over a midpoint grid.
///
/// On the real plane the integrand oscillates with frequency |b - a|/(2 hbar)
/// and cancels to e^{-|b-a|^2/(8 hbar)} of its own size, which double
/// precision cannot resolve at small hbar. The integrand is entire (Gaussian
/// bump, coherent overlaps continued with conj(alpha) -> (x - ip)/sqrt(2 hbar)),
/// so the grid is moved by the imaginary part of the complex saddle point,
/// where it no longer oscillates. The integral is unchanged.
fn cross_term(a: PhasePoint, b: PhasePoint, width: f64, hbar: f64) -> (f64, f64) {
    let m = 0.5 * (a + b);
    let r2h = (2.0 * hbar).sqrt();
    let i = c64::new(0.0, 1.0);
    let kappa = hbar / (width * width);
    let (aa, ab, am) = (a.alpha(hbar), b.alpha(hbar), m.alpha(hbar));
    // saddle in (z, zbar) treated as independent variables
    let z = (ab + am * kappa) / (1.0 + kappa);
    let zb = (aa.conj() + am.conj() * kappa) / (1.0 + kappa);
    let xs = (z + zb) * (r2h / 2.0);
    let ps = (z - zb) * (r2h / 2.0) / i;
    let log_integrand = |x: c64, p: c64| -> c64 {
        let z = (x + i * p) / r2h;
        let zb = (x - i * p) / r2h;
        let left = -0.5 * aa.norm_sqr() - 0.5 * z * zb + aa.conj() * z;
        let right = -0.5 * z * zb - 0.5 * ab.norm_sqr() + zb * ab;
        let (dx, dp) = (x - m.x, p - m.p);
        left + right - (dx * dx + dp * dp) / (2.0 * width * width)
    };
    let l = 9.0 * hbar.sqrt();
    let res = 180usize;
    let h = 2.0 * l / res as f64;
    let wgt = h * h / (2.0 * std::f64::consts::PI * hbar);
    let mut acc = c64::new(0.0, 0.0);
    for ip in 0..res {
        for ix in 0..res {
            let x = xs + (-l + (ix as f64 + 0.5) * h);
            let p = ps + (-l + (ip as f64 + 0.5) * h);
            acc += log_integrand(x, p).exp() * wgt;
        }
    }
    // Gaussian mass of the integrand outside the square, relative to the result.
    let tail = 4.0 * (-(1.0 + kappa) * l * l / (2.0 * hbar)).exp();
    (acc.norm(), tail * acc.norm())
}

pub(crate) fn interference(cfg: &ExperimentConfig) -> Result<Outcome> {
    let (a, b) = (cfg.point("a")?, cfg.point("b")?);
    let width = cfg.number("bump_width")?;
    let etas = cfg.points("etas")?;
    let d2 = (b - a).norm_sq();
    let rows = per_hbar(cfg.schedule.values(), |hbar| {
        let (cross, qdefect) = cross_term(a, b, width, hbar);
        let kappa = hbar / (width * width);
        let beta2 = d2 / (8.0 * hbar);
        let reference = (-beta2 * (1.0 + 1.0 / (1.0 + kappa))).exp() / (1.0 + kappa);

        let reach = a.norm().max(b.norm()) + hbar * etas.iter().map(|e| e.norm()).fold(0.0, f64::max);
        let n = choose_dim(cfg, policy::dim_for_reach(hbar, reach))?;
        let space = FockSpace::new(hbar, n)?;
        let ca = coherent_vector(&space, a)?;
        let cb = coherent_vector(&space, b)?;
        let amps: Vec<c64> = ca.value.amplitudes().iter().zip(cb.value.amplitudes()).map(|(x, y)| x + y).collect();
        let psi = StateVector::new(&space, amps)?;
        let table = characteristic_function(&psi, &etas)?;
        let mix = table.max_deviation(&|eta| {
            (c64::cis(symplectic_form(eta, a)) + c64::cis(symplectic_form(eta, b))) * 0.5
        });
        let mix_ref = etas.iter().map(|e| 1.0 - (-hbar * e.norm_sq() / 4.0).exp()).fold(0.0, f64::max);
        Ok(vec![
            ReportRow::new(hbar, 0, "cross_term", cross, Some(reference), qdefect),
            ReportRow::new(hbar, n, "mixture_deviation", mix, Some(mix_ref), ca.defect + cb.defect),
        ])
    })?;

    // Decay in 1/hbar against the exact overlap |<chi_a, chi_b>| = e^{-|a-b|^2/(4 hbar)}.
    let cross: Vec<(f64, f64)> =
        rows.iter().filter(|r| r.metric == "cross_term" && r.value > 0.0).map(|r| (1.0 / r.hbar, r.value.ln())).collect();
    let oracle_pts: Vec<(f64, f64)> = cfg.schedule.values().iter().map(|&h| (1.0 / h, -d2 / (4.0 * h))).collect();
    let tol_slope = cfg.number("tol_slope")?;
    let slope_check = match (slope(&cross), slope(&oracle_pts)) {
        (Some(s), Some(o)) => Check::new(
            "cross_term_decay",
            (s - o).abs() <= tol_slope * o.abs(),
            format!("slope of ln|cross| vs 1/hbar {s:.4}, oracle {o:.4}"),
        ),
        _ => Check::new("cross_term_decay", false, "fewer than 3 rows"),
    };
    let tol_mix = cfg.number("tol_mixture")?;
    let last = rows.iter().rev().find(|r| r.metric == "mixture_deviation").map(|r| r.value).unwrap_or(f64::NAN);
    let checks = vec![
        slope_check,
        nonincreasing_check(&rows, "cross_term"),
        reference_check(&rows, "cross_term", 1e-3),
        Check::new("mixture_limit", last <= tol_mix, format!("{last:.4e} <= {tol_mix} at the smallest hbar")),
    ];
    Ok(Outcome { primary: "cross_term", rows, checks, notes: vec![], schedule: None })
}

pub(crate) fn wigner_state(cfg: &ExperimentConfig) -> Result<Outcome> {
    let centers = cfg.points("centers")?;
    let s2 = cfg.number("variance")?;
    let etas = cfg.points("etas")?;
    let r0 = cfg.number("disk_radius")?;
    let spacing = cfg.number("disk_spacing")?;
    let k = centers.len() as f64;
    // rho^(eta) = int rho E0(eta) dxi/(2 pi) for the normalized Gaussian mixture
    let rho_hat = |eta: PhasePoint| {
        centers.iter().map(|&c| c64::cis(symplectic_form(eta, c))).sum::<c64>() * ((-s2 * eta.norm_sq() / 2.0).exp() / k)
    };
    let disk = PhaseSpaceFunction::custom("disk", move |xi| {
        c64::new(if xi.norm() <= r0 { 2.0 / (r0 * r0) } else { 0.0 }, 0.0)
    });

    let rows = per_hbar(cfg.schedule.values(), |hbar| {
        if s2 < hbar / 2.0 {
            return Err(Error::InvalidParameter { key: "variance".into(), reason: format!("{s2} < hbar/2 = {}", hbar / 2.0) });
        }
        // Displaced thermal states with nbar + 1/2 = s^2/hbar have Wigner
        // functions N(c, s^2); the level cut keeps geometric tail < 1e-8.
        let nbar = s2 / hbar - 0.5;
        let tail_levels = if nbar > 0.0 { (1e-8f64).ln() / (nbar / (nbar + 1.0)).ln() } else { 1.0 };
        let reach = (2.0 * hbar * tail_levels).sqrt()
            + centers.iter().map(|c| c.norm()).fold(0.0, f64::max)
            + hbar * etas.iter().map(|e| e.norm()).fold(0.0, f64::max);
        let n = choose_dim(cfg, policy::dim_for_reach(hbar, reach))?;
        let space = FockSpace::new(hbar, n)?;
        let t = thermal_operator(&space, nbar);
        let mut d = faer::Mat::<c64>::zeros(n, n);
        for &c in &centers {
            let w = weyl_operator(&space, c)?.value;
            let m = linalg::mul_adj(linalg::mul(w.matrix().as_ref(), t.matrix().as_ref()).as_ref(), w.matrix().as_ref());
            d = &d + &faer::Mat::from_fn(n, n, |i, j| m[(i, j)] / k);
        }
        let tr_d: f64 = (0..n).map(|i| d[(i, i)].re).sum();
        let expect = |x: &FockOperator| -> c64 {
            let xm = x.matrix();
            let mut s = c64::new(0.0, 0.0);
            for j in 0..n {
                for i in 0..n {
                    s += d[(i, j)] * xm[(j, i)];
                }
            }
            s
        };
        let mut dev: f64 = 0.0;
        let mut dev_ref: f64 = 0.0;
        let mut char_err: f64 = 0.0;
        for &eta in &etas {
            let e = scaled_weyl_observable(&space, eta)?.value;
            char_err = char_err.max((expect(&e) - rho_hat(eta)).norm());
            let ah = antiwick_closed_form(&space, &PhaseSpaceFunction::WeylExponential(eta))?
                .ok_or_else(|| Error::Unsupported { op: "closed-form quantization", form: "Weyl exponential".into() })?;
            dev = dev.max((expect(&ah) - rho_hat(eta)).norm());
            dev_ref = dev_ref.max(rho_hat(eta).norm() * (1.0 - (-hbar * eta.norm_sq() / 4.0).exp()));
        }
        let defect = (1.0 - tr_d).abs();

        // Disk indicator: quadrature of displaced parities; the compression of
        // a positive operator is positive, so a negative eigenvalue is genuine.
        let res = ((2.0 * r0) / (spacing * hbar.sqrt())).ceil() as usize;
        let q = QuadratureGrid::midpoint(hbar, r0, res.max(8), WindowShape::Disk)?;
        let nd = choose_dim(cfg, policy::dim_for_reach(hbar, 2.0 * r0))?;
        let dspace = FockSpace::new(hbar, nd)?;
        let dd = wigner_inverse_quantize(&dspace, &disk, &q)?;
        let eig = linalg::hermitian_eigenvalues(dd.matrix().as_ref())?;
        let min = eig.iter().copied().fold(f64::INFINITY, f64::min);
        let trace_norm: f64 = eig.iter().map(|v| v.abs()).sum();
        Ok(vec![
            ReportRow::new(hbar, n, "expectation_deviation", dev, Some(dev_ref), defect),
            ReportRow::new(hbar, n, "char_relation", char_err, Some(0.0), defect),
            ReportRow::new(hbar, nd, "disk_min_eigenvalue", min, None, 0.0),
            ReportRow::new(hbar, nd, "disk_trace_norm", trace_norm, None, 0.0),
        ])
    })?;

    let eig_floor = cfg.number("eig_floor")?;
    let growth = cfg.number("growth")?;
    let mins: Vec<f64> = rows.iter().filter(|r| r.metric == "disk_min_eigenvalue").map(|r| r.value).collect();
    let norms: Vec<f64> = rows.iter().filter(|r| r.metric == "disk_trace_norm").map(|r| r.value).collect();
    let most_negative = mins.iter().copied().fold(f64::INFINITY, f64::min);
    let ratio = norms.iter().copied().fold(0.0, f64::max) / norms.first().copied().unwrap_or(f64::NAN);
    let tol_char = cfg.number("tol_char")?;
    let checks = vec![
        all_rows_check(&rows, "char_relation", "char_relation", |r| r.value <= tol_char),
        reference_check(&rows, "expectation_deviation", cfg.number("tol_reference")?),
        nonincreasing_check(&rows, "expectation_deviation"),
        Check::new(
            "disk_not_a_state",
            most_negative < -eig_floor || ratio > growth,
            format!("most negative eigenvalue {most_negative:.4e} (floor -{eig_floor}), trace-norm growth {ratio:.3}x (threshold {growth}x)"),
        ),
    ];
    Ok(Outcome { primary: "expectation_deviation", rows, checks, notes: vec![], schedule: None })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cross_term_matches_fock_space_matrix_element() {
        use crate::correspondence::antiwick_closed_form;
        let hbar = 0.5;
        let s = FockSpace::new(hbar, 120).unwrap();
        let (a, b) = (PhasePoint::new(0.3, -1.0), PhasePoint::new(-0.7, 0.4));
        let bump = PhaseSpaceFunction::Gaussian { center: 0.5 * (a + b), width: 0.6, height: 1.0 };
        let x = antiwick_closed_form(&s, &bump).unwrap().unwrap();
        let ca = coherent_vector(&s, a).unwrap().value;
        let cb = coherent_vector(&s, b).unwrap().value;
        let xb = x.apply(cb.amplitudes());
        let want = ca.amplitudes().iter().zip(&xb).map(|(u, v)| u.conj() * v).sum::<c64>().norm();
        let (got, tail) = cross_term(a, b, 0.6, hbar);
        assert!(((got - want) / want).abs() < 1e-10 && tail < 1e-12 * got, "{got} {want}");
    }

    #[test]
    fn cross_term_against_closed_form() {
        // Oracle: a Gaussian integral in alpha, independent of the grid.
        let (a, b) = (PhasePoint::new(-1.0, 0.0), PhasePoint::new(1.0, 0.0));
        for hbar in [1.0, 0.125, 1.0 / 64.0] {
            let (c, _) = cross_term(a, b, 0.5, hbar);
            let kappa = hbar / 0.25;
            let beta2 = 4.0 / (8.0 * hbar);
            let want = (-beta2 * (1.0 + 1.0 / (1.0 + kappa))).exp() / (1.0 + kappa);
            assert!(((c - want) / want).abs() < 1e-8, "hbar={hbar} {c} {want}");
        }
    }
}
