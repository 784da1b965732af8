//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines are always printed. Exits
//! nonzero when a criterion fails that is not listed in DOCUMENTED_FAILURES,
//! or when a documented failure starts passing (the list is then stale).

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use hbar_limit::c64;
use hbar_limit::correspondence::{
    antiwick_closed_form, berezin_transform, compare, estim_bound, identity_resolution_defect, modulus_profile,
    wigner_function, wigner_overlap_check, QuadratureGrid,
};
use hbar_limit::fock::{
    block_norm, coherent_vector, operator_norm, policy, scaled_weyl_observable, weyl_operator, FockSpace, PhasePoint,
    StateVector,
};
use hbar_limit::limits::{ConvergenceReport, ExperimentKind};
use hbar_limit::phasespace::{AngularSampling, Atom, PhaseSpaceFunction, Window, WindowShape};

/// Criteria that fail at the stated tolerance for reasons recorded in the
/// decisions ledger. Criterion 4: the identity-resolution defect at L = 8 is
/// set by window truncation (1.7e-4), not by the grid.
const DOCUMENTED_FAILURES: &[u32] = &[4];

type Res<T> = Result<T, String>;
type Reports = BTreeMap<&'static str, ConvergenceReport>;

struct Line {
    passed: bool,
    detail: String,
}

fn line(passed: bool, detail: impl Into<String>) -> Res<Line> {
    Ok(Line { passed, detail: detail.into() })
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn p(x: f64, y: f64) -> PhasePoint {
    PhasePoint::new(x, y)
}

fn space(hbar: f64, dim: usize) -> Res<FockSpace> {
    FockSpace::new(hbar, dim).map_err(e)
}

fn c1_gaussian_overlap() -> Res<Line> {
    let mut worst = 0.0_f64;
    for hbar in [1.0_f64, 0.25] {
        let a = (8.0 * hbar).sqrt();
        let ticks = [-a, -a / 2.0, 0.0, a / 2.0, a];
        let s = space(hbar, policy::dim_for_reach(hbar, a * 2f64.sqrt()).map_err(e)?)?;
        for &x in &ticks {
            for &q in &ticks {
                let xi = p(x, q);
                let v = weyl_operator(&s, xi).map_err(e)?.value.entry(0, 0);
                worst = worst.max((v - c64::new((-xi.norm_sq() / (4.0 * hbar)).exp(), 0.0)).norm());
            }
        }
    }
    line(worst <= 1e-8, format!("max deviation {worst:.2e} over 2 x 25 points (tol 1e-8)"))
}

fn standard_grid(hbar: f64) -> Res<QuadratureGrid> {
    QuadratureGrid::midpoint(hbar, 8.0, 129, WindowShape::Square).map_err(e)
}

const ETAS: [(f64, f64); 3] = [(1.0, 0.0), (0.0, 1.0), (1.0, 1.0)];

/// Norms of j(E(eta)) - damping E(eta) are taken on the first 16 levels.
const BLOCK: usize = 16;

fn c2_kernel() -> Res<Line> {
    let mut worst = 0.0_f64;
    for (h, hp) in [(0.5, 0.5), (1.0, 0.25)] {
        let to = space(h, 160)?;
        let from = space(hp, policy::dim_for_reach(hp, 8.0).map_err(e)?)?;
        let q = standard_grid(h)?;
        for (x, y) in ETAS {
            let eta = p(x, y);
            let src = scaled_weyl_observable(&from, eta).map_err(e)?.value;
            let j = compare(&to, &from, &src, &q).map_err(e)?.value;
            let damp = (-(h + hp) * eta.norm_sq() / 4.0).exp();
            let want = scaled_weyl_observable(&to, eta).map_err(e)?.value.scale(c64::new(damp, 0.0));
            worst = worst.max(block_norm(&j.sub(&want).map_err(e)?, BLOCK).map_err(e)?);
        }
    }
    line(worst <= 1e-3, format!("max block norm {worst:.2e} over 2 pairs x 3 etas (tol 1e-3)"))
}

fn c3_double_smear() -> Res<Line> {
    let h = 0.5;
    let s = space(h, 160)?;
    let q = standard_grid(h)?;
    let mut worst = 0.0_f64;
    for (x, y) in ETAS {
        let eta = p(x, y);
        let e0 = scaled_weyl_observable(&s, eta).map_err(e)?.value;
        let j1 = compare(&s, &s, &e0, &q).map_err(e)?.value;
        let j2 = compare(&s, &s, &j1, &q).map_err(e)?.value;
        let want = e0.scale(c64::new((-h * eta.norm_sq()).exp(), 0.0));
        worst = worst.max(block_norm(&j2.sub(&want).map_err(e)?, BLOCK).map_err(e)?);
    }
    line(worst <= 2e-3, format!("max block norm {worst:.2e} at hbar 0.5 over 3 etas (tol 2e-3)"))
}

fn c4_identity_resolution() -> Res<Line> {
    let s = space(1.0, 160)?;
    let defect = |l: f64, res: usize| -> Res<f64> {
        let q = QuadratureGrid::midpoint(1.0, l, res, WindowShape::Square).map_err(e)?;
        identity_resolution_defect(&s, &q, 16).map_err(e)
    };
    let literal = defect(8.0, 129)?;
    let ladder = [defect(8.0, 33)?, defect(8.0, 65)?, defect(8.0, 129)?];
    let ladder_ok = ladder.windows(2).all(|w| w[1] < w[0]);
    // Companion: widening the window at fixed spacing 16/129.
    let windows = [defect(8.0, 129)?, defect(10.0, 161)?, defect(12.0, 193)?];
    let windows_ok = windows.windows(2).all(|w| w[1] < w[0]) && windows[2] <= 1e-6;
    let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.2e}")).collect::<Vec<_>>().join(" > ");
    line(
        literal <= 1e-6 && ladder_ok,
        format!(
            "defect {literal:.3e} at L=8 (tol 1e-6); resolution ladder 33/65/129: {} (monotone: {ladder_ok}); \
             window ladder L=8/10/12: {} (monotone, below 1e-6: {windows_ok})",
            fmt(&ladder),
            fmt(&windows)
        ),
    )
}

fn check_report(reports: &Reports, kind: ExperimentKind, names: &[&str]) -> Res<Line> {
    let r = reports.get(kind.name()).ok_or_else(|| format!("suite produced no {kind} report"))?;
    let mut parts = Vec::new();
    let mut ok = r.verdict.passed;
    for n in names {
        match r.check(n) {
            Some(c) => {
                ok &= c.passed;
                parts.push(format!("{}: {}", c.name, c.detail));
            }
            None => {
                ok = false;
                parts.push(format!("{n}: missing"));
            }
        }
    }
    for c in r.verdict.checks.iter().filter(|c| !c.passed && !names.contains(&c.name.as_str())) {
        parts.push(format!("{} FAILED: {}", c.name, c.detail));
    }
    if let Some(rate) = r.rate {
        parts.push(format!("fitted rate of {} = {rate:.4}", r.primary_metric));
    }
    line(ok, parts.join("; "))
}

/// X given by its anti-Wick symbol f (X = j_hbar0 f), so j_hbar0 j0hbar X is
/// the anti-Wick quantization of the Berezin transform of f.
fn c14_estimate() -> Res<Line> {
    let mut worst_margin = f64::INFINITY;
    let mut cases = 0;
    for hbar in [1.0, 0.25, 1.0 / 16.0] {
        let mut battery: Vec<(String, PhaseSpaceFunction)> = ETAS
            .iter()
            .map(|&(x, y)| {
                let eta = p(x, y);
                // E_hbar(eta) = j_hbar0(e^{hbar eta^2/4} e^{i sigma(eta, .)})
                let w = c64::new((hbar * eta.norm_sq() / 4.0).exp(), 0.0);
                (format!("E({x},{y})"), PhaseSpaceFunction::FourierMeasure(vec![Atom::new(w, eta)]))
            })
            .collect();
        let half = c64::new(0.5, 0.0);
        battery.push(("j(cos x)".into(), PhaseSpaceFunction::FourierMeasure(vec![Atom::new(half, p(0.0, 1.0)), Atom::new(half, p(0.0, -1.0))])));
        battery.push(("j(bump)".into(), PhaseSpaceFunction::Gaussian { center: p(0.5, 0.0), width: 0.7, height: 1.0 }));

        let levels = 24;
        let lambda_max = 24.0 * hbar;
        let reach = (2.0 * hbar * levels as f64).sqrt() + lambda_max.sqrt() + 1.0;
        let s = space(hbar, policy::dim_for_reach(hbar, reach).map_err(e)?)?;
        for (name, f) in &battery {
            let x = antiwick_closed_form(&s, f).map_err(e)?.ok_or("no closed form")?;
            let smoothed = berezin_transform(f, hbar).map_err(e)?;
            let jj = antiwick_closed_form(&s, &smoothed).map_err(e)?.ok_or("no closed form")?;
            let lhs = operator_norm(&x.sub(&jj).map_err(e)?).map_err(e)?;
            let profile = modulus_profile(&s, &x, lambda_max, 14, &AngularSampling::new(32), levels).map_err(e)?;
            let bound = estim_bound(&profile, hbar, 1);
            cases += 1;
            if lhs > bound + 1e-6 {
                return line(false, format!("{name} at hbar {hbar}: ||X - jjX|| = {lhs:.4e} > bound {bound:.4e}"));
            }
            worst_margin = worst_margin.min(bound - lhs);
        }
    }
    line(true, format!("{cases} cases hold; smallest margin bound - lhs = {worst_margin:.3e}"))
}

fn c15_wigner(reports: &Reports) -> Res<Line> {
    // (a) vacuum
    let mut worst = 0.0_f64;
    for hbar in [1.0_f64, 0.25] {
        let w = Window::disk(3.0 * hbar.sqrt(), 33).map_err(e)?;
        let s = space(hbar, policy::dim_for_reach(hbar, w.radius()).map_err(e)?)?;
        let vac = StateVector::basis(&s, 0).map_err(e)?.projector();
        let f = wigner_function(&s, &vac, &w).map_err(e)?.value;
        for xi in w.nodes() {
            let want = 2.0 / hbar * (-xi.norm_sq() / hbar).exp();
            worst = worst.max((f.evaluate(xi).map_err(e)?.re - want).abs());
        }
    }
    // (b) overlaps of pure states
    // Parity sums of displaced vectors need the whole window inside the space.
    let hbar = 1.0;
    let w = Window::square(6.0, 65).map_err(e)?;
    let s = space(hbar, policy::dim_for_reach(hbar, 6.0 * 2f64.sqrt() + 1.5).map_err(e)?)?;
    let n = s.dim();
    let coh = |x: f64, q: f64| -> Res<StateVector> { Ok(coherent_vector(&s, p(x, q)).map_err(e)?.value) };
    let fock = |n: usize| StateVector::basis(&s, n).map_err(e);
    let amps: Vec<c64> = (0..n).map(|k| if k < 3 { c64::new(1.0, k as f64) / 6f64.sqrt() } else { c64::new(0.0, 0.0) }).collect();
    let sup = StateVector::new(&s, amps).map_err(e)?;
    let pairs = [
        (coh(0.0, 0.0)?, coh(0.0, 0.0)?),
        (coh(0.0, 0.0)?, coh(1.0, -0.5)?),
        (fock(1)?, fock(1)?),
        (fock(1)?, coh(0.5, 0.5)?),
        (sup.clone(), fock(2)?),
    ];
    let mut overlap_gap = 0.0_f64;
    for (a, b) in &pairs {
        let (lhs, rhs) = wigner_overlap_check(&a.projector(), &b.projector(), &w).map_err(e)?;
        overlap_gap = overlap_gap.max((lhs - rhs).abs());
    }
    let diag = check_report(reports, ExperimentKind::WignerState, &["disk_not_a_state", "char_relation"])?;
    line(
        worst <= 1e-6 && overlap_gap <= 1e-4 && diag.passed,
        format!(
            "vacuum Wigner max deviation {worst:.2e} (tol 1e-6); overlap sides max gap {overlap_gap:.2e} over 5 pairs (tol 1e-4); {}",
            diag.detail
        ),
    )
}

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_hbar-limit"));
    c.env("HBAR_LIMIT_THREADS", "1");
    c
}

fn run_bin(args: &[&str]) -> Res<(i32, String)> {
    let out = bin().args(args).output().map_err(e)?;
    let code = out.status.code().ok_or("killed by signal")?;
    Ok((code, String::from_utf8_lossy(&out.stderr).into_owned()))
}

fn read_dir_sorted(dir: &Path) -> Res<Vec<(String, Vec<u8>)>> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .map_err(e)?
        .map(|ent| {
            let ent = ent.map_err(e)?;
            Ok((ent.file_name().to_string_lossy().into_owned(), std::fs::read(ent.path()).map_err(e)?))
        })
        .collect::<Res<_>>()?;
    files.sort();
    Ok(files)
}

/// Full suite through the binary (JSON, so the other criteria can read the
/// verdicts), a tampered run, and two CSV runs compared byte for byte.
fn c16_cli(tmp: &Path, full_code: i32, full_summary: &str) -> Res<Line> {
    let mut notes = Vec::new();
    let mut ok = true;

    let kinds_in_summary: Vec<&str> = full_summary.lines().skip(1).filter_map(|l| l.split(',').next()).collect();
    let all: Vec<&str> = ExperimentKind::ALL.iter().map(|k| k.name()).collect();
    ok &= full_code == 0 && kinds_in_summary == all;
    notes.push(format!("full suite exit {full_code}, summary lists {} kinds", kinds_in_summary.len()));

    let tampered = tmp.join("tampered");
    let (code, stderr) = run_bin(&[
        "suite",
        "--kinds",
        "weyl_limit,product",
        "--set",
        "product.rate_low=0.95",
        "--out",
        tampered.to_str().ok_or("path")?,
    ])?;
    let summary = std::fs::read_to_string(tampered.join("summary.csv")).map_err(e)?;
    let named = stderr.contains("failing kinds: product") && summary.lines().any(|l| l.starts_with("product,") && l.contains(",fail,"));
    ok &= code == 1 && named && summary.lines().any(|l| l.starts_with("weyl_limit,") && l.contains(",pass,"));
    notes.push(format!("tampered product.rate_low=0.95: exit {code}, failing kind named: {named}"));

    let (code, _) = run_bin(&["run", "--experiment", "nosuch"])?;
    ok &= code == 2;
    notes.push(format!("unknown kind: exit {code}"));

    let subset = "weyl_limit,product,bracket,oscillation_counterexample,point_measure,interference";
    let (a, b) = (tmp.join("csv_a"), tmp.join("csv_b"));
    for d in [&a, &b] {
        let (code, _) = run_bin(&["suite", "--kinds", subset, "--seed", "7", "--out", d.to_str().ok_or("path")?])?;
        ok &= code == 0;
    }
    let (fa, fb) = (read_dir_sorted(&a)?, read_dir_sorted(&b)?);
    let identical = fa == fb && fa.len() == 7;
    ok &= identical;
    notes.push(format!("{} CSV files byte-identical across two seeded runs: {identical}", fa.len()));
    line(ok, notes.join("; "))
}

fn main() {
    let start = Instant::now();
    let tmp = tempfile::tempdir().expect("temp dir");
    let full = tmp.path().join("full");

    let t = Instant::now();
    let (full_code, full_stderr) =
        run_bin(&["suite", "--format", "json", "--out", full.to_str().expect("utf-8 path")]).expect("suite runs");
    eprint!("{full_stderr}");
    let mut reports = Reports::new();
    for k in ExperimentKind::ALL {
        if let Ok(text) = std::fs::read_to_string(full.join(format!("{}.json", k.name()))) {
            let r: ConvergenceReport = serde_json::from_str(&text).expect("report parses");
            reports.insert(k.name(), r);
        }
    }
    let full_summary = std::fs::read_to_string(full.join("summary.csv")).unwrap_or_default();
    println!("suite finished in {:.1}s (exit {full_code})", t.elapsed().as_secs_f64());

    use ExperimentKind as K;
    let criteria: Vec<(u32, &str, Box<dyn Fn() -> Res<Line> + '_>)> = vec![
        (1, "Gaussian overlap", Box::new(c1_gaussian_overlap)),
        (2, "comparison-map kernel", Box::new(c2_kernel)),
        (3, "double smear", Box::new(c3_double_smear)),
        (4, "resolution of identity", Box::new(c4_identity_resolution)),
        (5, "product limit", Box::new(|| check_report(&reports, K::Product, &["product_distance_matches_reference", "product_distance_rate"]))),
        (
            6,
            "bracket limit",
            Box::new(|| check_report(&reports, K::Bracket, &["factor_exact", "factor_deviation_rate", "bracket_distance_rate"])),
        ),
        (
            7,
            "evolution",
            Box::new(|| check_report(&reports, K::Evolution, &["periodicity", "quartic_limit_nonincreasing", "quartic_limit_final"])),
        ),
        (
            8,
            "resolvent limit",
            Box::new(|| {
                check_report(
                    &reports,
                    K::Resolvent,
                    &["resolvent_zero_nonincreasing", "resolvent_zero_final", "resolvent_cos_nonincreasing", "resolvent_cos_final"],
                )
            }),
        ),
        (
            9,
            "oscillating counterexample",
            Box::new(|| check_report(&reports, K::OscillationCounterexample, &["husimi_vanishes", "modulus_stays_large"])),
        ),
        (
            10,
            "point measure and cosine inequality",
            Box::new(|| {
                check_report(
                    &reports,
                    K::PointMeasure,
                    &["characteristic_values", "cos_min_eigenvalue(xi=0.5:0)", "cos_min_eigenvalue(xi=0:1)"],
                )
            }),
        ),
        (
            11,
            "eigenstate localization",
            Box::new(|| check_report(&reports, K::Eigenstate, &["annulus_mass_floor", "annulus_mass_increasing", "angular_uniformity"])),
        ),
        (12, "WKB limit", Box::new(|| check_report(&reports, K::Wkb, &["wkb_characteristic"]))),
        (13, "interference", Box::new(|| check_report(&reports, K::Interference, &["cross_term_decay", "mixture_limit"]))),
        (14, "smoothing estimate", Box::new(c14_estimate)),
        (15, "Wigner layer", Box::new(|| c15_wigner(&reports))),
        (16, "CLI contract", Box::new(|| c16_cli(tmp.path(), full_code, &full_summary))),
    ];

    let mut unexpected = Vec::new();
    let mut passed = 0;
    for (id, name, f) in &criteria {
        let t = Instant::now();
        let res = f().unwrap_or_else(|msg| Line { passed: false, detail: format!("error: {msg}") });
        let documented = DOCUMENTED_FAILURES.contains(id);
        let status = if res.passed { "PASS" } else { "FAIL" };
        let note = if documented && !res.passed { " [documented]" } else { "" };
        println!("{status} {id:>2} {name}{note} ({:.1}s): {}", t.elapsed().as_secs_f64(), res.detail);
        if res.passed {
            passed += 1;
        }
        if res.passed == documented {
            unexpected.push(*id);
        }
    }
    println!("{passed}/{} criteria pass; total {:.1}s", criteria.len(), start.elapsed().as_secs_f64());
    if !unexpected.is_empty() {
        println!("unexpected outcome for criteria {unexpected:?} (see DOCUMENTED_FAILURES)");
        std::process::exit(1);
    }
}
