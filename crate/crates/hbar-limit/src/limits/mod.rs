//! Convergence experiments: one quantum run per hbar of a schedule, compared
//! with the classical side through Husimi symbols, expectations or
//! characteristic functions, and summarized as a report with a verdict.

mod config;
mod dynamics;
mod report;
mod states;
mod symbols;

use rayon::prelude::*;

pub use config::{
    kind_names, parse_number, ExperimentConfig, ExperimentKind, HbarSchedule, ParamSpec, ParamType, Polarity,
};
pub use report::{fit_rate, Check, ConvergenceReport, ReportRow, Verdict};

use crate::fock::{coherent_tail, policy};
use crate::Result;

/// What a kind driver hands back before rate fitting and verdict assembly.
pub(crate) struct Outcome {
    pub primary: &'static str,
    pub rows: Vec<ReportRow>,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
    /// Schedule actually used, when the kind derives its own.
    pub schedule: Option<HbarSchedule>,
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ConvergenceReport> {
    config.validate()?;
    let mut out = match config.kind {
        ExperimentKind::PositionMomentum => symbols::position_momentum(config),
        ExperimentKind::WeylLimit => symbols::weyl_limit(config),
        ExperimentKind::FourierMeasure => symbols::fourier_measure(config),
        ExperimentKind::Product => symbols::product(config),
        ExperimentKind::Bracket => symbols::bracket(config),
        ExperimentKind::BasicSequence => symbols::basic_sequence(config),
        ExperimentKind::Evolution => dynamics::evolution(config),
        ExperimentKind::Resolvent => dynamics::resolvent(config),
        ExperimentKind::OscillationCounterexample => dynamics::oscillation_counterexample(config),
        ExperimentKind::PointMeasure => states::point_measure(config),
        ExperimentKind::Eigenstate => states::eigenstate(config),
        ExperimentKind::Wkb => states::wkb(config),
        ExperimentKind::Interference => states::interference(config),
        ExperimentKind::WignerState => states::wigner_state(config),
    }?;

    let ratio = config.number("rate_defect_ratio")?;
    for r in out.rows.iter_mut() {
        r.rate_flag = r.metric == out.primary && r.hbar > 0.0 && r.value > 0.0 && r.defect < ratio * r.value;
    }
    let rate = fit_rate(&out.rows).ok();
    let mut echo = config.clone();
    if let Some(s) = out.schedule.take() {
        echo.schedule = s;
    }
    let passed = out.checks.iter().all(|c| c.passed);
    Ok(ConvergenceReport {
        kind: config.kind,
        config: echo,
        primary_metric: out.primary.to_string(),
        rows: out.rows,
        rate,
        verdict: Verdict { polarity: config.kind.polarity(), passed, checks: out.checks },
        notes: out.notes,
    })
}

/// Runs `f` for every hbar in parallel and concatenates rows in schedule order.
pub(crate) fn per_hbar<F>(hbars: &[f64], f: F) -> Result<Vec<ReportRow>>
where
    F: Fn(f64) -> Result<Vec<ReportRow>> + Sync,
{
    let parts = hbars.par_iter().map(|&h| f(h)).collect::<Result<Vec<_>>>()?;
    Ok(parts.into_iter().flatten().collect())
}

pub(crate) fn choose_dim(config: &ExperimentConfig, needed: Result<usize>) -> Result<usize> {
    match config.dim_override {
        Some(d) => policy::capped(d),
        None => needed,
    }
}

/// Bound on the error of <chi, X chi> when chi is cut to `dim` levels:
/// 2 ||X|| ||(1 - P) chi||, for chi at radius `radius`.
pub(crate) fn cut_defect(dim: usize, hbar: f64, radius: f64, norm: f64) -> f64 {
    2.0 * norm * coherent_tail(dim, radius * radius / (2.0 * hbar)).max(0.0).sqrt()
}

pub(crate) fn fmt_num(v: f64) -> String {
    format!("{}", (v * 1e6).round() / 1e6)
}

/// |value - reference| <= max(floor, 5 defect) on every row of `metric`.
pub(crate) fn reference_check(rows: &[ReportRow], metric: &str, floor: f64) -> Check {
    let mut worst = 0.0_f64;
    let mut ok = true;
    let mut n = 0;
    for r in rows.iter().filter(|r| r.metric == metric) {
        if let Some(reference) = r.reference {
            n += 1;
            let gap = (r.value - reference).abs();
            worst = worst.max(gap);
            if !(gap <= floor.max(5.0 * r.defect)) {
                ok = false;
            }
        }
    }
    Check::new(
        &format!("{metric}_matches_reference"),
        ok && n > 0,
        format!("max |value - reference| = {worst:.3e} over {n} rows (floor {floor:.1e})"),
    )
}

/// Values of `metric` do not increase along the schedule, over rows whose
/// defect is below a tenth of the value.
pub(crate) fn nonincreasing_check(rows: &[ReportRow], metric: &str) -> Check {
    let vals: Vec<f64> =
        rows.iter().filter(|r| r.metric == metric && r.defect < 0.1 * r.value.abs()).map(|r| r.value).collect();
    let ok = vals.len() >= 2 && vals.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9) + 1e-15);
    let shown: Vec<String> = vals.iter().map(|v| format!("{v:.3e}")).collect();
    Check::new(&format!("{metric}_nonincreasing"), ok, shown.join(" > "))
}

/// Every row of `metric` satisfies `pred`.
pub(crate) fn all_rows_check(rows: &[ReportRow], metric: &str, name: &str, pred: impl Fn(&ReportRow) -> bool) -> Check {
    let sel: Vec<&ReportRow> = rows.iter().filter(|r| r.metric == metric).collect();
    let bad: Vec<String> = sel.iter().filter(|r| !pred(r)).map(|r| format!("hbar={} value={:.3e}", r.hbar, r.value)).collect();
    let ok = !sel.is_empty() && bad.is_empty();
    let detail = if ok {
        let worst = sel.iter().map(|r| r.value).fold(f64::NAN, |a, b| if a.is_nan() || b.abs() > a.abs() { b } else { a });
        format!("{} rows, extreme value {worst:.3e}", sel.len())
    } else if sel.is_empty() {
        "no rows".into()
    } else {
        format!("failing rows: {}", bad.join("; "))
    };
    Check::new(name, ok, detail)
}

/// Fitted rate of one metric over its rows with defect < 0.1 x value.
pub(crate) fn metric_rate(rows: &[ReportRow], metric: &str) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.metric == metric && r.hbar > 0.0 && r.value > 0.0 && r.defect < 0.1 * r.value)
        .map(|r| (r.hbar.ln(), r.value.ln()))
        .collect();
    report::least_squares_slope(&pts).ok()
}

/// Least-squares slope of arbitrary (x, y) pairs, None below 3 points.
pub(crate) fn slope_of(pts: &[(f64, f64)]) -> Option<f64> {
    report::least_squares_slope(pts).ok()
}

pub(crate) fn rate_check(rows: &[ReportRow], metric: &str, low: f64, high: f64) -> Check {
    match metric_rate(rows, metric) {
        Some(s) => Check::new(&format!("{metric}_rate"), (low..=high).contains(&s), format!("fitted rate {s:.4} in [{low}, {high}]")),
        None => Check::new(&format!("{metric}_rate"), false, "fewer than 3 usable rows"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checks_on_synthetic_rows() {
        let rows: Vec<ReportRow> = [1.0, 0.5, 0.25, 0.125]
            .iter()
            .map(|&h| ReportRow::new(h, 10, "m", h, Some(h + 1e-4), 1e-9))
            .collect();
        assert!(reference_check(&rows, "m", 1e-3).passed);
        assert!(!reference_check(&rows, "m", 1e-5).passed);
        assert!(nonincreasing_check(&rows, "m").passed);
        assert!((metric_rate(&rows, "m").unwrap() - 1.0).abs() < 1e-12);
        assert!(rate_check(&rows, "m", 0.9, 1.1).passed);
        assert!(!reference_check(&rows, "other", 1.0).passed);
    }
}
