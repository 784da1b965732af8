//! Matrix elements of the displacement operator D(alpha) in the number basis.
//!
//! For k = m - n >= 0 and x = |alpha|^2,
//!   <n+k| D |n> = e^{ik theta} f_n^k,   <n| D |n+k> = (-1)^k e^{-ik theta} f_n^k,
//! with f_n^k = sqrt(n!/(n+k)!) x^{k/2} e^{-x/2} L_n^k(x). The normalized
//! Laguerre values obey
//!   f_{n+1} = [(2n+1+k-x) f_n - sqrt(n(n+k)) f_{n-1}] / sqrt((n+1)(n+1+k)),
//! started from f_0 = exp(k/2 ln x - x/2 - ln(k!)/2). f_0 underflows long before
//! the ladder reaches its O(1) region, so the ladder carries a log scale.

use faer::{c64, Mat};
use statrs::function::factorial::ln_factorial;

const RESCALE_AT: f64 = 1e150;
const LN_RESCALE: f64 = 345.387_763_949_106_8; // 150 ln 10

/// Fills `out[n] = f_n^k(x)` for n < out.len().
fn laguerre_ladder(k: usize, x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    if x == 0.0 {
        out.fill(0.0);
        if k == 0 {
            out.fill(1.0);
        }
        return;
    }
    let kf = k as f64;
    let mut log_scale = 0.5 * kf * x.ln() - 0.5 * x - 0.5 * ln_factorial(k as u64);
    let mut prev = 0.0_f64;
    let mut cur = 1.0_f64;
    out[0] = log_scale.exp();
    for n in 0..out.len() - 1 {
        let nf = n as f64;
        let next = ((2.0 * nf + 1.0 + kf - x) * cur - (nf * (nf + kf)).sqrt() * prev)
            / ((nf + 1.0) * (nf + 1.0 + kf)).sqrt();
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE_AT {
            prev /= RESCALE_AT;
            cur /= RESCALE_AT;
            log_scale += LN_RESCALE;
        }
        out[n + 1] = if log_scale < -745.0 && cur.abs() < 1.0 {
            0.0
        } else {
            cur * log_scale.exp()
        };
    }
}

/// Block <m|D(alpha)|n> for m < rows, n < cols.
pub fn displacement_rows(rows: usize, cols: usize, alpha: c64) -> Mat<c64> {
    let x = alpha.norm_sqr();
    let theta = alpha.arg();
    let mut out = Mat::<c64>::zeros(rows, cols);
    let span = rows.max(cols);
    let mut ladder = vec![0.0; span];
    for k in 0..span {
        // lower part: m = n + k < rows, n < cols
        let lower = rows.saturating_sub(k).min(cols);
        // upper part: m < rows, n = m + k < cols
        let upper = if k == 0 { 0 } else { cols.saturating_sub(k).min(rows) };
        let len = lower.max(upper);
        if len == 0 {
            continue;
        }
        laguerre_ladder(k, x, &mut ladder[..len]);
        let phase = c64::cis(k as f64 * theta);
        for (n, &f) in ladder.iter().enumerate().take(lower) {
            out[(n + k, n)] = phase * f;
        }
        if upper > 0 {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let phase_up = phase.conj() * sign;
            for (m, &f) in ladder.iter().enumerate().take(upper) {
                out[(m, m + k)] = phase_up * f;
            }
        }
    }
    out
}

/// Exact compression of D(alpha) onto the first `dim` levels.
pub fn displacement_matrix(dim: usize, alpha: c64) -> Mat<c64> {
    displacement_rows(dim, dim, alpha)
}

/// Number-basis amplitudes e^{-|alpha|^2/2} alpha^n / sqrt(n!) for n < dim.
pub fn coherent_amplitudes(dim: usize, alpha: c64) -> Vec<c64> {
    let x = alpha.norm_sqr();
    let mut out = vec![c64::new(0.0, 0.0); dim];
    if x == 0.0 {
        if let Some(v) = out.first_mut() {
            *v = c64::new(1.0, 0.0);
        }
        return out;
    }
    let theta = alpha.arg();
    let lx = x.ln();
    for (n, v) in out.iter_mut().enumerate() {
        let log_mod = -0.5 * x + 0.5 * n as f64 * lx - 0.5 * ln_factorial(n as u64);
        if log_mod > -745.0 {
            *v = c64::from_polar(log_mod.exp(), n as f64 * theta);
        }
    }
    out
}

/// Levels [start, start + amps.len()) where the coherent amplitude has
/// log-modulus above `log_threshold`, with those amplitudes. Anti-Wick sums use
/// this to skip the numerically zero part of each projector.
pub fn coherent_band(dim: usize, alpha: c64, log_threshold: f64) -> (usize, Vec<c64>) {
    let x = alpha.norm_sqr();
    if x == 0.0 {
        return (0, vec![c64::new(1.0, 0.0)]);
    }
    let lx = x.ln();
    let log_mod = |n: usize| -0.5 * x + 0.5 * n as f64 * lx - 0.5 * ln_factorial(n as u64);
    // log_mod is concave in n with its peak near n = x
    let peak = (x.floor() as usize).min(dim.saturating_sub(1));
    let mut lo = peak;
    while lo > 0 && log_mod(lo - 1) > log_threshold {
        lo -= 1;
    }
    let mut hi = peak + 1;
    while hi < dim && log_mod(hi) > log_threshold {
        hi += 1;
    }
    let theta = alpha.arg();
    let amps = (lo..hi).map(|n| c64::from_polar(log_mod(n).exp(), n as f64 * theta)).collect();
    (lo, amps)
}
