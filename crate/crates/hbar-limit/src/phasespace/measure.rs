use statrs::function::gamma::ln_gamma;

use crate::quadrature;

/// int g dmu_d with mu_d(dtheta) = theta^{d-1} e^{-theta} / (d-1)! dtheta.
pub fn mu_d_integral(g: &dyn Fn(f64) -> f64, d: usize) -> f64 {
    let d = d.max(1);
    let ln_norm = ln_gamma(d as f64);
    let density = move |t: f64| {
        if t == 0.0 {
            if d == 1 {
                1.0
            } else {
                0.0
            }
        } else {
            ((d - 1) as f64 * t.ln() - t - ln_norm).exp()
        }
    };
    // mass beyond 60 + 4d is below 1e-20 for d <= 8
    let cutoff = 60.0 + 4.0 * d as f64;
    quadrature::integrate_half_line(&|t| g(t) * density(t), cutoff, 1e-13)
}

/// int (sum_k c_k theta^k) dmu_d, exactly: the k-th moment is Gamma(k+d)/Gamma(d).
pub fn mu_d_polynomial(coeffs: &[f64], d: usize) -> f64 {
    let d = d.max(1) as f64;
    coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| c * (ln_gamma(k as f64 + d) - ln_gamma(d)).exp())
        .sum()
}
