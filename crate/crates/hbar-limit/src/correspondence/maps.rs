use faer::{c64, Mat};
use rayon::prelude::*;

use super::QuadratureGrid;
use crate::fock::{
    coherent_amplitudes, coherent_tail, scaled_weyl_observable, weyl_operator, FockOperator, FockSpace,
    PhasePoint,
};
use crate::phasespace::{gaussian_smooth, PhaseSpaceFunction, SampledGrid, Window};
use crate::{linalg, Error, Result, WithDefect};

const CHUNK: usize = 256;

/// Columns are the truncated (unnormalized) coherent vectors at `nodes`, cut to
/// the first `rows` levels. Keeping them unnormalized makes every map below the
/// exact compression of its untruncated counterpart.
pub fn coherent_matrix(hbar: f64, rows: usize, nodes: &[PhasePoint]) -> Mat<c64> {
    let cols: Vec<Vec<c64>> = nodes.par_iter().map(|xi| coherent_amplitudes(rows, xi.alpha(hbar))).collect();
    Mat::from_fn(rows, nodes.len(), |i, k| cols[k][i])
}

/// <chi_xi, X chi_xi> at every node.
pub fn husimi_values(space: &FockSpace, x: &FockOperator, nodes: &[PhasePoint]) -> Result<Vec<c64>> {
    space.check_same(x.space())?;
    let n = space.dim();
    let mut out = Vec::with_capacity(nodes.len());
    for chunk in nodes.chunks(CHUNK) {
        let c = coherent_matrix(space.hbar(), n, chunk);
        let y = linalg::mul(x.matrix().as_ref(), c.as_ref());
        for k in 0..chunk.len() {
            let mut s = c64::new(0.0, 0.0);
            for i in 0..n {
                s += c[(i, k)].conj() * y[(i, k)];
            }
            out.push(s);
        }
    }
    Ok(out)
}

pub fn husimi_at(space: &FockSpace, x: &FockOperator, xi: PhasePoint) -> Result<c64> {
    Ok(husimi_values(space, x, &[xi])?[0])
}

/// j0h(X) sampled on the window. The defect is the largest coherent mass the
/// truncation cuts at any node; beyond it the symbol of the compression is
/// not the symbol of the operator.
pub fn husimi_symbol(space: &FockSpace, x: &FockOperator, w: &Window) -> Result<WithDefect<PhaseSpaceFunction>> {
    let indexed = w.indexed_nodes();
    let nodes: Vec<PhasePoint> = indexed.iter().map(|n| n.2).collect();
    let vals = husimi_values(space, x, &nodes)?;
    let res = w.resolution;
    let mut values = vec![c64::new(f64::NAN, f64::NAN); res * res];
    for ((ix, ip, _), v) in indexed.iter().zip(vals) {
        values[ip * res + ix] = v;
    }
    let r = w.radius();
    let defect = coherent_tail(space.dim(), r * r / (2.0 * space.hbar()));
    Ok(WithDefect::new(PhaseSpaceFunction::Sampled(SampledGrid { window: *w, values }), defect))
}

/// sum_k weights_k values_k |chi_k><chi_k| on the space.
pub fn antiwick_from_values(
    space: &FockSpace,
    nodes: &[PhasePoint],
    weights: &[f64],
    values: &[c64],
) -> Result<FockOperator> {
    if nodes.len() != weights.len() || nodes.len() != values.len() {
        return Err(Error::InvalidParameter {
            key: "quadrature".into(),
            reason: format!("{} nodes, {} weights, {} values", nodes.len(), weights.len(), values.len()),
        });
    }
    if let Some(v) = values.iter().find(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::NonFinite(format!("symbol value {v} at a quadrature node")));
    }
    let n = space.dim();
    let mut acc = Mat::<c64>::zeros(n, n);
    for (start, chunk) in nodes.chunks(CHUNK).enumerate().map(|(i, c)| (i * CHUNK, c)) {
        let c = coherent_matrix(space.hbar(), n, chunk);
        let cw = Mat::from_fn(n, chunk.len(), |i, k| c[(i, k)] * (values[start + k] * weights[start + k]));
        linalg::add_mul_adj(&mut acc, cw.as_ref(), c.as_ref());
    }
    let op = FockOperator::new(space, acc)?;
    Ok(if values.iter().all(|v| v.im == 0.0) { op.hermitize() } else { op })
}

/// j_hbar0(f) by quadrature. The defect is the identity-resolution defect of
/// the grid on its reliable levels.
pub fn antiwick_quantize(space: &FockSpace, f: &PhaseSpaceFunction, q: &QuadratureGrid) -> Result<WithDefect<FockOperator>> {
    check_grid(space, q)?;
    let values = q.nodes.par_iter().map(|xi| f.evaluate(*xi)).collect::<Result<Vec<_>>>()?;
    let op = antiwick_from_values(space, &q.nodes, &q.weights, &values)?;
    let levels = q.reliable_levels(1e-6).clamp(1, space.dim());
    let defect = identity_resolution_defect(space, q, levels)?;
    Ok(WithDefect::new(op, defect))
}

fn check_grid(space: &FockSpace, q: &QuadratureGrid) -> Result<()> {
    if (q.hbar - space.hbar()).abs() > 1e-15 * space.hbar() {
        return Err(Error::InvalidParameter {
            key: "quadrature".into(),
            reason: format!("grid built for hbar={} used at hbar={}", q.hbar, space.hbar()),
        });
    }
    Ok(())
}

/// || P (j_hbar0(1) - 1) P || with P the projection onto the first `levels` levels.
pub fn identity_resolution_defect(space: &FockSpace, q: &QuadratureGrid, levels: usize) -> Result<f64> {
    check_grid(space, q)?;
    let b = levels.min(space.dim()).max(1);
    let mut acc = Mat::<c64>::zeros(b, b);
    for (start, chunk) in q.nodes.chunks(CHUNK).enumerate().map(|(i, c)| (i * CHUNK, c)) {
        let c = coherent_matrix(space.hbar(), b, chunk);
        let cw = Mat::from_fn(b, chunk.len(), |i, k| c[(i, k)] * q.weights[start + k]);
        linalg::add_mul_adj(&mut acc, cw.as_ref(), c.as_ref());
    }
    for i in 0..b {
        acc[(i, i)] -= c64::new(1.0, 0.0);
    }
    let ev = linalg::hermitian_eigenvalues(acc.as_ref())?;
    Ok(ev.iter().fold(0.0_f64, |m, v| m.max(v.abs())))
}

/// Diagonal thermal state nbar^n/(1+nbar)^{n+1}, compressed.
pub fn thermal_operator(space: &FockSpace, nbar: f64) -> FockOperator {
    let n = space.dim();
    let q = nbar / (1.0 + nbar);
    let m = Mat::from_fn(n, n, |i, j| {
        if i == j {
            c64::new(q.powi(i as i32) / (1.0 + nbar), 0.0)
        } else {
            c64::new(0.0, 0.0)
        }
    });
    FockOperator::new(space, m).expect("square by construction").hermitize()
}

/// Exact j_hbar0(f) for the families with a closed form:
/// - Fourier sums: sum_j w_j e^{-hbar |eta_j|^2/4} E_hbar(eta_j);
/// - Gaussian bumps h e^{-|xi-c|^2/(2 w^2)}: h nbar W(c) thermal(nbar) W(c)^dag
///   with nbar = w^2/hbar;
/// - linear combinations of these.
///
/// Returns None for other forms.
pub fn antiwick_closed_form(space: &FockSpace, f: &PhaseSpaceFunction) -> Result<Option<FockOperator>> {
    use PhaseSpaceFunction as F;
    let hbar = space.hbar();
    if let Some(atoms) = f.as_atoms() {
        let mut acc = FockOperator::zero(space);
        for a in atoms {
            let e = scaled_weyl_observable(space, a.eta)?.value;
            acc = acc.add(&e.scale(a.weight * (-hbar * a.eta.norm_sq() / 4.0).exp()))?;
        }
        return Ok(Some(acc));
    }
    match f {
        F::Gaussian { center, width, height } => {
            let nbar = width * width / hbar;
            let t = thermal_operator(space, nbar).scale(c64::new(height * nbar, 0.0));
            let out = if *center == PhasePoint::ORIGIN {
                t
            } else {
                let w = weyl_operator(space, *center)?.value;
                let m = linalg::mul_adj(linalg::mul(w.matrix().as_ref(), t.matrix().as_ref()).as_ref(), w.matrix().as_ref());
                FockOperator::new(space, m)?.hermitize()
            };
            Ok(Some(out))
        }
        F::Sum(terms) => {
            let mut acc = FockOperator::zero(space);
            for (c, g) in terms {
                match antiwick_closed_form(space, g)? {
                    Some(op) => acc = acc.add(&op.scale(*c))?,
                    None => return Ok(None),
                }
            }
            Ok(Some(acc))
        }
        _ => Ok(None),
    }
}

/// j0h(j_hbar0(f)) = f convolved with the Gaussian of covariance hbar.
pub fn berezin_transform(f: &PhaseSpaceFunction, hbar: f64) -> Result<PhaseSpaceFunction> {
    gaussian_smooth(f, hbar)
}

/// j_{hbar, hbar'}(X) = j_hbar0(j0hbar'(X)): Husimi symbol of X on
/// `space_from` at the grid nodes, quantized on `space_to`. The defect adds the
/// grid's identity defect and the coherent tail of `space_from` at the grid edge.
pub fn compare(
    space_to: &FockSpace,
    space_from: &FockSpace,
    x: &FockOperator,
    q: &QuadratureGrid,
) -> Result<WithDefect<FockOperator>> {
    check_grid(space_to, q)?;
    let values = husimi_values(space_from, x, &q.nodes)?;
    let op = antiwick_from_values(space_to, &q.nodes, &q.weights, &values)?;
    let levels = q.reliable_levels(1e-6).clamp(1, space_to.dim());
    let r = q.half_width * if q.shape == crate::phasespace::WindowShape::Square { std::f64::consts::SQRT_2 } else { 1.0 };
    let tail = coherent_tail(space_from.dim(), r * r / (2.0 * space_from.hbar()));
    Ok(WithDefect::new(op, identity_resolution_defect(space_to, q, levels)? + tail))
}
