use faer::{c64, Mat};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::QuadratureGrid;
use crate::fock::{coherent_tail, displacement_matrix, scaled_weyl_observable, DensityOperator, FockOperator, FockSpace, PhasePoint, QuantumState};
use crate::phasespace::{PhaseSpaceFunction, SampledGrid, Window};
use crate::{linalg, Error, Result, WithDefect};

/// Pi_xi = W(xi) Pi W(xi)^dag = W(2 xi) Pi, with Pi = diag((-1)^n).
pub fn displaced_parity(space: &FockSpace, xi: PhasePoint) -> FockOperator {
    let n = space.dim();
    let w = displacement_matrix(n, (2.0 * xi).alpha(space.hbar()));
    let m = Mat::from_fn(n, n, |i, j| if j % 2 == 0 { w[(i, j)] } else { -w[(i, j)] });
    FockOperator::new(space, m).expect("square by construction").hermitize()
}

/// Nonzero spectral weights and eigenvectors of a Hermitian matrix.
fn spectral_terms(rho: &DensityOperator) -> Result<Vec<(f64, Vec<c64>)>> {
    let (vals, vecs) = linalg::hermitian_eigen(rho.matrix().as_ref())?;
    let top = vals.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let n = rho.space().dim();
    Ok(vals
        .iter()
        .enumerate()
        .filter(|(_, v)| v.abs() > 1e-15 * top)
        .map(|(k, &v)| (v, (0..n).map(|i| vecs[(i, k)]).collect()))
        .collect())
}

/// (2/hbar) tr(rho Pi_xi) on the window nodes, computed as
/// (2/hbar) sum_i p_i sum_n (-1)^n |<n| W(-xi) psi_i>|^2.
///
/// Parity sums of a truncated displaced vector do not cancel, so the window
/// must fit in the space; the defect is the coherent tail at the window radius.
pub fn wigner_function(space: &FockSpace, rho: &DensityOperator, w: &Window) -> Result<WithDefect<PhaseSpaceFunction>> {
    space.check_same(rho.space())?;
    let terms = spectral_terms(rho)?;
    let n = space.dim();
    let hbar = space.hbar();
    let indexed = w.indexed_nodes();
    let vals: Vec<f64> = indexed
        .par_iter()
        .map(|(_, _, xi)| {
            let d = displacement_matrix(n, (-*xi).alpha(hbar));
            let mut total = 0.0;
            for (p, psi) in &terms {
                let mut acc = 0.0;
                for i in 0..n {
                    let mut s = c64::new(0.0, 0.0);
                    for (j, a) in psi.iter().enumerate() {
                        s += d[(i, j)] * a;
                    }
                    acc += if i % 2 == 0 { s.norm_sqr() } else { -s.norm_sqr() };
                }
                total += p * acc;
            }
            2.0 / hbar * total
        })
        .collect();
    let res = w.resolution;
    let mut values = vec![c64::new(f64::NAN, f64::NAN); res * res];
    for ((ix, ip, _), v) in indexed.iter().zip(vals) {
        values[ip * res + ix] = c64::new(v, 0.0);
    }
    let defect = coherent_tail(n, w.radius().powi(2) / (2.0 * hbar));
    Ok(WithDefect::new(PhaseSpaceFunction::Sampled(SampledGrid { window: *w, values }), defect))
}

/// Both sides of the overlap identity: (int W1 W2 dxdp/(2 pi), tr(rho1^dag rho2)/hbar).
/// The integral is the node sum times spacing^2 over the window.
pub fn wigner_overlap_check(rho1: &DensityOperator, rho2: &DensityOperator, w: &Window) -> Result<(f64, f64)> {
    rho1.space().check_same(rho2.space())?;
    let space = rho1.space();
    let w1 = wigner_function(space, rho1, w)?.value.values_on(w)?;
    let w2 = wigner_function(space, rho2, w)?.value.values_on(w)?;
    let h = w.spacing();
    let integral = w1.iter().zip(&w2).map(|(a, b)| a.re * b.re).sum::<f64>() * h * h / (2.0 * std::f64::consts::PI);
    let m = linalg::adj_mul(rho1.matrix().as_ref(), rho2.matrix().as_ref());
    let tr: c64 = (0..space.dim()).map(|i| m[(i, i)]).sum();
    Ok((integral, tr.re / space.hbar()))
}

/// D = int (dxi/pi) rho(xi) Pi_xi, by the grid's midpoint cells, for a phase
/// space density normalized as int rho dxi/(2 pi) = 1. For a discontinuous rho
/// the result need not be positive; that failure is what it is used to show.
pub fn wigner_inverse_quantize(space: &FockSpace, rho: &PhaseSpaceFunction, q: &QuadratureGrid) -> Result<FockOperator> {
    let h = q.spacing();
    let n = space.dim();
    let cell = h * h / std::f64::consts::PI;
    let parts: Vec<Mat<c64>> = q
        .nodes
        .par_chunks(64)
        .map(|chunk| {
            let mut acc = Mat::<c64>::zeros(n, n);
            for xi in chunk {
                let v = rho.evaluate(*xi)?;
                if v == c64::new(0.0, 0.0) {
                    continue;
                }
                let p = displaced_parity(space, *xi);
                acc = &acc + &Mat::from_fn(n, n, |i, j| p.matrix()[(i, j)] * (v * cell));
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut total = Mat::<c64>::zeros(n, n);
    for p in parts {
        total = &total + &p;
    }
    Ok(FockOperator::new(space, total)?.hermitize())
}

/// Values <E_hbar(eta)> of a state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicTable {
    pub etas: Vec<PhasePoint>,
    pub values: Vec<(f64, f64)>,
}

impl CharacteristicTable {
    pub fn value(&self, k: usize) -> c64 {
        c64::new(self.values[k].0, self.values[k].1)
    }

    /// Largest |value - reference(eta)| over the table.
    pub fn max_deviation(&self, reference: &dyn Fn(PhasePoint) -> c64) -> f64 {
        (0..self.etas.len()).map(|k| (self.value(k) - reference(self.etas[k])).norm()).fold(0.0, f64::max)
    }
}

pub fn characteristic_function(state: &(dyn QuantumState + Sync), etas: &[PhasePoint]) -> Result<CharacteristicTable> {
    let space = state.space();
    if etas.iter().any(|e| !e.is_finite()) {
        return Err(Error::NonFinite("characteristic argument".into()));
    }
    let values = etas
        .par_iter()
        .map(|&eta| {
            if eta == PhasePoint::ORIGIN {
                return Ok((1.0, 0.0));
            }
            let e = scaled_weyl_observable(space, eta)?.value;
            let v = state.expectation(&e)?;
            Ok((v.re, v.im))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CharacteristicTable { etas: etas.to_vec(), values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{coherent_projector, coherent_vector, make_space, StateVector};

    #[test]
    fn wigner_of_coherent_projector_and_first_excited() {
        for hbar in [1.0, 0.25] {
            let s = make_space(hbar, 80, 1).unwrap();
            let g = coherent_projector(&s, PhasePoint::ORIGIN).unwrap().value;
            let w = Window::square(2.0, 33).unwrap();
            let f = wigner_function(&s, &g, &w).unwrap().value;
            for xi in w.nodes() {
                let want = 2.0 / hbar * (-xi.norm_sq() / hbar).exp();
                let got = f.evaluate(xi).unwrap();
                assert!((got.re - want).abs() < 1e-10 && got.im == 0.0);
            }
        }
        let s = make_space(1.0, 40, 1).unwrap();
        let one = StateVector::basis(&s, 1).unwrap().projector();
        let w = Window::square(1.0, 33).unwrap();
        let f = wigner_function(&s, &one, &w).unwrap().value;
        assert!((f.evaluate(PhasePoint::ORIGIN).unwrap().re + 2.0).abs() < 1e-12);
    }

    #[test]
    fn wigner_normalization_and_overlaps() {
        let w = Window::disk(7.0, 141).unwrap();
        let s = make_space(1.0, crate::fock::policy::dim_for_reach(1.0, 7.0).unwrap(), 1).unwrap();
        let g = coherent_projector(&s, PhasePoint::ORIGIN).unwrap().value;
        let f = wigner_function(&s, &g, &w).unwrap();
        assert!(f.defect < 1e-12);
        let f = f.value;
        let h = w.spacing();
        let total: f64 = f.values_on(&w).unwrap().iter().map(|v| v.re).sum::<f64>() * h * h / (2.0 * std::f64::consts::PI);
        assert!((total - 1.0).abs() < 1e-8, "{total}");
        let (a, b) = wigner_overlap_check(&g, &g, &w).unwrap();
        assert!((a - 1.0).abs() < 1e-4 && (b - 1.0).abs() < 1e-12);
        let f0 = StateVector::basis(&s, 0).unwrap().projector();
        let f1 = StateVector::basis(&s, 1).unwrap().projector();
        let (a, b) = wigner_overlap_check(&f0, &f1, &w).unwrap();
        assert!(a.abs() < 1e-4 && b.abs() < 1e-15, "{a} {b}");
        let mix = DensityOperator::mixture(&[(0.5, StateVector::basis(&s, 0).unwrap()), (0.5, StateVector::basis(&s, 1).unwrap())]).unwrap();
        let (a, b) = wigner_overlap_check(&f0, &mix, &w).unwrap();
        assert!((b - 0.5).abs() < 1e-12 && (a - 0.5).abs() < 1e-4);
    }

    #[test]
    fn inverse_quantization_of_gaussian_is_the_vacuum() {
        // rho = (2/hbar) e^{-xi^2/hbar} is the Wigner function of the vacuum
        let hbar = 0.5;
        let s = make_space(hbar, 40, 1).unwrap();
        let rho = PhaseSpaceFunction::Gaussian { center: PhasePoint::ORIGIN, width: (hbar / 2.0).sqrt(), height: 2.0 / hbar };
        let q = QuadratureGrid::for_radius(hbar, 0.0, 0.2).unwrap();
        let d = wigner_inverse_quantize(&s, &rho, &q).unwrap();
        assert!((d.entry(0, 0).re - 1.0).abs() < 1e-6, "{}", d.entry(0, 0));
        assert!(linalg::max_abs_diff(d.block(10).as_ref(), StateVector::basis(&s, 0).unwrap().projector().as_operator().block(10).as_ref()) < 1e-6);
    }

    #[test]
    fn characteristic_of_coherent_state() {
        let hbar = 1.0;
        let s = make_space(hbar, 60, 1).unwrap();
        let v = coherent_vector(&s, PhasePoint::ORIGIN).unwrap().value;
        let etas = [PhasePoint::ORIGIN, PhasePoint::new(0.0, 2.0), PhasePoint::new(1.0, 1.0)];
        let t = characteristic_function(&v, &etas).unwrap();
        assert_eq!(t.value(0), c64::new(1.0, 0.0));
        assert!((t.value(1).re - (-1.0f64).exp()).abs() < 1e-12);
        assert!(t.max_deviation(&|e| c64::new((-hbar * e.norm_sq() / 4.0).exp(), 0.0)) < 1e-12);
    }
}
