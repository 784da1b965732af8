use faer::c64;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

use super::function::{Atom, PhaseSpaceFunction, SampledGrid};
use super::{symplectic_form, Window};
use crate::fock::PhasePoint;
use crate::{Error, Result};

/// Largest |f| over the window nodes. A lower bound for the sup over R^2.
/// NaN samples (outside a disk, or lost at a grid edge) are skipped.
pub fn sup_norm(f: &PhaseSpaceFunction, w: &Window) -> Result<f64> {
    Ok(f.values_on(w)?.iter().map(|v| v.norm()).fold(0.0, f64::max))
}

/// Largest |f - g| over the window nodes.
pub fn sup_distance(f: &PhaseSpaceFunction, g: &PhaseSpaceFunction, w: &Window) -> Result<f64> {
    let a = f.values_on(w)?;
    let b = g.values_on(w)?;
    Ok(a.iter().zip(&b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max))
}

/// alpha0_xi(f)(eta) = f(eta - xi).
pub fn translate_classical(f: &PhaseSpaceFunction, xi: PhasePoint) -> PhaseSpaceFunction {
    use PhaseSpaceFunction as F;
    if xi == PhasePoint::ORIGIN {
        return f.clone();
    }
    match f {
        F::Constant(_) => f.clone(),
        F::WeylExponential(_) | F::FourierMeasure(_) => F::FourierMeasure(
            f.as_atoms()
                .unwrap_or_default()
                .into_iter()
                .map(|a| Atom::new(a.weight * c64::cis(-symplectic_form(a.eta, xi)), a.eta))
                .collect(),
        ),
        F::Gaussian { center, width, height } => F::Gaussian { center: *center + xi, width: *width, height: *height },
        F::Translated(g, s) => F::Translated(g.clone(), *s + xi),
        F::Sampled(grid) => {
            let w = grid.window;
            let n = w.resolution;
            let values = (0..n * n)
                .map(|k| {
                    let node = PhasePoint::new(w.axis(k % n), w.axis(k / n));
                    if w.contains(node) {
                        grid.interpolate(node - xi).unwrap_or(c64::new(f64::NAN, f64::NAN))
                    } else {
                        c64::new(f64::NAN, f64::NAN)
                    }
                })
                .collect();
            F::Sampled(SampledGrid { window: w, values })
        }
        _ => F::Translated(Box::new(f.clone()), xi),
    }
}

/// Translation vectors used for moduli of continuity: radii sqrt(lambda),
/// sqrt(lambda)/2, sqrt(lambda)/4, each at `angles` equally spaced angles
/// starting at `offset`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AngularSampling {
    pub angles: usize,
    pub offset: f64,
}

impl AngularSampling {
    pub fn new(angles: usize) -> Self {
        Self { angles: angles.max(1), offset: 0.0 }
    }

    /// Seed 0 keeps the offset at 0 so axis directions are sampled exactly.
    pub fn seeded(angles: usize, seed: u64) -> Self {
        let angles = angles.max(1);
        let offset = if seed == 0 {
            0.0
        } else {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            rng.random::<f64>() * std::f64::consts::TAU / angles as f64
        };
        Self { angles, offset }
    }

    pub fn directions(&self) -> Vec<PhasePoint> {
        (0..self.angles)
            .map(|k| {
                let a = self.offset + std::f64::consts::TAU * k as f64 / self.angles as f64;
                PhasePoint::new(a.cos(), a.sin())
            })
            .collect()
    }

    pub fn points(&self, lambda: f64) -> Vec<PhasePoint> {
        let r = lambda.max(0.0).sqrt();
        if r == 0.0 {
            return vec![];
        }
        let dirs = self.directions();
        [r, r / 2.0, r / 4.0].iter().flat_map(|&s| dirs.iter().map(move |d| s * *d)).collect()
    }
}

impl Default for AngularSampling {
    fn default() -> Self {
        Self::new(16)
    }
}

/// m0(f, lambda): max over sampled |xi|^2 <= lambda of the window sup of
/// |f(. - xi) - f|. Window nodes whose preimage leaves a sampled grid are skipped.
pub fn classical_modulus(f: &PhaseSpaceFunction, lambda: f64, w: &Window, sampling: &AngularSampling) -> Result<f64> {
    if !(lambda >= 0.0) {
        return Err(Error::InvalidParameter { key: "lambda".into(), reason: format!("must be >= 0, got {lambda}") });
    }
    let nodes = w.nodes();
    let base = f.values_on(w)?;
    let per_shift = sampling
        .points(lambda)
        .into_par_iter()
        .map(|xi| {
            let mut m = 0.0_f64;
            for (node, b) in nodes.iter().zip(&base) {
                match f.evaluate(*node - xi) {
                    Ok(v) => m = m.max((v - b).norm()),
                    Err(Error::OutsideWindow { .. }) => {}
                    Err(e) => return Err(e),
                }
            }
            Ok(m)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(per_shift.into_iter().fold(0.0, f64::max))
}

/// Convolution with the Gaussian of covariance s * 1.
pub fn gaussian_smooth(f: &PhaseSpaceFunction, s: f64) -> Result<PhaseSpaceFunction> {
    use PhaseSpaceFunction as F;
    if !(s.is_finite() && s > 0.0) {
        return Err(Error::InvalidParameter { key: "s".into(), reason: format!("must be positive, got {s}") });
    }
    Ok(match f {
        F::Constant(_) => f.clone(),
        F::WeylExponential(_) | F::FourierMeasure(_) => F::FourierMeasure(
            f.as_atoms()
                .unwrap_or_default()
                .into_iter()
                .map(|a| Atom::new(a.weight * (-0.5 * s * a.eta.norm_sq()).exp(), a.eta))
                .collect(),
        ),
        F::Gaussian { center, width, height } => {
            let w2 = width * width;
            F::Gaussian { center: *center, width: (w2 + s).sqrt(), height: height * w2 / (w2 + s) }
        }
        F::Translated(g, xi) => F::Translated(Box::new(gaussian_smooth(g, s)?), *xi),
        F::Sum(terms) => F::Sum(terms.iter().map(|(c, g)| Ok((*c, gaussian_smooth(g, s)?))).collect::<Result<_>>()?),
        F::Sampled(grid) => smooth_grid(grid, s),
        other => {
            return Err(Error::Unsupported { op: "gaussian_smooth", form: format!("{other:?}") });
        }
    })
}

/// Discrete convolution with kernel weights renormalized over the available
/// nodes, so constants stay constant and nonnegative data stays nonnegative.
fn smooth_grid(grid: &SampledGrid, s: f64) -> PhaseSpaceFunction {
    let w = grid.window;
    let n = w.resolution as isize;
    let h = w.spacing();
    let reach = ((6.0 * s.sqrt()) / h).ceil() as isize;
    let values = (0..n * n)
        .into_par_iter()
        .map(|k| {
            let (ix, ip) = (k % n, k / n);
            if grid.values[k as usize].re.is_nan() {
                return grid.values[k as usize];
            }
            let mut acc = c64::new(0.0, 0.0);
            let mut mass = 0.0;
            for dp in -reach..=reach {
                for dx in -reach..=reach {
                    let (jx, jp) = (ix + dx, ip + dp);
                    if jx < 0 || jp < 0 || jx >= n || jp >= n {
                        continue;
                    }
                    let v = grid.values[(jp * n + jx) as usize];
                    if v.re.is_nan() {
                        continue;
                    }
                    let kw = (-((dx * dx + dp * dp) as f64) * h * h / (2.0 * s)).exp();
                    acc += v * kw;
                    mass += kw;
                }
            }
            acc / mass
        })
        .collect();
    PhaseSpaceFunction::Sampled(SampledGrid { window: w, values })
}

/// Atom list of the pointwise product of two Fourier sums.
pub fn fourier_product(a: &[Atom], b: &[Atom]) -> Vec<Atom> {
    let mut out: Vec<Atom> = Vec::new();
    for x in a {
        for y in b {
            push_atom(&mut out, Atom::new(x.weight * y.weight, x.eta + y.eta));
        }
    }
    out
}

fn push_atom(out: &mut Vec<Atom>, atom: Atom) {
    match out.iter_mut().find(|a| a.eta == atom.eta) {
        Some(a) => a.weight += atom.weight,
        None => out.push(atom),
    }
}

/// {f, g} = df/dp dg/dx - df/dx dg/dp.
///
/// On Fourier sums {E0(eta), E0(eta')} = -sigma(eta, eta') E0(eta + eta'), the
/// limit of (i/hbar)[E_hbar(eta), E_hbar(eta')]; this sign is fixed by that match.
pub fn poisson_bracket(f: &PhaseSpaceFunction, g: &PhaseSpaceFunction) -> Result<PhaseSpaceFunction> {
    use PhaseSpaceFunction as F;
    if let (Some(a), Some(b)) = (f.as_atoms(), g.as_atoms()) {
        let mut out = Vec::new();
        for x in &a {
            for y in &b {
                let s = symplectic_form(x.eta, y.eta);
                if s != 0.0 {
                    push_atom(&mut out, Atom::new(-s * x.weight * y.weight, x.eta + y.eta));
                }
            }
        }
        return Ok(F::FourierMeasure(out));
    }
    if let (F::Sampled(a), F::Sampled(b)) = (f, g) {
        if a.window != b.window {
            return Err(Error::InvalidWindow("bracket of grids on different windows".into()));
        }
        let w = a.window;
        let n = w.resolution;
        let h = w.spacing();
        let nan = c64::new(f64::NAN, f64::NAN);
        let mut values = vec![nan; n * n];
        for ip in 1..n - 1 {
            for ix in 1..n - 1 {
                let d = |s: &SampledGrid| {
                    let gx = (s.at(ix + 1, ip) - s.at(ix - 1, ip)) / (2.0 * h);
                    let gp = (s.at(ix, ip + 1) - s.at(ix, ip - 1)) / (2.0 * h);
                    (gx, gp)
                };
                let (fx, fp) = d(a);
                let (gx, gp) = d(b);
                values[ip * n + ix] = fp * gx - fx * gp;
            }
        }
        return Ok(F::Sampled(SampledGrid { window: w, values }));
    }
    Ok(F::Bracket(Box::new(f.clone()), Box::new(g.clone())))
}
