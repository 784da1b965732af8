use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::fock::PhasePoint;
use crate::phasespace::{Atom, Window};
use crate::{c64, Error, Result};

/// Strictly decreasing positive hbar values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct HbarSchedule(Vec<f64>);

impl HbarSchedule {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter { key: "hbar".into(), reason: "schedule is empty".into() });
        }
        if let Some(&v) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::InvalidHbar(v));
        }
        if values.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidParameter { key: "hbar".into(), reason: "schedule must be strictly decreasing".into() });
        }
        Ok(Self(values))
    }

    /// 1, 1/2, ..., 2^{-steps}.
    pub fn geometric(steps: u32) -> Self {
        Self((0..=steps).map(|k| 0.5f64.powi(k as i32)).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl Default for HbarSchedule {
    fn default() -> Self {
        Self::geometric(6)
    }
}

impl TryFrom<Vec<f64>> for HbarSchedule {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<HbarSchedule> for Vec<f64> {
    fn from(s: HbarSchedule) -> Self {
        s.0
    }
}

impl FromStr for HbarSchedule {
    type Err = Error;
    /// Comma separated values; `a/b` fractions are accepted.
    fn from_str(s: &str) -> Result<Self> {
        let values = s.split(',').map(|t| parse_number("hbar", t.trim())).collect::<Result<Vec<_>>>()?;
        Self::new(values)
    }
}

/// Whether a kind asserts convergence or asserts its failure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    Positive,
    Negative,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    PositionMomentum,
    WeylLimit,
    FourierMeasure,
    Product,
    Bracket,
    Evolution,
    Resolvent,
    OscillationCounterexample,
    PointMeasure,
    Eigenstate,
    Wkb,
    Interference,
    BasicSequence,
    WignerState,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 14] = [
        Self::PositionMomentum,
        Self::WeylLimit,
        Self::FourierMeasure,
        Self::Product,
        Self::Bracket,
        Self::Evolution,
        Self::Resolvent,
        Self::OscillationCounterexample,
        Self::PointMeasure,
        Self::Eigenstate,
        Self::Wkb,
        Self::Interference,
        Self::BasicSequence,
        Self::WignerState,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::PositionMomentum => "position_momentum",
            Self::WeylLimit => "weyl_limit",
            Self::FourierMeasure => "fourier_measure",
            Self::Product => "product",
            Self::Bracket => "bracket",
            Self::Evolution => "evolution",
            Self::Resolvent => "resolvent",
            Self::OscillationCounterexample => "oscillation_counterexample",
            Self::PointMeasure => "point_measure",
            Self::Eigenstate => "eigenstate",
            Self::Wkb => "wkb",
            Self::Interference => "interference",
            Self::BasicSequence => "basic_sequence",
            Self::WignerState => "wigner_state",
        }
    }

    pub fn polarity(self) -> Polarity {
        match self {
            Self::OscillationCounterexample => Polarity::Negative,
            _ => Polarity::Positive,
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Self::PositionMomentum => "Husimi symbol of cos(kQ) and cos(kP) against cos(kx) and cos(kp); reference damping e^{-hbar k^2/4}.",
            Self::WeylLimit => "Husimi symbol of E_hbar(eta) against e^{i sigma(eta, xi)}; reference 1 - e^{-hbar |eta|^2/4}.",
            Self::FourierMeasure => "Same metric for a finite sum of weighted Weyl atoms.",
            Self::Product => "Husimi symbol of the product of two quantized atoms against the classical product; closed-form deviation per atom pair, fitted rate near 1.",
            Self::Bracket => "Scaled commutator (i/hbar)[A,B] of two quantized atoms against their Poisson bracket; the exact factor -(2/hbar) sin(hbar sigma/2) is checked separately.",
            Self::Evolution => "Heisenberg evolution against the classical flow: exact for the oscillator (periodic at 2 pi), convergent for a quartic perturbation.",
            Self::Resolvent => "Husimi symbol of (H - z)^{-1} against (p^2/2 + V - z)^{-1} for V = 0 and V = cos x, plus a modulus table showing the Coulomb resolvent is not uniformly continuous.",
            Self::OscillationCounterexample => "W(eta) at fixed eta: Husimi symbol vanishes like e^{-|eta|^2/(4 hbar)} while the modulus of continuity stays near 2, so the sequence does not converge.",
            Self::PointMeasure => "Coherent vacuum states concentrate at the origin: characteristic values e^{-hbar |xi|^2/4} and the cosine operator inequality.",
            Self::Eigenstate => "Oscillator eigenstates with hbar(n + 1/2) fixed: Husimi mass concentrates on the energy circle, uniformly in angle.",
            Self::Wkb => "Characteristic function of a WKB state A(y) e^{iS(y)/hbar} against the integral of |A|^2 e^{i(p y - x S'(y))}.",
            Self::Interference => "Superposition of coherent states at a and b: the cross term under a smooth observable vanishes exponentially, the state tends to the equal mixture.",
            Self::BasicSequence => "X_hbar = j_{hbar,hbar'}(E_{hbar'}(eta)) at fixed hbar': Husimi symbols converge to that of E_{hbar'}(eta).",
            Self::WignerState => "State with a positive Gaussian-mixture Wigner function: expectations converge; a disk-indicator Wigner function yields a non-positive operator.",
        }
    }

    /// Schedule used when the caller does not set one.
    pub fn default_schedule(self) -> HbarSchedule {
        match self {
            Self::Wkb => HbarSchedule(vec![0.1, 0.02]),
            _ => HbarSchedule::default(),
        }
    }

    /// Parameter table: key, value type, default, help.
    pub fn params(self) -> Vec<ParamSpec> {
        use ParamType::*;
        let p = ParamSpec::new;
        let window = |l: &'static str, res: &'static str| {
            vec![
                p("window", Positive, l, "half-width L of the disk window for sup norms"),
                p("resolution", OddCount, res, "grid points per axis of the window (odd, >= 33)"),
            ]
        };
        let mut out = match self {
            Self::PositionMomentum => {
                let mut v = window("4", "33");
                v.push(p("k", Positive, "1", "frequency of the cosine"));
                v.push(p("tol_reference", Positive, "1e-3", "allowed |metric - reference| floor"));
                v
            }
            Self::WeylLimit => {
                let mut v = window("4", "33");
                v.push(p("eta", Point, "0:1", "Weyl atom, as x:p"));
                v.push(p("tol_reference", Positive, "1e-3", "allowed |metric - reference| floor"));
                v
            }
            Self::FourierMeasure => {
                let mut v = window("4", "33");
                v.push(p("atoms", Atoms, "0.5@1:0,0.3@0:1,0.2@1:1", "weighted atoms w@x:p"));
                v.push(p("tol_reference", Positive, "1e-3", "allowed |metric - reference| floor"));
                v
            }
            Self::Product => {
                let mut v = window("4", "33");
                v.push(p("eta", Point, "1:0", "first atom"));
                v.push(p("eta_prime", Point, "0:1", "second atom"));
                v.push(p("tol_reference", Positive, "1e-3", "allowed |metric - reference| floor"));
                v.push(p("rate_low", Number, "0.85", "lower end of the accepted fitted rate"));
                v.push(p("rate_high", Number, "1.15", "upper end of the accepted fitted rate"));
                v
            }
            Self::Bracket => {
                let mut v = window("4", "33");
                v.push(p("eta", Point, "1:0", "first atom"));
                v.push(p("eta_prime", Point, "0:1", "second atom"));
                v.push(p("tol_factor", Positive, "1e-6", "allowed error of the commutator factor"));
                v.push(p("tol_reference", Positive, "1e-3", "allowed |metric - reference| floor"));
                v.push(p("factor_rate", Number, "2", "expected rate of the factor deviation"));
                v.push(p("factor_rate_tol", Positive, "0.1", "tolerance on that rate"));
                v.push(p("metric_rate", Number, "1", "expected rate of the full bracket metric"));
                v.push(p("metric_rate_tol", Positive, "0.15", "tolerance on that rate"));
                v
            }
            Self::Evolution => {
                let mut v = window("2.5", "33");
                v.push(p("eta", Point, "1:0.5", "Weyl atom evolved"));
                v.push(p("times", Numbers, "pi/4,pi/2,pi,2pi", "oscillator times"));
                v.push(p("quartic", Number, "0.05", "strength g of the g x^4 perturbation"));
                v.push(p("t", Positive, "1", "time for the quartic run"));
                v.push(p("tol_exact", Positive, "1e-4", "oscillator quantum/classical tolerance"));
                v.push(p("tol_period", Positive, "1e-6", "periodicity tolerance at t = 2 pi"));
                v.push(p("tol_final", Positive, "0.05", "required final quartic metric"));
                v
            }
            Self::Resolvent => {
                let mut v = window("4", "33");
                v.push(p("potentials", Choices(&["zero", "cos"]), "zero,cos", "potentials V"));
                v.push(p("z", Complex, "0:1", "spectral parameter re:im"));
                v.push(p("tol_final", Positive, "0.05", "required final metric"));
                v.push(p("coulomb_eps", Numbers, "1,0.1,0.01,0.001", "shift scales of the Coulomb table"));
                v.push(p("coulomb_floor", Positive, "0.5", "required modulus lower bound"));
                v
            }
            Self::OscillationCounterexample => {
                let mut v = window("2", "33");
                v.push(p("eta", Point, "1:0", "fixed displacement of W(eta)"));
                v.push(p("lambda", Positive, "0.5", "modulus argument"));
                v.push(p("angles", Count, "32", "sampled directions"));
                v.push(p("hbar_max", Positive, "0.0625", "assertions apply for hbar at or below this"));
                v.push(p("tol_husimi", Positive, "2e-3", "slack over e^{-|eta|^2/(4 hbar)}"));
                v.push(p("modulus_floor", Positive, "1.9", "required modulus"));
                v
            }
            Self::PointMeasure => vec![
                p("dim", Count, "64", "Fock dimension"),
                p("etas", Points, "0.5:0,0:1,1:1,2:0", "characteristic arguments"),
                p("xis", Points, "0.5:0,0:1", "arguments of the cosine inequality"),
                p("tol_char", Positive, "1e-6", "characteristic value tolerance"),
                p("tol_eig", Positive, "1e-6", "allowed negative eigenvalue"),
            ],
            Self::Eigenstate => vec![
                p("levels", Counts, "8,32,128", "eigenlevels n; hbar = lambda/(n + 1/2)"),
                p("lambda", Positive, "1", "energy hbar(n + 1/2)"),
                p("width", Positive, "4", "annulus half-width in units of sqrt(hbar lambda)"),
                p("mass_floor", Positive, "0.9", "required annulus mass"),
                p("tol_angular", Positive, "0.02", "allowed angular variation at the top level"),
            ],
            Self::Wkb => vec![
                p("amplitude", Choices(&["gaussian"]), "gaussian", "amplitude A(y)"),
                p("action", Choices(&["linear", "quadratic"]), "linear", "action S(y) = p0 y (+ c y^2/2)"),
                p("p0", Number, "1", "linear action slope"),
                p("curvature", Number, "0.5", "c for the quadratic action"),
                p("y_window", Positive, "5", "support of the amplitude"),
                p("etas", Points, "0:0,1:0,-1:0,0:1,0:-1,2:0,-2:0,0:2,0:-2", "characteristic arguments"),
                p("tol_slope", Positive, "0.2", "tolerance slope in hbar"),
                p("tol_floor", Positive, "0.005", "tolerance floor"),
            ],
            Self::Interference => vec![
                p("a", Point, "-1:0", "first coherent centre"),
                p("b", Point, "1:0", "second coherent centre"),
                p("bump_width", Positive, "0.5", "width of the Gaussian bump at the midpoint"),
                p("etas", Points, "1:0,0:1,2:0,0:2,1:1", "characteristic arguments"),
                p("tol_slope", Positive, "0.2", "relative tolerance on the decay slope"),
                p("tol_mixture", Positive, "0.02", "final distance to the mixture"),
            ],
            Self::BasicSequence => {
                let mut v = window("1", "33");
                v.push(p("hbar_prime", Positive, "0.5", "fixed hbar'"));
                v.push(p("eta", Point, "0:1", "Weyl atom at hbar'"));
                v.push(p("spacing", Positive, "0.3", "quadrature cell side in units of sqrt(hbar)"));
                v.push(p("tol_reference", Positive, "1e-3", "allowed |metric - reference| floor"));
                v
            }
            Self::WignerState => vec![
                p("centers", Points, "-1:0,1:0", "centres of the Gaussian mixture"),
                p("variance", Positive, "0.5", "variance s^2 of each Gaussian (>= hbar/2)"),
                p("etas", Points, "1:0,0:1,1:1", "test atoms A_0 = E0(eta)"),
                p("disk_radius", Positive, "1", "radius of the indicator Wigner function"),
                p("disk_spacing", Positive, "0.25", "quadrature cell side in units of sqrt(hbar)"),
                p("tol_char", Positive, "1e-6", "tolerance on the characteristic relation"),
                p("tol_reference", Positive, "1e-3", "allowed |metric - reference| floor"),
                p("eig_floor", Positive, "0.01", "divergence: min eigenvalue below -eig_floor"),
                p("growth", Positive, "2", "divergence: trace-norm growth factor"),
            ],
        };
        out.push(p("rate_defect_ratio", Positive, "0.1", "rows enter the rate fit when defect < ratio x metric"));
        out
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn kind_names() -> String {
    ExperimentKind::ALL.iter().map(|k| k.name()).collect::<Vec<_>>().join(", ")
}

impl FromStr for ExperimentKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ExperimentKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| Error::InvalidParameter {
            key: "experiment".into(),
            reason: format!("unknown kind `{s}`; valid kinds: {}", kind_names()),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParamType {
    Number,
    Positive,
    Count,
    OddCount,
    Counts,
    Numbers,
    Point,
    Points,
    Complex,
    Atoms,
    Choices(&'static [&'static str]),
}

#[derive(Clone, Debug)]
pub struct ParamSpec {
    pub key: &'static str,
    pub ty: ParamType,
    pub default: &'static str,
    pub help: &'static str,
}

impl ParamSpec {
    const fn new(key: &'static str, ty: ParamType, default: &'static str, help: &'static str) -> Self {
        Self { key, ty, default, help }
    }
}

fn invalid(key: &str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { key: key.into(), reason: reason.into() }
}

/// A real number; accepts `pi`, `2pi`, `pi/4`, `1/64` style forms.
pub fn parse_number(key: &str, s: &str) -> Result<f64> {
    let atom = |t: &str| -> Result<f64> {
        let t = t.trim();
        if let Some(head) = t.strip_suffix("pi") {
            let c = if head.is_empty() {
                1.0
            } else if head == "-" {
                -1.0
            } else {
                head.trim_end_matches('*').parse::<f64>().map_err(|_| invalid(key, format!("not a number: `{s}`")))?
            };
            return Ok(c * std::f64::consts::PI);
        }
        t.parse::<f64>().map_err(|_| invalid(key, format!("not a number: `{s}`")))
    };
    let v = match s.split_once('/') {
        Some((a, b)) => atom(a)? / atom(b)?,
        None => atom(s)?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(key, format!("not finite: `{s}`")))
    }
}

fn parse_point(key: &str, s: &str) -> Result<PhasePoint> {
    let (x, p) = s.split_once(':').ok_or_else(|| invalid(key, format!("expected x:p, got `{s}`")))?;
    Ok(PhasePoint::new(parse_number(key, x)?, parse_number(key, p)?))
}

fn list(s: &str) -> impl Iterator<Item = &str> {
    s.split(',').map(str::trim).filter(|t| !t.is_empty())
}

fn parse_count(key: &str, s: &str) -> Result<usize> {
    s.trim().parse::<usize>().map_err(|_| invalid(key, format!("not a count: `{s}`")))
}

fn validate(spec: &ParamSpec, value: &str) -> Result<()> {
    let key = spec.key;
    match spec.ty {
        ParamType::Number => {
            parse_number(key, value)?;
        }
        ParamType::Positive => {
            if parse_number(key, value)? <= 0.0 {
                return Err(invalid(key, "must be positive"));
            }
        }
        ParamType::Count => {
            if parse_count(key, value)? == 0 {
                return Err(invalid(key, "must be at least 1"));
            }
        }
        ParamType::OddCount => {
            let n = parse_count(key, value)?;
            if n < 33 || n % 2 == 0 {
                return Err(invalid(key, "must be odd and at least 33"));
            }
        }
        ParamType::Counts => {
            let v = list(value).map(|t| parse_count(key, t)).collect::<Result<Vec<_>>>()?;
            if v.is_empty() {
                return Err(invalid(key, "empty list"));
            }
        }
        ParamType::Numbers => {
            let v = list(value).map(|t| parse_number(key, t)).collect::<Result<Vec<_>>>()?;
            if v.is_empty() {
                return Err(invalid(key, "empty list"));
            }
        }
        ParamType::Point | ParamType::Complex => {
            parse_point(key, value)?;
        }
        ParamType::Points => {
            let v = list(value).map(|t| parse_point(key, t)).collect::<Result<Vec<_>>>()?;
            if v.is_empty() {
                return Err(invalid(key, "empty list"));
            }
        }
        ParamType::Atoms => {
            parse_atoms(key, value)?;
        }
        ParamType::Choices(valid) => {
            let v: Vec<&str> = list(value).collect();
            if v.is_empty() {
                return Err(invalid(key, "empty list"));
            }
            if let Some(bad) = v.iter().find(|t| !valid.contains(t)) {
                return Err(invalid(key, format!("`{bad}` is not one of {}", valid.join(", "))));
            }
        }
    }
    Ok(())
}

fn parse_atoms(key: &str, s: &str) -> Result<Vec<Atom>> {
    let atoms = list(s)
        .map(|t| {
            let (w, pt) = t.split_once('@').ok_or_else(|| invalid(key, format!("expected w@x:p, got `{t}`")))?;
            Ok(Atom::new(c64::new(parse_number(key, w)?, 0.0), parse_point(key, pt)?))
        })
        .collect::<Result<Vec<_>>>()?;
    if atoms.is_empty() {
        return Err(invalid(key, "empty list"));
    }
    Ok(atoms)
}

/// Everything needed to run one experiment. Parameters are stored as text and
/// validated against the kind's table when set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub schedule: HbarSchedule,
    /// Forces the Fock dimension of every quantum run when set.
    pub dim_override: Option<usize>,
    /// Seed for the angular offsets of sampled moduli.
    pub seed: u64,
    pub params: BTreeMap<String, String>,
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind) -> Self {
        let params = kind.params().into_iter().map(|s| (s.key.to_string(), s.default.to_string())).collect();
        Self { kind, schedule: kind.default_schedule(), dim_override: None, seed: 0, params }
    }

    pub fn with_schedule(mut self, schedule: HbarSchedule) -> Self {
        self.schedule = schedule;
        self
    }

    pub fn valid_keys(kind: ExperimentKind) -> Vec<&'static str> {
        kind.params().iter().map(|s| s.key).collect()
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let specs = self.kind.params();
        let spec = specs.iter().find(|s| s.key == key).ok_or_else(|| Error::UnknownParameter {
            key: key.into(),
            kind: self.kind.name().into(),
            valid: Self::valid_keys(self.kind).join(", "),
        })?;
        validate(spec, value)?;
        self.params.insert(key.into(), value.trim().into());
        Ok(())
    }

    /// Re-validates every stored parameter (configs may arrive deserialized).
    pub fn validate(&self) -> Result<()> {
        let specs = self.kind.params();
        for (k, v) in &self.params {
            let spec = specs.iter().find(|s| s.key == k).ok_or_else(|| Error::UnknownParameter {
                key: k.clone(),
                kind: self.kind.name().into(),
                valid: Self::valid_keys(self.kind).join(", "),
            })?;
            validate(spec, v)?;
        }
        if let Some(d) = self.dim_override {
            if d < 2 {
                return Err(Error::DimensionTooSmall(d));
            }
        }
        Ok(())
    }

    fn raw(&self, key: &str) -> Result<&str> {
        self.params.get(key).map(String::as_str).ok_or_else(|| invalid(key, "missing"))
    }

    pub fn number(&self, key: &str) -> Result<f64> {
        parse_number(key, self.raw(key)?)
    }

    pub fn count(&self, key: &str) -> Result<usize> {
        parse_count(key, self.raw(key)?)
    }

    pub fn counts(&self, key: &str) -> Result<Vec<usize>> {
        list(self.raw(key)?).map(|t| parse_count(key, t)).collect()
    }

    pub fn numbers(&self, key: &str) -> Result<Vec<f64>> {
        list(self.raw(key)?).map(|t| parse_number(key, t)).collect()
    }

    pub fn point(&self, key: &str) -> Result<PhasePoint> {
        parse_point(key, self.raw(key)?)
    }

    pub fn points(&self, key: &str) -> Result<Vec<PhasePoint>> {
        list(self.raw(key)?).map(|t| parse_point(key, t)).collect()
    }

    pub fn complex(&self, key: &str) -> Result<c64> {
        let p = self.point(key)?;
        Ok(c64::new(p.x, p.p))
    }

    pub fn atoms(&self, key: &str) -> Result<Vec<Atom>> {
        parse_atoms(key, self.raw(key)?)
    }

    pub fn choices(&self, key: &str) -> Result<Vec<String>> {
        Ok(list(self.raw(key)?).map(String::from).collect())
    }

    /// Disk window from the `window` and `resolution` keys.
    pub fn window(&self) -> Result<Window> {
        Window::disk(self.number("window")?, self.count("resolution")?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_rules() {
        assert_eq!(HbarSchedule::default().values(), &[1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625]);
        assert!(HbarSchedule::new(vec![1.0, 1.0]).is_err());
        assert!(HbarSchedule::new(vec![0.5, 1.0]).is_err());
        assert!(HbarSchedule::new(vec![1.0, 0.0]).is_err());
        assert!(HbarSchedule::new(vec![]).is_err());
        let s: HbarSchedule = "1, 1/2,0.25".parse().unwrap();
        assert_eq!(s.values(), &[1.0, 0.5, 0.25]);
    }

    #[test]
    fn numbers_with_pi() {
        let pi = std::f64::consts::PI;
        assert_eq!(parse_number("t", "pi/4").unwrap(), pi / 4.0);
        assert_eq!(parse_number("t", "2pi").unwrap(), 2.0 * pi);
        assert_eq!(parse_number("t", "-pi").unwrap(), -pi);
        assert_eq!(parse_number("t", "1/64").unwrap(), 1.0 / 64.0);
        assert!(parse_number("t", "abc").is_err());
    }

    #[test]
    fn every_default_validates() {
        for kind in ExperimentKind::ALL {
            let c = ExperimentConfig::new(kind);
            c.validate().unwrap();
            assert_eq!(kind.name().parse::<ExperimentKind>().unwrap(), kind);
        }
    }

    #[test]
    fn unknown_key_lists_valid_ones() {
        let mut c = ExperimentConfig::new(ExperimentKind::WeylLimit);
        let err = c.set("etta", "1:0").unwrap_err().to_string();
        assert!(err.contains("etta") && err.contains("eta") && err.contains("window"));
        assert!(c.set("eta", "1:").is_err());
        c.set("eta", "1:2").unwrap();
        assert_eq!(c.point("eta").unwrap(), PhasePoint::new(1.0, 2.0));
        assert!(c.set("resolution", "34").is_err());
        let err = "nosuch".parse::<ExperimentKind>().unwrap_err().to_string();
        assert!(err.contains("weyl_limit") && err.contains("wigner_state"));
    }
}
