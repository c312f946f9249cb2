use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use super::penalty::volterra_lyapunov;
use crate::error::{domain, Error, Result};
use crate::scalar::Scalar;

/// Shared scalar map.
pub type ScalarMap<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// Built-in contractor families plus user maps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ContractorKind {
    /// `s ln s / (s − 1)`
    Volterra,
    /// `√s`
    Sqrt,
    /// `(2s − √(s²+1) + 1)/(3 − √2)`
    Rational,
    Custom,
}

impl ContractorKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Volterra => "volterra",
            Self::Sqrt => "sqrt",
            Self::Rational => "rational",
            Self::Custom => "custom",
        }
    }
}

impl fmt::Display for ContractorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ContractorKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "volterra" => Ok(Self::Volterra),
            "sqrt" => Ok(Self::Sqrt),
            "rational" => Ok(Self::Rational),
            other => Err(Error::Unknown { kind: "contractor", name: other.to_string() }),
        }
    }
}

/// A strictly increasing map of `(0, ∞)` onto itself with fixed point 1
/// that pulls every other argument toward 1.
#[derive(Clone)]
pub struct Contractor<T> {
    kind: ContractorKind,
    name: String,
    map: Option<ScalarMap<T>>,
    deriv: Option<ScalarMap<T>>,
    derivative_at_one: T,
}

impl<T: fmt::Debug> fmt::Debug for Contractor<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Contractor")
            .field("kind", &self.kind)
            .field("name", &self.name)
            .field("derivative_at_one", &self.derivative_at_one)
            .finish()
    }
}

const VOLTERRA_SERIES_RADIUS: f64 = 1e-5;

impl<T: Scalar> Contractor<T> {
    pub fn volterra() -> Self {
        Self::builtin(ContractorKind::Volterra, T::lit(0.5))
    }

    pub fn sqrt() -> Self {
        Self::builtin(ContractorKind::Sqrt, T::lit(0.5))
    }

    pub fn rational() -> Self {
        let s2 = T::SQRT_2();
        let d = (T::lit(2.0) - T::one() / s2) / (T::lit(3.0) - s2);
        Self::builtin(ContractorKind::Rational, d)
    }

    pub fn of_kind(kind: ContractorKind) -> Result<Self> {
        match kind {
            ContractorKind::Volterra => Ok(Self::volterra()),
            ContractorKind::Sqrt => Ok(Self::sqrt()),
            ContractorKind::Rational => Ok(Self::rational()),
            ContractorKind::Custom => Err(domain("custom contractors need a map; use Contractor::custom")),
        }
    }

    fn builtin(kind: ContractorKind, derivative_at_one: T) -> Self {
        Self { kind, name: kind.name().to_string(), map: None, deriv: None, derivative_at_one }
    }

    /// Wraps a user map. `Θ′(1)` is estimated by a central difference.
    pub fn custom(name: impl Into<String>, map: impl Fn(T) -> T + Send + Sync + 'static) -> Self {
        let map: ScalarMap<T> = Arc::new(map);
        let h = T::lit(1e-5).max(T::epsilon().cbrt());
        let d = (map(T::one() + h) - map(T::one() - h)) / (h + h);
        Self { kind: ContractorKind::Custom, name: name.into(), map: Some(map), deriv: None, derivative_at_one: d }
    }

    /// Supplies an exact derivative for a custom map.
    pub fn with_derivative(mut self, deriv: impl Fn(T) -> T + Send + Sync + 'static) -> Self {
        let deriv: ScalarMap<T> = Arc::new(deriv);
        self.derivative_at_one = deriv(T::one());
        self.deriv = Some(deriv);
        self
    }

    pub fn kind(&self) -> ContractorKind {
        self.kind
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// `Θ′(1)`.
    pub fn derivative_at_one(&self) -> T {
        self.derivative_at_one
    }

    /// Local power of the generated penalty at 1, `p = 1/(1 − Θ′(1))`.
    pub fn local_exponent(&self) -> T {
        T::one() / (T::one() - self.derivative_at_one)
    }

    fn check(s: T) -> Result<()> {
        if s > T::zero() && s.is_finite() {
            Ok(())
        } else {
            Err(domain(format!("contractor argument must be positive and finite, got {s}")))
        }
    }

    pub fn eval(&self, s: T) -> Result<T> {
        Self::check(s)?;
        Ok(self.raw(s))
    }

    /// Evaluation without the domain check.
    pub(crate) fn raw(&self, s: T) -> T {
        match self.kind {
            ContractorKind::Volterra => {
                let e = s - T::one();
                if e.abs() < T::lit(VOLTERRA_SERIES_RADIUS) {
                    T::one() + e / T::lit(2.0) - e * e / T::lit(6.0)
                } else {
                    s * s.ln() / e
                }
            }
            ContractorKind::Sqrt => s.sqrt(),
            ContractorKind::Rational => {
                let s2 = T::SQRT_2();
                // 1 − √(s²+1) rewritten to keep accuracy for small s
                let r = (s * s + T::one()).sqrt();
                (T::lit(2.0) * s - s * s / (T::one() + r)) / (T::lit(3.0) - s2)
            }
            ContractorKind::Custom => (self.map.as_ref().expect("custom map"))(s),
        }
    }

    pub fn derivative(&self, s: T) -> Result<T> {
        Self::check(s)?;
        Ok(match self.kind {
            ContractorKind::Volterra => {
                let e = s - T::one();
                if e.abs() < T::lit(VOLTERRA_SERIES_RADIUS) {
                    T::lit(0.5) - e / T::lit(3.0) + e * e / T::lit(4.0)
                } else {
                    volterra_lyapunov(s) / (e * e)
                }
            }
            ContractorKind::Sqrt => T::one() / (T::lit(2.0) * s.sqrt()),
            ContractorKind::Rational => {
                (T::lit(2.0) - s / (s * s + T::one()).sqrt()) / (T::lit(3.0) - T::SQRT_2())
            }
            ContractorKind::Custom => match &self.deriv {
                Some(d) => d(s),
                None => {
                    let h = s * T::epsilon().cbrt();
                    let m = self.map.as_ref().expect("custom map");
                    (m(s + h) - m(s - h)) / (h + h)
                }
            },
        })
    }

    /// `s − Θ(s)`, evaluated without cancellation near 1 for the built-in kinds.
    pub fn gap(&self, s: T) -> Result<T> {
        Self::check(s)?;
        Ok(self.raw_gap(s))
    }

    pub(crate) fn raw_gap(&self, s: T) -> T {
        let one = T::one();
        let e = s - one;
        match self.kind {
            ContractorKind::Volterra => {
                if e == T::zero() {
                    T::zero()
                } else {
                    s * volterra_lyapunov(s) / e
                }
            }
            ContractorKind::Sqrt => {
                let r = s.sqrt();
                r * e / (r + one)
            }
            ContractorKind::Rational => {
                let s2 = T::SQRT_2();
                let r = (s * s + one).sqrt();
                e * ((one - s2) + (s + one) / (r + s2)) / (T::lit(3.0) - s2)
            }
            ContractorKind::Custom => s - self.raw(s),
        }
    }

    /// Samples the defining conditions of a contractor on `grid`.
    pub fn validate(&self, grid: &[T]) -> ContractorReport {
        let mut pts: Vec<T> = grid.iter().copied().filter(|&s| s != T::one()).collect();
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        let mut conditions = Vec::new();
        let lo = pts.first().copied().unwrap_or(T::one());
        let hi = pts.last().copied().unwrap_or(T::one());
        let covered = lo <= T::lit(1e-3) && hi >= T::lit(1e3);
        conditions.push(ConditionCheck::new(
            "grid covers [1e-3, 1e3]",
            covered,
            if covered { None } else { Some(if lo > T::lit(1e-3) { lo.as_f64() } else { hi.as_f64() }) },
        ));

        let vals: Vec<Option<T>> = pts.iter().map(|&s| self.eval(s).ok().filter(|v| *v > T::zero())).collect();

        let mut bad = None;
        for (i, v) in vals.iter().enumerate() {
            let ok = match (v, i.checked_sub(1).and_then(|j| vals[j])) {
                (None, _) => false,
                (Some(v), Some(prev)) => *v > prev,
                (Some(_), None) => true,
            };
            if !ok {
                bad = Some(pts[i].as_f64());
                break;
            }
        }
        conditions.push(ConditionCheck::new("positive and strictly increasing", bad.is_none(), bad));

        let at_one = self.eval(T::one()).unwrap_or(T::nan());
        let h = T::lit(1e-5).max(T::epsilon().cbrt());
        let est = (self.raw(T::one() + h) - self.raw(T::one() - h)) / (h + h);
        let fixed = (at_one - T::one()).abs() <= T::tol(1e-12) && est > T::zero() && est < T::one();
        conditions.push(ConditionCheck::new(
            "fixed point at 1 with slope in (0, 1)",
            fixed,
            if fixed { None } else { Some(1.0) },
        ));

        let bad = pts
            .iter()
            .zip(&vals)
            .find(|(&s, v)| match v {
                Some(v) => (*v - s) * (s - T::one()) >= T::zero(),
                None => true,
            })
            .map(|(s, _)| s.as_f64());
        conditions.push(ConditionCheck::new("contracts toward 1", bad.is_none(), bad));

        // tail proxies: still shrinking toward 0 at the low end, still growing at the high end
        let tail = |s: T, factor: T, below: bool| -> bool {
            match (self.eval(s), self.eval(s.sqrt())) {
                (Ok(a), Ok(b)) => {
                    if below {
                        a <= b * factor
                    } else {
                        a >= b * factor
                    }
                }
                _ => false,
            }
        };
        let zero_ok = lo < T::one() && tail(lo, T::lit(0.5), true);
        conditions.push(ConditionCheck::new("tends to 0 at 0+", zero_ok, if zero_ok { None } else { Some(lo.as_f64()) }));
        let inf_ok = hi > T::one() && tail(hi, T::lit(1.5), false);
        conditions.push(ConditionCheck::new("unbounded at infinity", inf_ok, if inf_ok { None } else { Some(hi.as_f64()) }));

        ContractorReport {
            name: self.name.clone(),
            kind: self.kind,
            derivative_at_one: est.as_f64(),
            sampled_range: (lo.as_f64(), hi.as_f64()),
            conditions,
        }
    }
}

/// One sampled condition and, if it failed, the first offending argument.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionCheck {
    pub condition: String,
    pub passed: bool,
    pub counterexample: Option<f64>,
}

impl ConditionCheck {
    pub fn new(condition: &str, passed: bool, counterexample: Option<f64>) -> Self {
        Self { condition: condition.to_string(), passed, counterexample }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContractorReport {
    pub name: String,
    pub kind: ContractorKind,
    /// Central-difference estimate of `Θ′(1)`.
    pub derivative_at_one: f64,
    /// Onto-ness of the inverse is only certified on this range.
    pub sampled_range: (f64, f64),
    pub conditions: Vec<ConditionCheck>,
}

impl ContractorReport {
    pub fn passed(&self) -> bool {
        self.conditions.iter().all(|c| c.passed)
    }

    pub fn condition(&self, name: &str) -> Option<&ConditionCheck> {
        self.conditions.iter().find(|c| c.condition == name)
    }
}
