//! Control-affine systems `ẋ = f(ξ) + g(ξ)·u`, control Lyapunov functions,
//! and the Lie-derivative pair every feedback formula consumes.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::numerics::{log_grid, product_grid};
use crate::predprey;
use crate::scalar::Scalar;

pub type VectorField<T> = Arc<dyn Fn(&[T]) -> Vec<T> + Send + Sync>;
pub type ScalarField<T> = Arc<dyn Fn(&[T]) -> T + Send + Sync>;

/// Where states live.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateDomain {
    PositiveOrthant,
    Euclidean,
}

/// A control-affine system with scalar input.
///
/// The feedback laws work with an abstract input `ω` whose equilibrium
/// value is 1; the input actually applied is `ωₑ + (ω − 1)`.
#[derive(Clone)]
pub struct PositiveSystem<T> {
    pub name: String,
    pub dim: usize,
    pub drift: VectorField<T>,
    pub input_field: VectorField<T>,
    pub equilibrium_input: T,
    pub equilibrium_state: Vec<T>,
    pub domain: StateDomain,
}

impl<T: fmt::Debug> fmt::Debug for PositiveSystem<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PositiveSystem")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("equilibrium_input", &self.equilibrium_input)
            .field("equilibrium_state", &self.equilibrium_state)
            .field("domain", &self.domain)
            .finish()
    }
}

impl<T: Scalar> PositiveSystem<T> {
    pub fn check_state(&self, x: &[T]) -> Result<()> {
        if x.len() != self.dim {
            return Err(domain(format!("{} expects {} state components, got {}", self.name, self.dim, x.len())));
        }
        let ok = match self.domain {
            StateDomain::PositiveOrthant => x.iter().all(|v| *v > T::zero() && v.is_finite()),
            StateDomain::Euclidean => x.iter().all(|v| v.is_finite()),
        };
        if ok {
            Ok(())
        } else {
            Err(domain(format!("state {:?} outside the domain of {}", x, self.name)))
        }
    }

    /// Input applied to the plant for abstract input `omega`.
    pub fn actual_input(&self, omega: T) -> T {
        self.equilibrium_input + (omega - T::one())
    }

    /// `f(ξ) + g(ξ)·u` for the actual input `u`.
    pub fn velocity(&self, x: &[T], u: T) -> Vec<T> {
        let f = (self.drift)(x);
        let g = (self.input_field)(x);
        f.iter().zip(&g).map(|(&fi, &gi)| fi + gi * u).collect()
    }

    /// Max-norm of `f(ξₑ) + g(ξₑ)ωₑ`.
    pub fn equilibrium_residual(&self) -> T {
        self.velocity(&self.equilibrium_state, self.equilibrium_input)
            .into_iter()
            .fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn is_equilibrium(&self, x: &[T]) -> bool {
        x == self.equilibrium_state.as_slice()
    }

    /// Max-norm distance to the equilibrium state.
    pub fn distance_to_equilibrium(&self, x: &[T]) -> T {
        x.iter()
            .zip(&self.equilibrium_state)
            .fold(T::zero(), |m, (a, b)| m.max((*a - *b).abs()))
    }
}

/// A CLF with its exact gradient.
#[derive(Clone)]
pub struct ControlLyapunov<T> {
    pub value: ScalarField<T>,
    pub gradient: VectorField<T>,
}

impl<T: Scalar> ControlLyapunov<T> {
    pub fn eval(&self, x: &[T]) -> T {
        (self.value)(x)
    }

    pub fn grad(&self, x: &[T]) -> Vec<T> {
        (self.gradient)(x)
    }

    /// Largest relative mismatch between the gradient and central differences at `x`.
    pub fn gradient_mismatch(&self, x: &[T]) -> T {
        let g = self.grad(x);
        let mut worst = T::zero();
        for i in 0..x.len() {
            let h = T::epsilon().cbrt() * x[i].abs().max(T::one());
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[i] += h;
            xm[i] -= h;
            let fd = (self.eval(&xp) - self.eval(&xm)) / (h + h);
            let scale = g[i].abs().max(T::lit(1e-3));
            worst = worst.max((fd - g[i]).abs() / scale);
        }
        worst
    }
}

/// `(L_fV, L_gV)` at a state and the shifted pair `a = L_fV + L_gV·ωₑ`, `b = L_gV`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LiePair<T> {
    pub lf: T,
    pub lg: T,
    pub a: T,
    pub b: T,
    pub equilibrium_input: T,
}

impl<T: Scalar> LiePair<T> {
    pub fn new(lf: T, lg: T, equilibrium_input: T) -> Self {
        Self { lf, lg, a: lf + lg * equilibrium_input, b: lg, equilibrium_input }
    }

    /// `V̇` under abstract input `omega`: `a + b(ω − 1)`.
    pub fn vdot(&self, omega: T) -> T {
        self.a + self.b * (omega - T::one())
    }

    /// Drift part seen by the abstract input, `a − b`, so that `V̇ = (a − b) + bω`.
    pub fn shifted_drift(&self) -> T {
        self.a - self.b
    }

    /// `(a, b)` lies in the admissible set: `b ≥ 0 ⇒ a < 0`, or is the origin.
    pub fn in_strong_set(&self) -> bool {
        in_strong_set(self.a, self.b)
    }
}

/// `b ≥ 0 ⇒ a < 0`, with the origin admitted.
pub fn in_strong_set<T: Scalar>(a: T, b: T) -> bool {
    (a == T::zero() && b == T::zero()) || b < T::zero() || a < T::zero()
}

pub fn lie_pair<T: Scalar>(sys: &PositiveSystem<T>, clf: &ControlLyapunov<T>, x: &[T]) -> Result<LiePair<T>> {
    sys.check_state(x)?;
    let grad = clf.grad(x);
    let dot = |v: Vec<T>| grad.iter().zip(&v).fold(T::zero(), |s, (a, b)| s + *a * *b);
    let lf = dot((sys.drift)(x));
    let lg = dot((sys.input_field)(x));
    Ok(LiePair::new(lf, lg, sys.equilibrium_input))
}

/// Outcome of a pointwise condition over a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridReport {
    pub condition: String,
    pub checked: usize,
    /// Points where the implication's antecedent held.
    pub applicable: usize,
    pub violations: usize,
    pub first_counterexample: Option<Vec<f64>>,
}

impl GridReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Evaluates `cond` on the Lie pair at every non-equilibrium grid point.
/// `cond` returns `None` when the point is not applicable and `Some(ok)` otherwise.
pub fn check_lie_condition<T: Scalar>(
    sys: &PositiveSystem<T>,
    clf: &ControlLyapunov<T>,
    grid: &[Vec<T>],
    condition: &str,
    cond: impl Fn(&LiePair<T>) -> Option<bool>,
) -> GridReport {
    let mut report = GridReport {
        condition: condition.to_string(),
        checked: 0,
        applicable: 0,
        violations: 0,
        first_counterexample: None,
    };
    for x in grid {
        if sys.is_equilibrium(x) {
            continue;
        }
        report.checked += 1;
        let verdict = match lie_pair(sys, clf, x) {
            Ok(lp) => cond(&lp),
            Err(_) => Some(false),
        };
        if let Some(ok) = verdict {
            report.applicable += 1;
            if !ok {
                report.violations += 1;
                if report.first_counterexample.is_none() {
                    report.first_counterexample = Some(x.iter().map(|v| v.as_f64()).collect());
                }
            }
        }
    }
    report
}

/// `L_gV ≥ 0 ⇒ L_fV < 0` at every grid point.
pub fn check_clf_weak<T: Scalar>(sys: &PositiveSystem<T>, clf: &ControlLyapunov<T>, grid: &[Vec<T>]) -> GridReport {
    check_lie_condition(sys, clf, grid, "L_gV >= 0 implies L_fV < 0", |lp| {
        (lp.lg >= T::zero()).then(|| lp.lf < T::zero())
    })
}

/// `a ≥ 0 ⇒ b < 0` at every grid point.
pub fn check_clf_strong<T: Scalar>(sys: &PositiveSystem<T>, clf: &ControlLyapunov<T>, grid: &[Vec<T>]) -> GridReport {
    check_lie_condition(sys, clf, grid, "a >= 0 implies b < 0", |lp| (lp.a >= T::zero()).then(|| lp.b < T::zero()))
}

/// A system together with its CLF and default sampling box.
#[derive(Clone)]
pub struct Plant<T> {
    pub system: PositiveSystem<T>,
    pub clf: ControlLyapunov<T>,
    pub description: String,
    /// Per-axis sampling interval for grid checks.
    pub grid_box: (T, T),
}

impl<T: Scalar> Plant<T> {
    /// `n` points per axis: log-uniform on the orthant, uniform otherwise.
    pub fn default_grid(&self, n: usize) -> Vec<Vec<T>> {
        let (lo, hi) = self.grid_box;
        let axis = match self.system.domain {
            StateDomain::PositiveOrthant => log_grid(lo, hi, n),
            StateDomain::Euclidean => {
                let step = (hi - lo) / T::lit((n.max(2) - 1) as f64);
                (0..n).map(|k| lo + step * T::lit(k as f64)).collect()
            }
        };
        product_grid(&vec![axis; self.system.dim])
            .into_iter()
            .filter(|x| !self.system.is_equilibrium(x))
            .collect()
    }
}

/// Name-keyed collection of plants.
#[derive(Clone)]
pub struct SystemRegistry<T> {
    plants: BTreeMap<String, Plant<T>>,
}

impl<T: Scalar> Default for SystemRegistry<T> {
    fn default() -> Self {
        Self::builtin()
    }
}

impl<T: Scalar> SystemRegistry<T> {
    pub fn empty() -> Self {
        Self { plants: BTreeMap::new() }
    }

    /// Registry holding `predator-prey`, `predator-prey-scaled` and `scalar-x2`.
    pub fn builtin() -> Self {
        let mut r = Self::empty();
        r.register(Plant {
            system: predprey::system(),
            clf: predprey::clf_model(),
            description: "prey/predator with harvesting input U, equilibrium (1,1), input 1".into(),
            grid_box: (T::lit(0.2), T::lit(5.0)),
        });
        r.register(Plant {
            system: predprey::scaled_system(),
            clf: predprey::clf_model(),
            description: "prey/predator with predator-scaled input U/Y".into(),
            grid_box: (T::lit(0.2), T::lit(5.0)),
        });
        r.register(Plant {
            system: scalar_x2(),
            clf: ControlLyapunov {
                value: Arc::new(|x: &[T]| x[0] * x[0] / T::lit(2.0)),
                gradient: Arc::new(|x: &[T]| vec![x[0]]),
            },
            description: "scalar x' = x^2 - u with V = x^2/2, equilibrium 0, input 0".into(),
            grid_box: (T::lit(-5.0), T::lit(5.0)),
        });
        r
    }

    pub fn register(&mut self, plant: Plant<T>) {
        self.plants.insert(plant.system.name.clone(), plant);
    }

    pub fn get(&self, name: &str) -> Result<&Plant<T>> {
        self.plants.get(name).ok_or_else(|| Error::Unknown { kind: "system", name: name.to_string() })
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.plants.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Plant<T>)> {
        self.plants.iter().map(|(k, v)| (k.as_str(), v))
    }
}

/// `ẋ = x² − u` on the real line.
pub fn scalar_x2<T: Scalar>() -> PositiveSystem<T> {
    PositiveSystem {
        name: "scalar-x2".into(),
        dim: 1,
        drift: Arc::new(|x: &[T]| vec![x[0] * x[0]]),
        input_field: Arc::new(|_: &[T]| vec![-T::one()]),
        equilibrium_input: T::zero(),
        equilibrium_state: vec![T::zero()],
        domain: StateDomain::Euclidean,
    }
}
