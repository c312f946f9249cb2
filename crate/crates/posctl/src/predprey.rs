//! The prey/predator benchmark `Ẋ = (1 − Y)X`, `Ẏ = (X − U)Y` with harvesting
//! input `U > 0` and equilibrium `(1, 1)` at `U = 1`.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{domain, Result};
use crate::scalar::Scalar;
use crate::shaping::{volterra_lyapunov, Contractor, Expander, Penalty, PenaltyForm};
use crate::sysmodel::{ControlLyapunov, PositiveSystem, StateDomain};

/// Below this distance from `ρ = 1` the weight formulas switch to their limits.
pub const RATIO_LIMIT_RADIUS: f64 = 1e-6;

/// Prey `x` and predator `y` concentrations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PredPreyState<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> PredPreyState<T> {
    pub fn new(x: T, y: T) -> Result<Self> {
        if x > T::zero() && y > T::zero() && x.is_finite() && y.is_finite() {
            Ok(Self { x, y })
        } else {
            Err(domain(format!("prey/predator state must be positive, got ({x}, {y})")))
        }
    }

    pub fn from_slice(v: &[T]) -> Result<Self> {
        match v {
            [x, y] => Self::new(*x, *y),
            _ => Err(domain("prey/predator state has two components")),
        }
    }

    /// `Y/X`.
    pub fn rho(&self) -> T {
        self.y / self.x
    }
}

/// `((1 − Y)X, (X − U)Y)`.
pub fn dynamics<T: Scalar>(s: PredPreyState<T>, u: T) -> Result<(T, T)> {
    if !(u > T::zero()) {
        return Err(domain(format!("harvesting input must be positive, got {u}")));
    }
    Ok(((T::one() - s.y) * s.x, (s.x - u) * s.y))
}

/// `V = Ω(1/X) + Ω(Y/X)` and its gradient.
pub fn clf<T: Scalar>(s: PredPreyState<T>) -> (T, [T; 2]) {
    (clf_value(s), clf_gradient(s))
}

pub fn clf_value<T: Scalar>(s: PredPreyState<T>) -> T {
    volterra_lyapunov(T::one() / s.x) + volterra_lyapunov(s.y / s.x)
}

fn clf_gradient<T: Scalar>(s: PredPreyState<T>) -> [T; 2] {
    let PredPreyState { x, y } = s;
    [(x + x - T::one() - y) / (x * x), (y - x) / (x * y)]
}

/// `(L, G)` with `V̇ = L + G·U`.
pub fn lie_lg<T: Scalar>(s: PredPreyState<T>) -> (T, T) {
    let PredPreyState { x, y } = s;
    let l = (-(x - T::one()) * (x - T::one()) + y * (y - x)) / x;
    let g = (x - y) / x;
    (l, g)
}

/// State cost `(X − 1)²/X + (Y − X)²Y/X²`.
pub fn q_state_cost<T: Scalar>(s: PredPreyState<T>) -> T {
    let PredPreyState { x, y } = s;
    let d = y - x;
    (x - T::one()) * (x - T::one()) / x + d * d / x * (y / x)
}

/// `U₀ = Y²/X`.
pub fn nominal_feedback<T: Scalar>(s: PredPreyState<T>) -> T {
    s.y * s.y / s.x
}

/// `U = Y·Σ(Y/X)`.
pub fn optimal_feedback<T: Scalar>(s: PredPreyState<T>, e: &Expander<T>) -> Result<T> {
    Ok(s.y * e.eval(s.rho())?)
}

/// `Π(ρ) = (ρ − 1)Σ(ρ)/(Σ(ρ) − 1)` for the Volterra expander.
#[derive(Debug, Clone)]
pub struct VolterraWeight<T> {
    expander: Expander<T>,
}

impl<T: Scalar> Default for VolterraWeight<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> VolterraWeight<T> {
    pub fn new() -> Self {
        Self { expander: Expander::new(Contractor::volterra()) }
    }

    pub fn expander(&self) -> &Expander<T> {
        &self.expander
    }

    pub fn pi(&self, rho: T) -> Result<T> {
        let e = rho - T::one();
        if e.abs() < T::lit(RATIO_LIMIT_RADIUS) {
            return Ok(T::lit(0.5) + T::lit(2.0 / 3.0) * e);
        }
        let sig = self.expander.eval(rho)?;
        Ok(e * sig / (sig - T::one()))
    }

    /// `r = Π(Y/X)·Y`.
    pub fn weight(&self, s: PredPreyState<T>) -> Result<T> {
        Ok(self.pi(s.rho())? * s.y)
    }
}

/// Control weight `r = −Y·G/Ψ′(Σ(Y/X))`.
///
/// Closed forms: `Π(ρ)Y` for the Volterra penalty, `Y²/X` for the square-root
/// penalty. Elsewhere the limit at `ρ = 1` is `+∞` when the penalty is locally
/// steeper than quadratic, and is taken at `ρ = 1 ± 10⁻⁶` otherwise.
pub fn r_weight<T: Scalar>(s: PredPreyState<T>, p: &Penalty<T>, e: &Expander<T>) -> Result<T> {
    match p.form() {
        PenaltyForm::ClosedVolterra => return VolterraWeight::new().weight(s),
        PenaltyForm::ClosedSqrt => return Ok(s.y * s.y / s.x),
        PenaltyForm::Quadrature => {}
    }
    let radius = T::lit(RATIO_LIMIT_RADIUS);
    let mut rho = s.rho();
    if (rho - T::one()).abs() < radius {
        if p.local_exponent() > T::lit(2.0) + T::tol(1e-12) {
            return Ok(T::infinity());
        }
        rho = if rho < T::one() { T::one() - radius } else { T::one() + radius };
    }
    let g = T::one() - rho;
    Ok(-s.y * g / p.prime(e.eval(rho)?)?)
}

/// Hamiltonian `q + L + G·U + r·Ψ(U/Y)`.
pub fn hamiltonian<T: Scalar>(s: PredPreyState<T>, u: T, p: &Penalty<T>, e: &Expander<T>) -> Result<T> {
    let (l, g) = lie_lg(s);
    let r = r_weight(s, p, e)?;
    Ok(q_state_cost(s) + l + g * u + r * p.eval(u / s.y)?)
}

/// Membership in the region where `L_gV > 0` and `L_fV + L_gV > 0`.
pub fn s_plus_membership<T: Scalar>(s: PredPreyState<T>) -> bool {
    let PredPreyState { x, y } = s;
    if !(y > T::zero() && y < T::one()) {
        return false;
    }
    let root5 = T::lit(5.0).sqrt();
    let lo = ((T::lit(3.0) - y) - root5 * (T::one() - y)) / T::lit(2.0);
    let hi = ((T::lit(3.0) - y) + root5 * (T::one() - y)) / T::lit(2.0);
    lo < x && x < hi
}

/// Point classification against the failure set of the feedback-linearizing law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FlDiagnostics {
    /// The feedback-linearizing harvest would be negative here.
    pub control_negative_region: bool,
    /// The trajectory from here leaves the orthant before settling. The published
    /// inequality covers the gains `k₁ = 2, k₂ = 3` only; `None` for other gains.
    pub state_excursion: Option<bool>,
}

pub fn fl_diagnostics<T: Scalar>(s0: PredPreyState<T>, k1: T, k2: T) -> FlDiagnostics {
    let PredPreyState { x, y } = s0;
    let control_negative_region = y < T::one() + (k1 * x.ln() - x) / (k2 + x);
    let state_excursion = (k1 == T::lit(2.0) && k2 == T::lit(3.0)).then(|| {
        let lx = x.ln();
        let lhs = (y - T::one() - T::lit(2.0) * lx) * (y - T::one() - T::lit(2.0) * lx);
        let quad = lhs >= T::lit(8.0) * (y - T::one() - lx);
        let case = (x <= T::one() && y > T::one() + T::lit(2.0 / 3.0) * lx)
            || (x >= T::one() && y > T::one() + T::lit(2.0) * lx);
        quad && case
    });
    FlDiagnostics { control_negative_region, state_excursion }
}

/// `(ln(1+z)/z, 1/(1+z))`, both 1 at `z = 0`.
pub fn z_curves<T: Scalar>(z: T) -> Result<(T, T)> {
    if !(z > -T::one()) {
        return Err(domain(format!("z must exceed -1, got {z}")));
    }
    let u0 = if z == T::zero() { T::one() } else { z.ln_1p() / z };
    Ok((u0, T::one() / (T::one() + z)))
}

/// `∂/∂U [r·Ψ(U/Y)] = Π(Y/X)(1 − Y/U)` for the Volterra design.
pub fn penalty_sensitivity<T: Scalar>(s: PredPreyState<T>, u: T, w: &VolterraWeight<T>) -> Result<T> {
    if !(u > T::zero()) {
        return Err(domain(format!("harvesting input must be positive, got {u}")));
    }
    Ok(w.pi(s.rho())? * (T::one() - s.y / u))
}

/// The benchmark as a [`PositiveSystem`] with input `U`.
pub fn system<T: Scalar>() -> PositiveSystem<T> {
    PositiveSystem {
        name: "predator-prey".into(),
        dim: 2,
        drift: Arc::new(|v: &[T]| vec![(T::one() - v[1]) * v[0], v[0] * v[1]]),
        input_field: Arc::new(|v: &[T]| vec![T::zero(), -v[1]]),
        equilibrium_input: T::one(),
        equilibrium_state: vec![T::one(), T::one()],
        domain: StateDomain::PositiveOrthant,
    }
}

/// The benchmark with the predator-scaled input `ω = U/Y`.
pub fn scaled_system<T: Scalar>() -> PositiveSystem<T> {
    PositiveSystem {
        name: "predator-prey-scaled".into(),
        dim: 2,
        drift: Arc::new(|v: &[T]| vec![(T::one() - v[1]) * v[0], v[0] * v[1]]),
        input_field: Arc::new(|v: &[T]| vec![T::zero(), -v[1] * v[1]]),
        equilibrium_input: T::one(),
        equilibrium_state: vec![T::one(), T::one()],
        domain: StateDomain::PositiveOrthant,
    }
}

pub fn clf_model<T: Scalar>() -> ControlLyapunov<T> {
    ControlLyapunov {
        value: Arc::new(|v: &[T]| clf_value(PredPreyState { x: v[0], y: v[1] })),
        gradient: Arc::new(|v: &[T]| clf_gradient(PredPreyState { x: v[0], y: v[1] }).to_vec()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::log_grid;
    use crate::sysmodel::lie_pair;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn st(x: f64, y: f64) -> PredPreyState<f64> {
        PredPreyState::new(x, y).unwrap()
    }

    #[test]
    fn dynamics_examples() {
        assert_eq!(dynamics(st(1.0, 1.0), 1.0).unwrap(), (0.0, 0.0));
        assert_eq!(dynamics(st(2.0, 1.0), 1.0).unwrap(), (0.0, 1.0));
        assert_eq!(dynamics(st(1.0, 2.0), 2.0).unwrap(), (-1.0, -2.0));
        assert!(dynamics(st(1.0, 1.0), 0.0).is_err());
        assert!(PredPreyState::new(0.0, 1.0).is_err());
    }

    #[test]
    fn clf_examples() {
        assert_eq!(clf_value(st(1.0, 1.0)), 0.0);
        assert!((clf_value(st(2.0, 2.0)) - (-0.5 + 2f64.ln())).abs() < 1e-15);
        let e = std::f64::consts::E;
        assert!((clf_value(st(e, e)) - 1.0 / e).abs() < 1e-15);
    }

    #[test]
    fn lg_and_cost_examples() {
        assert_eq!(lie_lg(st(1.0, 1.0)), (0.0, 0.0));
        assert_eq!(lie_lg(st(2.0, 1.0)), (-1.0, 0.5));
        assert_eq!(lie_lg(st(1.0, 2.0)), (2.0, -1.0));
        assert_eq!(q_state_cost(st(1.0, 1.0)), 0.0);
        assert!((q_state_cost(st(2.0, 1.0)) - 0.75).abs() < 1e-15);
        assert!((q_state_cost(st(1.0, 2.0)) - 2.0).abs() < 1e-15);
        assert_eq!(nominal_feedback(st(2.0, 1.0)), 0.5);
        assert_eq!(nominal_feedback(st(1.0, 2.0)), 4.0);
    }

    #[test]
    fn identities_at_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let sys = system::<f64>();
        let v = clf_model::<f64>();
        for _ in 0..50 {
            let s = st(rng.gen_range(0.1..6.0), rng.gen_range(0.1..6.0));
            let u = rng.gen_range(0.1..5.0);
            let (l, g) = lie_lg(s);
            let grad = clf(s).1;
            let (dx, dy) = dynamics(s, u).unwrap();
            let vdot = grad[0] * dx + grad[1] * dy;
            assert!((vdot - (l + g * u)).abs() < 1e-12 * (1.0 + vdot.abs()));
            let q = q_state_cost(s);
            assert!((q + l + g * s.y * s.y / s.x).abs() < 1e-12 * (1.0 + q));
            let lp = lie_pair(&sys, &v, &[s.x, s.y]).unwrap();
            assert!((lp.lf - l).abs() < 1e-12 * (1.0 + l.abs()) && (lp.lg - g).abs() < 1e-12);
        }
    }

    #[test]
    fn feedbacks() {
        let sq = Expander::new(Contractor::sqrt());
        let vol = Expander::new(Contractor::volterra());
        assert_eq!(optimal_feedback(st(1.0, 1.0), &vol).unwrap(), 1.0);
        assert_eq!(optimal_feedback(st(2.0, 1.0), &sq).unwrap(), 0.25);
        let u = optimal_feedback(st(1.0, 0.35), &vol).unwrap();
        assert!((u - 0.35 * 0.160).abs() < 0.002);
    }

    #[test]
    fn volterra_weight_values() {
        let w = VolterraWeight::<f64>::new();
        assert!((w.pi(1.0).unwrap() - 0.5).abs() < 1e-8);
        let h = 1e-4;
        let d = (w.pi(1.0 + h).unwrap() - w.pi(1.0 - h).unwrap()) / (2.0 * h);
        assert!((d - 2.0 / 3.0).abs() < 1e-4);
        // (2,1): solve Θ(σ) = 1/2 by bisection, independently of the library solver
        let (mut lo, mut hi) = (1e-6f64, 1.0f64);
        for _ in 0..200 {
            let m = 0.5 * (lo + hi);
            if m * m.ln() / (m - 1.0) < 0.5 {
                lo = m
            } else {
                hi = m
            }
        }
        let sig = 0.5 * (lo + hi);
        let expect = 1.0 * (0.5 - 1.0) * sig / (sig - 1.0);
        let p = Penalty::new(&Contractor::volterra()).unwrap();
        let r = r_weight(st(2.0, 1.0), &p, w.expander()).unwrap();
        assert!((r - expect).abs() < 1e-12 && r > 0.0);
        assert!((r_weight(st(1.0, 1.0), &p, w.expander()).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn weight_formula_matches_definition_off_diagonal() {
        for c in [Contractor::<f64>::volterra(), Contractor::sqrt()] {
            let p = Penalty::new(&c).unwrap();
            let e = Expander::new(c);
            for (x, y) in [(2.0, 1.0), (0.5, 3.0), (1.3, 0.2)] {
                let s = st(x, y);
                let direct = -y * lie_lg(s).1 / p.prime(e.eval(s.rho()).unwrap()).unwrap();
                assert!((r_weight(s, &p, &e).unwrap() - direct).abs() < 1e-10 * direct);
            }
        }
    }

    #[test]
    fn weight_limit_for_steep_penalty_is_infinite() {
        let c = Contractor::<f64>::rational();
        let p = Penalty::new(&c).unwrap();
        let e = Expander::new(c);
        assert_eq!(r_weight(st(1.5, 1.5), &p, &e).unwrap(), f64::INFINITY);
        assert!(r_weight(st(1.5, 1.0), &p, &e).unwrap() > 0.0);
    }

    #[test]
    fn s_plus_examples() {
        assert!(s_plus_membership(st(1.0, 0.5)));
        assert!(!s_plus_membership(st(1.0, 1.0)));
        assert!(!s_plus_membership(st(5.0, 0.5)));
        // inside the set both L_gV and L_fV + L_gV are positive
        for x in log_grid(0.2, 5.0, 40) {
            for y in log_grid(0.2, 5.0, 40) {
                let s = st(x, y);
                let (l, g) = lie_lg(s);
                if s_plus_membership(s) {
                    assert!(g > 0.0 && l + g > 0.0);
                }
            }
        }
    }

    #[test]
    fn fl_examples() {
        let none = FlDiagnostics { control_negative_region: false, state_excursion: Some(false) };
        assert_eq!(fl_diagnostics(st(1.0, 1.0), 2.0, 3.0), none);
        assert_eq!(fl_diagnostics(st(1.0, 3.0), 2.0, 3.0), none);
        assert_eq!(fl_diagnostics(st(0.5, 2.5), 2.0, 3.0), none);
        assert!(fl_diagnostics(st(1.0, 0.5), 2.0, 3.0).control_negative_region);
        assert_eq!(fl_diagnostics(st(1.0, 1.0), 1.0, 1.0).state_excursion, None);
    }

    #[test]
    fn z_curve_values() {
        assert_eq!(z_curves(0.0).unwrap(), (1.0, 1.0));
        let (a, b) = z_curves(1.0f64).unwrap();
        assert!((a - 2f64.ln()).abs() < 1e-15 && b == 0.5);
        let e = std::f64::consts::E;
        let (a, b) = z_curves(e - 1.0).unwrap();
        assert!((a - 1.0 / (e - 1.0)).abs() < 1e-15 && (b - 1.0 / e).abs() < 1e-15);
        assert!(z_curves(-1.0).is_err());
    }

    #[test]
    fn z_curve_derivative_relation() {
        let f = |z: f64| z * (z_curves(z).unwrap().0 - 1.0);
        let h = 1e-5;
        for z in log_grid(1e-3, 10.0, 30).into_iter().chain([-0.89, -0.5, -0.1, 0.0]) {
            let d = (f(z + h) - f(z - h)) / (2.0 * h);
            assert!((d - (z_curves(z).unwrap().1 - 1.0)).abs() < 1e-6, "{z}");
        }
    }

    #[test]
    fn sensitivity_matches_difference() {
        let w = VolterraWeight::<f64>::new();
        let p = Penalty::new(&Contractor::volterra()).unwrap();
        assert_eq!(penalty_sensitivity(st(1.0, 1.0), 1.0, &w).unwrap(), 0.0);
        assert!((penalty_sensitivity(st(1.0, 1.0), 2.0, &w).unwrap() - 0.25).abs() < 1e-12);
        assert!((penalty_sensitivity(st(1.0, 1.0), 0.5, &w).unwrap() + 0.5).abs() < 1e-12);
        for (x, y, u) in [(2.0, 1.0, 0.7), (0.6, 1.7, 3.0)] {
            let s = st(x, y);
            let r = w.weight(s).unwrap();
            let h = 1e-6;
            let fd = r * (p.eval((u + h) / y).unwrap() - p.eval((u - h) / y).unwrap()) / (2.0 * h);
            assert!((fd - penalty_sensitivity(s, u, &w).unwrap()).abs() < 1e-6);
        }
    }
}
