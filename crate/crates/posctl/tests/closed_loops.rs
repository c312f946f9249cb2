use std::sync::Arc;

use posctl::predprey::{self, PredPreyState};
use posctl::shaping::volterra_lyapunov;
use posctl::sim::{
    accumulate_cost, integrate, lyapunov_monotonicity, ClosedLoop, IntegratorOptions, StopReason, MONOTONICITY_TOL,
};
use posctl::suites::{predprey_nominal_loop, predprey_optimal_loop};
use posctl::sysmodel::SystemRegistry;
use posctl::universal::universal_invopt;

#[test]
fn optimal_loop_from_two_two() {
    let lp = predprey_optimal_loop();
    let tr = integrate(&lp, &[2.0, 2.0], &IntegratorOptions::default()).unwrap();
    assert_eq!(tr.stop, StopReason::Converged);
    assert!(lp.system.distance_to_equilibrium(tr.final_state()) < 1e-6);
    let v0 = volterra_lyapunov(0.5);
    assert!((tr.final_cost() - v0).abs() / v0 < 1e-2);
    // cost-to-go consistency: J − V(ξ0) + V(ξ(T)) ≈ 0
    assert!((tr.final_cost() - v0 + tr.final_clf()).abs() < 10.0 * 1e-12);
}

#[test]
fn nominal_loop_converges_with_decreasing_v() {
    let lp = predprey_nominal_loop();
    let tr = integrate(&lp, &[0.5, 3.0], &IntegratorOptions::default()).unwrap();
    assert!(lp.system.distance_to_equilibrium(tr.final_state()) < 1e-6);
    assert!(tr.clf_values.windows(2).all(|w| w[1] < w[0]), "V must decrease strictly");
}

#[test]
fn nominal_costs_more_than_optimal() {
    let opts = IntegratorOptions::default();
    for ic in [[2.0, 2.0], [3.0, 0.5], [1.2, 0.8], [0.7, 2.5], [2.0, 0.7]] {
        let j0 = integrate(&predprey_nominal_loop(), &ic, &opts).unwrap().final_cost();
        let js = integrate(&predprey_optimal_loop(), &ic, &opts).unwrap().final_cost();
        assert!(j0 >= js, "{ic:?}: {j0} < {js}");
    }
}

#[test]
fn optimal_loop_monotone_from_three_half() {
    let lp = predprey_optimal_loop();
    let tr = integrate(&lp, &[3.0, 0.5], &IntegratorOptions::default()).unwrap();
    assert!(lyapunov_monotonicity(&tr, &lp.clf) <= MONOTONICITY_TOL);
    assert!(tr.all_positive());
}

#[test]
fn step_halving_changes_cost_below_1e8() {
    let lp = predprey_optimal_loop();
    let a = integrate(&lp, &[2.0, 2.0], &IntegratorOptions { step: 1e-3, ..Default::default() }).unwrap();
    let b = integrate(&lp, &[2.0, 2.0], &IntegratorOptions { step: 5e-4, ..Default::default() }).unwrap();
    assert!((a.final_cost() - b.final_cost()).abs() < 1e-8);
}

#[test]
fn trapezoid_agrees_with_integrated_cost() {
    let lp = predprey_optimal_loop();
    let tr = integrate(&lp, &[1.2, 0.8], &IntegratorOptions::default()).unwrap();
    let c = accumulate_cost(&tr);
    // second-order rule on a 1e-3 grid
    assert!((c.trapezoid - tr.final_cost()).abs() < 1e-6);
    assert!(c.tail >= 0.0 && c.tail < 1e-12);
}

#[test]
fn stride_thins_the_record_but_keeps_endpoints() {
    let lp = predprey_optimal_loop();
    let full = integrate(&lp, &[2.0, 2.0], &IntegratorOptions::default()).unwrap();
    let thin = integrate(&lp, &[2.0, 2.0], &IntegratorOptions { record_stride: 100, ..Default::default() }).unwrap();
    assert!(thin.len() < full.len() / 50);
    assert_eq!(thin.final_cost(), full.final_cost());
    assert_eq!(thin.times.last(), full.times.last());
}

#[test]
fn scalar_invopt_loop_monotone_until_the_jump() {
    // ẋ = x² − u with the inverse-optimal universal law; u jumps from ≈1 to 0 at x = 0
    let reg = SystemRegistry::<f64>::builtin();
    let plant = reg.get("scalar-x2").unwrap();
    let (sys, clf) = (plant.system.clone(), plant.clf.clone());
    let lp = ClosedLoop::new(
        sys,
        clf,
        Arc::new(|x: &[f64]| {
            let (a, b) = (x[0].powi(3), -x[0]);
            Ok(universal_invopt(a, b)?.deviation)
        }),
    );
    let tr = integrate(&lp, &[2.0], &IntegratorOptions { horizon: 20.0, ..Default::default() }).unwrap();
    let cross = tr.states.iter().position(|x| x[0] <= 0.0).expect("trajectory reaches 0");
    let before = tr.clf_values[..cross].windows(2).fold(0.0f64, |m, w| m.max(w[1] - w[0]));
    assert!(before <= MONOTONICITY_TOL);
    // past the jump V grows by at most the overshoot of one step
    assert!(tr.clf_values[cross] < 0.5 * 1e-3 * 1e-3);
}

#[test]
fn equilibrium_run_costs_nothing() {
    let tr = integrate(&predprey_nominal_loop(), &[1.0, 1.0], &IntegratorOptions::default()).unwrap();
    assert_eq!(tr.final_cost(), 0.0);
    assert_eq!(tr.len(), 1);
    let s = PredPreyState::new(1.0, 1.0).unwrap();
    assert_eq!(predprey::q_state_cost(s), 0.0);
}
