//! Consistency between the redesign, direct and closed-form paths.

use posctl::direct::{volterra_direct, DirectDesign, RRule};
use posctl::numerics::log_grid;
use posctl::predprey::{self, PredPreyState};
use posctl::redesign::{AlignmentPolicy, RedesignProblem};
use posctl::shaping::{Contractor, Expander, GammaMaps, Penalty};
use posctl::sysmodel::{lie_pair, SystemRegistry};

#[test]
fn redesign_reproduces_the_optimal_feedback() {
    let problem = RedesignProblem::predator_prey(Contractor::<f64>::volterra()).unwrap();
    let e = Expander::new(Contractor::volterra());
    for x in [[2.0, 0.7], [0.5, 3.0], [1.3, 1.1]] {
        let s = PredPreyState::new(x[0], x[1]).unwrap();
        let u = predprey::optimal_feedback(s, &e).unwrap();
        let w = problem.redesigned_feedback(&x).unwrap();
        assert!((w * s.y - u).abs() < 1e-12 * u);
        // the redesign Hamiltonian vanishes at the redesigned input
        assert!(problem.hamiltonian(&x, w).unwrap().abs() < 1e-10);
    }
    let grid = SystemRegistry::<f64>::builtin().get("predator-prey-scaled").unwrap().default_grid(16);
    assert!(problem.check_sign_alignment(&grid, AlignmentPolicy::Strict).passed());
}

#[test]
fn generic_direct_matches_volterra_closed_forms() {
    let d = DirectDesign::new(Contractor::<f64>::volterra(), RRule::Midpoint).unwrap();
    for (a, b) in [(0.5, -1.0), (2.0, -3.0), (-1.0, -0.5), (0.1, -0.2)] {
        let f = d.feedback(a, b).unwrap();
        let v = volterra_direct(a, b, f.r).unwrap();
        let tol = 1e-9 * (1.0 + f.omega_star);
        assert!((f.omega_star - v.omega_star).abs() < tol, "({a},{b})");
        assert!((f.omega_0 - v.omega_0).abs() < tol);
        assert!((f.q - v.q).abs() < 1e-9 * (1.0 + v.q.abs()));
    }
}

#[test]
fn gamma_maps_invert_each_other() {
    for c in [Contractor::<f64>::volterra(), Contractor::sqrt(), Contractor::rational()] {
        let p = Penalty::new(&c).unwrap();
        let g = GammaMaps::new(&c, &p).unwrap();
        // Volterra Γ⁻¹(w) = 1 − 1/Σ(w) is within e^-w of 1, so keep w moderate
        for w in log_grid(1.001f64, 12.0, 25) {
            let y = g.gamma_inverse(w).unwrap();
            // slope of the rational penalty is unbounded, so its Γ⁻¹ is not capped at 1
            assert!(y > 0.0 && (y < 1.0 || c.name() == "rational"));
            assert!((g.gamma(y).unwrap() - w).abs() < 1e-8 * w, "{} at {w}", c.name());
        }
    }
}

#[test]
fn direct_design_on_scalar_plant_uses_lie_pair() {
    let reg = SystemRegistry::<f64>::builtin();
    let plant = reg.get("scalar-x2").unwrap();
    let d = DirectDesign::new(Contractor::sqrt(), RRule::Midpoint).unwrap();
    for x in [0.3, 1.0, 2.5] {
        let lp = lie_pair(&plant.system, &plant.clf, &[x]).unwrap();
        let (ws, _) = d.continuous_feedback(lp.lf, lp.lg, lp.equilibrium_input).unwrap();
        let u = plant.system.actual_input(ws);
        assert!((u - 4.0 * x * x * (1.0 + x * x)).abs() < 1e-10 * (1.0 + u));
    }
}

#[test]
fn f32_and_f64_agree() {
    let c32 = Contractor::<f32>::volterra();
    let c64 = Contractor::<f64>::volterra();
    let (e32, e64) = (Expander::new(c32.clone()), Expander::new(c64.clone()));
    let (p32, p64) = (Penalty::new(&c32).unwrap(), Penalty::new(&c64).unwrap());
    for s in [0.2f64, 0.7, 1.5, 4.0] {
        let rel = |a: f32, b: f64| ((a as f64 - b) / b).abs();
        assert!(rel(e32.eval(s as f32).unwrap(), e64.eval(s).unwrap()) < 1e-5);
        assert!(rel(p32.eval(s as f32).unwrap(), p64.eval(s).unwrap()) < 1e-4);
    }
    let d = DirectDesign::new(Contractor::<f32>::sqrt(), RRule::Midpoint).unwrap();
    let f = d.feedback(1.0, -1.0).unwrap();
    assert!((f.omega_star - 9.0).abs() < 1e-4);
}
