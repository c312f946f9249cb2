//! Builds closed loops from a scenario config, runs them and writes the
//! per-run CSVs plus a JSON manifest.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use posctl::direct::{DirectDesign, RRule};
use posctl::predprey::{self, PredPreyState};
use posctl::redesign::RedesignProblem;
use posctl::shaping::{Contractor, ContractorKind, Expander, Penalty};
use posctl::sim::{
    integrate, lyapunov_monotonicity, write_atomic, ClosedLoop, ControlCost, IntegratorOptions, StateCost,
    TrajectorySummary,
};
use posctl::sysmodel::{check_clf_strong, check_clf_weak, lie_pair, GridReport, Plant, StateDomain, SystemRegistry};
use posctl::universal::{half_universal, universal_basic, universal_invopt};
use serde::Serialize;
use thiserror::Error;

use crate::config::{ConfigError, Law, RuleName, ScenarioConfig};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("cannot write {path}: {source}")]
    Output { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Model(#[from] posctl::Error),
}

fn config_err(key: &str, msg: impl Into<String>) -> ScenarioError {
    ScenarioError::Config(ConfigError::Invalid { key: key.into(), msg: msg.into() })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunOutcome {
    pub ic_index: usize,
    pub initial_condition: Vec<f64>,
    pub law: Law,
    pub csv: Option<String>,
    /// `V(ξ₀)`.
    pub initial_clf: f64,
    pub summary: Option<TrajectorySummary>,
    pub states_and_controls_positive: Option<bool>,
    pub worst_clf_increase: Option<f64>,
    pub error: Option<String>,
}

impl RunOutcome {
    pub fn cost(&self) -> Option<f64> {
        self.summary.as_ref().map(|s| s.cost)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub ic_index: usize,
    pub initial_condition: Vec<f64>,
    /// `Σ(Y₀/X₀)` for the scoring contractor.
    pub sigma_rho0: f64,
    pub nominal_cost: f64,
    pub optimal_law: Law,
    pub optimal_cost: f64,
    /// `(J(U₀) − J(U*))/J(U₀)`; absent when `J(U₀) = 0`.
    pub relative_saving: Option<f64>,
    pub ordering_holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedCheck {
    pub name: String,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub scenario: String,
    pub system: String,
    pub contractor: Option<&'static str>,
    pub r_rule: RuleName,
    pub laws: Vec<Law>,
    pub integrator: IntegratorOptions<f64>,
    pub clf_checks: Vec<GridReport>,
    pub runs: Vec<RunOutcome>,
    pub comparisons: Vec<Comparison>,
    pub checks: Vec<NamedCheck>,
    pub passed: bool,
}

fn is_predprey(name: &str) -> bool {
    matches!(name, "predator-prey" | "predator-prey-scaled")
}

/// Checks a config against the registry; returns the plant and the CLF reports.
pub fn validate(cfg: &ScenarioConfig, registry: &SystemRegistry<f64>) -> Result<Vec<GridReport>, ScenarioError> {
    let plant = registry.get(&cfg.system).map_err(|e| config_err("system", e.to_string()))?;
    for law in &cfg.laws {
        if law.predprey_only() && !is_predprey(&cfg.system) {
            return Err(config_err("laws", format!("law `{law}` is only defined for the prey/predator systems")));
        }
    }
    if cfg.laws.iter().any(|l| matches!(l, Law::Direct | Law::ContinuousDirect)) {
        let contractor = Contractor::<f64>::of_kind(cfg.contractor.unwrap_or(ContractorKind::Volterra))
            .map_err(|e| config_err("contractor", e.to_string()))?;
        DirectDesign::new(contractor, RRule::Midpoint).map_err(|e| config_err("contractor", e.to_string()))?;
    }
    for (i, ic) in cfg.initial_conditions.iter().enumerate() {
        plant
            .system
            .check_state(ic)
            .map_err(|e| config_err("initial_conditions", format!("entry {i}: {e}")))?;
    }
    let grid = plant.default_grid(cfg.check_grid);
    let mut reports = Vec::new();
    let needs_weak = cfg.laws.contains(&Law::UniversalBasic);
    let needs_strong = cfg
        .laws
        .iter()
        .any(|l| matches!(l, Law::UniversalInvopt | Law::HalfUniversal | Law::Direct | Law::ContinuousDirect));
    if needs_weak {
        reports.push(check_clf_weak(&plant.system, &plant.clf, &grid));
    }
    if needs_strong {
        reports.push(check_clf_strong(&plant.system, &plant.clf, &grid));
    }
    if let Some(bad) = reports.iter().find(|r| !r.passed()) {
        return Err(config_err(
            "laws",
            format!(
                "CLF condition `{}` fails for {} on {} of {} grid points, first at {:?}",
                bad.condition, cfg.system, bad.violations, bad.checked, bad.first_counterexample
            ),
        ));
    }
    Ok(reports)
}

/// Contractor used to score (and, where applicable, design) the prey/predator laws.
fn scoring_contractor(cfg: &ScenarioConfig, law: Law) -> Contractor<f64> {
    let kind = match law {
        Law::OptimalVolterra => ContractorKind::Volterra,
        _ => cfg.contractor.unwrap_or(ContractorKind::Volterra),
    };
    Contractor::of_kind(kind).unwrap_or_else(|_| Contractor::volterra())
}

/// `q + rΨ(U/Y)` scoring for the prey/predator family.
fn predprey_costs(contractor: &Contractor<f64>, scaled: bool) -> Result<(StateCost<f64>, ControlCost<f64>), ScenarioError> {
    let p = Penalty::new(contractor)?;
    let e = Expander::new(contractor.clone());
    let q: StateCost<f64> = Arc::new(|x| Ok(predprey::q_state_cost(PredPreyState::from_slice(x)?)));
    let c: ControlCost<f64> = Arc::new(move |x, u| {
        let s = PredPreyState::from_slice(x)?;
        let w = if scaled { u } else { u / s.y };
        let psi = p.eval(w)?;
        if psi == 0.0 {
            return Ok(0.0);
        }
        Ok(predprey::r_weight(s, &p, &e)? * psi)
    });
    Ok((q, c))
}

pub fn build_loop(plant: &Plant<f64>, cfg: &ScenarioConfig, law: Law) -> Result<ClosedLoop<f64>, ScenarioError> {
    let sys = plant.system.clone();
    let clf = plant.clf.clone();
    let scaled = sys.name == "predator-prey-scaled";
    // abstract input ω → plant input
    let to_input = move |x: &[f64], w: f64| if scaled { w } else { w * x[1] };

    if law.predprey_only() {
        let contractor = scoring_contractor(cfg, law);
        let (q, c) = predprey_costs(&contractor, scaled)?;
        let control: posctl::sim::Control<f64> = match law {
            Law::Nominal => Arc::new(move |x| Ok(to_input(x, x[1] / x[0]))),
            Law::Redesign => {
                let problem = RedesignProblem::predator_prey(contractor)?;
                Arc::new(move |x| Ok(to_input(x, problem.redesigned_feedback(x)?)))
            }
            _ => {
                let e = Expander::new(contractor);
                Arc::new(move |x| Ok(to_input(x, e.eval(x[1] / x[0])?)))
            }
        };
        return Ok(ClosedLoop::new(sys, clf, control).with_costs(q, c));
    }

    let s2 = sys.clone();
    let c2 = clf.clone();
    let lie = Arc::new(move |x: &[f64]| lie_pair(&s2, &c2, x));
    let we = sys.equilibrium_input;
    let omega_of = move |u: f64| u - we + 1.0;
    let (control, q, c): (posctl::sim::Control<f64>, StateCost<f64>, ControlCost<f64>) = match law {
        Law::UniversalBasic | Law::HalfUniversal => {
            let eval = move |a: f64, b: f64| {
                if law == Law::UniversalBasic {
                    universal_basic(a - b, b)
                } else {
                    half_universal(a, b)
                }
            };
            let (l1, l2) = (lie.clone(), lie);
            (
                Arc::new(move |x| {
                    let lp = l1(x)?;
                    Ok(we + eval(lp.a, lp.b)?.deviation)
                }),
                Arc::new(move |x| {
                    let lp = l2(x)?;
                    Ok(-lp.vdot(1.0 + eval(lp.a, lp.b)?.deviation))
                }),
                Arc::new(|_, _| Ok(0.0)),
            )
        }
        Law::UniversalInvopt => {
            let (l1, l2, l3) = (lie.clone(), lie.clone(), lie);
            (
                Arc::new(move |x| {
                    let lp = l1(x)?;
                    Ok(we + universal_invopt(lp.a, lp.b)?.deviation)
                }),
                Arc::new(move |x| {
                    let lp = l2(x)?;
                    Ok(universal_invopt(lp.a, lp.b)?.q_run)
                }),
                Arc::new(move |x, u| {
                    let lp = l3(x)?;
                    let d = omega_of(u) - 1.0;
                    if d == 0.0 {
                        return Ok(0.0);
                    }
                    Ok(universal_invopt(lp.a, lp.b)?.r * d * d)
                }),
            )
        }
        Law::Direct | Law::ContinuousDirect => {
            let contractor = Contractor::of_kind(cfg.contractor.unwrap_or(ContractorKind::Volterra))?;
            let rule = match (law, cfg.r_rule) {
                (Law::Direct, RuleName::SqrtMean) => RRule::SqrtMean,
                _ => RRule::Midpoint,
            };
            let d = Arc::new(DirectDesign::new(contractor, rule)?);
            let (d1, d2, d3) = (d.clone(), d.clone(), d);
            let (l1, l2, l3) = (lie.clone(), lie.clone(), lie);
            (
                Arc::new(move |x| {
                    let lp = l1(x)?;
                    let w = if law == Law::ContinuousDirect {
                        d1.continuous_feedback(lp.lf, lp.lg, lp.equilibrium_input)?.0
                    } else {
                        d1.feedback(lp.a, lp.b)?.omega_star
                    };
                    Ok(we + w - 1.0)
                }),
                Arc::new(move |x| {
                    let lp = l2(x)?;
                    Ok(d2.feedback(lp.a, lp.b)?.q)
                }),
                Arc::new(move |x, u| {
                    let lp = l3(x)?;
                    let f = d3.feedback(lp.a, lp.b)?;
                    let psi = d3.penalty().eval(omega_of(u))?;
                    Ok(if psi == 0.0 { 0.0 } else { f.r * psi })
                }),
            )
        }
        _ => unreachable!("prey/predator laws handled above"),
    };
    Ok(ClosedLoop::new(sys, clf, control).with_costs(q, c))
}

fn run_one(
    plant: &Plant<f64>,
    cfg: &ScenarioConfig,
    law: Law,
    ic_index: usize,
    out_dir: &Path,
) -> Result<RunOutcome, ScenarioError> {
    let ic = cfg.initial_conditions[ic_index].clone();
    let lp = build_loop(plant, cfg, law)?;
    let mut outcome = RunOutcome {
        ic_index,
        initial_condition: ic.clone(),
        law,
        csv: None,
        initial_clf: plant.clf.eval(&ic),
        summary: None,
        states_and_controls_positive: None,
        worst_clf_increase: None,
        error: None,
    };
    match integrate(&lp, &ic, &cfg.integrator) {
        Ok(tr) => {
            let file = format!("ic{ic_index}_{}.csv", law.name());
            let path = out_dir.join(&file);
            write_atomic(&path, tr.to_csv().as_bytes()).map_err(|source| ScenarioError::Output { path, source })?;
            outcome.csv = Some(file);
            if plant.system.domain == StateDomain::PositiveOrthant {
                outcome.states_and_controls_positive = Some(tr.all_positive());
            }
            outcome.worst_clf_increase = Some(lyapunov_monotonicity(&tr, &lp.clf));
            outcome.summary = Some(tr.summary());
        }
        Err(e) => outcome.error = Some(e.to_string()),
    }
    Ok(outcome)
}

fn comparisons(cfg: &ScenarioConfig, runs: &[RunOutcome]) -> Result<Vec<Comparison>, ScenarioError> {
    if !is_predprey(&cfg.system) || !cfg.laws.contains(&Law::Nominal) {
        return Ok(Vec::new());
    }
    let Some(optimal) = [Law::OptimalVolterra, Law::Expander, Law::Redesign].into_iter().find(|l| cfg.laws.contains(l))
    else {
        return Ok(Vec::new());
    };
    let e = Expander::new(scoring_contractor(cfg, optimal));
    let mut out = Vec::new();
    for (i, ic) in cfg.initial_conditions.iter().enumerate() {
        let find = |law: Law| runs.iter().find(|r| r.ic_index == i && r.law == law).and_then(RunOutcome::cost);
        let (Some(j0), Some(js)) = (find(Law::Nominal), find(optimal)) else { continue };
        let equilibrium = j0 == 0.0 && js == 0.0;
        out.push(Comparison {
            ic_index: i,
            initial_condition: ic.clone(),
            sigma_rho0: e.eval(ic[1] / ic[0])?,
            nominal_cost: j0,
            optimal_law: optimal,
            optimal_cost: js,
            relative_saving: (j0 != 0.0).then(|| (j0 - js) / j0),
            ordering_holds: equilibrium || j0 > js,
        });
    }
    Ok(out)
}

/// Runs every (initial condition, law) pair and writes CSVs and `manifest.json` into `out_dir`.
pub fn run_scenario(
    cfg: &ScenarioConfig,
    registry: &SystemRegistry<f64>,
    out_dir: &Path,
) -> Result<Manifest, ScenarioError> {
    let clf_checks = validate(cfg, registry)?;
    let plant = registry.get(&cfg.system)?;
    std::fs::create_dir_all(out_dir).map_err(|source| ScenarioError::Output { path: out_dir.into(), source })?;
    let jobs: Vec<(usize, Law)> =
        (0..cfg.initial_conditions.len()).flat_map(|i| cfg.laws.iter().map(move |l| (i, *l))).collect();
    let results: Vec<Result<RunOutcome, ScenarioError>> = std::thread::scope(|scope| {
        let handles: Vec<_> =
            jobs.iter().map(|&(i, law)| scope.spawn(move || run_one(plant, cfg, law, i, out_dir))).collect();
        handles.into_iter().map(|h| h.join().expect("scenario worker panicked")).collect()
    });
    let runs = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let comparisons = comparisons(cfg, &runs)?;

    let mut checks = Vec::new();
    for r in &runs {
        let tag = format!("ic{} {}", r.ic_index, r.law);
        checks.push(NamedCheck { name: format!("{tag}: integration completed"), passed: r.error.is_none() });
        if let Some(p) = r.states_and_controls_positive {
            checks.push(NamedCheck { name: format!("{tag}: states and controls positive"), passed: p });
        }
    }
    for c in &comparisons {
        checks.push(NamedCheck {
            name: format!("ic{}: J(nominal) > J({})", c.ic_index, c.optimal_law),
            passed: c.ordering_holds,
        });
    }
    let manifest = Manifest {
        scenario: cfg.name.clone(),
        system: cfg.system.clone(),
        contractor: cfg.contractor.map(ContractorKind::name),
        r_rule: cfg.r_rule,
        laws: cfg.laws.clone(),
        integrator: cfg.integrator,
        clf_checks,
        runs,
        comparisons,
        passed: checks.iter().all(|c| c.passed),
        checks,
    };
    let path = out_dir.join("manifest.json");
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    write_atomic(&path, text.as_bytes()).map_err(|source| ScenarioError::Output { path, source })?;
    Ok(manifest)
}
