//! Fixed-step closed-loop simulation, running-cost accumulation and the
//! Hamiltonian grid check.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::numerics::golden_section_min;
use crate::scalar::Scalar;
use crate::sysmodel::{ControlLyapunov, PositiveSystem, StateDomain};

/// Per-step tolerance on increases of V along a trajectory.
pub const MONOTONICITY_TOL: f64 = 1e-9;

/// State feedback returning the actual plant input.
pub type Control<T> = Arc<dyn Fn(&[T]) -> Result<T> + Send + Sync>;
pub type StateCost<T> = Arc<dyn Fn(&[T]) -> Result<T> + Send + Sync>;
/// Control cost `r(ξ)Ψ(·)` given the state and the actual input.
pub type ControlCost<T> = Arc<dyn Fn(&[T], T) -> Result<T> + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegratorOptions<T> {
    pub step: T,
    pub horizon: T,
    /// Stop once `‖ξ − ξₑ‖∞` falls below this.
    pub stop_tolerance: T,
    pub record_stride: usize,
}

impl<T: Scalar> Default for IntegratorOptions<T> {
    fn default() -> Self {
        Self { step: T::lit(1e-3), horizon: T::lit(200.0), stop_tolerance: T::lit(1e-8), record_stride: 1 }
    }
}

impl<T: Scalar> IntegratorOptions<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.step > T::zero() && self.horizon > T::zero() && self.stop_tolerance > T::zero()) {
            return Err(domain("step, horizon and stop tolerance must be positive"));
        }
        if !(self.step < self.horizon) {
            return Err(domain(format!("step {} must be below the horizon {}", self.step, self.horizon)));
        }
        if self.record_stride == 0 {
            return Err(domain("record stride must be at least 1"));
        }
        Ok(())
    }
}

/// A plant, its CLF, a feedback and the running cost it is scored with.
#[derive(Clone)]
pub struct ClosedLoop<T> {
    pub system: PositiveSystem<T>,
    pub clf: ControlLyapunov<T>,
    pub control: Control<T>,
    pub state_cost: Option<StateCost<T>>,
    pub control_cost: Option<ControlCost<T>>,
}

impl<T: Scalar> ClosedLoop<T> {
    pub fn new(system: PositiveSystem<T>, clf: ControlLyapunov<T>, control: Control<T>) -> Self {
        Self { system, clf, control, state_cost: None, control_cost: None }
    }

    pub fn with_costs(mut self, state_cost: StateCost<T>, control_cost: ControlCost<T>) -> Self {
        self.state_cost = Some(state_cost);
        self.control_cost = Some(control_cost);
        self
    }

    fn positive(&self) -> bool {
        self.system.domain == StateDomain::PositiveOrthant
    }

    fn input(&self, x: &[T], t: T) -> Result<T> {
        let u = (self.control)(x)?;
        if !u.is_finite() {
            return Err(Error::Divergence { t: t.as_f64() });
        }
        if self.positive() && !(u > T::zero()) {
            return Err(Error::Contract { t: t.as_f64(), value: u.as_f64() });
        }
        Ok(u)
    }

    fn costs(&self, x: &[T], u: T) -> Result<(T, T)> {
        let q = match &self.state_cost {
            Some(f) => f(x)?,
            None => T::zero(),
        };
        let c = match &self.control_cost {
            Some(f) => f(x, u)?,
            None => T::zero(),
        };
        Ok((q, c))
    }

    fn to_state(&self, z: &[T]) -> Vec<T> {
        if self.positive() {
            z.iter().map(|v| v.exp()).collect()
        } else {
            z.to_vec()
        }
    }

    /// Right-hand side of the augmented system `(z, J)`.
    fn rhs(&self, y: &[T], t: T) -> Result<Vec<T>> {
        let n = self.system.dim;
        let x = self.to_state(&y[..n]);
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Divergence { t: t.as_f64() });
        }
        let u = self.input(&x, t)?;
        let v = self.system.velocity(&x, u);
        let mut out: Vec<T> = if self.positive() { v.iter().zip(&x).map(|(vi, xi)| *vi / *xi).collect() } else { v };
        let (q, c) = self.costs(&x, u)?;
        out.push(q + c);
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    Converged,
    Horizon,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrajectoryRecord<T> {
    pub times: Vec<T>,
    pub states: Vec<Vec<T>>,
    pub controls: Vec<T>,
    pub clf_values: Vec<T>,
    /// Running state cost `q(ξ(t))`.
    pub q: Vec<T>,
    /// Running control cost `r(ξ(t))Ψ(ω(t))`.
    pub r_psi: Vec<T>,
    /// Accumulated cost, integrated together with the state.
    pub j: Vec<T>,
    pub stop: StopReason,
    pub steps: usize,
    pub step: T,
}

impl<T: Scalar> TrajectoryRecord<T> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> &[T] {
        self.states.last().map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn final_clf(&self) -> T {
        self.clf_values.last().copied().unwrap_or_else(T::zero)
    }

    pub fn final_cost(&self) -> T {
        self.j.last().copied().unwrap_or_else(T::zero)
    }

    /// Every recorded state component and control strictly positive.
    pub fn all_positive(&self) -> bool {
        self.states.iter().flatten().all(|v| *v > T::zero()) && self.controls.iter().all(|u| *u > T::zero())
    }

    /// CSV with columns `t, x1..xn, u, V, q, rPsi, J`.
    pub fn to_csv(&self) -> String {
        let n = self.states.first().map_or(0, Vec::len);
        let mut out = String::from("t");
        for i in 1..=n {
            let _ = write!(out, ",x{i}");
        }
        out.push_str(",u,V,q,rPsi,J\n");
        for k in 0..self.len() {
            out.push_str(&fmt_num(self.times[k]));
            for v in &self.states[k] {
                out.push(',');
                out.push_str(&fmt_num(*v));
            }
            for v in [self.controls[k], self.clf_values[k], self.q[k], self.r_psi[k], self.j[k]] {
                out.push(',');
                out.push_str(&fmt_num(v));
            }
            out.push('\n');
        }
        out
    }

    pub fn summary(&self) -> TrajectorySummary {
        let cost = accumulate_cost(self);
        TrajectorySummary {
            final_time: self.times.last().map_or(0.0, |t| t.as_f64()),
            final_state: self.final_state().iter().map(|v| v.as_f64()).collect(),
            final_clf: self.final_clf().as_f64(),
            cost: self.final_cost().as_f64(),
            cost_trapezoid: cost.trapezoid.as_f64(),
            truncation_tail: cost.tail.as_f64(),
            stop: self.stop,
            steps: self.steps,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectorySummary {
    pub final_time: f64,
    pub final_state: Vec<f64>,
    pub final_clf: f64,
    pub cost: f64,
    pub cost_trapezoid: f64,
    /// Remaining cost-to-go `V(ξ(T))` not covered by the horizon.
    pub truncation_tail: f64,
    pub stop: StopReason,
    pub steps: usize,
}

/// 17 significant digits, `.` decimal.
pub fn fmt_num<T: Scalar>(v: T) -> String {
    format!("{:.16e}", v.as_f64())
}

fn rk4_step<T: Scalar>(lp: &ClosedLoop<T>, y: &[T], t: T, h: T) -> Result<Vec<T>> {
    let half = T::lit(0.5);
    let axpy = |k: &[T], c: T| -> Vec<T> { y.iter().zip(k).map(|(a, b)| *a + c * *b).collect() };
    let k1 = lp.rhs(y, t)?;
    let k2 = lp.rhs(&axpy(&k1, h * half), t + h * half)?;
    let k3 = lp.rhs(&axpy(&k2, h * half), t + h * half)?;
    let k4 = lp.rhs(&axpy(&k3, h), t + h)?;
    let sixth = h / T::lit(6.0);
    Ok((0..y.len())
        .map(|i| y[i] + sixth * (k1[i] + T::lit(2.0) * (k2[i] + k3[i]) + k4[i]))
        .collect())
}

/// Integrates the closed loop from `x0` with classical RK4, in `ln ξ` on the
/// orthant and in the original coordinates otherwise.
pub fn integrate<T: Scalar>(lp: &ClosedLoop<T>, x0: &[T], opts: &IntegratorOptions<T>) -> Result<TrajectoryRecord<T>> {
    opts.validate()?;
    lp.system.check_state(x0)?;
    let n = lp.system.dim;
    let mut y: Vec<T> = if lp.positive() { x0.iter().map(|v| v.ln()).collect() } else { x0.to_vec() };
    y.push(T::zero());
    let mut rec = TrajectoryRecord {
        times: Vec::new(),
        states: Vec::new(),
        controls: Vec::new(),
        clf_values: Vec::new(),
        q: Vec::new(),
        r_psi: Vec::new(),
        j: Vec::new(),
        stop: StopReason::Horizon,
        steps: 0,
        step: opts.step,
    };
    let push = |rec: &mut TrajectoryRecord<T>, y: &[T], t: T| -> Result<()> {
        let x = lp.to_state(&y[..n]);
        let u = lp.input(&x, t)?;
        let (q, c) = lp.costs(&x, u)?;
        rec.times.push(t);
        rec.clf_values.push(lp.clf.eval(&x));
        rec.states.push(x);
        rec.controls.push(u);
        rec.q.push(q);
        rec.r_psi.push(c);
        rec.j.push(y[n]);
        Ok(())
    };
    let total = (opts.horizon / opts.step).round().to_usize().unwrap_or(usize::MAX);
    let mut t = T::zero();
    push(&mut rec, &y, t)?;
    let converged = |y: &[T]| lp.system.distance_to_equilibrium(&lp.to_state(&y[..n])) < opts.stop_tolerance;
    if converged(&y) {
        rec.stop = StopReason::Converged;
        return Ok(rec);
    }
    for k in 1..=total {
        y = rk4_step(lp, &y, t, opts.step)?;
        t = opts.step * T::from_usize(k).unwrap_or_else(T::infinity);
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::Divergence { t: t.as_f64() });
        }
        rec.steps = k;
        let done = converged(&y);
        if done || k % opts.record_stride == 0 || k == total {
            push(&mut rec, &y, t)?;
        }
        if done {
            rec.stop = StopReason::Converged;
            break;
        }
    }
    Ok(rec)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CostEstimate<T> {
    /// Trapezoid rule over the recorded running cost.
    pub trapezoid: T,
    /// `V(ξ(T))`, the optimal cost-to-go left after the horizon.
    pub tail: T,
}

/// Trapezoidal integral of `q + rΨ` over the recorded samples.
pub fn accumulate_cost<T: Scalar>(traj: &TrajectoryRecord<T>) -> CostEstimate<T> {
    let half = T::lit(0.5);
    let mut j = T::zero();
    for k in 1..traj.len() {
        let l0 = traj.q[k - 1] + traj.r_psi[k - 1];
        let l1 = traj.q[k] + traj.r_psi[k];
        j += half * (traj.times[k] - traj.times[k - 1]) * (l0 + l1);
    }
    CostEstimate { trapezoid: j, tail: traj.final_clf() }
}

/// Largest increase of `V` between consecutive samples (0 if none).
pub fn lyapunov_monotonicity<T: Scalar>(traj: &TrajectoryRecord<T>, clf: &ControlLyapunov<T>) -> T {
    let v: Vec<T> = traj.states.iter().map(|x| clf.eval(x)).collect();
    v.windows(2).fold(T::zero(), |m, w| m.max(w[1] - w[0]))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HjbResidual<T> {
    pub grid_min: T,
    pub grid_argmin: T,
    /// Index of the grid minimizer.
    pub cell: usize,
    /// Golden-section refinement between the neighbours of the grid minimizer.
    pub refined_min: T,
    pub refined_argmin: T,
}

impl<T: Scalar> HjbResidual<T> {
    pub fn residual(&self) -> T {
        self.refined_min.abs()
    }
}

/// Minimizes the Hamiltonian `h(ω)` over a sorted positive grid, then refines
/// in `ln ω` inside the neighbouring cells.
pub fn hjb_residual<T: Scalar>(h: impl Fn(T) -> Result<T>, grid: &[T]) -> Result<HjbResidual<T>> {
    if grid.len() < 3 {
        return Err(domain("Hamiltonian grid needs at least 3 points"));
    }
    let mut best = (0usize, T::infinity());
    for (i, &w) in grid.iter().enumerate() {
        let v = h(w)?;
        if v < best.1 {
            best = (i, v);
        }
    }
    let (cell, grid_min) = best;
    let lo = grid[cell.saturating_sub(1)].ln();
    let hi = grid[(cell + 1).min(grid.len() - 1)].ln();
    let f = |u: T| h(u.exp()).unwrap_or_else(|_| T::infinity());
    let (u, v) = golden_section_min(&f, lo, hi, T::tol(1e-12));
    let (refined_argmin, refined_min) = if v <= grid_min { (u.exp(), v) } else { (grid[cell], grid_min) };
    Ok(HjbResidual { grid_min, grid_argmin: grid[cell], cell, refined_min, refined_argmin })
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let name = path.file_name().and_then(|s| s.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)
}
