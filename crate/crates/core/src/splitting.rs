//! Lie and Strang compositions of the linear and Burgers subflows, the
//! time-stepping loop, and an integrating-factor RK4 reference for the
//! full flow.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{FlowError, SplitError};
use crate::flows::{
    apply_b, burgers_subflow, exp_multipliers, linear_flow_with, shock_time, BurgersSolveOptions,
    GrowthPolicy,
};
use crate::model::{symbol_values, DispersionSymbol};
use crate::spectral::Field;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeKind {
    Lie,
    Strang,
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SchemeKind::Lie => "lie",
            SchemeKind::Strang => "strang",
        })
    }
}

/// The two subflows a splitting step composes.
pub trait SubFlows {
    /// `Φ_A^t`.
    fn linear(&self, u: &Field, t: f64) -> Result<Field, FlowError>;
    /// `Φ_B^t`.
    fn burgers(&self, u: &Field, t: f64) -> Result<Field, FlowError>;
}

/// Exact linear flow and the configured Burgers solver.
#[derive(Debug, Clone)]
pub struct ExactSubflows {
    pub symbol: DispersionSymbol,
    pub burgers: BurgersSolveOptions,
    pub growth: GrowthPolicy,
}

impl ExactSubflows {
    pub fn new(symbol: DispersionSymbol, burgers: BurgersSolveOptions) -> Self {
        Self {
            symbol,
            burgers,
            growth: GrowthPolicy::Reject,
        }
    }
}

impl SubFlows for ExactSubflows {
    fn linear(&self, u: &Field, t: f64) -> Result<Field, FlowError> {
        linear_flow_with(u, t, &self.symbol, self.growth)
    }

    fn burgers(&self, u: &Field, t: f64) -> Result<Field, FlowError> {
        burgers_subflow(u, t, &self.burgers)
    }
}

/// `Φ_A^{dt/2} ∘ Φ_B^{dt} ∘ Φ_A^{dt/2}`.
pub fn strang_step_with(flows: &impl SubFlows, u: &Field, dt: f64) -> Result<Field, FlowError> {
    if dt < 0.0 {
        return Err(FlowError::NegativeTime(dt));
    }
    let half = flows.linear(u, 0.5 * dt)?;
    let burgers = flows.burgers(&half, dt)?;
    flows.linear(&burgers, 0.5 * dt)
}

/// `Φ_A^{dt} ∘ Φ_B^{dt}`.
pub fn lie_step_with(flows: &impl SubFlows, u: &Field, dt: f64) -> Result<Field, FlowError> {
    if dt < 0.0 {
        return Err(FlowError::NegativeTime(dt));
    }
    let burgers = flows.burgers(u, dt)?;
    flows.linear(&burgers, dt)
}

pub fn strang_step(
    u: &Field,
    dt: f64,
    symbol: &DispersionSymbol,
    opts: &BurgersSolveOptions,
) -> Result<Field, FlowError> {
    strang_step_with(&ExactSubflows::new(symbol.clone(), *opts), u, dt)
}

pub fn lie_step(
    u: &Field,
    dt: f64,
    symbol: &DispersionSymbol,
    opts: &BurgersSolveOptions,
) -> Result<Field, FlowError> {
    lie_step_with(&ExactSubflows::new(symbol.clone(), *opts), u, dt)
}

pub fn step_with(
    scheme: SchemeKind,
    flows: &impl SubFlows,
    u: &Field,
    dt: f64,
) -> Result<Field, FlowError> {
    match scheme {
        SchemeKind::Lie => lie_step_with(flows, u, dt),
        SchemeKind::Strang => strang_step_with(flows, u, dt),
    }
}

/// Quantity recorded after every step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Monitor {
    Sobolev(u32),
    Linf,
}

impl Monitor {
    pub fn measure(&self, u: &Field) -> f64 {
        match self {
            Monitor::Sobolev(s) => u.sobolev_norm(*s),
            Monitor::Linf => u.linf_norm(),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Monitor::Sobolev(s) => format!("h{s}"),
            Monitor::Linf => "linf".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepPlan {
    pub scheme: SchemeKind,
    pub dt: f64,
    pub steps: usize,
    pub burgers: BurgersSolveOptions,
    pub growth: GrowthPolicy,
    pub monitors: Vec<Monitor>,
    /// Sobolev index reported alongside guard violations (usually `q`).
    pub guard_norm_index: u32,
}

impl StepPlan {
    /// Plan covering `[0, t_final]` with step `dt`; `dt` must divide
    /// `t_final` to 1e-12.
    pub fn new(scheme: SchemeKind, t_final: f64, dt: f64) -> Result<Self, SplitError> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(SplitError::InvalidPlan(format!(
                "dt must be positive, got {dt}"
            )));
        }
        if !(t_final > 0.0 && t_final.is_finite()) {
            return Err(SplitError::InvalidPlan(format!(
                "final time must be positive, got {t_final}"
            )));
        }
        let steps = (t_final / dt).round();
        if steps < 1.0 || (steps * dt - t_final).abs() > 1e-12 * t_final.max(1.0) {
            return Err(SplitError::InvalidPlan(format!(
                "dt = {dt} does not divide T = {t_final}"
            )));
        }
        Ok(Self::from_steps(scheme, t_final, steps as usize))
    }

    pub fn from_steps(scheme: SchemeKind, t_final: f64, steps: usize) -> Self {
        Self {
            scheme,
            dt: t_final / steps as f64,
            steps,
            burgers: BurgersSolveOptions::default(),
            growth: GrowthPolicy::Reject,
            monitors: vec![Monitor::Sobolev(0), Monitor::Linf],
            guard_norm_index: 1,
        }
    }

    pub fn with_burgers(mut self, burgers: BurgersSolveOptions) -> Self {
        self.burgers = burgers;
        self
    }

    pub fn with_monitors(mut self, monitors: Vec<Monitor>) -> Self {
        self.monitors = monitors;
        self
    }

    pub fn with_growth(mut self, growth: GrowthPolicy) -> Self {
        self.growth = growth;
        self
    }

    pub fn with_guard_norm(mut self, index: u32) -> Self {
        self.guard_norm_index = index;
        self
    }

    pub fn t_final(&self) -> f64 {
        self.dt * self.steps as f64
    }

    /// Stride between stored snapshots, `ceil(n / 200)`.
    pub fn snapshot_stride(&self) -> usize {
        self.steps.div_ceil(200).max(1)
    }
}

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub step: usize,
    pub time: f64,
    pub field: Field,
}

#[derive(Debug, Clone, Serialize)]
pub struct NormTrace {
    pub monitor: Monitor,
    pub values: Vec<f64>,
}

/// Times `t_n`, per-step monitor values and thinned snapshots.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub traces: Vec<NormTrace>,
    pub snapshots: Vec<Snapshot>,
    pub final_field: Field,
}

impl Trajectory {
    fn start(u0: &Field, monitors: &[Monitor]) -> Self {
        Self {
            times: vec![0.0],
            traces: monitors
                .iter()
                .map(|m| NormTrace {
                    monitor: *m,
                    values: vec![m.measure(u0)],
                })
                .collect(),
            snapshots: vec![Snapshot {
                step: 0,
                time: 0.0,
                field: u0.clone(),
            }],
            final_field: u0.clone(),
        }
    }

    fn record(&mut self, step: usize, time: f64, u: Field, keep_snapshot: bool) {
        self.times.push(time);
        for trace in &mut self.traces {
            trace.values.push(trace.monitor.measure(&u));
        }
        if keep_snapshot {
            self.snapshots.push(Snapshot {
                step,
                time,
                field: u.clone(),
            });
        }
        self.final_field = u;
    }

    pub fn steps_taken(&self) -> usize {
        self.times.len() - 1
    }

    pub fn trace(&self, monitor: Monitor) -> Option<&[f64]> {
        self.traces
            .iter()
            .find(|t| t.monitor == monitor)
            .map(|t| t.values.as_slice())
    }
}

/// Evolution that stopped early, with everything computed before the
/// failing step.
#[derive(Debug, Clone)]
pub struct EvolveFailure {
    pub error: SplitError,
    pub partial: Trajectory,
}

/// Runs `plan.steps` steps of the planned scheme from `u0`.
pub fn evolve(
    u0: &Field,
    plan: &StepPlan,
    symbol: &DispersionSymbol,
) -> Result<Trajectory, Box<EvolveFailure>> {
    let flows = ExactSubflows {
        symbol: symbol.clone(),
        burgers: plan.burgers,
        growth: plan.growth,
    };
    evolve_with(&flows, u0, plan)
}

pub fn evolve_with(
    flows: &impl SubFlows,
    u0: &Field,
    plan: &StepPlan,
) -> Result<Trajectory, Box<EvolveFailure>> {
    let mut trajectory = Trajectory::start(u0, &plan.monitors);
    let stride = plan.snapshot_stride();
    let mut u = u0.clone();
    for step in 1..=plan.steps {
        let next = match step_with(plan.scheme, flows, &u, plan.dt) {
            Ok(next) => next,
            Err(source) => {
                let error = match source {
                    FlowError::StepTooLarge { .. } | FlowError::NoConvergence { .. } => {
                        SplitError::Guard {
                            step,
                            shock_time: shock_time(&u),
                            hq_norm: u.sobolev_norm(plan.guard_norm_index),
                            source,
                        }
                    }
                    FlowError::BlowUp { .. } => SplitError::NonFinite { step },
                    other => SplitError::Flow(other),
                };
                return Err(Box::new(EvolveFailure {
                    error,
                    partial: trajectory,
                }));
            }
        };
        if next.samples().iter().any(|x| !x.is_finite()) {
            return Err(Box::new(EvolveFailure {
                error: SplitError::NonFinite { step },
                partial: trajectory,
            }));
        }
        let keep = step % stride == 0 || step == plan.steps;
        trajectory.record(step, step as f64 * plan.dt, next.clone(), keep);
        u = next;
    }
    Ok(trajectory)
}

/// Lawson (integrating-factor) RK4 for `u_t = Au + B(u)`, integrating
/// `z = exp(-(t - t_n)A) u` over each step so no negative-time exponential
/// is ever formed.
pub fn integrating_factor_rk4(
    u0: &Field,
    t_final: f64,
    symbol: &DispersionSymbol,
    ref_dt: f64,
    growth: GrowthPolicy,
) -> Result<Field, SplitError> {
    if t_final < 0.0 {
        return Err(SplitError::Flow(FlowError::NegativeTime(t_final)));
    }
    if t_final == 0.0 {
        return Ok(u0.clone());
    }
    if !(ref_dt > 0.0) {
        return Err(SplitError::InvalidPlan(format!(
            "ref_dt must be positive, got {ref_dt}"
        )));
    }
    let steps = (t_final / ref_dt).ceil().max(1.0) as usize;
    let h = t_final / steps as f64;
    // Reuse the linear-flow guard once, then work with cached multipliers.
    linear_flow_with(&Field::zeros(u0.grid()), h, symbol, growth)?;
    let values = symbol_values(symbol, u0.grid());
    let half = exp_multipliers(&values, 0.5 * h);
    let full = exp_multipliers(&values, h);
    let apply = |u: &Field, m: &[Complex64]| u.map_spectrum(|i, _| m[i]);

    let mut u = u0.clone();
    for step in 0..steps {
        let k1 = apply_b(&u);
        let eu = apply(&u, &half);
        let a = apply(&(&u + &k1.scale(0.5 * h)), &half);
        let ba = apply_b(&a);
        let b = &eu + &ba.scale(0.5 * h);
        let bb = apply_b(&b);
        let ebb = apply(&bb, &half);
        let e2u = apply(&u, &full);
        let c = &e2u + &ebb.scale(h);
        let bc = apply_b(&c);
        let combo =
            &(&apply(&k1, &full) + &apply(&ba, &half).scale(2.0)) + &(&ebb.scale(2.0) + &bc);
        u = &e2u + &combo.scale(h / 6.0);
        if u.samples().iter().any(|x| !x.is_finite()) {
            return Err(SplitError::NonFinite { step: step + 1 });
        }
    }
    Ok(u)
}

/// Reference solution with its self-convergence measurement.
#[derive(Debug, Clone)]
pub struct ReferenceSolution {
    /// Result at the finer of the two step sizes, `ref_dt / 2`.
    pub field: Field,
    pub ref_dt: f64,
    pub norm_index: u32,
    /// `‖u(ref_dt) − u(ref_dt/2)‖_{H^norm_index}`.
    pub self_convergence_delta: f64,
    /// `u(ref_dt) − u(ref_dt/2)`, for measuring the change in other norms.
    pub delta: Field,
}

/// Default bound on the self-convergence change in `H^r`.
pub const REFERENCE_TOLERANCE: f64 = 1e-10;

pub fn reference_solution(
    u0: &Field,
    t_final: f64,
    symbol: &DispersionSymbol,
    ref_dt: f64,
) -> Result<Field, SplitError> {
    integrating_factor_rk4(u0, t_final, symbol, ref_dt, GrowthPolicy::Reject)
}

/// Integrates with `ref_dt` and `ref_dt / 2` and refuses the result when
/// the two differ by more than `tolerance` in `H^norm_index`.
pub fn checked_reference(
    u0: &Field,
    t_final: f64,
    symbol: &DispersionSymbol,
    ref_dt: f64,
    growth: GrowthPolicy,
    norm_index: u32,
    tolerance: f64,
) -> Result<ReferenceSolution, SplitError> {
    let (coarse, fine) = rayon::join(
        || integrating_factor_rk4(u0, t_final, symbol, ref_dt, growth),
        || integrating_factor_rk4(u0, t_final, symbol, 0.5 * ref_dt, growth),
    );
    let (coarse, fine) = (coarse?, fine?);
    let difference = &coarse - &fine;
    let delta = difference.sobolev_norm(norm_index);
    if !(delta <= tolerance) {
        return Err(SplitError::ReferenceInvalid {
            norm_index,
            delta,
            tolerance,
        });
    }
    Ok(ReferenceSolution {
        field: fine,
        ref_dt,
        norm_index,
        self_convergence_delta: delta,
        delta: difference,
    })
}
