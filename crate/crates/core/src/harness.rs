//! Convergence-order studies, one-step local-error probes, the Burgers
//! regularity-growth surrogate and the commutator route-equivalence suite.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{HarnessError, SplitError};
use crate::flows::{
    burgers_subflow, commutator_ab_expanded, commutator_ab_routes, double_commutator_expanded,
    double_commutator_routes, require_band, shock_time, BurgersSolveOptions, CommutatorRoutes,
    GrowthPolicy,
};
use crate::initial::{random_bandlimited, InitialCondition};
use crate::model::{indices_for, validate_dissipativity, EquationPreset, SobolevIndices};
use crate::spectral::{Field, PeriodicGrid};
use crate::splitting::{
    checked_reference, evolve, step_with, ExactSubflows, Monitor, SchemeKind, StepPlan,
    REFERENCE_TOLERANCE,
};

/// Rows whose error is below this multiple of the reference self-convergence
/// change are excluded from order fits.
pub const ADMISSIBILITY_FACTOR: f64 = 100.0;

/// Reference step relative to the smallest studied step.
pub const REFERENCE_REFINEMENT: f64 = 20.0;

/// Least-squares slope of `log(error)` against `log(dt)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrderFit {
    pub slope: f64,
    /// Largest absolute deviation of `log(error)` from the fitted line.
    pub residual: f64,
    pub points: usize,
}

pub fn fit_order(dts: &[f64], errors: &[f64]) -> Result<OrderFit, HarnessError> {
    if dts.len() != errors.len() {
        return Err(HarnessError::InvalidStudy(format!(
            "{} step sizes but {} errors",
            dts.len(),
            errors.len()
        )));
    }
    let points: Vec<(f64, f64)> = dts
        .iter()
        .zip(errors)
        .filter(|(d, e)| **d > 0.0 && **e > 0.0 && e.is_finite())
        .map(|(d, e)| (d.ln(), e.ln()))
        .collect();
    if points.len() < 3 {
        return Err(HarnessError::InsufficientPoints(points.len()));
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    if sxx == 0.0 {
        return Err(HarnessError::InvalidStudy(
            "all step sizes are equal".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let residual = points
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).abs())
        .fold(0.0, f64::max);
    Ok(OrderFit {
        slope,
        residual,
        points: points.len(),
    })
}

/// Fits only the points with `error >= ADMISSIBILITY_FACTOR * floor`.
pub fn fit_admissible(dts: &[f64], errors: &[f64], floor: f64) -> Result<OrderFit, HarnessError> {
    let (d, e): (Vec<f64>, Vec<f64>) = dts
        .iter()
        .zip(errors)
        .filter(|(_, e)| is_admissible(**e, floor))
        .map(|(d, e)| (*d, *e))
        .unzip();
    fit_order(&d, &e)
}

fn is_admissible(error: f64, floor: f64) -> bool {
    error.is_finite() && error > 0.0 && error >= ADMISSIBILITY_FACTOR * floor
}

/// A convergence or local-error study on one equation and initial state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudySpec {
    pub preset: EquationPreset,
    pub n_points: usize,
    pub length: f64,
    pub initial: InitialCondition,
    pub r: u32,
    pub t_final: f64,
    pub dt_list: Vec<f64>,
    pub scheme: SchemeKind,
    /// Defaults to `min(dt_list) / 20`.
    pub ref_dt: Option<f64>,
    pub burgers: BurgersSolveOptions,
    pub growth: GrowthPolicy,
    pub reference_tolerance: f64,
}

impl StudySpec {
    /// KdV, `u0 = 0.5 sin x` on `[0, 2π)`, N = 256, r = 1, T = 1,
    /// `Δt = T/{16, …, 512}`.
    pub fn canonical_kdv(scheme: SchemeKind) -> Self {
        Self {
            preset: crate::model::preset(crate::model::PresetName::Kdv, 0.0).expect("kdv preset"),
            n_points: 256,
            length: 2.0 * std::f64::consts::PI,
            initial: InitialCondition::Sine {
                amplitude: 0.5,
                mode: 1,
            },
            r: 1,
            t_final: 1.0,
            dt_list: [16, 32, 64, 128, 256, 512]
                .iter()
                .map(|&n| 1.0 / n as f64)
                .collect(),
            scheme,
            ref_dt: None,
            burgers: BurgersSolveOptions {
                tolerance: 1e-14,
                ..Default::default()
            },
            growth: GrowthPolicy::Reject,
            reference_tolerance: REFERENCE_TOLERANCE,
        }
    }

    pub fn grid(&self) -> Result<PeriodicGrid, HarnessError> {
        Ok(PeriodicGrid::new(self.n_points, self.length)?)
    }

    pub fn indices(&self) -> Result<SobolevIndices, HarnessError> {
        Ok(indices_for(self.r, self.preset.symbol.degree() as u32)?)
    }

    pub fn min_dt(&self) -> f64 {
        self.dt_list.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn effective_ref_dt(&self) -> f64 {
        self.ref_dt.unwrap_or(self.min_dt() / REFERENCE_REFINEMENT)
    }

    fn validate_common(&self) -> Result<(), HarnessError> {
        self.initial
            .validate()
            .map_err(HarnessError::InvalidStudy)?;
        self.burgers.validate()?;
        if self.dt_list.iter().any(|dt| !(*dt > 0.0 && dt.is_finite())) {
            return Err(HarnessError::InvalidStudy(
                "every dt must be positive (error is undefined for dt = 0)".into(),
            ));
        }
        let ref_dt = self.effective_ref_dt();
        if !(ref_dt > 0.0) || ref_dt > self.min_dt() / REFERENCE_REFINEMENT * (1.0 + 1e-12) {
            return Err(HarnessError::InvalidStudy(format!(
                "ref_dt = {ref_dt} must not exceed min(dt) / {REFERENCE_REFINEMENT}"
            )));
        }
        if !(self.reference_tolerance > 0.0) {
            return Err(HarnessError::InvalidStudy(
                "reference tolerance must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Checks the global-study invariants: at least 4 decreasing step sizes
    /// spanning 3 octaves, each dividing `T`.
    pub fn validate_convergence(&self) -> Result<(), HarnessError> {
        self.validate_common()?;
        if self.dt_list.len() < 4 {
            return Err(HarnessError::InvalidStudy(format!(
                "dt_list needs at least 4 entries, got {}",
                self.dt_list.len()
            )));
        }
        if self.dt_list.windows(2).any(|w| w[1] >= w[0]) {
            return Err(HarnessError::InvalidStudy(
                "dt_list must be strictly decreasing".into(),
            ));
        }
        if self.dt_list[0] / self.min_dt() < 8.0 * (1.0 - 1e-12) {
            return Err(HarnessError::InvalidStudy(
                "dt_list must span at least 3 octaves".into(),
            ));
        }
        for &dt in &self.dt_list {
            StepPlan::new(self.scheme, self.t_final, dt)?;
        }
        Ok(())
    }

    pub fn validate_local(&self) -> Result<(), HarnessError> {
        self.validate_common()?;
        if self.dt_list.len() < 3 {
            return Err(HarnessError::InvalidStudy(
                "local-error probe needs at least 3 step sizes".into(),
            ));
        }
        Ok(())
    }

    fn check_symbol(&self, grid: &PeriodicGrid) -> Result<(), HarnessError> {
        validate_dissipativity(
            &self.preset.symbol,
            grid,
            self.growth == GrowthPolicy::Reject,
        )?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StudyKind {
    Convergence,
    LocalError,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub dt: f64,
    pub steps: usize,
    pub err_hr: f64,
    pub err_hq: f64,
    pub err_l2: f64,
    pub wallclock_s: f64,
    pub admissible_hr: bool,
    pub admissible_hq: bool,
    /// Set when the run hit a shock guard; errors are NaN in that case.
    pub guard_violation: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReferenceMeta {
    pub method: &'static str,
    pub ref_dt: f64,
    pub tolerance: f64,
    /// Largest self-convergence change seen, in `H^r` and `H^q`.
    pub delta_hr: f64,
    pub delta_hq: f64,
}

/// Per-step norms of one row's trajectory.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowTrace {
    pub dt: f64,
    pub times: Vec<f64>,
    pub h_r: Vec<f64>,
    pub h_q: Vec<f64>,
    pub h_p: Vec<f64>,
    pub linf: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub kind: StudyKind,
    pub scheme: SchemeKind,
    pub indices: SobolevIndices,
    pub rows: Vec<ConvergenceRow>,
    pub fitted_order_hr: Option<OrderFit>,
    pub fitted_order_hq: Option<OrderFit>,
    pub reference: ReferenceMeta,
    /// More than two rows fell below the reference-accuracy floor, or a
    /// fit could not be formed.
    pub under_resolved: bool,
    pub traces: Vec<RowTrace>,
}

impl ConvergenceTable {
    pub fn dts(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.dt).collect()
    }

    /// Copy with every wallclock entry zeroed, for byte-stable output.
    pub fn without_wallclock(&self) -> Self {
        let mut table = self.clone();
        for row in &mut table.rows {
            row.wallclock_s = 0.0;
        }
        table
    }

    fn finish(
        kind: StudyKind,
        scheme: SchemeKind,
        indices: SobolevIndices,
        mut rows: Vec<ConvergenceRow>,
        reference: ReferenceMeta,
        traces: Vec<RowTrace>,
        floors: &[(f64, f64)],
    ) -> Self {
        for (row, (floor_r, floor_q)) in rows.iter_mut().zip(floors) {
            row.admissible_hr =
                row.guard_violation.is_none() && is_admissible(row.err_hr, *floor_r);
            row.admissible_hq =
                row.guard_violation.is_none() && is_admissible(row.err_hq, *floor_q);
        }
        let pick = |admissible: fn(&ConvergenceRow) -> bool, err: fn(&ConvergenceRow) -> f64| {
            let (d, e): (Vec<f64>, Vec<f64>) = rows
                .iter()
                .filter(|r| admissible(r))
                .map(|r| (r.dt, err(r)))
                .unzip();
            fit_order(&d, &e).ok()
        };
        let fitted_order_hr = pick(|r| r.admissible_hr, |r| r.err_hr);
        let fitted_order_hq = pick(|r| r.admissible_hq, |r| r.err_hq);
        let below_floor = rows
            .iter()
            .filter(|r| r.guard_violation.is_none() && !r.admissible_hr)
            .count();
        let under_resolved =
            below_floor > 2 || fitted_order_hr.is_none() || fitted_order_hq.is_none();
        Self {
            kind,
            scheme,
            indices,
            rows,
            fitted_order_hr,
            fitted_order_hq,
            reference,
            under_resolved,
            traces,
        }
    }
}

fn guard_row(dt: f64, steps: usize, error: &SplitError, wallclock_s: f64) -> ConvergenceRow {
    ConvergenceRow {
        dt,
        steps,
        err_hr: f64::NAN,
        err_hq: f64::NAN,
        err_l2: f64::NAN,
        wallclock_s,
        admissible_hr: false,
        admissible_hq: false,
        guard_violation: Some(error.to_string()),
    }
}

/// Global-error study: evolve to `T` with every `Δt`, compare with the
/// reference in `H^r`, `H^q` and `L²`, and fit orders over admissible rows.
pub fn run_convergence(spec: &StudySpec) -> Result<ConvergenceTable, HarnessError> {
    spec.validate_convergence()?;
    let grid = spec.grid()?;
    spec.check_symbol(&grid)?;
    let indices = spec.indices()?;
    let u0 = spec.initial.sample(&grid);
    let symbol = &spec.preset.symbol;
    let reference = checked_reference(
        &u0,
        spec.t_final,
        symbol,
        spec.effective_ref_dt(),
        spec.growth,
        indices.r,
        spec.reference_tolerance,
    )?;
    let exact = &reference.field;
    let meta = ReferenceMeta {
        method: "integrating-factor-rk4",
        ref_dt: reference.ref_dt,
        tolerance: spec.reference_tolerance,
        delta_hr: reference.self_convergence_delta,
        delta_hq: reference.delta.sobolev_norm(indices.q),
    };
    let monitors = vec![
        Monitor::Sobolev(indices.r),
        Monitor::Sobolev(indices.q),
        Monitor::Sobolev(indices.p),
        Monitor::Linf,
    ];

    let results: Vec<(ConvergenceRow, RowTrace)> = spec
        .dt_list
        .par_iter()
        .map(|&dt| {
            let plan = StepPlan::new(spec.scheme, spec.t_final, dt)
                .expect("validated")
                .with_burgers(spec.burgers)
                .with_growth(spec.growth)
                .with_monitors(monitors.clone())
                .with_guard_norm(indices.q);
            let start = Instant::now();
            let outcome = evolve(&u0, &plan, symbol);
            let wallclock_s = start.elapsed().as_secs_f64();
            let trajectory = match &outcome {
                Ok(t) => t,
                Err(failure) => &failure.partial,
            };
            let trace = |m: Monitor| trajectory.trace(m).unwrap_or(&[]).to_vec();
            let row_trace = RowTrace {
                dt,
                times: trajectory.times.clone(),
                h_r: trace(Monitor::Sobolev(indices.r)),
                h_q: trace(Monitor::Sobolev(indices.q)),
                h_p: trace(Monitor::Sobolev(indices.p)),
                linf: trace(Monitor::Linf),
            };
            let row = match &outcome {
                Ok(t) => {
                    let diff = &t.final_field - exact;
                    ConvergenceRow {
                        dt,
                        steps: plan.steps,
                        err_hr: diff.sobolev_norm(indices.r),
                        err_hq: diff.sobolev_norm(indices.q),
                        err_l2: diff.sobolev_norm(0),
                        wallclock_s,
                        admissible_hr: false,
                        admissible_hq: false,
                        guard_violation: None,
                    }
                }
                Err(failure) => guard_row(dt, plan.steps, &failure.error, wallclock_s),
            };
            (row, row_trace)
        })
        .collect();
    let (rows, traces): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    let floors = vec![(meta.delta_hr, meta.delta_hq); rows.len()];
    Ok(ConvergenceTable::finish(
        StudyKind::Convergence,
        spec.scheme,
        indices,
        rows,
        meta,
        traces,
        &floors,
    ))
}

/// Options for [`local_error_probe`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeOptions {
    pub scheme: SchemeKind,
    pub burgers: BurgersSolveOptions,
    pub growth: GrowthPolicy,
    /// Defaults to `min(dt_list) / 20`.
    pub ref_dt: Option<f64>,
    pub reference_tolerance: f64,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        Self {
            scheme: SchemeKind::Strang,
            burgers: BurgersSolveOptions {
                tolerance: 1e-14,
                ..Default::default()
            },
            growth: GrowthPolicy::Reject,
            ref_dt: None,
            reference_tolerance: REFERENCE_TOLERANCE,
        }
    }
}

/// One splitting step against the reference flow for every `Δt`. For
/// Strang the expected slopes are 3 in `H^r` and at least 2 in `H^q`.
pub fn local_error_probe(
    u0: &Field,
    dt_list: &[f64],
    symbol: &crate::model::DispersionSymbol,
    r: u32,
    options: &ProbeOptions,
) -> Result<ConvergenceTable, HarnessError> {
    if dt_list.len() < 3 {
        return Err(HarnessError::InvalidStudy(
            "local-error probe needs at least 3 step sizes".into(),
        ));
    }
    if let Some(bad) = dt_list.iter().find(|dt| !(**dt > 0.0 && dt.is_finite())) {
        return Err(HarnessError::InvalidStudy(format!(
            "dt = {bad} rejected: the one-step error is undefined"
        )));
    }
    options.burgers.validate()?;
    validate_dissipativity(symbol, u0.grid(), options.growth == GrowthPolicy::Reject)?;
    let indices = indices_for(r, symbol.degree() as u32)?;
    let min_dt = dt_list.iter().copied().fold(f64::INFINITY, f64::min);
    let ref_dt = options.ref_dt.unwrap_or(min_dt / REFERENCE_REFINEMENT);
    if ref_dt > min_dt / REFERENCE_REFINEMENT * (1.0 + 1e-12) {
        return Err(HarnessError::InvalidStudy(format!(
            "ref_dt = {ref_dt} must not exceed min(dt) / {REFERENCE_REFINEMENT}"
        )));
    }
    let flows = ExactSubflows {
        symbol: symbol.clone(),
        burgers: options.burgers,
        growth: options.growth,
    };

    type RowResult = Result<(ConvergenceRow, (f64, f64)), HarnessError>;
    let results: Vec<RowResult> = dt_list
        .par_iter()
        .map(|&dt| {
            let reference = checked_reference(
                u0,
                dt,
                symbol,
                ref_dt,
                options.growth,
                indices.r,
                options.reference_tolerance,
            )?;
            let floors = (
                reference.self_convergence_delta,
                reference.delta.sobolev_norm(indices.q),
            );
            let start = Instant::now();
            let stepped = step_with(options.scheme, &flows, u0, dt);
            let wallclock_s = start.elapsed().as_secs_f64();
            let row = match stepped {
                Ok(u1) => {
                    let diff = &u1 - &reference.field;
                    ConvergenceRow {
                        dt,
                        steps: 1,
                        err_hr: diff.sobolev_norm(indices.r),
                        err_hq: diff.sobolev_norm(indices.q),
                        err_l2: diff.sobolev_norm(0),
                        wallclock_s,
                        admissible_hr: false,
                        admissible_hq: false,
                        guard_violation: None,
                    }
                }
                Err(source) => {
                    let error = SplitError::Guard {
                        step: 1,
                        shock_time: shock_time(u0),
                        hq_norm: u0.sobolev_norm(indices.q),
                        source,
                    };
                    guard_row(dt, 1, &error, wallclock_s)
                }
            };
            Ok((row, floors))
        })
        .collect();
    let mut rows = Vec::with_capacity(results.len());
    let mut floors = Vec::with_capacity(results.len());
    for result in results {
        let (row, floor) = result?;
        rows.push(row);
        floors.push(floor);
    }
    let meta = ReferenceMeta {
        method: "integrating-factor-rk4",
        ref_dt,
        tolerance: options.reference_tolerance,
        delta_hr: floors.iter().map(|f| f.0).fold(0.0, f64::max),
        delta_hq: floors.iter().map(|f| f.1).fold(0.0, f64::max),
    };
    Ok(ConvergenceTable::finish(
        StudyKind::LocalError,
        options.scheme,
        indices,
        rows,
        meta,
        Vec::new(),
        &floors,
    ))
}

/// Local-error probe driven by a [`StudySpec`]; `t_final` is not used.
pub fn run_local_error(spec: &StudySpec) -> Result<ConvergenceTable, HarnessError> {
    spec.validate_local()?;
    let grid = spec.grid()?;
    let u0 = spec.initial.sample(&grid);
    local_error_probe(
        &u0,
        &spec.dt_list,
        &spec.preset.symbol,
        spec.r,
        &ProbeOptions {
            scheme: spec.scheme,
            burgers: spec.burgers,
            growth: spec.growth,
            ref_dt: spec.ref_dt,
            reference_tolerance: spec.reference_tolerance,
        },
    )
}

/// Pure-Burgers run of one family member.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthRun {
    pub initial_hp: f64,
    pub initial_hq: f64,
    /// `max_t ‖w(t)‖_{H^q}` over the run, including `t = 0`.
    pub alpha: f64,
    /// Smallest `c` with `‖w(t)‖_{H^p} ≤ exp(c α t) ‖u0‖_{H^p}` on the run.
    pub c: f64,
    pub times: Vec<f64>,
    pub h_p: Vec<f64>,
    pub h_q: Vec<f64>,
}

impl GrowthRun {
    pub fn ratios(&self) -> Vec<f64> {
        self.h_p
            .iter()
            .map(|h| {
                if self.initial_hp > 0.0 {
                    h / self.initial_hp
                } else {
                    1.0
                }
            })
            .collect()
    }

    /// Whether every ratio stays below `exp(factor · c · α · t)`.
    pub fn bounded_by(&self, c: f64, factor: f64) -> bool {
        self.ratios()
            .iter()
            .zip(&self.times)
            .all(|(ratio, t)| *ratio <= (factor * c * self.alpha * t).exp() * (1.0 + 1e-12))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthReport {
    pub indices: SobolevIndices,
    pub dt: f64,
    pub t_final: f64,
    pub runs: Vec<GrowthRun>,
    /// Family member whose `c` is reused as the common constant.
    pub calibration_index: usize,
    pub c_fit: f64,
    /// `max(c) / min(c)` over runs with nonzero data (1 when fewer than two).
    pub stability_factor: f64,
    /// Every ratio series is bounded by `exp(1.1 · c_fit · α · t)`.
    pub bounded: bool,
}

impl GrowthReport {
    pub const STABILITY_LIMIT: f64 = 2.0;
    pub const BOUND_SLACK: f64 = 1.1;

    pub fn passed(&self) -> bool {
        self.bounded && self.stability_factor <= Self::STABILITY_LIMIT
    }
}

/// Evolves every family member under pure Burgers flow in steps of `dt` up
/// to `t_final` and fits the exponential growth constant of `‖w‖_{H^p}`
/// relative to `α = max ‖w‖_{H^q}`.
///
/// The calibration run is the member with the largest initial `H^q` norm.
pub fn growth_check(
    family: &[Field],
    dt: f64,
    t_final: f64,
    indices: SobolevIndices,
    opts: &BurgersSolveOptions,
) -> Result<GrowthReport, HarnessError> {
    if family.is_empty() {
        return Err(HarnessError::InvalidStudy("growth family is empty".into()));
    }
    let steps = StepPlan::new(SchemeKind::Strang, t_final, dt)?.steps;
    let runs: Vec<Result<GrowthRun, HarnessError>> = family
        .par_iter()
        .map(|u0| {
            let mut w = u0.clone();
            let mut run = GrowthRun {
                initial_hp: u0.sobolev_norm(indices.p),
                initial_hq: u0.sobolev_norm(indices.q),
                alpha: 0.0,
                c: 0.0,
                times: Vec::with_capacity(steps),
                h_p: Vec::with_capacity(steps),
                h_q: Vec::with_capacity(steps),
            };
            for step in 1..=steps {
                w = burgers_subflow(&w, dt, opts).map_err(|source| SplitError::Guard {
                    step,
                    shock_time: shock_time(&w),
                    hq_norm: w.sobolev_norm(indices.q),
                    source,
                })?;
                run.times.push(step as f64 * dt);
                run.h_p.push(w.sobolev_norm(indices.p));
                run.h_q.push(w.sobolev_norm(indices.q));
            }
            run.alpha = run.h_q.iter().copied().fold(run.initial_hq, f64::max);
            if run.alpha > 0.0 && run.initial_hp > 0.0 {
                run.c = run
                    .ratios()
                    .iter()
                    .zip(&run.times)
                    .map(|(ratio, t)| ratio.ln().max(0.0) / (run.alpha * t))
                    .fold(0.0, f64::max);
            }
            Ok(run)
        })
        .collect();
    let runs = runs.into_iter().collect::<Result<Vec<_>, _>>()?;
    let calibration_index = runs
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.initial_hq.total_cmp(&b.1.initial_hq))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let c_fit = runs[calibration_index].c;
    let nonzero: Vec<f64> = runs
        .iter()
        .filter(|r| r.initial_hp > 0.0)
        .map(|r| r.c)
        .collect();
    let stability_factor = if nonzero.len() < 2 {
        1.0
    } else {
        let max = nonzero.iter().copied().fold(0.0, f64::max);
        let min = nonzero.iter().copied().fold(f64::INFINITY, f64::min);
        if min > 0.0 {
            max / min
        } else if max == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    };
    let bounded = runs
        .iter()
        .all(|r| r.bounded_by(c_fit, GrowthReport::BOUND_SLACK));
    Ok(GrowthReport {
        indices,
        dt,
        t_final,
        runs,
        calibration_index,
        c_fit,
        stability_factor,
        bounded,
    })
}

/// Scaled copies `a · u0` for every amplitude.
pub fn scaled_family(u0: &Field, amplitudes: &[f64]) -> Vec<Field> {
    amplitudes.iter().map(|a| u0.scale(*a)).collect()
}

/// Route-equivalence suite over seeded band-limited fields.
#[derive(Debug, Clone, PartialEq)]
pub struct CommutatorCheckSpec {
    pub presets: Vec<EquationPreset>,
    pub n_points: usize,
    pub length: f64,
    pub seeds: u64,
    pub first_seed: u64,
    /// Highest mode of the random fields; at most `N/6`.
    pub max_mode: u32,
    pub amplitude: f64,
    pub include_constant: bool,
    /// Multiplies the symbol used by the expanded routes. Anything other
    /// than 1 is a deliberate fault that the suite must detect.
    pub route2_coefficient_scale: f64,
    pub tolerance: f64,
}

impl Default for CommutatorCheckSpec {
    fn default() -> Self {
        Self {
            presets: crate::model::PresetName::ALL
                .iter()
                .map(|&p| crate::model::preset(p, 1.0).expect("preset"))
                .collect(),
            n_points: 64,
            length: 2.0 * std::f64::consts::PI,
            seeds: 20,
            first_seed: 0,
            max_mode: 8,
            amplitude: 1.0,
            include_constant: true,
            route2_coefficient_scale: 1.0,
            tolerance: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommutatorPresetResult {
    pub preset: EquationPreset,
    pub fields: usize,
    pub worst_single: f64,
    pub worst_double: f64,
    /// Largest `max|·|` of either route on the constant field (should be 0).
    pub constant_field_magnitude: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommutatorReport {
    pub tolerance: f64,
    pub results: Vec<CommutatorPresetResult>,
}

impl CommutatorReport {
    pub fn worst(&self) -> f64 {
        self.results
            .iter()
            .map(|r| r.worst_single.max(r.worst_double))
            .fold(0.0, f64::max)
    }

    pub fn passed(&self) -> bool {
        self.worst() <= self.tolerance
            && self.results.iter().all(|r| {
                r.constant_field_magnitude
                    .is_none_or(|m| m <= self.tolerance)
            })
    }
}

pub fn commutator_check(spec: &CommutatorCheckSpec) -> Result<CommutatorReport, HarnessError> {
    let grid = PeriodicGrid::new(spec.n_points, spec.length)?;
    if spec.max_mode as usize > spec.n_points / 6 {
        return Err(HarnessError::InvalidStudy(format!(
            "max_mode {} exceeds N/6 = {}",
            spec.max_mode,
            spec.n_points / 6
        )));
    }
    let fields: Vec<Field> = (0..spec.seeds)
        .map(|i| random_bandlimited(&grid, spec.max_mode, spec.amplitude, spec.first_seed + i))
        .collect();
    let constant = Field::constant(&grid, spec.amplitude);
    let mut results = Vec::new();
    for preset in &spec.presets {
        let symbol = &preset.symbol;
        let faulty = symbol.scaled(spec.route2_coefficient_scale);
        let routes = |v: &Field| -> Result<(CommutatorRoutes, CommutatorRoutes), HarnessError> {
            let mut single = commutator_ab_routes(v, symbol)?;
            let mut double = double_commutator_routes(v, symbol)?;
            if spec.route2_coefficient_scale != 1.0 {
                single.expanded = commutator_ab_expanded(v, &faulty);
                double.expanded = double_commutator_expanded(v, &faulty);
            }
            Ok((single, double))
        };
        let mut worst_single = 0.0_f64;
        let mut worst_double = 0.0_f64;
        for v in &fields {
            require_band(v, 6)?;
            let (single, double) = routes(v)?;
            worst_single = worst_single.max(single.relative_discrepancy());
            worst_double = worst_double.max(double.relative_discrepancy());
        }
        let constant_field_magnitude = if spec.include_constant {
            let (single, double) = routes(&constant)?;
            Some(
                [
                    &single.defining,
                    &single.expanded,
                    &double.defining,
                    &double.expanded,
                ]
                .iter()
                .map(|f| f.linf_norm())
                .fold(0.0, f64::max),
            )
        } else {
            None
        };
        results.push(CommutatorPresetResult {
            preset: preset.clone(),
            fields: fields.len(),
            worst_single,
            worst_double,
            constant_field_magnitude,
        });
    }
    Ok(CommutatorReport {
        tolerance: spec.tolerance,
        results,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_laws() {
        let dts = [0.1, 0.05, 0.025, 0.0125];
        let quad: Vec<f64> = dts.iter().map(|d| 3.0 * d * d).collect();
        let fit = fit_order(&dts, &quad).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-10);
        assert!(fit.residual < 1e-12);
        let lin: Vec<f64> = dts.iter().map(|d| 0.7 * d).collect();
        assert!((fit_order(&dts, &lin).unwrap().slope - 1.0).abs() < 1e-10);
    }

    #[test]
    fn fit_needs_three_points() {
        assert_eq!(
            fit_order(&[0.1, 0.05], &[1.0, 0.5]),
            Err(HarnessError::InsufficientPoints(2))
        );
        assert_eq!(
            fit_order(&[0.1, 0.05, 0.01], &[1.0, 0.0, f64::NAN]),
            Err(HarnessError::InsufficientPoints(1))
        );
    }

    #[test]
    fn admissibility_filter_recovers_slope_above_floor() {
        let floor = 1e-6;
        let dts: Vec<f64> = (0..10).map(|i| 0.1 / 2f64.powi(i)).collect();
        let errors: Vec<f64> = dts.iter().map(|d| 5.0 * d * d + floor).collect();
        let naive = fit_order(&dts, &errors).unwrap();
        assert!((naive.slope - 2.0).abs() > 0.05, "{naive:?}");
        let filtered = fit_admissible(&dts, &errors, floor).unwrap();
        assert!((filtered.slope - 2.0).abs() <= 0.05, "{filtered:?}");
        assert!(filtered.points < dts.len());
    }

    #[test]
    fn study_validation() {
        let mut spec = StudySpec::canonical_kdv(SchemeKind::Strang);
        assert!(spec.validate_convergence().is_ok());
        spec.dt_list = vec![0.5, 0.25, 0.125];
        assert!(spec.validate_convergence().is_err());
        spec.dt_list = vec![0.5, 0.25, 0.125, 0.1];
        assert!(spec.validate_convergence().is_err());
        spec.dt_list = vec![0.25, 0.125, 0.0625, 0.0625];
        assert!(spec.validate_convergence().is_err());
        spec.dt_list = vec![0.1, 0.05, 0.025, 0.0125];
        assert!(spec.validate_convergence().is_ok());
        spec.ref_dt = Some(0.01);
        assert!(spec.validate_convergence().is_err());
    }

    #[test]
    fn zero_dt_rejected_by_probe() {
        let grid = PeriodicGrid::new(32, 2.0 * std::f64::consts::PI).unwrap();
        let u0 = Field::from_fn(&grid, |x| 0.5 * x.sin());
        let kdv = crate::model::make_preset("kdv", None).unwrap().symbol;
        let err = local_error_probe(&u0, &[0.1, 0.05, 0.0], &kdv, 1, &ProbeOptions::default())
            .unwrap_err();
        assert!(matches!(err, HarnessError::InvalidStudy(_)));
    }

    #[test]
    fn growth_of_zero_field() {
        let grid = PeriodicGrid::new(32, 2.0 * std::f64::consts::PI).unwrap();
        let report = growth_check(
            &[Field::zeros(&grid)],
            0.1,
            0.5,
            indices_for(1, 3).unwrap(),
            &BurgersSolveOptions::default(),
        )
        .unwrap();
        assert_eq!(report.runs[0].c, 0.0);
        assert!(report.runs[0].h_p.iter().all(|h| *h == 0.0));
        assert!(report.bounded);
        assert_eq!(report.runs[0].times.len(), 5);
    }

    #[test]
    fn corrupted_route_is_detected() {
        let spec = CommutatorCheckSpec {
            seeds: 3,
            route2_coefficient_scale: 1.0 + 1e-3,
            ..Default::default()
        };
        let report = commutator_check(&spec).unwrap();
        assert!(!report.passed());
        assert!(report.worst() > 1e-4);
    }
}
