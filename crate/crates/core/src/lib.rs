//! Operator splitting for periodic dispersive-Burgers equations
//! `u_t = P(∂x) u + u u_x`: Fourier spectral kernels, the exact linear and
//! Burgers subflows, Lie and Strang steps, a high-accuracy reference
//! integrator and convergence diagnostics.

pub mod error;
pub mod flows;
pub mod harness;
pub mod initial;
pub mod model;
pub mod report;
pub mod spectral;
pub mod splitting;

pub use error::{FlowError, HarnessError, ModelError, SpectralError, SplitError};
pub use flows::{
    apply_b, burgers_flow, burgers_subflow, commutator_ab, double_commutator, linear_flow,
    linear_flow_with, shock_time, BurgersMethod, BurgersSolveOptions, GrowthPolicy,
};
pub use harness::{
    commutator_check, fit_order, growth_check, local_error_probe, run_convergence, run_local_error,
    CommutatorCheckSpec, CommutatorReport, ConvergenceRow, ConvergenceTable, GrowthReport,
    OrderFit, ProbeOptions, StudySpec,
};
pub use initial::InitialCondition;
pub use model::{
    indices_for, make_preset, validate_dissipativity, DispersionSymbol, DissipativityReport,
    EquationPreset, PresetName, SobolevIndices,
};
pub use spectral::{Field, PeriodicGrid};
pub use splitting::{evolve, lie_step, strang_step, Monitor, SchemeKind, StepPlan, Trajectory};
