//! Hall-MHD right-hand sides, integrating-factor Runge-Kutta stepping and
//! conservation audits.

pub mod audit;
pub mod crosscheck;
pub mod integrator;
pub mod rhs;
pub mod state;

pub use audit::{
    audit_convergence, audit_run, blowup_indicator, blowup_integral, energy_audit, energy_audit_states,
    AuditConvergence, AuditReport, BlowupReport, EnergySample, Stencil,
};
pub use crosscheck::{
    cross_check_formulations, formulation_convergence, local_truncation_scale, DivergenceReport,
    FormulationConvergence,
};
pub use integrator::{cfl_bound, check_cfl, step, IntegratorConfig, Model, Scheme, Stepper};
pub use rhs::{hall_term, rhs_extended, rhs_original};
pub use state::{ExtendedState, PhysicalParams, SolverState};
