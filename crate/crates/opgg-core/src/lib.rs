//! Replicator dynamics for the optional public goods game with graduated
//! punishment, and solvers for punishment schedules that minimize a
//! quadratic cost.
//!
//! The population mixes three strategies: cooperators contribute to a common
//! pool, defectors free-ride, and loners opt out for a fixed payoff. A
//! sanctioning institution fines defectors by a fraction `v` of their gain,
//! and that fraction is the control variable. The crate provides
//!
//! * closed-form expected payoffs and the replicator vector field
//!   ([`expected_payoffs`], [`vector_field`]), with a brute-force
//!   group-enumeration oracle for cross-checking,
//! * a fixed-step fourth-order integrator over time grids
//!   ([`integrate_forward`]),
//! * the cost functional combining terminal error, tracking error, control
//!   effort, and realized punishment ([`evaluate_cost`]),
//! * a forward-backward sweep solver and a projected gradient solver for
//!   the resulting optimal control problem ([`fbsm_solve`],
//!   [`projected_gradient_solve`]), plus a constant-control sweep
//!   ([`constant_sweep`]).

pub mod cost;
pub mod dynamics;
pub mod error;
pub mod grid;
pub mod integrate;
pub mod params;
pub mod payoff;
pub mod solver;
pub mod state;

pub use cost::{evaluate_cost, running_cost, CostBreakdown, CostWeights};
pub use dynamics::{
    control_sensitivity, critical_punishment, vector_field, vector_field_at, vector_field_jacobian,
};
pub use error::{Error, Result};
pub use grid::{ControlTrajectory, StateTrajectory, TimeGrid};
pub use integrate::{integrate_forward, integrate_forward_diag, rk4_step, StepDiagnostics};
pub use params::GameParams;
pub use payoff::{
    expected_payoff_bruteforce, expected_payoffs, group_payoff, helper_ab, PayoffVector, Strategy,
};
pub use solver::{
    constant_sweep, costate_rhs, costate_sweep, discrete_adjoint_gradient, fbsm_solve, hamiltonian,
    hamiltonian_v, pointwise_control_update, projected_gradient_solve, SolveReport, SolverConfig,
    SweepEntry, SweepResult,
};
pub use state::SimplexState;
