//! Desk-scale balancing-mechanism redispatch simulator.
//!
//! Builds and solves the pay-as-bid redispatch problem over a DC network with
//! optional grid storage, measures how storage changes balancing cost and
//! operational emissions, and values the storage asset by discounted cash flow
//! with revenue stacking across the balancing mechanism, the Capacity Market
//! and Dynamic Containment.

pub mod carbon;
pub mod dispatch;
pub mod lp;
pub mod model;
pub mod sweep;
pub mod valuation;

pub use carbon::{default_intensities, emission_delta, EmissionDelta, IntensityTable};
pub use dispatch::{
    bm_cost, build_dispatch_problem, k_fraction, solve_dispatch, storage_delta_run,
    audit, Audit, DispatchError, DispatchReport, DispatchSolution, StorageDelta,
};
pub use lp::{solve_lp, Constraint, LpError, LpProblem, LpSolution, LpStatus, Relation};
pub use model::{
    load_scenario, make_storage, BmUnit, FuelType, ModelError, Network, NodeId, Scenario,
    ScenarioPaths, StorageAsset, Tech,
};
pub use sweep::{emit_reports, run_sweep, SweepConfig, SweepError, SweepResult, SweepRow};
pub use valuation::{
    annual_cash_flow, capex_sensitivity, npv, residual_value, table2_defaults, NpvResult,
    RevenueInputs, TechEconomics,
};

/// Feasibility tolerance shared by the solver and every post-solve check.
pub const FEAS_TOL: f64 = 1e-7;
/// Reduced-cost optimality tolerance.
pub const OPT_TOL: f64 = 1e-9;
