//! The model-order, convergence and data-ingestion experiments.

pub mod convergence;
pub mod ingest;
pub mod model_order;

pub use convergence::{loglinear_r2, run_convergence, run_solver, superlinear_tail, SolverKind, SolverRun};
pub use ingest::{ingest_and_report, HeldOutResult, IngestReport};
pub use model_order::{
    run_model_order, stationary_residual, ModelOrderCase, ModelOrderConfig, ModelRatios, RatioStat, Scenario,
};
