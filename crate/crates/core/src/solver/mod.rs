//! Trust-region and line-search solvers for `min_{X ∈ M_r} f_μ(X)`.

mod config;
mod cost;
mod first_order;
mod model;
mod tcg;
mod trace;
mod trust_region;

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::manifold::ManifoldPoint;
use crate::sampled::SampledTensor;
use crate::tucker::{manifold_dimension, TuckerTensor};

pub use config::{HessianModel, SolverConfig, StoppingConfig, TcgConfig};
pub use cost::{CompletionCost, Evaluation};
pub use first_order::{
    exact_line_search_step, nonlinear_cg_solve, steepest_descent_solve, ARMIJO_C1, MAX_BACKTRACKS,
};
pub use model::{model_error, model_eval, ModelCoefficients, ModelContext, ModelKind};
pub use tcg::{tcg_solve, InnerProductSpace, TcgOutput};
pub use trace::{IterationRecord, SolverTrace, TcgStop, Termination};
pub use trust_region::{trust_region_solve, PREDICTED_DECREASE_FLOOR};

#[derive(Debug, Clone)]
pub struct SolverOutput {
    pub point: Arc<ManifoldPoint>,
    pub trace: SolverTrace,
}

/// Random initial guess: uniform `(0,1)` core and factors, orthonormalized.
pub fn random_initial_point(dims: &[usize], ranks: &[usize], seed: u64) -> Result<Arc<ManifoldPoint>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(ManifoldPoint::new(TuckerTensor::random(dims, ranks, &mut rng)?)?.into_shared())
}

/// Validates inputs and returns the initial point and `dim(M_r)`.
fn prepare(
    data: &SampledTensor,
    ranks: &[usize],
    config: &SolverConfig,
    x0: Option<Arc<ManifoldPoint>>,
) -> Result<(Arc<ManifoldPoint>, usize)> {
    if ranks.len() != data.order() {
        return Err(Error::DimensionMismatch(format!(
            "rank {:?} for an order-{} tensor",
            ranks,
            data.order()
        )));
    }
    let dim = manifold_dimension(data.dims(), ranks);
    config.validate(dim)?;
    let x0 = match x0 {
        Some(x) => {
            if x.dims() != data.dims() || x.ranks() != ranks {
                return Err(Error::DimensionMismatch(format!(
                    "initial point of dims {:?} and rank {:?}, expected {:?} and {:?}",
                    x.dims(),
                    x.ranks(),
                    data.dims(),
                    ranks
                )));
            }
            x
        }
        None => random_initial_point(data.dims(), ranks, config.rng_seed)?,
    };
    if data.len() < dim {
        log::warn!(
            "{} samples for a manifold of dimension {}; minimizers may be nonregular",
            data.len(),
            dim
        );
    }
    Ok((x0, dim))
}
