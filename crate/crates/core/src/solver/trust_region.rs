use std::sync::Arc;
use std::time::Instant;

use crate::error::Result;
use crate::manifold::{retract, ManifoldPoint};
use crate::sampled::SampledTensor;

use super::config::SolverConfig;
use super::cost::CompletionCost;
use super::tcg::tcg_solve;
use super::trace::{IterationRecord, SolverTrace, Termination};
use super::{prepare, SolverOutput};

/// Steps whose predicted decrease is below this fraction of `|f|` are
/// rejected; the quotient ρ is meaningless there.
pub const PREDICTED_DECREASE_FLOOR: f64 = 1e-15;

/// Riemannian trust-region method with truncated-CG inner solves.
///
/// The radius update and acceptance test are the classical ones:
/// `Δ ← Δ/4` if `ρ < ¼`, `Δ ← min(2Δ, Δ̄)` if `ρ > ¾` and the step reached
/// the boundary, and `X ← R_X(η)` iff `ρ > ρ'`.
pub fn trust_region_solve(
    data: &SampledTensor,
    ranks: &[usize],
    config: &SolverConfig,
    x0: Option<Arc<ManifoldPoint>>,
) -> Result<SolverOutput> {
    let (x0, dim) = prepare(data, ranks, config, x0)?;
    let (delta_bar, mut delta) = config.radii(dim);
    let delta_min = config.stopping.delta_min_factor * delta_bar;
    let max_inner = config.tcg.max_iters_for(dim);
    let cost = CompletionCost::new(data.clone(), config.mu);
    let start = Instant::now();

    let mut eval = cost.evaluate(&x0)?;
    let g0 = eval.gradient.norm();
    let tol = config.stopping.grad_abs_tol.max(config.stopping.grad_rel_tol * g0);
    let mut records = Vec::new();

    let termination = loop {
        let k = records.len();
        let grad_norm = eval.gradient.norm();
        let mut rec = IterationRecord {
            iter: k,
            f: eval.value,
            grad_norm,
            grad_rel: if g0 > 0.0 { grad_norm / g0 } else { 1.0 },
            delta: Some(delta),
            rho: None,
            step_norm: None,
            accepted: false,
            inner_iters: 0,
            tcg_stop: None,
            wall_ms: 0.0,
        };
        let stop = if grad_norm <= tol {
            Some(Termination::Converged)
        } else if k >= config.stopping.max_outer_iters {
            Some(Termination::MaxIterations)
        } else if delta < delta_min {
            Some(Termination::RadiusCollapsed)
        } else {
            None
        };
        if let Some(t) = stop {
            rec.wall_ms = start.elapsed().as_secs_f64() * 1e3;
            records.push(rec);
            break t;
        }

        let step = tcg_solve(
            &eval.gradient,
            |v| eval.hessian(config.hessian_model, v, config.fd_step),
            delta,
            &config.tcg,
            max_inner,
        );
        let step = match step {
            Ok(s) => s,
            Err(e) => {
                records.push(rec);
                break Termination::Failed(e);
            }
        };
        rec.inner_iters = step.iterations;
        rec.tcg_stop = Some(step.stop);
        let step_norm = step.eta.norm();
        rec.step_norm = Some(step_norm);
        let predicted = -step.model_change(&eval.gradient);

        if !(predicted > PREDICTED_DECREASE_FLOOR * eval.value.abs()) {
            log::debug!("iteration {k}: predicted decrease {predicted:e} too small, shrinking radius");
            delta /= 4.0;
            rec.wall_ms = start.elapsed().as_secs_f64() * 1e3;
            records.push(rec);
            continue;
        }

        let trial = match retract(eval.point(), &step.eta).and_then(|y| cost.evaluate(&y)) {
            Ok(t) => t,
            Err(e) => {
                records.push(rec);
                break Termination::Failed(e);
            }
        };
        let rho = (eval.value - trial.value) / predicted;
        rec.rho = Some(rho);
        if rho < 0.25 {
            delta /= 4.0;
        } else if rho > 0.75 && step_norm >= delta * (1.0 - 1e-10) {
            delta = (2.0 * delta).min(delta_bar);
        }
        if rho > config.rho_prime {
            rec.accepted = true;
            eval = trial;
        }
        rec.wall_ms = start.elapsed().as_secs_f64() * 1e3;
        log::debug!(
            "iteration {k}: f = {:e}, |grad| = {:e}, rho = {rho:.3}, inner = {} ({})",
            rec.f,
            rec.grad_norm,
            rec.inner_iters,
            step.stop
        );
        records.push(rec);
    };

    Ok(SolverOutput {
        point: Arc::clone(eval.point()),
        trace: SolverTrace {
            records,
            termination,
        },
    })
}
