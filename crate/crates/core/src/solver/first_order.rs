//! Line-search baselines: Riemannian steepest descent and nonlinear CG
//! (Polak–Ribière+ with transported directions).

use std::sync::Arc;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::manifold::{retract, vector_transport, ManifoldPoint, TangentVector};
use crate::sampled::SampledTensor;

use super::config::SolverConfig;
use super::cost::{CompletionCost, Evaluation};
use super::trace::{IterationRecord, SolverTrace, Termination};
use super::{prepare, SolverOutput};

/// Armijo sufficient-decrease constant.
pub const ARMIJO_C1: f64 = 1e-4;
pub const MAX_BACKTRACKS: usize = 60;

/// Minimizer `t*` of the quadratic `t ↦ f_μ(X + t η)` in the ambient space,
/// `−(⟨P_Ω η, P_Ω(X − A)⟩ + μ⟨X, η⟩) / (‖P_Ω η‖² + μ‖η‖²)`.
///
/// `None` if the quadratic has no positive curvature along `η`.
pub fn exact_line_search_step(eval: &Evaluation, eta: &TangentVector) -> Result<Option<f64>> {
    let res = eval.residual();
    let sampled = eta.sampled_entries(res)?;
    let mu = eval.cost().mu();
    let mut num: f64 = sampled.iter().zip(res.values()).map(|(a, b)| a * b).sum();
    let mut den: f64 = sampled.iter().map(|a| a * a).sum();
    if mu > 0.0 {
        num += mu * TangentVector::position(eval.point()).inner(eta);
        den += mu * eta.inner(eta);
    }
    Ok(if den > 0.0 { Some(-num / den) } else { None })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Direction {
    Steepest,
    PolakRibierePlus,
}

pub fn steepest_descent_solve(
    data: &SampledTensor,
    ranks: &[usize],
    config: &SolverConfig,
    x0: Option<Arc<ManifoldPoint>>,
) -> Result<SolverOutput> {
    line_search_solve(data, ranks, config, x0, Direction::Steepest)
}

pub fn nonlinear_cg_solve(
    data: &SampledTensor,
    ranks: &[usize],
    config: &SolverConfig,
    x0: Option<Arc<ManifoldPoint>>,
) -> Result<SolverOutput> {
    line_search_solve(data, ranks, config, x0, Direction::PolakRibierePlus)
}

fn line_search_solve(
    data: &SampledTensor,
    ranks: &[usize],
    config: &SolverConfig,
    x0: Option<Arc<ManifoldPoint>>,
    rule: Direction,
) -> Result<SolverOutput> {
    let (x0, _) = prepare(data, ranks, config, x0)?;
    let cost = CompletionCost::new(data.clone(), config.mu);
    let start = Instant::now();
    let mut eval = cost.evaluate(&x0)?;
    let g0 = eval.gradient.norm();
    let tol = config.stopping.grad_abs_tol.max(config.stopping.grad_rel_tol * g0);
    let mut dir = eval.gradient.scaled(-1.0);
    let mut records = Vec::new();

    let termination = loop {
        let k = records.len();
        let grad_norm = eval.gradient.norm();
        let mut rec = IterationRecord {
            iter: k,
            f: eval.value,
            grad_norm,
            grad_rel: if g0 > 0.0 { grad_norm / g0 } else { 1.0 },
            delta: None,
            rho: None,
            step_norm: None,
            accepted: false,
            inner_iters: 0,
            tcg_stop: None,
            wall_ms: 0.0,
        };
        if grad_norm <= tol || k >= config.stopping.max_outer_iters {
            rec.wall_ms = start.elapsed().as_secs_f64() * 1e3;
            records.push(rec);
            break if grad_norm <= tol {
                Termination::Converged
            } else {
                Termination::MaxIterations
            };
        }

        let mut slope = eval.gradient.inner(&dir);
        if slope >= 0.0 {
            dir = eval.gradient.scaled(-1.0);
            slope = -grad_norm * grad_norm;
        }
        let mut t = match exact_line_search_step(&eval, &dir) {
            Ok(Some(t)) if t > 0.0 && t.is_finite() => t,
            Ok(_) => 1.0 / dir.norm(),
            Err(e) => {
                records.push(rec);
                break Termination::Failed(e);
            }
        };

        let mut next = None;
        for backtracks in 0..MAX_BACKTRACKS {
            let trial = retract(eval.point(), &dir.scaled(t)).and_then(|y| cost.evaluate(&y));
            if let Ok(trial) = trial {
                if trial.value <= eval.value + ARMIJO_C1 * t * slope {
                    rec.inner_iters = backtracks;
                    next = Some(trial);
                    break;
                }
            }
            t *= 0.5;
        }
        let Some(next) = next else {
            records.push(rec);
            break Termination::Failed(Error::LineSearchFailure);
        };
        rec.step_norm = Some(t * dir.norm());
        rec.accepted = true;
        rec.wall_ms = start.elapsed().as_secs_f64() * 1e3;
        records.push(rec);

        let new_dir = match rule {
            Direction::Steepest => next.gradient.scaled(-1.0),
            Direction::PolakRibierePlus => {
                let y = next.point();
                let moved = vector_transport(&eval.gradient, y)
                    .and_then(|g| Ok((g, vector_transport(&dir, y)?)));
                let (old_grad, old_dir) = match moved {
                    Ok(v) => v,
                    Err(e) => break Termination::Failed(e),
                };
                let g = &next.gradient;
                let beta = (g.inner(g) - g.inner(&old_grad)) / (grad_norm * grad_norm);
                let mut d = g.scaled(-1.0);
                d.axpy(beta.max(0.0), &old_dir);
                d
            }
        };
        dir = new_dir;
        eval = next;
    };

    Ok(SolverOutput {
        point: Arc::clone(eval.point()),
        trace: SolverTrace {
            records,
            termination,
        },
    })
}
