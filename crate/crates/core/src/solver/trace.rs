use std::fmt;

use crate::error::Error;

/// Why the truncated CG iteration returned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TcgStop {
    ResidualTolerance,
    NegativeCurvature,
    Boundary,
    MaxIterations,
}

impl fmt::Display for TcgStop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::ResidualTolerance => "residual_tol",
            Self::NegativeCurvature => "negative_curvature",
            Self::Boundary => "boundary",
            Self::MaxIterations => "max_iters",
        })
    }
}

/// State at the start of outer iteration `iter` and the step attempted from
/// it. The last record of a trace carries the final state and no step.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub iter: usize,
    pub f: f64,
    pub grad_norm: f64,
    /// `‖grad f(X_k)‖ / ‖grad f(X_0)‖` (1 if the initial gradient vanishes).
    pub grad_rel: f64,
    /// Trust-region radius; `None` for line-search methods.
    pub delta: Option<f64>,
    pub rho: Option<f64>,
    pub step_norm: Option<f64>,
    pub accepted: bool,
    /// tCG iterations, or backtracking steps for line-search methods.
    pub inner_iters: usize,
    pub tcg_stop: Option<TcgStop>,
    /// Milliseconds since the solver started.
    pub wall_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Termination {
    Converged,
    MaxIterations,
    RadiusCollapsed,
    Failed(Error),
}

impl Termination {
    pub fn is_failure(&self) -> bool {
        matches!(self, Self::Failed(_))
    }
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Converged => f.write_str("converged"),
            Self::MaxIterations => f.write_str("max_iters"),
            Self::RadiusCollapsed => f.write_str("radius_collapsed"),
            Self::Failed(e) => write!(f, "failed: {e}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverTrace {
    pub records: Vec<IterationRecord>,
    pub termination: Termination,
}

impl SolverTrace {
    /// Number of outer iterations performed (records minus the final state).
    pub fn iterations(&self) -> usize {
        self.records.len().saturating_sub(1)
    }

    pub fn accepted_steps(&self) -> usize {
        self.records.iter().filter(|r| r.accepted).count()
    }

    pub fn final_record(&self) -> &IterationRecord {
        self.records.last().expect("trace holds the initial state")
    }

    /// First iteration whose relative gradient is at most `tol`.
    pub fn iterations_to(&self, tol: f64) -> Option<usize> {
        self.records.iter().find(|r| r.grad_rel <= tol).map(|r| r.iter)
    }

    /// Relative gradient norms of the distinct iterates (initial state and
    /// the state after every accepted step).
    pub fn accepted_grad_rel(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let mut take = true;
        for r in &self.records {
            if take {
                out.push(r.grad_rel);
            }
            take = r.accepted;
        }
        out
    }
}
