//! Several solvers on one instance from one initial guess.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use tucker_rtr::solver::{nonlinear_cg_solve, steepest_descent_solve, trust_region_solve};
use tucker_rtr::{HessianModel, SolverConfig, SolverOutput, SolverTrace};

use crate::problem::Problem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolverKind {
    TrustRegion(HessianModel),
    NonlinearCg,
    SteepestDescent,
}

impl SolverKind {
    pub const ALL: [SolverKind; 5] = [
        Self::TrustRegion(HessianModel::Exact),
        Self::TrustRegion(HessianModel::GaussNewton),
        Self::TrustRegion(HessianModel::FiniteDifference),
        Self::NonlinearCg,
        Self::SteepestDescent,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Self::TrustRegion(HessianModel::Exact) => "rtr-exact",
            Self::TrustRegion(HessianModel::GaussNewton) => "rtr-gn",
            Self::TrustRegion(HessianModel::FiniteDifference) => "rtr-fd",
            Self::NonlinearCg => "rcg",
            Self::SteepestDescent => "sd",
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for SolverKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|k| k.label() == s)
            .ok_or_else(|| format!("unknown solver `{s}`"))
    }
}

#[derive(Debug)]
pub struct SolverRun {
    pub kind: SolverKind,
    pub outcome: tucker_rtr::Result<SolverOutput>,
    pub elapsed: Duration,
}

pub fn run_solver(
    kind: SolverKind,
    problem: &Problem,
    ranks: &[usize],
    config: &SolverConfig,
) -> tucker_rtr::Result<SolverOutput> {
    let x0 = Some(problem.x0.clone());
    match kind {
        SolverKind::TrustRegion(model) => {
            trust_region_solve(&problem.data, ranks, &config.clone().with_hessian(model), x0)
        }
        SolverKind::NonlinearCg => nonlinear_cg_solve(&problem.data, ranks, config, x0),
        SolverKind::SteepestDescent => steepest_descent_solve(&problem.data, ranks, config, x0),
    }
}

/// Runs every solver in its own thread. Errors are kept per run.
pub fn run_convergence(
    problem: &Problem,
    ranks: &[usize],
    solvers: &[SolverKind],
    config: &SolverConfig,
) -> Vec<SolverRun> {
    std::thread::scope(|s| {
        let handles: Vec<_> = solvers
            .iter()
            .map(|&kind| {
                s.spawn(move || {
                    let start = Instant::now();
                    let outcome = run_solver(kind, problem, ranks, config);
                    SolverRun {
                        kind,
                        outcome,
                        elapsed: start.elapsed(),
                    }
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("solver thread panicked"))
            .collect()
    })
}

/// Relative gradient norms of the accepted iterates, cut after the first
/// one at or below `tol`.
fn accepted_until(trace: &SolverTrace, tol: f64) -> Vec<f64> {
    let mut g = trace.accepted_grad_rel();
    if let Some(k) = g.iter().position(|&v| v <= tol) {
        g.truncate(k + 1);
    }
    g
}

/// Whether the last three contraction factors `g_{k+1}/g_k` of the accepted
/// gradient norms (up to `tol`) are strictly decreasing.
pub fn superlinear_tail(trace: &SolverTrace, tol: f64) -> bool {
    let g = accepted_until(trace, tol);
    if g.len() < 4 {
        return false;
    }
    let q: Vec<f64> = g[g.len() - 4..].windows(2).map(|w| w[1] / w[0]).collect();
    q[1] < q[0] && q[2] < q[1]
}

/// Coefficient of determination of a least-squares line through
/// `(k, log10 grad_rel_k)` over all records up to the first reaching `tol`.
pub fn loglinear_r2(trace: &SolverTrace, tol: f64) -> f64 {
    let mut pts: Vec<(f64, f64)> = Vec::new();
    for r in &trace.records {
        pts.push((r.iter as f64, r.grad_rel.log10()));
        if r.grad_rel <= tol {
            break;
        }
    }
    let n = pts.len() as f64;
    if pts.len() < 3 {
        return f64::NAN;
    }
    let (mx, my) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x / n, b + y / n));
    let (sxx, sxy, syy) = pts.iter().fold((0.0, 0.0, 0.0), |(a, b, c), (x, y)| {
        (a + (x - mx).powi(2), b + (x - mx) * (y - my), c + (y - my).powi(2))
    });
    if syy == 0.0 {
        return 1.0;
    }
    sxy * sxy / (sxx * syy)
}
