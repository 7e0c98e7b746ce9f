use crate::error::{Error, Result};
use crate::manifold::DEFAULT_FD_STEP;

/// Second-order model used inside the trust-region subproblem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HessianModel {
    Exact,
    GaussNewton,
    /// Difference quotient of transported gradients; not linear in general.
    FiniteDifference,
}

impl HessianModel {
    pub fn name(self) -> &'static str {
        match self {
            Self::Exact => "exact",
            Self::GaussNewton => "gn",
            Self::FiniteDifference => "fd",
        }
    }
}

/// Truncated CG parameters. The inner iteration stops once
/// `‖r_j‖ ≤ ‖r_0‖ min(κ, ‖r_0‖^θ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TcgConfig {
    pub kappa: f64,
    pub theta: f64,
    /// `None` means `min(100, dim(M_r))`.
    pub max_iters: Option<usize>,
}

impl Default for TcgConfig {
    fn default() -> Self {
        Self {
            kappa: 0.1,
            theta: 1.0,
            max_iters: None,
        }
    }
}

impl TcgConfig {
    pub fn max_iters_for(&self, dimension: usize) -> usize {
        self.max_iters.unwrap_or_else(|| dimension.min(100)).max(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StoppingConfig {
    pub grad_rel_tol: f64,
    pub grad_abs_tol: f64,
    pub max_outer_iters: usize,
    /// `Δ_min = delta_min_factor · Δ̄`.
    pub delta_min_factor: f64,
}

impl Default for StoppingConfig {
    fn default() -> Self {
        Self {
            grad_rel_tol: 1e-12,
            grad_abs_tol: 0.0,
            max_outer_iters: 500,
            delta_min_factor: 1e-14,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub hessian_model: HessianModel,
    /// Maximal radius `Δ̄`; `None` means `dim(M_r)`.
    pub delta_bar: Option<f64>,
    /// Initial radius; `None` means `Δ̄ / 8`.
    pub delta0: Option<f64>,
    /// Acceptance threshold `ρ'`.
    pub rho_prime: f64,
    pub tcg: TcgConfig,
    pub stopping: StoppingConfig,
    /// Weight of the `(μ/2)‖X‖²` regularization.
    pub mu: f64,
    /// Seed of the random initial guess when none is supplied.
    pub rng_seed: u64,
    pub fd_step: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            hessian_model: HessianModel::Exact,
            delta_bar: None,
            delta0: None,
            rho_prime: 0.1,
            tcg: TcgConfig::default(),
            stopping: StoppingConfig::default(),
            mu: 0.0,
            rng_seed: 0,
            fd_step: DEFAULT_FD_STEP,
        }
    }
}

impl SolverConfig {
    pub fn with_hessian(mut self, model: HessianModel) -> Self {
        self.hessian_model = model;
        self
    }

    /// `(Δ̄, Δ_0)` for a manifold of the given dimension.
    pub fn radii(&self, dimension: usize) -> (f64, f64) {
        let bar = self.delta_bar.unwrap_or(dimension as f64);
        (bar, self.delta0.unwrap_or(bar / 8.0))
    }

    pub fn validate(&self, dimension: usize) -> Result<()> {
        let (bar, d0) = self.radii(dimension);
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(bar > 0.0 && bar.is_finite()) {
            return bad(format!("maximal radius {bar} must be positive"));
        }
        if !(d0 > 0.0 && d0 < bar) {
            return bad(format!("initial radius {d0} must lie in (0, {bar})"));
        }
        if !(self.rho_prime > 0.0 && self.rho_prime < 0.25) {
            return bad(format!("acceptance threshold {} must lie in (0, 1/4)", self.rho_prime));
        }
        if !(self.tcg.kappa > 0.0 && self.tcg.kappa < 1.0) || !(self.tcg.theta > 0.0) {
            return bad("tCG requires κ ∈ (0,1) and θ > 0".into());
        }
        if !(self.mu >= 0.0 && self.mu.is_finite()) {
            return bad(format!("regularization weight {} must be nonnegative", self.mu));
        }
        if !(self.fd_step > 0.0) {
            return bad(format!("finite-difference step {} must be positive", self.fd_step));
        }
        let s = &self.stopping;
        if !(s.grad_rel_tol >= 0.0 && s.grad_abs_tol >= 0.0 && s.delta_min_factor >= 0.0) {
            return bad("stopping tolerances must be nonnegative".into());
        }
        Ok(())
    }
}
