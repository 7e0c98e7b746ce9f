use std::sync::Arc;

use crate::error::Result;
use crate::manifold::{
    project_to_tangent, residual, retract, HessianContext, ManifoldPoint, TangentVector,
};
use crate::sampled::SampledTensor;

use super::config::HessianModel;

/// `f_μ(X) = ½‖P_Ω X − P_Ω A‖² + (μ/2)‖X‖²`.
#[derive(Debug, Clone)]
pub struct CompletionCost {
    data: SampledTensor,
    mu: f64,
}

impl CompletionCost {
    pub fn new(data: SampledTensor, mu: f64) -> Self {
        Self { data, mu }
    }

    pub fn data(&self) -> &SampledTensor {
        &self.data
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn value(&self, x: &ManifoldPoint) -> Result<f64> {
        let r = residual(x, &self.data)?;
        Ok(self.value_from_residual(x, &r))
    }

    fn value_from_residual(&self, x: &ManifoldPoint, r: &SampledTensor) -> f64 {
        let mut f = 0.5 * r.norm().powi(2);
        if self.mu > 0.0 {
            // ‖X‖ = ‖C‖ for orthonormal factors
            f += 0.5 * self.mu * x.core().norm().powi(2);
        }
        f
    }

    pub fn gradient(&self, x: &Arc<ManifoldPoint>) -> Result<TangentVector> {
        Ok(self.evaluate(x)?.gradient)
    }

    pub fn evaluate(&self, x: &Arc<ManifoldPoint>) -> Result<Evaluation> {
        let ctx = HessianContext::new(x, &self.data)?;
        let value = self.value_from_residual(x, ctx.residual());
        let mut gradient = ctx.gradient().clone();
        if self.mu > 0.0 {
            gradient.axpy(self.mu, &TangentVector::position(x));
        }
        Ok(Evaluation {
            cost: self.clone(),
            value,
            gradient,
            ctx,
        })
    }
}

/// Cost, gradient and Hessian data at one iterate.
#[derive(Debug, Clone)]
pub struct Evaluation {
    cost: CompletionCost,
    pub value: f64,
    pub gradient: TangentVector,
    ctx: HessianContext,
}

impl Evaluation {
    pub fn point(&self) -> &Arc<ManifoldPoint> {
        self.ctx.point()
    }

    pub fn residual(&self) -> &SampledTensor {
        self.ctx.residual()
    }

    pub fn cost(&self) -> &CompletionCost {
        &self.cost
    }

    /// Applies the chosen Hessian model; `fd_step` is only used by
    /// [`HessianModel::FiniteDifference`].
    pub fn hessian(&self, model: HessianModel, xi: &TangentVector, fd_step: f64) -> Result<TangentVector> {
        let mu = self.cost.mu;
        let mut h = match model {
            HessianModel::Exact => self.ctx.exact(xi)?,
            HessianModel::GaussNewton => self.ctx.gauss_newton(xi)?,
            HessianModel::FiniteDifference => return self.hessian_fd(xi, fd_step),
        };
        if mu > 0.0 {
            h.axpy(mu, xi);
        }
        Ok(h)
    }

    /// Curvature part of the exact Hessian (the regularization adds none).
    pub fn curvature(&self, xi: &TangentVector) -> Result<TangentVector> {
        self.ctx.curvature(xi)
    }

    fn hessian_fd(&self, xi: &TangentVector, h: f64) -> Result<TangentVector> {
        let norm = xi.norm();
        let x = self.point();
        if norm == 0.0 {
            return Ok(TangentVector::zero(x));
        }
        let y = retract(x, &xi.scaled(h / norm))?;
        let gy = self.cost.gradient(&y)?;
        let mut d = project_to_tangent(x, &gy)?;
        d.axpy(-1.0, &self.gradient);
        d.scale(norm / h);
        Ok(d)
    }
}
