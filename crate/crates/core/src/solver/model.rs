//! Local models of the pulled-back cost `f̂_X(ξ) = f(R_X(ξ))` and their
//! errors `e(ξ, h) = |f̂_X(hξ) − m_X(hξ)|`.

use std::fmt;
use std::sync::Arc;

use crate::error::Result;
use crate::manifold::{retract, ManifoldPoint, TangentVector};
use crate::sampled::SampledTensor;

use super::config::HessianModel;
use super::cost::{CompletionCost, Evaluation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    /// `f + ⟨grad, ξ⟩`.
    SteepestDescent,
    /// `f + ⟨grad, ξ⟩ + ½⟨Hess[ξ], ξ⟩`.
    Newton,
    /// `f + ⟨grad, ξ⟩ + ½⟨P_Ω ξ, ξ⟩`.
    GaussNewton,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [Self::SteepestDescent, Self::Newton, Self::GaussNewton];

    pub fn name(self) -> &'static str {
        match self {
            Self::SteepestDescent => "SD",
            Self::Newton => "N",
            Self::GaussNewton => "GN",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Model coefficients along one direction: `m(hξ) = f + h·slope + ½h²·curv`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelCoefficients {
    pub value: f64,
    pub slope: f64,
    pub curvature: f64,
}

impl ModelCoefficients {
    pub fn at(&self, h: f64) -> f64 {
        self.value + h * self.slope + 0.5 * h * h * self.curvature
    }
}

/// Models at a fixed point, reusing the residual and gradient.
#[derive(Debug, Clone)]
pub struct ModelContext {
    eval: Evaluation,
}

impl ModelContext {
    pub fn new(x: &Arc<ManifoldPoint>, data: &SampledTensor) -> Result<Self> {
        Ok(Self {
            eval: CompletionCost::new(data.clone(), 0.0).evaluate(x)?,
        })
    }

    pub fn evaluation(&self) -> &Evaluation {
        &self.eval
    }

    pub fn value(&self) -> f64 {
        self.eval.value
    }

    pub fn gradient(&self) -> &TangentVector {
        &self.eval.gradient
    }

    pub fn coefficients(&self, kind: ModelKind, xi: &TangentVector) -> Result<ModelCoefficients> {
        let curvature = match kind {
            ModelKind::SteepestDescent => 0.0,
            ModelKind::Newton => self.eval.hessian(HessianModel::Exact, xi, 0.0)?.inner(xi),
            ModelKind::GaussNewton => self.eval.hessian(HessianModel::GaussNewton, xi, 0.0)?.inner(xi),
        };
        Ok(ModelCoefficients {
            value: self.eval.value,
            slope: self.eval.gradient.inner(xi),
            curvature,
        })
    }

    pub fn eval(&self, kind: ModelKind, xi: &TangentVector) -> Result<f64> {
        Ok(self.coefficients(kind, xi)?.at(1.0))
    }

    /// `f(R_X(hξ))`.
    pub fn pullback(&self, xi: &TangentVector, h: f64) -> Result<f64> {
        if h == 0.0 {
            return Ok(self.eval.value);
        }
        let y = retract(self.eval.point(), &xi.scaled(h))?;
        self.eval.cost().value(&y)
    }

    /// `e(ξ, h)` for each `h`, for every kind in `kinds`; the pullback is
    /// evaluated once per `h`. Rows follow `kinds`.
    pub fn error_sweep(&self, kinds: &[ModelKind], xi: &TangentVector, hs: &[f64]) -> Result<Vec<Vec<f64>>> {
        let coeffs = kinds
            .iter()
            .map(|&k| self.coefficients(k, xi))
            .collect::<Result<Vec<_>>>()?;
        let mut out = vec![Vec::with_capacity(hs.len()); kinds.len()];
        for &h in hs {
            let f = self.pullback(xi, h)?;
            for (row, c) in out.iter_mut().zip(&coeffs) {
                row.push((f - c.at(h)).abs());
            }
        }
        Ok(out)
    }
}

pub fn model_eval(kind: ModelKind, x: &Arc<ManifoldPoint>, data: &SampledTensor, xi: &TangentVector) -> Result<f64> {
    ModelContext::new(x, data)?.eval(kind, xi)
}

pub fn model_error(
    kind: ModelKind,
    x: &Arc<ManifoldPoint>,
    data: &SampledTensor,
    xi: &TangentVector,
    h: f64,
) -> Result<f64> {
    let ctx = ModelContext::new(x, data)?;
    Ok(ctx.error_sweep(&[kind], xi, &[h])?[0][0])
}
