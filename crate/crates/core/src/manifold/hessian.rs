//! Riemannian Hessian of the completion cost and its approximations.
//!
//! For `f(X) = ½‖P_Ω X − P_Ω A‖²` with Euclidean gradient `E = P_Ω(X − A)`,
//!
//! ```text
//! Hess f(X)[ξ] = P_X(P_Ω ξ) + P_X(D P_X(ξ)[E]).
//! ```
//!
//! The second (curvature) term is evaluated in closed form through
//! contractions of `E − P_X E`, so the exact Hessian costs the same order as
//! the gradient. [`weingarten_dproj`] is the plain dense differential of the
//! projector, kept as a reference.

use std::sync::Arc;

use nalgebra::DMatrix;

use super::{project_to_tangent, residual, retract, riemannian_gradient, ManifoldPoint, TangentVector};
use crate::contract::{Contract, ModeOp};
use crate::error::Result;
use crate::linalg;
use crate::sampled::SampledTensor;
use crate::tensor::DenseTensor;

/// Finite-difference step `√ε` of the difference-quotient Hessian.
pub const DEFAULT_FD_STEP: f64 = 1.490_116_119_384_765_6e-8;

/// Dense directional derivative `D P_X(ξ)[E]` of the tangent projector.
///
/// Ambient-size work; used to validate [`curvature_term`].
pub fn weingarten_dproj(x: &ManifoldPoint, xi: &TangentVector, e: &DenseTensor) -> Result<DenseTensor> {
    let d = x.order();
    let projs: Vec<DMatrix<f64>> = x.factors().iter().map(|u| u * u.transpose()).collect();
    let dprojs: Vec<DMatrix<f64>> = (0..d)
        .map(|i| {
            let m = xi.factor_dot(i) * x.factor(i).transpose();
            &m + m.transpose()
        })
        .collect();
    // G ×_i M ⨉_{k≠i} U_k, optionally with U̇_l in mode l
    let embed = |g: &DenseTensor, i: usize, m: &DMatrix<f64>, swap: Option<usize>| {
        let mats: Vec<Option<&DMatrix<f64>>> = (0..d)
            .map(|k| {
                Some(if k == i {
                    m
                } else if Some(k) == swap {
                    xi.factor_dot(k)
                } else {
                    x.factor(k)
                })
            })
            .collect();
        g.multi_mode_product(&mats)
    };

    let mut out = DenseTensor::zeros(x.dims())?;
    for i in 0..d {
        let mats: Vec<Option<&DMatrix<f64>>> = (0..d)
            .map(|j| Some(if j == i { &dprojs[i] } else { &projs[j] }))
            .collect();
        out.axpy(1.0, &e.multi_mode_product(&mats)?)?;

        let u = x.factor(i);
        let cp = x.core_pinv(i);
        let c_i = x.core_matricization(i);
        let cdot_i = xi.core_dot().matricize(i)?;
        let y = e.contract(&x.ops(Some(i), None))?.matricize(i)?;
        let py_cp = linalg::project_out(u, &(&y * cp));

        out.axpy(1.0, &embed(xi.core_dot(), i, &py_cp, None)?)?;
        out.axpy(-1.0, &embed(x.core(), i, &(&dprojs[i] * &y * cp), None)?)?;
        for l in (0..d).filter(|&l| l != i) {
            let ydot = e
                .contract(&x.ops(Some(i), Some((l, xi.factor_dot(l)))))?
                .matricize(i)?;
            out.axpy(1.0, &embed(x.core(), i, &linalg::project_out(u, &(ydot * cp)), None)?)?;
            out.axpy(1.0, &embed(x.core(), i, &py_cp, Some(l))?)?;
        }
        let m = cp.nrows();
        let dpinv = (DMatrix::identity(m, m) - cp * c_i) * cdot_i.transpose() * cp.transpose() * cp
            - cp * &cdot_i * cp;
        out.axpy(1.0, &embed(x.core(), i, &linalg::project_out(u, &(&y * dpinv)), None)?)?;
    }
    Ok(out)
}

/// `P_X(D P_X(ξ)[E])` for an ambient tensor `E` accessed through
/// contractions only.
pub fn curvature_term<E: Contract + ?Sized>(
    x: &Arc<ManifoldPoint>,
    xi: &TangentVector,
    e: &E,
) -> Result<TangentVector> {
    let pe = project_to_tangent(x, e)?;
    curvature_term_with_projection(x, xi, e, &pe)
}

/// As [`curvature_term`], reusing a precomputed `P_X E`.
///
/// With `E' = E − P_X E`, `Y'_i = [E' ⨉_{j≠i} U_jᵀ]_(i)` and
/// `Z_{k,i} = [E' ×_k U̇_kᵀ ⨉_{j≠i,k} U_jᵀ]_(i)`:
///
/// ```text
/// C̃   = Σ_j E' ×_j U̇_jᵀ ⨉_{k≠j} U_kᵀ − Σ_j C ×_j (U̇_jᵀ Y'_j C_(j)⁺)
/// Ũ_i = P⊥_{U_i} (Y'_i Ċ_(i)ᵀ C_(i)⁺ᵀ − Y'_i C_(i)⁺ C_(i) Ċ_(i)ᵀ C_(i)⁺ᵀ + Σ_{k≠i} Z_{k,i}) C_(i)⁺
/// ```
pub fn curvature_term_with_projection<E: Contract + ?Sized>(
    x: &Arc<ManifoldPoint>,
    xi: &TangentVector,
    e: &E,
    pe: &TangentVector,
) -> Result<TangentVector> {
    let d = x.order();
    let perp = |ops: &[ModeOp<'_>]| -> Result<DenseTensor> {
        let mut t = e.contract(ops)?;
        t.axpy(-1.0, &pe.contract(ops)?)?;
        Ok(t)
    };

    let mut core_dot = DenseTensor::zeros(x.ranks())?;
    let mut ys = Vec::with_capacity(d);
    for j in 0..d {
        core_dot.axpy(1.0, &perp(&x.ops(None, Some((j, xi.factor_dot(j)))))?)?;
        ys.push(perp(&x.ops(Some(j), None))?.matricize(j)?);
    }
    for (j, y) in ys.iter().enumerate() {
        let m = xi.factor_dot(j).transpose() * y * x.core_pinv(j);
        core_dot.axpy(-1.0, &x.core().mode_product(&m, j)?)?;
    }

    let mut factor_dots = Vec::with_capacity(d);
    for (i, y) in ys.iter().enumerate() {
        let cp = x.core_pinv(i);
        let lhs = xi.core_dot().matricize(i)?.transpose() * cp.transpose();
        let mut g = y * &lhs - (y * cp) * (x.core_matricization(i) * &lhs);
        for k in (0..d).filter(|&k| k != i) {
            g += perp(&x.ops(Some(i), Some((k, xi.factor_dot(k)))))?.matricize(i)?;
        }
        factor_dots.push(linalg::project_out(x.factor(i), &(g * cp)));
    }
    Ok(TangentVector::new_unchecked(Arc::clone(x), core_dot, factor_dots))
}

/// Data reused by every Hessian application at a fixed iterate: the sparse
/// residual `E = P_Ω(X − A)` and the gradient `P_X E`.
#[derive(Debug, Clone)]
pub struct HessianContext {
    point: Arc<ManifoldPoint>,
    data: SampledTensor,
    residual: SampledTensor,
    gradient: TangentVector,
}

impl HessianContext {
    pub fn new(point: &Arc<ManifoldPoint>, data: &SampledTensor) -> Result<Self> {
        let residual = residual(point, data)?;
        let gradient = project_to_tangent(point, &residual)?;
        Ok(Self {
            point: Arc::clone(point),
            data: data.clone(),
            residual,
            gradient,
        })
    }

    pub fn point(&self) -> &Arc<ManifoldPoint> {
        &self.point
    }

    pub fn residual(&self) -> &SampledTensor {
        &self.residual
    }

    pub fn gradient(&self) -> &TangentVector {
        &self.gradient
    }

    /// `P_X(P_Ω ξ)`.
    pub fn gauss_newton(&self, xi: &TangentVector) -> Result<TangentVector> {
        project_to_tangent(&self.point, &xi.sample(&self.residual)?)
    }

    pub fn curvature(&self, xi: &TangentVector) -> Result<TangentVector> {
        curvature_term_with_projection(&self.point, xi, &self.residual, &self.gradient)
    }

    pub fn exact(&self, xi: &TangentVector) -> Result<TangentVector> {
        let mut h = self.gauss_newton(xi)?;
        h.axpy(1.0, &self.curvature(xi)?);
        Ok(h)
    }

    /// `‖ξ‖/h · (P_X grad f(R_X(h ξ/‖ξ‖)) − grad f(X))`.
    pub fn finite_difference(&self, xi: &TangentVector, h: f64) -> Result<TangentVector> {
        let norm = xi.norm();
        if norm == 0.0 {
            return Ok(TangentVector::zero(&self.point));
        }
        let y = retract(&self.point, &xi.scaled(h / norm))?;
        let gy = riemannian_gradient(&y, &self.data)?;
        let mut diff = project_to_tangent(&self.point, &gy)?;
        diff.axpy(-1.0, &self.gradient);
        diff.scale(norm / h);
        Ok(diff)
    }
}

pub fn hessian_exact(x: &Arc<ManifoldPoint>, data: &SampledTensor, xi: &TangentVector) -> Result<TangentVector> {
    HessianContext::new(x, data)?.exact(xi)
}

/// Only the support of `data` enters the Gauss–Newton operator.
pub fn hessian_gauss_newton(
    x: &Arc<ManifoldPoint>,
    data: &SampledTensor,
    xi: &TangentVector,
) -> Result<TangentVector> {
    project_to_tangent(x, &xi.sample(data)?)
}

pub fn hessian_fd(
    x: &Arc<ManifoldPoint>,
    data: &SampledTensor,
    xi: &TangentVector,
    h: f64,
) -> Result<TangentVector> {
    HessianContext::new(x, data)?.finite_difference(xi, h)
}
