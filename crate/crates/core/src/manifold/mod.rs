//! Riemannian geometry of the manifold `M_r` of tensors with fixed
//! multilinear rank `r`, embedded in `ℝ^{n_1×⋯×n_d}` with the Frobenius
//! metric.
//!
//! A tangent vector at `X = C ⨉_i U_i` is stored through its variations
//! `(Ċ, U̇_1, …, U̇_d)` with the gauge `U̇_iᵀ U_i = 0`; it represents the ambient
//! tensor
//!
//! ```text
//! ξ = Ċ ⨉_i U_i + Σ_i C ×_i U̇_i ⨉_{j≠i} U_j.
//! ```
//!
//! The gauge makes the `d + 1` terms mutually orthogonal, so inner products
//! reduce to `⟨Ċ, Ċ'⟩ + Σ_i tr(U̇_iᵀ U̇'_i C_(i) C_(i)ᵀ)` and never touch the
//! ambient space.

mod hessian;

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::contract::{self, Contract, ModeOp};
use crate::error::{Error, Result};
use crate::linalg;
use crate::sampled::SampledTensor;
use crate::tensor::DenseTensor;
use crate::tucker::TuckerTensor;

pub use hessian::{
    curvature_term, curvature_term_with_projection, hessian_exact, hessian_fd,
    hessian_gauss_newton, weingarten_dproj, HessianContext, DEFAULT_FD_STEP,
};

/// Gauge tolerance, relative to `max(1, ‖U̇_i‖_max)`.
pub const GAUGE_TOL: f64 = 1e-10;

/// A point of `M_r` together with the core matricizations and their
/// pseudoinverses, which every projection needs.
#[derive(Debug, Clone)]
pub struct ManifoldPoint {
    tucker: TuckerTensor,
    core_mats: Vec<DMatrix<f64>>,
    pinvs: Vec<DMatrix<f64>>,
    grams: Vec<DMatrix<f64>>,
}

impl ManifoldPoint {
    /// Fails with [`Error::SingularCore`] if some `C_(i)` is rank deficient,
    /// i.e. the tensor does not have multilinear rank exactly `r`.
    pub fn new(tucker: TuckerTensor) -> Result<Self> {
        let core = tucker.core();
        let mut core_mats = Vec::with_capacity(tucker.order());
        let mut pinvs = Vec::with_capacity(tucker.order());
        let mut grams = Vec::with_capacity(tucker.order());
        for mode in 0..tucker.order() {
            let c = core.matricize(mode)?;
            pinvs.push(linalg::pinv_full_row_rank(&c, mode)?);
            grams.push(&c * c.transpose());
            core_mats.push(c);
        }
        Ok(Self {
            tucker,
            core_mats,
            pinvs,
            grams,
        })
    }

    pub fn into_shared(self) -> Arc<Self> {
        Arc::new(self)
    }

    pub fn tucker(&self) -> &TuckerTensor {
        &self.tucker
    }

    pub fn core(&self) -> &DenseTensor {
        self.tucker.core()
    }

    pub fn factor(&self, mode: usize) -> &DMatrix<f64> {
        self.tucker.factor(mode)
    }

    pub fn factors(&self) -> &[DMatrix<f64>] {
        self.tucker.factors()
    }

    pub fn order(&self) -> usize {
        self.tucker.order()
    }

    pub fn dims(&self) -> &[usize] {
        self.tucker.dims()
    }

    pub fn ranks(&self) -> &[usize] {
        self.tucker.ranks()
    }

    /// `C_(mode)`.
    pub fn core_matricization(&self, mode: usize) -> &DMatrix<f64> {
        &self.core_mats[mode]
    }

    /// `C_(mode)⁺`.
    pub fn core_pinv(&self, mode: usize) -> &DMatrix<f64> {
        &self.pinvs[mode]
    }

    pub fn dimension(&self) -> usize {
        crate::tucker::manifold_dimension(self.dims(), self.ranks())
    }

    /// Contraction ops applying `U_j` in every mode except `keep`; `swap`
    /// substitutes another matrix in one mode.
    pub(crate) fn ops<'a>(
        &'a self,
        keep: Option<usize>,
        swap: Option<(usize, &'a DMatrix<f64>)>,
    ) -> Vec<ModeOp<'a>> {
        (0..self.order())
            .map(|j| {
                if Some(j) == keep {
                    ModeOp::Keep
                } else if let Some((_, m)) = swap.filter(|(k, _)| *k == j) {
                    ModeOp::Apply(m)
                } else {
                    ModeOp::Apply(self.factor(j))
                }
            })
            .collect()
    }
}

/// An element of `T_X M_r`, anchored at `X`.
#[derive(Debug, Clone)]
pub struct TangentVector {
    anchor: Arc<ManifoldPoint>,
    core_dot: DenseTensor,
    factor_dots: Vec<DMatrix<f64>>,
}

impl TangentVector {
    /// Validates shapes and the gauge condition `U̇_iᵀ U_i = 0`.
    pub fn new(
        anchor: Arc<ManifoldPoint>,
        core_dot: DenseTensor,
        factor_dots: Vec<DMatrix<f64>>,
    ) -> Result<Self> {
        if core_dot.dims() != anchor.ranks() || factor_dots.len() != anchor.order() {
            return Err(Error::DimensionMismatch(format!(
                "core variation {:?} for ranks {:?}",
                core_dot.dims(),
                anchor.ranks()
            )));
        }
        for (mode, ud) in factor_dots.iter().enumerate() {
            let u = anchor.factor(mode);
            if ud.shape() != u.shape() {
                return Err(Error::DimensionMismatch(format!(
                    "factor variation {mode} has shape {:?}, expected {:?}",
                    ud.shape(),
                    u.shape()
                )));
            }
            let defect = linalg::max_abs(&(ud.transpose() * u));
            if defect > GAUGE_TOL * linalg::max_abs(ud).max(1.0) {
                return Err(Error::DimensionMismatch(format!(
                    "factor variation {mode} violates the gauge (|U̇ᵀU| = {defect:e})"
                )));
            }
        }
        Ok(Self {
            anchor,
            core_dot,
            factor_dots,
        })
    }

    pub(crate) fn new_unchecked(
        anchor: Arc<ManifoldPoint>,
        core_dot: DenseTensor,
        factor_dots: Vec<DMatrix<f64>>,
    ) -> Self {
        Self {
            anchor,
            core_dot,
            factor_dots,
        }
    }

    pub fn zero(anchor: &Arc<ManifoldPoint>) -> Self {
        let core_dot = DenseTensor::zeros(anchor.ranks()).expect("valid ranks");
        let factor_dots = anchor
            .factors()
            .iter()
            .map(|u| DMatrix::zeros(u.nrows(), u.ncols()))
            .collect();
        Self::new_unchecked(Arc::clone(anchor), core_dot, factor_dots)
    }

    /// The tangent vector `X` itself (`Ċ = C`, `U̇_i = 0`).
    pub fn position(anchor: &Arc<ManifoldPoint>) -> Self {
        let mut t = Self::zero(anchor);
        t.core_dot = anchor.core().clone();
        t
    }

    pub fn anchor(&self) -> &Arc<ManifoldPoint> {
        &self.anchor
    }

    pub fn core_dot(&self) -> &DenseTensor {
        &self.core_dot
    }

    pub fn factor_dots(&self) -> &[DMatrix<f64>] {
        &self.factor_dots
    }

    pub fn factor_dot(&self, mode: usize) -> &DMatrix<f64> {
        &self.factor_dots[mode]
    }

    fn check_same_anchor(&self, other: &Self) {
        debug_assert!(
            Arc::ptr_eq(&self.anchor, &other.anchor)
                || self.anchor.tucker() == other.anchor.tucker(),
            "tangent vectors anchored at different points"
        );
    }

    /// Frobenius inner product of the ambient embeddings.
    pub fn inner(&self, other: &Self) -> f64 {
        self.check_same_anchor(other);
        let mut s: f64 = self
            .core_dot
            .data()
            .iter()
            .zip(other.core_dot.data())
            .map(|(a, b)| a * b)
            .sum();
        for (mode, (a, b)) in self.factor_dots.iter().zip(&other.factor_dots).enumerate() {
            // tr(Aᵀ B G) with G = C_(i) C_(i)ᵀ
            s += (a.transpose() * b).component_mul(&self.anchor.grams[mode]).sum();
        }
        s
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).max(0.0).sqrt()
    }

    pub fn scale(&mut self, alpha: f64) {
        self.core_dot.scale(alpha);
        self.factor_dots.iter_mut().for_each(|m| *m *= alpha);
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        let mut t = self.clone();
        t.scale(alpha);
        t
    }

    /// `self += alpha * other`.
    pub fn axpy(&mut self, alpha: f64, other: &Self) {
        self.check_same_anchor(other);
        self.core_dot
            .axpy(alpha, &other.core_dot)
            .expect("same anchor, same shape");
        for (a, b) in self.factor_dots.iter_mut().zip(&other.factor_dots) {
            *a += b * alpha;
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut t = self.clone();
        t.axpy(1.0, other);
        t
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut t = self.clone();
        t.axpy(-1.0, other);
        t
    }

    /// Largest `|U̇_iᵀ U_i|` entry over all modes.
    pub fn gauge_defect(&self) -> f64 {
        self.factor_dots
            .iter()
            .enumerate()
            .map(|(mode, ud)| linalg::max_abs(&(ud.transpose() * self.anchor.factor(mode))))
            .fold(0.0, f64::max)
    }

    /// Factor lists of the `d + 1` Tucker terms making up the embedding, with
    /// their cores.
    fn terms(&self) -> Vec<(&DenseTensor, Vec<&DMatrix<f64>>)> {
        let x = &self.anchor;
        let base: Vec<&DMatrix<f64>> = x.factors().iter().collect();
        let mut terms = vec![(&self.core_dot, base.clone())];
        for (mode, ud) in self.factor_dots.iter().enumerate() {
            let mut f = base.clone();
            f[mode] = ud;
            terms.push((x.core(), f));
        }
        terms
    }

    /// Dense ambient tensor `Ċ ⨉ U_i + Σ_i C ×_i U̇_i ⨉_{j≠i} U_j`.
    pub fn to_ambient(&self) -> DenseTensor {
        let mut out = DenseTensor::zeros(self.anchor.dims()).expect("valid dims");
        for (core, factors) in self.terms() {
            let mats: Vec<Option<&DMatrix<f64>>> = factors.into_iter().map(Some).collect();
            let t = core.multi_mode_product(&mats).expect("consistent shapes");
            out.axpy(1.0, &t).expect("consistent shapes");
        }
        out
    }

    /// Entries of the ambient embedding on the sampling set, i.e. `P_Ω ξ`.
    pub fn sampled_entries(&self, omega: &SampledTensor) -> Result<Vec<f64>> {
        if omega.dims() != self.anchor.dims() {
            return Err(Error::DimensionMismatch(format!(
                "sampling dims {:?} vs tangent dims {:?}",
                omega.dims(),
                self.anchor.dims()
            )));
        }
        let mut values = vec![0.0; omega.len()];
        for (core, factors) in self.terms() {
            let v = contract::tucker_term_sampled(core, &factors, omega);
            values.iter_mut().zip(v).for_each(|(a, b)| *a += b);
        }
        Ok(values)
    }

    /// `P_Ω ξ` as a sampled tensor on the support of `omega`.
    pub fn sample(&self, omega: &SampledTensor) -> Result<SampledTensor> {
        omega.with_values(self.sampled_entries(omega)?)
    }
}

impl Contract for TangentVector {
    fn ambient_dims(&self) -> &[usize] {
        self.anchor.dims()
    }

    fn contract(&self, ops: &[ModeOp<'_>]) -> Result<DenseTensor> {
        let mut acc: Option<DenseTensor> = None;
        for (core, factors) in self.terms() {
            let t = contract::contract_tucker_term(core, &factors, ops)?;
            match acc.as_mut() {
                Some(a) => a.axpy(1.0, &t)?,
                None => acc = Some(t),
            }
        }
        Ok(acc.expect("at least one term"))
    }
}

fn check_ambient(x: &ManifoldPoint, dims: &[usize]) -> Result<()> {
    if dims != x.dims() {
        return Err(Error::DimensionMismatch(format!(
            "ambient dims {:?} vs point dims {:?}",
            dims,
            x.dims()
        )));
    }
    Ok(())
}

/// Orthogonal projection `P_X Z` onto `T_X M_r`:
/// `Ċ = Z ⨉_j U_jᵀ`, `U̇_i = P⊥_{U_i} [Z ⨉_{j≠i} U_jᵀ]_(i) C_(i)⁺`.
pub fn project_to_tangent<Z: Contract + ?Sized>(
    x: &Arc<ManifoldPoint>,
    z: &Z,
) -> Result<TangentVector> {
    check_ambient(x, z.ambient_dims())?;
    let core_dot = z.contract(&x.ops(None, None))?;
    let factor_dots = (0..x.order())
        .map(|mode| {
            let y = z.contract(&x.ops(Some(mode), None))?.matricize(mode)?;
            Ok(linalg::project_out(x.factor(mode), &(y * x.core_pinv(mode))))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TangentVector::new_unchecked(
        Arc::clone(x),
        core_dot,
        factor_dots,
    ))
}

/// HOSVD retraction `R_X(ξ) = P_r^HO(X + ξ)`.
///
/// `X + ξ` is represented exactly with the augmented bases `[U_i, U̇_i] = Q_i R_i`
/// and a `(2r_1)×⋯×(2r_d)` block core holding `C + Ċ` in the leading block
/// and `C` in the block that is offset in mode `i` alone. The truncation then
/// runs on the small core `S ⨉_i R_i`; no ambient-size tensor is formed.
pub fn retract(x: &Arc<ManifoldPoint>, xi: &TangentVector) -> Result<Arc<ManifoldPoint>> {
    let ranks = x.ranks().to_vec();
    let d = x.order();
    let big: Vec<usize> = ranks.iter().map(|r| 2 * r).collect();
    let c = x.core();
    let cdot = xi.core_dot();
    let block = DenseTensor::from_fn(&big, |idx| {
        let mut offset_mode = None;
        let mut small = Vec::with_capacity(d);
        for (j, (&i, &r)) in idx.iter().zip(&ranks).enumerate() {
            if i >= r {
                if offset_mode.is_some() {
                    return 0.0;
                }
                offset_mode = Some(j);
                small.push(i - r);
            } else {
                small.push(i);
            }
        }
        let base = c.get(&small).expect("in range");
        match offset_mode {
            None => base + cdot.get(&small).expect("in range"),
            Some(_) => base,
        }
    })?;

    let mut bases = Vec::with_capacity(d);
    let mut small_core = block;
    for mode in 0..d {
        let u = x.factor(mode);
        let mut aug = DMatrix::zeros(u.nrows(), 2 * ranks[mode]);
        aug.columns_mut(0, ranks[mode]).copy_from(u);
        aug.columns_mut(ranks[mode], ranks[mode])
            .copy_from(xi.factor_dot(mode));
        let qr = aug.qr();
        small_core = small_core.mode_product(&qr.r(), mode)?;
        bases.push(qr.q());
    }

    let mut factors = Vec::with_capacity(d);
    let mut inner = Vec::with_capacity(d);
    for mode in 0..d {
        let (mut w, s) =
            linalg::leading_left_singular_vectors(&small_core.matricize(mode)?, ranks[mode]);
        let smax = s.first().copied().unwrap_or(0.0);
        let sr = s.get(ranks[mode] - 1).copied().unwrap_or(0.0);
        if w.ncols() < ranks[mode] || smax <= 0.0 || sr <= linalg::PINV_CUTOFF * smax {
            return Err(Error::RankDrop {
                mode,
                ratio: if smax > 0.0 { sr / smax } else { 0.0 },
            });
        }
        // sign convention is fixed on the final n_i-dimensional vectors
        let mut f = &bases[mode] * &w;
        let mut flips = f.clone();
        linalg::normalize_column_signs(&mut flips);
        for j in 0..f.ncols() {
            if flips.column(j) != f.column(j) {
                w.column_mut(j).neg_mut();
                f.column_mut(j).neg_mut();
            }
        }
        factors.push(f);
        inner.push(w);
    }
    let ops: Vec<ModeOp> = inner.iter().map(ModeOp::Apply).collect();
    let core = small_core.contract(&ops)?;
    Ok(ManifoldPoint::new(TuckerTensor::new(core, factors)?)?.into_shared())
}

/// Vector transport by orthogonal projection onto `T_Y M_r`.
pub fn vector_transport(xi: &TangentVector, y: &Arc<ManifoldPoint>) -> Result<TangentVector> {
    project_to_tangent(y, xi)
}

/// Sparse residual `P_Ω X − P_Ω A` on the support of `data`.
pub fn residual(x: &ManifoldPoint, data: &SampledTensor) -> Result<SampledTensor> {
    let values = x
        .tucker()
        .sampled_entries(data)?
        .into_iter()
        .zip(data.values())
        .map(|(xv, a)| xv - a)
        .collect();
    data.with_values(values)
}

/// `grad f(X) = P_X(P_Ω X − P_Ω A)` for `f(X) = ½‖P_Ω X − P_Ω A‖²`.
pub fn riemannian_gradient(x: &Arc<ManifoldPoint>, data: &SampledTensor) -> Result<TangentVector> {
    project_to_tangent(x, &residual(x, data)?)
}
