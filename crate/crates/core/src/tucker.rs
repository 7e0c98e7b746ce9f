//! Tucker-format tensors `X = C ×_1 U_1 ⋯ ×_d U_d` with orthonormal factors.

use nalgebra::DMatrix;
use rand::Rng;

use crate::contract::{self, Contract, ModeOp};
use crate::error::{Error, Result};
use crate::linalg;
use crate::sampled::SampledTensor;
use crate::tensor::DenseTensor;

/// Orthonormality tolerance enforced when constructing a [`TuckerTensor`].
pub const ORTHONORMAL_TOL: f64 = 1e-11;

#[derive(Debug, Clone, PartialEq)]
pub struct TuckerTensor {
    core: DenseTensor,
    factors: Vec<DMatrix<f64>>,
    dims: Vec<usize>,
}

impl TuckerTensor {
    /// Validates shapes, `U_iᵀU_i = I` and the admissible rank bounds
    /// `r_i ≤ n_i`, `r_i ≤ Π_{j≠i} r_j`.
    pub fn new(core: DenseTensor, factors: Vec<DMatrix<f64>>) -> Result<Self> {
        check_shapes(&core, &factors)?;
        let ranks = core.dims();
        let total: usize = ranks.iter().product();
        for (mode, u) in factors.iter().enumerate() {
            let r = ranks[mode];
            if r > u.nrows() {
                return Err(Error::RankTooLarge {
                    mode,
                    rank: r,
                    bound: u.nrows(),
                });
            }
            if r * r > total {
                return Err(Error::RankTooLarge {
                    mode,
                    rank: r,
                    bound: total / r,
                });
            }
            let deviation = linalg::orthonormality_defect(u);
            if deviation > ORTHONORMAL_TOL {
                return Err(Error::NotOrthonormal { mode, deviation });
            }
        }
        let dims = factors.iter().map(|u| u.nrows()).collect();
        Ok(Self {
            core,
            factors,
            dims,
        })
    }

    /// Orthonormalizes `raw_factors` by QR (`U_i = Q_i R_i`) and absorbs each
    /// `R_i` into the core, `C ← C ×_i R_i`. The represented tensor is
    /// unchanged.
    pub fn orthonormalize(core: DenseTensor, raw_factors: Vec<DMatrix<f64>>) -> Result<Self> {
        check_shapes(&core, &raw_factors)?;
        let mut core = core;
        let mut factors = Vec::with_capacity(raw_factors.len());
        for (mode, u) in raw_factors.into_iter().enumerate() {
            if u.ncols() > u.nrows() {
                return Err(Error::RankDeficientFactor { mode });
            }
            let qr = u.qr();
            let r = qr.r();
            let diag: Vec<f64> = r.diagonal().iter().map(|v| v.abs()).collect();
            let dmax = diag.iter().fold(0.0f64, |a, &b| a.max(b));
            if dmax == 0.0 || diag.iter().any(|&v| v <= linalg::PINV_CUTOFF * dmax) {
                return Err(Error::RankDeficientFactor { mode });
            }
            core = core.mode_product(&r, mode)?;
            factors.push(qr.q());
        }
        Self::new(core, factors)
    }

    /// Truncated HOSVD: `U_i` are the `r_i` dominant left singular vectors of
    /// `A_(i)` and `C = A ⨉_i U_iᵀ`.
    pub fn hosvd(a: &DenseTensor, ranks: &[usize]) -> Result<Self> {
        if ranks.len() != a.order() {
            return Err(Error::DimensionMismatch(format!(
                "rank tuple of length {} for a tensor of order {}",
                ranks.len(),
                a.order()
            )));
        }
        let total: usize = a.dims().iter().product();
        let mut factors = Vec::with_capacity(ranks.len());
        for (mode, &r) in ranks.iter().enumerate() {
            let bound = a.dims()[mode].min(total / a.dims()[mode]);
            if r > bound || r == 0 {
                return Err(Error::RankTooLarge {
                    mode,
                    rank: r,
                    bound,
                });
            }
            let (u, _) = linalg::leading_left_singular_vectors(&a.matricize(mode)?, r);
            factors.push(u);
        }
        let ops: Vec<ModeOp> = factors.iter().map(ModeOp::Apply).collect();
        let core = a.contract(&ops)?;
        Self::new(core, factors)
    }

    /// Random point with uniform (0,1) core and factor entries, orthonormalized.
    pub fn random<R: Rng + ?Sized>(dims: &[usize], ranks: &[usize], rng: &mut R) -> Result<Self> {
        if dims.len() != ranks.len() {
            return Err(Error::DimensionMismatch(format!(
                "dims {dims:?} vs ranks {ranks:?}"
            )));
        }
        let core = DenseTensor::from_fn(ranks, |_| rng.random::<f64>())?;
        let factors = dims
            .iter()
            .zip(ranks)
            .map(|(&n, &r)| DMatrix::from_fn(n, r, |_, _| rng.random::<f64>()))
            .collect();
        Self::orthonormalize(core, factors)
    }

    pub fn core(&self) -> &DenseTensor {
        &self.core
    }

    pub fn factors(&self) -> &[DMatrix<f64>] {
        &self.factors
    }

    pub fn factor(&self, mode: usize) -> &DMatrix<f64> {
        &self.factors[mode]
    }

    pub fn order(&self) -> usize {
        self.factors.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn ranks(&self) -> &[usize] {
        self.core.dims()
    }

    /// `‖X‖`, equal to `‖C‖` because the factors are orthonormal.
    pub fn norm(&self) -> f64 {
        self.core.norm()
    }

    pub fn to_full(&self) -> DenseTensor {
        let mats: Vec<Option<&DMatrix<f64>>> = self.factors.iter().map(Some).collect();
        self.core
            .multi_mode_product(&mats)
            .expect("shapes validated at construction")
    }

    /// Entries of `X` on the sampling set, without forming the full tensor.
    pub fn sampled_entries(&self, omega: &SampledTensor) -> Result<Vec<f64>> {
        if omega.dims() != self.dims() {
            return Err(Error::DimensionMismatch(format!(
                "sampling dims {:?} vs tensor dims {:?}",
                omega.dims(),
                self.dims()
            )));
        }
        let factors: Vec<&DMatrix<f64>> = self.factors.iter().collect();
        Ok(contract::tucker_term_sampled(&self.core, &factors, omega))
    }

    /// Entries of `X` at arbitrary (unsorted, possibly repeated) multi-indices.
    pub fn entries_at(&self, indices: &[Vec<usize>]) -> Result<Vec<f64>> {
        let mut buf = Vec::new();
        let mut tmp = Vec::new();
        indices
            .iter()
            .map(|idx| {
                crate::tensor::linear_index(&self.dims, idx)?;
                let rows: Vec<Vec<f64>> = self
                    .factors
                    .iter()
                    .zip(idx)
                    .map(|(u, &i)| u.row(i).iter().copied().collect())
                    .collect();
                let rows: Vec<&[f64]> = rows.iter().map(Vec::as_slice).collect();
                contract::outer_product(&rows, 1.0, &mut buf, &mut tmp);
                Ok(buf.iter().zip(self.core.data()).map(|(a, b)| a * b).sum())
            })
            .collect()
    }
}

impl Contract for TuckerTensor {
    fn ambient_dims(&self) -> &[usize] {
        &self.dims
    }

    fn contract(&self, ops: &[ModeOp<'_>]) -> Result<DenseTensor> {
        let factors: Vec<&DMatrix<f64>> = self.factors.iter().collect();
        contract::contract_tucker_term(&self.core, &factors, ops)
    }
}

fn check_shapes(core: &DenseTensor, factors: &[DMatrix<f64>]) -> Result<()> {
    if factors.len() != core.order() {
        return Err(Error::DimensionMismatch(format!(
            "{} factors for a core of order {}",
            factors.len(),
            core.order()
        )));
    }
    for (mode, u) in factors.iter().enumerate() {
        if u.ncols() != core.dims()[mode] {
            return Err(Error::DimensionMismatch(format!(
                "factor {mode} has {} columns, core extent is {}",
                u.ncols(),
                core.dims()[mode]
            )));
        }
    }
    Ok(())
}

/// Singular values of every matricization, each list in descending order.
pub fn singular_spectrum(a: &DenseTensor) -> Vec<Vec<f64>> {
    (0..a.order())
        .map(|mode| linalg::singular_values(&a.matricize(mode).expect("valid mode")))
        .collect()
}

/// Dimension of the manifold of tensors with multilinear rank `ranks`.
pub fn manifold_dimension(dims: &[usize], ranks: &[usize]) -> usize {
    ranks.iter().product::<usize>()
        + dims
            .iter()
            .zip(ranks)
            .map(|(&n, &r)| r * n - r * r)
            .sum::<usize>()
}
