//! Multilinear contractions `Z ⨉_j W_jᵀ` shared by every ambient representation.
//!
//! The tangent projection and the curvature term access an ambient tensor
//! only through contractions against factor matrices in all modes but at
//! most one. Dense, sampled and low-rank (Tucker) tensors implement this
//! primitive; the sampled path costs `O(|Ω| Π c_j)`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::sampled::SampledTensor;
use crate::tensor::DenseTensor;

/// Action on one mode of a contraction.
#[derive(Debug, Clone, Copy)]
pub enum ModeOp<'a> {
    /// Leave the mode uncontracted.
    Keep,
    /// Contract the mode with `Wᵀ` (`W` is `n_j × c_j`).
    Apply(&'a DMatrix<f64>),
}

/// An element of the ambient space `ℝ^{n_1×⋯×n_d}` that supports contractions.
pub trait Contract {
    fn ambient_dims(&self) -> &[usize];

    /// Returns `Z ⨉_{j: Apply(W_j)} W_jᵀ`; kept modes retain extent `n_j`.
    fn contract(&self, ops: &[ModeOp<'_>]) -> Result<DenseTensor>;
}

pub(crate) fn output_dims(dims: &[usize], ops: &[ModeOp<'_>]) -> Result<Vec<usize>> {
    if ops.len() != dims.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} mode operations for order {}",
            ops.len(),
            dims.len()
        )));
    }
    ops.iter()
        .zip(dims)
        .enumerate()
        .map(|(mode, (op, &n))| match op {
            ModeOp::Keep => Ok(n),
            ModeOp::Apply(w) if w.nrows() == n => Ok(w.ncols()),
            ModeOp::Apply(w) => Err(Error::DimensionMismatch(format!(
                "mode {mode}: contraction matrix has {} rows, extent is {n}",
                w.nrows()
            ))),
        })
        .collect()
}

impl Contract for DenseTensor {
    fn ambient_dims(&self) -> &[usize] {
        self.dims()
    }

    fn contract(&self, ops: &[ModeOp<'_>]) -> Result<DenseTensor> {
        output_dims(self.dims(), ops)?;
        let mut t = self.clone();
        for (mode, op) in ops.iter().enumerate() {
            if let ModeOp::Apply(w) = op {
                t = t.mode_product_transposed(w, mode)?;
            }
        }
        Ok(t)
    }
}

pub(crate) fn column_slice(m: &DMatrix<f64>, j: usize) -> &[f64] {
    let r = m.nrows();
    &m.as_slice()[j * r..(j + 1) * r]
}

/// Builds `scale · (w_0 ⊗ w_1 ⊗ ⋯)` in column-major order into `out`.
pub(crate) fn outer_product(rows: &[&[f64]], scale: f64, out: &mut Vec<f64>, tmp: &mut Vec<f64>) {
    out.clear();
    out.push(scale);
    for row in rows {
        tmp.clear();
        for &w in row.iter() {
            tmp.extend(out.iter().map(|&a| a * w));
        }
        std::mem::swap(out, tmp);
    }
}

impl Contract for SampledTensor {
    fn ambient_dims(&self) -> &[usize] {
        self.dims()
    }

    fn contract(&self, ops: &[ModeOp<'_>]) -> Result<DenseTensor> {
        let out_dims = output_dims(self.dims(), ops)?;
        let free: Vec<usize> = ops
            .iter()
            .enumerate()
            .filter(|(_, op)| matches!(op, ModeOp::Keep))
            .map(|(j, _)| j)
            .collect();
        if free.len() > 1 {
            // not used by the geometry
            return self.to_dense().contract(ops);
        }
        // Row j of W is column j of Wᵀ, contiguous in column-major storage.
        let transposed: Vec<Option<DMatrix<f64>>> = ops
            .iter()
            .map(|op| match op {
                ModeOp::Apply(w) => Some(w.transpose()),
                ModeOp::Keep => None,
            })
            .collect();
        let one = [1.0];
        let (left, n_free) = match free.first() {
            Some(&f) => (out_dims[..f].iter().product::<usize>(), out_dims[f]),
            None => (out_dims.iter().product::<usize>(), 1),
        };
        let mut out = DenseTensor::zeros(&out_dims)?;
        let data = out.data_mut();
        let mut buf = Vec::new();
        let mut tmp = Vec::new();
        let mut rows: Vec<&[f64]> = Vec::with_capacity(ops.len());
        for (idx, v) in self.iter() {
            rows.clear();
            for (j, wt) in transposed.iter().enumerate() {
                rows.push(match wt {
                    Some(wt) => column_slice(wt, idx[j]),
                    None => &one,
                });
            }
            outer_product(&rows, v, &mut buf, &mut tmp);
            let offset = free.first().map_or(0, |&f| idx[f]);
            for (c, &b) in buf.iter().enumerate() {
                let a = c % left;
                let rest = c / left;
                data[a + left * (offset + n_free * rest)] += b;
            }
        }
        Ok(out)
    }
}

/// Contracts the Tucker term `G ⨉_j V_j` against `ops`: the result is again
/// computed entirely on the small core.
pub(crate) fn contract_tucker_term(
    core: &DenseTensor,
    factors: &[&DMatrix<f64>],
    ops: &[ModeOp<'_>],
) -> Result<DenseTensor> {
    let dims: Vec<usize> = factors.iter().map(|f| f.nrows()).collect();
    output_dims(&dims, ops)?;
    let mut t = core.clone();
    for (mode, (op, v)) in ops.iter().zip(factors).enumerate() {
        t = match op {
            ModeOp::Keep => t.mode_product(v, mode)?,
            ModeOp::Apply(w) => t.mode_product(&(w.transpose() * *v), mode)?,
        };
    }
    Ok(t)
}

/// Entries of `G ⨉_j V_j` at every sample of `omega`, `O(|Ω| Π r_j)`.
pub(crate) fn tucker_term_sampled(
    core: &DenseTensor,
    factors: &[&DMatrix<f64>],
    omega: &SampledTensor,
) -> Vec<f64> {
    let transposed: Vec<DMatrix<f64>> = factors.iter().map(|f| f.transpose()).collect();
    let mut buf = Vec::new();
    let mut tmp = Vec::new();
    let mut rows: Vec<&[f64]> = Vec::with_capacity(factors.len());
    let core = core.data();
    omega
        .iter()
        .map(|(idx, _)| {
            rows.clear();
            rows.extend(
                transposed
                    .iter()
                    .zip(idx)
                    .map(|(ft, &i)| column_slice(ft, i)),
            );
            outer_product(&rows, 1.0, &mut buf, &mut tmp);
            buf.iter().zip(core).map(|(a, b)| a * b).sum()
        })
        .collect()
}
