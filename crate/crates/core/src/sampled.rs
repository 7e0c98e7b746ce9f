//! Sparse tensors supported on a sampling set Ω.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::tensor::{self, DenseTensor};

/// Values of a tensor on a sampling set Ω, i.e. the nonzeros of `P_Ω A`.
///
/// Multi-indices are 0-based, stored flat (`order` entries per sample) and
/// kept strictly increasing in lexicographic order (first index most
/// significant). The index set is shared between tensors derived from the
/// same Ω, so residuals and sampled tangent vectors are cheap to build.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledTensor {
    dims: Vec<usize>,
    indices: Arc<Vec<usize>>,
    values: Vec<f64>,
}

impl SampledTensor {
    /// Builds a sampled tensor from entries already in strictly increasing order.
    pub fn new(dims: Vec<usize>, indices: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        tensor::check_dims(&dims)?;
        let d = dims.len();
        if indices.len() != values.len() * d {
            return Err(Error::DimensionMismatch(format!(
                "{} index components for {} values of an order-{} tensor",
                indices.len(),
                values.len(),
                d
            )));
        }
        if values.is_empty() {
            return Err(Error::EmptySampling);
        }
        let total: usize = dims.iter().product();
        if values.len() > total {
            return Err(Error::DimensionMismatch(format!(
                "{} samples exceed the {} entries of dims {:?}",
                values.len(),
                total,
                dims
            )));
        }
        for (k, idx) in indices.chunks_exact(d).enumerate() {
            if idx.iter().zip(&dims).any(|(i, n)| i >= n) {
                return Err(Error::IndexOutOfBounds {
                    index: idx.to_vec(),
                    dims: dims.clone(),
                });
            }
            if k > 0 && indices[(k - 1) * d..k * d] >= *idx {
                return Err(Error::UnsortedSampling { position: k });
            }
        }
        Ok(Self {
            dims,
            indices: Arc::new(indices),
            values,
        })
    }

    /// Sorts `entries` lexicographically; duplicates are rejected.
    pub fn from_entries(dims: Vec<usize>, mut entries: Vec<(Vec<usize>, f64)>) -> Result<Self> {
        let d = dims.len();
        if let Some((idx, _)) = entries.iter().find(|(idx, _)| idx.len() != d) {
            return Err(Error::IndexOutOfBounds {
                index: idx.clone(),
                dims,
            });
        }
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        let mut indices = Vec::with_capacity(entries.len() * d);
        let mut values = Vec::with_capacity(entries.len());
        for (idx, v) in entries {
            indices.extend_from_slice(&idx);
            values.push(v);
        }
        Self::new(dims, indices, values)
    }

    /// A tensor on the same sampling set with different values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.values.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} values for a sampling set of size {}",
                values.len(),
                self.values.len()
            )));
        }
        Ok(Self {
            dims: self.dims.clone(),
            indices: Arc::clone(&self.indices),
            values,
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn order(&self) -> usize {
        self.dims.len()
    }

    /// Number of samples |Ω|.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Flat 0-based multi-indices, `order()` components per sample.
    pub fn flat_indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn index(&self, k: usize) -> &[usize] {
        let d = self.order();
        &self.indices[k * d..(k + 1) * d]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[usize], f64)> + '_ {
        self.indices
            .chunks_exact(self.order())
            .zip(self.values.iter().copied())
    }

    pub fn same_support(&self, other: &Self) -> bool {
        self.dims == other.dims
            && (Arc::ptr_eq(&self.indices, &other.indices) || self.indices == other.indices)
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Dense tensor `P_Ω A` (zeros off Ω).
    pub fn to_dense(&self) -> DenseTensor {
        let mut t = DenseTensor::zeros(&self.dims).expect("validated dims");
        for (idx, v) in self.iter() {
            let lin = tensor::linear_index(&self.dims, idx).expect("validated index");
            t.data_mut()[lin] = v;
        }
        t
    }

    /// Gathers the entries of a dense tensor on this sampling set.
    pub fn gather(&self, a: &DenseTensor) -> Result<Vec<f64>> {
        if a.dims() != self.dims.as_slice() {
            return Err(Error::DimensionMismatch(format!(
                "dense dims {:?} vs sampled dims {:?}",
                a.dims(),
                self.dims
            )));
        }
        self.indices
            .chunks_exact(self.order())
            .map(|idx| a.get(idx))
            .collect()
    }
}

/// Restricts `a` to the sampling set `omega` (`P_Ω A`).
pub fn sample_project(a: &DenseTensor, omega: &[Vec<usize>]) -> Result<SampledTensor> {
    let entries = omega
        .iter()
        .map(|idx| Ok((idx.clone(), a.get(idx)?)))
        .collect::<Result<Vec<_>>>()?;
    SampledTensor::from_entries(a.dims().to_vec(), entries)
}
