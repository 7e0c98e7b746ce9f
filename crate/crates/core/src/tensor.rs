//! Dense order-d tensors.
//!
//! Entries are stored in column-major order: the first index runs fastest,
//! so the linear position of `(i_1, ..., i_d)` is `Σ_k i_k · Π_{j<k} n_j`.
//! The mode-`i` matricization uses the same convention for its columns: the
//! remaining indices are linearized with the lowest remaining mode fastest.
//! For the 2×2×2 tensor with `A_(1) = [1 0 0 0; 0 1 0 0]` this yields
//! `A_(2) = A_(1)` and `A_(3) = [1 0 0 1; 0 0 0 0]`.
//!
//! Modes are 0-based throughout the API.

use nalgebra::{DMatrix, DMatrixView, DMatrixViewMut};

use crate::error::{Error, Result};
use crate::linalg;

/// Dense real tensor of order `d >= 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor {
    dims: Vec<usize>,
    data: Vec<f64>,
}

impl DenseTensor {
    pub fn new(dims: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        check_dims(&dims)?;
        let len: usize = dims.iter().product();
        if data.len() != len {
            return Err(Error::DimensionMismatch(format!(
                "{} entries given for dims {:?} ({} expected)",
                data.len(),
                dims,
                len
            )));
        }
        Ok(Self { dims, data })
    }

    pub fn zeros(dims: &[usize]) -> Result<Self> {
        check_dims(dims)?;
        let len = dims.iter().product();
        Ok(Self {
            dims: dims.to_vec(),
            data: vec![0.0; len],
        })
    }

    /// Builds a tensor by evaluating `f` at every multi-index.
    pub fn from_fn(dims: &[usize], mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        let mut t = Self::zeros(dims)?;
        let mut idx = vec![0usize; dims.len()];
        for lin in 0..t.data.len() {
            t.data[lin] = f(&idx);
            increment(&mut idx, dims);
        }
        Ok(t)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn order(&self) -> usize {
        self.dims.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn linear_index(&self, index: &[usize]) -> Result<usize> {
        linear_index(&self.dims, index)
    }

    pub fn get(&self, index: &[usize]) -> Result<f64> {
        Ok(self.data[self.linear_index(index)?])
    }

    pub fn set(&mut self, index: &[usize], value: f64) -> Result<()> {
        let lin = self.linear_index(index)?;
        self.data[lin] = value;
        Ok(())
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.order() {
            return Err(Error::ModeOutOfRange {
                mode,
                order: self.order(),
            });
        }
        Ok(())
    }

    /// Splits the dims around `mode` into (left, n_mode, right) extents.
    fn split(&self, mode: usize) -> (usize, usize, usize) {
        let left = self.dims[..mode].iter().product();
        let right = self.dims[mode + 1..].iter().product();
        (left, self.dims[mode], right)
    }

    /// Mode-`mode` matricization, `n_mode × Π_{j≠mode} n_j`.
    pub fn matricize(&self, mode: usize) -> Result<DMatrix<f64>> {
        self.check_mode(mode)?;
        let (left, n, right) = self.split(mode);
        let mut m = DMatrix::zeros(n, left * right);
        for r in 0..right {
            for k in 0..n {
                let src = &self.data[left * (k + n * r)..left * (k + n * r + 1)];
                for (l, &v) in src.iter().enumerate() {
                    m[(k, l + left * r)] = v;
                }
            }
        }
        Ok(m)
    }

    /// Inverse of [`DenseTensor::matricize`] for the given mode and dims.
    pub fn tensorize(m: &DMatrix<f64>, mode: usize, dims: &[usize]) -> Result<Self> {
        let mut t = Self::zeros(dims)?;
        t.check_mode(mode)?;
        let (left, n, right) = t.split(mode);
        if m.nrows() != n || m.ncols() != left * right {
            return Err(Error::DimensionMismatch(format!(
                "matrix {}x{} cannot be tensorized in mode {} to dims {:?}",
                m.nrows(),
                m.ncols(),
                mode,
                dims
            )));
        }
        for r in 0..right {
            for k in 0..n {
                let dst = &mut t.data[left * (k + n * r)..left * (k + n * r + 1)];
                for (l, v) in dst.iter_mut().enumerate() {
                    *v = m[(k, l + left * r)];
                }
            }
        }
        Ok(t)
    }

    /// `A ×_mode M`, i.e. the tensor whose mode matricization is `M A_(mode)`.
    pub fn mode_product(&self, m: &DMatrix<f64>, mode: usize) -> Result<Self> {
        self.check_mode(mode)?;
        if m.ncols() != self.dims[mode] {
            return Err(Error::DimensionMismatch(format!(
                "mode-{} product: matrix has {} columns, tensor extent is {}",
                mode,
                m.ncols(),
                self.dims[mode]
            )));
        }
        let mt = m.transpose();
        Ok(self.mode_product_impl(&mt, mode))
    }

    /// `A ×_mode Mᵀ`; avoids forming the transpose explicitly.
    pub fn mode_product_transposed(&self, m: &DMatrix<f64>, mode: usize) -> Result<Self> {
        self.check_mode(mode)?;
        if m.nrows() != self.dims[mode] {
            return Err(Error::DimensionMismatch(format!(
                "mode-{} product with transpose: matrix has {} rows, tensor extent is {}",
                mode,
                m.nrows(),
                self.dims[mode]
            )));
        }
        Ok(self.mode_product_impl(m, mode))
    }

    // `mt` is the transpose of the multiplying matrix: n_mode × p.
    fn mode_product_impl(&self, mt: &DMatrix<f64>, mode: usize) -> Self {
        let (left, n, right) = self.split(mode);
        let p = mt.ncols();
        let mut dims = self.dims.clone();
        dims[mode] = p;
        let mut out = vec![0.0; left * p * right];
        if left * p * right > 0 {
            for r in 0..right {
                let a = DMatrixView::from_slice(&self.data[left * n * r..left * n * (r + 1)], left, n);
                let mut b =
                    DMatrixViewMut::from_slice(&mut out[left * p * r..left * p * (r + 1)], left, p);
                b.gemm(1.0, &a, mt, 0.0);
            }
        }
        Self { dims, data: out }
    }

    /// Applies `A ×_j M_j` for every mode whose entry is `Some`.
    pub fn multi_mode_product(&self, mats: &[Option<&DMatrix<f64>>]) -> Result<Self> {
        if mats.len() != self.order() {
            return Err(Error::DimensionMismatch(format!(
                "{} matrices for a tensor of order {}",
                mats.len(),
                self.order()
            )));
        }
        let mut t = self.clone();
        for (mode, m) in mats.iter().enumerate() {
            if let Some(m) = m {
                t = t.mode_product(m, mode)?;
            }
        }
        Ok(t)
    }

    fn check_same_dims(&self, other: &Self) -> Result<()> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch(format!(
                "dims {:?} vs {:?}",
                self.dims, other.dims
            )));
        }
        Ok(())
    }

    /// Frobenius inner product.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        self.check_same_dims(other)?;
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum())
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, a| m.max(a.abs()))
    }

    /// `self += alpha * other`.
    pub fn axpy(&mut self, alpha: f64, other: &Self) -> Result<()> {
        self.check_same_dims(other)?;
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += alpha * b;
        }
        Ok(())
    }

    pub fn scale(&mut self, alpha: f64) {
        self.data.iter_mut().for_each(|a| *a *= alpha);
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        let mut t = self.clone();
        t.scale(alpha);
        t
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let mut t = self.clone();
        t.axpy(-1.0, other)?;
        Ok(t)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let mut t = self.clone();
        t.axpy(1.0, other)?;
        Ok(t)
    }

    /// Number of singular values of each matricization above `rel_tol · σ_max`.
    pub fn multilinear_rank(&self, rel_tol: f64) -> Result<Vec<usize>> {
        if !(rel_tol > 0.0 && rel_tol < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "rel_tol must lie in (0,1), got {rel_tol}"
            )));
        }
        (0..self.order())
            .map(|mode| {
                let s = linalg::singular_values(&self.matricize(mode)?);
                let smax = s.first().copied().unwrap_or(0.0);
                Ok(s.iter().filter(|&&v| smax > 0.0 && v > rel_tol * smax).count())
            })
            .collect()
    }
}

pub const DEFAULT_RANK_TOL: f64 = 1e-10;

pub(crate) fn check_dims(dims: &[usize]) -> Result<()> {
    if dims.len() < 2 {
        return Err(Error::OrderTooSmall(dims.len()));
    }
    if dims.iter().any(|&n| n == 0) {
        return Err(Error::DimensionMismatch(format!(
            "zero extent in dims {dims:?}"
        )));
    }
    Ok(())
}

pub(crate) fn linear_index(dims: &[usize], index: &[usize]) -> Result<usize> {
    if index.len() != dims.len() || index.iter().zip(dims).any(|(i, n)| i >= n) {
        return Err(Error::IndexOutOfBounds {
            index: index.to_vec(),
            dims: dims.to_vec(),
        });
    }
    let mut lin = 0;
    let mut stride = 1;
    for (i, n) in index.iter().zip(dims) {
        lin += i * stride;
        stride *= n;
    }
    Ok(lin)
}

/// Advances a column-major multi-index; wraps to zero after the last entry.
pub(crate) fn increment(idx: &mut [usize], dims: &[usize]) {
    for (i, n) in idx.iter_mut().zip(dims) {
        *i += 1;
        if *i < *n {
            return;
        }
        *i = 0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;

    fn example() -> DenseTensor {
        let a1 = dmatrix![1.0, 0.0, 0.0, 0.0; 0.0, 1.0, 0.0, 0.0];
        DenseTensor::tensorize(&a1, 0, &[2, 2, 2]).unwrap()
    }

    fn ramp(dims: &[usize]) -> DenseTensor {
        let len: usize = dims.iter().product();
        DenseTensor::new(dims.to_vec(), (0..len).map(|v| v as f64 * 0.37 - 1.1).collect()).unwrap()
    }

    #[test]
    fn worked_example_matricizations() {
        let a = example();
        let a1 = a.matricize(0).unwrap();
        assert_eq!(a.matricize(1).unwrap(), a1);
        let a3 = a.matricize(2).unwrap();
        assert_eq!(a3, dmatrix![1.0, 0.0, 0.0, 1.0; 0.0, 0.0, 0.0, 0.0]);
        let back = DenseTensor::tensorize(&a3, 2, &[2, 2, 2]).unwrap();
        assert_eq!(back, a);
        assert_eq!(a.multilinear_rank(DEFAULT_RANK_TOL).unwrap(), vec![2, 2, 1]);
        assert!((a.norm().powi(2) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn order_two_matricization_is_matrix_and_transpose() {
        let a = ramp(&[3, 4]);
        let m = a.matricize(0).unwrap();
        assert_eq!(a.matricize(1).unwrap(), m.transpose());
        assert_eq!(m[(2, 1)], a.get(&[2, 1]).unwrap());
    }

    #[test]
    fn scalar_tensorize() {
        let m = DMatrix::from_element(1, 1, 4.5);
        let t = DenseTensor::tensorize(&m, 0, &[1, 1]).unwrap();
        assert_eq!(t.data(), &[4.5]);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(matches!(
            DenseTensor::new(vec![2, 2], vec![0.0; 3]),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(matches!(DenseTensor::zeros(&[3]), Err(Error::OrderTooSmall(1))));
        let a = ramp(&[2, 3, 4]);
        assert!(matches!(a.matricize(3), Err(Error::ModeOutOfRange { .. })));
        assert!(a.mode_product(&DMatrix::zeros(2, 2), 1).is_err());
        assert!(DenseTensor::tensorize(&DMatrix::zeros(3, 7), 1, &[2, 3, 4]).is_err());
        assert!(a.inner(&ramp(&[2, 4, 3])).is_err());
        assert!(a.get(&[1, 3, 0]).is_err());
    }

    #[test]
    fn identity_mode_product() {
        let a = ramp(&[2, 3, 4]);
        for mode in 0..3 {
            let id = DMatrix::identity(a.dims()[mode], a.dims()[mode]);
            assert_eq!(a.mode_product(&id, mode).unwrap(), a);
        }
    }

    #[test]
    fn zero_tensor_rank_and_inner() {
        let z = DenseTensor::zeros(&[3, 3, 2]).unwrap();
        assert_eq!(z.multilinear_rank(0.5).unwrap(), vec![0, 0, 0]);
        assert_eq!(ramp(&[3, 3, 2]).inner(&z).unwrap(), 0.0);
        assert!(z.multilinear_rank(1.0).is_err());
    }

    #[test]
    fn from_fn_matches_linear_layout() {
        let t = DenseTensor::from_fn(&[2, 3, 2], |i| (i[0] + 10 * i[1] + 100 * i[2]) as f64).unwrap();
        assert_eq!(t.data()[1], 1.0);
        assert_eq!(t.data()[2], 10.0);
        assert_eq!(t.data()[6], 100.0);
    }
}
