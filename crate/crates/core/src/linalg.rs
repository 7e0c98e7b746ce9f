//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Relative singular-value cutoff used for pseudoinverses and rank drops.
pub const PINV_CUTOFF: f64 = 1e-12;

/// Thin SVD with singular values sorted in descending order.
pub fn svd_sorted(m: &DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>, DMatrix<f64>) {
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("requested U");
    let vt = svd.v_t.expect("requested V^T");
    let s = svd.singular_values;
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&a, &b| s[b].total_cmp(&s[a]));
    let u = DMatrix::from_fn(u.nrows(), order.len(), |i, j| u[(i, order[j])]);
    let vt = DMatrix::from_fn(order.len(), vt.ncols(), |i, j| vt[(order[i], j)]);
    let s = order.iter().map(|&k| s[k]).collect();
    (u, s, vt)
}

/// Singular values in descending order.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Leading `r` left singular vectors and all singular values (descending).
///
/// Each returned column is sign-normalized so that its largest-magnitude
/// entry is positive.
pub fn leading_left_singular_vectors(m: &DMatrix<f64>, r: usize) -> (DMatrix<f64>, Vec<f64>) {
    let (u, s) = if m.nrows() <= m.ncols() {
        let svd = m.transpose().svd(false, true);
        let vt = svd.v_t.expect("requested V^T");
        (vt.transpose(), svd.singular_values)
    } else {
        let svd = m.clone().svd(true, false);
        (svd.u.expect("requested U"), svd.singular_values)
    };
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&a, &b| s[b].total_cmp(&s[a]));
    let mut lead = DMatrix::from_fn(u.nrows(), r.min(order.len()), |i, j| u[(i, order[j])]);
    normalize_column_signs(&mut lead);
    (lead, order.iter().map(|&k| s[k]).collect())
}

/// Flips columns so that the largest-magnitude entry of each is positive.
pub fn normalize_column_signs(m: &mut DMatrix<f64>) {
    for mut col in m.column_iter_mut() {
        let mut best = 0.0f64;
        let mut sign = 1.0;
        for &v in col.iter() {
            if v.abs() > best {
                best = v.abs();
                sign = v.signum();
            }
        }
        if sign < 0.0 {
            col.neg_mut();
        }
    }
}

/// Pseudoinverse of a matrix expected to have full row rank.
///
/// Errors if `σ_min ≤ PINV_CUTOFF · σ_max`; `mode` is only used for the
/// diagnostic.
pub fn pinv_full_row_rank(c: &DMatrix<f64>, mode: usize) -> Result<DMatrix<f64>> {
    let (u, s, vt) = svd_sorted(c);
    let smax = s.first().copied().unwrap_or(0.0);
    let smin = s.last().copied().unwrap_or(0.0);
    if s.len() < c.nrows() || smax <= 0.0 || smin <= PINV_CUTOFF * smax {
        return Err(Error::SingularCore {
            mode,
            ratio: if smax > 0.0 { smin / smax } else { 0.0 },
        });
    }
    // C⁺ = V Σ⁻¹ Uᵀ
    let mut v = vt.transpose();
    for (j, mut col) in v.column_iter_mut().enumerate() {
        col /= s[j];
    }
    Ok(v * u.transpose())
}

/// Maximum absolute deviation of `UᵀU` from the identity.
pub fn orthonormality_defect(u: &DMatrix<f64>) -> f64 {
    let g = u.transpose() * u;
    let mut worst = 0.0f64;
    for i in 0..g.nrows() {
        for j in 0..g.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - target).abs());
        }
    }
    worst
}

/// `(I - U Uᵀ) M` for orthonormal `U`.
pub fn project_out(u: &DMatrix<f64>, m: &DMatrix<f64>) -> DMatrix<f64> {
    m - u * (u.transpose() * m)
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}
