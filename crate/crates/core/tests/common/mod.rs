//! Dense brute-force oracles shared by the integration tests.
//!
//! Nothing here calls the library's matricization, mode products, projection
//! or HOSVD; everything is rebuilt from index loops and nalgebra SVDs.
#![allow(dead_code)]

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use tucker_rtr::{
    project_to_tangent, DenseTensor, ManifoldPoint, SampledTensor, TangentVector, TuckerTensor,
};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_tensor<R: Rng>(dims: &[usize], rng: &mut R) -> DenseTensor {
    let len = dims.iter().product();
    let data = (0..len).map(|_| StandardNormal.sample(rng)).collect();
    DenseTensor::new(dims.to_vec(), data).unwrap()
}

pub fn gaussian_matrix<R: Rng>(r: usize, c: usize, rng: &mut R) -> DMatrix<f64> {
    DMatrix::from_fn(r, c, |_, _| StandardNormal.sample(rng))
}

pub fn random_point<R: Rng>(dims: &[usize], ranks: &[usize], rng: &mut R) -> Arc<ManifoldPoint> {
    ManifoldPoint::new(TuckerTensor::random(dims, ranks, rng).unwrap())
        .unwrap()
        .into_shared()
}

/// Random point with a Gaussian core, so the core matricizations are well
/// conditioned but not dominated by one singular value.
pub fn random_point_gaussian<R: Rng>(dims: &[usize], ranks: &[usize], rng: &mut R) -> Arc<ManifoldPoint> {
    let core = gaussian_tensor(ranks, rng);
    let factors = dims
        .iter()
        .zip(ranks)
        .map(|(&n, &r)| gaussian_matrix(n, r, rng))
        .collect();
    ManifoldPoint::new(TuckerTensor::orthonormalize(core, factors).unwrap())
        .unwrap()
        .into_shared()
}

pub fn random_tangent<R: Rng>(x: &Arc<ManifoldPoint>, rng: &mut R) -> TangentVector {
    project_to_tangent(x, &gaussian_tensor(x.dims(), rng)).unwrap()
}

pub fn unit_tangent<R: Rng>(x: &Arc<ManifoldPoint>, rng: &mut R) -> TangentVector {
    let t = random_tangent(x, rng);
    let n = t.norm();
    t.scaled(1.0 / n)
}

/// Column-major decoding of a linear index (first index fastest).
pub fn multi_index(dims: &[usize], mut lin: usize) -> Vec<usize> {
    dims.iter()
        .map(|&n| {
            let i = lin % n;
            lin /= n;
            i
        })
        .collect()
}

pub fn all_indices(dims: &[usize]) -> Vec<Vec<usize>> {
    let total: usize = dims.iter().product();
    (0..total).map(|l| multi_index(dims, l)).collect()
}

/// `m` distinct uniformly drawn multi-indices.
pub fn random_omega<R: Rng>(dims: &[usize], m: usize, rng: &mut R) -> Vec<Vec<usize>> {
    let total: usize = dims.iter().product();
    index::sample(rng, total, m)
        .into_iter()
        .map(|l| multi_index(dims, l))
        .collect()
}

pub fn sampled<R: Rng>(a: &DenseTensor, m: usize, rng: &mut R) -> SampledTensor {
    let omega = random_omega(a.dims(), m, rng);
    tucker_rtr::sample_project(a, &omega).unwrap()
}

/// Mode-`mode` unfolding, columns ordered with the lowest remaining mode
/// fastest.
pub fn naive_matricize(a: &DenseTensor, mode: usize) -> DMatrix<f64> {
    let dims = a.dims();
    let rows = dims[mode];
    let cols = a.len() / rows;
    let mut m = DMatrix::zeros(rows, cols);
    for idx in all_indices(dims) {
        let mut col = 0;
        let mut stride = 1;
        for (j, (&i, &n)) in idx.iter().zip(dims).enumerate() {
            if j != mode {
                col += i * stride;
                stride *= n;
            }
        }
        m[(idx[mode], col)] = a.get(&idx).unwrap();
    }
    m
}

/// `A ×_mode M` by explicit summation.
pub fn naive_mode_product(a: &DenseTensor, m: &DMatrix<f64>, mode: usize) -> DenseTensor {
    let mut dims = a.dims().to_vec();
    dims[mode] = m.nrows();
    let mut out = DenseTensor::zeros(&dims).unwrap();
    for idx in all_indices(&dims) {
        let mut src = idx.clone();
        let mut s = 0.0;
        for k in 0..a.dims()[mode] {
            src[mode] = k;
            s += m[(idx[mode], k)] * a.get(&src).unwrap();
        }
        out.set(&idx, s).unwrap();
    }
    out
}

/// `Σ_k G[k] Π_i V_i[·, k_i]`.
pub fn naive_tucker_full(core: &DenseTensor, factors: &[DMatrix<f64>]) -> DenseTensor {
    let dims: Vec<usize> = factors.iter().map(|f| f.nrows()).collect();
    let core_idx = all_indices(core.dims());
    let mut out = DenseTensor::zeros(&dims).unwrap();
    for idx in all_indices(&dims) {
        let mut s = 0.0;
        for k in &core_idx {
            let mut p = core.get(k).unwrap();
            for (i, f) in factors.iter().enumerate() {
                p *= f[(idx[i], k[i])];
            }
            s += p;
        }
        out.set(&idx, s).unwrap();
    }
    out
}

pub fn inner(a: &DenseTensor, b: &DenseTensor) -> f64 {
    a.data().iter().zip(b.data()).map(|(x, y)| x * y).sum()
}

pub fn max_diff(a: &DenseTensor, b: &DenseTensor) -> f64 {
    assert_eq!(a.dims(), b.dims());
    a.data()
        .iter()
        .zip(b.data())
        .fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

pub fn lin_comb(terms: &[(f64, &DenseTensor)]) -> DenseTensor {
    let mut out = DenseTensor::zeros(terms[0].1.dims()).unwrap();
    for (c, t) in terms {
        for (o, v) in out.data_mut().iter_mut().zip(t.data()) {
            *o += c * v;
        }
    }
    out
}

/// Ambient embedding built term by term from naive summations.
pub fn naive_tangent_ambient(xi: &TangentVector) -> DenseTensor {
    let x = xi.anchor();
    let base: Vec<DMatrix<f64>> = x.factors().to_vec();
    let mut terms = vec![naive_tucker_full(xi.core_dot(), &base)];
    for i in 0..x.order() {
        let mut f = base.clone();
        f[i] = xi.factor_dot(i).clone();
        terms.push(naive_tucker_full(x.core(), &f));
    }
    let refs: Vec<(f64, &DenseTensor)> = terms.iter().map(|t| (1.0, t)).collect();
    lin_comb(&refs)
}

/// Orthonormal basis of `T_X M_r` in the ambient space, from the canonical
/// parameter directions (unit core entries, unit factor entries) followed by
/// twice-iterated Gram–Schmidt.
pub fn tangent_basis(x: &ManifoldPoint) -> Vec<DenseTensor> {
    let factors: Vec<DMatrix<f64>> = x.factors().to_vec();
    let mut spanning = Vec::new();
    for k in all_indices(x.ranks()) {
        let mut e = DenseTensor::zeros(x.ranks()).unwrap();
        e.set(&k, 1.0).unwrap();
        spanning.push(naive_tucker_full(&e, &factors));
    }
    for (i, u) in factors.iter().enumerate() {
        for a in 0..u.nrows() {
            for b in 0..u.ncols() {
                let mut f = factors.clone();
                let mut unit = DMatrix::zeros(u.nrows(), u.ncols());
                unit[(a, b)] = 1.0;
                f[i] = unit;
                spanning.push(naive_tucker_full(x.core(), &f));
            }
        }
    }
    let mut basis: Vec<DenseTensor> = Vec::new();
    for mut v in spanning {
        let n0 = inner(&v, &v).sqrt();
        for _ in 0..2 {
            for b in &basis {
                let c = inner(&v, b);
                v = lin_comb(&[(1.0, &v), (-c, b)]);
            }
        }
        let n = inner(&v, &v).sqrt();
        if n > 1e-8 * n0.max(1.0) {
            basis.push(v.scaled(1.0 / n));
        }
    }
    basis
}

pub fn basis_project(basis: &[DenseTensor], z: &DenseTensor) -> DenseTensor {
    let terms: Vec<(f64, &DenseTensor)> = basis.iter().map(|b| (inner(b, z), b)).collect();
    lin_comb(&terms)
}

/// Left singular vectors of the naive unfolding, sorted, sign-normalized.
pub fn dominant_subspace(a: &DenseTensor, mode: usize, r: usize) -> DMatrix<f64> {
    let m = naive_matricize(a, mode);
    let svd = (&m * m.transpose()).symmetric_eigen();
    let mut order: Vec<usize> = (0..svd.eigenvalues.len()).collect();
    order.sort_by(|&p, &q| svd.eigenvalues[q].total_cmp(&svd.eigenvalues[p]));
    let mut u = DMatrix::from_fn(m.nrows(), r, |i, j| svd.eigenvectors[(i, order[j])]);
    for mut col in u.column_iter_mut() {
        let k = col.iamax();
        if col[k] < 0.0 {
            col.neg_mut();
        }
    }
    u
}

/// Dense truncated HOSVD `A ⨉_i U_i U_iᵀ`.
pub fn dense_hosvd(a: &DenseTensor, ranks: &[usize]) -> DenseTensor {
    let mut out = a.clone();
    for (mode, &r) in ranks.iter().enumerate() {
        let u = dominant_subspace(a, mode, r);
        out = naive_mode_product(&out, &(&u * u.transpose()), mode);
    }
    out
}

/// Dense gradient oracle `P_X(P_Ω(X − A))` through the basis projector.
pub fn dense_gradient(basis: &[DenseTensor], x_full: &DenseTensor, data: &SampledTensor) -> DenseTensor {
    basis_project(basis, &dense_residual(x_full, data))
}

pub fn dense_residual(x_full: &DenseTensor, data: &SampledTensor) -> DenseTensor {
    let mut e = DenseTensor::zeros(x_full.dims()).unwrap();
    for (idx, v) in data.iter() {
        e.set(idx, x_full.get(idx).unwrap() - v).unwrap();
    }
    e
}

pub fn dense_cost(x_full: &DenseTensor, data: &SampledTensor) -> f64 {
    data.iter()
        .map(|(idx, v)| (x_full.get(idx).unwrap() - v).powi(2))
        .sum::<f64>()
        * 0.5
}

/// Data `A` on `omega` making `x` a stationary point with a residual of
/// norm `scale`: the residual is drawn from the null space of
/// `e ↦ P_X(e)` restricted to vectors supported on `omega`. Requires
/// `|omega| > dim(M_r)`.
pub fn stationary_data<R: Rng>(
    x: &ManifoldPoint,
    omega: &[Vec<usize>],
    scale: f64,
    rng: &mut R,
) -> SampledTensor {
    let basis = tangent_basis(x);
    let m = DMatrix::from_fn(omega.len(), basis.len(), |w, k| basis[k].get(&omega[w]).unwrap());
    let svd = m.clone().svd(true, false);
    let u = svd.u.unwrap();
    let smax = svd.singular_values.max();
    let range: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&k| svd.singular_values[k] > 1e-10 * smax)
        .collect();
    let mut e = DVector::from_fn(omega.len(), |_, _| StandardNormal.sample(rng));
    for &k in &range {
        let c = u.column(k).dot(&e);
        e -= u.column(k) * c;
    }
    e *= scale / e.norm();
    let x_full = x.tucker().to_full();
    let entries = omega
        .iter()
        .enumerate()
        .map(|(w, idx)| (idx.clone(), x_full.get(idx).unwrap() - e[w]))
        .collect();
    SampledTensor::from_entries(x.dims().to_vec(), entries).unwrap()
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// A point of `M_r` from alternating (HOOI-type) refinement started at random
/// orthonormal factors: each sweep sets `U_i` to the dominant subspace of
/// `A ⨉_{j≠i} U_jᵀ`. Returns the dense approximation `A ⨉_i U_i U_iᵀ`.
pub fn alternating_candidate<R: Rng>(a: &DenseTensor, ranks: &[usize], sweeps: usize, rng: &mut R) -> DenseTensor {
    let d = ranks.len();
    let mut factors: Vec<DMatrix<f64>> = (0..d)
        .map(|i| gaussian_matrix(a.dims()[i], ranks[i], rng).qr().q())
        .collect();
    for _ in 0..sweeps {
        for i in 0..d {
            let mut t = a.clone();
            for (j, u) in factors.iter().enumerate() {
                if j != i {
                    t = naive_mode_product(&t, &u.transpose(), j);
                }
            }
            factors[i] = dominant_subspace(&t, i, ranks[i]);
        }
    }
    let mut out = a.clone();
    for (i, u) in factors.iter().enumerate() {
        out = naive_mode_product(&out, &(u * u.transpose()), i);
    }
    out
}
