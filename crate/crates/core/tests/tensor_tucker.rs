mod common;

use common::*;
use nalgebra::DMatrix;
use tucker_rtr::tensor::DEFAULT_RANK_TOL;
use tucker_rtr::{sample_project, singular_spectrum, DenseTensor, Error, SampledTensor, TuckerTensor};

fn worked_example() -> DenseTensor {
    let mut a = DenseTensor::zeros(&[2, 2, 2]).unwrap();
    a.set(&[0, 0, 0], 1.0).unwrap();
    a.set(&[1, 1, 0], 1.0).unwrap();
    a
}

#[test]
fn worked_example_unfoldings_and_rank() {
    let a = worked_example();
    let a1 = a.matricize(0).unwrap();
    assert_eq!(a1, nalgebra::dmatrix![1.0, 0.0, 0.0, 0.0; 0.0, 1.0, 0.0, 0.0]);
    assert_eq!(a.matricize(1).unwrap(), a1);
    assert_eq!(a.matricize(2).unwrap(), nalgebra::dmatrix![1.0, 0.0, 0.0, 1.0; 0.0, 0.0, 0.0, 0.0]);
    assert_eq!(DenseTensor::tensorize(&a.matricize(2).unwrap(), 2, &[2, 2, 2]).unwrap(), a);
    assert_eq!(a.multilinear_rank(DEFAULT_RANK_TOL).unwrap(), vec![2, 2, 1]);
    let spectra = singular_spectrum(&a);
    assert_eq!(spectra[2].iter().filter(|&&s| s > 1e-12).count(), 1);
    let s = sample_project(&a, &[vec![0, 0, 0], vec![1, 1, 0]]).unwrap();
    assert_eq!(s.values(), &[1.0, 1.0]);
}

#[test]
fn unfoldings_match_naive_layout() {
    let mut g = rng(71);
    let a = gaussian_tensor(&[3, 4, 2, 3], &mut g);
    for mode in 0..4 {
        assert_eq!(a.matricize(mode).unwrap(), naive_matricize(&a, mode));
    }
}

#[test]
fn mode_products_match_naive_summation() {
    let mut g = rng(72);
    let a = gaussian_tensor(&[3, 4, 5], &mut g);
    for mode in 0..3 {
        let m = gaussian_matrix(2, a.dims()[mode], &mut g);
        let got = a.mode_product(&m, mode).unwrap();
        assert!(max_diff(&got, &naive_mode_product(&a, &m, mode)) <= 1e-13);
        let t = a.mode_product_transposed(&m.transpose(), mode).unwrap();
        assert!(max_diff(&t, &got) <= 1e-13);
    }
    assert!(matches!(
        a.mode_product(&DMatrix::zeros(2, 7), 1),
        Err(Error::DimensionMismatch(_))
    ));
    assert!(matches!(a.matricize(3), Err(Error::ModeOutOfRange { .. })));
}

#[test]
fn inner_product_trace_forms() {
    let mut g = rng(73);
    let a = gaussian_tensor(&[3, 3, 3], &mut g);
    let b = gaussian_tensor(&[3, 3, 3], &mut g);
    let ip = a.inner(&b).unwrap();
    for mode in 0..3 {
        let tr = (a.matricize(mode).unwrap().transpose() * b.matricize(mode).unwrap()).trace();
        assert!((ip - tr).abs() <= 1e-13);
    }
    assert_eq!(a.inner(&DenseTensor::zeros(&[3, 3, 3]).unwrap()).unwrap(), 0.0);
}

#[test]
fn constructed_rank_is_detected() {
    let mut g = rng(74);
    let core = gaussian_tensor(&[2, 2, 2], &mut g);
    let factors = vec![gaussian_matrix(6, 2, &mut g), gaussian_matrix(7, 2, &mut g), gaussian_matrix(8, 2, &mut g)];
    let full = naive_tucker_full(&core, &factors);
    assert_eq!(full.multilinear_rank(DEFAULT_RANK_TOL).unwrap(), vec![2, 2, 2]);
    assert_eq!(DenseTensor::zeros(&[3, 2, 2]).unwrap().multilinear_rank(DEFAULT_RANK_TOL).unwrap(), vec![0, 0, 0]);
}

#[test]
fn tucker_to_full_matches_naive_sum() {
    let mut g = rng(75);
    let x = random_point(&[5, 6, 7], &[2, 2, 2], &mut g);
    let naive = naive_tucker_full(x.core(), x.factors());
    assert!(max_diff(&x.tucker().to_full(), &naive) <= 1e-13);
}

#[test]
fn orthonormalize_preserves_tensor() {
    let mut g = rng(76);
    let core = gaussian_tensor(&[2, 2, 2], &mut g);
    let raw: Vec<DMatrix<f64>> = (0..3).map(|_| gaussian_matrix(4, 2, &mut g)).collect();
    let before = naive_tucker_full(&core, &raw);
    let t = TuckerTensor::orthonormalize(core.clone(), raw.clone()).unwrap();
    assert!(max_diff(&t.to_full(), &before) <= 1e-12);
    for u in t.factors() {
        assert!((u.transpose() * u - DMatrix::identity(2, 2)).amax() <= 1e-13);
    }
    let doubled: Vec<DMatrix<f64>> = raw.iter().map(|u| u * 2.0).collect();
    let t2 = TuckerTensor::orthonormalize(core.clone(), doubled).unwrap();
    assert!(max_diff(&t2.to_full(), &before.scaled(8.0)) <= 1e-11);
    let mut deficient = raw.clone();
    deficient[1] = DMatrix::from_fn(4, 2, |i, _| i as f64);
    assert!(matches!(
        TuckerTensor::orthonormalize(core, deficient),
        Err(Error::RankDeficientFactor { mode: 1 })
    ));
}

#[test]
fn hosvd_recovers_low_rank_and_untruncated_tensors() {
    let mut g = rng(77);
    let x = random_point(&[5, 6, 4], &[2, 3, 2], &mut g);
    let full = x.tucker().to_full();
    let h = TuckerTensor::hosvd(&full, &[2, 3, 2]).unwrap();
    assert!(max_diff(&h.to_full(), &full) <= 1e-12);
    let again = TuckerTensor::hosvd(&h.to_full(), &[2, 3, 2]).unwrap();
    assert!(max_diff(&again.to_full(), &h.to_full()) <= 1e-12);
    let a = gaussian_tensor(&[3, 4, 2], &mut g);
    assert!(max_diff(&TuckerTensor::hosvd(&a, &[3, 4, 2]).unwrap().to_full(), &a) <= 1e-12);
    assert!(matches!(
        TuckerTensor::hosvd(&a, &[4, 1, 1]),
        Err(Error::RankTooLarge { .. })
    ));
}

#[test]
fn hosvd_matches_dense_oracle() {
    let mut g = rng(78);
    let a = gaussian_tensor(&[6, 5, 4], &mut g);
    let h = TuckerTensor::hosvd(&a, &[3, 2, 2]).unwrap();
    assert!(max_diff(&h.to_full(), &dense_hosvd(&a, &[3, 2, 2])) <= 1e-12);
}

#[test]
fn hosvd_error_decreases_with_rank() {
    let mut g = rng(79);
    let a = gaussian_tensor(&[6, 6, 6], &mut g);
    let err = |r: [usize; 3]| TuckerTensor::hosvd(&a, &r).unwrap().to_full().sub(&a).unwrap().norm();
    let chain = [[1, 1, 1], [2, 2, 1], [2, 2, 2], [3, 2, 2], [3, 3, 3], [4, 4, 4], [6, 6, 6]];
    for w in chain.windows(2) {
        assert!(err(w[1]) <= err(w[0]) + 1e-12, "{:?} -> {:?}", w[0], w[1]);
    }
}

#[test]
fn hosvd_is_quasi_best() {
    let mut g = rng(80);
    let a = gaussian_tensor(&[8, 8, 8], &mut g);
    let hosvd_err = TuckerTensor::hosvd(&a, &[3, 3, 3]).unwrap().to_full().sub(&a).unwrap().norm();
    for _ in 0..5 {
        let cand = alternating_candidate(&a, &[3, 3, 3], 5, &mut g);
        let cand_err = cand.sub(&a).unwrap().norm();
        assert!(hosvd_err <= 3f64.sqrt() * cand_err);
    }
}

#[test]
fn sampled_entries_match_gathered_entries() {
    let mut g = rng(81);
    let x = random_point(&[3, 3, 3], &[2, 2, 2], &mut g);
    let full = x.tucker().to_full();
    let all = sample_project(&full, &all_indices(&[3, 3, 3])).unwrap();
    let vals = x.tucker().sampled_entries(&all).unwrap();
    for (v, w) in vals.iter().zip(all.values()) {
        assert!((v - w).abs() <= 1e-13);
    }
    let idx = vec![2, 0, 1];
    let single = SampledTensor::from_entries(vec![3, 3, 3], vec![(idx.clone(), 0.0)]).unwrap();
    let naive = naive_tucker_full(x.core(), x.factors()).get(&idx).unwrap();
    assert!((x.tucker().sampled_entries(&single).unwrap()[0] - naive).abs() <= 1e-13);

    let u = |n: usize, k: usize| DMatrix::from_fn(n, 1, |i, _| if i == k { 1.0 } else { 0.0 });
    let core = DenseTensor::new(vec![1, 1, 1], vec![2.5]).unwrap();
    let r1 = TuckerTensor::new(core, vec![u(3, 1), u(4, 0), u(2, 1)]).unwrap();
    let at = r1.entries_at(&[vec![1, 0, 1], vec![0, 0, 1]]).unwrap();
    assert_eq!(at, vec![2.5, 0.0]);
    assert!(r1.entries_at(&[vec![3, 0, 0]]).is_err());
}

#[test]
fn spectra_of_constructed_tensor() {
    let mut g = rng(82);
    let core = DenseTensor::from_fn(&[2, 2, 2], |i| match (i[0], i[1], i[2]) {
        (0, 0, 0) => 3.0,
        (1, 1, 1) => 1.0,
        _ => 0.0,
    })
    .unwrap();
    let factors = vec![
        gaussian_matrix(5, 2, &mut g).qr().q(),
        gaussian_matrix(4, 2, &mut g).qr().q(),
        gaussian_matrix(6, 2, &mut g).qr().q(),
    ];
    let t = TuckerTensor::new(core, factors).unwrap().to_full();
    for s in singular_spectrum(&t) {
        assert!((s[0] - 3.0).abs() <= 1e-12 && (s[1] - 1.0).abs() <= 1e-12);
        assert!(s[2..].iter().all(|&v| v <= 1e-12));
    }
    let z = singular_spectrum(&DenseTensor::zeros(&[2, 3, 2]).unwrap());
    assert!(z.iter().flatten().all(|&v| v == 0.0));
}
