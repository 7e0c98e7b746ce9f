//! Fixtures shared by the benchmarks.

use std::sync::Arc;

use tucker_rtr::solver::random_initial_point;
use tucker_rtr::{riemannian_gradient, sample_project, ManifoldPoint, SampledTensor, TangentVector};

pub struct Instance {
    pub x: Arc<ManifoldPoint>,
    pub data: SampledTensor,
    pub xi: TangentVector,
}

/// Order-3 instance with `samples` entries of a rank-`r` target, taken on a
/// fixed stride so the fixture needs no sampler. The direction is the
/// normalized gradient.
pub fn instance(n: usize, r: usize, samples: usize) -> Instance {
    let dims = [n, n, n];
    let ranks = [r, r, r];
    let total = n * n * n;
    assert!(samples >= 1 && samples <= total);
    let target = random_initial_point(&dims, &ranks, 7).unwrap().tucker().to_full();
    let omega: Vec<Vec<usize>> = (0..samples)
        .map(|k| {
            let l = k * total / samples;
            vec![l % n, (l / n) % n, l / (n * n)]
        })
        .collect();
    let data = sample_project(&target, &omega).unwrap();
    let x = random_initial_point(&dims, &ranks, 8).unwrap();
    let g = riemannian_gradient(&x, &data).unwrap();
    let xi = g.scaled(1.0 / g.norm());
    Instance { x, data, xi }
}
