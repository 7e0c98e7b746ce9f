//! Synthetic completion problems.

use std::sync::Arc;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use tucker_rtr::{sample_project, DenseTensor, ManifoldPoint, SampledTensor, TuckerTensor};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TruthKind {
    /// Uniform `(0,1)` core and factors, orthonormalized.
    LowRank,
    /// Dense uniform `(0,1)` entries.
    FullRank,
    /// Low-rank truth plus `σ·N(0,1)` entrywise.
    LowRankPlusNoise(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Sampling {
    /// `round(fraction · ∏ n_i)` indices drawn uniformly without replacement.
    Fraction(f64),
    /// Fixed 0-based multi-indices.
    Indices(Vec<Vec<usize>>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub dims: Vec<usize>,
    pub ranks: Vec<usize>,
    pub sampling: Sampling,
    pub truth: TruthKind,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct Problem {
    pub data: SampledTensor,
    pub truth: DenseTensor,
    /// Random initial guess drawn after the data.
    pub x0: Arc<ManifoldPoint>,
}

impl ProblemSpec {
    pub fn new(dims: &[usize], ranks: &[usize], fraction: f64, truth: TruthKind, seed: u64) -> Self {
        Self {
            dims: dims.to_vec(),
            ranks: ranks.to_vec(),
            sampling: Sampling::Fraction(fraction),
            truth,
            seed,
        }
    }

    fn validate(&self) -> CliResult<usize> {
        if self.dims.len() < 2 || self.dims.contains(&0) {
            return Err(CliError::Usage(format!("invalid dims {:?}", self.dims)));
        }
        if self.ranks.len() != self.dims.len() {
            return Err(CliError::Usage(format!(
                "rank {:?} does not match dims {:?}",
                self.ranks, self.dims
            )));
        }
        if let TruthKind::LowRankPlusNoise(s) = self.truth {
            if !(s >= 0.0 && s.is_finite()) {
                return Err(CliError::Usage(format!("noise level {s} must be nonnegative")));
            }
        }
        let total: usize = self.dims.iter().product();
        match &self.sampling {
            Sampling::Fraction(f) => {
                if !(*f > 0.0 && *f <= 1.0) {
                    return Err(CliError::Usage(format!("sampling fraction {f} outside (0, 1]")));
                }
                if f * (total as f64) < 1.0 {
                    return Err(CliError::Usage(format!(
                        "sampling fraction {f} selects no entry of {total}"
                    )));
                }
                Ok(((f * total as f64).round() as usize).clamp(1, total))
            }
            Sampling::Indices(idx) => Ok(idx.len()),
        }
    }
}

/// Draws truth, sampling set, noise and initial guess, in that order, from
/// one generator seeded with `spec.seed`.
pub fn generate_problem(spec: &ProblemSpec) -> CliResult<Problem> {
    let m = spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let truth = match spec.truth {
        TruthKind::FullRank => DenseTensor::from_fn(&spec.dims, |_| rng.random::<f64>())?,
        TruthKind::LowRank | TruthKind::LowRankPlusNoise(_) => {
            TuckerTensor::random(&spec.dims, &spec.ranks, &mut rng)?.to_full()
        }
    };
    let omega = match &spec.sampling {
        Sampling::Fraction(_) => uniform_omega(&spec.dims, m, &mut rng),
        Sampling::Indices(idx) => idx.clone(),
    };
    let mut data = sample_project(&truth, &omega)?;
    let truth = match spec.truth {
        TruthKind::LowRankPlusNoise(sigma) if sigma > 0.0 => {
            let mut noisy = truth;
            for v in noisy.data_mut() {
                *v += sigma * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng);
            }
            data = data.with_values(data.gather(&noisy)?)?;
            noisy
        }
        _ => truth,
    };
    let x0 = ManifoldPoint::new(TuckerTensor::random(&spec.dims, &spec.ranks, &mut rng)?)?.into_shared();
    Ok(Problem { data, truth, x0 })
}

/// `m` distinct multi-indices, uniform without replacement, sorted.
pub fn uniform_omega<R: Rng + ?Sized>(dims: &[usize], m: usize, rng: &mut R) -> Vec<Vec<usize>> {
    let total: usize = dims.iter().product();
    let mut lin = index::sample(rng, total, m).into_vec();
    lin.sort_unstable();
    lin.into_iter().map(|l| unravel(dims, l)).collect()
}

/// Column-major decoding of a linear index.
pub fn unravel(dims: &[usize], mut lin: usize) -> Vec<usize> {
    dims.iter()
        .map(|&n| {
            let i = lin % n;
            lin /= n;
            i
        })
        .collect()
}

/// Splits the samples into `(train, held_out)`; `held_fraction` of the
/// entries (at least one, and at least one kept) go to the second part.
pub fn held_out_split<R: Rng + ?Sized>(
    data: &SampledTensor,
    held_fraction: f64,
    rng: &mut R,
) -> CliResult<(SampledTensor, SampledTensor)> {
    let n = data.len();
    if n < 2 {
        return Err(CliError::Data("held-out split needs at least two samples".into()));
    }
    let k = ((held_fraction * n as f64).round() as usize).clamp(1, n - 1);
    let mut held = vec![false; n];
    for i in index::sample(rng, n, k) {
        held[i] = true;
    }
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for (i, (idx, v)) in data.iter().enumerate() {
        let part = if held[i] { &mut test } else { &mut train };
        part.push((idx.to_vec(), v));
    }
    let dims = data.dims().to_vec();
    Ok((
        SampledTensor::from_entries(dims.clone(), train)?,
        SampledTensor::from_entries(dims, test)?,
    ))
}
