//! Empirical order of the SD, Newton and Gauss–Newton models.
//!
//! For unit tangent directions `ξ_i` the model error
//! `e(ξ, h) = |f(R_X(hξ)) − m_X(hξ)|` is evaluated at `h = 2^{-j}`, and the
//! geometric mean over `i` of `e(ξ_i, 2^{-(j+1)}) / e(ξ_i, 2^{-j})` is
//! reported per `j`. A model of order `p` gives ratios near `2^{-p}`.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use tucker_rtr::solver::{ModelContext, ModelKind};
use tucker_rtr::{
    project_to_tangent, DenseTensor, ManifoldPoint, SampledTensor, TangentVector, TuckerTensor,
};

use crate::error::{CliError, CliResult};
use crate::problem::uniform_omega;

/// Errors below this are numerically zero and excluded from the ratios.
pub const ZERO_ERROR: f64 = 1e-16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    /// `A = X`: zero residual and zero gradient.
    StationaryLowRank,
    /// `P_Ω A = P_Ω X − E` with `E` supported on Ω and `P_X E = 0`. Falls back
    /// to a zero residual when no such `E` exists.
    StationaryResidual,
    /// Random `X` and a dense uniform full-rank `A`.
    Generic,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [Self::StationaryLowRank, Self::StationaryResidual, Self::Generic];

    pub fn name(self) -> &'static str {
        match self {
            Self::StationaryLowRank => "stationary-lowrank",
            Self::StationaryResidual => "stationary-residual",
            Self::Generic => "generic",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelOrderConfig {
    pub dims: Vec<usize>,
    pub ranks: Vec<usize>,
    pub sample_sizes: Vec<usize>,
    pub scenarios: Vec<Scenario>,
    pub trials: usize,
    pub j_max: usize,
    /// `‖E‖ / ‖P_Ω X‖` for [`Scenario::StationaryResidual`].
    pub residual_scale: f64,
    pub seed: u64,
}

impl Default for ModelOrderConfig {
    fn default() -> Self {
        Self {
            dims: vec![10, 10, 10],
            ranks: vec![3, 3, 3],
            sample_sizes: vec![10, 100, 1000],
            scenarios: Scenario::ALL.to_vec(),
            trials: 1000,
            j_max: 10,
            residual_scale: 0.5,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioStat {
    /// Ratio `e(2^{-(j+1)}) / e(2^{-j})`.
    pub j: usize,
    /// Geometric mean over the trials with both errors above [`ZERO_ERROR`];
    /// NaN if there are none.
    pub geo_mean: f64,
    pub zero_flags: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelRatios {
    pub model: ModelKind,
    pub by_j: Vec<RatioStat>,
}

impl ModelRatios {
    /// Largest and smallest finite ratio over `j ∈ js`.
    pub fn range(&self, js: std::ops::RangeInclusive<usize>) -> (f64, f64) {
        self.by_j
            .iter()
            .filter(|s| js.contains(&s.j) && s.geo_mean.is_finite())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| {
                (lo.min(s.geo_mean), hi.max(s.geo_mean))
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelOrderCase {
    pub scenario: Scenario,
    pub samples: usize,
    pub cost: f64,
    pub grad_norm: f64,
    pub residual_norm: f64,
    pub ratios: Vec<ModelRatios>,
}

impl ModelOrderCase {
    pub fn model(&self, kind: ModelKind) -> &ModelRatios {
        self.ratios.iter().find(|r| r.model == kind).expect("all models are evaluated")
    }
}

fn gaussian(dims: &[usize], rng: &mut ChaCha8Rng) -> CliResult<DenseTensor> {
    Ok(DenseTensor::from_fn(dims, |_| StandardNormal.sample(&mut *rng))?)
}

pub fn run_model_order(cfg: &ModelOrderConfig) -> CliResult<Vec<ModelOrderCase>> {
    if cfg.trials == 0 || cfg.j_max < 2 {
        return Err(CliError::Usage("model order needs trials >= 1 and j_max >= 2".into()));
    }
    let total: usize = cfg.dims.iter().product();
    if let Some(&m) = cfg.sample_sizes.iter().find(|&&m| m == 0 || m > total) {
        return Err(CliError::Usage(format!("sample size {m} outside 1..={total}")));
    }
    let hs: Vec<f64> = (0..=cfg.j_max).map(|j| 0.5f64.powi(j as i32)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut cases = Vec::new();
    for &m in &cfg.sample_sizes {
        for &scenario in &cfg.scenarios {
            let x = ManifoldPoint::new(TuckerTensor::random(&cfg.dims, &cfg.ranks, &mut rng)?)?.into_shared();
            let omega = uniform_omega(&cfg.dims, m, &mut rng);
            let x_omega = SampledTensor::from_entries(
                cfg.dims.clone(),
                omega.iter().cloned().zip(x.tucker().entries_at(&omega)?).collect(),
            )?;
            let data = match scenario {
                Scenario::StationaryLowRank => x_omega.clone(),
                Scenario::StationaryResidual => {
                    let e = stationary_residual(&x, &x_omega, cfg.residual_scale * x_omega.norm(), &mut rng)?;
                    let vals = x_omega.values().iter().zip(&e).map(|(v, r)| v - r).collect();
                    x_omega.with_values(vals)?
                }
                Scenario::Generic => {
                    let a = DenseTensor::from_fn(&cfg.dims, |_| rng.random::<f64>())?;
                    x_omega.with_values(x_omega.gather(&a)?)?
                }
            };
            let ctx = ModelContext::new(&x, &data)?;
            let residual_norm = ctx.evaluation().residual().norm();
            let kinds = ModelKind::ALL;
            // errors[trial][kind][j]
            let mut errors = Vec::with_capacity(cfg.trials);
            for _ in 0..cfg.trials {
                let xi = unit_direction(&x, &mut rng)?;
                errors.push(ctx.error_sweep(&kinds, &xi, &hs)?);
            }
            let ratios = kinds
                .iter()
                .enumerate()
                .map(|(k, &model)| ModelRatios {
                    model,
                    by_j: (0..cfg.j_max).map(|j| ratio_stat(&errors, k, j)).collect(),
                })
                .collect();
            cases.push(ModelOrderCase {
                scenario,
                samples: m,
                cost: ctx.value(),
                grad_norm: ctx.gradient().norm(),
                residual_norm,
                ratios,
            });
        }
    }
    Ok(cases)
}

fn unit_direction(x: &Arc<ManifoldPoint>, rng: &mut ChaCha8Rng) -> CliResult<TangentVector> {
    let xi = project_to_tangent(x, &gaussian(x.dims(), rng)?)?;
    let n = xi.norm();
    Ok(xi.scaled(1.0 / n))
}

fn ratio_stat(errors: &[Vec<Vec<f64>>], kind: usize, j: usize) -> RatioStat {
    let mut log_sum = 0.0;
    let mut used = 0;
    let mut zero_flags = 0;
    for e in errors {
        let (a, b) = (e[kind][j], e[kind][j + 1]);
        if a < ZERO_ERROR || b < ZERO_ERROR {
            zero_flags += 1;
        } else {
            log_sum += (b / a).ln();
            used += 1;
        }
    }
    RatioStat {
        j,
        geo_mean: if used == 0 { f64::NAN } else { (log_sum / used as f64).exp() },
        zero_flags,
    }
}

fn coordinates(v: &TangentVector) -> Vec<f64> {
    let mut c = v.core_dot().data().to_vec();
    for u in v.factor_dots() {
        c.extend_from_slice(u.as_slice());
    }
    c
}

/// A vector `E` on the support of `omega` with `P_X E = 0` and `‖E‖ = norm`,
/// drawn at random from that null space. Zero if the null space is trivial.
pub fn stationary_residual<R: Rng + ?Sized>(
    x: &Arc<ManifoldPoint>,
    omega: &SampledTensor,
    norm: f64,
    rng: &mut R,
) -> CliResult<Vec<f64>> {
    let m = omega.len();
    let mut cols = Vec::with_capacity(m);
    let mut unit = vec![0.0; m];
    for k in 0..m {
        unit[k] = 1.0;
        cols.push(coordinates(&project_to_tangent(x, &omega.with_values(unit.clone())?)?));
        unit[k] = 0.0;
    }
    let rows = cols[0].len();
    let map = DMatrix::from_fn(rows, m, |i, k| cols[k][i]);
    let svd = map.svd(false, true);
    let v_t = svd.v_t.expect("requested");
    let smax = svd.singular_values.max();
    let w = DVector::from_fn(m, |_, _| StandardNormal.sample(&mut *rng));
    let mut e = w.clone();
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s > 1e-10 * smax {
            let v = v_t.row(i).transpose();
            let c = v.dot(&w);
            e.axpy(-c, &v, 1.0);
        }
    }
    let n = e.norm();
    if n <= 1e-8 * w.norm() {
        return Ok(vec![0.0; m]);
    }
    Ok(e.iter().map(|v| v * norm / n).collect())
}
