//! Loading a sampled tensor, reporting its spectra and a held-out completion.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tucker_rtr::solver::trust_region_solve;
use tucker_rtr::{singular_spectrum, ManifoldPoint, SampledTensor, SolverConfig, SolverTrace, TuckerTensor};

use crate::error::{CliError, CliResult};
use crate::problem::held_out_split;

#[derive(Debug, Clone)]
pub struct HeldOutResult {
    pub ranks: Vec<usize>,
    pub train: usize,
    pub held_out: usize,
    /// `‖X_test − A_test‖ / ‖A_test‖` on the held-out entries.
    pub rel_error: f64,
    pub trace: SolverTrace,
}

#[derive(Debug, Clone)]
pub struct IngestReport {
    pub dims: Vec<usize>,
    pub samples: usize,
    /// Per-mode singular values, present only for fully sampled data.
    pub spectra: Option<Vec<Vec<f64>>>,
    pub completion: Option<HeldOutResult>,
}

/// Spectra (if every entry is known) and, given `ranks`, a completion run on
/// a random `1 − held_fraction` of the samples scored on the rest.
pub fn ingest_and_report(
    data: &SampledTensor,
    ranks: Option<&[usize]>,
    held_fraction: f64,
    config: &SolverConfig,
    seed: u64,
) -> CliResult<IngestReport> {
    let total: usize = data.dims().iter().product();
    let spectra = (data.len() == total).then(|| singular_spectrum(&data.to_dense()));
    let completion = match ranks {
        None => None,
        Some(ranks) => {
            if !(held_fraction > 0.0 && held_fraction < 1.0) {
                return Err(CliError::Usage(format!("held-out fraction {held_fraction} outside (0, 1)")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (train, test) = held_out_split(data, held_fraction, &mut rng)?;
            let x0 = ManifoldPoint::new(TuckerTensor::random(data.dims(), ranks, &mut rng)?)?.into_shared();
            let out = trust_region_solve(&train, ranks, config, Some(x0))?;
            let idx: Vec<Vec<usize>> = (0..test.len()).map(|k| test.index(k).to_vec()).collect();
            let pred = out.point.tucker().entries_at(&idx)?;
            let err: f64 = pred.iter().zip(test.values()).map(|(p, a)| (p - a).powi(2)).sum::<f64>().sqrt();
            Some(HeldOutResult {
                ranks: ranks.to_vec(),
                train: train.len(),
                held_out: test.len(),
                rel_error: err / test.norm(),
                trace: out.trace,
            })
        }
    };
    Ok(IngestReport {
        dims: data.dims().to_vec(),
        samples: data.len(),
        spectra,
        completion,
    })
}
