//! Steihaug–Toint truncated conjugate gradients for the trust-region
//! subproblem `min ⟨g,η⟩ + ½⟨H η, η⟩` subject to `‖η‖ ≤ Δ`.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::manifold::TangentVector;

use super::config::TcgConfig;
use super::trace::TcgStop;

/// Vector space operations needed by the CG recurrence.
pub trait InnerProductSpace: Clone {
    fn inner(&self, other: &Self) -> f64;
    /// `self += alpha * other`.
    fn axpy(&mut self, alpha: f64, other: &Self);
    fn scale(&mut self, alpha: f64);
    fn zero_like(&self) -> Self;

    fn norm(&self) -> f64 {
        self.inner(self).max(0.0).sqrt()
    }
}

impl InnerProductSpace for TangentVector {
    fn inner(&self, other: &Self) -> f64 {
        TangentVector::inner(self, other)
    }

    fn axpy(&mut self, alpha: f64, other: &Self) {
        TangentVector::axpy(self, alpha, other);
    }

    fn scale(&mut self, alpha: f64) {
        TangentVector::scale(self, alpha);
    }

    fn zero_like(&self) -> Self {
        TangentVector::zero(self.anchor())
    }
}

impl InnerProductSpace for DVector<f64> {
    fn inner(&self, other: &Self) -> f64 {
        self.dot(other)
    }

    fn axpy(&mut self, alpha: f64, other: &Self) {
        DVector::axpy(self, alpha, other, 1.0);
    }

    fn scale(&mut self, alpha: f64) {
        *self *= alpha;
    }

    fn zero_like(&self) -> Self {
        DVector::zeros(self.len())
    }
}

#[derive(Debug, Clone)]
pub struct TcgOutput<V> {
    pub eta: V,
    /// `H η`, accumulated along the iteration.
    pub h_eta: V,
    pub stop: TcgStop,
    pub iterations: usize,
}

impl<V: InnerProductSpace> TcgOutput<V> {
    /// `m(η) − m(0) = ⟨g,η⟩ + ½⟨Hη,η⟩`.
    pub fn model_change(&self, grad: &V) -> f64 {
        grad.inner(&self.eta) + 0.5 * self.h_eta.inner(&self.eta)
    }
}

/// Positive `τ` with `‖η + τ d‖ = Δ`.
fn boundary_step<V: InnerProductSpace>(eta: &V, d: &V, delta: f64) -> f64 {
    let ed = eta.inner(d);
    let dd = d.inner(d);
    let ee = eta.inner(eta);
    let disc = (ed * ed + dd * (delta * delta - ee)).max(0.0);
    (-ed + disc.sqrt()) / dd
}

/// Runs truncated CG from `η = 0` with at most `max_iters` Hessian
/// applications.
pub fn tcg_solve<V, H>(
    grad: &V,
    mut hess: H,
    delta: f64,
    config: &TcgConfig,
    max_iters: usize,
) -> Result<TcgOutput<V>>
where
    V: InnerProductSpace,
    H: FnMut(&V) -> Result<V>,
{
    let mut eta = grad.zero_like();
    let mut h_eta = grad.zero_like();
    let mut r = grad.clone();
    let mut rr = r.inner(&r);
    let r0 = rr.sqrt();
    if !r0.is_finite() {
        return Err(Error::NonFinite("gradient"));
    }
    let target = r0 * config.kappa.min(r0.powf(config.theta));
    if r0 == 0.0 {
        return Ok(TcgOutput {
            eta,
            h_eta,
            stop: TcgStop::ResidualTolerance,
            iterations: 0,
        });
    }
    let mut d = r.clone();
    d.scale(-1.0);

    for j in 0..max_iters {
        let hd = hess(&d)?;
        let dhd = d.inner(&hd);
        if !dhd.is_finite() {
            return Err(Error::NonFinite("Hessian application"));
        }
        let alpha = rr / dhd;
        let mut trial = eta.clone();
        trial.axpy(alpha, &d);
        if dhd <= 0.0 || trial.norm() >= delta {
            let tau = boundary_step(&eta, &d, delta);
            eta.axpy(tau, &d);
            h_eta.axpy(tau, &hd);
            return Ok(TcgOutput {
                eta,
                h_eta,
                stop: if dhd <= 0.0 {
                    TcgStop::NegativeCurvature
                } else {
                    TcgStop::Boundary
                },
                iterations: j + 1,
            });
        }
        eta = trial;
        h_eta.axpy(alpha, &hd);
        r.axpy(alpha, &hd);
        let rr_new = r.inner(&r);
        if rr_new.sqrt() <= target {
            return Ok(TcgOutput {
                eta,
                h_eta,
                stop: TcgStop::ResidualTolerance,
                iterations: j + 1,
            });
        }
        let beta = rr_new / rr;
        rr = rr_new;
        d.scale(beta);
        d.axpy(-1.0, &r);
    }
    Ok(TcgOutput {
        eta,
        h_eta,
        stop: TcgStop::MaxIterations,
        iterations: max_iters,
    })
}
