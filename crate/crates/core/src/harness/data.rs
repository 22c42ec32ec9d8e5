use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

use super::MeanMode;

/// A mean vector family and its norm (0 for the null, `epsilon` otherwise).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanSpec {
    pub mode: MeanMode,
    pub norm: f64,
}

impl MeanSpec {
    pub fn new(mode: MeanMode, epsilon: f64) -> Self {
        let norm = if mode.is_null() { 0.0 } else { epsilon };
        Self { mode, norm }
    }

    pub fn validate(&self) -> Result<()> {
        if self.mode.is_null() && self.norm != 0.0 {
            return Err(Error::Parameter("null mean must have norm 0".into()));
        }
        if !self.mode.is_null() && !(self.norm > 0.0 && self.norm.is_finite()) {
            return Err(Error::Parameter(format!("alternative norm {} not positive", self.norm)));
        }
        Ok(())
    }
}

/// The mean vector for `spec` in dimension `d`. Only `random_direction`
/// consumes randomness.
pub fn make_mean<R: Rng + ?Sized>(spec: &MeanSpec, d: usize, rng: &mut R) -> Vec<f64> {
    match spec.mode {
        MeanMode::Null => vec![0.0; d],
        MeanMode::Spike => {
            let mut mu = vec![0.0; d];
            mu[0] = spec.norm;
            mu
        }
        MeanMode::Spread => vec![spec.norm / (d as f64).sqrt(); d],
        MeanMode::RandomDirection => loop {
            let g: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
            let len = g.iter().map(|v| v * v).sum::<f64>().sqrt();
            if len > 0.0 {
                break g.iter().map(|v| spec.norm * v / len).collect();
            }
        },
    }
}

/// `count` independent draws from `G(mu, I)`.
pub fn gen_gaussian_samples<R: Rng + ?Sized>(mu: &[f64], count: usize, rng: &mut R) -> Vec<Vec<f64>> {
    (0..count).map(|_| gaussian_sample(mu, rng)).collect()
}

pub(crate) fn gaussian_sample<R: Rng + ?Sized>(mu: &[f64], rng: &mut R) -> Vec<f64> {
    mu.iter()
        .map(|m| m + <StandardNormal as Distribution<f64>>::sample(&StandardNormal, rng))
        .collect()
}

/// `Pr[G(mu_i, 1) > 0] = erfc(-mu_i / sqrt 2) / 2`.
pub fn sign_flip_prob(mu_i: f64) -> f64 {
    0.5 * erfc(-mu_i / std::f64::consts::SQRT_2)
}
