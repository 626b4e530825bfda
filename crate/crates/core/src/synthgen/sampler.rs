use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// How a batch of draws spreads over the unit interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampling {
    /// One jittered draw per equal-width stratum, then shuffled.
    #[default]
    Stratified,
    /// Plain i.i.d. uniforms.
    Independent,
}

/// `n` uniforms on `[0, 1)` drawn according to `sampling`.
pub fn uniforms<R: Rng>(rng: &mut R, n: usize, sampling: Sampling) -> Vec<f64> {
    match sampling {
        Sampling::Independent => (0..n).map(|_| rng.gen::<f64>()).collect(),
        Sampling::Stratified => {
            let mut u: Vec<f64> = (0..n)
                .map(|i| (i as f64 + rng.gen::<f64>()) / n as f64)
                .collect();
            u.shuffle(rng);
            u
        }
    }
}

/// Discrete power law `P(x) ∝ x^-theta` on `min..=max`, sampled by
/// inverting a tabulated CDF.
#[derive(Debug, Clone)]
pub struct DiscretePowerLaw {
    min: u64,
    cdf: Vec<f64>,
}

impl DiscretePowerLaw {
    pub fn new(theta: f64, min: u64, max: u64) -> Result<Self> {
        if !(theta.is_finite() && theta > 0.0) {
            return Err(Error::Config(format!("power-law exponent must be positive, got {theta}")));
        }
        if min == 0 || max < min {
            return Err(Error::Config(format!("bad power-law support {min}..={max}")));
        }
        let mut acc = 0.0;
        let mut cdf: Vec<f64> = (min..=max)
            .map(|x| {
                acc += (x as f64).powf(-theta);
                acc
            })
            .collect();
        for c in &mut cdf {
            *c /= acc;
        }
        Ok(DiscretePowerLaw { min, cdf })
    }

    pub fn quantile(&self, u: f64) -> u64 {
        let i = self.cdf.partition_point(|&c| c <= u);
        self.min + i.min(self.cdf.len() - 1) as u64
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> u64 {
        self.quantile(rng.gen())
    }
}

/// Draws an index with probability proportional to its weight.
#[derive(Debug, Clone)]
pub(crate) struct WeightedIndex {
    members: Vec<usize>,
    cumulative: Vec<f64>,
}

impl WeightedIndex {
    /// Falls back to uniform weights when they are all zero.
    pub fn new(members: Vec<usize>, weight: impl Fn(usize) -> f64) -> Self {
        let mut acc = 0.0;
        let mut cumulative: Vec<f64> = members
            .iter()
            .map(|&m| {
                acc += weight(m).max(0.0);
                acc
            })
            .collect();
        if acc <= 0.0 {
            cumulative = (1..=members.len()).map(|i| i as f64).collect();
        }
        WeightedIndex { members, cumulative }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> Option<usize> {
        let total = *self.cumulative.last()?;
        let x = rng.gen::<f64>() * total;
        let i = self.cumulative.partition_point(|&c| c <= x);
        Some(self.members[i.min(self.members.len() - 1)])
    }
}
