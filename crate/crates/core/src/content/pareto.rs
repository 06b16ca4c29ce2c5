//! Truncated Pareto copy-count distribution.

use rand::Rng;

use crate::error::{Error, Result};

/// Truncated Pareto over `1..=max_copies`:
/// `phi_k = alpha / (gamma * k^(alpha+1))` with `gamma` the normalizing sum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParetoConfig {
    pub alpha: f64,
    /// `W`: the largest permitted copy count.
    pub max_copies: u32,
}

impl ParetoConfig {
    pub fn new(alpha: f64, max_copies: u32) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::Config(format!(
                "pareto alpha must be positive and finite, got {alpha}"
            )));
        }
        if max_copies == 0 {
            return Err(Error::Config("pareto max_copies must be at least 1".into()));
        }
        Ok(Self { alpha, max_copies })
    }

    /// Probability mass function over `1..=max_copies`; sums to 1.
    pub fn pmf(&self) -> Vec<f64> {
        let gamma: f64 = (1..=self.max_copies)
            .map(|k| self.alpha / (k as f64).powf(self.alpha + 1.0))
            .sum();
        (1..=self.max_copies)
            .map(|k| self.alpha / (gamma * (k as f64).powf(self.alpha + 1.0)))
            .collect()
    }
}

/// Inverse-CDF sampler for a [`ParetoConfig`].
#[derive(Clone, Debug)]
pub struct ParetoSampler {
    cumulative: Vec<f64>,
}

impl ParetoSampler {
    pub fn new(cfg: &ParetoConfig) -> Self {
        let mut acc = 0.0;
        let cumulative = cfg
            .pmf()
            .into_iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        Self { cumulative }
    }

    /// Draws a copy count in `1..=max_copies`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        let u: f64 = rng.gen();
        match self
            .cumulative
            .iter()
            .position(|&c| u < c)
        {
            Some(idx) => idx as u32 + 1,
            // Rounding can leave the final cumulative slightly below 1.
            None => self.cumulative.len() as u32,
        }
    }
}
