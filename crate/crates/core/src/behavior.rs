//! EMA action counts and the estimated behavior policies derived from them.

use serde::{Deserialize, Serialize};

use crate::error::{invalid_param, Result, SblError};
use crate::policy::{mix_uniform, regularize, PolicyVector};

/// Exponential moving average of one agent's observed actions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BehaviorCounts {
    counts: Vec<f64>,
    lambda: f64,
}

impl BehaviorCounts {
    /// All counts start at one.
    pub fn init(k: usize, lambda: f64) -> Result<Self> {
        if k < 2 {
            return invalid_param("K", format!("need at least 2 actions, got {k}"));
        }
        if !(0.0..=1.0).contains(&lambda) {
            return invalid_param("lambda", format!("must lie in [0, 1], got {lambda}"));
        }
        Ok(Self {
            counts: vec![1.0; k],
            lambda,
        })
    }

    pub fn counts(&self) -> &[f64] {
        &self.counts
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `N ← (1 − λ) N + λ e_observed`.
    pub fn ema_update(&mut self, observed: usize) -> Result<()> {
        if observed >= self.counts.len() {
            return Err(SblError::InvalidInput(format!(
                "observed action {observed} out of range for {} actions",
                self.counts.len()
            )));
        }
        let keep = 1.0 - self.lambda;
        self.counts.iter_mut().for_each(|n| *n *= keep);
        self.counts[observed] += self.lambda;
        Ok(())
    }

    /// Normalized counts, smoothed toward uniform with weight `smoothing_w`,
    /// then floored with `xi`. The result is strictly positive.
    pub fn estimate_policy(&self, smoothing_w: f64, xi: f64) -> Result<PolicyVector> {
        let total: f64 = self.counts.iter().sum();
        if !(total > 0.0) {
            return Err(SblError::InvalidState("behavior counts sum to zero".into()));
        }
        let raw = PolicyVector::from_weights(self.counts.clone())?;
        regularize(&mix_uniform(&raw, smoothing_w)?, xi)
    }
}

/// A set of arms drawn from a global catalog of `catalog_size` arms.
///
/// Local index `i` refers to `arms()[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionSubset {
    catalog_size: usize,
    arms: Vec<usize>,
}

impl ActionSubset {
    pub fn new(catalog_size: usize, arms: Vec<usize>) -> Result<Self> {
        if arms.is_empty() {
            return Err(SblError::Configuration("empty action set".into()));
        }
        for (i, &a) in arms.iter().enumerate() {
            if a >= catalog_size {
                return Err(SblError::Configuration(format!(
                    "action {a} is outside the {catalog_size}-arm catalog"
                )));
            }
            if arms[..i].contains(&a) {
                return Err(SblError::Configuration(format!(
                    "action {a} listed twice in action set"
                )));
            }
        }
        Ok(Self { catalog_size, arms })
    }

    pub fn full(catalog_size: usize) -> Self {
        Self {
            catalog_size,
            arms: (0..catalog_size).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.arms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arms.is_empty()
    }

    pub fn catalog_size(&self) -> usize {
        self.catalog_size
    }

    pub fn arms(&self) -> &[usize] {
        &self.arms
    }

    pub fn global(&self, local: usize) -> usize {
        self.arms[local]
    }

    pub fn local(&self, global: usize) -> Option<usize> {
        self.arms.iter().position(|&a| a == global)
    }
}

/// Maps an observed catalog action into the observer's local index space.
///
/// `Ok(None)` means the observer cannot take that action and the observation
/// is dropped.
pub fn restrict_observation(observed: usize, own: &ActionSubset) -> Result<Option<usize>> {
    if observed >= own.catalog_size {
        return Err(SblError::Configuration(format!(
            "observed action {observed} is not in the {}-arm catalog",
            own.catalog_size
        )));
    }
    Ok(own.local(observed))
}
