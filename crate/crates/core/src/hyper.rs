//! Hyperparameters shared by every agent in a society.

use serde::{Deserialize, Serialize};

use crate::belief::TsEstimator;
use crate::error::{invalid_param, Result};
use crate::free_energy::TradeoffConstant;

/// What the free-energy learner uses as its own estimated policy when
/// scoring itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SelfEstimate {
    /// EMA counts of its own actions, smoothed like any other agent's.
    SmoothedCounts,
    /// EMA counts of its own actions, floored but not smoothed.
    Counts,
    /// Its current TS policy.
    TsPolicy,
}

impl SelfEstimate {
    pub fn name(self) -> &'static str {
        match self {
            SelfEstimate::SmoothedCounts => "smoothed_counts",
            SelfEstimate::Counts => "counts",
            SelfEstimate::TsPolicy => "ts_policy",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [Self::SmoothedCounts, Self::Counts, Self::TsPolicy]
            .into_iter()
            .find(|s| s.name() == name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperparameters {
    /// Weight on the social learner's own TS policy.
    pub c: TradeoffConstant,
    /// EMA step for behavior counts.
    pub lambda: f64,
    /// Uniform-mixing weight applied to estimated behavior policies.
    pub smoothing_w: f64,
    /// Floor added to TS and estimated policies before taking logs.
    pub xi: f64,
    pub ts: TsEstimator,
    pub self_estimate: SelfEstimate,
    pub ucb_c: f64,
    pub tucb_c: f64,
    pub oucb_c: f64,
    pub oucb_beta1: f64,
    pub oucb_beta2: f64,
    /// Initial exploration rate of epsilon-greedy learners.
    pub eps0: f64,
    /// Per-trial multiplicative epsilon decay.
    pub decay: f64,
    /// Recompute free energies every `fe_stride` trials.
    pub fe_stride: usize,
}

impl Default for Hyperparameters {
    fn default() -> Self {
        Self {
            c: TradeoffConstant::default(),
            lambda: 0.1,
            smoothing_w: 0.15,
            xi: 1e-6,
            ts: TsEstimator::default(),
            self_estimate: SelfEstimate::SmoothedCounts,
            ucb_c: 0.5,
            tucb_c: 2.0,
            oucb_c: 2.0,
            oucb_beta1: 0.5,
            oucb_beta2: 0.5,
            eps0: 0.9,
            decay: 0.999,
            fe_stride: 1,
        }
    }
}

impl Hyperparameters {
    pub fn validate(&self) -> Result<()> {
        TradeoffConstant::new(self.c.value())?;
        unit("lambda", self.lambda)?;
        unit("smoothing_w", self.smoothing_w)?;
        unit("eps0", self.eps0)?;
        if !(self.xi > 0.0 && self.xi.is_finite()) {
            return invalid_param("xi", format!("must be positive, got {}", self.xi));
        }
        if !(self.decay > 0.0 && self.decay <= 1.0) {
            return invalid_param("decay", format!("must lie in (0, 1], got {}", self.decay));
        }
        for (name, v) in [
            ("ucb_c", self.ucb_c),
            ("tucb_c", self.tucb_c),
            ("oucb_c", self.oucb_c),
            ("oucb_beta1", self.oucb_beta1),
            ("oucb_beta2", self.oucb_beta2),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return invalid_param(name, format!("must be non-negative, got {v}"));
            }
        }
        match self.ts {
            TsEstimator::MonteCarlo { samples } if samples == 0 => {
                return invalid_param("ts_samples", "must be at least 1")
            }
            TsEstimator::Quadrature { points } if points < 2 => {
                return invalid_param("ts_points", "must be at least 2")
            }
            _ => {}
        }
        if self.fe_stride == 0 {
            return invalid_param("fe_stride", "must be at least 1");
        }
        Ok(())
    }
}

fn unit(name: &'static str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return invalid_param(name, format!("must lie in [0, 1], got {v}"));
    }
    Ok(())
}
