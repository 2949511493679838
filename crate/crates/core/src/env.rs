//! Stochastic Bernoulli bandit instances.

use serde::{Deserialize, Serialize};

use crate::error::{invalid_param, Result, SblError};
use crate::rng::RandomStream;

/// The three 10-armed reference instances, named by their optimality gap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Preset {
    Delta005,
    Delta01,
    Delta02,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::Delta005, Preset::Delta01, Preset::Delta02];

    pub fn means(self) -> &'static [f64; 10] {
        match self {
            Preset::Delta02 => &[0.05, 0.1, 0.15, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.9],
            Preset::Delta01 => &[0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9],
            Preset::Delta005 => &[0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.85, 0.9],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Preset::Delta005 => "delta005",
            Preset::Delta01 => "delta01",
            Preset::Delta02 => "delta02",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == name)
            .ok_or_else(|| {
                SblError::Configuration(format!(
                    "unknown preset `{name}` (expected delta005, delta01 or delta02)"
                ))
            })
    }

    /// Looks a preset up by its gap value.
    pub fn from_gap(gap: f64) -> Result<Self> {
        match gap {
            g if g == 0.05 => Ok(Preset::Delta005),
            g if g == 0.1 => Ok(Preset::Delta01),
            g if g == 0.2 => Ok(Preset::Delta02),
            g => Err(SblError::Configuration(format!(
                "no preset instance with gap {g}"
            ))),
        }
    }
}

/// A Bernoulli bandit: arm `a` pays 1 with probability `means[a]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BanditInstance {
    means: Vec<f64>,
    optimal_index: usize,
    gap: f64,
}

impl BanditInstance {
    pub fn new(means: Vec<f64>) -> Result<Self> {
        if means.len() < 2 {
            return Err(SblError::Configuration(format!(
                "a bandit needs at least 2 arms, got {}",
                means.len()
            )));
        }
        if let Some(m) = means.iter().find(|m| !(0.0..=1.0).contains(*m)) {
            return Err(SblError::Configuration(format!(
                "arm mean {m} is not a probability"
            )));
        }
        let mut optimal_index = 0;
        for (i, &m) in means.iter().enumerate() {
            if m > means[optimal_index] {
                optimal_index = i;
            }
        }
        let best = means[optimal_index];
        let second = means
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != optimal_index)
            .map(|(_, &m)| m)
            .fold(f64::NEG_INFINITY, f64::max);
        Ok(Self {
            means,
            optimal_index,
            gap: best - second,
        })
    }

    pub fn preset(p: Preset) -> Self {
        Self::new(p.means().to_vec()).expect("preset means are valid")
    }

    /// Two arms with means `[0.5, 0.5 + gap]`.
    pub fn two_arm(gap: f64) -> Result<Self> {
        if !(0.0..=0.5).contains(&gap) {
            return invalid_param("gap", format!("must lie in [0, 0.5], got {gap}"));
        }
        Self::new(vec![0.5, 0.5 + gap])
    }

    pub fn k(&self) -> usize {
        self.means.len()
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn mean(&self, a: usize) -> f64 {
        self.means[a]
    }

    pub fn optimal_index(&self) -> usize {
        self.optimal_index
    }

    pub fn best_mean(&self) -> f64 {
        self.means[self.optimal_index]
    }

    pub fn gap(&self) -> f64 {
        self.gap
    }

    /// Draws a Bernoulli reward for arm `a`.
    pub fn pull(&self, a: usize, rng: &mut RandomStream) -> Result<u8> {
        let mean = *self.means.get(a).ok_or_else(|| {
            SblError::InvalidInput(format!("arm {a} out of range for {} arms", self.k()))
        })?;
        Ok((rng.unit() < mean) as u8)
    }
}

/// With probability `p` replaces `a` by one of the other `k − 1` actions,
/// chosen uniformly.
pub fn noisy_observation(a: usize, p: f64, k: usize, rng: &mut RandomStream) -> Result<usize> {
    if k < 2 {
        return invalid_param("K", format!("noise needs at least 2 actions, got {k}"));
    }
    if !(0.0..=1.0).contains(&p) {
        return invalid_param("noise_p", format!("must lie in [0, 1], got {p}"));
    }
    if a >= k {
        return Err(SblError::InvalidInput(format!(
            "action {a} out of range for {k} actions"
        )));
    }
    if p == 0.0 || rng.unit() >= p {
        return Ok(a);
    }
    let b = rng.below(k - 1);
    Ok(if b >= a { b + 1 } else { b })
}
