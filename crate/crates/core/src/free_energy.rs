//! The free-energy agent-selection criterion.
//!
//! For every agent `i` the social learner forms the candidate policy
//!
//! ```text
//! π̃_i(a) = π_TS(a) · π̂_i(a)^(1/c) / Z(i),    Z(i) = Σ_a π_TS(a) · π̂_i(a)^(1/c)
//! ```
//!
//! which minimizes `F(i, π) = c·KL(π‖π_TS) + H(π) + KL(π‖π̂_i)`, with minimum
//! value `−c·log Z(i)`. The agent with the smallest minimum is followed.

use serde::{Deserialize, Serialize};

use crate::error::{invalid_param, Result, SblError};
use crate::policy::{entropy, kl, PolicyVector};

/// Free energies closer than this are treated as equal when selecting.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Weight `c ∈ (0, 1)` on the social learner's own TS policy.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct TradeoffConstant(f64);

impl TradeoffConstant {
    pub fn new(c: f64) -> Result<Self> {
        if !(c > 0.0 && c < 1.0) {
            return invalid_param(
                "c",
                format!("must lie strictly between 0 and 1 for convergence, got {c}"),
            );
        }
        Ok(Self(c))
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

impl Default for TradeoffConstant {
    fn default() -> Self {
        Self(0.5)
    }
}

impl TryFrom<f64> for TradeoffConstant {
    type Error = SblError;
    fn try_from(c: f64) -> Result<Self> {
        Self::new(c)
    }
}

impl From<TradeoffConstant> for f64 {
    fn from(c: TradeoffConstant) -> f64 {
        c.0
    }
}

/// Candidate policy and `log Z`, computed in log space.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub policy: PolicyVector,
    pub log_z: f64,
}

impl Candidate {
    pub fn z(&self) -> f64 {
        self.log_z.exp()
    }

    /// `−c · log Z`.
    pub fn free_energy(&self, c: TradeoffConstant) -> f64 {
        -c.value() * self.log_z
    }
}

/// Closed-form minimizer of `F(i, ·)` for a TS policy and an estimated
/// behavior policy, both strictly positive.
pub fn candidate_policy(
    ts: &PolicyVector,
    est: &PolicyVector,
    c: TradeoffConstant,
) -> Result<Candidate> {
    if ts.len() != est.len() {
        return Err(SblError::InvalidInput(format!(
            "policy lengths differ: {} vs {}",
            ts.len(),
            est.len()
        )));
    }
    let inv_c = 1.0 / c.value();
    let mut logw = Vec::with_capacity(ts.len());
    for (a, (&t, &e)) in ts.probs().iter().zip(est.probs()).enumerate() {
        if t <= 0.0 || e <= 0.0 {
            return Err(SblError::MustRegularize { index: a });
        }
        logw.push(t.ln() + inv_c * e.ln());
    }
    let peak = logw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = logw.iter().map(|&l| (l - peak).exp()).sum();
    let log_z = peak + sum.ln();
    let probs = logw.iter().map(|&l| (l - log_z).exp()).collect();
    Ok(Candidate {
        policy: PolicyVector::new(probs)?,
        log_z,
    })
}

/// `Z = Σ_a ts(a) · est(a)^(1/c)` for arbitrary non-negative `est` weights
/// (not necessarily normalized).
pub fn partition_value(ts: &PolicyVector, est: &[f64], c: TradeoffConstant) -> f64 {
    let inv_c = 1.0 / c.value();
    ts.probs()
        .iter()
        .zip(est)
        .map(|(&t, &e)| t * e.powf(inv_c))
        .sum()
}

/// `c·KL(π‖ts) + H(π) + KL(π‖est)`.
pub fn free_energy(
    pi: &PolicyVector,
    ts: &PolicyVector,
    est: &PolicyVector,
    c: TradeoffConstant,
) -> Result<f64> {
    Ok(c.value() * kl(pi, ts)? + entropy(pi) + kl(pi, est)?)
}

/// `−c · log Z` for `0 < Z ≤ 1`.
pub fn free_energy_min(z: f64, c: TradeoffConstant) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(SblError::InvalidInput(format!(
            "partition value must be positive, got {z}"
        )));
    }
    Ok(-c.value() * z.ln())
}

/// Argmin of the free energies. Within [`TIE_TOLERANCE`] of the minimum the
/// social learner itself wins, otherwise the lowest agent id.
pub fn select_agent(reports: &[(usize, f64)], sa_id: usize) -> Result<usize> {
    let min = reports
        .iter()
        .map(|&(_, f)| f)
        .fold(f64::INFINITY, f64::min);
    if reports.is_empty() || min.is_nan() {
        return Err(SblError::InvalidInput(
            "no free energies to select from".into(),
        ));
    }
    let tied = |f: f64| f - min <= TIE_TOLERANCE;
    if reports.iter().any(|&(id, f)| id == sa_id && tied(f)) {
        return Ok(sa_id);
    }
    Ok(reports
        .iter()
        .filter(|&&(_, f)| tied(f))
        .map(|&(id, _)| id)
        .min()
        .expect("minimum exists"))
}

/// One agent's entry in a [`FreeEnergyReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentEnergy {
    pub agent_id: usize,
    pub z: f64,
    pub free_energy: f64,
    pub candidate: PolicyVector,
}

/// Everything the social learner computed for one decision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreeEnergyReport {
    pub per_agent: Vec<AgentEnergy>,
    pub selected: usize,
    pub behavior: PolicyVector,
}

impl FreeEnergyReport {
    /// Evaluates every `(agent_id, estimated policy)` pair against the
    /// regularized TS policy and selects the minimum. When the social learner
    /// wins, `behavior` is `ts_behavior` (its own TS policy), otherwise the
    /// winner's candidate.
    pub fn evaluate(
        ts_regularized: &PolicyVector,
        ts_behavior: &PolicyVector,
        estimates: &[(usize, PolicyVector)],
        sa_id: usize,
        c: TradeoffConstant,
    ) -> Result<Self> {
        let per_agent = estimates
            .iter()
            .map(|(id, est)| {
                let cand = candidate_policy(ts_regularized, est, c)?;
                Ok(AgentEnergy {
                    agent_id: *id,
                    z: cand.z(),
                    free_energy: cand.free_energy(c),
                    candidate: cand.policy,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let pairs: Vec<(usize, f64)> = per_agent
            .iter()
            .map(|e| (e.agent_id, e.free_energy))
            .collect();
        let selected = select_agent(&pairs, sa_id)?;
        let behavior = if selected == sa_id {
            ts_behavior.clone()
        } else {
            per_agent
                .iter()
                .find(|e| e.agent_id == selected)
                .map(|e| e.candidate.clone())
                .expect("selected agent is in the report")
        };
        Ok(Self {
            per_agent,
            selected,
            behavior,
        })
    }

    pub fn energy_of(&self, agent_id: usize) -> Option<f64> {
        self.per_agent
            .iter()
            .find(|e| e.agent_id == agent_id)
            .map(|e| e.free_energy)
    }
}
