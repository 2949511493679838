use super::learner::ArmStats;
use super::{argmax_lowest, Agent, AgentStreams, Decision};
use crate::behavior::{ActionSubset, BehaviorCounts};
use crate::belief::{BeliefState, TsEstimator};
use crate::error::{Result, SblError};
use crate::free_energy::{candidate_policy, FreeEnergyReport, TradeoffConstant};
use crate::hyper::{Hyperparameters, SelfEstimate};
use crate::policy::{regularize, sample_action, PolicyVector};

/// The free-energy social learner. Each trial it compares its own TS policy
/// with the estimated policy of every agent in the society (itself
/// included), imitates the one with the lowest free energy and falls back on
/// plain TS when that is itself.
#[derive(Debug, Clone)]
pub struct SblFeAgent {
    set: ActionSubset,
    self_id: usize,
    belief: BeliefState,
    estimator: TsEstimator,
    /// Indexed by agent id; `counts[self_id]` tracks the learner's own play.
    counts: Vec<BehaviorCounts>,
    c: TradeoffConstant,
    smoothing_w: f64,
    xi: f64,
    stride: usize,
    self_estimate: SelfEstimate,
    last: Option<FreeEnergyReport>,
}

impl SblFeAgent {
    pub fn new(
        set: ActionSubset,
        hyper: &Hyperparameters,
        self_id: usize,
        society_size: usize,
    ) -> Result<Self> {
        if self_id >= society_size {
            return Err(SblError::Configuration(format!(
                "social agent id {self_id} outside a society of {society_size}"
            )));
        }
        let k = set.len();
        let counts = (0..society_size)
            .map(|_| BehaviorCounts::init(k, hyper.lambda))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            belief: BeliefState::new(k)?,
            set,
            self_id,
            estimator: hyper.ts,
            counts,
            c: hyper.c,
            smoothing_w: hyper.smoothing_w,
            xi: hyper.xi,
            stride: hyper.fe_stride.max(1),
            self_estimate: hyper.self_estimate,
            last: None,
        })
    }

    pub fn belief(&self) -> &BeliefState {
        &self.belief
    }

    pub fn counts(&self, agent_id: usize) -> Option<&BehaviorCounts> {
        self.counts.get(agent_id)
    }

    /// Free-energy evaluation against the TS policy `ts`.
    pub fn evaluate(&self, ts: &PolicyVector) -> Result<FreeEnergyReport> {
        let ts_reg = regularize(ts, self.xi)?;
        let estimates = self
            .counts
            .iter()
            .enumerate()
            .map(|(id, n)| Ok((id, self.estimate(id, n, &ts_reg)?)))
            .collect::<Result<Vec<_>>>()?;
        FreeEnergyReport::evaluate(&ts_reg, ts, &estimates, self.self_id, self.c)
    }

    fn estimate(
        &self,
        id: usize,
        counts: &BehaviorCounts,
        ts_reg: &PolicyVector,
    ) -> Result<PolicyVector> {
        if id != self.self_id {
            return counts.estimate_policy(self.smoothing_w, self.xi);
        }
        match self.self_estimate {
            SelfEstimate::SmoothedCounts => counts.estimate_policy(self.smoothing_w, self.xi),
            SelfEstimate::Counts => counts.estimate_policy(0.0, self.xi),
            SelfEstimate::TsPolicy => Ok(ts_reg.clone()),
        }
    }

    /// Keeps the previous selection and only refreshes the behavior policy.
    fn reuse(&self, last: &FreeEnergyReport, ts: &PolicyVector) -> Result<FreeEnergyReport> {
        let behavior = if last.selected == self.self_id {
            ts.clone()
        } else {
            let est = self.counts[last.selected].estimate_policy(self.smoothing_w, self.xi)?;
            candidate_policy(&regularize(ts, self.xi)?, &est, self.c)?.policy
        };
        Ok(FreeEnergyReport {
            per_agent: last.per_agent.clone(),
            selected: last.selected,
            behavior,
        })
    }
}

impl Agent for SblFeAgent {
    fn act(&mut self, trial: usize, streams: &mut AgentStreams) -> Result<Decision> {
        let ts = self
            .estimator
            .policy(&self.belief, &mut streams.posterior)?;
        let report = match &self.last {
            Some(last) if !trial.is_multiple_of(self.stride) => self.reuse(last, &ts)?,
            _ => self.evaluate(&ts)?,
        };
        let action = sample_action(&report.behavior, &mut streams.act);
        let behavior = report.behavior.clone();
        if self.stride > 1 {
            self.last = Some(report.clone());
        }
        Ok(Decision {
            action,
            behavior: Some(behavior),
            report: Some(report),
        })
    }

    fn observe_reward(&mut self, action: usize, reward: u8) -> Result<()> {
        self.belief.update(action, reward)?;
        self.counts[self.self_id].ema_update(action)
    }

    fn observe_society(&mut self, observations: &[(usize, Option<usize>)]) -> Result<()> {
        for &(id, seen) in observations {
            if id == self.self_id {
                continue;
            }
            let Some(a) = seen else { continue };
            let counts = self.counts.get_mut(id).ok_or_else(|| {
                SblError::InvalidInput(format!("observation from unknown agent {id}"))
            })?;
            counts.ema_update(a)?;
        }
        Ok(())
    }

    fn action_set(&self) -> &ActionSubset {
        &self.set
    }
}

/// Observed selections per local arm, pooled over every observed agent.
fn tally(tallies: &mut [u64], observations: &[(usize, Option<usize>)], self_id: Option<usize>) {
    for &(id, seen) in observations {
        if Some(id) == self_id {
            continue;
        }
        if let Some(a) = seen {
            if let Some(m) = tallies.get_mut(a) {
                *m += 1;
            }
        }
    }
}

/// UCB that counts each observed selection of an arm as an extra pull with
/// reward 1.
#[derive(Debug, Clone)]
pub struct TucbAgent {
    set: ActionSubset,
    stats: ArmStats,
    observed: Vec<u64>,
    c: f64,
}

impl TucbAgent {
    pub fn new(set: ActionSubset, c: f64) -> Self {
        Self {
            stats: ArmStats::new(set.len()),
            observed: vec![0; set.len()],
            set,
            c,
        }
    }

    pub fn index(&self, a: usize, trial: f64) -> f64 {
        let n = self.stats.pulls[a] + self.observed[a];
        if n == 0 {
            return f64::INFINITY;
        }
        let mean = (self.stats.sums[a] + self.observed[a]) as f64 / n as f64;
        mean + (2.0 * self.c * trial.max(1.0).ln() / n as f64).sqrt()
    }
}

impl Agent for TucbAgent {
    fn act(&mut self, trial: usize, _streams: &mut AgentStreams) -> Result<Decision> {
        let t = trial as f64 + 1.0;
        let action = argmax_lowest((0..self.set.len()).map(|a| self.index(a, t)));
        Ok(Decision::plain(action))
    }

    fn observe_reward(&mut self, action: usize, reward: u8) -> Result<()> {
        self.stats.record(action, reward)
    }

    fn observe_society(&mut self, observations: &[(usize, Option<usize>)]) -> Result<()> {
        tally(&mut self.observed, observations, None);
        Ok(())
    }

    fn action_set(&self) -> &ActionSubset {
        &self.set
    }
}

/// UCB whose exploration bonus grows with how popular an arm is among the
/// observed agents.
#[derive(Debug, Clone)]
pub struct OucbAgent {
    set: ActionSubset,
    stats: ArmStats,
    observed: Vec<u64>,
    c: f64,
    beta1: f64,
    beta2: f64,
}

impl OucbAgent {
    pub fn new(set: ActionSubset, c: f64, beta1: f64, beta2: f64) -> Self {
        Self {
            stats: ArmStats::new(set.len()),
            observed: vec![0; set.len()],
            set,
            c,
            beta1,
            beta2,
        }
    }

    /// Pooled empirical policy of the observed agents, uniform before any
    /// observation.
    pub fn observed_policy(&self, a: usize) -> f64 {
        let total: u64 = self.observed.iter().sum();
        if total == 0 {
            1.0 / self.set.len() as f64
        } else {
            self.observed[a] as f64 / total as f64
        }
    }

    pub fn index(&self, a: usize, trial: f64) -> f64 {
        let n = self.stats.pulls[a];
        if n == 0 {
            return f64::INFINITY;
        }
        let k = self.set.len() as f64;
        let bonus = self.c * (2.0 * trial.max(1.0).ln() / n as f64).sqrt();
        self.stats.mean(a) + bonus * (self.beta1 + self.beta2 * self.observed_policy(a) * k)
    }
}

impl Agent for OucbAgent {
    fn act(&mut self, trial: usize, _streams: &mut AgentStreams) -> Result<Decision> {
        let t = trial as f64 + 1.0;
        let action = argmax_lowest((0..self.set.len()).map(|a| self.index(a, t)));
        Ok(Decision::plain(action))
    }

    fn observe_reward(&mut self, action: usize, reward: u8) -> Result<()> {
        self.stats.record(action, reward)
    }

    fn observe_society(&mut self, observations: &[(usize, Option<usize>)]) -> Result<()> {
        tally(&mut self.observed, observations, None);
        Ok(())
    }

    fn action_set(&self) -> &ActionSubset {
        &self.set
    }
}
