use super::{argmax_lowest, Agent, AgentStreams, Decision};
use crate::behavior::ActionSubset;
use crate::belief::{BeliefState, TsEstimator};
use crate::error::{Result, SblError};
use crate::policy::sample_action;
use crate::rng::RandomStream;

/// Thompson sampling: draws its action from the probability-of-optimality
/// policy of its Beta posteriors.
#[derive(Debug, Clone)]
pub struct ThompsonAgent {
    set: ActionSubset,
    belief: BeliefState,
    estimator: TsEstimator,
}

impl ThompsonAgent {
    pub fn new(set: ActionSubset, estimator: TsEstimator) -> Result<Self> {
        Ok(Self {
            belief: BeliefState::new(set.len())?,
            set,
            estimator,
        })
    }

    pub fn belief(&self) -> &BeliefState {
        &self.belief
    }
}

impl Agent for ThompsonAgent {
    fn act(&mut self, _trial: usize, streams: &mut AgentStreams) -> Result<Decision> {
        let ts = self
            .estimator
            .policy(&self.belief, &mut streams.posterior)?;
        let action = sample_action(&ts, &mut streams.act);
        Ok(Decision {
            action,
            behavior: Some(ts),
            report: None,
        })
    }

    fn observe_reward(&mut self, action: usize, reward: u8) -> Result<()> {
        self.belief.update(action, reward)
    }

    fn action_set(&self) -> &ActionSubset {
        &self.set
    }
}

/// Pull counts and reward sums per local arm.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct ArmStats {
    pub pulls: Vec<u64>,
    pub sums: Vec<u64>,
}

impl ArmStats {
    pub fn new(k: usize) -> Self {
        Self {
            pulls: vec![0; k],
            sums: vec![0; k],
        }
    }

    pub fn record(&mut self, action: usize, reward: u8) -> Result<()> {
        if action >= self.pulls.len() || reward > 1 {
            return Err(SblError::InvalidInput(format!(
                "bad reward observation: action {action}, reward {reward}"
            )));
        }
        self.pulls[action] += 1;
        self.sums[action] += u64::from(reward);
        Ok(())
    }

    /// Empirical mean, zero for unpulled arms.
    pub fn mean(&self, a: usize) -> f64 {
        if self.pulls[a] == 0 {
            0.0
        } else {
            self.sums[a] as f64 / self.pulls[a] as f64
        }
    }

    pub fn first_unpulled(&self) -> Option<usize> {
        self.pulls.iter().position(|&n| n == 0)
    }
}

/// `mean + sqrt(2·C·ln(trial) / n)`, infinite for an unpulled arm. `trial`
/// counts from 1; smaller values are treated as 1.
pub fn ucb_index(mean: f64, pulls: u64, trial: f64, c: f64) -> f64 {
    if pulls == 0 {
        return f64::INFINITY;
    }
    mean + (2.0 * c * trial.max(1.0).ln() / pulls as f64).sqrt()
}

#[derive(Debug, Clone)]
pub struct UcbAgent {
    set: ActionSubset,
    stats: ArmStats,
    c: f64,
}

impl UcbAgent {
    pub fn new(set: ActionSubset, c: f64) -> Self {
        Self {
            stats: ArmStats::new(set.len()),
            set,
            c,
        }
    }
}

impl Agent for UcbAgent {
    fn act(&mut self, trial: usize, _streams: &mut AgentStreams) -> Result<Decision> {
        let s = &self.stats;
        let t = trial as f64 + 1.0;
        let action = s.first_unpulled().unwrap_or_else(|| {
            argmax_lowest((0..s.pulls.len()).map(|a| ucb_index(s.mean(a), s.pulls[a], t, self.c)))
        });
        Ok(Decision::plain(action))
    }

    fn observe_reward(&mut self, action: usize, reward: u8) -> Result<()> {
        self.stats.record(action, reward)
    }

    fn action_set(&self) -> &ActionSubset {
        &self.set
    }
}

#[derive(Debug, Clone)]
pub struct EpsGreedyAgent {
    set: ActionSubset,
    stats: ArmStats,
    eps0: f64,
    decay: f64,
}

impl EpsGreedyAgent {
    pub fn new(set: ActionSubset, eps0: f64, decay: f64) -> Self {
        Self {
            stats: ArmStats::new(set.len()),
            set,
            eps0,
            decay,
        }
    }

    pub fn epsilon(&self, trial: usize) -> f64 {
        self.eps0 * self.decay.powf(trial as f64)
    }
}

/// One epsilon-greedy decision over empirical `means`: explore uniformly with
/// probability `eps`, otherwise exploit with lowest-index tie-breaking.
pub fn eps_greedy_act(means: &[f64], eps: f64, rng: &mut RandomStream) -> usize {
    if rng.unit() < eps {
        rng.below(means.len())
    } else {
        argmax_lowest(means.iter().copied())
    }
}

impl Agent for EpsGreedyAgent {
    fn act(&mut self, trial: usize, streams: &mut AgentStreams) -> Result<Decision> {
        let means: Vec<f64> = (0..self.set.len()).map(|a| self.stats.mean(a)).collect();
        let action = eps_greedy_act(&means, self.epsilon(trial), &mut streams.act);
        Ok(Decision::plain(action))
    }

    fn observe_reward(&mut self, action: usize, reward: u8) -> Result<()> {
        self.stats.record(action, reward)
    }

    fn action_set(&self) -> &ActionSubset {
        &self.set
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::belief::BetaPosterior;
    use std::f64::consts::E;

    fn streams(seed: u64) -> AgentStreams {
        AgentStreams {
            act: RandomStream::from_seed(seed),
            posterior: RandomStream::from_seed(seed ^ 0xdead),
        }
    }

    #[test]
    fn ts_reward_updates_posterior() {
        let mut a = ThompsonAgent::new(ActionSubset::full(3), TsEstimator::default()).unwrap();
        a.observe_reward(1, 1).unwrap();
        assert_eq!(
            a.belief().posteriors()[1],
            BetaPosterior::new(2.0, 1.0).unwrap()
        );
        a.observe_reward(1, 0).unwrap();
        assert_eq!(
            a.belief().posteriors()[1],
            BetaPosterior::new(2.0, 2.0).unwrap()
        );
    }

    #[test]
    fn ts_first_decision_is_uniform() {
        let mut a = ThompsonAgent::new(ActionSubset::full(4), TsEstimator::default()).unwrap();
        let d = a.act(0, &mut streams(1)).unwrap();
        for &p in d.behavior.unwrap().probs() {
            assert!((p - 0.25).abs() < 1e-9);
        }
    }

    #[test]
    fn ucb_index_examples() {
        assert!((ucb_index(1.0, 1, 1.0, 0.5) - 1.0).abs() < 1e-12);
        // sqrt(2·0.5·ln e / 1) = 1.
        assert!((ucb_index(1.0, 1, E, 0.5) - 2.0).abs() < 1e-12);
        assert_eq!(ucb_index(0.3, 0, 10.0, 0.5), f64::INFINITY);
        let at_100 = ucb_index(0.5, 4, 100.0, 2.0);
        assert!((at_100 - (0.5 + (4.0 * 100f64.ln() / 4.0).sqrt())).abs() < 1e-12);
    }

    #[test]
    fn ucb_pulls_every_arm_once_first() {
        let mut a = UcbAgent::new(ActionSubset::full(5), 0.5);
        let mut s = streams(0);
        let mut seen = Vec::new();
        for t in 0..5 {
            let d = a.act(t, &mut s).unwrap();
            seen.push(d.action);
            a.observe_reward(d.action, 1).unwrap();
        }
        assert_eq!(seen, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn ucb_ties_go_to_lowest_index() {
        let mut a = UcbAgent::new(ActionSubset::full(3), 0.5);
        for arm in 0..3 {
            a.observe_reward(arm, 1).unwrap();
        }
        assert_eq!(a.act(3, &mut streams(0)).unwrap().action, 0);
    }

    #[test]
    fn ucb_bookkeeping() {
        let mut a = UcbAgent::new(ActionSubset::full(2), 0.5);
        a.observe_reward(1, 1).unwrap();
        a.observe_reward(1, 0).unwrap();
        assert_eq!(a.stats.pulls, vec![0, 2]);
        assert_eq!(a.stats.sums, vec![0, 1]);
        assert!(a.observe_reward(2, 1).is_err());
    }

    #[test]
    fn epsilon_schedule() {
        let a = EpsGreedyAgent::new(ActionSubset::full(10), 0.9, 0.999);
        assert_eq!(a.epsilon(0), 0.9);
        assert!((a.epsilon(2302) - 0.0898).abs() < 1e-3);
        let flat = EpsGreedyAgent::new(ActionSubset::full(10), 0.9, 1.0);
        assert_eq!(flat.epsilon(10_000), 0.9);
    }

    #[test]
    fn greedy_without_exploration() {
        let mut rng = RandomStream::from_seed(4);
        for _ in 0..100 {
            assert_eq!(eps_greedy_act(&[0.2, 0.7, 0.7, 0.1], 0.0, &mut rng), 1);
        }
        // Unpulled arms count as mean zero.
        let mut a = EpsGreedyAgent::new(ActionSubset::full(3), 0.0, 1.0);
        a.observe_reward(2, 1).unwrap();
        assert_eq!(a.act(1, &mut streams(2)).unwrap().action, 2);
    }

    #[test]
    fn first_trial_explores_with_probability_eps0() {
        let mut rng = RandomStream::from_seed(99);
        let means = [0.0, 0.0, 0.0, 0.0, 1.0];
        let n = 40_000;
        let off = (0..n)
            .filter(|_| eps_greedy_act(&means, 0.9, &mut rng) != 4)
            .count();
        // Exploration lands off the greedy arm 4/5 of the time.
        assert!((off as f64 / n as f64 - 0.9 * 0.8).abs() < 0.01);
    }
}
