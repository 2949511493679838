use super::{argmax_lowest, Agent, AgentStreams, Decision};
use crate::behavior::ActionSubset;
use crate::env::BanditInstance;
use crate::error::{Result, SblError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NonLearnerKind {
    Optimal,
    SubOptimal,
    Random,
    Opponent,
    POptimal { p0: f64, delta: f64 },
}

/// Agents whose play depends only on the trial index and their own random
/// stream, never on rewards.
#[derive(Debug, Clone)]
pub struct NonLearner {
    kind: NonLearnerKind,
    set: ActionSubset,
    /// Best arm within the agent's own set, by true mean.
    best: usize,
    second: usize,
    worst: usize,
}

impl NonLearner {
    pub fn new(kind: NonLearnerKind, set: ActionSubset, env: &BanditInstance) -> Result<Self> {
        if set.is_empty() {
            return Err(SblError::Configuration("empty action set".into()));
        }
        let means: Vec<f64> = set.arms().iter().map(|&a| env.mean(a)).collect();
        // Stable sort keeps the lowest index first among equal means.
        let mut order: Vec<usize> = (0..means.len()).collect();
        order.sort_by(|&i, &j| means[j].total_cmp(&means[i]));
        let worst = argmax_lowest(means.iter().map(|m| -m));
        Ok(Self {
            kind,
            best: order[0],
            second: order.get(1).copied().unwrap_or(order[0]),
            worst,
            set,
        })
    }

    /// Probability of playing the best arm at `trial`.
    pub fn p_optimal(&self, trial: usize) -> Option<f64> {
        match self.kind {
            NonLearnerKind::POptimal { p0, delta } => {
                Some((p0 + trial as f64 * delta).clamp(0.0, 1.0))
            }
            _ => None,
        }
    }
}

impl Agent for NonLearner {
    fn act(&mut self, trial: usize, streams: &mut AgentStreams) -> Result<Decision> {
        let action = match self.kind {
            NonLearnerKind::Optimal => self.best,
            NonLearnerKind::SubOptimal => self.second,
            NonLearnerKind::Opponent => self.worst,
            NonLearnerKind::Random => streams.act.below(self.set.len()),
            NonLearnerKind::POptimal { .. } => {
                let p = self.p_optimal(trial).unwrap_or(0.0);
                if streams.act.unit() < p {
                    self.best
                } else {
                    streams.act.below(self.set.len())
                }
            }
        };
        Ok(Decision::plain(action))
    }

    fn observe_reward(&mut self, _action: usize, _reward: u8) -> Result<()> {
        Ok(())
    }

    fn action_set(&self) -> &ActionSubset {
        &self.set
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::Preset;
    use crate::rng::RandomStream;

    fn streams(seed: u64) -> AgentStreams {
        AgentStreams {
            act: RandomStream::from_seed(seed),
            posterior: RandomStream::from_seed(seed + 1),
        }
    }

    fn agent(kind: NonLearnerKind) -> NonLearner {
        let env = BanditInstance::preset(Preset::Delta02);
        NonLearner::new(kind, ActionSubset::full(10), &env).unwrap()
    }

    #[test]
    fn fixed_agents_on_wide_gap_instance() {
        let mut s = streams(3);
        let mut opt = agent(NonLearnerKind::Optimal);
        let mut sub = agent(NonLearnerKind::SubOptimal);
        let mut opp = agent(NonLearnerKind::Opponent);
        for t in 0..50 {
            assert_eq!(opt.act(t, &mut s).unwrap().action, 9);
            assert_eq!(sub.act(t, &mut s).unwrap().action, 8);
            assert_eq!(opp.act(t, &mut s).unwrap().action, 0);
        }
    }

    #[test]
    fn restricted_set_uses_local_ranking() {
        let env = BanditInstance::preset(Preset::Delta02);
        let set = ActionSubset::new(10, vec![2, 7, 4]).unwrap();
        let opt = NonLearner::new(NonLearnerKind::Optimal, set.clone(), &env).unwrap();
        let sub = NonLearner::new(NonLearnerKind::SubOptimal, set.clone(), &env).unwrap();
        let opp = NonLearner::new(NonLearnerKind::Opponent, set, &env).unwrap();
        assert_eq!(opt.set.global(opt.best), 7);
        assert_eq!(sub.set.global(sub.second), 4);
        assert_eq!(opp.set.global(opp.worst), 2);
    }

    #[test]
    fn tied_two_arm_instance() {
        let env = BanditInstance::two_arm(0.0).unwrap();
        let mk = |k| NonLearner::new(k, ActionSubset::full(2), &env).unwrap();
        assert_eq!(mk(NonLearnerKind::Optimal).best, 0);
        assert_eq!(mk(NonLearnerKind::SubOptimal).second, 1);
        assert_eq!(mk(NonLearnerKind::Opponent).worst, 0);
    }

    #[test]
    fn random_is_uniform_over_own_set() {
        let mut a = agent(NonLearnerKind::Random);
        let mut s = streams(11);
        let mut hits = [0u32; 10];
        let n = 50_000;
        for t in 0..n {
            hits[a.act(t, &mut s).unwrap().action] += 1;
        }
        for h in hits {
            assert!((h as f64 / n as f64 - 0.1).abs() < 0.006, "{hits:?}");
        }
    }

    #[test]
    fn p_optimal_schedule_reaches_random_at_trial_1000() {
        let a = agent(NonLearnerKind::POptimal {
            p0: 1.0,
            delta: -0.001,
        });
        assert_eq!(a.p_optimal(0), Some(1.0));
        assert!((a.p_optimal(500).unwrap() - 0.5).abs() < 1e-12);
        assert!(a.p_optimal(1000).unwrap().abs() < 1e-12);
        assert_eq!(a.p_optimal(5000), Some(0.0));
        let rising = agent(NonLearnerKind::POptimal {
            p0: 0.0,
            delta: 0.001,
        });
        assert_eq!(rising.p_optimal(3000), Some(1.0));
    }

    #[test]
    fn p_optimal_extremes_match_optimal_and_random() {
        let mut always = agent(NonLearnerKind::POptimal {
            p0: 1.0,
            delta: 0.0,
        });
        let mut s = streams(5);
        for t in 0..200 {
            assert_eq!(always.act(t, &mut s).unwrap().action, 9);
        }
        // p = 0 plays uniformly over all arms, the optimal one included.
        let mut never = agent(NonLearnerKind::POptimal {
            p0: 0.0,
            delta: 0.0,
        });
        let mut hits = [0u32; 10];
        let n = 50_000;
        for t in 0..n {
            hits[never.act(t, &mut s).unwrap().action] += 1;
        }
        for h in hits {
            assert!((h as f64 / n as f64 - 0.1).abs() < 0.006, "{hits:?}");
        }
    }

    #[test]
    fn p_optimal_frequency_tracks_schedule() {
        let mut a = agent(NonLearnerKind::POptimal {
            p0: 0.6,
            delta: 0.0,
        });
        let mut s = streams(8);
        let n = 40_000;
        let best = (0..n)
            .filter(|&t| a.act(t, &mut s).unwrap().action == 9)
            .count();
        // 0.6 + 0.4/10 of the uniform branch.
        assert!((best as f64 / n as f64 - 0.64).abs() < 0.01);
    }

    #[test]
    fn rewards_do_not_change_action_stream() {
        let mut a = agent(NonLearnerKind::Random);
        let mut b = agent(NonLearnerKind::Random);
        let (mut sa, mut sb) = (streams(21), streams(21));
        for t in 0..300 {
            let x = a.act(t, &mut sa).unwrap().action;
            let y = b.act(t, &mut sb).unwrap().action;
            assert_eq!(x, y);
            a.observe_reward(x, 1).unwrap();
            b.observe_reward(y, 0).unwrap();
        }
    }
}
