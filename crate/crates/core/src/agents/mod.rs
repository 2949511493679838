//! Agent behaviors: non-learners, individual learners and social learners.

mod learner;
mod nonlearner;
mod social;

pub use learner::{eps_greedy_act, ucb_index, EpsGreedyAgent, ThompsonAgent, UcbAgent};
pub use nonlearner::{NonLearner, NonLearnerKind};
pub use social::{OucbAgent, SblFeAgent, TucbAgent};

use serde::{Deserialize, Serialize};

use crate::behavior::ActionSubset;
use crate::env::BanditInstance;
use crate::error::{Result, SblError};
use crate::free_energy::FreeEnergyReport;
use crate::hyper::Hyperparameters;
use crate::policy::PolicyVector;
use crate::rng::RandomStream;

/// What an agent is.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum AgentKind {
    Optimal,
    SubOptimal,
    Random,
    Opponent,
    /// Plays the best arm with probability `clamp(p0 + t·delta, 0, 1)`,
    /// otherwise uniformly at random.
    POptimal {
        p0: f64,
        delta: f64,
    },
    Ts,
    Ucb,
    EpsGreedy {
        eps0: f64,
        decay: f64,
    },
    SblFe,
    Tucb,
    Oucb,
}

impl AgentKind {
    /// Short name used in configuration files and result tables.
    pub fn name(&self) -> &'static str {
        match self {
            AgentKind::Optimal => "optimal",
            AgentKind::SubOptimal => "suboptimal",
            AgentKind::Random => "random",
            AgentKind::Opponent => "opponent",
            AgentKind::POptimal { .. } => "poptimal",
            AgentKind::Ts => "ts",
            AgentKind::Ucb => "ucb",
            AgentKind::EpsGreedy { .. } => "epsgreedy",
            AgentKind::SblFe => "sblfe",
            AgentKind::Tucb => "tucb",
            AgentKind::Oucb => "oucb",
        }
    }

    pub fn is_learner(&self) -> bool {
        matches!(
            self,
            AgentKind::Ts
                | AgentKind::Ucb
                | AgentKind::EpsGreedy { .. }
                | AgentKind::SblFe
                | AgentKind::Tucb
                | AgentKind::Oucb
        )
    }

    /// Kinds that learn from others' actions.
    pub fn is_social(&self) -> bool {
        matches!(self, AgentKind::SblFe | AgentKind::Tucb | AgentKind::Oucb)
    }

    /// Social baselines whose update rules are reconstructions.
    pub fn is_reconstructed(&self) -> bool {
        matches!(self, AgentKind::Tucb | AgentKind::Oucb)
    }

    fn validate(&self) -> Result<()> {
        match *self {
            AgentKind::POptimal { p0, delta } => {
                if !(0.0..=1.0).contains(&p0) || !delta.is_finite() {
                    return Err(SblError::Configuration(format!(
                        "p-optimal agent needs p0 in [0, 1] and finite delta, got p0={p0} delta={delta}"
                    )));
                }
            }
            AgentKind::EpsGreedy { eps0, decay } => {
                if !(0.0..=1.0).contains(&eps0) || !(decay > 0.0 && decay <= 1.0) {
                    return Err(SblError::Configuration(format!(
                        "epsilon-greedy agent needs eps0 in [0, 1] and decay in (0, 1], got eps0={eps0} decay={decay}"
                    )));
                }
            }
            _ => {}
        }
        Ok(())
    }
}

/// One member of a society.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentSpec {
    pub name: String,
    pub kind: AgentKind,
    pub action_set: ActionSubset,
}

impl AgentSpec {
    pub fn new(name: impl Into<String>, kind: AgentKind, action_set: ActionSubset) -> Self {
        Self {
            name: name.into(),
            kind,
            action_set,
        }
    }

    pub fn validate(&self, catalog_size: usize) -> Result<()> {
        self.kind.validate()?;
        if self.action_set.catalog_size() != catalog_size {
            return Err(SblError::Configuration(format!(
                "agent `{}` uses a {}-arm catalog but the environment has {catalog_size} arms",
                self.name,
                self.action_set.catalog_size()
            )));
        }
        if self.kind.is_learner() && self.action_set.len() < 2 {
            return Err(SblError::Configuration(format!(
                "learner `{}` needs at least 2 actions",
                self.name
            )));
        }
        Ok(())
    }
}

/// The random streams owned by one agent within one run.
#[derive(Debug, Clone)]
pub struct AgentStreams {
    pub act: RandomStream,
    pub posterior: RandomStream,
}

/// An agent's choice for one trial, in its own local action indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    pub action: usize,
    /// The distribution the action was drawn from, when there is one.
    pub behavior: Option<PolicyVector>,
    pub report: Option<FreeEnergyReport>,
}

impl Decision {
    pub fn plain(action: usize) -> Self {
        Self {
            action,
            behavior: None,
            report: None,
        }
    }
}

/// Runtime behavior shared by all agent kinds. Actions are local indices into
/// [`Agent::action_set`].
pub trait Agent: Send {
    fn act(&mut self, trial: usize, streams: &mut AgentStreams) -> Result<Decision>;

    /// Reward for the agent's own last action. Non-learners ignore it.
    fn observe_reward(&mut self, action: usize, reward: u8) -> Result<()>;

    /// Other agents' actions after noise and restriction to this agent's
    /// action set; `None` marks a dropped observation.
    fn observe_society(&mut self, _observations: &[(usize, Option<usize>)]) -> Result<()> {
        Ok(())
    }

    fn action_set(&self) -> &ActionSubset;
}

/// Builds the runtime state for `spec`, which sits at index `self_id` of a
/// society with `society_size` members.
pub fn build_agent(
    spec: &AgentSpec,
    env: &BanditInstance,
    hyper: &Hyperparameters,
    self_id: usize,
    society_size: usize,
) -> Result<Box<dyn Agent>> {
    spec.validate(env.k())?;
    let set = spec.action_set.clone();
    Ok(match spec.kind {
        AgentKind::Optimal => Box::new(NonLearner::new(NonLearnerKind::Optimal, set, env)?),
        AgentKind::SubOptimal => Box::new(NonLearner::new(NonLearnerKind::SubOptimal, set, env)?),
        AgentKind::Random => Box::new(NonLearner::new(NonLearnerKind::Random, set, env)?),
        AgentKind::Opponent => Box::new(NonLearner::new(NonLearnerKind::Opponent, set, env)?),
        AgentKind::POptimal { p0, delta } => Box::new(NonLearner::new(
            NonLearnerKind::POptimal { p0, delta },
            set,
            env,
        )?),
        AgentKind::Ts => Box::new(ThompsonAgent::new(set, hyper.ts)?),
        AgentKind::Ucb => Box::new(UcbAgent::new(set, hyper.ucb_c)),
        AgentKind::EpsGreedy { eps0, decay } => Box::new(EpsGreedyAgent::new(set, eps0, decay)),
        AgentKind::SblFe => Box::new(SblFeAgent::new(set, hyper, self_id, society_size)?),
        AgentKind::Tucb => Box::new(TucbAgent::new(set, hyper.tucb_c)),
        AgentKind::Oucb => Box::new(OucbAgent::new(
            set,
            hyper.oucb_c,
            hyper.oucb_beta1,
            hyper.oucb_beta2,
        )),
    })
}

/// Lowest index among the maxima of `values`.
pub(crate) fn argmax_lowest(values: impl IntoIterator<Item = f64>) -> usize {
    let mut best = 0;
    let mut best_val = f64::NEG_INFINITY;
    for (i, v) in values.into_iter().enumerate() {
        if v > best_val {
            best = i;
            best_val = v;
        }
    }
    best
}
