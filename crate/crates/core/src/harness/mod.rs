//! Society simulation: trial loop, observation channel and aggregation.

mod aggregate;
mod probe;

pub use aggregate::{
    regret_curves, run_experiment, AggregateCurves, ExperimentOutcome, RegretCurves, RunSummary,
};
pub use probe::{complexity_probe, ProbeRow};

use serde::{Deserialize, Serialize};

use crate::agents::{build_agent, Agent, AgentKind, AgentSpec, AgentStreams};
use crate::behavior::restrict_observation;
use crate::env::{noisy_observation, BanditInstance};
use crate::error::{Result, SblError};
use crate::hyper::Hyperparameters;
use crate::rng::{Purpose, RandomStream};

/// Everything needed to reproduce an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SocietyConfig {
    pub env: BanditInstance,
    pub agents: Vec<AgentSpec>,
    /// Index into `agents` of the learner whose regret is measured and who
    /// observes everyone else.
    pub social_agent: usize,
    pub horizon: usize,
    pub runs: usize,
    pub noise_p: f64,
    pub master_seed: u64,
    pub hyper: Hyperparameters,
    /// Allows the reconstructed social baselines (TUCB, OUCB).
    pub reconstructed: bool,
}

impl SocietyConfig {
    /// A society with default hyperparameters, 100 runs of 2000 trials and no
    /// observation noise.
    pub fn new(env: BanditInstance, agents: Vec<AgentSpec>, social_agent: usize) -> Self {
        Self {
            env,
            agents,
            social_agent,
            horizon: 2000,
            runs: 100,
            noise_p: 0.0,
            master_seed: 0,
            hyper: Hyperparameters::default(),
            reconstructed: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.hyper.validate()?;
        if self.horizon == 0 || self.runs == 0 {
            return Err(SblError::Configuration(format!(
                "horizon and runs must be at least 1, got horizon={} runs={}",
                self.horizon, self.runs
            )));
        }
        if !(0.0..=1.0).contains(&self.noise_p) {
            return Err(SblError::Configuration(format!(
                "noise_p must lie in [0, 1], got {}",
                self.noise_p
            )));
        }
        if self.social_agent >= self.agents.len() {
            return Err(SblError::Configuration(format!(
                "social agent index {} outside a society of {}",
                self.social_agent,
                self.agents.len()
            )));
        }
        for (i, spec) in self.agents.iter().enumerate() {
            spec.validate(self.env.k())?;
            if i != self.social_agent && spec.kind.is_social() {
                return Err(SblError::Configuration(format!(
                    "agent `{}` is a social learner but only one social agent is supported",
                    spec.name
                )));
            }
            if spec.kind.is_reconstructed() && !self.reconstructed {
                return Err(SblError::Configuration(format!(
                    "agent `{}` uses a reconstructed baseline; set baselines.reconstructed = true",
                    spec.name
                )));
            }
        }
        let sa = &self.agents[self.social_agent];
        if !sa.kind.is_learner() {
            return Err(SblError::Configuration(format!(
                "social agent `{}` must be a learner",
                sa.name
            )));
        }
        Ok(())
    }

    pub fn social_spec(&self) -> &AgentSpec {
        &self.agents[self.social_agent]
    }
}

/// One trial of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub t: usize,
    /// Global arm index played by the social agent.
    pub sa_action: usize,
    pub sa_reward: u8,
    /// Global arm index played by every agent, by agent id.
    pub actions: Vec<usize>,
    /// `μ* − μ_{a_t}` for the social agent.
    pub expected_regret: f64,
    /// `μ* − r_t` for the social agent.
    pub realized_regret: f64,
    pub selected: Option<usize>,
    /// Free energy per agent id, for the free-energy learner only.
    pub free_energies: Option<Vec<f64>>,
    /// Social agent's probability of playing the optimal arm this trial.
    pub sa_optimal_mass: f64,
}

/// Per-run mutable state: agents plus their random streams.
pub struct SocietyState<'a> {
    config: &'a SocietyConfig,
    agents: Vec<Box<dyn Agent>>,
    streams: Vec<AgentStreams>,
    rewards: Vec<RandomStream>,
    noise: RandomStream,
    observations: Vec<(usize, Option<usize>)>,
}

impl<'a> SocietyState<'a> {
    pub fn new(config: &'a SocietyConfig, run: usize) -> Result<Self> {
        let n = config.agents.len();
        let seed = config.master_seed;
        let agents = config
            .agents
            .iter()
            .enumerate()
            .map(|(id, spec)| build_agent(spec, &config.env, &config.hyper, id, n))
            .collect::<Result<Vec<_>>>()?;
        let stream = |id: usize, p: Purpose| RandomStream::derive(seed, run as u64, id as u64, p);
        Ok(Self {
            config,
            agents,
            streams: (0..n)
                .map(|id| AgentStreams {
                    act: stream(id, Purpose::Act),
                    posterior: stream(id, Purpose::Posterior),
                })
                .collect(),
            rewards: (0..n).map(|id| stream(id, Purpose::Reward)).collect(),
            noise: stream(config.social_agent, Purpose::Noise),
            observations: Vec::with_capacity(n),
        })
    }

    /// Plays trial `t`: every agent acts from its pre-trial state, receives
    /// its own reward, then the social agent sees the others' actions through
    /// the noisy, restricted observation channel.
    pub fn run_trial(&mut self, t: usize) -> Result<TrialRecord> {
        let cfg = self.config;
        let env = &cfg.env;
        let sa = cfg.social_agent;
        let mut local = Vec::with_capacity(self.agents.len());
        let mut actions = Vec::with_capacity(self.agents.len());
        let mut sa_decision = None;
        for (id, (agent, streams)) in self.agents.iter_mut().zip(&mut self.streams).enumerate() {
            let d = agent.act(t, streams)?;
            if d.action >= agent.action_set().len() {
                return Err(SblError::InvalidState(format!(
                    "agent {id} chose local action {} outside its set",
                    d.action
                )));
            }
            actions.push(agent.action_set().global(d.action));
            local.push(d.action);
            if id == sa {
                sa_decision = Some(d);
            }
        }
        let sa_decision = sa_decision.expect("social agent acted");

        let mut sa_reward = 0;
        for (id, agent) in self.agents.iter_mut().enumerate() {
            let r = env.pull(actions[id], &mut self.rewards[id])?;
            agent.observe_reward(local[id], r)?;
            if id == sa {
                sa_reward = r;
            }
        }

        if self.agents.len() > 1 {
            self.observations.clear();
            let own = self.agents[sa].action_set().clone();
            for (id, &a) in actions.iter().enumerate() {
                if id == sa {
                    continue;
                }
                let seen = noisy_observation(a, cfg.noise_p, env.k(), &mut self.noise)?;
                self.observations
                    .push((id, restrict_observation(seen, &own)?));
            }
            self.agents[sa].observe_society(&self.observations)?;
        }

        let best = env.best_mean();
        let sa_action = actions[sa];
        let own = self.agents[sa].action_set();
        let optimal_local = own.local(env.optimal_index());
        let sa_optimal_mass = match (&sa_decision.behavior, optimal_local) {
            (_, None) => 0.0,
            (Some(pi), Some(o)) => pi.get(o),
            (None, Some(o)) => f64::from(u8::from(sa_decision.action == o)),
        };
        let (selected, free_energies) = match &sa_decision.report {
            Some(r) => {
                let mut f = vec![f64::NAN; cfg.agents.len()];
                for e in &r.per_agent {
                    f[e.agent_id] = e.free_energy;
                }
                (Some(r.selected), Some(f))
            }
            None => (None, None),
        };
        Ok(TrialRecord {
            t,
            sa_action,
            sa_reward,
            actions,
            expected_regret: best - env.mean(sa_action),
            realized_regret: best - f64::from(sa_reward),
            selected,
            free_energies,
            sa_optimal_mass,
        })
    }
}

/// Runs one full trajectory of `config.horizon` trials.
pub fn run_single(config: &SocietyConfig, run: usize) -> Result<Vec<TrialRecord>> {
    let mut state = SocietyState::new(config, run)?;
    (0..config.horizon).map(|t| state.run_trial(t)).collect()
}

/// Whether the configured social agent reports free-energy selections.
pub(crate) fn reports_selection(config: &SocietyConfig) -> bool {
    matches!(config.social_spec().kind, AgentKind::SblFe)
}
