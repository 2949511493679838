use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::agents::{Agent, AgentStreams, SblFeAgent};
use crate::behavior::ActionSubset;
use crate::error::Result;
use crate::hyper::Hyperparameters;
use crate::rng::RandomStream;

/// Mean wall time of one free-energy decision for a society of `n` agents
/// over `k` arms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeRow {
    pub n: usize,
    pub k: usize,
    pub nanos_per_trial: f64,
}

/// Times the social learner's decide-observe-update cycle over a grid of
/// society sizes and arm counts, with synthetic observations so no
/// environment cost is included.
pub fn complexity_probe(
    n_values: &[usize],
    k_values: &[usize],
    hyper: &Hyperparameters,
    trials: usize,
) -> Result<Vec<ProbeRow>> {
    let mut rows = Vec::with_capacity(n_values.len() * k_values.len());
    for &k in k_values {
        for &n in n_values {
            let mut agent = SblFeAgent::new(ActionSubset::full(k), hyper, 0, n.max(1))?;
            let mut streams = AgentStreams {
                act: RandomStream::from_seed(1),
                posterior: RandomStream::from_seed(2),
            };
            let mut noise = RandomStream::from_seed(3);
            let mut obs: Vec<(usize, Option<usize>)> = (1..n).map(|id| (id, Some(0))).collect();
            let mut run = |count: usize| -> Result<()> {
                for t in 0..count {
                    let d = agent.act(t, &mut streams)?;
                    agent.observe_reward(d.action, u8::from(noise.unit() < 0.5))?;
                    for o in obs.iter_mut() {
                        o.1 = Some(noise.below(k));
                    }
                    agent.observe_society(&obs)?;
                }
                Ok(())
            };
            run(trials / 10 + 1)?;
            let start = Instant::now();
            run(trials)?;
            let nanos = start.elapsed().as_nanos() as f64 / trials.max(1) as f64;
            rows.push(ProbeRow {
                n,
                k,
                nanos_per_trial: nanos,
            });
        }
    }
    Ok(rows)
}
