//! Social bandit learning: a Thompson-sampling agent that decides, trial by
//! trial, whether to imitate another member of its society by comparing
//! free energies, together with the baselines, environments and simulation
//! harness used to evaluate it.

pub mod agents;
pub mod behavior;
pub mod belief;
pub mod env;
pub mod error;
pub mod free_energy;
pub mod harness;
pub mod hyper;
pub mod policy;
pub mod rng;

pub use agents::{AgentKind, AgentSpec};
pub use behavior::{ActionSubset, BehaviorCounts};
pub use belief::{BeliefState, BetaPosterior, TsEstimator};
pub use env::{BanditInstance, Preset};
pub use error::{Result, SblError};
pub use free_energy::{FreeEnergyReport, TradeoffConstant};
pub use hyper::Hyperparameters;
pub use policy::PolicyVector;
pub use rng::{Purpose, RandomStream};
