//! Scenario files, built-in experiment suites and result writers for the
//! `sbl` command.

pub mod error;
pub mod output;
pub mod scenario;
pub mod suites;
pub mod svg;

use std::path::{Path, PathBuf};

use sbl_core::harness::run_experiment;

pub use error::{CliError, Result};
pub use output::{emit_results, AlgorithmResult};
pub use scenario::{echo, parse_scenario, parse_scenario_str, Scenario};
pub use suites::{scenario_suite, SUITES};

/// Command-line adjustments applied on top of a scenario file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub runs: Option<usize>,
    pub horizon: Option<usize>,
    pub seed: Option<u64>,
    pub no_svg: bool,
    pub raw_records: bool,
}

impl Overrides {
    /// Seed precedence: explicit flag, then `SBL_SEED`, then the file.
    pub fn apply(&self, scenario: &mut Scenario, env_seed: Option<u64>) {
        let cfg = &mut scenario.config;
        if let Some(r) = self.runs {
            cfg.runs = r;
        }
        if let Some(h) = self.horizon {
            cfg.horizon = h;
        }
        if let Some(s) = self.seed.or(env_seed) {
            cfg.master_seed = s;
        }
        if self.no_svg {
            scenario.output.svg = false;
        }
        if self.raw_records {
            scenario.output.raw_records = true;
        }
    }
}

/// Runs the social agent and every compared algorithm in turn.
pub fn run_scenario(scenario: &Scenario, threads: usize) -> Result<Vec<AlgorithmResult>> {
    scenario.validate()?;
    scenario
        .variants()
        .into_iter()
        .map(|(algorithm, cfg)| {
            let outcome = run_experiment(&cfg, threads, scenario.output.raw_records)?;
            Ok(AlgorithmResult { algorithm, outcome })
        })
        .collect()
}

/// Runs `scenario` and writes its results under `dir`.
pub fn run_and_emit(scenario: &Scenario, dir: &Path, threads: usize) -> Result<Vec<PathBuf>> {
    let results = run_scenario(scenario, threads)?;
    emit_results(dir, scenario, &results)
}
