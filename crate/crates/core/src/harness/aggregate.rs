use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{reports_selection, SocietyConfig, SocietyState, TrialRecord};
use crate::error::{Result, SblError};

/// Cumulative regret of one run, trial by trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretCurves {
    /// `Σ (μ* − μ_{a_s})` up to each trial.
    pub expected: Vec<f64>,
    /// `t·μ* − Σ r_s` up to each trial.
    pub realized: Vec<f64>,
}

pub fn regret_curves(records: &[TrialRecord]) -> RegretCurves {
    let cum = |f: fn(&TrialRecord) -> f64| {
        records
            .iter()
            .scan(0.0, |acc, r| {
                *acc += f(r);
                Some(*acc)
            })
            .collect()
    };
    RegretCurves {
        expected: cum(|r| r.expected_regret),
        realized: cum(|r| r.realized_regret),
    }
}

/// Per-trial statistics across runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateCurves {
    /// Name of the social agent under test.
    pub algorithm: String,
    pub agent_names: Vec<String>,
    pub runs: usize,
    pub mean_cum_regret: Vec<f64>,
    pub std_cum_regret: Vec<f64>,
    pub mean_cum_realized: Vec<f64>,
    pub std_cum_realized: Vec<f64>,
    /// `selection[agent][t]`: fraction of runs selecting `agent` at trial `t`.
    pub selection: Option<Vec<Vec<f64>>>,
    /// `mean_free_energy[agent][t]`.
    pub mean_free_energy: Option<Vec<Vec<f64>>>,
    pub mean_optimal_mass: Vec<f64>,
}

impl AggregateCurves {
    pub fn horizon(&self) -> usize {
        self.mean_cum_regret.len()
    }

    pub fn final_regret(&self) -> f64 {
        *self.mean_cum_regret.last().expect("non-empty horizon")
    }

    /// Half-width of the normal 95% confidence interval of the mean
    /// cumulative regret at trial index `t`.
    pub fn ci95_half_width(&self, t: usize) -> f64 {
        1.96 * self.std_cum_regret[t] / (self.runs as f64).sqrt()
    }

    /// Mean selection frequency of `agent` over trial indices `range`.
    pub fn mean_selection(&self, agent: usize, range: std::ops::Range<usize>) -> Option<f64> {
        let row = self.selection.as_ref()?.get(agent)?;
        let slice = row.get(range)?;
        Some(slice.iter().sum::<f64>() / slice.len() as f64)
    }
}

/// Scalar outcomes of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub run: usize,
    pub final_expected_regret: f64,
    pub final_realized_regret: f64,
    /// Social agent's optimal-arm mass averaged over the last 100 trials.
    pub tail_optimal_mass: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutcome {
    pub curves: AggregateCurves,
    pub runs: Vec<RunSummary>,
    /// Full per-trial records, one vector per run, when requested.
    pub records: Option<Vec<Vec<TrialRecord>>>,
}

const TAIL: usize = 100;

struct RunTrace {
    expected: Vec<f64>,
    realized: Vec<f64>,
    optimal_mass: Vec<f64>,
    selected: Vec<u32>,
    /// Row-major `t × agents`.
    energies: Vec<f64>,
    records: Option<Vec<TrialRecord>>,
}

fn trace_run(config: &SocietyConfig, run: usize, keep: bool, selection: bool) -> Result<RunTrace> {
    let t_max = config.horizon;
    let n = config.agents.len();
    let mut state = SocietyState::new(config, run)?;
    let mut trace = RunTrace {
        expected: Vec::with_capacity(t_max),
        realized: Vec::with_capacity(t_max),
        optimal_mass: Vec::with_capacity(t_max),
        selected: Vec::with_capacity(if selection { t_max } else { 0 }),
        energies: Vec::with_capacity(if selection { t_max * n } else { 0 }),
        records: keep.then(|| Vec::with_capacity(t_max)),
    };
    let (mut exp, mut real) = (0.0, 0.0);
    for t in 0..t_max {
        let rec = state.run_trial(t)?;
        exp += rec.expected_regret;
        real += rec.realized_regret;
        trace.expected.push(exp);
        trace.realized.push(real);
        trace.optimal_mass.push(rec.sa_optimal_mass);
        if selection {
            trace.selected.push(rec.selected.unwrap_or(0) as u32);
            match &rec.free_energies {
                Some(f) => trace.energies.extend_from_slice(f),
                None => trace.energies.extend(std::iter::repeat_n(f64::NAN, n)),
            }
        }
        if let Some(r) = trace.records.as_mut() {
            r.push(rec);
        }
    }
    Ok(trace)
}

/// Mean and sample standard deviation across runs, per trial. The reduction
/// walks runs in index order so results do not depend on scheduling.
fn mean_std(traces: &[RunTrace], get: fn(&RunTrace) -> &[f64]) -> (Vec<f64>, Vec<f64>) {
    let r = traces.len() as f64;
    let t_max = get(&traces[0]).len();
    let mut mean = vec![0.0; t_max];
    for tr in traces {
        for (m, x) in mean.iter_mut().zip(get(tr)) {
            *m += x;
        }
    }
    mean.iter_mut().for_each(|m| *m /= r);
    let mut var = vec![0.0; t_max];
    for tr in traces {
        for ((v, x), m) in var.iter_mut().zip(get(tr)).zip(&mean) {
            *v += (x - m) * (x - m);
        }
    }
    let std = if traces.len() > 1 {
        var.iter().map(|v| (v / (r - 1.0)).sqrt()).collect()
    } else {
        vec![0.0; t_max]
    };
    (mean, std)
}

/// Runs `config.runs` independent trajectories, `threads` at a time (0 uses
/// every core), and aggregates them. Output is identical for any thread
/// count.
pub fn run_experiment(
    config: &SocietyConfig,
    threads: usize,
    keep_records: bool,
) -> Result<ExperimentOutcome> {
    config.validate()?;
    let selection = reports_selection(config);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| SblError::Configuration(format!("cannot start worker pool: {e}")))?;
    let traces = pool.install(|| {
        (0..config.runs)
            .into_par_iter()
            .map(|run| {
                trace_run(config, run, keep_records, selection).map_err(|e| match e {
                    SblError::NumericFailure(m) => {
                        SblError::NumericFailure(format!("run {run}: {m}"))
                    }
                    SblError::InvalidState(m) => SblError::InvalidState(format!("run {run}: {m}")),
                    other => other,
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let n = config.agents.len();
    let t_max = config.horizon;
    let r = traces.len() as f64;
    let (mean_cum_regret, std_cum_regret) = mean_std(&traces, |t| &t.expected);
    let (mean_cum_realized, std_cum_realized) = mean_std(&traces, |t| &t.realized);
    let (mean_optimal_mass, _) = mean_std(&traces, |t| &t.optimal_mass);

    let (selection_curves, energy_curves) = if selection {
        let mut sel = vec![vec![0.0; t_max]; n];
        let mut energy = vec![vec![0.0; t_max]; n];
        for tr in &traces {
            for t in 0..t_max {
                sel[tr.selected[t] as usize][t] += 1.0;
                for (a, row) in energy.iter_mut().enumerate() {
                    row[t] += tr.energies[t * n + a];
                }
            }
        }
        for row in sel.iter_mut().chain(energy.iter_mut()) {
            row.iter_mut().for_each(|x| *x /= r);
        }
        (Some(sel), Some(energy))
    } else {
        (None, None)
    };

    let tail = TAIL.min(t_max);
    let runs = traces
        .iter()
        .enumerate()
        .map(|(run, tr)| RunSummary {
            run,
            final_expected_regret: tr.expected[t_max - 1],
            final_realized_regret: tr.realized[t_max - 1],
            tail_optimal_mass: tr.optimal_mass[t_max - tail..].iter().sum::<f64>() / tail as f64,
        })
        .collect();
    let records = keep_records.then(|| {
        traces
            .into_iter()
            .map(|t| t.records.expect("records kept"))
            .collect()
    });
    Ok(ExperimentOutcome {
        curves: AggregateCurves {
            algorithm: config.social_spec().name.clone(),
            agent_names: config.agents.iter().map(|a| a.name.clone()).collect(),
            runs: config.runs,
            mean_cum_regret,
            std_cum_regret,
            mean_cum_realized,
            std_cum_realized,
            selection: selection_curves,
            mean_free_energy: energy_curves,
            mean_optimal_mass,
        },
        runs,
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agents::{AgentKind, AgentSpec};
    use crate::behavior::ActionSubset;
    use crate::env::{BanditInstance, Preset};

    fn society(kinds: &[AgentKind]) -> SocietyConfig {
        let agents = kinds
            .iter()
            .enumerate()
            .map(|(i, k)| {
                AgentSpec::new(
                    format!("{}{i}", k.name()),
                    k.clone(),
                    ActionSubset::full(10),
                )
            })
            .collect();
        let mut cfg = SocietyConfig::new(BanditInstance::preset(Preset::Delta02), agents, 0);
        cfg.horizon = 150;
        cfg.runs = 4;
        cfg.master_seed = 17;
        cfg
    }

    #[test]
    fn worst_arm_regret_arithmetic() {
        let recs: Vec<TrialRecord> = (0..100)
            .map(|t| TrialRecord {
                t,
                sa_action: 0,
                sa_reward: 0,
                actions: vec![0],
                expected_regret: 0.9 - 0.05,
                realized_regret: 0.9,
                selected: None,
                free_energies: None,
                sa_optimal_mass: 0.0,
            })
            .collect();
        let c = regret_curves(&recs);
        assert!((c.expected[99] - 85.0).abs() < 1e-9);
        assert!((c.realized[99] - 90.0).abs() < 1e-9);
    }

    #[test]
    fn single_run_curves_equal_the_run() {
        let mut cfg = society(&[AgentKind::SblFe, AgentKind::Optimal]);
        cfg.runs = 1;
        let out = run_experiment(&cfg, 1, true).unwrap();
        let recs = &out.records.as_ref().unwrap()[0];
        let c = regret_curves(recs);
        assert_eq!(out.curves.mean_cum_regret, c.expected);
        assert_eq!(out.curves.mean_cum_realized, c.realized);
        assert!(out.curves.std_cum_regret.iter().all(|&s| s == 0.0));
        let sel = out.curves.selection.as_ref().unwrap();
        for (t, r) in recs.iter().enumerate() {
            assert_eq!(sel[r.selected.unwrap()][t], 1.0);
        }
    }

    #[test]
    fn selection_frequencies_sum_to_one() {
        let cfg = society(&[AgentKind::SblFe, AgentKind::Optimal, AgentKind::Random]);
        let out = run_experiment(&cfg, 2, false).unwrap();
        let sel = out.curves.selection.unwrap();
        for t in 0..cfg.horizon {
            let s: f64 = sel.iter().map(|row| row[t]).sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let cfg = society(&[AgentKind::SblFe, AgentKind::Opponent, AgentKind::Random]);
        let a = run_experiment(&cfg, 1, false).unwrap();
        let b = run_experiment(&cfg, 3, false).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn expected_regret_is_monotone() {
        let cfg = society(&[AgentKind::Ucb, AgentKind::Random]);
        let out = run_experiment(&cfg, 1, false).unwrap();
        assert!(out.curves.selection.is_none());
        let m = &out.curves.mean_cum_regret;
        assert!(m[0] >= 0.0);
        assert!(m.windows(2).all(|w| w[1] >= w[0]));
    }
}
