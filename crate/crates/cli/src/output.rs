//! Result files: CSV tables, `summary.json`, SVG charts and raw run logs.

use std::fs;
use std::path::{Path, PathBuf};

use sbl_core::harness::{ExperimentOutcome, SocietyConfig, TrialRecord};
use serde::Serialize;

use crate::error::{CliError, Result};
use crate::scenario::{echo, Scenario};
use crate::svg::{line_chart, Series};

/// One algorithm's experiment within a scenario.
#[derive(Debug, Clone)]
pub struct AlgorithmResult {
    pub algorithm: String,
    pub outcome: ExperimentOutcome,
}

#[derive(Serialize)]
struct FinalRow<'a> {
    algorithm: &'a str,
    runs: usize,
    horizon: usize,
    mean_cum_regret: f64,
    std_cum_regret: f64,
    ci95_half_width: f64,
    mean_cum_realized: f64,
    mean_tail_optimal_mass: f64,
}

#[derive(Serialize)]
struct Summary<'a> {
    scenario: &'a str,
    master_seed: u64,
    compare: Vec<&'a str>,
    results: Vec<FinalRow<'a>>,
    config: &'a SocietyConfig,
}

fn write(path: PathBuf, bytes: &[u8], written: &mut Vec<PathBuf>) -> Result<()> {
    fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
    written.push(path);
    Ok(())
}

fn csv_bytes(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let to_io = |e: csv::Error| CliError::io("<csv buffer>", std::io::Error::other(e));
    w.write_record(header).map_err(to_io)?;
    for row in rows {
        w.write_record(&row).map_err(to_io)?;
    }
    w.into_inner()
        .map_err(|e| CliError::io("<csv buffer>", std::io::Error::other(e.to_string())))
}

fn num(x: f64) -> String {
    format!("{x:.6}")
}

/// Writes every result file for `scenario` into `dir` and returns the paths
/// written.
pub fn emit_results(
    dir: &Path,
    scenario: &Scenario,
    results: &[AlgorithmResult],
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut written = Vec::new();

    let regret = csv_bytes(
        &["algorithm", "trial", "mean_cum_regret", "std_cum_regret"],
        results.iter().flat_map(|r| {
            let c = &r.outcome.curves;
            (0..c.horizon()).map(move |t| {
                vec![
                    r.algorithm.clone(),
                    (t + 1).to_string(),
                    num(c.mean_cum_regret[t]),
                    num(c.std_cum_regret[t]),
                ]
            })
        }),
    )?;
    write(dir.join("regret.csv"), &regret, &mut written)?;

    let social = results
        .iter()
        .find(|r| r.outcome.curves.selection.is_some());
    if let Some(r) = social {
        let c = &r.outcome.curves;
        let sel = c.selection.as_ref().expect("checked above");
        let rows = (0..c.horizon()).flat_map(|t| {
            sel.iter()
                .enumerate()
                .map(move |(a, row)| vec![(t + 1).to_string(), a.to_string(), num(row[t])])
        });
        let bytes = csv_bytes(&["trial", "agent_id", "frequency"], rows)?;
        write(dir.join("selection.csv"), &bytes, &mut written)?;
        if let Some(fe) = &c.mean_free_energy {
            let rows = (0..c.horizon()).flat_map(|t| {
                fe.iter()
                    .enumerate()
                    .map(move |(a, row)| vec![(t + 1).to_string(), a.to_string(), num(row[t])])
            });
            let bytes = csv_bytes(&["trial", "agent_id", "mean_F"], rows)?;
            write(dir.join("free_energy.csv"), &bytes, &mut written)?;
        }
    }

    let summary = Summary {
        scenario: &scenario.name,
        master_seed: scenario.config.master_seed,
        compare: scenario.compare.iter().map(|k| k.name()).collect(),
        results: results
            .iter()
            .map(|r| {
                let c = &r.outcome.curves;
                let last = c.horizon() - 1;
                let runs = &r.outcome.runs;
                FinalRow {
                    algorithm: &r.algorithm,
                    runs: c.runs,
                    horizon: c.horizon(),
                    mean_cum_regret: c.mean_cum_regret[last],
                    std_cum_regret: c.std_cum_regret[last],
                    ci95_half_width: c.ci95_half_width(last),
                    mean_cum_realized: c.mean_cum_realized[last],
                    mean_tail_optimal_mass: runs.iter().map(|s| s.tail_optimal_mass).sum::<f64>()
                        / runs.len() as f64,
                }
            })
            .collect(),
        config: &scenario.config,
    };
    let mut json = serde_json::to_vec_pretty(&summary)
        .map_err(|e| CliError::io("summary.json", std::io::Error::other(e)))?;
    json.push(b'\n');
    write(dir.join("summary.json"), &json, &mut written)?;
    write(
        dir.join("resolved.ini"),
        echo(scenario).as_bytes(),
        &mut written,
    )?;

    if scenario.output.svg {
        let chart = line_chart(
            &scenario.name,
            "trial",
            "cumulative regret",
            &regret_series(results),
        );
        write(dir.join("regret.svg"), chart.as_bytes(), &mut written)?;
        if let Some(r) = social {
            let c = &r.outcome.curves;
            let names = &c.agent_names;
            let plot = |rows: &[Vec<f64>], file: &str, label: &str, written: &mut Vec<PathBuf>| {
                let series: Vec<Series> = rows
                    .iter()
                    .zip(names)
                    .map(|(row, n)| Series {
                        name: n,
                        y: row,
                        band: None,
                    })
                    .collect();
                let chart = line_chart(&scenario.name, "trial", label, &series);
                write(dir.join(file), chart.as_bytes(), written)
            };
            if let Some(sel) = &c.selection {
                plot(sel, "selection.svg", "selection frequency", &mut written)?;
            }
            if let Some(fe) = &c.mean_free_energy {
                plot(fe, "free_energy.svg", "mean free energy", &mut written)?;
            }
        }
    }

    if scenario.output.raw_records {
        let raw = dir.join("raw");
        fs::create_dir_all(&raw).map_err(|e| CliError::io(&raw, e))?;
        for r in results {
            let Some(runs) = &r.outcome.records else {
                continue;
            };
            for (run, recs) in runs.iter().enumerate() {
                let bytes = raw_csv(recs)?;
                write(
                    raw.join(format!("{}_run{run:04}.csv", r.algorithm)),
                    &bytes,
                    &mut written,
                )?;
            }
        }
    }
    Ok(written)
}

/// Mean cumulative regret per algorithm with a band of two standard
/// deviations.
pub fn regret_series(results: &[AlgorithmResult]) -> Vec<Series<'_>> {
    results
        .iter()
        .map(|r| {
            let c = &r.outcome.curves;
            Series {
                name: &r.algorithm,
                y: &c.mean_cum_regret,
                band: Some(c.std_cum_regret.iter().map(|s| 2.0 * s).collect()),
            }
        })
        .collect()
}

fn raw_csv(records: &[TrialRecord]) -> Result<Vec<u8>> {
    csv_bytes(
        &[
            "trial",
            "sa_action",
            "sa_reward",
            "expected_regret",
            "realized_regret",
            "selected",
            "sa_optimal_mass",
            "actions",
        ],
        records.iter().map(|r| {
            vec![
                (r.t + 1).to_string(),
                r.sa_action.to_string(),
                r.sa_reward.to_string(),
                num(r.expected_regret),
                num(r.realized_regret),
                r.selected.map(|s| s.to_string()).unwrap_or_default(),
                num(r.sa_optimal_mass),
                r.actions
                    .iter()
                    .map(|a| a.to_string())
                    .collect::<Vec<_>>()
                    .join(";"),
            ]
        }),
    )
}
