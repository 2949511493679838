use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use sbl_cli::output::regret_series;
use sbl_cli::{parse_scenario, parse_scenario_str, run_scenario};

const SCENARIO: &str = "\
[scenario]
name = small
[environment]
means = 0.2, 0.5, 0.8
[run]
horizon = 60
runs = 4
master_seed = 11
[compare]
algorithms = ts
[agent.sa]
kind = sblfe
[agent.expert]
kind = optimal
";

fn sbl(args: &[&str], seed_env: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_sbl"));
    cmd.args(args).env_remove("SBL_SEED");
    if let Some(s) = seed_env {
        cmd.env("SBL_SEED", s);
    }
    cmd.output().expect("binary runs")
}

fn write_scenario(dir: &Path, text: &str) -> String {
    let p = dir.join("scenario.ini");
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn header(path: &Path) -> String {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .next()
        .unwrap()
        .to_owned()
}

#[test]
fn run_writes_every_result_file() {
    let tmp = tempfile::tempdir().unwrap();
    let file = write_scenario(tmp.path(), SCENARIO);
    let out = tmp.path().join("out");
    let o = sbl(
        &[
            "run",
            &file,
            "--out",
            out.to_str().unwrap(),
            "--threads",
            "1",
        ],
        None,
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    assert_eq!(
        header(&out.join("regret.csv")),
        "algorithm,trial,mean_cum_regret,std_cum_regret"
    );
    assert_eq!(
        header(&out.join("selection.csv")),
        "trial,agent_id,frequency"
    );
    assert_eq!(
        header(&out.join("free_energy.csv")),
        "trial,agent_id,mean_F"
    );
    for f in [
        "summary.json",
        "resolved.ini",
        "regret.svg",
        "selection.svg",
        "free_energy.svg",
    ] {
        assert!(out.join(f).is_file(), "missing {f}");
    }

    let regret = fs::read_to_string(out.join("regret.csv")).unwrap();
    let algs: std::collections::BTreeSet<&str> = regret
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(algs.into_iter().collect::<Vec<_>>(), ["sblfe", "ts"]);
    assert_eq!(regret.lines().count(), 1 + 2 * 60);

    let selection = fs::read_to_string(out.join("selection.csv")).unwrap();
    assert_eq!(selection.lines().count(), 1 + 2 * 60);
}

#[test]
fn resolved_scenario_reproduces_the_run() {
    let tmp = tempfile::tempdir().unwrap();
    let file = write_scenario(tmp.path(), SCENARIO);
    let first = tmp.path().join("first");
    let second = tmp.path().join("second");
    assert!(sbl(
        &["run", &file, "--out", first.to_str().unwrap(), "--no-svg"],
        None
    )
    .status
    .success());
    let resolved = first.join("resolved.ini");
    let again = parse_scenario(&resolved).unwrap();
    assert_eq!(again.config.master_seed, 11);
    assert!(sbl(
        &[
            "run",
            resolved.to_str().unwrap(),
            "--out",
            second.to_str().unwrap(),
            "--no-svg"
        ],
        None
    )
    .status
    .success());
    for f in [
        "regret.csv",
        "selection.csv",
        "free_energy.csv",
        "resolved.ini",
    ] {
        assert_eq!(
            fs::read(first.join(f)).unwrap(),
            fs::read(second.join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn seed_flag_beats_environment_which_beats_file() {
    let tmp = tempfile::tempdir().unwrap();
    let file = write_scenario(tmp.path(), SCENARIO);
    let seed_of = |dir: &Path| -> u64 {
        let v: serde_json::Value =
            serde_json::from_slice(&fs::read(dir.join("summary.json")).unwrap()).unwrap();
        v["master_seed"].as_u64().unwrap()
    };
    let env_dir = tmp.path().join("env");
    let flag_dir = tmp.path().join("flag");
    assert!(sbl(
        &["run", &file, "--out", env_dir.to_str().unwrap(), "--no-svg"],
        Some("77")
    )
    .status
    .success());
    assert!(sbl(
        &[
            "run",
            &file,
            "--out",
            flag_dir.to_str().unwrap(),
            "--no-svg",
            "--seed",
            "5"
        ],
        Some("77")
    )
    .status
    .success());
    assert_eq!(seed_of(&env_dir), 77);
    assert_eq!(seed_of(&flag_dir), 5);
}

#[test]
fn ts_only_scenario_has_no_selection_output() {
    let tmp = tempfile::tempdir().unwrap();
    let text =
        "[environment]\nmeans = 0.3, 0.6\n[run]\nhorizon = 30\nruns = 2\n[agent.sa]\nkind = ts\n";
    let file = write_scenario(tmp.path(), text);
    let out = tmp.path().join("out");
    let o = sbl(&["run", &file, "--out", out.to_str().unwrap()], None);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("regret.csv").is_file());
    assert!(!out.join("selection.csv").exists());
    assert!(!out.join("free_energy.csv").exists());
}

#[test]
fn raw_records_are_written_per_run() {
    let tmp = tempfile::tempdir().unwrap();
    let file = write_scenario(tmp.path(), SCENARIO);
    let out = tmp.path().join("out");
    assert!(sbl(
        &[
            "run",
            &file,
            "--out",
            out.to_str().unwrap(),
            "--no-svg",
            "--raw-records"
        ],
        None
    )
    .status
    .success());
    let raw: Vec<_> = fs::read_dir(out.join("raw")).unwrap().collect();
    assert_eq!(raw.len(), 2 * 4);
    assert!(out.join("raw").join("sblfe_run0003.csv").is_file());
}

#[test]
fn bad_parameters_exit_with_code_two() {
    let tmp = tempfile::tempdir().unwrap();
    let file = write_scenario(tmp.path(), &SCENARIO.replace("master_seed = 11", "c = 1.5"));
    let o = sbl(
        &[
            "run",
            &file,
            "--out",
            tmp.path().join("o").to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("scenario.ini:"), "{err}");
    assert!(err.contains('c'), "{err}");

    let o = sbl(&["suite", "no_such_suite"], None);
    assert_eq!(o.status.code(), Some(2));

    let o = sbl(&["run", &file], Some("not-a-number"));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unwritable_output_exits_with_code_four() {
    let tmp = tempfile::tempdir().unwrap();
    let file = write_scenario(tmp.path(), SCENARIO);
    let blocker = tmp.path().join("blocker");
    fs::write(&blocker, "a file, not a directory").unwrap();
    let out = blocker.join("out");
    let o = sbl(&["run", &file, "--out", out.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn missing_scenario_file_exits_with_code_four() {
    let o = sbl(&["run", "/nonexistent/scenario.ini"], None);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn regret_band_is_two_standard_deviations() {
    let s = parse_scenario_str(SCENARIO, "inline", "inline").unwrap();
    let results = run_scenario(&s, 1).unwrap();
    let series = regret_series(&results);
    assert_eq!(series.len(), 2);
    for (ser, r) in series.iter().zip(&results) {
        let c = &r.outcome.curves;
        assert_eq!(ser.y, c.mean_cum_regret.as_slice());
        let band = ser.band.as_ref().unwrap();
        for (b, s) in band.iter().zip(&c.std_cum_regret) {
            assert_eq!(*b, 2.0 * s);
        }
    }
}

#[test]
fn probe_prints_one_row_per_configuration() {
    let o = sbl(&["probe", "--n", "1,2", "--k", "3", "--trials", "50"], None);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,k,nanos_per_trial");
    assert_eq!(lines.len(), 3);
}
