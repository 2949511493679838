//! Sectioned `key = value` scenario files.
//!
//! ```text
//! [environment]
//! preset = delta02          # or: means = 0.2, 0.8   or: two_arm_gap = 0.1
//! noise_p = 0.0
//!
//! [run]
//! horizon = 2000
//! runs = 100
//! master_seed = 7
//! c = 0.5
//!
//! [compare]
//! algorithms = ts, ucb
//!
//! [agent.learner]
//! kind = sblfe
//!
//! [agent.expert]
//! kind = optimal
//! action_set = 7, 8, 9
//! ```
//!
//! Agents appear in file order and get ids from 0. The social agent is the
//! one marked `social = true`, otherwise the only social learner, otherwise
//! the only learner.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use sbl_core::harness::SocietyConfig;
use sbl_core::hyper::SelfEstimate;
use sbl_core::{
    ActionSubset, AgentKind, AgentSpec, BanditInstance, Hyperparameters, Preset, SblError,
    TradeoffConstant, TsEstimator,
};

use crate::error::{CliError, Result};

/// A parsed scenario: the society plus what to compare and where to write.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub config: SocietyConfig,
    /// Extra algorithms run in the social agent's seat against the same
    /// society.
    pub compare: Vec<AgentKind>,
    pub output: OutputSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSpec {
    pub directory: Option<PathBuf>,
    pub svg: bool,
    pub raw_records: bool,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self {
            directory: None,
            svg: true,
            raw_records: false,
        }
    }
}

impl Scenario {
    /// Configurations to run: the social agent as configured, then one per
    /// compared algorithm.
    pub fn variants(&self) -> Vec<(String, SocietyConfig)> {
        let sa = self.config.social_agent;
        let mut out = vec![(
            self.config.agents[sa].kind.name().to_string(),
            self.config.clone(),
        )];
        for kind in &self.compare {
            let mut cfg = self.config.clone();
            cfg.agents[sa].kind = kind.clone();
            out.push((kind.name().to_string(), cfg));
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        for (_, cfg) in self.variants() {
            cfg.validate()?;
        }
        Ok(())
    }
}

pub const ALGORITHMS: &[&str] = &[
    "optimal",
    "suboptimal",
    "random",
    "opponent",
    "poptimal",
    "ts",
    "ucb",
    "epsgreedy",
    "sblfe",
    "tucb",
    "oucb",
];

pub fn parse_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "scenario".into());
    parse_scenario_str(&text, &path.display().to_string(), &stem)
}

struct Entry {
    value: String,
    line: usize,
}

struct Section {
    name: String,
    line: usize,
    entries: BTreeMap<String, Entry>,
}

struct Reader<'a> {
    origin: &'a str,
}

impl Reader<'_> {
    fn err(&self, line: usize, msg: impl std::fmt::Display) -> CliError {
        CliError::scenario(format!("{}:{line}", self.origin), msg.to_string())
    }

    fn sections(&self, text: &str) -> Result<Vec<Section>> {
        let mut out: Vec<Section> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = strip_comment(raw).trim();
            if content.is_empty() {
                continue;
            }
            if let Some(rest) = content.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| self.err(line, "unterminated section header"))?
                    .trim()
                    .to_string();
                if out.iter().any(|s| s.name == name) {
                    return Err(self.err(line, format!("duplicate section [{name}]")));
                }
                out.push(Section {
                    name,
                    line,
                    entries: BTreeMap::new(),
                });
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| {
                self.err(line, format!("expected `key = value`, got `{content}`"))
            })?;
            let section = out
                .last_mut()
                .ok_or_else(|| self.err(line, "key outside of any section"))?;
            let key = key.trim().to_string();
            if section.entries.contains_key(&key) {
                return Err(self.err(line, format!("duplicate key `{key}`")));
            }
            section.entries.insert(
                key,
                Entry {
                    value: value.trim().to_string(),
                    line,
                },
            );
        }
        Ok(out)
    }

    fn take<T: FromStr>(&self, sec: &mut Section, key: &str) -> Result<Option<(T, usize)>> {
        let Some(e) = sec.entries.remove(key) else {
            return Ok(None);
        };
        let v = e
            .value
            .parse::<T>()
            .map_err(|_| self.err(e.line, format!("key `{key}`: cannot parse `{}`", e.value)))?;
        Ok(Some((v, e.line)))
    }

    fn take_bool(&self, sec: &mut Section, key: &str) -> Result<Option<bool>> {
        let Some(e) = sec.entries.remove(key) else {
            return Ok(None);
        };
        match e.value.as_str() {
            "true" | "yes" | "1" => Ok(Some(true)),
            "false" | "no" | "0" => Ok(Some(false)),
            v => Err(self.err(
                e.line,
                format!("key `{key}`: expected true or false, got `{v}`"),
            )),
        }
    }

    fn take_list<T: FromStr>(
        &self,
        sec: &mut Section,
        key: &str,
    ) -> Result<Option<(Vec<T>, usize)>> {
        let Some(e) = sec.entries.remove(key) else {
            return Ok(None);
        };
        let items = e
            .value
            .trim_start_matches('[')
            .trim_end_matches(']')
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<T>()
                    .map_err(|_| self.err(e.line, format!("key `{key}`: cannot parse `{s}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Some((items, e.line)))
    }

    fn finish(&self, sec: Section) -> Result<()> {
        match sec.entries.into_iter().min_by_key(|(_, e)| e.line) {
            Some((key, e)) => Err(self.err(
                e.line,
                format!("unknown key `{key}` in section [{}]", sec.name),
            )),
            None => Ok(()),
        }
    }

    fn core(&self, line: usize, key: &str, e: SblError) -> CliError {
        self.err(line, format!("key `{key}`: {e}"))
    }
}

fn strip_comment(line: &str) -> &str {
    let t = line.trim_start();
    if t.starts_with('#') || t.starts_with(';') {
        return "";
    }
    match line.find(" #") {
        Some(i) => &line[..i],
        None => line,
    }
}

/// Parses scenario text. `origin` labels error messages; `default_name` is
/// used when the file has no `[scenario] name`.
pub fn parse_scenario_str(text: &str, origin: &str, default_name: &str) -> Result<Scenario> {
    let r = Reader { origin };
    let mut sections = r.sections(text)?;
    let mut take_section = |name: &str| -> Option<Section> {
        let i = sections.iter().position(|s| s.name == name)?;
        Some(sections.remove(i))
    };

    let mut name = default_name.to_string();
    if let Some(mut sec) = take_section("scenario") {
        if let Some((n, _)) = r.take::<String>(&mut sec, "name")? {
            name = n;
        }
        r.finish(sec)?;
    }

    let mut env_sec =
        take_section("environment").ok_or_else(|| r.err(1, "missing section [environment]"))?;
    let env = parse_env(&r, &mut env_sec)?;
    let noise_p = match r.take::<f64>(&mut env_sec, "noise_p")? {
        Some((p, line)) if !(0.0..=1.0).contains(&p) => {
            return Err(r.err(line, format!("key `noise_p`: must lie in [0, 1], got {p}")))
        }
        Some((p, _)) => p,
        None => 0.0,
    };
    r.finish(env_sec)?;

    let mut horizon = 2000;
    let mut runs = 100;
    let mut master_seed = 0;
    let mut hyper = Hyperparameters::default();
    if let Some(mut sec) = take_section("run") {
        if let Some((v, _)) = r.take(&mut sec, "horizon")? {
            horizon = v;
        }
        if let Some((v, _)) = r.take(&mut sec, "runs")? {
            runs = v;
        }
        if let Some((v, _)) = r.take(&mut sec, "master_seed")? {
            master_seed = v;
        }
        hyper = parse_hyper(&r, &mut sec)?;
        r.finish(sec)?;
    }

    let mut reconstructed = false;
    if let Some(mut sec) = take_section("baselines") {
        reconstructed = r.take_bool(&mut sec, "reconstructed")?.unwrap_or(false);
        r.finish(sec)?;
    }

    let mut compare = Vec::new();
    if let Some(mut sec) = take_section("compare") {
        if let Some((names, line)) = r.take_list::<String>(&mut sec, "algorithms")? {
            for n in names {
                compare.push(simple_kind(&n, &hyper).ok_or_else(|| {
                    r.err(line, format!("key `algorithms`: `{n}` is not a learner"))
                })?);
            }
        }
        r.finish(sec)?;
    }

    let mut output = OutputSpec::default();
    if let Some(mut sec) = take_section("output") {
        if let Some((d, _)) = r.take::<String>(&mut sec, "directory")? {
            output.directory = Some(PathBuf::from(d));
        }
        if let Some(v) = r.take_bool(&mut sec, "svg")? {
            output.svg = v;
        }
        if let Some(v) = r.take_bool(&mut sec, "raw_records")? {
            output.raw_records = v;
        }
        r.finish(sec)?;
    }

    let mut agents = Vec::new();
    let mut marked = Vec::new();
    for mut sec in std::mem::take(&mut sections) {
        let Some(agent_name) = sec.name.strip_prefix("agent.").map(str::to_string) else {
            return Err(r.err(sec.line, format!("unknown section [{}]", sec.name)));
        };
        if agent_name.is_empty()
            || !agent_name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        {
            return Err(r.err(sec.line, format!("invalid agent name `{agent_name}`")));
        }
        let (spec, social) = parse_agent(&r, &mut sec, agent_name, &env, &hyper)?;
        if social {
            marked.push(agents.len());
        }
        agents.push(spec);
        r.finish(sec)?;
    }
    if agents.is_empty() {
        return Err(r.err(1, "no [agent.NAME] sections"));
    }

    let social_agent = match marked.as_slice() {
        [one] => *one,
        [] => infer_social(&agents).ok_or_else(|| {
            r.err(
                1,
                "cannot tell which agent is the social agent; mark one with `social = true`",
            )
        })?,
        _ => return Err(r.err(1, "more than one agent marked `social = true`")),
    };

    let config = SocietyConfig {
        env,
        agents,
        social_agent,
        horizon,
        runs,
        noise_p,
        master_seed,
        hyper,
        reconstructed,
    };
    let scenario = Scenario {
        name,
        config,
        compare,
        output,
    };
    scenario
        .validate()
        .map_err(|e| CliError::scenario(origin.to_string(), e.to_string()))?;
    Ok(scenario)
}

fn parse_env(r: &Reader, sec: &mut Section) -> Result<BanditInstance> {
    let preset = r.take::<String>(sec, "preset")?;
    let means = r.take_list::<f64>(sec, "means")?;
    let gap = r.take::<f64>(sec, "two_arm_gap")?;
    match (preset, means, gap) {
        (Some((p, line)), None, None) => Preset::from_name(&p)
            .map(BanditInstance::preset)
            .map_err(|e| r.core(line, "preset", e)),
        (None, Some((m, line)), None) => {
            BanditInstance::new(m).map_err(|e| r.core(line, "means", e))
        }
        (None, None, Some((g, line))) => {
            BanditInstance::two_arm(g).map_err(|e| r.core(line, "two_arm_gap", e))
        }
        (None, None, None) => Err(r.err(
            sec.line,
            "[environment] needs one of `preset`, `means` or `two_arm_gap`",
        )),
        _ => Err(r.err(
            sec.line,
            "[environment] takes only one of `preset`, `means` or `two_arm_gap`",
        )),
    }
}

fn parse_hyper(r: &Reader, sec: &mut Section) -> Result<Hyperparameters> {
    let mut h = Hyperparameters::default();
    let mut lines: BTreeMap<&'static str, usize> = BTreeMap::new();
    if let Some((c, line)) = r.take::<f64>(sec, "c")? {
        h.c = TradeoffConstant::new(c).map_err(|e| r.core(line, "c", e))?;
    }
    macro_rules! field {
        ($key:literal, $field:ident) => {
            if let Some((v, line)) = r.take(sec, $key)? {
                h.$field = v;
                lines.insert($key, line);
            }
        };
    }
    field!("lambda", lambda);
    field!("smoothing_w", smoothing_w);
    field!("xi", xi);
    field!("ucb_c", ucb_c);
    field!("tucb_c", tucb_c);
    field!("oucb_c", oucb_c);
    field!("oucb_beta1", oucb_beta1);
    field!("oucb_beta2", oucb_beta2);
    field!("eps0", eps0);
    field!("decay", decay);
    field!("fe_stride", fe_stride);

    if let Some((name, line)) = r.take::<String>(sec, "self_estimate")? {
        h.self_estimate = SelfEstimate::from_name(&name).ok_or_else(|| {
            r.err(
                line,
                format!("key `self_estimate`: expected smoothed_counts, counts or ts_policy, got `{name}`"),
            )
        })?;
    }
    let estimator = r.take::<String>(sec, "ts_estimator")?;
    let samples = r.take::<usize>(sec, "ts_samples")?;
    let points = r.take::<usize>(sec, "ts_points")?;
    h.ts = match (
        estimator.as_ref().map(|(s, l)| (s.as_str(), *l)),
        samples,
        points,
    ) {
        (Some(("monte_carlo", _)) | None, Some((s, line)), None) => {
            lines.insert("ts_samples", line);
            TsEstimator::MonteCarlo { samples: s }
        }
        (Some(("monte_carlo", _)), None, None) => TsEstimator::MonteCarlo {
            samples: TsEstimator::DEFAULT_SAMPLES,
        },
        (Some(("quadrature", _)) | None, None, Some((p, line))) => {
            lines.insert("ts_points", line);
            TsEstimator::Quadrature { points: p }
        }
        (Some(("quadrature", _)) | None, None, None) => TsEstimator::default(),
        (Some((other, line)), _, _) if other != "monte_carlo" && other != "quadrature" => {
            return Err(r.err(
                line,
                format!("key `ts_estimator`: expected monte_carlo or quadrature, got `{other}`"),
            ))
        }
        _ => {
            return Err(r.err(
                sec.line,
                "`ts_samples` goes with monte_carlo and `ts_points` with quadrature",
            ))
        }
    };
    h.validate().map_err(|e| match &e {
        SblError::InvalidParameter { name, .. } => match lines.get(name) {
            Some(&line) => r.core(line, name, e),
            None => r.err(sec.line, e),
        },
        _ => r.err(sec.line, e),
    })?;
    Ok(h)
}

/// Kinds that need no per-agent parameters beyond the hyperparameters.
fn simple_kind(name: &str, hyper: &Hyperparameters) -> Option<AgentKind> {
    Some(match name {
        "ts" => AgentKind::Ts,
        "ucb" => AgentKind::Ucb,
        "epsgreedy" => AgentKind::EpsGreedy {
            eps0: hyper.eps0,
            decay: hyper.decay,
        },
        "sblfe" => AgentKind::SblFe,
        "tucb" => AgentKind::Tucb,
        "oucb" => AgentKind::Oucb,
        _ => return None,
    })
}

fn parse_agent(
    r: &Reader,
    sec: &mut Section,
    name: String,
    env: &BanditInstance,
    hyper: &Hyperparameters,
) -> Result<(AgentSpec, bool)> {
    let (kind_name, kind_line) = r
        .take::<String>(sec, "kind")?
        .ok_or_else(|| r.err(sec.line, format!("agent `{name}` is missing key `kind`")))?;
    let kind = match kind_name.as_str() {
        "optimal" => AgentKind::Optimal,
        "suboptimal" => AgentKind::SubOptimal,
        "random" => AgentKind::Random,
        "opponent" => AgentKind::Opponent,
        "poptimal" => {
            let (p0, _) = r
                .take::<f64>(sec, "p0")?
                .ok_or_else(|| r.err(sec.line, format!("agent `{name}` is missing key `p0`")))?;
            let delta = r.take::<f64>(sec, "delta")?.map_or(0.0, |(d, _)| d);
            AgentKind::POptimal { p0, delta }
        }
        "epsgreedy" => AgentKind::EpsGreedy {
            eps0: r.take(sec, "eps0")?.map_or(hyper.eps0, |(v, _)| v),
            decay: r.take(sec, "decay")?.map_or(hyper.decay, |(v, _)| v),
        },
        other => simple_kind(other, hyper).ok_or_else(|| {
            r.err(
                kind_line,
                format!(
                    "key `kind`: unknown agent kind `{other}` (expected one of {})",
                    ALGORITHMS.join(", ")
                ),
            )
        })?,
    };
    let action_set = match r.take_list::<usize>(sec, "action_set")? {
        Some((arms, line)) => {
            ActionSubset::new(env.k(), arms).map_err(|e| r.core(line, "action_set", e))?
        }
        None => ActionSubset::full(env.k()),
    };
    let social = r.take_bool(sec, "social")?.unwrap_or(false);
    let spec = AgentSpec::new(name, kind, action_set);
    spec.validate(env.k()).map_err(|e| r.err(sec.line, e))?;
    Ok((spec, social))
}

fn infer_social(agents: &[AgentSpec]) -> Option<usize> {
    let only = |pred: &dyn Fn(&AgentSpec) -> bool| {
        let hits: Vec<usize> = (0..agents.len()).filter(|&i| pred(&agents[i])).collect();
        (hits.len() == 1).then(|| hits[0])
    };
    only(&|a| a.kind.is_social()).or_else(|| only(&|a| a.kind.is_learner()))
}

fn list<T: std::fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

/// Writes `scenario` back out with every default made explicit, so that
/// parsing the result gives the same scenario.
pub fn echo(scenario: &Scenario) -> String {
    let cfg = &scenario.config;
    let h = &cfg.hyper;
    let mut s = String::new();
    let _ = writeln!(s, "[scenario]\nname = {}\n", scenario.name);
    let _ = writeln!(
        s,
        "[environment]\nmeans = {}\nnoise_p = {}\n",
        list(cfg.env.means()),
        cfg.noise_p
    );
    let _ = writeln!(
        s,
        "[run]\nhorizon = {}\nruns = {}\nmaster_seed = {}",
        cfg.horizon, cfg.runs, cfg.master_seed
    );
    let _ = writeln!(
        s,
        "c = {}\nlambda = {}\nsmoothing_w = {}\nxi = {}",
        h.c.value(),
        h.lambda,
        h.smoothing_w,
        h.xi
    );
    match h.ts {
        TsEstimator::MonteCarlo { samples } => {
            let _ = writeln!(s, "ts_estimator = monte_carlo\nts_samples = {samples}");
        }
        TsEstimator::Quadrature { points } => {
            let _ = writeln!(s, "ts_estimator = quadrature\nts_points = {points}");
        }
    }
    let _ = writeln!(s, "self_estimate = {}", h.self_estimate.name());
    let _ = writeln!(
        s,
        "ucb_c = {}\ntucb_c = {}\noucb_c = {}\noucb_beta1 = {}\noucb_beta2 = {}",
        h.ucb_c, h.tucb_c, h.oucb_c, h.oucb_beta1, h.oucb_beta2
    );
    let _ = writeln!(
        s,
        "eps0 = {}\ndecay = {}\nfe_stride = {}\n",
        h.eps0, h.decay, h.fe_stride
    );
    let _ = writeln!(s, "[baselines]\nreconstructed = {}\n", cfg.reconstructed);
    if !scenario.compare.is_empty() {
        let names: Vec<&str> = scenario.compare.iter().map(|k| k.name()).collect();
        let _ = writeln!(s, "[compare]\nalgorithms = {}\n", names.join(", "));
    }
    let out = &scenario.output;
    let _ = writeln!(s, "[output]");
    if let Some(d) = &out.directory {
        let _ = writeln!(s, "directory = {}", d.display());
    }
    let _ = writeln!(s, "svg = {}\nraw_records = {}\n", out.svg, out.raw_records);
    for (i, a) in cfg.agents.iter().enumerate() {
        let _ = writeln!(s, "[agent.{}]\nkind = {}", a.name, a.kind.name());
        match a.kind {
            AgentKind::POptimal { p0, delta } => {
                let _ = writeln!(s, "p0 = {p0}\ndelta = {delta}");
            }
            AgentKind::EpsGreedy { eps0, decay } => {
                let _ = writeln!(s, "eps0 = {eps0}\ndecay = {decay}");
            }
            _ => {}
        }
        let _ = writeln!(s, "action_set = {}", list(a.action_set.arms()));
        if i == cfg.social_agent {
            let _ = writeln!(s, "social = true");
        }
        s.push('\n');
    }
    s
}
