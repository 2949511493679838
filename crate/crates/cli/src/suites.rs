//! Built-in scenario recipes, one per experiment family.

use sbl_core::harness::SocietyConfig;
use sbl_core::{ActionSubset, AgentKind, AgentSpec, BanditInstance, Hyperparameters, Preset};

use crate::error::{CliError, Result};
use crate::scenario::{OutputSpec, Scenario};

pub const SUITES: &[&str] = &[
    "nonlearners",
    "learners",
    "detection",
    "subsets",
    "crowded",
    "two_arm_sweep",
    "noise",
];

fn eps(h: &Hyperparameters) -> AgentKind {
    AgentKind::EpsGreedy {
        eps0: h.eps0,
        decay: h.decay,
    }
}

/// Social learner at id 0 followed by `others`; every member sees all arms
/// unless a subset is given.
fn society(
    name: String,
    env: BanditInstance,
    others: Vec<(&str, AgentKind, Option<Vec<usize>>)>,
    compare: bool,
    horizon: usize,
) -> Scenario {
    let k = env.k();
    let mut agents = vec![AgentSpec::new(
        "sa",
        AgentKind::SblFe,
        ActionSubset::full(k),
    )];
    let mut seen = std::collections::HashMap::new();
    for (base, kind, arms) in others {
        let n = seen.entry(base).or_insert(0usize);
        *n += 1;
        let set = match arms {
            Some(a) => ActionSubset::new(k, a).expect("suite subsets are valid"),
            None => ActionSubset::full(k),
        };
        agents.push(AgentSpec::new(format!("{base}{n}"), kind, set));
    }
    let mut config = SocietyConfig::new(env, agents, 0);
    config.horizon = horizon;
    config.reconstructed = true;
    Scenario {
        name,
        config,
        compare: if compare {
            vec![
                AgentKind::Ts,
                AgentKind::Ucb,
                AgentKind::Tucb,
                AgentKind::Oucb,
            ]
        } else {
            Vec::new()
        },
        output: OutputSpec::default(),
    }
}

fn wide() -> BanditInstance {
    BanditInstance::preset(Preset::Delta02)
}

pub fn scenario_suite(name: &str) -> Result<Vec<Scenario>> {
    let h = Hyperparameters::default();
    let solo = |tag: &str, kind: AgentKind| {
        society(tag.to_string(), wide(), vec![(tag, kind, None)], true, 2000)
    };
    Ok(match name {
        "nonlearners" => vec![
            solo("optimal", AgentKind::Optimal),
            solo("random", AgentKind::Random),
            solo("opponent", AgentKind::Opponent),
            solo("suboptimal", AgentKind::SubOptimal),
        ],
        "learners" => vec![
            solo("ts", AgentKind::Ts),
            solo("epsgreedy", eps(&h)),
            solo("ucb", AgentKind::Ucb),
        ],
        "detection" => vec![
            society(
                "opponent_random_epsgreedy".into(),
                wide(),
                vec![
                    ("opponent", AgentKind::Opponent, None),
                    ("random", AgentKind::Random, None),
                    ("epsgreedy", eps(&h), None),
                ],
                false,
                2000,
            ),
            society(
                "optimal_suboptimal_epsgreedy".into(),
                wide(),
                vec![
                    ("optimal", AgentKind::Optimal, None),
                    ("suboptimal", AgentKind::SubOptimal, None),
                    ("epsgreedy", eps(&h), None),
                ],
                false,
                2000,
            ),
            society(
                "opposing_poptimal".into(),
                wide(),
                vec![
                    (
                        "falling",
                        AgentKind::POptimal {
                            p0: 1.0,
                            delta: -0.001,
                        },
                        None,
                    ),
                    (
                        "rising",
                        AgentKind::POptimal {
                            p0: 0.0,
                            delta: 0.001,
                        },
                        None,
                    ),
                ],
                false,
                2000,
            ),
        ],
        "subsets" => vec![society(
            "disjoint_epsgreedy".into(),
            wide(),
            vec![
                ("epsgreedy", eps(&h), Some(vec![7, 8, 9])),
                ("epsgreedy", eps(&h), Some(vec![4, 5, 6])),
                ("epsgreedy", eps(&h), Some(vec![1, 2, 3])),
            ],
            true,
            2000,
        )],
        "crowded" => {
            let crowd = |lead: Vec<(&'static str, AgentKind, Option<Vec<usize>>)>,
                         tail: Vec<(&'static str, AgentKind, Option<Vec<usize>>)>,
                         name: &str| {
                let mut others = lead;
                others.extend(tail);
                society(name.into(), wide(), others, true, 2000)
            };
            let opp3 = || vec![("opponent", AgentKind::Opponent, None); 3];
            let mut rand2 = vec![("random", AgentKind::Random, None); 2];
            let mut opp_rand = opp3();
            opp_rand.append(&mut rand2);
            vec![
                crowd(
                    vec![("optimal", AgentKind::Optimal, None)],
                    opp_rand.clone(),
                    "optimal_crowd",
                ),
                crowd(
                    vec![("epsgreedy", eps(&h), None)],
                    opp_rand,
                    "epsgreedy_crowd",
                ),
                crowd(
                    vec![
                        ("optimal", AgentKind::Optimal, None),
                        ("epsgreedy", eps(&h), None),
                        ("epsgreedy", eps(&h), None),
                    ],
                    opp3(),
                    "optimal_epsgreedy_crowd",
                ),
            ]
        }
        "two_arm_sweep" => {
            let mut out = Vec::new();
            for horizon in [200, 10_000] {
                for (tag, kind) in [
                    ("optimal", AgentKind::Optimal),
                    ("random", AgentKind::Random),
                    ("opponent", AgentKind::Opponent),
                    ("epsgreedy", eps(&h)),
                ] {
                    for step in 0..=10 {
                        let gap = f64::from(step) * 0.05;
                        let env = BanditInstance::two_arm(gap).expect("gap within [0, 0.5]");
                        out.push(society(
                            format!("{tag}_gap{:03}_t{horizon}", step * 5),
                            env,
                            vec![(tag, kind.clone(), None)],
                            true,
                            horizon,
                        ));
                    }
                }
            }
            out
        }
        "noise" => {
            let mut out = Vec::new();
            for (tag, kind) in [
                ("optimal", AgentKind::Optimal),
                ("epsgreedy", eps(&h)),
                ("opponent", AgentKind::Opponent),
                ("suboptimal", AgentKind::SubOptimal),
            ] {
                for (pct, p) in [(10, 0.1), (20, 0.2), (30, 0.3)] {
                    let mut s = solo(tag, kind.clone());
                    s.name = format!("{tag}_noise{pct}");
                    s.config.noise_p = p;
                    out.push(s);
                }
            }
            out
        }
        other => {
            return Err(CliError::scenario(
                "suite",
                format!(
                    "unknown suite `{other}` (expected one of {})",
                    SUITES.join(", ")
                ),
            ))
        }
    })
}
