use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use sbl_core::agents::{Agent, AgentStreams, SblFeAgent};
use sbl_core::belief::{ts_policy_mc, ts_policy_quadrature};
use sbl_core::free_energy::candidate_policy;
use sbl_core::policy::regularize;
use sbl_core::{
    ActionSubset, BeliefState, BetaPosterior, Hyperparameters, PolicyVector, RandomStream,
    TradeoffConstant,
};

fn belief(k: usize) -> BeliefState {
    let posteriors = (0..k)
        .map(|a| BetaPosterior::new(2.0 + 3.0 * a as f64, 20.0 - a as f64).unwrap())
        .collect();
    BeliefState::from_posteriors(posteriors).unwrap()
}

fn free_energy(c: &mut Criterion) {
    let ts = regularize(
        &PolicyVector::from_weights((1..=10).map(f64::from).collect()).unwrap(),
        1e-6,
    )
    .unwrap();
    let est = regularize(
        &PolicyVector::from_weights((1..=10).rev().map(f64::from).collect()).unwrap(),
        1e-6,
    )
    .unwrap();
    let tc = TradeoffConstant::default();
    c.bench_function("candidate_policy_k10", |b| {
        b.iter(|| candidate_policy(black_box(&ts), black_box(&est), tc).unwrap())
    });
}

fn ts_policy(c: &mut Criterion) {
    let mut group = c.benchmark_group("ts_policy");
    for k in [2usize, 10] {
        let bel = belief(k);
        group.bench_with_input(BenchmarkId::new("quadrature16", k), &bel, |b, bel| {
            b.iter(|| ts_policy_quadrature(black_box(bel), 16).unwrap())
        });
        let mut rng = RandomStream::from_seed(9);
        group.bench_with_input(BenchmarkId::new("monte_carlo2048", k), &bel, |b, bel| {
            b.iter(|| ts_policy_mc(black_box(bel), 2048, &mut rng).unwrap())
        });
    }
    group.finish();
}

fn sbl_fe_step(c: &mut Criterion) {
    let mut group = c.benchmark_group("sbl_fe_step");
    let hyper = Hyperparameters::default();
    for n in [1usize, 2, 4, 8, 16] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            let mut agent = SblFeAgent::new(ActionSubset::full(10), &hyper, 0, n).unwrap();
            let mut streams = AgentStreams {
                act: RandomStream::from_seed(1),
                posterior: RandomStream::from_seed(2),
            };
            let mut noise = RandomStream::from_seed(3);
            let mut obs: Vec<(usize, Option<usize>)> = (1..n).map(|id| (id, None)).collect();
            let mut t = 0;
            b.iter(|| {
                let d = agent.act(t, &mut streams).unwrap();
                agent
                    .observe_reward(d.action, u8::from(noise.unit() < 0.6))
                    .unwrap();
                for o in obs.iter_mut() {
                    o.1 = Some(noise.below(10));
                }
                agent.observe_society(&obs).unwrap();
                t += 1;
            })
        });
    }
    group.finish();
}

criterion_group!(benches, free_energy, ts_policy, sbl_fe_step);
criterion_main!(benches);
