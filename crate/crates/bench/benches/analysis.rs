use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use tcr_core::rational::{int, ratio};
use tcr_core::registry::{Candidate, Electorate, ReferenceModel, SelectionPolicy, Simulation};
use tcr_core::{
    find_equilibria, ordering_experiment, resolve_challenge, ParticipantHolding, Role,
    StrategyProfile, TcrParams, ValuationPair, Vote, VotingGame,
};

fn params() -> TcrParams {
    TcrParams::new(int(100), ratio(1, 2), ratio(1, 2), ratio(1, 10))
        .unwrap()
        .with_challenge_margin(ratio(1, 2))
        .unwrap()
}

fn equilibria(c: &mut Criterion) {
    let mut group = c.benchmark_group("find_equilibria");
    for n in [2usize, 6, 10] {
        let voters: Vec<_> = (0..n).map(|i| int(100 + 10 * i as i64)).collect();
        let game = VotingGame::new(params(), voters, int(100), ValuationPair::from_gamma(ratio(7, 5)).unwrap()).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &game, |b, g| {
            b.iter(|| find_equilibria(black_box(g)).unwrap())
        });
    }
    group.finish();
}

fn resolution(c: &mut Criterion) {
    let p = params();
    let voters: Vec<_> = (0..8).map(|i| ParticipantHolding::voter(format!("v{i}"), int(50 + 25 * i))).collect();
    let profile = StrategyProfile((0..8).map(|i| if i % 3 == 0 { Vote::Reject } else { Vote::Accept }).collect());
    let challenger = ParticipantHolding::new("challenger", int(150), Role::Challenger);
    let candidate = ParticipantHolding::new("candidate", int(100), Role::Candidate);
    c.bench_function("resolve_challenge/8", |b| {
        b.iter(|| resolve_challenge(&p, black_box(&voters), &profile, &challenger, &candidate).unwrap())
    });
}

fn orderings(c: &mut Criterion) {
    let p = params();
    let electorate = Electorate::new(vec![int(100); 3], int(100)).unwrap();
    let model = ReferenceModel::default();
    let sim = Simulation { model: &model, policy: SelectionPolicy::AlwaysReject, params: &p, electorate: &electorate };
    let mut group = c.benchmark_group("ordering_experiment");
    group.sample_size(10);
    for size in [3usize, 5] {
        let pool: Vec<_> = (0..size)
            .map(|i| Candidate::new(format!("c{i}"), ratio(3 + i as i64, 10)).unwrap())
            .collect();
        group.bench_with_input(BenchmarkId::from_parameter(size), &pool, |b, pool| {
            b.iter(|| ordering_experiment(black_box(pool), &sim).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, equilibria, resolution, orderings);
criterion_main!(benches);
