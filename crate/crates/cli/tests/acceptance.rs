//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::Instant;

use itertools::Itertools;
use num::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tcr_cli::commands::{sweep_points, Method};
use tcr_cli::load_scenario;
use tcr_core::classifier::region_from_outcomes;
use tcr_core::equilibrium::MAX_VOTERS;
use tcr_core::payoff::{challenger_payoff, no_action_payoff};
use tcr_core::rational::{int, ratio};
use tcr_core::registry::{Candidate, Electorate, ReferenceModel, SelectionPolicy, Simulation, StaticModel};
use tcr_core::{
    classify_dominance, epsilon_threshold, find_equilibria, is_nash, ordering_experiment,
    resolve_challenge, Dominance, EquilibriumSet, Outcome, ParticipantHolding, Rational,
    RegionOutcome, Role, ScenarioKind, StrategyProfile, TcrParams, ValuationPair, Vote, VotingGame,
};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn rng(stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(0x7c2_2018);
    r.set_stream(stream);
    r
}

fn frac(rng: &mut ChaCha8Rng, lo: i64, hi: i64, den: i64) -> Rational {
    ratio(rng.gen_range(lo..hi), den)
}

/// `d` in [0, 1), `s` in [0, 1), `Q` in (0, 1].
fn random_params(rng: &mut ChaCha8Rng, deposit: i64, quorum: Option<Rational>) -> TcrParams {
    let q = quorum.unwrap_or_else(|| frac(rng, 1, 101, 100));
    TcrParams::new(int(deposit), frac(rng, 0, 100, 100), q, frac(rng, 0, 100, 100)).unwrap()
}

fn profile_names(report: &tcr_core::EquilibriumReport) -> BTreeSet<String> {
    report.equilibria.iter().map(|e| e.profile.to_string()).collect()
}

fn unanimous(vote: Vote, n: usize) -> StrategyProfile {
    StrategyProfile::unanimous(vote, n)
}

fn token_conservation() -> Check {
    let mut r = rng(1);
    let (mut checked, mut guarded) = (0, 0);
    while checked < 10_000 {
        let deposit = r.gen_range(1..1_000);
        let params = random_params(&mut r, deposit, None);
        let n = r.gen_range(1..=8);
        let voters: Vec<ParticipantHolding> = (0..n)
            .map(|i| ParticipantHolding::voter(format!("v{i}"), frac(&mut r, 1, 100_000, 10)))
            .collect();
        let profile = StrategyProfile((0..n).map(|_| if r.gen_bool(0.5) { Vote::Accept } else { Vote::Reject }).collect());
        let challenger = ParticipantHolding::new("ch", int(deposit) + frac(&mut r, 0, 100_000, 10), Role::Challenger);
        let candidate = ParticipantHolding::new("cand", int(deposit), Role::Candidate);
        match resolve_challenge(&params, &voters, &profile, &challenger, &candidate) {
            Ok(res) => {
                let total = res.entries.iter().fold(Rational::zero(), |acc, e| acc + &e.delta);
                ensure!(total.is_zero(), "draw {checked}: deltas sum to {total}");
                checked += 1;
            }
            // rejection with no reject-side voter leaves the reward pool without recipients
            Err(tcr_core::TcrError::DivisionGuard(_)) => guarded += 1,
            Err(e) => return Err(format!("unexpected error {e}")),
        }
    }
    Ok(format!("{checked} draws conserve exactly ({guarded} undefined draws redrawn)"))
}

fn two_voter_closed_form() -> Check {
    let mut r = rng(2);
    let offsets = [-1000i64, -3, -1, 0, 0, 1, 3, 1000];
    let (mut at_boundary, mut with_aa) = (0, 0);
    for draw in 0..1_000 {
        let deposit = r.gen_range(1..=500);
        let t = int(deposit + r.gen_range(0..2_000));
        let params = random_params(&mut r, deposit, Some(ratio(1, 2)));
        let eps = epsilon_threshold(&params, &t).unwrap();
        let k = offsets[r.gen_range(0..offsets.len())];
        let gamma = Rational::one() + &eps + ratio(k, 1_000_000);
        let game = VotingGame::new(params, vec![t.clone(), t.clone()], t, ValuationPair::from_gamma(gamma.clone()).unwrap()).unwrap();
        let report = find_equilibria(&game).unwrap();
        let has_aa = report.contains(&unanimous(Vote::Accept, 2));
        let expect = gamma >= Rational::one() + &eps;
        ensure!(has_aa == expect, "draw {draw}: gamma {gamma}, 1+eps {}, AA listed {has_aa}", Rational::one() + &eps);
        ensure!(report.contains(&unanimous(Vote::Reject, 2)), "draw {draw}: RR missing");
        ensure!(report.equilibria.iter().all(|e| !e.profile.is_mixed()), "draw {draw}: mixed equilibrium");
        at_boundary += usize::from(k == 0);
        with_aa += usize::from(has_aa);
    }
    Ok(format!("1000 draws, {at_boundary} exactly on 1+eps, AA present in {with_aa}"))
}

fn n_voter_unanimity() -> Check {
    let mut r = rng(3);
    for n in 3..=6 {
        for draw in 0..200 {
            let deposit = r.gen_range(1..=500);
            let t = int(deposit + r.gen_range(0..2_000));
            let params = random_params(&mut r, deposit, Some(ratio(1, 2)));
            let gamma = frac(&mut r, 1, 300, 100);
            let game = VotingGame::new(params, vec![t.clone(); n], t, ValuationPair::from_gamma(gamma.clone()).unwrap()).unwrap();
            let report = find_equilibria(&game).unwrap();
            let all_a = unanimous(Vote::Accept, n);
            let all_r = unanimous(Vote::Reject, n);
            let expected: BTreeSet<_> = [all_a.clone(), all_r.clone()].into();
            ensure!(report.equilibrium_profiles() == expected, "n={n} draw {draw} gamma {gamma}: {:?}", profile_names(&report));
            for p in [&all_a, &all_r] {
                let pivotal = &report.summary(p).unwrap().pivotal;
                ensure!(pivotal.iter().all(|x| !x), "n={n} draw {draw}: pivotal voter in {p}");
            }
        }
    }
    Ok("n=3..6, 200 draws each: exactly {all-A, all-R}, nobody pivotal".into())
}

fn pivotality_regression() -> Check {
    // voter 1 holds 300 of 600 revealed tokens; its reject flips the outcome
    let params = TcrParams::new(int(100), ratio(1, 2), ratio(1, 2), ratio(1, 10)).unwrap();
    let voters = vec![int(100), int(300), int(100)];
    let valuation = ValuationPair::new(int(20), int(21)).unwrap();
    let game = VotingGame::new(params, voters, int(100), valuation).unwrap();
    let all_a = unanimous(Vote::Accept, 3);
    ensure!(game.outcome(&all_a).unwrap() == Outcome::Accepted, "all-accept should pass");
    ensure!(game.is_pivotal(&all_a, 1).unwrap(), "large voter not pivotal");
    ensure!(!game.is_pivotal(&all_a, 0).unwrap(), "small voter pivotal");

    // hand computation: rejected, reward pool 50 + 200 * 0.1 = 70 shared by the 300 reject tokens
    let flipped = int(370) * int(20);
    // what a non-pivotal assumption would give: accepted, lose 10% of 300
    let naive = int(270) * int(21);
    let stay = int(330) * int(21);
    let dev = game.deviation_payoff(&all_a, 1).unwrap();
    ensure!(dev == flipped, "deviation payoff {dev}, expected {flipped}");
    ensure!(dev != naive, "deviation payoff ignores the outcome flip");
    ensure!(game.voter_payoff(&all_a, 1).unwrap() == stay, "stay payoff");
    ensure!(!is_nash(&all_a, &game).unwrap(), "all-accept wrongly stable (naive check would say {naive} <= {stay})");
    let report = find_equilibria(&game).unwrap();
    ensure!(!report.contains(&all_a), "enumerator lists all-accept");
    Ok(format!("pivotal deviation pays {dev} (non-pivotal would give {naive}); all-accept rejected as equilibrium"))
}

fn challenger_condition() -> Check {
    let mut r = rng(5);
    let (mut above, mut below) = (0, 0);
    for draw in 0..1_000 {
        let deposit = r.gen_range(1..=500);
        let params = random_params(&mut r, deposit, None);
        let t = int(deposit + r.gen_range(0..2_000));
        let v0 = frac(&mut r, 1, 1_000, 100);
        let delta = params.dispensation_amount() / &t;
        // half the draws straddle the necessary bound closely
        let gamma = if r.gen_bool(0.5) {
            Rational::one() + &delta + ratio(r.gen_range(-5..=5), 1_000)
        } else {
            frac(&mut r, 1, 300, 100)
        };
        if gamma <= Rational::zero() {
            continue;
        }
        let valuation = ValuationPair::new(v0.clone(), &v0 * &gamma).unwrap();
        let on_accept = challenger_payoff(&params, &t, Outcome::Accepted, &valuation).unwrap();
        let on_reject = challenger_payoff(&params, &t, Outcome::Rejected, &valuation).unwrap();
        ensure!(on_accept == (&t - int(deposit)) * &valuation.vr, "draw {draw}: accepted branch");
        ensure!(on_reject == (&t + params.dispensation_amount()) * &valuation.v0, "draw {draw}: rejected branch");
        let passive = no_action_payoff(&t, &valuation, Outcome::Accepted);
        ensure!(passive == &t * &valuation.vr, "draw {draw}: passive payoff");
        let best = on_accept.clone().max(on_reject.clone());
        if gamma >= Rational::one() + &delta {
            ensure!(best <= passive, "draw {draw}: challenge pays {best} > {passive} at gamma {gamma}");
            above += 1;
        } else if on_reject > on_accept {
            ensure!(on_reject > passive, "draw {draw}: no incentive below 1+delta");
            below += 1;
        }
    }
    Ok(format!("{above} draws at/above 1+delta without incentive, {below} below with strict incentive"))
}

fn pareto(a: &[Rational], b: &[Rational]) -> std::cmp::Ordering {
    use std::cmp::Ordering::*;
    let ge = a.iter().zip(b).all(|(x, y)| x >= y);
    let le = a.iter().zip(b).all(|(x, y)| x <= y);
    match (ge, le) {
        (true, true) => Equal,
        (true, false) => Greater,
        (false, true) => Less,
        (false, false) => panic!("unanimous payoff vectors are never incomparable here"),
    }
}

fn dominance_oracle() -> Check {
    let mut r = rng(6);
    let (mut checked, mut ties) = (0, 0);
    for draw in 0..1_000 {
        let n = r.gen_range(2..=5);
        let deposit = r.gen_range(1..=500);
        let t = int(deposit + r.gen_range(0..2_000));
        let params = random_params(&mut r, deposit, Some(ratio(1, 2)));
        let gamma = if draw % 10 == 0 { Rational::one() } else { frac(&mut r, 50, 300, 100) };
        let game = VotingGame::new(params, vec![t.clone(); n], t, ValuationPair::from_gamma(gamma.clone()).unwrap()).unwrap();
        let report = find_equilibria(&game).unwrap();
        let (all_a, all_r) = (unanimous(Vote::Accept, n), unanimous(Vote::Reject, n));
        let expected: BTreeSet<_> = [all_a.clone(), all_r.clone()].into();
        if report.equilibrium_profiles() != expected {
            continue;
        }
        let pa = game.payoff_vector(&all_a).unwrap();
        let pr = game.payoff_vector(&all_r).unwrap();
        let oracle = match pareto(&pa, &pr) {
            std::cmp::Ordering::Greater => Dominance::AcceptDominant,
            std::cmp::Ordering::Less => Dominance::RejectDominant,
            std::cmp::Ordering::Equal => Dominance::Tie,
        };
        ensure!(oracle == classify_dominance(&gamma), "draw {draw}: oracle {oracle:?} at gamma {gamma}");
        let expected_dominant: Vec<_> = match oracle {
            Dominance::AcceptDominant => vec![all_a],
            Dominance::RejectDominant => vec![all_r],
            Dominance::Tie => vec![all_a, all_r],
        };
        ensure!(report.dominant == expected_dominant, "draw {draw}: dominant subset {:?}", report.dominant);
        checked += 1;
        ties += usize::from(oracle == Dominance::Tie);
    }
    ensure!(checked >= 500, "only {checked} draws had the selection problem");
    Ok(format!("{checked} selection-problem draws agree ({ties} ties at gamma = 1)"))
}

fn compress(labels: &[RegionOutcome]) -> Vec<RegionOutcome> {
    labels.iter().copied().dedup().collect()
}

fn region_diagrams() -> Check {
    let fixture = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/sweep.json");
    let cfg = load_scenario(&fixture).map_err(|e| e.to_string())?;
    let points = sweep_points(&cfg).map_err(|e| e.to_string())?;
    let one = Rational::one();
    let mut summary = Vec::new();
    for dp in &cfg.sweep.as_ref().unwrap().delta_prime {
        let rows: Vec<_> = points.iter().filter(|p| &p.delta_prime == dp).collect();
        ensure!(rows.iter().all(|p| p.epsilon == Some(ratio(7, 25))), "1+eps should be 1.28");
        ensure!(rows.iter().all(|p| p.method == Method::ClosedForm), "closed form not applied");
        let accept_bound = ratio(32, 25);
        let challenge_bound = &one + dp;
        for p in &rows {
            // independent check of the label against a concrete enumeration
            let params = cfg.params.clone().with_challenge_margin(dp.clone()).unwrap();
            let game = VotingGame::new(
                params,
                cfg.electorate.voters.clone(),
                cfg.electorate.challenger.clone(),
                ValuationPair::from_gamma(p.gamma.clone()).unwrap(),
            )
            .unwrap();
            let report = find_equilibria(&game).unwrap();
            let enumerated = region_from_outcomes(p.label.scenario, p.gamma < challenge_bound, &report.equilibrium_outcomes()).unwrap();
            ensure!(enumerated == p.label, "gamma {} dp {dp}: sweep {:?} vs enumeration {:?}", p.gamma, p.label, enumerated);
            let expected_set = if p.gamma >= accept_bound { EquilibriumSet::Both } else { EquilibriumSet::RejectOnly };
            ensure!(p.label.equilibrium_set == expected_set, "gamma {}: set {:?}", p.gamma, p.label.equilibrium_set);
        }
        let labels: Vec<RegionOutcome> = rows.iter().map(|p| p.label.outcome).collect();
        let (shape, scenario) = if dp <= &ratio(7, 25) {
            (vec![RegionOutcome::Reject, RegionOutcome::Accept], ScenarioKind::TwoVoterCase1)
        } else {
            (
                vec![RegionOutcome::Reject, RegionOutcome::SelectionProblem, RegionOutcome::Accept],
                ScenarioKind::TwoVoterCase2,
            )
        };
        ensure!(compress(&labels) == shape, "dp {dp}: region sequence {:?}", compress(&labels));
        ensure!(rows.iter().all(|p| p.label.scenario == scenario), "dp {dp}: scenario kind");
        // transitions sit exactly on the computed boundaries
        let first_accept = rows.iter().find(|p| p.label.outcome == RegionOutcome::Accept).unwrap();
        ensure!(first_accept.gamma == challenge_bound, "dp {dp}: accept starts at {}", first_accept.gamma);
        if let Some(sp) = rows.iter().find(|p| p.label.outcome == RegionOutcome::SelectionProblem) {
            ensure!(sp.gamma == accept_bound, "dp {dp}: selection problem starts at {}", sp.gamma);
        }
        summary.push(format!("dp={}: {:?}", tcr_core::to_decimal(dp, 2), compress(&labels)));
    }
    Ok(format!("{} grid points cross-validated; {}", points.len(), summary.join("; ")))
}

fn ordering_setup() -> (TcrParams, Electorate) {
    let params = TcrParams::new(int(100), ratio(1, 2), ratio(1, 2), ratio(1, 10))
        .unwrap()
        .with_challenge_margin(ratio(1, 2))
        .unwrap();
    (params, Electorate::new(vec![int(100); 3], int(100)).unwrap())
}

fn pool_of(ratings: &[Rational]) -> Vec<Candidate> {
    ratings
        .iter()
        .enumerate()
        .map(|(i, r)| Candidate::new(format!("c{i}:{}", tcr_core::to_decimal(r, 2)), r.clone()).unwrap())
        .collect()
}

fn ordering_witness() -> Check {
    let (params, electorate) = ordering_setup();
    let grid: Vec<Rational> = (-5..=10).map(|k| ratio(k, 10)).collect();

    let reference = ReferenceModel::default();
    let biased = Simulation { model: &reference, policy: SelectionPolicy::AlwaysReject, params: &params, electorate: &electorate };
    let mut witness = None;
    'search: for size in 2..=4 {
        for combo in grid.iter().cloned().combinations(size) {
            let report = ordering_experiment(&pool_of(&combo), &biased).unwrap();
            if let Some((a, b)) = report.witness_runs() {
                witness = Some((a.clone(), b.clone(), report.compositions.len()));
                break 'search;
            }
        }
    }
    let (a, b, distinct) = witness.ok_or("no diverging pool in the search space")?;
    ensure!(a.composition != b.composition, "witness runs agree");

    let fixture = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/ordering_witness.json");
    let cfg = load_scenario(&fixture).map_err(|e| e.to_string())?;
    let sim = Simulation { model: &cfg.model, policy: cfg.policy, params: &cfg.params, electorate: &cfg.electorate };
    let committed = ordering_experiment(&cfg.candidates, &sim).unwrap();
    ensure!(committed.compositions.len() >= 2, "committed witness pool does not diverge");

    // control: gamma depends on the candidate only
    let fixed = StaticModel::default();
    let control = Simulation { model: &fixed, policy: SelectionPolicy::PayoffDominant, params: &params, electorate: &electorate };
    let coarse: Vec<Rational> = (-4..=5).map(|k| ratio(k, 5)).collect();
    let mut pools = 0;
    for size in 1..=4 {
        for combo in coarse.iter().cloned().combinations(size) {
            let report = ordering_experiment(&pool_of(&combo), &control).unwrap();
            ensure!(!report.diverges(), "control pool {combo:?} diverges");
            pools += 1;
        }
    }
    Ok(format!(
        "witness {:?} -> {:?} vs {:?} -> {:?} ({distinct} compositions); {pools} control pools order-independent",
        a.order, a.composition, b.order, b.composition
    ))
}

fn scaling_invariance() -> Check {
    let mut r = rng(9);
    for draw in 0..500 {
        let n = r.gen_range(2..=5).min(MAX_VOTERS);
        let deposit = r.gen_range(1..=300);
        let params = random_params(&mut r, deposit, None);
        let params = {
            let cap = params.dispensation_amount() / int(deposit + 500);
            let margin = cap * frac(&mut r, 0, 11, 10);
            params.with_challenge_margin(margin).unwrap()
        };
        let voters: Vec<Rational> = (0..n).map(|_| int(r.gen_range(1..1_000))).collect();
        let challenger = int(deposit + 500);
        let v0 = frac(&mut r, 1, 500, 100);
        let vr = frac(&mut r, 1, 500, 100);
        let c = frac(&mut r, 1, 100_000, 997);
        let base = ValuationPair::new(v0, vr).unwrap();
        let scaled = base.scaled(&c);

        let g1 = VotingGame::new(params.clone(), voters.clone(), challenger.clone(), base.clone()).unwrap();
        let g2 = g1.with_valuation(scaled.clone());
        let (r1, r2) = (find_equilibria(&g1).unwrap(), find_equilibria(&g2).unwrap());
        ensure!(r1.equilibrium_profiles() == r2.equilibrium_profiles(), "draw {draw}: equilibria differ under c={c}");
        ensure!(r1.dominant == r2.dominant, "draw {draw}: dominant subsets differ");
        ensure!(classify_dominance(&base.gamma()) == classify_dominance(&scaled.gamma()), "draw {draw}: dominance class");
        let electorate = Electorate::new(voters, challenger.clone()).unwrap();
        let scenario = electorate.scenario(&params).unwrap();
        let label = |g: &Rational, rep: &tcr_core::EquilibriumReport| {
            let challenged = tcr_core::challenge_decision(g, &params, &challenger).unwrap();
            region_from_outcomes(scenario, challenged, &rep.equilibrium_outcomes())
        };
        ensure!(label(&base.gamma(), &r1) == label(&scaled.gamma(), &r2), "draw {draw}: region label differs");
    }
    Ok("500 draws: equilibria, dominant subsets, region labels and dominance classes unchanged".into())
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("token conservation", token_conservation),
        ("two-voter closed form", two_voter_closed_form),
        ("n-voter unanimity", n_voter_unanimity),
        ("pivotality regression", pivotality_regression),
        ("challenger necessary condition", challenger_condition),
        ("payoff-dominance oracle", dominance_oracle),
        ("region diagram reproduction", region_diagrams),
        ("ordering divergence witness", ordering_witness),
        ("scaling invariance", scaling_invariance),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {}: {name}: PASS ({secs:.1}s) {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: {name}: FAIL ({secs:.1}s) {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
