use num::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use tcr_core::classifier::{classify_region_2voter, classify_region_nvoter, region_from_outcomes};
use tcr_core::registry::export::{self, TraceRow};
use tcr_core::registry::{CompositionCount, MAX_POOL};
use tcr_core::{
    challenge_decision, challenge_necessary_condition, classify_dominance, epsilon_threshold,
    find_equilibria, ordering_experiment, to_decimal, vote_incentive_report, Dominance,
    Electorate, EquilibriumSet, Outcome, Rational, RegionLabel, RegionOutcome, ScenarioKind,
    Simulation, StrategyProfile, TcrParams, ThresholdSet, ValuationPair, Vote, VotingGame,
};

use crate::config::ScenarioConfig;
use crate::error::CliError;
use crate::Format;

/// What a command produced: the text for stdout and extra files for `--out`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub stdout: String,
    pub files: Vec<(String, String)>,
}

fn render_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Runtime(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

fn render_csv<T: Serialize>(rows: &[T]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Runtime(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Runtime(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Runtime(e.to_string()))
}

fn single(name: &str, format: Format, text: String) -> Output {
    let file = format!("{name}.{}", format.extension());
    Output {
        stdout: text.clone(),
        files: vec![(file, text)],
    }
}

fn game(cfg: &ScenarioConfig, params: TcrParams, valuation: ValuationPair) -> Result<VotingGame, CliError> {
    Ok(VotingGame::new(
        params,
        cfg.electorate.voters.clone(),
        cfg.electorate.challenger.clone(),
        valuation,
    )?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquilibriumRow {
    pub profile: String,
    pub outcome: Outcome,
    pub payoffs: Vec<String>,
    pub dominant: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub profile: String,
    pub outcome: Outcome,
    pub equilibrium: bool,
    pub pivotal: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquilibriaReport {
    pub precision: u32,
    pub voters: Vec<String>,
    pub challenger: String,
    pub v0: String,
    pub vr: String,
    pub gamma: String,
    pub dominance: Dominance,
    pub equilibria: Vec<EquilibriumRow>,
    pub dominant: Vec<String>,
    pub profiles: Vec<ProfileRow>,
}

/// CSV form: one line per profile, pivotal flags as a 0/1 string and
/// payoffs joined by `;` for equilibria.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquilibriaCsvRow {
    pub precision: u32,
    pub profile: String,
    pub outcome: Outcome,
    pub equilibrium: bool,
    pub dominant: bool,
    pub pivotal: String,
    pub payoffs: String,
}

pub fn equilibria(cfg: &ScenarioConfig, format: Format) -> Result<Output, CliError> {
    let p = cfg.precision;
    let valuation = cfg.require_valuation()?.clone();
    let g = game(cfg, cfg.params.clone(), valuation.clone())?;
    let report = find_equilibria(&g)?;

    let equilibria: Vec<EquilibriumRow> = report
        .equilibria
        .iter()
        .map(|e| EquilibriumRow {
            profile: e.profile.to_string(),
            outcome: e.outcome,
            payoffs: e.payoffs.iter().map(|x| to_decimal(x, p)).collect(),
            dominant: report.is_dominant(&e.profile),
        })
        .collect();

    let text = match format {
        Format::Json => render_json(&EquilibriaReport {
            precision: p,
            voters: g.voters.iter().map(|t| to_decimal(t, p)).collect(),
            challenger: to_decimal(&g.challenger, p),
            v0: to_decimal(&valuation.v0, p),
            vr: to_decimal(&valuation.vr, p),
            gamma: to_decimal(&valuation.gamma(), p),
            dominance: classify_dominance(&valuation.gamma()),
            dominant: report.dominant.iter().map(|s| s.to_string()).collect(),
            equilibria,
            profiles: report
                .profiles
                .iter()
                .map(|s| ProfileRow {
                    profile: s.profile.to_string(),
                    outcome: s.outcome,
                    equilibrium: s.is_equilibrium,
                    pivotal: s.pivotal.clone(),
                })
                .collect(),
        })?,
        Format::Csv => {
            let rows: Vec<EquilibriaCsvRow> = report
                .profiles
                .iter()
                .map(|s| {
                    let name = s.profile.to_string();
                    let payoffs = equilibria
                        .iter()
                        .find(|e| e.profile == name)
                        .map(|e| e.payoffs.join(";"))
                        .unwrap_or_default();
                    EquilibriaCsvRow {
                        precision: p,
                        dominant: report.is_dominant(&s.profile),
                        profile: name,
                        outcome: s.outcome,
                        equilibrium: s.is_equilibrium,
                        pivotal: s.pivotal.iter().map(|&b| if b { '1' } else { '0' }).collect(),
                        payoffs,
                    }
                })
                .collect();
            render_csv(&rows)?
        }
    };
    Ok(single("equilibria", format, text))
}

/// How a sweep point's region was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Enumeration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepPoint {
    pub gamma: Rational,
    pub delta_prime: Rational,
    pub delta: Rational,
    pub epsilon: Option<Rational>,
    pub challenged: bool,
    pub label: RegionLabel,
    /// Which threshold `gamma` sits exactly on, if any.
    pub boundary: Option<&'static str>,
    pub dominance: Dominance,
    pub method: Method,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepRow {
    pub precision: u32,
    pub delta_prime: String,
    pub gamma: String,
    pub delta: String,
    pub epsilon: Option<String>,
    pub challenged: bool,
    pub scenario: ScenarioKind,
    pub equilibrium_set: EquilibriumSet,
    pub region: RegionOutcome,
    pub boundary: Option<String>,
    pub dominance: Dominance,
    pub method: Method,
}

impl SweepPoint {
    pub fn row(&self, precision: u32) -> SweepRow {
        SweepRow {
            precision,
            delta_prime: to_decimal(&self.delta_prime, precision),
            gamma: to_decimal(&self.gamma, precision),
            delta: to_decimal(&self.delta, precision),
            epsilon: self.epsilon.as_ref().map(|e| to_decimal(e, precision)),
            challenged: self.challenged,
            scenario: self.label.scenario,
            equilibrium_set: self.label.equilibrium_set,
            region: self.label.outcome,
            boundary: self.boundary.map(str::to_string),
            dominance: self.dominance,
            method: self.method,
        }
    }
}

fn equal_holdings(electorate: &Electorate) -> bool {
    electorate.voters.windows(2).all(|w| w[0] == w[1])
}

/// The closed forms hold when holdings are equal, unanimous acceptance
/// passes, unanimous rejection fails, and (n >= 3) nobody is pivotal in either.
fn closed_form_region(g: &VotingGame, thresholds: &ThresholdSet) -> Result<Option<RegionLabel>, CliError> {
    let n = g.voter_count();
    let all_accept = StrategyProfile::unanimous(Vote::Accept, n);
    let all_reject = StrategyProfile::unanimous(Vote::Reject, n);
    if n < 2
        || g.outcome(&all_accept)? != Outcome::Accepted
        || g.outcome(&all_reject)? != Outcome::Rejected
    {
        return Ok(None);
    }
    let gamma = g.valuation.gamma();
    if n == 2 {
        let mixed_rejects = g.outcome(&all_accept.with_flip(0))? == Outcome::Rejected
            && g.outcome(&all_accept.with_flip(1))? == Outcome::Rejected;
        return Ok(mixed_rejects.then(|| classify_region_2voter(&gamma, thresholds)));
    }
    for k in 0..n {
        if g.is_pivotal(&all_accept, k)? || g.is_pivotal(&all_reject, k)? {
            return Ok(None);
        }
    }
    Ok(Some(classify_region_nvoter(&gamma, &thresholds.delta_prime)))
}

/// Evaluates one grid point.
pub fn sweep_point(cfg: &ScenarioConfig, gamma: &Rational, delta_prime: &Rational) -> Result<SweepPoint, CliError> {
    let params = cfg.params.clone().with_challenge_margin(delta_prime.clone())?;
    let electorate = &cfg.electorate;
    let g = game(cfg, params.clone(), ValuationPair::from_gamma(gamma.clone())?)?;
    let delta = tcr_core::delta_threshold(&params, &electorate.challenger)?;
    let two_equal = electorate.voters.len() == 2 && equal_holdings(electorate);
    let epsilon = if two_equal {
        Some(epsilon_threshold(&params, &electorate.voters[0])?)
    } else {
        None
    };
    let challenged = challenge_decision(gamma, &params, &electorate.challenger)?;

    let closed = if equal_holdings(electorate) {
        let thresholds = ThresholdSet {
            delta: delta.clone(),
            delta_prime: delta_prime.clone(),
            epsilon: epsilon.clone().unwrap_or_else(|| delta.clone()),
        };
        closed_form_region(&g, &thresholds)?
    } else {
        None
    };
    let (label, method) = match closed {
        Some(label) => (label, Method::ClosedForm),
        None => {
            let report = find_equilibria(&g)?;
            let scenario = electorate.scenario(&params)?;
            let label = region_from_outcomes(scenario, challenged, &report.equilibrium_outcomes())
                .ok_or_else(|| CliError::Runtime(format!("no pure equilibrium at gamma {gamma}")))?;
            (label, Method::Enumeration)
        }
    };

    let one = Rational::one();
    let on_eps = epsilon.as_ref().is_some_and(|e| gamma == &(&one + e));
    let on_dp = gamma == &(&one + delta_prime);
    let boundary = match (on_eps, on_dp) {
        (true, true) => Some("epsilon+delta_prime"),
        (true, false) => Some("epsilon"),
        (false, true) => Some("delta_prime"),
        (false, false) => None,
    };
    Ok(SweepPoint {
        gamma: gamma.clone(),
        delta_prime: delta_prime.clone(),
        delta,
        epsilon,
        challenged,
        label,
        boundary,
        dominance: classify_dominance(gamma),
        method,
    })
}

/// Every grid point, `delta'` outer and `gamma` inner, in file order.
pub fn sweep_points(cfg: &ScenarioConfig) -> Result<Vec<SweepPoint>, CliError> {
    let grid = cfg.require_sweep()?;
    let pairs: Vec<(&Rational, &Rational)> = grid
        .delta_prime
        .iter()
        .flat_map(|dp| grid.gamma.iter().map(move |g| (g, dp)))
        .collect();
    pairs
        .into_par_iter()
        .map(|(g, dp)| sweep_point(cfg, g, dp))
        .collect()
}

pub fn sweep(cfg: &ScenarioConfig, format: Format) -> Result<Output, CliError> {
    let rows: Vec<SweepRow> = sweep_points(cfg)?.iter().map(|pt| pt.row(cfg.precision)).collect();
    let text = match format {
        Format::Json => render_json(&rows)?,
        Format::Csv => render_csv(&rows)?,
    };
    Ok(single("sweep", format, text))
}

fn simulation<'a>(cfg: &'a ScenarioConfig) -> Simulation<'a> {
    Simulation {
        model: &cfg.model,
        policy: cfg.policy,
        params: &cfg.params,
        electorate: &cfg.electorate,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub precision: u32,
    pub composition: Vec<String>,
    pub trace: Vec<TraceRow>,
}

pub fn simulate(cfg: &ScenarioConfig, format: Format) -> Result<Output, CliError> {
    let state = simulation(cfg).run_sequence(&cfg.candidates)?;
    let p = cfg.precision;
    let report = SimulationReport {
        precision: p,
        composition: state.composition(),
        trace: state.history.iter().map(|r| TraceRow::new(r, p)).collect(),
    };
    let summary = render_json(&report)?;

    let mut jsonl = Vec::new();
    export::write_jsonl(&state.history, p, &mut jsonl).map_err(|e| CliError::Runtime(e.to_string()))?;
    let mut csv_trace = Vec::new();
    export::write_csv(&state.history, p, &mut csv_trace).map_err(|e| CliError::Runtime(e.to_string()))?;
    let utf8 = |b: Vec<u8>| String::from_utf8(b).map_err(|e| CliError::Runtime(e.to_string()));
    let (jsonl, csv_trace) = (utf8(jsonl)?, utf8(csv_trace)?);

    let stdout = match format {
        Format::Json => summary.clone(),
        Format::Csv => csv_trace.clone(),
    };
    Ok(Output {
        stdout,
        files: vec![
            ("simulation.json".into(), summary),
            ("trace.jsonl".into(), jsonl),
            ("trace.csv".into(), csv_trace),
        ],
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderingsReport {
    pub pool: Vec<String>,
    pub permutations: usize,
    pub diverges: bool,
    pub compositions: Vec<CompositionCount>,
    /// Two proposal orders with different final registries.
    pub witness: Option<[Vec<String>; 2]>,
    pub runs: Vec<tcr_core::registry::OrderingRun>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderingCsvRow {
    pub order: String,
    pub composition: String,
}

pub fn orderings(cfg: &ScenarioConfig, format: Format) -> Result<Output, CliError> {
    if cfg.candidates.len() > MAX_POOL {
        return Err(CliError::config(
            "candidates",
            format!("pool of {} exceeds the permutation bound of {MAX_POOL}", cfg.candidates.len()),
        ));
    }
    let report = ordering_experiment(&cfg.candidates, &simulation(cfg))?;
    let text = match format {
        Format::Json => render_json(&OrderingsReport {
            pool: cfg.candidates.iter().map(|c| c.id.clone()).collect(),
            permutations: report.runs.len(),
            diverges: report.diverges(),
            witness: report
                .witness_runs()
                .map(|(a, b)| [a.order.clone(), b.order.clone()]),
            compositions: report.compositions,
            runs: report.runs,
        })?,
        Format::Csv => {
            let rows: Vec<OrderingCsvRow> = report
                .runs
                .iter()
                .map(|r| OrderingCsvRow {
                    order: r.order.join(" "),
                    composition: r.composition.join(" "),
                })
                .collect();
            render_csv(&rows)?
        }
    };
    Ok(single("orderings", format, text))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GammaCheck {
    pub gamma: String,
    pub necessary_condition: bool,
    pub challenged: bool,
    pub dominance: Dominance,
    pub reject_losing_bound: String,
    pub reject_losing_condition: bool,
    pub accept_losing_condition: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdsReport {
    pub precision: u32,
    pub delta: String,
    pub delta_prime: String,
    pub epsilon: Option<String>,
    pub necessary_bound: String,
    pub challenge_bound: String,
    pub accept_bound: Option<String>,
    pub gamma: Option<GammaCheck>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdCsvRow {
    pub name: String,
    pub value: String,
}

pub fn thresholds(cfg: &ScenarioConfig, format: Format) -> Result<Output, CliError> {
    let p = cfg.precision;
    let dec = |x: &Rational| to_decimal(x, p);
    let e = &cfg.electorate;
    let delta = tcr_core::delta_threshold(&cfg.params, &e.challenger)?;
    let delta_prime = cfg.params.effective_margin(&e.challenger)?;
    let epsilon = if e.voters.len() == 2 && equal_holdings(e) {
        Some(epsilon_threshold(&cfg.params, &e.voters[0])?)
    } else {
        None
    };
    let one = Rational::one();
    let gamma = match &cfg.valuation {
        None => None,
        Some(v) => {
            let g = v.gamma();
            let incentives = vote_incentive_report(&cfg.params, &g);
            Some(GammaCheck {
                gamma: dec(&g),
                necessary_condition: challenge_necessary_condition(&g, &delta),
                challenged: challenge_decision(&g, &cfg.params, &e.challenger)?,
                dominance: classify_dominance(&g),
                reject_losing_bound: dec(&incentives.reject_losing_bound),
                reject_losing_condition: incentives.reject_losing_condition,
                accept_losing_condition: incentives.accept_losing_condition,
            })
        }
    };
    let report = ThresholdsReport {
        precision: p,
        delta: dec(&delta),
        delta_prime: dec(&delta_prime),
        epsilon: epsilon.as_ref().map(dec),
        necessary_bound: dec(&(&one + &delta)),
        challenge_bound: dec(&(&one + &delta_prime)),
        accept_bound: epsilon.as_ref().map(|x| dec(&(&one + x))),
        gamma,
    };
    let text = match format {
        Format::Json => render_json(&report)?,
        Format::Csv => {
            let mut rows = vec![
                ("precision", p.to_string()),
                ("delta", report.delta.clone()),
                ("delta_prime", report.delta_prime.clone()),
                ("necessary_bound", report.necessary_bound.clone()),
                ("challenge_bound", report.challenge_bound.clone()),
            ];
            if let (Some(eps), Some(bound)) = (&report.epsilon, &report.accept_bound) {
                rows.push(("epsilon", eps.clone()));
                rows.push(("accept_bound", bound.clone()));
            }
            if let Some(g) = &report.gamma {
                rows.push(("gamma", g.gamma.clone()));
                rows.push(("necessary_condition", g.necessary_condition.to_string()));
                rows.push(("challenged", g.challenged.to_string()));
            }
            let rows: Vec<ThresholdCsvRow> = rows
                .into_iter()
                .map(|(name, value)| ThresholdCsvRow { name: name.into(), value })
                .collect();
            render_csv(&rows)?
        }
    };
    Ok(single("thresholds", format, text))
}
