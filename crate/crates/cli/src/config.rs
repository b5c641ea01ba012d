//! Scenario files. Every numeric field accepts a JSON number or a string
//! (`"0.1"`, `"1/10"`) and is read as an exact rational.

use std::path::Path;

use serde::Deserialize;
use serde_json::Value;
use tcr_core::{
    parse_rational, Candidate, Electorate, ModelKind, Rational, ReferenceModel, SelectionPolicy,
    StaticModel, TcrError, TcrParams, ValuationPair,
};

use crate::error::CliError;

pub const DEFAULT_PRECISION: u32 = 6;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    params: Option<RawParams>,
    electorate: Option<RawElectorate>,
    valuation: Option<RawValuation>,
    model: Option<RawModel>,
    policy: Option<RawPolicy>,
    sweep: Option<RawSweep>,
    #[serde(default)]
    candidates: Vec<RawCandidate>,
    precision: Option<u32>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    #[serde(alias = "D")]
    min_deposit: Option<Value>,
    #[serde(alias = "d")]
    dispensation: Option<Value>,
    #[serde(alias = "Q")]
    quorum: Option<Value>,
    #[serde(alias = "s")]
    slash: Option<Value>,
    #[serde(alias = "delta_prime")]
    challenge_margin: Option<Value>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawElectorate {
    voters: Vec<Value>,
    challenger: Value,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawValuation {
    gamma: Option<Value>,
    v0: Option<Value>,
    vr: Option<Value>,
    rating: Option<Value>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    kind: String,
    baseline: Option<Value>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPolicy {
    kind: String,
    seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    gamma: Value,
    delta_prime: Option<Value>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCandidate {
    id: String,
    rating: Value,
}

/// Grid points in file order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepGrid {
    pub gamma: Vec<Rational>,
    pub delta_prime: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioConfig {
    pub params: TcrParams,
    pub electorate: Electorate,
    pub valuation: Option<ValuationPair>,
    pub model: ModelKind,
    pub policy: SelectionPolicy,
    pub sweep: Option<SweepGrid>,
    pub candidates: Vec<Candidate>,
    pub precision: u32,
}

impl ScenarioConfig {
    pub fn require_valuation(&self) -> Result<&ValuationPair, CliError> {
        self.valuation
            .as_ref()
            .ok_or_else(|| CliError::config("valuation", "required by this command (gamma, v0/vr or rating)"))
    }

    pub fn require_sweep(&self) -> Result<&SweepGrid, CliError> {
        self.sweep
            .as_ref()
            .ok_or_else(|| CliError::config("sweep", "required by this command"))
    }

    /// Replaces the seed of a seeded policy; other policies are left alone.
    pub fn override_seed(&mut self, seed: u64) {
        if let SelectionPolicy::SeededRandom(_) = self.policy {
            self.policy = SelectionPolicy::SeededRandom(seed);
        }
    }
}

pub fn load_scenario(path: &Path) -> Result<ScenarioConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    parse_scenario(&text)
}

pub fn parse_scenario(text: &str) -> Result<ScenarioConfig, CliError> {
    let raw: RawConfig =
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid scenario: {e}")))?;

    let params = build_params(raw.params.ok_or_else(|| CliError::config("params", "missing"))?)?;
    let electorate =
        build_electorate(raw.electorate.ok_or_else(|| CliError::config("electorate", "missing"))?)?;
    params
        .effective_margin(&electorate.challenger)
        .map_err(|e| match e {
            TcrError::MarginExceedsDelta { .. } => {
                CliError::config(param_label("challenge_margin"), e.to_string())
            }
            other => CliError::config("electorate.challenger", other.to_string()),
        })?;

    let model = match raw.model {
        None => ModelKind::Reference(ReferenceModel::default()),
        Some(m) => build_model(m)?,
    };
    let valuation = raw.valuation.map(|v| build_valuation(v, &model)).transpose()?;
    let policy = raw.policy.map(build_policy).transpose()?.unwrap_or(SelectionPolicy::PayoffDominant);
    let sweep = raw.sweep.map(|s| build_sweep(s, &params, &electorate)).transpose()?;
    let candidates = raw
        .candidates
        .into_iter()
        .enumerate()
        .map(|(i, c)| {
            let path = format!("candidates[{i}].rating");
            let rating = number(&c.rating, &path)?;
            Candidate::new(c.id, rating).map_err(|e| CliError::config(path, e.to_string()))
        })
        .collect::<Result<Vec<_>, _>>()?;

    Ok(ScenarioConfig {
        params,
        electorate,
        valuation,
        model,
        policy,
        sweep,
        candidates,
        precision: raw.precision.unwrap_or(DEFAULT_PRECISION),
    })
}

fn param_label(field: &str) -> String {
    let symbol = match field {
        "min_deposit" => "D",
        "dispensation" => "d",
        "quorum" => "Q",
        "slash" => "s",
        "challenge_margin" => "delta_prime",
        _ => return format!("params.{field}"),
    };
    format!("params.{field} ({symbol})")
}

fn number(value: &Value, path: &str) -> Result<Rational, CliError> {
    let text = match value {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        _ => return Err(CliError::config(path, "expected a number or numeric string")),
    };
    parse_rational(&text).map_err(|e| CliError::config(path, e.to_string()))
}

fn required(value: Option<Value>, field: &str) -> Result<Rational, CliError> {
    let label = param_label(field);
    let value = value.ok_or_else(|| CliError::config(&label, "missing"))?;
    number(&value, &label)
}

fn build_params(raw: RawParams) -> Result<TcrParams, CliError> {
    let invalid = |e: TcrError| match e {
        TcrError::InvalidParams { field, reason } => CliError::config(param_label(field), reason),
        other => CliError::Config(other.to_string()),
    };
    let params = TcrParams::new(
        required(raw.min_deposit, "min_deposit")?,
        required(raw.dispensation, "dispensation")?,
        required(raw.quorum, "quorum")?,
        required(raw.slash, "slash")?,
    )
    .map_err(invalid)?;
    match raw.challenge_margin {
        None => Ok(params),
        Some(v) => {
            let margin = number(&v, &param_label("challenge_margin"))?;
            params.with_challenge_margin(margin).map_err(invalid)
        }
    }
}

fn build_electorate(raw: RawElectorate) -> Result<Electorate, CliError> {
    let voters = raw
        .voters
        .iter()
        .enumerate()
        .map(|(i, v)| number(v, &format!("electorate.voters[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    let challenger = number(&raw.challenger, "electorate.challenger")?;
    Electorate::new(voters, challenger).map_err(|e| CliError::config("electorate.voters", e.to_string()))
}

fn build_model(raw: RawModel) -> Result<ModelKind, CliError> {
    let baseline = raw
        .baseline
        .map(|b| number(&b, "model.baseline"))
        .transpose()?;
    match raw.kind.as_str() {
        "reference" => Ok(ModelKind::Reference(match baseline {
            Some(baseline) => ReferenceModel { baseline },
            None => ReferenceModel::default(),
        })),
        "static" => Ok(ModelKind::Static(match baseline {
            Some(baseline) => StaticModel { baseline },
            None => StaticModel::default(),
        })),
        other => Err(CliError::config(
            "model.kind",
            format!("unknown model `{other}`, expected `reference` or `static`"),
        )),
    }
}

fn build_valuation(raw: RawValuation, model: &ModelKind) -> Result<ValuationPair, CliError> {
    use tcr_core::{RegistryState, ValuationModel};

    let pair = match (raw.gamma, raw.v0, raw.vr, raw.rating) {
        (Some(g), None, None, None) => ValuationPair::from_gamma(number(&g, "valuation.gamma")?),
        (None, Some(v0), Some(vr), None) => {
            ValuationPair::new(number(&v0, "valuation.v0")?, number(&vr, "valuation.vr")?)
        }
        (None, None, None, Some(r)) => {
            let rating = number(&r, "valuation.rating")?;
            let candidate = Candidate::new("valuation", rating)
                .map_err(|e| CliError::config("valuation.rating", e.to_string()))?;
            model.valuation(&RegistryState::default(), &candidate.rating)
        }
        _ => {
            return Err(CliError::config(
                "valuation",
                "give exactly one of `gamma`, both `v0` and `vr`, or `rating`",
            ))
        }
    };
    pair.map_err(|e| CliError::config("valuation", e.to_string()))
}

fn build_policy(raw: RawPolicy) -> Result<SelectionPolicy, CliError> {
    let policy = match raw.kind.as_str() {
        "payoff_dominant" => SelectionPolicy::PayoffDominant,
        "always_reject" => SelectionPolicy::AlwaysReject,
        "always_accept" => SelectionPolicy::AlwaysAccept,
        "seeded_random" => SelectionPolicy::SeededRandom(
            raw.seed
                .ok_or_else(|| CliError::config("policy.seed", "required for `seeded_random`"))?,
        ),
        other => {
            return Err(CliError::config(
                "policy.kind",
                format!(
                    "unknown policy `{other}`, expected one of payoff_dominant, always_reject, \
                     always_accept, seeded_random"
                ),
            ))
        }
    };
    if raw.seed.is_some() && !matches!(policy, SelectionPolicy::SeededRandom(_)) {
        return Err(CliError::config("policy.seed", "only valid for `seeded_random`"));
    }
    Ok(policy)
}

/// A list of values or an inclusive `{from, to, step}` range.
fn grid(value: &Value, path: &str) -> Result<Vec<Rational>, CliError> {
    let points = match value {
        Value::Array(items) => items
            .iter()
            .enumerate()
            .map(|(i, v)| number(v, &format!("{path}[{i}]")))
            .collect::<Result<Vec<_>, _>>()?,
        Value::Object(map) => {
            for key in map.keys() {
                if !matches!(key.as_str(), "from" | "to" | "step") {
                    return Err(CliError::config(format!("{path}.{key}"), "unknown field"));
                }
            }
            let field = |k: &str| {
                let p = format!("{path}.{k}");
                let v = map.get(k).ok_or_else(|| CliError::config(&p, "missing"))?;
                number(v, &p)
            };
            let (from, to, step) = (field("from")?, field("to")?, field("step")?);
            if step <= Rational::from_integer(0.into()) {
                return Err(CliError::config(format!("{path}.step"), "must be > 0"));
            }
            let mut points = Vec::new();
            let mut x = from;
            while x <= to {
                points.push(x.clone());
                x += &step;
            }
            points
        }
        _ => return Err(CliError::config(path, "expected a list or {from, to, step}")),
    };
    if points.is_empty() {
        return Err(CliError::config(path, "empty grid"));
    }
    Ok(points)
}

fn build_sweep(raw: RawSweep, params: &TcrParams, electorate: &Electorate) -> Result<SweepGrid, CliError> {
    let gamma = grid(&raw.gamma, "sweep.gamma")?;
    if let Some(i) = gamma.iter().position(|g| g <= &Rational::from_integer(0.into())) {
        return Err(CliError::config(format!("sweep.gamma[{i}]"), "must be > 0"));
    }
    let delta_prime = match raw.delta_prime {
        Some(v) => grid(&v, "sweep.delta_prime")?,
        None => vec![params
            .effective_margin(&electorate.challenger)
            .map_err(|e| CliError::Config(e.to_string()))?],
    };
    for (i, dp) in delta_prime.iter().enumerate() {
        params
            .clone()
            .with_challenge_margin(dp.clone())
            .and_then(|p| p.effective_margin(&electorate.challenger))
            .map_err(|e| CliError::config(format!("sweep.delta_prime[{i}]"), e.to_string()))?;
    }
    Ok(SweepGrid { gamma, delta_prime })
}
