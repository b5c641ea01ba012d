//! Trace serialization. Values are written as decimal strings together with
//! the number of fractional digits used.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::OutcomeRecord;
use crate::classifier::{EquilibriumSet, RegionOutcome, ScenarioKind};
use crate::ledger::Outcome;
use crate::rational::to_decimal;

#[derive(Debug, Error)]
pub enum ExportError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Flat rendering of an [`OutcomeRecord`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRow {
    pub precision: u32,
    pub step: usize,
    pub candidate: String,
    pub rating: String,
    pub v0: String,
    pub vr: String,
    pub gamma: String,
    pub challenged: bool,
    pub scenario: ScenarioKind,
    pub equilibrium_set: EquilibriumSet,
    pub region: RegionOutcome,
    pub selected: Option<String>,
    pub outcome: Outcome,
}

impl TraceRow {
    pub fn new(record: &OutcomeRecord, precision: u32) -> Self {
        TraceRow {
            precision,
            step: record.step,
            candidate: record.candidate.clone(),
            rating: to_decimal(&record.rating, precision),
            v0: to_decimal(&record.v0, precision),
            vr: to_decimal(&record.vr, precision),
            gamma: to_decimal(&record.gamma, precision),
            challenged: record.challenged,
            scenario: record.region.scenario,
            equilibrium_set: record.region.equilibrium_set,
            region: record.region.outcome,
            selected: record.selected.as_ref().map(|p| p.to_string()),
            outcome: record.outcome,
        }
    }
}

/// One JSON object per line.
pub fn write_jsonl<W: Write>(
    records: &[OutcomeRecord],
    precision: u32,
    mut out: W,
) -> Result<(), ExportError> {
    for r in records {
        serde_json::to_writer(&mut out, &TraceRow::new(r, precision))?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_jsonl<R: BufRead>(input: R) -> Result<Vec<TraceRow>, ExportError> {
    let mut rows = Vec::new();
    for line in input.lines() {
        let line = line?;
        if !line.trim().is_empty() {
            rows.push(serde_json::from_str(&line)?);
        }
    }
    Ok(rows)
}

pub fn write_csv<W: Write>(
    records: &[OutcomeRecord],
    precision: u32,
    out: W,
) -> Result<(), ExportError> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(TraceRow::new(r, precision))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<TraceRow>, ExportError> {
    let mut r = csv::Reader::from_reader(input);
    let rows = r.deserialize().collect::<Result<Vec<TraceRow>, csv::Error>>()?;
    Ok(rows)
}
