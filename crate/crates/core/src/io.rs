//! Reading strata from CSV or JSON files, and the JSON report envelope.
//!
//! Risk CSV: header `stratum,group,risk`. Count CSV: header
//! `stratum,group,events,total`. One row per (stratum, group) with stratum in
//! {P, Q} and group in {control, exposed}; rows are conventionally ordered
//! P/control, P/exposed, Q/control, Q/exposed.
//!
//! JSON: `{"strata": {"P": {"control": r, "exposed": r}, "Q": {...}}}` or
//! `{"counts": {"P": {"control": {"events": n, "total": n}, ...}, ...}}`.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::agreement::StratifiedRisks;
use crate::error::{Error, Result};
use crate::inference::{Cell, CountTable};
use crate::measures::RiskPair;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    Csv,
    Json,
}

impl InputFormat {
    /// Guesses from the file extension; CSV unless it ends in `.json`.
    pub fn from_path(path: &Path) -> InputFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => InputFormat::Json,
            _ => InputFormat::Csv,
        }
    }
}

impl FromStr for InputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(InputFormat::Csv),
            "json" => Ok(InputFormat::Json),
            _ => Err(Error::Validation(format!("unknown input format `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StrataInput {
    Risks(StratifiedRisks),
    Counts(CountTable),
}

const SLOTS: [(&str, &str); 4] = [
    ("P", "control"),
    ("P", "exposed"),
    ("Q", "control"),
    ("Q", "exposed"),
];

fn slot_index(stratum: &str, group: &str) -> Option<usize> {
    SLOTS.iter().position(|&(s, g)| {
        s.eq_ignore_ascii_case(stratum.trim()) && g.eq_ignore_ascii_case(group.trim())
    })
}

fn risks_from_slots(risks: [f64; 4]) -> Result<StratifiedRisks> {
    let pair = |stratum: &str, c: f64, e: f64| {
        RiskPair::new(c, e).map_err(|err| Error::Validation(format!("stratum {stratum}: {err}")))
    };
    Ok(StratifiedRisks::new(
        pair("P", risks[0], risks[1])?,
        pair("Q", risks[2], risks[3])?,
    ))
}

fn counts_from_slots(cells: [(u64, u64); 4]) -> Result<CountTable> {
    let mut out = [Cell {
        events: 0,
        total: 1,
    }; 4];
    for (i, (events, total)) in cells.into_iter().enumerate() {
        let (stratum, group) = SLOTS[i];
        out[i] = Cell::new(events, total).map_err(|err| match err {
            Error::Validation(msg) => Error::Validation(format!("{stratum}/{group}: {msg}")),
            other => other,
        })?;
    }
    Ok(CountTable {
        p_control: out[0],
        p_exposed: out[1],
        q_control: out[2],
        q_exposed: out[3],
    })
}

fn csv_error(err: csv::Error) -> Error {
    let line = err.position().map_or(0, |p| p.line());
    Error::Parse {
        line,
        column: 0,
        message: err.to_string(),
    }
}

/// Parses CSV text. Columns in parse errors are 1-based field numbers.
pub fn parse_csv(text: &str) -> Result<StrataInput> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header: Vec<String> = reader
        .headers()
        .map_err(csv_error)?
        .iter()
        .map(str::to_ascii_lowercase)
        .collect();
    let counts = match header.iter().map(String::as_str).collect::<Vec<_>>()[..] {
        ["stratum", "group", "risk"] => false,
        ["stratum", "group", "events", "total"] => true,
        _ => return Err(Error::Parse {
            line: 1,
            column: 1,
            message: format!(
                "expected header `stratum,group,risk` or `stratum,group,events,total`, found `{}`",
                header.join(",")
            ),
        }),
    };

    let mut risks: [Option<f64>; 4] = [None; 4];
    let mut cells: [Option<(u64, u64)>; 4] = [None; 4];
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |column: usize| record.get(column).unwrap_or("");
        let slot = slot_index(field(0), field(1)).ok_or_else(|| Error::Parse {
            line,
            column: 1,
            message: format!(
                "unknown stratum/group `{}/{}`; expected P or Q and control or exposed",
                field(0),
                field(1)
            ),
        })?;
        let already = if counts {
            cells[slot].is_some()
        } else {
            risks[slot].is_some()
        };
        if already {
            return Err(Error::Validation(format!(
                "{}/{} appears more than once (line {line})",
                SLOTS[slot].0, SLOTS[slot].1
            )));
        }
        if counts {
            let parse = |column: usize| {
                field(column).parse::<u64>().map_err(|e| Error::Parse {
                    line,
                    column: column as u64 + 1,
                    message: format!("`{}` is not a nonnegative integer: {e}", field(column)),
                })
            };
            cells[slot] = Some((parse(2)?, parse(3)?));
        } else {
            let value = field(2).parse::<f64>().map_err(|e| Error::Parse {
                line,
                column: 3,
                message: format!("`{}` is not a number: {e}", field(2)),
            })?;
            risks[slot] = Some(value);
        }
    }

    let missing = |present: [bool; 4]| -> Result<()> {
        match present.iter().position(|p| !p) {
            Some(i) => Err(Error::Validation(format!(
                "missing row for {}/{}",
                SLOTS[i].0, SLOTS[i].1
            ))),
            None => Ok(()),
        }
    };
    if counts {
        missing(cells.map(|c| c.is_some()))?;
        Ok(StrataInput::Counts(counts_from_slots(
            cells.map(Option::unwrap),
        )?))
    } else {
        missing(risks.map(|r| r.is_some()))?;
        Ok(StrataInput::Risks(risks_from_slots(
            risks.map(Option::unwrap),
        )?))
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonGroups<T> {
    control: T,
    exposed: T,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonCell {
    events: u64,
    total: u64,
}

#[derive(Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
enum JsonInput {
    Strata(BTreeMap<String, JsonGroups<f64>>),
    Counts(BTreeMap<String, JsonGroups<JsonCell>>),
}

fn take_strata<T>(mut map: BTreeMap<String, JsonGroups<T>>) -> Result<[JsonGroups<T>; 2]> {
    let mut get = |name: &str| {
        map.remove(name)
            .ok_or_else(|| Error::Validation(format!("missing stratum {name}")))
    };
    let p = get("P")?;
    let q = get("Q")?;
    if let Some(extra) = map.keys().next() {
        return Err(Error::Validation(format!(
            "unexpected stratum `{extra}`; expected P and Q"
        )));
    }
    Ok([p, q])
}

pub fn parse_json(text: &str) -> Result<StrataInput> {
    let input: JsonInput = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line() as u64,
        column: e.column() as u64,
        message: e.to_string(),
    })?;
    match input {
        JsonInput::Strata(map) => {
            let [p, q] = take_strata(map)?;
            Ok(StrataInput::Risks(risks_from_slots([
                p.control, p.exposed, q.control, q.exposed,
            ])?))
        }
        JsonInput::Counts(map) => {
            let [p, q] = take_strata(map)?;
            let cell = |c: JsonCell| (c.events, c.total);
            Ok(StrataInput::Counts(counts_from_slots([
                cell(p.control),
                cell(p.exposed),
                cell(q.control),
                cell(q.exposed),
            ])?))
        }
    }
}

pub fn load_strata(path: &Path, format: InputFormat) -> Result<StrataInput> {
    let text = fs::read_to_string(path)?;
    match format {
        InputFormat::Csv => parse_csv(&text),
        InputFormat::Json => parse_json(&text),
    }
}

/// Every JSON report has this shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportEnvelope {
    pub command: String,
    pub inputs: serde_json::Value,
    pub results: serde_json::Value,
    pub version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl ReportEnvelope {
    pub fn new<I: Serialize, R: Serialize>(command: &str, inputs: &I, results: &R) -> Result<Self> {
        let to_value = |v: serde_json::Result<serde_json::Value>| {
            v.map_err(|e| Error::Io(std::io::Error::other(e)))
        };
        Ok(ReportEnvelope {
            command: command.to_string(),
            inputs: to_value(serde_json::to_value(inputs))?,
            results: to_value(serde_json::to_value(results))?,
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed: None,
        })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("a JSON value always serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line() as u64,
            column: e.column() as u64,
            message: e.to_string(),
        })
    }
}
