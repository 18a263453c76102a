//! JSON file formats for operators and states, and the numeric formatting
//! shared by every CSV/JSON emitter.
//!
//! Operators: `{"dim": n, "entries": [[[re, im], ...], ...]}` (n rows of n
//! `[re, im]` pairs). States: `{"dim": n, "amplitudes": [[re, im], ...]}`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{C64, Operator, OperatorKind, StateVector};

#[derive(Debug, Serialize, Deserialize)]
struct OperatorJson {
    dim: usize,
    entries: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct StateJson {
    dim: usize,
    amplitudes: Vec<[f64; 2]>,
}

/// Formats a float with 17 significant digits, round-trip exact for f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn operator_from_json(text: &str, kind: OperatorKind) -> Result<Operator> {
    let parsed: OperatorJson =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if parsed.entries.len() != parsed.dim {
        return Err(Error::Parse(format!(
            "operator has {} rows, declared dim {}",
            parsed.entries.len(),
            parsed.dim
        )));
    }
    let mut entries = Vec::with_capacity(parsed.dim * parsed.dim);
    for (i, row) in parsed.entries.iter().enumerate() {
        if row.len() != parsed.dim {
            return Err(Error::Parse(format!(
                "operator row {i} has {} columns, declared dim {}",
                row.len(),
                parsed.dim
            )));
        }
        entries.extend(row.iter().map(|&[re, im]| C64::new(re, im)));
    }
    Operator::new(parsed.dim, entries, kind)
}

pub fn operator_to_json(op: &Operator) -> String {
    let rows: Vec<Vec<[f64; 2]>> = (0..op.dim())
        .map(|i| {
            (0..op.dim())
                .map(|j| {
                    let c = op.at(i, j);
                    [c.re, c.im]
                })
                .collect()
        })
        .collect();
    serde_json::to_string(&OperatorJson {
        dim: op.dim(),
        entries: rows,
    })
    .expect("operator serialization cannot fail")
}

pub fn state_from_json(text: &str) -> Result<StateVector> {
    let parsed: StateJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if parsed.amplitudes.len() != parsed.dim {
        return Err(Error::Parse(format!(
            "state has {} amplitudes, declared dim {}",
            parsed.amplitudes.len(),
            parsed.dim
        )));
    }
    let amps = parsed
        .amplitudes
        .iter()
        .map(|&[re, im]| C64::new(re, im))
        .collect();
    StateVector::normalized(amps)
}

pub fn state_to_json(psi: &StateVector) -> String {
    let amps: Vec<[f64; 2]> = psi.amplitudes().iter().map(|c| [c.re, c.im]).collect();
    serde_json::to_string(&StateJson {
        dim: psi.dim(),
        amplitudes: amps,
    })
    .expect("state serialization cannot fail")
}

pub fn load_operator(path: &Path, kind: OperatorKind) -> Result<Operator> {
    let text = std::fs::read_to_string(path)?;
    operator_from_json(&text, kind)
}

pub fn load_state(path: &Path) -> Result<StateVector> {
    let text = std::fs::read_to_string(path)?;
    state_from_json(&text)
}
