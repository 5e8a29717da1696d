use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::{Method, NormKind};

/// One iteration of the solver.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub k: u64,
    /// Atom added at this step (`X_k`).
    pub atom_id: usize,
    /// `‖A - A_k‖` in the solver norm.
    pub error: f64,
    /// Envelope value at `k`.
    pub bound: f64,
    /// Directional derivative of the selected atom at selection time; absent for `k = 1`.
    pub derivative: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceMeta {
    pub p: f64,
    pub norm: NormKind,
    pub method: Method,
    pub seed: u64,
    pub epsilon: Option<f64>,
    pub k_max: u64,
    pub diameter: f64,
    pub oracle: String,
    pub atoms: usize,
    pub tie_break: String,
    /// The iterate hit the target exactly and the run stopped early.
    pub exact_representation: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub meta: TraceMeta,
    pub records: Vec<TraceRecord>,
}

pub const CSV_HEADER: &str = "k,atom_id,error,bound,derivative";

impl RunTrace {
    /// CSV with columns `k,atom_id,error,bound,derivative`. Floats use the
    /// shortest round-trip representation.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(48 * (self.records.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            write!(out, "{},{},{:e},{:e},", r.k, r.atom_id, r.error, r.bound).unwrap();
            if let Some(d) = r.derivative {
                write!(out, "{d:e}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn meta_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(&self.meta)
    }

    pub fn final_error(&self) -> Option<f64> {
        self.records.last().map(|r| r.error)
    }

    pub fn steps(&self) -> u64 {
        self.records.last().map_or(0, |r| r.k)
    }
}
