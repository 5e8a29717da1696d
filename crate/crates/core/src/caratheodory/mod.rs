//! The deterministic approximate Carathéodory solver over finite atom
//! oracles, its two selection methods, and the closed-form error and step
//! budgets.

mod atom;
mod bounds;
mod oracle;
mod solver;
mod trace;

use std::fmt;

pub use atom::Atom;
pub use bounds::{c_p, d_p, error_bound, regime, required_k, required_k_real, BoundConstants, NormKind, Regime};
pub use oracle::{AtomOracle, EXACT_DIAMETER_LIMIT, ORACLE_SIZE_CAP};
pub use solver::{
    approx_caratheodory, select_greedy, select_ordered, Method, Selection, SolverConfig, SolverOutput, StopRule,
    EXACT_TOLERANCE, FEASIBILITY_SLACK,
};
pub use trace::{RunTrace, TraceMeta, TraceRecord, CSV_HEADER};


/// Where the atoms of an oracle come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleKind {
    FiniteList,
    ProductSample,
}

impl fmt::Display for OracleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OracleKind::FiniteList => "finite-list",
            OracleKind::ProductSample => "sampled product-psd",
        })
    }
}
