use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::bounds::{error_bound, regime, required_k};
use super::oracle::{norm_of, AtomOracle};
use super::trace::{RunTrace, TraceMeta, TraceRecord};
use super::NormKind;
use crate::decomp::ConvexCombination;
use crate::error::{Error, Result};
use crate::par;
use crate::tensor::{ComplexMatrix, DerivativeFunctional};

/// Slack on the descent test `𝒟 <= 0`.
pub const FEASIBILITY_SLACK: f64 = 1e-12;
/// Errors at or below this count as exact representation.
pub const EXACT_TOLERANCE: f64 = 1e-14;

/// Atom selection rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Method 1: first feasible atom in oracle order.
    Ordered,
    /// Method 2: atom with the smallest derivative, ties by oracle order.
    Greedy,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Ordered => "ordered",
            Method::Greedy => "greedy",
        })
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ordered" | "method1" | "1" => Ok(Method::Ordered),
            "greedy" | "method2" | "2" => Ok(Method::Greedy),
            _ => Err(Error::Config(format!("unknown method {s:?}"))),
        }
    }
}

/// When to stop. With only `epsilon`, the step cap is `required_k(ε, diam)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StopRule {
    pub epsilon: Option<f64>,
    pub k_max: Option<u64>,
}

impl StopRule {
    pub fn epsilon(epsilon: f64) -> Self {
        StopRule { epsilon: Some(epsilon), k_max: None }
    }

    pub fn k_max(k_max: u64) -> Self {
        StopRule { epsilon: None, k_max: Some(k_max) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub p: f64,
    pub norm: NormKind,
    pub method: Method,
    pub stop: StopRule,
    /// Recorded in the trace; the solver itself is deterministic.
    pub seed: u64,
}

#[derive(Clone, Debug)]
pub struct SolverOutput {
    /// `A_k = (1/k) Σ X_i`, one entry per step (atoms may repeat).
    pub combination: ConvexCombination,
    pub iterate: ComplexMatrix,
    pub trace: RunTrace,
    pub exact: bool,
}

impl SolverOutput {
    pub fn final_error(&self) -> f64 {
        self.trace.final_error().unwrap_or(f64::NAN)
    }
}

/// A chosen atom and its directional derivative.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Selection {
    pub index: usize,
    pub derivative: f64,
}

fn functional(w: &ComplexMatrix, p: f64, kind: NormKind) -> Result<Option<DerivativeFunctional>> {
    let f = match kind {
        NormKind::Schatten => DerivativeFunctional::schatten(w, p),
        NormKind::Lp => DerivativeFunctional::lp(w, p),
    };
    match f {
        Ok(f) => Ok(Some(f)),
        Err(Error::NonDifferentiableAtZero) => Ok(None),
        Err(e) => Err(e),
    }
}

/// `𝒟_{X_i - A}` at the functional's base point, for every atom `i`.
fn derivative_of(oracle: &AtomOracle, f: &DerivativeFunctional, target_term: f64, i: usize) -> f64 {
    f.apply_sparse(oracle.atom(i).nonzeros()) - target_term
}

fn ordered_scan(oracle: &AtomOracle, f: &DerivativeFunctional, target_term: f64) -> std::result::Result<Selection, f64> {
    let mut min = f64::INFINITY;
    for i in 0..oracle.len() {
        let d = derivative_of(oracle, f, target_term, i);
        if d <= FEASIBILITY_SLACK {
            return Ok(Selection { index: i, derivative: d });
        }
        min = min.min(d);
    }
    Err(min)
}

fn greedy_scan(oracle: &AtomOracle, f: &DerivativeFunctional, target_term: f64) -> std::result::Result<Selection, f64> {
    match par::argmin(oracle.len(), |i| derivative_of(oracle, f, target_term, i)) {
        Some((index, d)) if d <= FEASIBILITY_SLACK => Ok(Selection { index, derivative: d }),
        Some((_, d)) => Err(d),
        None => Err(f64::NAN),
    }
}

fn check_shapes(oracle: &AtomOracle, m: &ComplexMatrix) -> Result<()> {
    if m.shape() != oracle.shape() {
        return Err(Error::Shape { expected: format!("{:?}", oracle.shape()), got: format!("{:?}", m.shape()) });
    }
    Ok(())
}

fn select_with(
    oracle: &AtomOracle,
    base: &ComplexMatrix,
    target: &ComplexMatrix,
    p: f64,
    kind: NormKind,
    scan: fn(&AtomOracle, &DerivativeFunctional, f64) -> std::result::Result<Selection, f64>,
) -> Result<Selection> {
    regime(p, kind)?;
    check_shapes(oracle, base)?;
    check_shapes(oracle, target)?;
    let f = functional(base, p, kind)?.ok_or(Error::NonDifferentiableAtZero)?;
    let t = f.apply(target);
    scan(oracle, &f, t).map_err(|min| Error::Infeasible { k: 0, min_derivative: min, oracle: oracle.kind() })
}

/// Method 1 at base point `base = A_k - A`: the first atom `X` in oracle order with
/// `𝒟_{X-A}‖·‖|_{base} <= 0` (up to [`FEASIBILITY_SLACK`]).
pub fn select_ordered(oracle: &AtomOracle, base: &ComplexMatrix, target: &ComplexMatrix, p: f64, kind: NormKind) -> Result<Selection> {
    select_with(oracle, base, target, p, kind, ordered_scan)
}

/// Method 2 at base point `base = A_k - A`: the atom minimizing
/// `𝒟_{X-A}‖·‖|_{base}`, ties broken by oracle order.
pub fn select_greedy(oracle: &AtomOracle, base: &ComplexMatrix, target: &ComplexMatrix, p: f64, kind: NormKind) -> Result<Selection> {
    select_with(oracle, base, target, p, kind, greedy_scan)
}

/// Deterministic approximate Carathéodory iteration
/// `A_k = (1/k) Σ_{i<=k} X_i` towards `target`.
///
/// Method 1 starts from the first atom, Method 2 from the atom closest to the
/// target. The run stops at `ε`, at the step cap, or when the iterate equals
/// the target (`error <= 1e-14`), in which case the derivative at the base
/// point is undefined.
pub fn approx_caratheodory(target: &ComplexMatrix, oracle: &AtomOracle, cfg: &SolverConfig) -> Result<SolverOutput> {
    let (p, kind) = (cfg.p, cfg.norm);
    regime(p, kind)?;
    check_shapes(oracle, target)?;
    if cfg.stop.epsilon.is_none() && cfg.stop.k_max.is_none() {
        return Err(Error::Config("a stop rule needs epsilon or k_max".into()));
    }
    if let Some(e) = cfg.stop.epsilon {
        if !(e > 0.0) {
            return Err(Error::Domain(format!("epsilon must be positive, got {e}")));
        }
    }
    let diam = oracle.diameter(p, kind)?;
    let k_max = match (cfg.stop.k_max, cfg.stop.epsilon) {
        (Some(k), _) => k.max(1),
        (None, Some(e)) if diam > 0.0 => required_k(e, diam, p, kind)?,
        (None, _) => 1,
    };

    let first = match cfg.method {
        Method::Ordered => 0,
        Method::Greedy => {
            let dists = par::map_indexed(oracle.len(), |i| norm_of(&(oracle.atom(i).value() - target), p, kind));
            let dists = dists.into_iter().collect::<Result<Vec<f64>>>()?;
            par::argmin(dists.len(), |i| dists[i]).map(|(i, _)| i).unwrap_or(0)
        }
    };

    let (rows, cols) = oracle.shape();
    let mut sum = ComplexMatrix::zeros(rows, cols);
    let mut chosen: Vec<Arc<_>> = Vec::new();
    let mut records = Vec::new();
    let mut next = Selection { index: first, derivative: f64::NAN };
    let mut exact = false;
    let mut k: u64 = 0;
    let mut w = ComplexMatrix::zeros(rows, cols);
    loop {
        let atom = oracle.atom(next.index).clone();
        {
            let s = sum.as_mut_slice();
            for &(i, j, z) in atom.nonzeros() {
                s[i + j * rows] += z;
            }
        }
        k += 1;
        chosen.push(atom.clone());
        let inv = 1.0 / k as f64;
        for ((wz, sz), tz) in w.as_mut_slice().iter_mut().zip(sum.as_slice()).zip(target.as_slice()) {
            *wz = sz * inv - tz;
        }
        let f = functional(&w, p, kind)?;
        let error = f.as_ref().map_or(0.0, DerivativeFunctional::base_norm);
        records.push(TraceRecord {
            k,
            atom_id: atom.id(),
            error,
            bound: error_bound(k, diam, p, kind)?,
            derivative: (k > 1).then_some(next.derivative),
        });
        if error <= EXACT_TOLERANCE {
            exact = true;
            break;
        }
        if cfg.stop.epsilon.is_some_and(|e| error <= e) || k >= k_max {
            break;
        }
        let f = f.expect("nonzero error");
        let t = f.apply(target);
        let scan = match cfg.method {
            Method::Ordered => ordered_scan,
            Method::Greedy => greedy_scan,
        };
        next = scan(oracle, &f, t).map_err(|min| Error::Infeasible { k: k as usize, min_derivative: min, oracle: oracle.kind() })?;
    }

    let mut iterate = sum;
    iterate.scale_mut(1.0 / k as f64);
    let trace = RunTrace {
        meta: TraceMeta {
            p,
            norm: kind,
            method: cfg.method,
            seed: cfg.seed,
            epsilon: cfg.stop.epsilon,
            k_max,
            diameter: diam,
            oracle: oracle.kind().to_string(),
            atoms: oracle.len(),
            tie_break: "oracle order".into(),
            exact_representation: exact,
        },
        records,
    };
    Ok(SolverOutput { combination: ConvexCombination::uniform(chosen), iterate, trace, exact })
}
