use serde::{Deserialize, Serialize};

use super::{build_euclid_instance, build_slack_instance};
use crate::caratheodory::{approx_caratheodory, AtomOracle, Method, NormKind, SolverConfig, StopRule};
use crate::error::{Error, Result};
use crate::gauge::budget_nn;
use crate::tensor::lp_norm;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanFamily {
    Euclid,
    Slack,
}

impl std::str::FromStr for ScanFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclid" => Ok(ScanFamily::Euclid),
            "slack" => Ok(ScanFamily::Slack),
            _ => Err(Error::Config(format!("unknown scan family {s:?} (euclid or slack)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub d: usize,
    /// Solver iterations until the error dropped to ε.
    pub steps: u64,
    /// Distinct atoms in the witness; an upper bound on the approximate nonnegative rank.
    pub witness_rank: usize,
    pub final_error: f64,
    /// ℓp error of the witness recomputed from its atoms.
    pub witness_error: f64,
    /// d-independent budget with `K = 1`.
    pub budget: u64,
    /// `log₂ d`, the lower bound on the exact nonnegative rank of the Euclidean family.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub log2_d: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationTable {
    pub family: ScanFamily,
    pub epsilon: f64,
    pub p: f64,
    pub method: Method,
    pub rows: Vec<ScanRow>,
}

impl SeparationTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("d,steps,witness_rank,final_error,witness_error,budget,log2_d\n");
        for r in &self.rows {
            let log2 = r.log2_d.map(|x| format!("{x}")).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{:e},{:e},{},{}\n",
                r.d, r.steps, r.witness_rank, r.final_error, r.witness_error, r.budget, log2
            ));
        }
        out
    }
}

/// Approximates the ℓ1-normalized family member at each `d` in ℓp over the
/// basis atoms, down to error `ε`.
pub fn run_separation_scan(family: ScanFamily, dims: &[usize], epsilon: f64, p: f64, method: Method) -> Result<SeparationTable> {
    let budget = budget_nn(epsilon, p, 1.0, 1)?.value;
    let mut rows = Vec::with_capacity(dims.len());
    for &d in dims {
        let t = match family {
            ScanFamily::Euclid => build_euclid_instance(d)?,
            ScanFamily::Slack => build_slack_instance(d)?,
        };
        let oracle = AtomOracle::basis_atoms(1, d)?;
        let target = t.to_matrix();
        let cfg = SolverConfig { p, norm: NormKind::Lp, method, stop: StopRule::epsilon(epsilon), seed: 0 };
        let out = approx_caratheodory(&target, &oracle, &cfg)?;
        let witness = out.combination.value()?;
        rows.push(ScanRow {
            d,
            steps: out.trace.steps(),
            witness_rank: out.combination.distinct().len(),
            final_error: out.final_error(),
            witness_error: lp_norm(&(&witness - &target), p)?,
            budget,
            log2_d: (family == ScanFamily::Euclid).then(|| (d as f64).log2()),
        });
    }
    Ok(SeparationTable { family, epsilon, p, method, rows })
}
