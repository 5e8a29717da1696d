use serde::{Deserialize, Serialize};

use crate::caratheodory::{required_k, NormKind};
use crate::error::{domain, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BudgetKind {
    /// Approximate `(Ω,G)`-rank from the gauge `μ_p`.
    Rank,
    /// Approximate purification rank from `μ_√,p`; also bounds the q-sqrt rank.
    Puri,
    /// Separable states, no gauge needed; also bounds rank and puri-rank.
    Sep,
    /// Trace norm via the `p = 2` budget times `d^{n+1}`.
    Schatten1,
    /// Nonnegative rank in ℓ2 from an ℓ1 bound `K`.
    Nn,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BudgetInputs {
    pub epsilon: f64,
    pub p: f64,
    pub norm: NormKind,
    /// `μ_p`, `μ_√,p` or the ℓ1 bound `K`, depending on the kind.
    pub scale: Option<f64>,
    pub group_order: u64,
    pub d: Option<usize>,
    pub n: Option<usize>,
}

/// An upper bound on an approximate rank. `value >= 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankBudget {
    pub kind: BudgetKind,
    pub value: u64,
    pub inputs: BudgetInputs,
}

fn check_positive(x: f64, what: &str) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("{what} must be positive, got {x}")))
    }
}

fn times_group(k: u64, group_order: u64) -> Result<u64> {
    if group_order == 0 {
        return Err(domain("group order must be at least 1"));
    }
    k.checked_mul(group_order)
        .ok_or_else(|| Error::Overflow(format!("budget {k} x |G| = {group_order} does not fit in u64")))
}

/// `⌈C_p (ratio)^{p/(p-1)}⌉` or `⌈D_p ratio²⌉`, as `required_k(1, ratio)`.
fn ceiling_term(ratio: f64, p: f64, norm: NormKind) -> Result<u64> {
    required_k(1.0, ratio, p, norm)
}

fn make(kind: BudgetKind, term: u64, inputs: BudgetInputs) -> Result<RankBudget> {
    let value = times_group(term, inputs.group_order)?;
    Ok(RankBudget { kind, value, inputs })
}

/// `⌈C_p (2μ/ε)^{p/(p-1)}⌉ · |G|`, or `⌈D_p (2μ/ε)²⌉ · |G|` for `p ∈ {2} ∪ [4,∞)`.
pub fn budget_rank(epsilon: f64, p: f64, mu: f64, group_order: u64) -> Result<RankBudget> {
    check_positive(epsilon, "epsilon")?;
    check_positive(mu, "mu")?;
    let term = ceiling_term(2.0 * mu / epsilon, p, NormKind::Schatten)?;
    let inputs = BudgetInputs { epsilon, p, norm: NormKind::Schatten, scale: Some(mu), group_order, d: None, n: None };
    make(BudgetKind::Rank, term, inputs)
}

/// The rank formula with `2μ/ε` replaced by `2/δ`, `δ = √(1 + ε/μ²) − 1`.
pub fn budget_puri(epsilon: f64, p: f64, mu_sqrt: f64, group_order: u64) -> Result<RankBudget> {
    check_positive(epsilon, "epsilon")?;
    check_positive(mu_sqrt, "mu_sqrt")?;
    let delta = puri_delta(epsilon, mu_sqrt);
    check_positive(delta, "delta")?;
    let term = ceiling_term(2.0 / delta, p, NormKind::Schatten)?;
    let inputs = BudgetInputs { epsilon, p, norm: NormKind::Schatten, scale: Some(mu_sqrt), group_order, d: None, n: None };
    make(BudgetKind::Puri, term, inputs)
}

/// `√(1 + ε/μ²) − 1`, written to avoid cancellation for small `ε/μ²`.
pub(crate) fn puri_delta(epsilon: f64, mu: f64) -> f64 {
    let x = epsilon / (mu * mu);
    x / ((1.0 + x).sqrt() + 1.0)
}

/// `⌈C_p (2/ε)^{p/(p-1)}⌉ · |G|`.
pub fn budget_sep(epsilon: f64, p: f64, group_order: u64) -> Result<RankBudget> {
    let mut b = budget_rank(epsilon, p, 1.0, group_order)?;
    b.kind = BudgetKind::Sep;
    b.inputs.scale = None;
    Ok(b)
}

/// `d^{n+1}` times a budget computed at `p = 2`.
pub fn budget_schatten1(epsilon: f64, p2_budget: &RankBudget, d: usize, n: usize) -> Result<RankBudget> {
    if p2_budget.inputs.p != 2.0 {
        return Err(domain(format!("need a p = 2 budget, got p = {}", p2_budget.inputs.p)));
    }
    if d == 0 {
        return Err(domain("d must be at least 1"));
    }
    let exp = u32::try_from(n + 1).map_err(|_| Error::Overflow(format!("exponent {} too large", n + 1)))?;
    let mult = (d as u64)
        .checked_pow(exp)
        .ok_or_else(|| Error::Overflow(format!("d^(n+1) = {d}^{exp} does not fit in u64")))?;
    let value = p2_budget
        .value
        .checked_mul(mult)
        .ok_or_else(|| Error::Overflow(format!("budget {} x d^(n+1) = {mult} does not fit in u64", p2_budget.value)))?;
    let inputs = BudgetInputs { epsilon, p: 1.0, d: Some(d), n: Some(n), ..p2_budget.inputs.clone() };
    Ok(RankBudget { kind: BudgetKind::Schatten1, value, inputs })
}

/// `⌈C_p (2K/ε)^{p/(p-1)}⌉ · |G|` in entrywise ℓp, `K >= ‖M‖_{ℓ1}`.
pub fn budget_nn(epsilon: f64, p: f64, k_l1: f64, group_order: u64) -> Result<RankBudget> {
    check_positive(epsilon, "epsilon")?;
    check_positive(k_l1, "K")?;
    let term = ceiling_term(2.0 * k_l1 / epsilon, p, NormKind::Lp)?;
    let inputs = BudgetInputs { epsilon, p, norm: NormKind::Lp, scale: Some(k_l1), group_order, d: None, n: None };
    make(BudgetKind::Nn, term, inputs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::caratheodory::required_k_real;

    #[test]
    fn frozen_values() {
        assert_eq!(budget_rank(1.0, 2.0, 1.0, 1).unwrap().value, 437);
        assert_eq!(budget_puri(3.0, 2.0, 1.0, 1).unwrap().value, 437);
        assert_eq!(budget_puri(3.0, 2.0, 1.0, 5).unwrap().value, 5 * 437);
        assert_eq!(budget_sep(2.0, 2.0, 1).unwrap().value, 110);
        assert_eq!(budget_nn(2.0, 2.0, 1.0, 1).unwrap().value, 110);
        assert_eq!(budget_nn(0.1, 2.0, 1.0, 1).unwrap().value, 43_679);
    }

    #[test]
    fn identities() {
        for eps in [0.3, 1.0, 2.5] {
            for p in [4.0 / 3.0, 2.0, 4.0] {
                let r = budget_rank(eps, p, 1.0, 3).unwrap().value;
                assert_eq!(budget_sep(eps, p, 3).unwrap().value, r);
            }
        }
        let r = budget_rank(0.7, 2.0, 1.3, 1).unwrap().value;
        for g in 1..8 {
            assert_eq!(budget_rank(0.7, 2.0, 1.3, g).unwrap().value, g * r);
        }
        let a = required_k_real(1.0, 2.0 * 2.6, 2.0, NormKind::Schatten).unwrap();
        let b = required_k_real(1.0, 2.0 * 1.3, 2.0, NormKind::Schatten).unwrap();
        assert!((a / b - 4.0).abs() < 1e-12);
    }

    #[test]
    fn schatten1_multiplier() {
        let b = budget_rank(0.5, 2.0, 1.0, 1).unwrap();
        assert_eq!(budget_schatten1(0.5, &b, 2, 1).unwrap().value, 4 * b.value);
        assert!(budget_schatten1(0.5, &budget_rank(0.5, 4.0, 1.0, 1).unwrap(), 2, 1).is_err());
        assert!(matches!(budget_schatten1(0.5, &b, 10, 40), Err(Error::Overflow(_))));
    }

    #[test]
    fn delta_is_stable() {
        for (eps, mu) in [(3.0f64, 1.0f64), (1e-9, 2.0), (0.5, 0.1)] {
            let naive = (1.0 + eps / (mu * mu)).sqrt() - 1.0;
            assert!((puri_delta(eps, mu) - naive).abs() <= 1e-9 * naive.max(1e-6));
        }
    }

    #[test]
    fn range_errors() {
        assert!(budget_rank(1.0, 3.0, 1.0, 1).is_err());
        assert!(budget_rank(0.0, 2.0, 1.0, 1).is_err());
        assert!(budget_rank(1.0, 2.0, 0.0, 1).is_err());
        assert!(budget_rank(1.0, 2.0, 1.0, 0).is_err());
        assert!(budget_nn(1.0, 3.0, 1.0, 1).is_ok());
        assert!(matches!(budget_rank(1e-6, 2.0, 1.0, u64::MAX), Err(Error::Overflow(_))));
    }
}
