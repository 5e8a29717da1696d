use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Which norm the solver measures errors in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormKind {
    /// Schatten-p norm of the matrix.
    Schatten,
    /// Entrywise ℓp norm.
    Lp,
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NormKind::Schatten => "schatten",
            NormKind::Lp => "lp",
        })
    }
}

impl FromStr for NormKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "schatten" => Ok(NormKind::Schatten),
            "lp" | "l2" | "entrywise" => Ok(NormKind::Lp),
            _ => Err(Error::Config(format!("unknown norm kind {s:?}"))),
        }
    }
}

/// Which of the two bounds applies at `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    /// `1 < p <= 4/3` (Schatten) or `1 < p < 2` (ℓp): rate `k^{1/p - 1}`, constant `C_p`.
    Power,
    /// `p = 2` or `p >= 4` (Schatten), `p >= 2` (ℓp): rate `k^{-1/2}`, constant `D_p`.
    Quadratic,
}

/// Classify `p`; errors outside the range where the bounds are proven.
pub fn regime(p: f64, kind: NormKind) -> Result<Regime> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(domain(format!("p = {p}: the norm is not uniformly smooth (need 1 < p < inf)")));
    }
    match kind {
        NormKind::Schatten if p <= 4.0 / 3.0 => Ok(Regime::Power),
        NormKind::Schatten if p == 2.0 || p >= 4.0 => Ok(Regime::Quadratic),
        NormKind::Schatten => Err(domain(format!(
            "p = {p}: Schatten mode accepts p in (1, 4/3], p = 2 or p >= 4"
        ))),
        NormKind::Lp if p < 2.0 => Ok(Regime::Power),
        NormKind::Lp => Ok(Regime::Quadratic),
    }
}

/// `C_p = (2e² / p^{1/p})^{p/(p-1)}`.
pub fn c_p(p: f64) -> f64 {
    let e2 = 2f64.exp();
    (2.0 * e2 / p.powf(1.0 / p)).powf(p / (p - 1.0))
}

/// `D_p = 2(p-1)e⁴`.
pub fn d_p(p: f64) -> f64 {
    2.0 * (p - 1.0) * 4f64.exp()
}

/// The constant of the budget that applies at `p`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundConstants {
    pub p: f64,
    pub c_p: Option<f64>,
    pub d_p: Option<f64>,
}

impl BoundConstants {
    pub fn new(p: f64, kind: NormKind) -> Result<Self> {
        Ok(match regime(p, kind)? {
            Regime::Power => BoundConstants { p, c_p: Some(c_p(p)), d_p: None },
            Regime::Quadratic => BoundConstants { p, c_p: None, d_p: Some(d_p(p)) },
        })
    }
}

/// Envelope `‖A - A_k‖ <= …` after `k` steps.
pub fn error_bound(k: u64, diam: f64, p: f64, kind: NormKind) -> Result<f64> {
    if k == 0 {
        return Err(domain("error bound needs k >= 1"));
    }
    if !(diam >= 0.0 && diam.is_finite()) {
        return Err(domain(format!("invalid diameter {diam}")));
    }
    let e2 = 2f64.exp();
    let k = k as f64;
    Ok(match regime(p, kind)? {
        Regime::Power => 2.0 * e2 / p.powf(1.0 / p) * k.powf(1.0 / p - 1.0) * diam,
        Regime::Quadratic => e2 * (2.0 * (p - 1.0) / k).sqrt() * diam,
    })
}

pub(crate) fn ceil_to_u64(x: f64, what: &str) -> Result<u64> {
    if !x.is_finite() || x < 0.0 || x.ceil() >= u64::MAX as f64 {
        return Err(Error::Overflow(format!("{what} = {x} does not fit in u64")));
    }
    Ok((x.ceil() as u64).max(1))
}

/// Pre-ceiling budget: `C_p (diam/ε)^{p/(p-1)}` or `D_p (diam/ε)²`.
pub fn required_k_real(epsilon: f64, diam: f64, p: f64, kind: NormKind) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(domain(format!("epsilon must be positive, got {epsilon}")));
    }
    if !(diam > 0.0 && diam.is_finite()) {
        return Err(domain(format!("diameter must be positive, got {diam}")));
    }
    let ratio = diam / epsilon;
    Ok(match regime(p, kind)? {
        Regime::Power => c_p(p) * ratio.powf(p / (p - 1.0)),
        Regime::Quadratic => d_p(p) * ratio * ratio,
    })
}

/// Number of steps after which `error_bound <= ε`.
pub fn required_k(epsilon: f64, diam: f64, p: f64, kind: NormKind) -> Result<u64> {
    ceil_to_u64(required_k_real(epsilon, diam, p, kind)?, "required k")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frozen_values() {
        assert_eq!(required_k(1.0, 2.0, 2.0, NormKind::Lp).unwrap(), 437);
        assert_eq!(required_k(1.0, 2.0, 2.0, NormKind::Schatten).unwrap(), 437);
        assert_eq!(required_k(1.0, 2.0, 4.0 / 3.0, NormKind::Schatten).unwrap(), 321_944);
        assert!((c_p(4.0 / 3.0) - 20121.466412531666).abs() < 1e-8);
        assert!((d_p(2.0) - 109.19630006628848).abs() < 1e-11);
        let b = error_bound(100, 2.0, 2.0, NormKind::Lp).unwrap();
        assert!((b - 2.089_940_669_648_672).abs() < 1e-14);
        let b1 = error_bound(1, 2.0, 2.0, NormKind::Lp).unwrap();
        assert!((b1 - 20.899406696486719).abs() < 1e-13);
    }

    #[test]
    fn scaling() {
        let a = required_k_real(0.5, 2.0, 2.0, NormKind::Lp).unwrap();
        let b = required_k_real(1.0, 2.0, 2.0, NormKind::Lp).unwrap();
        assert!((a / b - 4.0).abs() < 1e-12);
        for k in [1, 3, 10, 250] {
            let r = error_bound(4 * k, 1.5, 2.0, NormKind::Schatten).unwrap() / error_bound(k, 1.5, 2.0, NormKind::Schatten).unwrap();
            assert!((r - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn ranges() {
        assert!(regime(1.0, NormKind::Lp).is_err());
        assert!(regime(1.0, NormKind::Schatten).is_err());
        assert!(regime(1.5, NormKind::Schatten).is_err());
        assert!(regime(3.0, NormKind::Schatten).is_err());
        assert_eq!(regime(4.0 / 3.0, NormKind::Schatten).unwrap(), Regime::Power);
        assert_eq!(regime(2.0, NormKind::Schatten).unwrap(), Regime::Quadratic);
        assert_eq!(regime(4.0, NormKind::Schatten).unwrap(), Regime::Quadratic);
        assert_eq!(regime(1.5, NormKind::Lp).unwrap(), Regime::Power);
        assert_eq!(regime(3.0, NormKind::Lp).unwrap(), Regime::Quadratic);
        assert!(regime(f64::INFINITY, NormKind::Lp).is_err());
        assert!(required_k(0.0, 1.0, 2.0, NormKind::Lp).is_err());
    }

    #[test]
    fn both_constants_agree_at_two() {
        // the power-law form evaluated at p = 2 coincides with the quadratic one
        let e2 = 2f64.exp();
        let power = 2.0 * e2 / 2f64.sqrt() * (100f64).powf(-0.5) * 2.0;
        assert!((power - error_bound(100, 2.0, 2.0, NormKind::Lp).unwrap()).abs() < 1e-12);
        assert!((c_p(2.0) - d_p(2.0)).abs() < 1e-9);
    }
}
