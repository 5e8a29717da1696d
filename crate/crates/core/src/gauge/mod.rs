//! Gauge functions of the signed product-psd body and approximate-rank budgets.
//!
//! `μ_p(M) = inf { t > 0 : M ∈ t·B_p }` where `B_p` is the convex hull of the
//! Schatten-p normalized product psd matrices and their negatives. Exact values
//! are only available for diagonal psd inputs; elsewhere a [`GaugeEstimate`]
//! carries a lower bound `‖M‖_p` and an upper bound from a certificate.
//!
//! The robustness of entanglement `R(ρ)` satisfies `R ≤ μ_1 ≤ 2R`; it is
//! documented here and not computed. For the maximally entangled state on
//! `C^d ⊗ C^d` this gives `μ_1 ≥ d`, so no dimension-free upper bound on `μ_1`
//! exists for general psd matrices.

mod budget;
mod sqrt;

use serde::{Deserialize, Serialize};

pub use budget::{budget_nn, budget_puri, budget_rank, budget_schatten1, budget_sep, BudgetInputs, BudgetKind, RankBudget};
pub use sqrt::{approx_sqrt_pipeline, SqrtPipelineOutput};

use crate::caratheodory::Atom;
use crate::decomp::ConvexCombination;
use crate::error::{domain, Error, Result};
use crate::tensor::{hermitian_eigenvalues, schatten_norm, schatten_quasinorm, ComplexMatrix};

/// Agreement required between a certificate and the matrix it certifies.
pub const CERTIFICATE_TOLERANCE: f64 = 1e-10;

/// Where a bound came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundMethod {
    /// `‖M‖_p ≤ μ_p(M)`.
    SchattenNorm,
    /// `√‖ρ‖_{p/2} ≤ μ_√,p(ρ)`.
    HalfPowerNorm,
    /// `μ_√,p(ρ) ≤ √‖ρ‖_{1/2}`, from the projector decomposition of `√ρ`.
    SqrtHalfQuasinorm,
    /// Trace of a diagonal psd matrix.
    Trace,
    /// Total weight of an explicit combination.
    Certificate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaugeEstimate {
    pub lower: f64,
    pub upper: f64,
    pub exact: Option<f64>,
    pub lower_method: BoundMethod,
    pub upper_method: BoundMethod,
}

impl GaugeEstimate {
    pub fn is_consistent(&self) -> bool {
        let ordered = self.lower <= self.upper + 1e-12;
        ordered && self.exact.is_none_or(|e| self.lower <= e + 1e-12 && e <= self.upper + 1e-12)
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Diagonal entries of a diagonal psd matrix, as reals.
pub(crate) fn diagonal_psd_entries(m: &ComplexMatrix) -> Result<Vec<f64>> {
    if !m.is_square() || !m.is_diagonal() {
        return Err(Error::Unsupported("exact gauge values need a square diagonal matrix".into()));
    }
    let entries = m.diagonal_entries();
    let scale = entries.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let mut out = Vec::with_capacity(entries.len());
    for (i, z) in entries.iter().enumerate() {
        if z.im.abs() > 1e-12 * scale {
            return Err(Error::NotPsd(format!("diagonal entry {i} has imaginary part {}", z.im)));
        }
        if z.re < 0.0 {
            return Err(Error::NotPsd(format!("diagonal entry {i} is {}", z.re)));
        }
        out.push(z.re);
    }
    Ok(out)
}

/// `μ_1(σ) = tr σ` for diagonal psd `σ`: the matrix units give the upper
/// bound and `‖σ‖_1 ≤ μ_1(σ)` the lower one.
pub fn mu1_diagonal_exact(sigma: &ComplexMatrix) -> Result<f64> {
    Ok(diagonal_psd_entries(sigma)?.iter().sum())
}

fn half_power_norm(rho: &ComplexMatrix, q: f64) -> Result<f64> {
    if q >= 1.0 {
        schatten_norm(rho, q)
    } else {
        schatten_quasinorm(rho, q)
    }
}

/// Two-sided bounds `√‖ρ‖_{p/2} ≤ μ_√,p(ρ) ≤ √‖ρ‖_{1/2}` for diagonal psd `ρ`.
/// `exact` is set when the bounds meet.
pub fn mu_sqrt_bounds_diagonal(rho: &ComplexMatrix, p: f64) -> Result<GaugeEstimate> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(domain(format!("need 1 <= p < inf, got p = {p}")));
    }
    diagonal_psd_entries(rho)?;
    let lower = half_power_norm(rho, p / 2.0)?.sqrt();
    let upper = schatten_quasinorm(rho, 0.5)?.sqrt();
    let exact = (upper - lower <= 1e-12 * upper.max(1.0)).then_some(upper);
    Ok(GaugeEstimate {
        lower,
        upper,
        exact,
        lower_method: BoundMethod::HalfPowerNorm,
        upper_method: BoundMethod::SqrtHalfQuasinorm,
    })
}

/// Check that `atom` lies in `±P_p`: a product of site factors that are each
/// psd or negative semidefinite, agreeing with its stored value, of Schatten-p norm 1.
pub fn certify_atom(atom: &Atom, p: f64) -> Result<()> {
    let bad = |msg: String| Error::InvalidCertificate(format!("atom {}: {msg}", atom.id()));
    let factors = atom.factors().ok_or_else(|| bad("no product structure".into()))?;
    let mut product = ComplexMatrix::identity(1);
    for (site, f) in factors.iter().enumerate() {
        let d = (f.len() as f64).sqrt().round() as usize;
        if d * d != f.len() || d == 0 {
            return Err(bad(format!("site {site} factor is not a square matrix")));
        }
        let m = ComplexMatrix::from_row_major(d, d, f.clone())?;
        let scale = m.max_abs().max(f64::MIN_POSITIVE);
        if !m.is_hermitian(1e-12 * scale) {
            return Err(bad(format!("site {site} factor is not Hermitian")));
        }
        let ev = hermitian_eigenvalues(&m)?;
        let (lo, hi) = (ev[0], ev[ev.len() - 1]);
        if lo < -1e-10 * scale && hi > 1e-10 * scale {
            return Err(bad(format!("site {site} factor is indefinite")));
        }
        product = product.kron(&m);
    }
    if product.shape() != atom.value().shape() || product.max_abs_diff(atom.value()) > CERTIFICATE_TOLERANCE {
        return Err(bad("value differs from the product of its factors".into()));
    }
    let norm = schatten_norm(atom.value(), p)?;
    if (norm - 1.0).abs() > CERTIFICATE_TOLERANCE {
        return Err(bad(format!("Schatten-{p} norm is {norm}, not 1")));
    }
    Ok(())
}

/// `μ_p(M) ≤ scale · Σ λ_i` from a representation `M = scale · Σ λ_i x_i`
/// with every `x_i ∈ ±P_p`.
pub fn mu_upper_via_combination(m: &ComplexMatrix, combination: &ConvexCombination, scale: f64, p: f64) -> Result<f64> {
    if !(scale >= 0.0 && scale.is_finite()) {
        return Err(domain(format!("certificate scale must be a nonnegative number, got {scale}")));
    }
    for a in combination.atoms() {
        certify_atom(a, p)?;
    }
    let value = combination.value()?.scale(scale);
    if value.shape() != m.shape() {
        return Err(Error::Shape { expected: format!("{:?}", m.shape()), got: format!("{:?}", value.shape()) });
    }
    let diff = value.max_abs_diff(m);
    if diff > CERTIFICATE_TOLERANCE {
        return Err(Error::InvalidCertificate(format!("combination misses the target by {diff:e}")));
    }
    Ok(scale * combination.total_weight())
}

/// `‖M‖_p ≤ μ_p(M) ≤ certificate`, exact for diagonal psd input at `p = 1`.
pub fn mu_estimate(m: &ComplexMatrix, p: f64, combination: &ConvexCombination, scale: f64) -> Result<GaugeEstimate> {
    let lower = schatten_norm(m, p)?;
    let upper = mu_upper_via_combination(m, combination, scale, p)?;
    let exact = if p == 1.0 && m.is_diagonal() { mu1_diagonal_exact(m).ok() } else { None };
    Ok(GaugeEstimate {
        lower,
        upper,
        exact,
        lower_method: BoundMethod::SchattenNorm,
        upper_method: BoundMethod::Certificate,
    })
}
