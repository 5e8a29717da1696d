use crate::caratheodory::{approx_caratheodory, AtomOracle, Method, NormKind, RunTrace, SolverConfig, StopRule};
use crate::decomp::{scaled_combination_decomposition, ConvexCombination, OmegaGDecomposition};
use crate::error::{Error, Result};
use crate::tensor::{schatten_norm, ComplexMatrix};
use crate::wsc::Wsc;

use super::budget::{budget_puri, puri_delta, RankBudget};
use super::diagonal_psd_entries;

/// Result of approximating `ρ` through its square root.
#[derive(Clone, Debug)]
pub struct SqrtPipelineOutput {
    /// `ρ' = M'²`.
    pub rho_prime: ComplexMatrix,
    /// `M' = μ · A_k`.
    pub m_prime: ComplexMatrix,
    /// `A_k`, a uniform combination of oracle atoms.
    pub witness: ConvexCombination,
    /// `μ = √‖ρ‖_{1/2} = tr √ρ`.
    pub mu: f64,
    pub delta: f64,
    /// `‖ρ − ρ'‖_p`.
    pub achieved_error: f64,
    /// `‖M − M'‖_p`.
    pub sqrt_error: f64,
    /// `‖M − M'‖_p (2‖M‖_p + ‖M − M'‖_p)`.
    pub chain_bound: f64,
    pub budget: RankBudget,
    pub trace: RunTrace,
}

impl SqrtPipelineOutput {
    /// Number of distinct atoms in the witness; bounds the purification rank.
    pub fn witness_rank(&self) -> usize {
        self.witness.distinct().len()
    }

    pub fn steps(&self) -> u64 {
        self.trace.steps()
    }

    /// Decomposition of `M'` over a connected complex, trivial group.
    pub fn witness_decomposition(&self, w: &Wsc) -> Result<OmegaGDecomposition> {
        scaled_combination_decomposition(&self.witness, w, self.mu)
    }
}

/// Approximate a diagonal psd `ρ` in Schatten-p by `ρ' = M'²`, where `M'`
/// approximates `M = √ρ` to within `μδ`, `δ = √(1 + ε/μ²) − 1`.
///
/// The oracle must contain the matrix units of the diagonal (for example
/// [`AtomOracle::diagonal_basis_atoms`]) so that `√ρ / μ` is in its hull.
pub fn approx_sqrt_pipeline(
    rho: &ComplexMatrix,
    epsilon: f64,
    p: f64,
    oracle: &AtomOracle,
    method: Method,
    group_order: u64,
) -> Result<SqrtPipelineOutput> {
    let diag = diagonal_psd_entries(rho)?;
    if rho.shape() != oracle.shape() {
        return Err(Error::Shape { expected: format!("{:?}", oracle.shape()), got: format!("{:?}", rho.shape()) });
    }
    let roots: Vec<f64> = diag.iter().map(|x| x.sqrt()).collect();
    let mu: f64 = roots.iter().sum();
    if mu == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    let budget = budget_puri(epsilon, p, mu, group_order)?;
    let delta = puri_delta(epsilon, mu);
    let m = ComplexMatrix::diagonal(&roots);
    let target = m.scale(1.0 / mu);
    let cfg = SolverConfig { p, norm: NormKind::Schatten, method, stop: StopRule::epsilon(delta), seed: 0 };
    let out = approx_caratheodory(&target, oracle, &cfg)?;

    let m_prime = out.iterate.scale(mu);
    let rho_prime = &m_prime * &m_prime;
    let achieved_error = schatten_norm(&(rho - &rho_prime), p)?;
    let sqrt_error = schatten_norm(&(&m - &m_prime), p)?;
    let chain_bound = sqrt_error * (2.0 * schatten_norm(&m, p)? + sqrt_error);
    let slack = 1e-12 * epsilon.max(1.0);
    if achieved_error > chain_bound + slack || chain_bound > epsilon + slack {
        return Err(Error::InvalidCertificate(format!(
            "square-root chain failed: ‖ρ−ρ'‖ = {achieved_error:e}, bound = {chain_bound:e}, ε = {epsilon:e}"
        )));
    }
    Ok(SqrtPipelineOutput {
        rho_prime,
        m_prime,
        witness: out.combination,
        mu,
        delta,
        achieved_error,
        sqrt_error,
        chain_bound,
        budget,
        trace: out.trace,
    })
}
