use std::f64::consts::PI;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::caratheodory::AtomOracle;
use crate::error::{domain, Error, Result};
use crate::tensor::{ComplexMatrix, NnTensor};

fn normalized(n: usize, d: usize, entries: Vec<f64>) -> Result<NnTensor> {
    let t = NnTensor::new(n, d, entries)?;
    let s = t.sum();
    if !(s > 0.0 && s.is_finite()) {
        return Err(domain("instance has no mass to normalize"));
    }
    Ok(t.scale(1.0 / s))
}

/// Entries uniform on `[0,1]`, then ℓ1-normalized. `d^{n+1}` entries.
pub fn build_random_instance(n: usize, d: usize, seed: u64) -> Result<NnTensor> {
    if d == 0 {
        return Err(domain("d must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len = NnTensor::zeros(n, d)?.len();
    let mut entries: Vec<f64> = (0..len).map(|_| rng.random_range(0.0..=1.0)).collect();
    if entries.iter().all(|&x| x == 0.0) {
        entries[0] = 1.0;
    }
    normalized(n, d, entries)
}

/// `a bᵀ` with `a, b` uniform on `[0,1]^d`, ℓ1-normalized.
pub fn build_rank1_instance(d: usize, seed: u64) -> Result<NnTensor> {
    if d == 0 {
        return Err(domain("d must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a: Vec<f64> = (0..d).map(|_| rng.random_range(0.0..=1.0)).collect();
    let b: Vec<f64> = (0..d).map(|_| rng.random_range(0.0..=1.0)).collect();
    let entries = a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect();
    normalized(1, d, entries)
}

/// `M_d = ((i - j)²)` before normalization.
pub fn euclid_matrix(d: usize) -> Result<NnTensor> {
    if d < 2 {
        return Err(domain(format!("Euclidean distance instance needs d >= 2, got {d}")));
    }
    let entries = (0..d * d).map(|f| ((f / d) as f64 - (f % d) as f64).powi(2)).collect();
    NnTensor::new(1, d, entries)
}

/// `U_d = M_d / ‖M_d‖_{ℓ1}`.
pub fn build_euclid_instance(d: usize) -> Result<NnTensor> {
    let m = euclid_matrix(d)?;
    normalized(1, d, m.entries().to_vec())
}

/// Slack matrix of the regular d-gon with vertices `(cos 2πj/d, sin 2πj/d)`.
/// Row `i` is the facet through vertices `i` and `i+1`, with outward normal
/// at angle `2π(i + 1/2)/d` and offset `cos(π/d)`.
pub fn slack_matrix(d: usize) -> Result<NnTensor> {
    if d < 3 {
        return Err(domain(format!("slack instance needs d >= 3, got {d}")));
    }
    let b = (PI / d as f64).cos();
    let entries = (0..d * d)
        .map(|f| {
            let (i, j) = (f / d, f % d);
            let angle = 2.0 * PI * (j as f64 - i as f64 - 0.5) / d as f64;
            let s = b - angle.cos();
            if s.abs() < 1e-14 {
                0.0
            } else {
                s
            }
        })
        .collect();
    NnTensor::new(1, d, entries)
}

/// `V_d = S_d / ‖S_d‖_{ℓ1}`.
pub fn build_slack_instance(d: usize) -> Result<NnTensor> {
    let s = slack_matrix(d)?;
    normalized(1, d, s.entries().to_vec())
}

/// A random mixture of `count` product states on `n + 1` sites of dimension
/// `d`, together with the oracle of those states (Schatten-p normalized).
pub fn build_separable_instance(n: usize, d: usize, p: f64, count: usize, seed: u64) -> Result<(ComplexMatrix, AtomOracle)> {
    let oracle = AtomOracle::product_psd_atoms(&vec![d; n + 1], p, count, seed, false)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(0x9e37_79b9));
    let w: Vec<f64> = (0..count).map(|_| rng.random_range(0.0..1.0)).collect();
    let total: f64 = w.iter().sum();
    let (r, c) = oracle.shape();
    let mut target = ComplexMatrix::zeros(r, c);
    for (a, wi) in oracle.atoms().iter().zip(&w) {
        target.add_scaled(a.value(), wi / total);
    }
    Ok((target, oracle))
}

/// Whitespace-separated nonnegative reals, one matrix row per line, forming
/// a `d × d^n` matrix; `#` starts a comment. The result is ℓ1-normalized.
pub fn load_custom_instance(path: &Path, n: usize, d: usize) -> Result<NnTensor> {
    let text = std::fs::read_to_string(path)?;
    parse_custom_instance(&text, n, d)
}

pub fn parse_custom_instance(text: &str, n: usize, d: usize) -> Result<NnTensor> {
    let mut entries = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        for tok in line.split_whitespace() {
            let x: f64 = tok
                .parse()
                .map_err(|_| Error::Parse { line: lineno + 1, msg: format!("not a number: {tok:?}") })?;
            if !(x >= 0.0 && x.is_finite()) {
                return Err(Error::Parse { line: lineno + 1, msg: format!("entries must be nonnegative, got {x}") });
            }
            entries.push(x);
        }
    }
    normalized(n, d, entries)
}
