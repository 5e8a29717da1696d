use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{domain, Error, Result};
use crate::par;

use super::matrix::ComplexMatrix;
use super::norms::schatten_norm;

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn random_complex_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

/// Random Hermitian matrix `(G + G*)/2`.
pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let g = random_complex_matrix(n, n, rng);
    (&g + &g.adjoint()).scale(0.5)
}

/// Monte-Carlo lower estimate of the modulus of smoothness `ρ_p(t)` of
/// `dim × dim` complex matrices under the Schatten p-norm: the maximum of
/// `½(‖X+tY‖_p + ‖X−tY‖_p) − 1` over `samples` random unit-norm pairs.
pub fn estimate_modulus_of_smoothness(p: f64, t: f64, samples: usize, seed: u64, dim: usize) -> Result<f64> {
    if samples == 0 {
        return Err(domain("modulus of smoothness needs at least one sample"));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(domain(format!("t must be finite and nonnegative, got {t}")));
    }
    if dim == 0 {
        return Err(domain("dimension must be positive"));
    }
    schatten_norm(&ComplexMatrix::identity(1), p)?;
    let values = par::map_indexed(samples, |s| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(s as u64);
        let x = random_complex_matrix(dim, dim, &mut rng);
        let y = random_complex_matrix(dim, dim, &mut rng);
        let x = x.scale(1.0 / schatten_norm(&x, p).expect("p validated"));
        let y = y.scale(1.0 / schatten_norm(&y, p).expect("p validated"));
        let plus = schatten_norm(&(&x + &y.scale(t)), p).expect("p validated");
        let minus = schatten_norm(&(&x - &y.scale(t)), p).expect("p validated");
        0.5 * (plus + minus) - 1.0
    });
    Ok(values.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

/// Closed-form upper bound on `ρ_p(t)` for Schatten classes: `t^p/p` for
/// `1 <= p <= 4/3`, `(p−1)t²/2` for `p = 2` or `p >= 4`.
pub fn smoothness_bound(p: f64, t: f64) -> Result<f64> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(domain(format!("t must be finite and nonnegative, got {t}")));
    }
    if (1.0..=4.0 / 3.0).contains(&p) {
        Ok(t.powf(p) / p)
    } else if p == 2.0 || (p >= 4.0 && p.is_finite()) {
        Ok(0.5 * (p - 1.0) * t * t)
    } else {
        Err(domain(format!("no closed-form smoothness bound for p = {p}")))
    }
}

/// Signed residual `LHS − RHS` of
/// `(‖A‖+‖B‖)^p + |‖A‖−‖B‖|^p ≥ ‖A+B‖^p + ‖A−B‖^p` in the Schatten p-norm.
///
/// Nonnegative for `p ≥ 4`, nonpositive for `1 ≤ p ≤ 4/3`, zero for `p = 2`.
pub fn check_hanner(a: &ComplexMatrix, b: &ComplexMatrix, p: f64) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::Shape {
            expected: format!("{:?}", a.shape()),
            got: format!("{:?}", b.shape()),
        });
    }
    let na = schatten_norm(a, p)?;
    let nb = schatten_norm(b, p)?;
    let lhs = (na + nb).powf(p) + (na - nb).abs().powf(p);
    let rhs = schatten_norm(&(a + b), p)?.powf(p) + schatten_norm(&(a - b), p)?.powf(p);
    Ok(lhs - rhs)
}
