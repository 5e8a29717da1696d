use num_complex::Complex64;

use crate::error::{domain, Error, Result};

use super::matrix::ComplexMatrix;
use super::norms::lp_norm;
use super::svd::svd;

/// The linear functional `Y ↦ 𝒟_Y‖·‖|_X = Re Σ conj(g_ij) y_ij` for a fixed base
/// point `X`, stored as its gradient matrix `G`.
///
/// Schatten-p: `G = U Λ^{p-1} V* / ‖X‖_p^{p-1}` from the thin SVD of `X`.
/// Entrywise ℓp: `g_ij = x_ij |x_ij|^{p-2} / ‖X‖_{ℓp}^{p-1}`, with `g_ij = 0` where `x_ij = 0`.
///
/// Taking the real part is exact for Hermitian base points and directions,
/// which is how the solver uses it.
#[derive(Clone, Debug)]
pub struct DerivativeFunctional {
    gradient: ComplexMatrix,
    /// Norm of the base point in the norm being differentiated.
    base_norm: f64,
}

fn check_p(p: f64) -> Result<()> {
    if p > 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("norm derivative needs 1 < p < inf, got p = {p}")))
    }
}

impl DerivativeFunctional {
    pub fn schatten(x: &ComplexMatrix, p: f64) -> Result<Self> {
        check_p(p)?;
        if x.is_diagonal() {
            return Self::schatten_diagonal(x, p);
        }
        let s = match svd(x) {
            Ok(s) => s,
            Err(Error::ZeroMatrix) => return Err(Error::NonDifferentiableAtZero),
            Err(e) => return Err(e),
        };
        let lmax = s.singular_values[0];
        // ‖X‖_p computed from the same decomposition, scaled by λ_max
        let scaled: f64 = s.singular_values.iter().map(|l| (l / lmax).powf(p)).sum();
        let norm = lmax * scaled.powf(1.0 / p);
        let mut us = s.u.clone();
        for j in 0..s.rank {
            let w = (s.singular_values[j] / norm).powf(p - 1.0);
            for i in 0..us.rows() {
                let z = us.get(i, j) * w;
                us.set(i, j, z);
            }
        }
        Ok(DerivativeFunctional { gradient: &us * &s.v.adjoint(), base_norm: norm })
    }

    fn schatten_diagonal(x: &ComplexMatrix, p: f64) -> Result<Self> {
        let diag = x.diagonal_entries();
        let lmax = diag.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if lmax == 0.0 {
            return Err(Error::NonDifferentiableAtZero);
        }
        let scaled: f64 = diag.iter().map(|z| (z.norm() / lmax).powf(p)).sum();
        let norm = lmax * scaled.powf(1.0 / p);
        let mut gradient = ComplexMatrix::zeros(x.rows(), x.cols());
        for (i, z) in diag.iter().enumerate() {
            let a = z.norm();
            if a > super::SVD_RELATIVE_CUTOFF * lmax {
                gradient.set(i, i, (z / a) * (a / norm).powf(p - 1.0));
            }
        }
        Ok(DerivativeFunctional { gradient, base_norm: norm })
    }

    pub fn lp(x: &ComplexMatrix, p: f64) -> Result<Self> {
        check_p(p)?;
        let norm = lp_norm(x, p)?;
        if norm == 0.0 {
            return Err(Error::NonDifferentiableAtZero);
        }
        let gradient = ComplexMatrix::from_inner(x.inner().map(|z| {
            let a = z.norm();
            if a == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                // x |x|^{p-2} / ‖x‖^{p-1} = (x/‖x‖) (|x|/‖x‖)^{p-2}
                (z / norm) * (a / norm).powf(p - 2.0)
            }
        }));
        Ok(DerivativeFunctional { gradient, base_norm: norm })
    }

    pub fn gradient(&self) -> &ComplexMatrix {
        &self.gradient
    }

    pub fn base_norm(&self) -> f64 {
        self.base_norm
    }

    pub fn apply(&self, y: &ComplexMatrix) -> f64 {
        assert_eq!(y.shape(), self.gradient.shape(), "direction shape mismatch");
        self.gradient.real_inner(y)
    }

    /// Apply to a direction given by its nonzero entries `(row, col, value)`.
    pub fn apply_sparse(&self, entries: &[(usize, usize, Complex64)]) -> f64 {
        entries
            .iter()
            .map(|&(i, j, y)| {
                let g = self.gradient.get(i, j);
                g.re * y.re + g.im * y.im
            })
            .sum()
    }
}

/// `𝒟_Y‖·‖_p|_X = ‖X‖_p^{1-p} Σ_i λ_i^{p-1} Re(u_i* Y v_i)`.
pub fn schatten_directional_derivative(x: &ComplexMatrix, y: &ComplexMatrix, p: f64) -> Result<f64> {
    check_shapes(x, y)?;
    Ok(DerivativeFunctional::schatten(x, p)?.apply(y))
}

/// `𝒟_Y‖·‖_{ℓp}|_X = ‖X‖_{ℓp}^{1-p} Σ Re(conj(x_ij) y_ij) |x_ij|^{p-2}`.
pub fn lp_directional_derivative(x: &ComplexMatrix, y: &ComplexMatrix, p: f64) -> Result<f64> {
    check_shapes(x, y)?;
    Ok(DerivativeFunctional::lp(x, p)?.apply(y))
}

fn check_shapes(x: &ComplexMatrix, y: &ComplexMatrix) -> Result<()> {
    if x.shape() != y.shape() {
        return Err(Error::Shape {
            expected: format!("{:?}", x.shape()),
            got: format!("{:?}", y.shape()),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::tensor::{random_hermitian, schatten_norm};

    fn fd_schatten(x: &ComplexMatrix, y: &ComplexMatrix, p: f64, t: f64) -> f64 {
        let plus = schatten_norm(&(x + &y.scale(t)), p).unwrap();
        let minus = schatten_norm(&(x - &y.scale(t)), p).unwrap();
        (plus - minus) / (2.0 * t)
    }

    #[test]
    fn derivative_along_base_point_is_the_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for &p in &[1.2, 4.0 / 3.0, 2.0, 4.0, 7.0] {
            let x = random_hermitian(4, &mut rng);
            let n = schatten_norm(&x, p).unwrap();
            let d = schatten_directional_derivative(&x, &x, p).unwrap();
            assert!((d - n).abs() <= 1e-10 * n, "p={p}: {d} vs {n}");
            let l = lp_norm(&x, p).unwrap();
            let dl = lp_directional_derivative(&x, &x, p).unwrap();
            assert!((dl - l).abs() <= 1e-10 * l);
        }
    }

    #[test]
    fn schatten_fixed_examples() {
        let x = ComplexMatrix::diagonal(&[2.0, 0.0]);
        let y = ComplexMatrix::diagonal(&[0.0, 1.0]);
        let d = schatten_directional_derivative(&x, &y, 2.0).unwrap();
        assert_eq!(d, 0.0);
        assert!((fd_schatten(&x, &y, 2.0, 1e-6) - d).abs() < 1e-5);
        let d2 = schatten_directional_derivative(&ComplexMatrix::identity(2), &ComplexMatrix::diagonal(&[1.0, -1.0]), 2.0).unwrap();
        assert!(d2.abs() < 1e-15);
    }

    #[test]
    fn lp_fixed_examples() {
        let x = ComplexMatrix::from_real_row_major(2, 2, &[1., 0., 0., 0.]).unwrap();
        let y = ComplexMatrix::from_real_row_major(2, 2, &[0., 1., 0., 0.]).unwrap();
        assert_eq!(lp_directional_derivative(&x, &y, 2.0).unwrap(), 0.0);
        let ones = ComplexMatrix::from_real_row_major(2, 2, &[1., 1., 1., 1.]).unwrap();
        let e11 = ComplexMatrix::from_real_row_major(2, 2, &[1., 0., 0., 0.]).unwrap();
        let d = lp_directional_derivative(&ones, &e11, 2.0).unwrap();
        assert!((d - 0.5).abs() < 1e-15);
        let fd = (lp_norm(&(&ones + &e11.scale(1e-6)), 2.0).unwrap() - lp_norm(&(&ones - &e11.scale(1e-6)), 2.0).unwrap()) / 2e-6;
        assert!((fd - 0.5).abs() < 1e-8);
    }

    #[test]
    fn zero_and_range_errors() {
        let z = ComplexMatrix::zeros(2, 2);
        let y = ComplexMatrix::identity(2);
        assert!(matches!(schatten_directional_derivative(&z, &y, 2.0), Err(Error::NonDifferentiableAtZero)));
        assert!(matches!(lp_directional_derivative(&z, &y, 2.0), Err(Error::NonDifferentiableAtZero)));
        assert!(schatten_directional_derivative(&y, &y, 1.0).is_err());
        assert!(schatten_directional_derivative(&y, &ComplexMatrix::identity(3), 2.0).is_err());
    }

    #[test]
    fn diagonal_path_matches_unitary_conjugate() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for &p in &[1.2, 4.0 / 3.0, 2.0, 4.0, 7.0] {
            let x = ComplexMatrix::diagonal(&[0.7, -0.2, 0.0, 1.5]);
            let y = random_hermitian(4, &mut rng);
            let u = svd(&crate::tensor::random_complex_matrix(4, 4, &mut rng)).unwrap().u;
            let conj = |m: &ComplexMatrix| &(&u * m) * &u.adjoint();
            let a = schatten_directional_derivative(&x, &y, p).unwrap();
            let b = schatten_directional_derivative(&conj(&x), &conj(&y), p).unwrap();
            assert!((a - b).abs() <= 1e-10 * (1.0 + a.abs()), "p={p}: {a} vs {b}");
        }
    }
}
