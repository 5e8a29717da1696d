use crate::error::{domain, Result};

use super::matrix::{ComplexMatrix, NnTensor};

/// Singular values in nonincreasing order (all of them, including zeros).
///
/// Matrices whose off-diagonal entries are exactly zero take a direct path:
/// their singular values are the moduli of the diagonal.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = if m.is_diagonal() {
        m.diagonal_entries().iter().map(|z| z.norm()).collect()
    } else {
        m.inner().clone().singular_values().iter().copied().collect()
    };
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// `(Σ x_i^p)^{1/p}` for nonnegative `x`, scaled by the maximum for stability.
fn power_sum_root(values: impl Iterator<Item = f64> + Clone, p: f64) -> f64 {
    let max = values.clone().fold(0.0, f64::max);
    if max == 0.0 {
        return 0.0;
    }
    let s: f64 = values.map(|x| (x / max).powf(p)).sum();
    max * s.powf(1.0 / p)
}

/// Unnormalised Schatten p-norm `(Σ s_i(M)^p)^{1/p}` for `1 <= p < ∞`.
pub fn schatten_norm(m: &ComplexMatrix, p: f64) -> Result<f64> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(domain(format!("Schatten norm needs 1 <= p < inf, got p = {p}")));
    }
    if p == 2.0 {
        // Frobenius identity, no SVD needed.
        return Ok(power_sum_root(m.as_slice().iter().map(|z| z.norm()), 2.0));
    }
    Ok(power_sum_root(singular_values(m).into_iter(), p))
}

/// Schatten q-quasinorm `(Σ s_i^q)^{1/q}` for `0 < q < 1`.
pub fn schatten_quasinorm(m: &ComplexMatrix, q: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(domain(format!("Schatten quasinorm needs 0 < q < 1, got q = {q}")));
    }
    Ok(power_sum_root(singular_values(m).into_iter(), q))
}

/// Objects with entrywise absolute values.
pub trait Entrywise {
    fn abs_entries(&self) -> Vec<f64>;
}

impl Entrywise for ComplexMatrix {
    fn abs_entries(&self) -> Vec<f64> {
        self.as_slice().iter().map(|z| z.norm()).collect()
    }
}

impl Entrywise for NnTensor {
    fn abs_entries(&self) -> Vec<f64> {
        self.entries().iter().map(|x| x.abs()).collect()
    }
}

/// Entrywise p-(quasi)norm `(Σ |m|^p)^{1/p}` for `p > 0`.
pub fn lp_norm<T: Entrywise + ?Sized>(t: &T, p: f64) -> Result<f64> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(domain(format!("entrywise norm needs 0 < p < inf, got p = {p}")));
    }
    let abs = t.abs_entries();
    Ok(power_sum_root(abs.iter().copied(), p))
}

#[cfg(test)]
mod tests {
    use nalgebra::SymmetricEigen;
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::tensor::random_complex_matrix;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
    }

    #[test]
    fn identity_and_pythagorean() {
        assert!(close(schatten_norm(&ComplexMatrix::identity(3), 2.0).unwrap(), 3f64.sqrt(), 1e-15));
        assert!(close(schatten_norm(&ComplexMatrix::diagonal(&[3.0, 4.0]), 2.0).unwrap(), 5.0, 1e-15));
        assert!(close(schatten_norm(&ComplexMatrix::diagonal(&[3.0, 4.0]), 3.0).unwrap(), 91f64.cbrt(), 1e-14));
    }

    #[test]
    fn zero_iff_zero_matrix() {
        assert_eq!(schatten_norm(&ComplexMatrix::zeros(3, 2), 1.5).unwrap(), 0.0);
        let mut m = ComplexMatrix::zeros(3, 2);
        m.set(2, 1, Complex64::new(0.0, 1e-200));
        assert!(schatten_norm(&m, 1.5).unwrap() > 0.0);
    }

    #[test]
    fn schatten_matches_eigenvalue_oracle() {
        // independent route: eigenvalues of the Hermitian matrix M*M
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let m = random_complex_matrix(6, 6, &mut rng);
            let gram = m.adjoint().inner() * m.inner();
            let eig = SymmetricEigen::new(gram).eigenvalues;
            let oracle: f64 = eig.iter().map(|&l| l.max(0.0).powf(1.5)).sum::<f64>().powf(1.0 / 3.0);
            assert!(close(schatten_norm(&m, 3.0).unwrap(), oracle, 1e-9));
        }
    }

    #[test]
    fn quasinorm_values() {
        assert!(close(schatten_quasinorm(&ComplexMatrix::diagonal(&[1.0, 1.0]), 0.5).unwrap(), 4.0, 1e-14));
        assert!(close(schatten_quasinorm(&ComplexMatrix::diagonal(&[4.0]), 0.5).unwrap(), 4.0, 1e-14));
        assert!(close(schatten_quasinorm(&ComplexMatrix::diagonal(&[1.0, 4.0, 9.0]), 0.5).unwrap(), 36.0, 1e-14));
    }

    #[test]
    fn domain_errors() {
        let m = ComplexMatrix::identity(2);
        assert!(schatten_norm(&m, 0.5).is_err());
        assert!(schatten_norm(&m, f64::INFINITY).is_err());
        assert!(schatten_quasinorm(&m, 1.0).is_err());
        assert!(schatten_quasinorm(&m, 0.0).is_err());
        assert!(lp_norm(&m, 0.0).is_err());
    }

    #[test]
    fn lp_norm_values() {
        let m3 = ComplexMatrix::from_real_row_major(3, 3, &[0., 1., 4., 1., 0., 1., 4., 1., 0.]).unwrap();
        assert_eq!(lp_norm(&m3, 1.0).unwrap(), 12.0);
        assert_eq!(lp_norm(&NnTensor::zeros(2, 3).unwrap(), 0.7).unwrap(), 0.0);
        let e = NnTensor::basis(1, 2, &[0, 1]).unwrap();
        assert_eq!(lp_norm(&e, 2.0).unwrap(), 1.0);
        assert!(close(lp_norm(&ComplexMatrix::diagonal(&[1.0, 4.0]), 0.5).unwrap(), 9.0, 1e-14));
    }
}
