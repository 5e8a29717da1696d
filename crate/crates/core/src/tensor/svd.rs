use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

use super::matrix::ComplexMatrix;

/// Singular values at or below `SVD_RELATIVE_CUTOFF * λ_1` are dropped.
pub const SVD_RELATIVE_CUTOFF: f64 = 1e-12;

/// Thin SVD `M = U · diag(λ) · V*` restricted to the positive singular values.
#[derive(Clone, Debug)]
pub struct SvdResult {
    /// `rows × r` isometry.
    pub u: ComplexMatrix,
    /// `λ_1 >= … >= λ_r > 0`.
    pub singular_values: Vec<f64>,
    /// `cols × r` isometry.
    pub v: ComplexMatrix,
    pub rank: usize,
}

impl SvdResult {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let r = self.rank;
        let mut us = self.u.clone();
        for j in 0..r {
            for i in 0..us.rows() {
                let z = us.get(i, j) * self.singular_values[j];
                us.set(i, j, z);
            }
        }
        &us * &self.v.adjoint()
    }
}

/// Thin SVD of a nonzero matrix.
///
/// Diagonal inputs (off-diagonal entries exactly zero) are decomposed
/// directly: `u_i = phase(m_ii) e_i`, `v_i = e_i`.
pub fn svd(m: &ComplexMatrix) -> Result<SvdResult> {
    if m.is_zero() {
        return Err(Error::ZeroMatrix);
    }
    if m.is_diagonal() {
        return Ok(diagonal_svd(m));
    }
    let rows = m.rows();
    let cols = m.cols();
    let a = faer::Mat::<Complex64>::from_fn(rows, cols, |i, j| m.get(i, j));
    let dec = a.thin_svd().map_err(|e| Error::Domain(format!("svd did not converge: {e:?}")))?;
    let (u_full, s_full, v_full) = (dec.U(), dec.S().column_vector(), dec.V());
    let sv: Vec<f64> = (0..s_full.nrows()).map(|i| s_full[i].re).collect();
    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&a, &b| sv[b].total_cmp(&sv[a]));
    let lmax = sv[order[0]];
    let kept: Vec<usize> = order.into_iter().filter(|&i| sv[i] > SVD_RELATIVE_CUTOFF * lmax).collect();
    let r = kept.len();
    let u = DMatrix::from_fn(rows, r, |i, j| u_full[(i, kept[j])]);
    let v = DMatrix::from_fn(cols, r, |i, j| v_full[(i, kept[j])]);
    Ok(SvdResult {
        u: ComplexMatrix::from_inner(u),
        singular_values: kept.iter().map(|&i| sv[i]).collect(),
        v: ComplexMatrix::from_inner(v),
        rank: r,
    })
}

fn diagonal_svd(m: &ComplexMatrix) -> SvdResult {
    let diag = m.diagonal_entries();
    let mut order: Vec<usize> = (0..diag.len()).collect();
    order.sort_by(|&a, &b| diag[b].norm().total_cmp(&diag[a].norm()));
    let lmax = diag[order[0]].norm();
    let kept: Vec<usize> = order.into_iter().filter(|&i| diag[i].norm() > SVD_RELATIVE_CUTOFF * lmax).collect();
    let r = kept.len();
    let zero = Complex64::new(0.0, 0.0);
    let u = ComplexMatrix::from_fn(m.rows(), r, |i, j| {
        if i == kept[j] {
            diag[i] / diag[i].norm()
        } else {
            zero
        }
    });
    let v = ComplexMatrix::from_fn(m.cols(), r, |i, j| if i == kept[j] { Complex64::new(1.0, 0.0) } else { zero });
    SvdResult {
        u,
        singular_values: kept.iter().map(|&i| diag[i].norm()).collect(),
        v,
        rank: r,
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::tensor::{random_complex_matrix, random_hermitian};

    fn isometry_residual(u: &ComplexMatrix) -> f64 {
        let g = &u.adjoint() * u;
        g.max_abs_diff(&ComplexMatrix::identity(g.rows()))
    }

    fn check(m: &ComplexMatrix) {
        let s = svd(m).unwrap();
        assert!(isometry_residual(&s.u) <= 1e-10);
        assert!(isometry_residual(&s.v) <= 1e-10);
        assert!(s.reconstruct().max_abs_diff(m) <= 1e-10 * m.max_abs().max(1.0));
        assert!(s.singular_values.windows(2).all(|w| w[0] >= w[1]));
        assert!(s.singular_values.iter().all(|&l| l > 0.0));
    }

    #[test]
    fn diag_with_zero() {
        let s = svd(&ComplexMatrix::diagonal(&[2.0, 0.0])).unwrap();
        assert_eq!(s.rank, 1);
        assert_eq!(s.singular_values, vec![2.0]);
        assert_eq!(s.u.get(0, 0).re, 1.0);
        assert_eq!(s.u.get(1, 0).re, 0.0);
        assert_eq!(s.v.get(0, 0).re, 1.0);
    }

    #[test]
    fn zero_matrix_is_an_error() {
        assert!(matches!(svd(&ComplexMatrix::zeros(2, 3)), Err(Error::ZeroMatrix)));
    }

    #[test]
    fn rectangular_isometries() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = random_complex_matrix(5, 3, &mut rng);
        let s = svd(&m).unwrap();
        assert_eq!(s.u.shape(), (5, 3));
        assert_eq!(s.v.shape(), (3, 3));
        check(&m);
    }

    #[test]
    fn hermitian_u_equals_v_up_to_phases() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let h = random_hermitian(4, &mut rng);
        let s = svd(&h).unwrap();
        check(&h);
        for j in 0..s.rank {
            // |<u_j, v_j>| = 1 for a Hermitian matrix with simple spectrum
            let ip: Complex64 = (0..4).map(|i| s.u.get(i, j).conj() * s.v.get(i, j)).sum();
            assert!((ip.norm() - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn complex_diagonal_phases() {
        let i = Complex64::new(0.0, 1.0);
        let m = ComplexMatrix::from_row_major(2, 2, vec![i * 3.0, 0.0.into(), 0.0.into(), (-1.0).into()]).unwrap();
        check(&m);
    }

    #[test]
    fn residuals_on_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        use rand::Rng;
        for _ in 0..200 {
            let r = rng.random_range(1..=32);
            let c = rng.random_range(1..=32);
            check(&random_complex_matrix(r, c, &mut rng));
        }
    }

    proptest! {
        #[test]
        fn low_rank_products_have_truncated_rank(seed in 0u64..1000, r in 1usize..4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_complex_matrix(6, r, &mut rng);
            let b = random_complex_matrix(r, 5, &mut rng);
            let m = &a * &b;
            let s = svd(&m).unwrap();
            prop_assert_eq!(s.rank, r);
            prop_assert!(s.reconstruct().max_abs_diff(&m) <= 1e-10 * m.max_abs().max(1.0));
        }
    }
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    if !m.is_square() {
        return Err(Error::Shape { expected: "square matrix".into(), got: format!("{}x{}", m.rows(), m.cols()) });
    }
    if m.is_diagonal() {
        let mut ev: Vec<f64> = m.diagonal_entries().iter().map(|z| z.re).collect();
        ev.sort_by(f64::total_cmp);
        return Ok(ev);
    }
    let a = faer::Mat::<Complex64>::from_fn(m.rows(), m.cols(), |i, j| (m.get(i, j) + m.get(j, i).conj()) * 0.5);
    let mut ev: Vec<f64> = a
        .self_adjoint_eigenvalues(faer::Side::Lower)
        .map_err(|e| Error::Domain(format!("eigenvalue iteration did not converge: {e:?}")))?;
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}
