use std::sync::Arc;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{Atom, NormKind, OracleKind};
use crate::error::{Error, Result};
use crate::par;
use crate::tensor::{lp_norm, schatten_norm, ComplexMatrix, NnTensor};

/// Largest oracle for which the diameter is computed pairwise.
pub const EXACT_DIAMETER_LIMIT: usize = 2048;
/// Cap on `atoms × entries per atom` for the dense atom values.
pub const ORACLE_SIZE_CAP: u128 = 50_000_000;

/// A finite, ordered list of atoms. Method 1 scans it in order and Method 2
/// breaks ties by it.
#[derive(Clone, Debug)]
pub struct AtomOracle {
    kind: OracleKind,
    atoms: Vec<Arc<Atom>>,
    shape: (usize, usize),
    /// Norms in which any two distinct atoms are exactly `2^{1/p}` apart.
    unit_spread: Vec<NormKind>,
}

pub(crate) fn norm_of(m: &ComplexMatrix, p: f64, kind: NormKind) -> Result<f64> {
    match kind {
        NormKind::Schatten => schatten_norm(m, p),
        NormKind::Lp => lp_norm(m, p),
    }
}

fn unit(d: usize, k: usize) -> Vec<Complex64> {
    (0..d).map(|x| Complex64::new(if x == k { 1.0 } else { 0.0 }, 0.0)).collect()
}

fn check_size(count: u128, entries: u128) -> Result<()> {
    let total = count.saturating_mul(entries);
    if total > ORACLE_SIZE_CAP {
        return Err(Error::SizeCap { what: "oracle entries", required: total, cap: ORACLE_SIZE_CAP });
    }
    Ok(())
}

fn multi_index(mut flat: usize, d: usize, sites: usize) -> Vec<usize> {
    let mut idx = vec![0; sites];
    for k in (0..sites).rev() {
        idx[k] = flat % d;
        flat /= d;
    }
    idx
}

impl AtomOracle {
    /// Finite oracle over given values, in the given order.
    pub fn from_values(values: Vec<ComplexMatrix>) -> Result<Self> {
        let atoms = values.into_iter().enumerate().map(|(i, v)| Arc::new(Atom::new(i, v))).collect();
        AtomOracle::from_atoms(OracleKind::FiniteList, atoms)
    }

    pub fn from_atoms(kind: OracleKind, atoms: Vec<Arc<Atom>>) -> Result<Self> {
        let first = atoms.first().ok_or_else(|| Error::Domain("an oracle needs at least one atom".into()))?;
        let shape = first.value().shape();
        if let Some(a) = atoms.iter().find(|a| a.value().shape() != shape) {
            return Err(Error::Shape { expected: format!("{shape:?}"), got: format!("{:?} (atom {})", a.value().shape(), a.id()) });
        }
        Ok(AtomOracle { kind, atoms, shape, unit_spread: Vec::new() })
    }

    /// `S = {e_{i_0} ⊗ … ⊗ e_{i_n}}` in lexicographic order, as `d × d^n`
    /// matrices. Distinct atoms are at ℓp distance `2^{1/p}`.
    pub fn basis_atoms(n: usize, d: usize) -> Result<Self> {
        let proto = NnTensor::zeros(n, d)?;
        let count = proto.len();
        check_size(count as u128, count as u128)?;
        let atoms = (0..count)
            .map(|flat| {
                let idx = multi_index(flat, d, n + 1);
                let value = NnTensor::basis(n, d, &idx)?.to_matrix();
                Atom::product(flat, value, idx.iter().map(|&i| unit(d, i)).collect()).map(Arc::new)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut o = AtomOracle::from_atoms(OracleKind::FiniteList, atoms)?;
        o.unit_spread = vec![NormKind::Lp];
        Ok(o)
    }

    /// Basis atoms under the diagonal correspondence:
    /// `E_{i_0 i_0} ⊗ … ⊗ E_{i_n i_n}` as `d^{n+1} × d^{n+1}` diagonal matrices.
    /// Site factors are the `d × d` matrix units, flattened row-major.
    pub fn diagonal_basis_atoms(n: usize, d: usize) -> Result<Self> {
        let proto = NnTensor::zeros(n, d)?;
        let count = proto.len();
        check_size(count as u128, (count as u128) * (count as u128))?;
        let atoms = (0..count)
            .map(|flat| {
                let idx = multi_index(flat, d, n + 1);
                let mut diag = vec![0.0; count];
                diag[flat] = 1.0;
                let factors = idx.iter().map(|&i| unit(d * d, i * d + i)).collect();
                Atom::product(flat, ComplexMatrix::diagonal(&diag), factors).map(Arc::new)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut o = AtomOracle::from_atoms(OracleKind::FiniteList, atoms)?;
        // diagonal matrices: Schatten and ℓp distances coincide
        o.unit_spread = vec![NormKind::Lp, NormKind::Schatten];
        Ok(o)
    }

    /// `count` random product states `ψ_0ψ_0* ⊗ … ⊗ ψ_nψ_n*` on `⊗ C^{dims[k]}`,
    /// normalized to Schatten-p norm 1, followed by their negatives when
    /// `signed`. Deterministic in `seed`.
    pub fn product_psd_atoms(dims: &[usize], p: f64, count: usize, seed: u64, signed: bool) -> Result<Self> {
        if count == 0 || dims.is_empty() || dims.contains(&0) {
            return Err(Error::Domain("need count >= 1 and positive site dimensions".into()));
        }
        let size: usize = dims.iter().product();
        let total = if signed { 2 * count } else { count };
        check_size(total as u128, (size as u128) * (size as u128))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut atoms = Vec::with_capacity(total);
        for id in 0..count {
            let mut factors = Vec::with_capacity(dims.len());
            let mut value = ComplexMatrix::identity(1);
            for &d in dims {
                let mut psi: Vec<Complex64> = (0..d)
                    .map(|_| Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
                    .collect();
                let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                for z in &mut psi {
                    *z /= norm;
                }
                let rho = ComplexMatrix::from_fn(d, d, |i, j| psi[i] * psi[j].conj());
                value = value.kron(&rho);
                factors.push(rho.to_row_major());
            }
            let s = schatten_norm(&value, p)?;
            value.scale_mut(1.0 / s);
            for z in &mut factors[0] {
                *z /= s;
            }
            atoms.push(Arc::new(Atom::product(id, value, factors)?));
        }
        if signed {
            for id in 0..count {
                let neg = atoms[id].scaled(count + id, -1.0);
                atoms.push(Arc::new(neg));
            }
        }
        AtomOracle::from_atoms(OracleKind::ProductSample, atoms)
    }

    pub fn kind(&self) -> OracleKind {
        self.kind
    }

    pub fn atoms(&self) -> &[Arc<Atom>] {
        &self.atoms
    }

    pub fn atom(&self, i: usize) -> &Arc<Atom> {
        &self.atoms[i]
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.shape
    }

    /// Largest atom norm minus 1; nonpositive means all atoms lie in the unit ball.
    pub fn unit_ball_excess(&self, p: f64, kind: NormKind) -> Result<f64> {
        let norms = par::map_indexed(self.len(), |i| norm_of(self.atoms[i].value(), p, kind));
        let mut worst = f64::NEG_INFINITY;
        for n in norms {
            worst = worst.max(n? - 1.0);
        }
        Ok(worst)
    }

    /// `diam(S)` in the given norm: analytic `2^{1/p}` for basis atoms in
    /// their native norm, exact pairwise maximum up to
    /// [`EXACT_DIAMETER_LIMIT`] atoms, otherwise the a-priori value 2.
    pub fn diameter(&self, p: f64, kind: NormKind) -> Result<f64> {
        if self.len() == 1 {
            return Ok(0.0);
        }
        if self.unit_spread.contains(&kind) {
            return Ok(2f64.powf(1.0 / p));
        }
        if self.len() > EXACT_DIAMETER_LIMIT {
            return Ok(2.0);
        }
        let m = self.len();
        let pairs = m * (m - 1) / 2;
        let dist = par::map_indexed(pairs, |t| {
            // unrank t into (i, j) with i < j
            let mut i = 0;
            let mut rem = t;
            while rem >= m - 1 - i {
                rem -= m - 1 - i;
                i += 1;
            }
            let j = i + 1 + rem;
            norm_of(&(self.atoms[i].value() - self.atoms[j].value()), p, kind)
        });
        let mut best: f64 = 0.0;
        for d in dist {
            best = best.max(d?);
        }
        Ok(best)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::hermitian_eigenvalues;

    #[test]
    fn basis_counts_and_norms() {
        let o = AtomOracle::basis_atoms(1, 2).unwrap();
        assert_eq!(o.len(), 4);
        assert_eq!(o.shape(), (2, 2));
        for a in o.atoms() {
            assert_eq!(lp_norm(a.value(), 1.0).unwrap(), 1.0);
        }
        let d = lp_norm(&(o.atom(0).value() - o.atom(3).value()), 2.0).unwrap();
        assert!((d - 2f64.sqrt()).abs() < 1e-15);
        assert!((o.diameter(2.0, NormKind::Lp).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        // lexicographic order: atom 1 is e_0 ⊗ e_1
        assert_eq!(o.atom(1).value().get(0, 1), Complex64::new(1.0, 0.0));
        assert_eq!(AtomOracle::basis_atoms(2, 3).unwrap().len(), 27);
    }

    #[test]
    fn basis_diameter_matches_pairwise() {
        for p in [1.25, 2.0, 3.0] {
            let o = AtomOracle::basis_atoms(1, 3).unwrap();
            let mut plain = AtomOracle::from_atoms(OracleKind::FiniteList, o.atoms().to_vec()).unwrap();
            plain.unit_spread.clear();
            let exact = plain.diameter(p, NormKind::Lp).unwrap();
            assert!((exact - o.diameter(p, NormKind::Lp).unwrap()).abs() < 1e-12);
        }
        // in Schatten norm, matrix units sharing a row differ by a rank-one
        // matrix with singular value √2, which beats 2^{1/p} for p > 2
        let o = AtomOracle::basis_atoms(1, 2).unwrap();
        let s = o.diameter(4.0, NormKind::Schatten).unwrap();
        assert!((s - 2f64.sqrt()).abs() < 1e-12);
        let diag = AtomOracle::diagonal_basis_atoms(1, 2).unwrap();
        let mut plain = AtomOracle::from_atoms(OracleKind::FiniteList, diag.atoms().to_vec()).unwrap();
        plain.unit_spread.clear();
        for p in [4.0 / 3.0, 2.0, 4.0] {
            assert!((plain.diameter(p, NormKind::Schatten).unwrap() - diag.diameter(p, NormKind::Schatten).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn product_atoms() {
        let o = AtomOracle::product_psd_atoms(&[2, 2], 2.0, 10, 7, true).unwrap();
        assert_eq!(o.len(), 20);
        assert_eq!(o.kind(), OracleKind::ProductSample);
        for a in &o.atoms()[..10] {
            assert!((schatten_norm(a.value(), 2.0).unwrap() - 1.0).abs() <= 1e-12);
            for (k, f) in a.factors().unwrap().iter().enumerate() {
                let m = ComplexMatrix::from_row_major(2, 2, f.clone()).unwrap();
                let ev = hermitian_eigenvalues(&m).unwrap();
                assert!(ev[0] >= -1e-12, "site {k}: {ev:?}");
            }
            assert!(hermitian_eigenvalues(a.value()).unwrap()[0] >= -1e-12);
        }
        assert!(o.unit_ball_excess(2.0, NormKind::Schatten).unwrap() <= 1e-12);
        let again = AtomOracle::product_psd_atoms(&[2, 2], 2.0, 10, 7, true).unwrap();
        assert!(o.atoms().iter().zip(again.atoms()).all(|(a, b)| a.value() == b.value()));
        assert!(o.diameter(2.0, NormKind::Schatten).unwrap() <= 2.0 + 1e-12);
    }

    #[test]
    fn diagonal_atoms_factor_correctly() {
        let o = AtomOracle::diagonal_basis_atoms(1, 3).unwrap();
        assert_eq!(o.shape(), (9, 9));
        let a = o.atom(5); // (i_0, i_1) = (1, 2)
        assert_eq!(a.value().get(5, 5), Complex64::new(1.0, 0.0));
        let f = a.factors().unwrap();
        assert_eq!(f[0][4], Complex64::new(1.0, 0.0));
        assert_eq!(f[1][8], Complex64::new(1.0, 0.0));
    }
}
