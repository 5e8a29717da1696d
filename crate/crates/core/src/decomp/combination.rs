use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;

use super::OmegaGDecomposition;
use crate::caratheodory::Atom;
use crate::error::{Error, Result};
use crate::tensor::ComplexMatrix;
use crate::wsc::{GroupAction, Wsc};

/// `Σ_i λ_i X_i` with `λ_i >= 0` and `Σ λ_i <= 1 + 1e-12`. Atoms may repeat.
#[derive(Clone, Debug)]
pub struct ConvexCombination {
    atoms: Vec<Arc<Atom>>,
    weights: Vec<f64>,
}

impl ConvexCombination {
    pub fn new(atoms: Vec<Arc<Atom>>, weights: Vec<f64>) -> Result<Self> {
        if atoms.len() != weights.len() {
            return Err(Error::Shape { expected: format!("{} weights", atoms.len()), got: weights.len().to_string() });
        }
        if weights.iter().any(|&w| !(w >= 0.0)) {
            return Err(Error::Domain("weights must be nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if total > 1.0 + 1e-12 {
            return Err(Error::Domain(format!("weights sum to {total} > 1")));
        }
        Ok(ConvexCombination { atoms, weights })
    }

    /// Equal weights `1/k`.
    pub fn uniform(atoms: Vec<Arc<Atom>>) -> Self {
        let k = atoms.len();
        ConvexCombination { atoms, weights: vec![1.0 / k as f64; k] }
    }

    pub fn atoms(&self) -> &[Arc<Atom>] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Distinct atoms (by id, in order of first use) with accumulated weights.
    pub fn distinct(&self) -> Vec<(Arc<Atom>, f64)> {
        let mut pos: HashMap<usize, usize> = HashMap::new();
        let mut out: Vec<(Arc<Atom>, f64)> = Vec::new();
        for (a, &w) in self.atoms.iter().zip(&self.weights) {
            match pos.get(&a.id()) {
                Some(&i) => out[i].1 += w,
                None => {
                    pos.insert(a.id(), out.len());
                    out.push((a.clone(), w));
                }
            }
        }
        out
    }

    /// `Σ_i λ_i X_i`, summed over distinct atoms.
    pub fn value(&self) -> Result<ComplexMatrix> {
        let first = self.atoms.first().ok_or_else(|| Error::Domain("empty combination".into()))?;
        let (rows, cols) = first.value().shape();
        let mut out = ComplexMatrix::zeros(rows, cols);
        for (a, w) in self.distinct() {
            if a.value().shape() != (rows, cols) {
                return Err(Error::Shape { expected: format!("{rows}x{cols}"), got: format!("{:?}", a.value().shape()) });
            }
            let slice = out.as_mut_slice();
            let nrows = rows;
            for &(i, j, z) in a.nonzeros() {
                slice[i + j * nrows] += z * w;
            }
        }
        Ok(out)
    }
}

fn product_factors(atom: &Atom, sites: usize) -> Result<&[Vec<Complex64>]> {
    let f = atom.factors().ok_or_else(|| Error::Unsupported(format!("atom {} is not a product tensor", atom.id())))?;
    if f.len() != sites {
        return Err(Error::Shape { expected: format!("{sites} factors"), got: f.len().to_string() });
    }
    Ok(f)
}

/// Number of distinct product atoms in `c`: an upper bound on the
/// `Ω`-rank of the combination for any connected complex `Ω`.
pub fn rank_from_combination(c: &ConvexCombination, w: &Wsc) -> Result<usize> {
    if !w.is_connected() {
        return Err(Error::Unsupported("rank bound needs a connected complex".into()));
    }
    for a in c.atoms() {
        product_factors(a, w.vertex_count())?;
    }
    Ok(c.distinct().len())
}

/// Explicit decomposition of a combination of product atoms on a connected
/// complex, with trivial group and index set of size `rank_from_combination`.
/// A local factor is nonzero only when all its labels agree; vertex 0
/// carries the weights.
pub fn combination_decomposition(c: &ConvexCombination, w: &Wsc) -> Result<OmegaGDecomposition> {
    scaled_combination_decomposition(c, w, 1.0)
}

/// As `combination_decomposition`, for `scale · Σ λ_i X_i`.
pub(crate) fn scaled_combination_decomposition(c: &ConvexCombination, w: &Wsc, scale: f64) -> Result<OmegaGDecomposition> {
    let r = rank_from_combination(c, w)?;
    let distinct = c.distinct();
    let sites = w.vertex_count();
    let dims: Vec<usize> = product_factors(&distinct[0].0, sites)?.iter().map(Vec::len).collect();
    for (a, _) in &distinct {
        let f = product_factors(a, sites)?;
        if f.iter().map(Vec::len).ne(dims.iter().copied()) {
            return Err(Error::Shape { expected: format!("factor lengths {dims:?}"), got: format!("atom {}", a.id()) });
        }
    }
    OmegaGDecomposition::from_fn(w.clone(), GroupAction::trivial(w), r, dims.clone(), |v, beta| {
        let t = beta[0];
        if beta.iter().any(|&b| b != t) {
            return vec![Complex64::new(0.0, 0.0); dims[v]];
        }
        let (atom, weight) = &distinct[t];
        let f = &atom.factors().expect("checked")[v];
        if v == 0 {
            f.iter().map(|z| z * (*weight * scale)).collect()
        } else {
            f.clone()
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::NnTensor;

    fn basis_atom(id: usize, d: usize, i: usize, j: usize) -> Arc<Atom> {
        let t = NnTensor::basis(1, d, &[i, j]).unwrap();
        let e = |k: usize| (0..d).map(|x| Complex64::new(if x == k { 1.0 } else { 0.0 }, 0.0)).collect();
        Arc::new(Atom::product(id, t.to_matrix(), vec![e(i), e(j)]).unwrap())
    }

    #[test]
    fn distinct_counts() {
        let w = Wsc::line(1).unwrap();
        let a = basis_atom(0, 2, 0, 1);
        let same = ConvexCombination::uniform(vec![a.clone(); 5]);
        assert_eq!(rank_from_combination(&same, &w).unwrap(), 1);
        let all: Vec<_> = (0..4).map(|k| basis_atom(k, 2, k / 2, k % 2)).collect();
        let c = ConvexCombination::uniform(all);
        assert_eq!(rank_from_combination(&c, &w).unwrap(), 4);
        let plain = Arc::new(Atom::new(9, a.value().clone()));
        let c = ConvexCombination::uniform(vec![plain]);
        assert!(matches!(rank_from_combination(&c, &w), Err(Error::Unsupported(_))));
    }

    #[test]
    fn decomposition_reproduces_value() {
        let atoms = vec![basis_atom(0, 3, 0, 1), basis_atom(1, 3, 2, 2), basis_atom(0, 3, 0, 1), basis_atom(2, 3, 1, 0)];
        let c = ConvexCombination::uniform(atoms);
        let value = c.value().unwrap();
        for w in [Wsc::line(1).unwrap(), Wsc::simplex(1).unwrap()] {
            let dec = combination_decomposition(&c, &w).unwrap();
            assert_eq!(dec.index_set_size(), 3);
            let t = dec.evaluate().unwrap();
            assert!(t.entries().iter().zip(value.to_row_major()).all(|(a, b)| (a - b).norm() <= 1e-15));
        }
        let disconnected = Wsc::from_facets(1, &[(vec![0], 1), (vec![1], 1)]).unwrap();
        assert!(matches!(combination_decomposition(&c, &disconnected), Err(Error::Unsupported(_))));
    }

    #[test]
    fn weight_checks() {
        let a = basis_atom(0, 2, 0, 0);
        assert!(ConvexCombination::new(vec![a.clone()], vec![-0.1]).is_err());
        assert!(ConvexCombination::new(vec![a.clone(), a.clone()], vec![0.6, 0.6]).is_err());
        assert!(ConvexCombination::new(vec![a], vec![0.25]).is_ok());
    }
}
