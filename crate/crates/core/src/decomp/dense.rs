use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{lp_norm, ComplexMatrix, Entrywise, NnTensor};
use crate::wsc::{GroupAction, GroupElement};

/// Dense complex tensor in `𝒱_0 ⊗ … ⊗ 𝒱_n` with `dim 𝒱_i = dims[i]`,
/// entries in lexicographic order (`i_0` most significant).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DenseTensor {
    dims: Vec<usize>,
    entries: Vec<Complex64>,
}

impl DenseTensor {
    pub fn new(dims: Vec<usize>, entries: Vec<Complex64>) -> Result<Self> {
        let len: usize = dims.iter().product();
        if dims.is_empty() || entries.len() != len {
            return Err(Error::Shape { expected: format!("{len} entries for dims {dims:?}"), got: entries.len().to_string() });
        }
        Ok(DenseTensor { dims, entries })
    }

    pub fn zeros(dims: Vec<usize>) -> Self {
        let len = dims.iter().product();
        DenseTensor { dims, entries: vec![Complex64::new(0.0, 0.0); len] }
    }

    pub fn from_nn(t: &NnTensor) -> Self {
        DenseTensor {
            dims: vec![t.d(); t.n() + 1],
            entries: t.entries().iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        }
    }

    /// Real tensor with equal local dimensions; imaginary parts must be
    /// below `tol`.
    pub fn to_nn(&self, tol: f64) -> Result<NnTensor> {
        let d = self.dims[0];
        if self.dims.iter().any(|&x| x != d) {
            return Err(Error::Shape { expected: "equal local dimensions".into(), got: format!("{:?}", self.dims) });
        }
        if let Some(z) = self.entries.iter().find(|z| z.im.abs() > tol) {
            return Err(Error::Domain(format!("entry {z} is not real")));
        }
        NnTensor::new(self.dims.len() - 1, d, self.entries.iter().map(|z| z.re).collect())
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn entries_mut(&mut self) -> &mut [Complex64] {
        &mut self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_abs_diff(&self, other: &DenseTensor) -> f64 {
        self.entries.iter().zip(&other.entries).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn sub(&self, other: &DenseTensor) -> DenseTensor {
        DenseTensor { dims: self.dims.clone(), entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect() }
    }

    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        lp_norm(self, p)
    }

    /// `(g·M)_{i_0…i_n} = M_{i_{g(0)}…i_{g(n)}}`: the factor at site `k`
    /// moves to site `g(k)`.
    pub fn permute_sites(&self, g: &GroupElement) -> Result<DenseTensor> {
        let perm = &g.vertex_perm;
        let sites = self.dims.len();
        if perm.len() != sites || (0..sites).any(|k| self.dims[perm[k]] != self.dims[k]) {
            return Err(Error::InvalidAction("permutation does not preserve the local dimensions".into()));
        }
        let mut strides = vec![1usize; sites];
        for k in (0..sites.saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.dims[k + 1];
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.len()];
        let mut idx = vec![0usize; sites];
        for slot in out.iter_mut() {
            let src: usize = (0..sites).map(|k| idx[perm[k]] * strides[k]).sum();
            *slot = self.entries[src];
            for k in (0..sites).rev() {
                idx[k] += 1;
                if idx[k] < self.dims[k] {
                    break;
                }
                idx[k] = 0;
            }
        }
        Ok(DenseTensor { dims: self.dims.clone(), entries: out })
    }

    /// `(1/|G|) Σ_g g·M`.
    pub fn group_average(&self, action: &GroupAction) -> Result<DenseTensor> {
        let mut acc = DenseTensor::zeros(self.dims.clone());
        for g in action.elements() {
            let t = self.permute_sites(g)?;
            for (a, b) in acc.entries.iter_mut().zip(&t.entries) {
                *a += b;
            }
        }
        let s = 1.0 / action.order() as f64;
        for a in &mut acc.entries {
            *a *= s;
        }
        Ok(acc)
    }

    pub fn is_invariant(&self, action: &GroupAction, tol: f64) -> Result<bool> {
        for g in action.elements() {
            if self.permute_sites(g)?.max_abs_diff(self) > tol {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Read each site as a square operator space (`dims[k] = m_k²`, row-major
    /// `m_k × m_k`) and return the operator on `⊗ C^{m_k}`.
    pub fn to_operator(&self) -> Result<ComplexMatrix> {
        let m: Vec<usize> = self
            .dims
            .iter()
            .map(|&d| {
                let r = (d as f64).sqrt().round() as usize;
                if r * r == d {
                    Ok(r)
                } else {
                    Err(Error::Shape { expected: "square local dimensions".into(), got: d.to_string() })
                }
            })
            .collect::<Result<_>>()?;
        let size: usize = m.iter().product();
        let sites = m.len();
        let mut out = ComplexMatrix::zeros(size, size);
        let mut idx = vec![0usize; sites];
        for z in &self.entries {
            let (mut row, mut col) = (0, 0);
            for k in 0..sites {
                row = row * m[k] + idx[k] / m[k];
                col = col * m[k] + idx[k] % m[k];
            }
            out.set(row, col, *z);
            for k in (0..sites).rev() {
                idx[k] += 1;
                if idx[k] < self.dims[k] {
                    break;
                }
                idx[k] = 0;
            }
        }
        Ok(out)
    }
}

impl Entrywise for DenseTensor {
    fn abs_entries(&self) -> Vec<f64> {
        self.entries.iter().map(|z| z.norm()).collect()
    }
}
