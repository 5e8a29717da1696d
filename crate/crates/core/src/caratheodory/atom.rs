use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tensor::ComplexMatrix;

/// An element of the generating set `S`.
///
/// `value` is the matrix the solver sees. Product atoms also carry their
/// site factors (each flattened row-major), so that a combination of them
/// can be written as an explicit decomposition.
#[derive(Clone, Debug)]
pub struct Atom {
    id: usize,
    value: ComplexMatrix,
    nonzeros: Vec<(usize, usize, Complex64)>,
    factors: Option<Vec<Vec<Complex64>>>,
}

impl Atom {
    pub fn new(id: usize, value: ComplexMatrix) -> Self {
        let nonzeros = value.nonzeros();
        Atom { id, value, nonzeros, factors: None }
    }

    /// Product atom `x_0 ⊗ … ⊗ x_n` with explicit factors.
    pub fn product(id: usize, value: ComplexMatrix, factors: Vec<Vec<Complex64>>) -> Result<Self> {
        let len: usize = factors.iter().map(Vec::len).product();
        if len != value.rows() * value.cols() {
            return Err(Error::Shape {
                expected: format!("{} entries", value.rows() * value.cols()),
                got: format!("factors with {len} entries"),
            });
        }
        let mut a = Atom::new(id, value);
        a.factors = Some(factors);
        Ok(a)
    }

    pub fn id(&self) -> usize {
        self.id
    }

    pub fn value(&self) -> &ComplexMatrix {
        &self.value
    }

    /// Nonzero entries `(i, j, z)` of the value.
    pub fn nonzeros(&self) -> &[(usize, usize, Complex64)] {
        &self.nonzeros
    }

    pub fn factors(&self) -> Option<&[Vec<Complex64>]> {
        self.factors.as_deref()
    }

    pub fn is_product(&self) -> bool {
        self.factors.is_some()
    }

    /// The same atom with its value scaled by `s` (factor 0 absorbs the scale).
    pub fn scaled(&self, id: usize, s: f64) -> Atom {
        let value = self.value.scale(s);
        let nonzeros = value.nonzeros();
        let factors = self.factors.as_ref().map(|f| {
            let mut f = f.clone();
            for z in &mut f[0] {
                *z *= s;
            }
            f
        });
        Atom { id, value, nonzeros, factors }
    }
}
