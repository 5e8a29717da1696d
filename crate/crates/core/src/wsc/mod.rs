//! Weighted simplicial complexes on `[n] = {0, …, n}`, their facet
//! multisets, connectivity, and permutation group actions.

mod action;
mod text;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use action::{ActionViolation, GroupAction, GroupElement};
pub use text::{format_action, format_wsc, parse_action, parse_wsc};

/// A subset of `[n]` stored as a strictly increasing vertex list.
pub type Simplex = Vec<usize>;

/// Largest simplex size for which all faces are enumerated.
pub const MAX_FACE_ENUMERATION: usize = 20;

/// Weight function `Ω` on the subsets of `[n]`.
///
/// Only nonzero weights are stored; absent subsets have weight 0. The empty
/// set is not stored.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "WscRepr", from = "WscRepr")]
pub struct Wsc {
    n: usize,
    omega: BTreeMap<Simplex, u64>,
}

#[derive(Serialize, Deserialize)]
struct WscRepr {
    n: usize,
    simplices: Vec<(Simplex, u64)>,
}

impl From<Wsc> for WscRepr {
    fn from(w: Wsc) -> Self {
        WscRepr { n: w.n, simplices: w.omega.into_iter().collect() }
    }
}

impl From<WscRepr> for Wsc {
    fn from(r: WscRepr) -> Self {
        Wsc::new(r.n, r.simplices)
    }
}

/// First violation of the complex axioms found by [`Wsc::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WscViolation {
    VertexOutOfRange { simplex: Simplex },
    NotSorted { simplex: Simplex },
    SingletonMissing { vertex: usize },
    Divisibility { sub: Simplex, sup: Simplex, sub_weight: u64, sup_weight: u64 },
    TooLarge { simplex: Simplex },
}

impl fmt::Display for WscViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WscViolation::VertexOutOfRange { simplex } => write!(f, "simplex {simplex:?} has a vertex outside [n]"),
            WscViolation::NotSorted { simplex } => write!(f, "simplex {simplex:?} is not strictly increasing"),
            WscViolation::SingletonMissing { vertex } => write!(f, "singleton {{{vertex}}} has weight 0"),
            WscViolation::Divisibility { sub, sup, sub_weight, sup_weight } => write!(
                f,
                "Ω({sub:?}) = {sub_weight} does not divide Ω({sup:?}) = {sup_weight}"
            ),
            WscViolation::TooLarge { simplex } => {
                write!(f, "simplex {simplex:?} exceeds {MAX_FACE_ENUMERATION} vertices")
            }
        }
    }
}

fn divides(a: u64, b: u64) -> bool {
    b == 0 || (a != 0 && b.is_multiple_of(a))
}

/// All nonempty proper subsets of `s`, in increasing bitmask order.
fn proper_faces(s: &[usize]) -> impl Iterator<Item = Simplex> + '_ {
    let full = (1u64 << s.len()) - 1;
    (1..full).map(move |mask| s.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &v)| v).collect())
}

impl Wsc {
    /// Raw constructor. Zero weights are dropped; nothing else is checked.
    pub fn new(n: usize, omega: impl IntoIterator<Item = (Simplex, u64)>) -> Self {
        let omega = omega.into_iter().filter(|(s, w)| *w != 0 && !s.is_empty()).collect();
        Wsc { n, omega }
    }

    /// Complex generated by the given facets and weights. Every proper face
    /// gets weight 1, and vertices not covered by any facet become singleton
    /// facets of weight 1.
    pub fn from_facets(n: usize, facets: &[(Simplex, u64)]) -> Result<Self> {
        let mut omega = BTreeMap::new();
        for (s, w) in facets {
            let mut s = s.clone();
            s.sort_unstable();
            s.dedup();
            if s.is_empty() {
                return Err(Error::InvalidComplex("empty facet".into()));
            }
            if s.iter().any(|&v| v > n) {
                return Err(Error::InvalidComplex(format!("facet {s:?} has a vertex outside [{n}]")));
            }
            if s.len() > MAX_FACE_ENUMERATION {
                return Err(Error::InvalidComplex(format!("facet {s:?} is too large")));
            }
            if *w == 0 {
                return Err(Error::InvalidComplex(format!("facet {s:?} has weight 0")));
            }
            for face in proper_faces(&s) {
                omega.entry(face).or_insert(1);
            }
            omega.insert(s, *w);
        }
        for v in 0..=n {
            omega.entry(vec![v]).or_insert(1);
        }
        Ok(Wsc { n, omega })
    }

    /// The `n`-simplex `Σ_n`: every subset of `[n]` has weight 1.
    pub fn simplex(n: usize) -> Result<Self> {
        if n + 1 > MAX_FACE_ENUMERATION {
            return Err(Error::InvalidComplex(format!("simplex on {} vertices is too large", n + 1)));
        }
        Wsc::from_facets(n, &[((0..=n).collect(), 1)])
    }

    /// The line `Λ_n` with facets `{i, i+1}` for `i < n`.
    pub fn line(n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidComplex("the line needs n >= 1".into()));
        }
        let facets: Vec<_> = (0..n).map(|i| (vec![i, i + 1], 1)).collect();
        Wsc::from_facets(n, &facets)
    }

    /// The circle `Θ_len` on vertices `0..len` with facets `{i, i+1 mod len}`.
    pub fn circle(len: usize) -> Result<Self> {
        if len < 3 {
            return Err(Error::InvalidComplex("the circle needs length >= 3".into()));
        }
        let facets: Vec<_> = (0..len).map(|i| (vec![i, (i + 1) % len], 1)).collect();
        Wsc::from_facets(len - 1, &facets)
    }

    /// Largest vertex label; the vertices are `0..=n`.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertex_count(&self) -> usize {
        self.n + 1
    }

    /// `Ω(s)` for a sorted vertex list.
    pub fn weight(&self, s: &[usize]) -> u64 {
        self.omega.get(s).copied().unwrap_or(0)
    }

    /// Nonzero weights in lexicographic simplex order.
    pub fn simplices(&self) -> impl Iterator<Item = (&Simplex, u64)> {
        self.omega.iter().map(|(s, &w)| (s, w))
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_ok()
    }

    /// Check the singleton and divisibility axioms, returning the first violation.
    pub fn validate(&self) -> std::result::Result<(), WscViolation> {
        for s in self.omega.keys() {
            if s.windows(2).any(|w| w[0] >= w[1]) {
                return Err(WscViolation::NotSorted { simplex: s.clone() });
            }
            if s.iter().any(|&v| v > self.n) {
                return Err(WscViolation::VertexOutOfRange { simplex: s.clone() });
            }
            if s.len() > MAX_FACE_ENUMERATION {
                return Err(WscViolation::TooLarge { simplex: s.clone() });
            }
        }
        for v in 0..=self.n {
            if self.weight(&[v]) == 0 {
                return Err(WscViolation::SingletonMissing { vertex: v });
            }
        }
        for (sup, &w) in &self.omega {
            for sub in proper_faces(sup) {
                let ws = self.weight(&sub);
                if !divides(ws, w) {
                    return Err(WscViolation::Divisibility { sub, sup: sup.clone(), sub_weight: ws, sup_weight: w });
                }
            }
        }
        Ok(())
    }

    /// Inclusion-maximal simplices with their multiplicities.
    pub fn facets(&self) -> FacetMultiset {
        let all: Vec<&Simplex> = self.omega.keys().collect();
        let is_sub = |a: &[usize], b: &[usize]| a.len() < b.len() && a.iter().all(|v| b.binary_search(v).is_ok());
        let mut facets = Vec::new();
        let mut multiplicity = Vec::new();
        for s in &all {
            if !all.iter().any(|t| is_sub(s, t)) {
                facets.push((*s).clone());
                multiplicity.push(self.omega[*s]);
            }
        }
        FacetMultiset::new(self.n, facets, multiplicity)
    }

    /// Whether every pair of vertices is joined by a chain of shared facets.
    pub fn is_connected(&self) -> bool {
        let mut parent: Vec<usize> = (0..=self.n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for f in self.facets().facets() {
            for w in f.windows(2) {
                let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
                parent[a] = b;
            }
        }
        let root = find(&mut parent, 0);
        (0..=self.n).all(|v| find(&mut parent, v) == root)
    }
}

/// The multiset `𝓕̃`: each facet `F` appears `Ω(F)` times as copies
/// `(F, 0) … (F, Ω(F) − 1)`. Copies are numbered consecutively in
/// (sorted facet, copy index) order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FacetMultiset {
    n: usize,
    facets: Vec<Simplex>,
    multiplicity: Vec<u64>,
    offsets: Vec<usize>,
    incident: Vec<Vec<usize>>,
}

impl FacetMultiset {
    fn new(n: usize, facets: Vec<Simplex>, multiplicity: Vec<u64>) -> Self {
        let mut offsets = Vec::with_capacity(facets.len() + 1);
        let mut acc = 0usize;
        offsets.push(0);
        for &m in &multiplicity {
            acc += m as usize;
            offsets.push(acc);
        }
        let mut incident = vec![Vec::new(); n + 1];
        for (fi, f) in facets.iter().enumerate() {
            for &v in f {
                incident[v].extend(offsets[fi]..offsets[fi + 1]);
            }
        }
        FacetMultiset { n, facets, multiplicity, offsets, incident }
    }

    /// Distinct facets `𝓕`.
    pub fn facets(&self) -> &[Simplex] {
        &self.facets
    }

    pub fn multiplicity(&self, facet: usize) -> u64 {
        self.multiplicity[facet]
    }

    /// `|𝓕̃| = Σ_F Ω(F)`.
    pub fn len(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn facet_index(&self, s: &[usize]) -> Option<usize> {
        self.facets.iter().position(|f| f == s)
    }

    /// Id of copy `copy` of facet number `facet`.
    pub fn copy_id(&self, facet: usize, copy: u64) -> Option<usize> {
        (facet < self.facets.len() && copy < self.multiplicity[facet]).then(|| self.offsets[facet] + copy as usize)
    }

    /// `(facet index, copy index)` of a copy id.
    pub fn copy(&self, id: usize) -> (usize, u64) {
        let f = self.offsets.partition_point(|&o| o <= id) - 1;
        (f, (id - self.offsets[f]) as u64)
    }

    /// The collapse map `𝓕̃ → 𝓕`.
    pub fn collapse(&self, id: usize) -> &Simplex {
        &self.facets[self.copy(id).0]
    }

    /// Copies `𝓕̃_i` whose facet contains vertex `i`, in increasing id order.
    pub fn incident_copies(&self, vertex: usize) -> &[usize] {
        &self.incident[vertex]
    }

    pub fn vertex_count(&self) -> usize {
        self.n + 1
    }
}
