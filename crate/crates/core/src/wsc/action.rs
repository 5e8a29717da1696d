use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{FacetMultiset, Wsc};
use crate::error::{Error, Result};

/// Cap on the number of elements produced by [`GroupAction::generated_by`].
pub const MAX_GROUP_ORDER: usize = 1 << 16;

/// One group element: a permutation of the vertices and a permutation of
/// the facet copies `𝓕̃` (by copy id).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GroupElement {
    pub vertex_perm: Vec<usize>,
    pub copy_perm: Vec<usize>,
}

impl GroupElement {
    pub fn identity(vertices: usize, copies: usize) -> Self {
        GroupElement { vertex_perm: (0..vertices).collect(), copy_perm: (0..copies).collect() }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &GroupElement) -> GroupElement {
        GroupElement {
            vertex_perm: other.vertex_perm.iter().map(|&x| self.vertex_perm[x]).collect(),
            copy_perm: other.copy_perm.iter().map(|&x| self.copy_perm[x]).collect(),
        }
    }

    pub fn inverse(&self) -> GroupElement {
        let inv = |p: &[usize]| {
            let mut q = vec![0; p.len()];
            for (i, &x) in p.iter().enumerate() {
                q[x] = i;
            }
            q
        };
        GroupElement { vertex_perm: inv(&self.vertex_perm), copy_perm: inv(&self.copy_perm) }
    }

    pub fn is_identity(&self) -> bool {
        self.vertex_perm.iter().enumerate().all(|(i, &x)| i == x)
            && self.copy_perm.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// Sorted image of a simplex.
    pub fn apply_simplex(&self, s: &[usize]) -> Vec<usize> {
        let mut t: Vec<usize> = s.iter().map(|&v| self.vertex_perm[v]).collect();
        t.sort_unstable();
        t
    }

    /// Element acting on vertices by `vertex_perm`, with the copy permutation
    /// derived from it. Only possible when every facet has multiplicity 1.
    pub fn from_vertex_perm(w: &Wsc, vertex_perm: Vec<usize>) -> Result<GroupElement> {
        let facets = w.facets();
        if vertex_perm.len() != w.vertex_count() || !is_permutation(&vertex_perm) {
            return Err(Error::InvalidAction(format!("{vertex_perm:?} is not a permutation of the vertices")));
        }
        let copy_perm = derive_copy_perm(&facets, &vertex_perm, &HashMap::new())?;
        Ok(GroupElement { vertex_perm, copy_perm })
    }
}

/// Copy permutation induced by a vertex permutation, with explicit images for
/// some copies. Remaining copies must map onto facets of multiplicity 1.
pub(crate) fn derive_copy_perm(
    facets: &FacetMultiset,
    vertex_perm: &[usize],
    explicit: &HashMap<usize, usize>,
) -> Result<Vec<usize>> {
    (0..facets.len())
        .map(|c| {
            if let Some(&img) = explicit.get(&c) {
                return Ok(img);
            }
            let f = facets.collapse(c);
            let image: Vec<usize> = {
                let mut t: Vec<usize> = f.iter().map(|&v| vertex_perm[v]).collect();
                t.sort_unstable();
                t
            };
            let fi = facets
                .facet_index(&image)
                .ok_or_else(|| Error::InvalidAction(format!("facet {f:?} maps to {image:?}, which is not a facet")))?;
            if facets.multiplicity(fi) != 1 {
                return Err(Error::InvalidAction(format!(
                    "image facet {image:?} has multiplicity {}; its copy map must be given explicitly",
                    facets.multiplicity(fi)
                )));
            }
            Ok(facets.copy_id(fi, 0).unwrap())
        })
        .collect()
}

fn is_permutation(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    p.iter().all(|&x| x < p.len() && !std::mem::replace(&mut seen[x], true))
}

/// First violation found by [`GroupAction::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ActionViolation {
    NotPermutation { element: usize, what: &'static str },
    Table(String),
    OmegaNotInvariant { element: usize, simplex: Vec<usize>, image: Vec<usize> },
    CollapseNotLinear { element: usize, copy: usize },
}

impl fmt::Display for ActionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ActionViolation::NotPermutation { element, what } => {
                write!(f, "element {element}: {what} permutation is invalid")
            }
            ActionViolation::Table(msg) => write!(f, "composition table: {msg}"),
            ActionViolation::OmegaNotInvariant { element, simplex, image } => {
                write!(f, "element {element} maps {simplex:?} to {image:?} with a different weight")
            }
            ActionViolation::CollapseNotLinear { element, copy } => {
                write!(f, "element {element}: collapse map is not equivariant at copy {copy}")
            }
        }
    }
}

/// A finite group acting on a complex, given by explicit elements and their
/// composition table (`table[a][b]` is the index of `a ∘ b`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupAction {
    elements: Vec<GroupElement>,
    table: Vec<Vec<usize>>,
}

impl GroupAction {
    /// Raw constructor; use [`GroupAction::validate`] to check it.
    pub fn with_table(elements: Vec<GroupElement>, table: Vec<Vec<usize>>) -> Self {
        GroupAction { elements, table }
    }

    /// Group from a complete element list. Elements are sorted, so the
    /// identity comes first; the list must be closed under composition.
    pub fn from_elements(mut elements: Vec<GroupElement>) -> Result<Self> {
        elements.sort();
        elements.dedup();
        let first = elements.first().ok_or_else(|| Error::InvalidAction("no elements".into()))?;
        let (nv, nc) = (first.vertex_perm.len(), first.copy_perm.len());
        for e in &elements {
            if e.vertex_perm.len() != nv || e.copy_perm.len() != nc {
                return Err(Error::InvalidAction("elements have inconsistent sizes".into()));
            }
            if !is_permutation(&e.vertex_perm) || !is_permutation(&e.copy_perm) {
                return Err(Error::InvalidAction(format!("{e:?} is not a permutation pair")));
            }
        }
        let index: HashMap<&GroupElement, usize> = elements.iter().enumerate().map(|(i, e)| (e, i)).collect();
        let mut table = vec![vec![0; elements.len()]; elements.len()];
        for (a, ea) in elements.iter().enumerate() {
            for (b, eb) in elements.iter().enumerate() {
                let c = ea.compose(eb);
                table[a][b] = *index
                    .get(&c)
                    .ok_or_else(|| Error::InvalidAction("element list is not closed under composition".into()))?;
            }
        }
        Ok(GroupAction { elements, table })
    }

    /// The group generated by `generators` acting on `vertices` vertices and
    /// `copies` facet copies.
    pub fn generated_by(vertices: usize, copies: usize, generators: &[GroupElement]) -> Result<Self> {
        let id = GroupElement::identity(vertices, copies);
        for g in generators {
            if g.vertex_perm.len() != vertices || g.copy_perm.len() != copies {
                return Err(Error::InvalidAction("generator has the wrong size".into()));
            }
            if !is_permutation(&g.vertex_perm) || !is_permutation(&g.copy_perm) {
                return Err(Error::InvalidAction(format!("{g:?} is not a permutation pair")));
            }
        }
        let mut seen: BTreeSet<GroupElement> = BTreeSet::new();
        let mut queue = VecDeque::from([id]);
        while let Some(e) = queue.pop_front() {
            if !seen.insert(e.clone()) {
                continue;
            }
            if seen.len() > MAX_GROUP_ORDER {
                return Err(Error::SizeCap {
                    what: "group order",
                    required: seen.len() as u128,
                    cap: MAX_GROUP_ORDER as u128,
                });
            }
            for g in generators {
                let next = g.compose(&e);
                if !seen.contains(&next) {
                    queue.push_back(next);
                }
            }
        }
        GroupAction::from_elements(seen.into_iter().collect())
    }

    pub fn trivial(w: &Wsc) -> Self {
        let id = GroupElement::identity(w.vertex_count(), w.facets().len());
        GroupAction { elements: vec![id], table: vec![vec![0]] }
    }

    /// Rotation `i ↦ i + shift mod len` of a circle complex.
    pub fn rotation(w: &Wsc, shift: usize) -> Result<GroupElement> {
        let len = w.vertex_count();
        let expected = Wsc::circle(len).map_err(|_| Error::InvalidAction("not a circle complex".into()))?;
        if *w != expected {
            return Err(Error::InvalidAction("not a circle complex".into()));
        }
        GroupElement::from_vertex_perm(w, (0..len).map(|i| (i + shift) % len).collect())
    }

    /// The cyclic group `C_len` acting on the circle `Θ_len` by rotation.
    pub fn cyclic_rotation(w: &Wsc) -> Result<Self> {
        let g = GroupAction::rotation(w, 1)?;
        GroupAction::generated_by(w.vertex_count(), w.facets().len(), &[g])
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn element(&self, g: usize) -> &GroupElement {
        &self.elements[g]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    /// Index of the identity element.
    pub fn identity(&self) -> usize {
        self.elements.iter().position(GroupElement::is_identity).unwrap_or(0)
    }

    /// Index of `a ∘ b`.
    pub fn compose(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        let e = self.identity();
        (0..self.order()).find(|&b| self.table[a][b] == e).expect("validated group has inverses")
    }

    pub fn act_vertex(&self, g: usize, v: usize) -> usize {
        self.elements[g].vertex_perm[v]
    }

    pub fn act_copy(&self, g: usize, c: usize) -> usize {
        self.elements[g].copy_perm[c]
    }

    /// Check group axioms, `Ω`-invariance and equivariance of the collapse map.
    pub fn validate(&self, w: &Wsc) -> std::result::Result<(), ActionViolation> {
        let facets = w.facets();
        let order = self.elements.len();
        if order == 0 {
            return Err(ActionViolation::Table("empty group".into()));
        }
        for (i, e) in self.elements.iter().enumerate() {
            if e.vertex_perm.len() != w.vertex_count() || !is_permutation(&e.vertex_perm) {
                return Err(ActionViolation::NotPermutation { element: i, what: "vertex" });
            }
            if e.copy_perm.len() != facets.len() || !is_permutation(&e.copy_perm) {
                return Err(ActionViolation::NotPermutation { element: i, what: "facet copy" });
            }
        }
        if self.table.len() != order || self.table.iter().any(|r| r.len() != order || r.iter().any(|&x| x >= order)) {
            return Err(ActionViolation::Table("table has the wrong shape".into()));
        }
        for a in 0..order {
            for b in 0..order {
                if self.elements[self.table[a][b]] != self.elements[a].compose(&self.elements[b]) {
                    return Err(ActionViolation::Table(format!("entry ({a}, {b}) disagrees with composition")));
                }
            }
        }
        let Some(e) = self.elements.iter().position(GroupElement::is_identity) else {
            return Err(ActionViolation::Table("no identity element".into()));
        };
        for a in 0..order {
            if self.table[e][a] != a || self.table[a][e] != a {
                return Err(ActionViolation::Table(format!("identity fails at {a}")));
            }
            if !(0..order).any(|b| self.table[a][b] == e && self.table[b][a] == e) {
                return Err(ActionViolation::Table(format!("element {a} has no inverse")));
            }
        }
        for a in 0..order {
            for b in 0..order {
                for c in 0..order {
                    if self.table[self.table[a][b]][c] != self.table[a][self.table[b][c]] {
                        return Err(ActionViolation::Table(format!("associativity fails at ({a}, {b}, {c})")));
                    }
                }
            }
        }
        for (i, g) in self.elements.iter().enumerate() {
            for (s, weight) in w.simplices() {
                let image = g.apply_simplex(s);
                if w.weight(&image) != weight {
                    return Err(ActionViolation::OmegaNotInvariant { element: i, simplex: s.clone(), image });
                }
            }
            for c in 0..facets.len() {
                if g.apply_simplex(facets.collapse(c)) != *facets.collapse(g.copy_perm[c]) {
                    return Err(ActionViolation::CollapseNotLinear { element: i, copy: c });
                }
            }
        }
        Ok(())
    }

    /// Whether no nontrivial element fixes a facet copy.
    pub fn is_free(&self) -> bool {
        self.elements
            .iter()
            .filter(|g| !g.is_identity())
            .all(|g| g.copy_perm.iter().enumerate().all(|(c, &x)| c != x))
    }

    /// Orbit of a facet copy, sorted.
    pub fn orbit(&self, copy: usize) -> Vec<usize> {
        let set: BTreeSet<usize> = self.elements.iter().map(|g| g.copy_perm[copy]).collect();
        set.into_iter().collect()
    }

    /// Orbits of `𝓕̃`, ordered by smallest member.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let copies = self.elements.first().map_or(0, |g| g.copy_perm.len());
        let mut done = vec![false; copies];
        let mut out = Vec::new();
        for c in 0..copies {
            if !done[c] {
                let o = self.orbit(c);
                for &x in &o {
                    done[x] = true;
                }
                out.push(o);
            }
        }
        out
    }

    /// Indices of the elements fixing a facet copy.
    pub fn stabilizer(&self, copy: usize) -> Vec<usize> {
        (0..self.order()).filter(|&g| self.elements[g].copy_perm[copy] == copy).collect()
    }
}
