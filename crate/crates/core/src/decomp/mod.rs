//! `(Ω,G)`-decompositions as explicit data, their evaluation, symmetrization,
//! psd decompositions of nonnegative tensors and the diagonal correspondence.

mod combination;
mod dense;
mod psd;
mod symmetrize;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;
use crate::tensor::{ComplexMatrix, NnTensor};
use crate::wsc::{GroupAction, Wsc};

pub use combination::{combination_decomposition, rank_from_combination, ConvexCombination};
pub(crate) use combination::scaled_combination_decomposition;
pub use dense::DenseTensor;
pub use psd::PsdOmegaGDecomposition;
pub use symmetrize::symmetrize;

/// Default cap on dense output size and on the number of enumerated terms.
pub const DEFAULT_SIZE_CAP: u128 = 10_000_000;

#[derive(Clone, Copy, Debug)]
pub struct EvalOptions {
    pub size_cap: u128,
    /// Terms per work unit. Results are bit-stable for a fixed chunk size.
    pub chunk_size: usize,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions { size_cap: DEFAULT_SIZE_CAP, chunk_size: 4096 }
    }
}

pub(crate) fn checked_pow(base: usize, exp: usize, cap: u128, what: &'static str) -> Result<usize> {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base as u128);
        if acc > cap {
            return Err(Error::SizeCap { what, required: acc, cap });
        }
    }
    Ok(acc as usize)
}

fn encode(digits: &[usize], base: usize) -> usize {
    digits.iter().fold(0, |acc, &x| acc * base + x)
}

fn decode(mut code: usize, base: usize, len: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for k in (0..len).rev() {
        out[k] = code % base;
        code /= base;
    }
    out
}

/// Σ over `terms` of the elementary tensor `⊗_v tables[v][code_v]`, where
/// `codes(t, buf)` writes the per-vertex codes of term `t` into `buf`.
pub(crate) fn contract<F>(
    dims: &[usize],
    terms: usize,
    tables: &[Vec<Vec<Complex64>>],
    opts: &EvalOptions,
    codes: F,
) -> Result<Vec<Complex64>>
where
    F: Fn(usize, &mut [usize]) + Sync + Send,
{
    let len = dims.iter().try_fold(1u128, |acc, &d| {
        let v = acc * d as u128;
        (v <= opts.size_cap).then_some(v)
    });
    let len = len.ok_or(Error::SizeCap {
        what: "dense tensor entries",
        required: dims.iter().map(|&d| d as u128).product(),
        cap: opts.size_cap,
    })? as usize;
    if terms as u128 > opts.size_cap {
        return Err(Error::SizeCap { what: "enumerated terms", required: terms as u128, cap: opts.size_cap });
    }
    let nonzero: Vec<Vec<bool>> =
        tables.iter().map(|t| t.iter().map(|v| v.iter().any(|z| z.norm_sqr() > 0.0)).collect()).collect();
    let sites = dims.len();
    let chunk = opts.chunk_size.max(1);
    let chunk_sum = |c: usize| {
        let mut acc = vec![Complex64::new(0.0, 0.0); len];
        let mut code = vec![0usize; sites];
        let mut cur = Vec::with_capacity(len);
        let mut next = Vec::with_capacity(len);
        for t in c * chunk..((c + 1) * chunk).min(terms) {
            codes(t, &mut code);
            if (0..sites).any(|v| !nonzero[v][code[v]]) {
                continue;
            }
            cur.clear();
            cur.push(Complex64::new(1.0, 0.0));
            for v in 0..sites {
                let f = &tables[v][code[v]];
                next.clear();
                for &a in &cur {
                    next.extend(f.iter().map(|&b| a * b));
                }
                std::mem::swap(&mut cur, &mut next);
            }
            for (a, b) in acc.iter_mut().zip(&cur) {
                *a += b;
            }
        }
        acc
    };
    let chunks = terms.div_ceil(chunk);
    let mut out = vec![Complex64::new(0.0, 0.0); len];
    let group = 64;
    let mut start = 0;
    while start < chunks {
        let end = (start + group).min(chunks);
        for part in par::map_indexed(end - start, |i| chunk_sum(start + i)) {
            for (a, b) in out.iter_mut().zip(&part) {
                *a += b;
            }
        }
        start = end;
    }
    Ok(out)
}

/// First violation found by a compatibility check.
#[derive(Clone, Debug, PartialEq)]
pub enum CompatViolation {
    Dimension { vertex: usize, element: usize },
    Local { vertex: usize, element: usize, beta: Vec<usize>, diff: f64 },
}

impl std::fmt::Display for CompatViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CompatViolation::Dimension { vertex, element } => {
                write!(f, "element {element} maps vertex {vertex} to a site of different dimension")
            }
            CompatViolation::Local { vertex, element, beta, diff } => {
                write!(f, "v_β at vertex {vertex}, β = {beta:?} differs from its image under element {element} by {diff:e}")
            }
        }
    }
}

/// Explicit `(Ω,G)`-decomposition
/// `v = Σ_{α ∈ 𝓘^{𝓕̃}} v^{[0]}_{α|0} ⊗ … ⊗ v^{[n]}_{α|n}`.
///
/// The local family at vertex `i` is stored densely, indexed by
/// `β ∈ 𝓘^{𝓕̃_i}` in mixed-radix order over the incident copies sorted by
/// copy id (first copy most significant).
#[derive(Clone, Debug, PartialEq)]
pub struct OmegaGDecomposition {
    wsc: Wsc,
    action: GroupAction,
    index_set_size: usize,
    local_dims: Vec<usize>,
    local: Vec<Vec<Vec<Complex64>>>,
}

impl OmegaGDecomposition {
    pub fn new(
        wsc: Wsc,
        action: GroupAction,
        index_set_size: usize,
        local_dims: Vec<usize>,
        local: Vec<Vec<Vec<Complex64>>>,
    ) -> Result<Self> {
        wsc.validate().map_err(|v| Error::InvalidComplex(v.to_string()))?;
        action.validate(&wsc).map_err(|v| Error::InvalidAction(v.to_string()))?;
        if index_set_size == 0 {
            return Err(Error::InvalidDecomposition("empty index set".into()));
        }
        if local_dims.len() != wsc.vertex_count() || local.len() != wsc.vertex_count() {
            return Err(Error::Shape {
                expected: format!("{} vertices", wsc.vertex_count()),
                got: format!("{} dims, {} families", local_dims.len(), local.len()),
            });
        }
        let facets = wsc.facets();
        for v in 0..wsc.vertex_count() {
            let size =
                checked_pow(index_set_size, facets.incident_copies(v).len(), DEFAULT_SIZE_CAP, "local family size")?;
            if local[v].len() != size || local[v].iter().any(|t| t.len() != local_dims[v]) {
                return Err(Error::Shape {
                    expected: format!("{size} local tensors of length {} at vertex {v}", local_dims[v]),
                    got: format!("{} local tensors", local[v].len()),
                });
            }
        }
        Ok(OmegaGDecomposition { wsc, action, index_set_size, local_dims, local })
    }

    /// Build the local families from `f(vertex, β)`.
    pub fn from_fn(
        wsc: Wsc,
        action: GroupAction,
        index_set_size: usize,
        local_dims: Vec<usize>,
        mut f: impl FnMut(usize, &[usize]) -> Vec<Complex64>,
    ) -> Result<Self> {
        let facets = wsc.facets();
        let mut local = Vec::with_capacity(wsc.vertex_count());
        for v in 0..wsc.vertex_count() {
            let s = facets.incident_copies(v).len();
            let size = checked_pow(index_set_size, s, DEFAULT_SIZE_CAP, "local family size")?;
            local.push((0..size).map(|code| f(v, &decode(code, index_set_size, s))).collect());
        }
        OmegaGDecomposition::new(wsc, action, index_set_size, local_dims, local)
    }

    pub fn wsc(&self) -> &Wsc {
        &self.wsc
    }

    pub fn action(&self) -> &GroupAction {
        &self.action
    }

    /// `|𝓘|`, the rank of this decomposition.
    pub fn index_set_size(&self) -> usize {
        self.index_set_size
    }

    pub fn local_dims(&self) -> &[usize] {
        &self.local_dims
    }

    /// `v^{[vertex]}_β`, with `β` listed over the incident copies in id order.
    pub fn local(&self, vertex: usize, beta: &[usize]) -> &[Complex64] {
        &self.local[vertex][encode(beta, self.index_set_size)]
    }

    pub fn local_mut(&mut self, vertex: usize, beta: &[usize]) -> &mut Vec<Complex64> {
        let code = encode(beta, self.index_set_size);
        &mut self.local[vertex][code]
    }

    pub fn family(&self, vertex: usize) -> &[Vec<Complex64>] {
        &self.local[vertex]
    }

    pub fn evaluate(&self) -> Result<DenseTensor> {
        self.evaluate_with(&EvalOptions::default())
    }

    pub fn evaluate_with(&self, opts: &EvalOptions) -> Result<DenseTensor> {
        let facets = self.wsc.facets();
        let r = self.index_set_size;
        let m = facets.len();
        let terms = checked_pow(r, m, opts.size_cap, "enumerated terms")?;
        let incident: Vec<&[usize]> = (0..self.wsc.vertex_count()).map(|v| facets.incident_copies(v)).collect();
        let entries = contract(&self.local_dims, terms, &self.local, opts, |t, buf| {
            let alpha = decode(t, r, m);
            for (v, inc) in incident.iter().enumerate() {
                buf[v] = inc.iter().fold(0, |acc, &c| acc * r + alpha[c]);
            }
        })?;
        DenseTensor::new(self.local_dims.clone(), entries)
    }

    /// Exhaustive check of `v^{[i]}_β = v^{[gi]}_{gβ}` within `tol`.
    pub fn check_g_compatibility(&self, tol: f64) -> std::result::Result<(), CompatViolation> {
        check_compat(&self.wsc, &self.action, &self.local_dims, self.index_set_size, |v, code, gv, gcode| {
            let a = &self.local[v][code];
            let b = &self.local[gv][gcode];
            a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
        }, tol)
    }

    pub fn to_json(&self) -> Result<String> {
        let facets = self.wsc.facets();
        let s = |v: usize| facets.incident_copies(v).len();
        let repr = DecompositionRepr {
            wsc: self.wsc.clone(),
            action: self.action.clone(),
            index_set_size: self.index_set_size,
            local_dims: self.local_dims.clone(),
            vertices: (0..self.wsc.vertex_count())
                .map(|v| VertexRepr {
                    vertex: v,
                    incident_copies: facets.incident_copies(v).to_vec(),
                    entries: self.local[v]
                        .iter()
                        .enumerate()
                        .map(|(code, t)| LocalRepr { beta: decode(code, self.index_set_size, s(v)), tensor: t.clone() })
                        .collect(),
                })
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&repr)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let repr: DecompositionRepr = serde_json::from_str(text)?;
        let facets = repr.wsc.facets();
        let mut local = Vec::new();
        for (v, vr) in repr.vertices.into_iter().enumerate() {
            if vr.vertex != v || vr.incident_copies != facets.incident_copies(v) {
                return Err(Error::InvalidDecomposition(format!("vertex record {v} does not match the complex")));
            }
            let size = checked_pow(repr.index_set_size, vr.incident_copies.len(), DEFAULT_SIZE_CAP, "local family size")?;
            let mut fam = vec![Vec::new(); size];
            let mut seen = vec![false; size];
            for e in vr.entries {
                if e.beta.len() != vr.incident_copies.len() || e.beta.iter().any(|&b| b >= repr.index_set_size) {
                    return Err(Error::InvalidDecomposition(format!("bad β {:?} at vertex {v}", e.beta)));
                }
                let code = encode(&e.beta, repr.index_set_size);
                if std::mem::replace(&mut seen[code], true) {
                    return Err(Error::InvalidDecomposition(format!("duplicate β {:?} at vertex {v}", e.beta)));
                }
                fam[code] = e.tensor;
            }
            local.push(fam);
        }
        OmegaGDecomposition::new(repr.wsc, repr.action, repr.index_set_size, repr.local_dims, local)
    }
}

#[derive(Serialize, Deserialize)]
struct DecompositionRepr {
    wsc: Wsc,
    action: GroupAction,
    index_set_size: usize,
    local_dims: Vec<usize>,
    vertices: Vec<VertexRepr>,
}

#[derive(Serialize, Deserialize)]
struct VertexRepr {
    vertex: usize,
    incident_copies: Vec<usize>,
    entries: Vec<LocalRepr>,
}

#[derive(Serialize, Deserialize)]
struct LocalRepr {
    beta: Vec<usize>,
    tensor: Vec<Complex64>,
}

/// Shared loop of the compatibility checks: for every vertex `v`, element `g`
/// and code of `β ∈ 𝓘^{𝓕̃_v}`, compare `(v, β)` against `(gv, gβ)` with `diff`.
pub(crate) fn check_compat(
    wsc: &Wsc,
    action: &GroupAction,
    dims: &[usize],
    r: usize,
    diff: impl Fn(usize, usize, usize, usize) -> f64,
    tol: f64,
) -> std::result::Result<(), CompatViolation> {
    let facets = wsc.facets();
    for g in 0..action.order() {
        let ginv = action.inverse(g);
        for v in 0..wsc.vertex_count() {
            let gv = action.act_vertex(g, v);
            if dims[v] != dims[gv] {
                return Err(CompatViolation::Dimension { vertex: v, element: g });
            }
            let inc = facets.incident_copies(v);
            let ginc = facets.incident_copies(gv);
            // position in `inc` of g⁻¹F for each F in `ginc`
            let pos: Vec<usize> = ginc
                .iter()
                .map(|&f| {
                    let pre = action.act_copy(ginv, f);
                    inc.iter().position(|&c| c == pre).expect("collapse map is equivariant")
                })
                .collect();
            let size = r.pow(inc.len() as u32);
            for code in 0..size {
                let beta = decode(code, r, inc.len());
                let gbeta: Vec<usize> = pos.iter().map(|&p| beta[p]).collect();
                let d = diff(v, code, gv, encode(&gbeta, r));
                if !(d <= tol) {
                    return Err(CompatViolation::Local { vertex: v, element: g, beta, diff: d });
                }
            }
        }
    }
    Ok(())
}

/// `σ = Σ m_{i_0…i_n} E_{i_0 i_0} ⊗ … ⊗ E_{i_n i_n}`: the diagonal matrix
/// whose diagonal lists the entries of `M` in lexicographic order.
pub fn diag_correspondence(m: &NnTensor) -> Result<ComplexMatrix> {
    let size = m.len() as u128;
    if size * size > DEFAULT_SIZE_CAP {
        return Err(Error::SizeCap { what: "correspondence matrix entries", required: size * size, cap: DEFAULT_SIZE_CAP });
    }
    Ok(ComplexMatrix::diagonal(m.entries()))
}
