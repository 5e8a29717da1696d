use num_complex::Complex64;

use super::{check_compat, checked_pow, contract, decode, CompatViolation, EvalOptions, DEFAULT_SIZE_CAP};
use crate::error::{Error, Result};
use crate::tensor::{hermitian_eigenvalues, ComplexMatrix, NnTensor};
use crate::wsc::{GroupAction, Wsc};

/// Entries below this are an error; entries in `[-MATERIAL, 0)` are clamped.
const MATERIAL_NEGATIVE: f64 = 1e-6;
const CLAMP_WARN: f64 = 1e-10;

/// Psd `(Ω,G)`-decomposition of a nonnegative tensor:
/// `m_{i_0…i_n} = Σ_{α,α'} (E^{[0]}_{i_0})_{α|0,α'|0} ⋯ (E^{[n]}_{i_n})_{α|n,α'|n}`
/// with psd `E^{[v]}_j` of size `|𝓘|^{|𝓕̃_v|}`.
#[derive(Clone, Debug, PartialEq)]
pub struct PsdOmegaGDecomposition {
    wsc: Wsc,
    action: GroupAction,
    index_set_size: usize,
    d: usize,
    blocks: Vec<Vec<ComplexMatrix>>,
}

impl PsdOmegaGDecomposition {
    /// `blocks[v][j]` is `E^{[v]}_j`. Every block must be psd.
    pub fn new(
        wsc: Wsc,
        action: GroupAction,
        index_set_size: usize,
        d: usize,
        blocks: Vec<Vec<ComplexMatrix>>,
    ) -> Result<Self> {
        wsc.validate().map_err(|v| Error::InvalidComplex(v.to_string()))?;
        action.validate(&wsc).map_err(|v| Error::InvalidAction(v.to_string()))?;
        if index_set_size == 0 || d == 0 {
            return Err(Error::InvalidDecomposition("empty index set or local dimension".into()));
        }
        if blocks.len() != wsc.vertex_count() {
            return Err(Error::Shape { expected: format!("{} vertices", wsc.vertex_count()), got: blocks.len().to_string() });
        }
        let facets = wsc.facets();
        for (v, bv) in blocks.iter().enumerate() {
            let k = checked_pow(index_set_size, facets.incident_copies(v).len(), DEFAULT_SIZE_CAP, "psd block size")?;
            if bv.len() != d {
                return Err(Error::Shape { expected: format!("{d} blocks at vertex {v}"), got: bv.len().to_string() });
            }
            for (j, e) in bv.iter().enumerate() {
                if e.shape() != (k, k) {
                    return Err(Error::Shape { expected: format!("{k}x{k}"), got: format!("{:?}", e.shape()) });
                }
                let scale = e.max_abs().max(f64::MIN_POSITIVE);
                if !e.is_hermitian(1e-12 * scale.max(1.0)) {
                    return Err(Error::NotPsd(format!("block ({v}, {j}) is not Hermitian")));
                }
                let min = hermitian_eigenvalues(e)?[0];
                if min < -1e-10 * scale {
                    return Err(Error::NotPsd(format!("block ({v}, {j}) has eigenvalue {min:e}")));
                }
            }
        }
        Ok(PsdOmegaGDecomposition { wsc, action, index_set_size, d, blocks })
    }

    pub fn index_set_size(&self) -> usize {
        self.index_set_size
    }

    pub fn block(&self, vertex: usize, j: usize) -> &ComplexMatrix {
        &self.blocks[vertex][j]
    }

    /// `(E^{[v]}_j)_{β,β'} = (E^{[gv]}_j)_{gβ,gβ'}` for all `v, j, g, β, β'`.
    pub fn check_g_compatibility(&self, tol: f64) -> std::result::Result<(), CompatViolation> {
        let dims = vec![self.d; self.wsc.vertex_count()];
        let facets = self.wsc.facets();
        let r = self.index_set_size;
        let k: Vec<usize> =
            (0..self.wsc.vertex_count()).map(|v| r.pow(facets.incident_copies(v).len() as u32)).collect();
        // β ranges over pairs (β, β') encoded as β·k + β'; index set size r² pairs digits.
        let pair_code = |code: usize, kv: usize, s: usize| {
            let digits = decode(code, r * r, s);
            let (mut a, mut b) = (0, 0);
            for x in digits {
                a = a * r + x / r;
                b = b * r + x % r;
            }
            a * kv + b
        };
        check_compat(
            &self.wsc,
            &self.action,
            &dims,
            r * r,
            |v, code, gv, gcode| {
                let s = facets.incident_copies(v).len();
                let p = pair_code(code, k[v], s);
                let q = pair_code(gcode, k[gv], s);
                (0..self.d)
                    .map(|j| (self.blocks[v][j].get(p / k[v], p % k[v]) - self.blocks[gv][j].get(q / k[gv], q % k[gv])).norm())
                    .fold(0.0, f64::max)
            },
            tol,
        )
    }

    pub fn evaluate_psd(&self) -> Result<NnTensor> {
        self.evaluate_psd_with(&EvalOptions::default())
    }

    /// Evaluate the double sum. Tiny negative entries from rounding are
    /// clamped to 0; entries below `-1e-6` are an error.
    pub fn evaluate_psd_with(&self, opts: &EvalOptions) -> Result<NnTensor> {
        let facets = self.wsc.facets();
        let r = self.index_set_size;
        let m = facets.len();
        let nv = self.wsc.vertex_count();
        let half = checked_pow(r, m, opts.size_cap, "enumerated terms")?;
        let terms = checked_pow(r, 2 * m, opts.size_cap, "enumerated terms")?;
        let incident: Vec<&[usize]> = (0..nv).map(|v| facets.incident_copies(v)).collect();
        let k: Vec<usize> = incident.iter().map(|inc| r.pow(inc.len() as u32)).collect();
        let tables: Vec<Vec<Vec<Complex64>>> = (0..nv)
            .map(|v| {
                (0..k[v] * k[v])
                    .map(|pq| (0..self.d).map(|j| self.blocks[v][j].get(pq / k[v], pq % k[v])).collect())
                    .collect()
            })
            .collect();
        let dims = vec![self.d; nv];
        let entries = contract(&dims, terms, &tables, opts, |t, buf| {
            let alpha = decode(t / half, r, m);
            let alpha2 = decode(t % half, r, m);
            for (v, inc) in incident.iter().enumerate() {
                let a = inc.iter().fold(0, |acc, &c| acc * r + alpha[c]);
                let b = inc.iter().fold(0, |acc, &c| acc * r + alpha2[c]);
                buf[v] = a * k[v] + b;
            }
        })?;
        let scale = entries.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let mut out = Vec::with_capacity(entries.len());
        for (idx, z) in entries.iter().enumerate() {
            if z.im.abs() > 1e-10 * scale {
                return Err(Error::InvalidDecomposition(format!("entry {idx} has imaginary part {:e}", z.im)));
            }
            let x = z.re;
            if x < -MATERIAL_NEGATIVE {
                return Err(Error::InvalidDecomposition(format!("entry {idx} is negative: {x:e}")));
            }
            if x < 0.0 {
                if x < -CLAMP_WARN {
                    log::warn!("clamping negative entry {idx} = {x:e} to 0");
                }
                out.push(0.0);
            } else {
                out.push(x);
            }
        }
        NnTensor::new(nv - 1, self.d, out)
    }
}
