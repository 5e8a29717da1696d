use num_complex::Complex64;

use super::{decode, DenseTensor, OmegaGDecomposition};
use crate::error::{Error, Result};
use crate::wsc::GroupAction;

/// Group average `M'' = (1/|G|) Σ_g g·M'` together with a `G`-compatible
/// decomposition of it on the index set `𝓘' × G`.
///
/// Each facet-copy orbit gets a representative `R`, and `k_F` denotes the
/// unique element with `k_F·R = F`. A term `(g, α')` of `Σ_g g·M'` carries the
/// label `(α'(g⁻¹F), k_F⁻¹ g)` on every copy `F`. A local factor at vertex `j`
/// is nonzero only when all its incident labels `(a_F, h_F)` agree on
/// `g = k_F h_F`; it then equals `|G|^{-1/(n+1)} v'^{[g⁻¹j]}` at
/// `β'(F'') = a_{gF''}`. Connectivity forces a single `g` across all
/// vertices, so the sum reproduces `M''`.
///
/// Label `(a, h)` is encoded as `a·|G| + h`, with `h` the element index.
pub fn symmetrize(
    m_prime: &DenseTensor,
    action: &GroupAction,
    dec_prime: &OmegaGDecomposition,
) -> Result<(DenseTensor, OmegaGDecomposition)> {
    let wsc = dec_prime.wsc();
    action.validate(wsc).map_err(|v| Error::InvalidAction(v.to_string()))?;
    if !action.is_free() {
        return Err(Error::Unsupported("symmetrization needs a free action".into()));
    }
    if !wsc.is_connected() {
        return Err(Error::Unsupported("symmetrization needs a connected complex".into()));
    }
    if dec_prime.action().order() != 1 {
        return Err(Error::Unsupported("the input decomposition must carry the trivial group".into()));
    }
    let dims = dec_prime.local_dims();
    for g in action.elements() {
        if (0..dims.len()).any(|v| dims[g.vertex_perm[v]] != dims[v]) {
            return Err(Error::InvalidAction("the action does not preserve the local dimensions".into()));
        }
    }
    let check = dec_prime.evaluate()?;
    let tol = 1e-10 * m_prime.entries().iter().map(|z| z.norm()).fold(1.0, f64::max);
    if check.dims() != m_prime.dims() || check.max_abs_diff(m_prime) > tol {
        return Err(Error::InvalidDecomposition("the decomposition does not evaluate to M'".into()));
    }

    let facets = wsc.facets();
    let order = action.order();
    let copies = facets.len();
    let mut k = vec![0usize; copies];
    for orbit in action.orbits() {
        let rep = orbit[0];
        for g in 0..order {
            k[action.act_copy(g, rep)] = g;
        }
    }
    let r_prime = dec_prime.index_set_size();
    let r = r_prime * order;
    let sites = wsc.vertex_count();
    let scale = (order as f64).powf(-1.0 / sites as f64);
    let zero = |d: usize| vec![Complex64::new(0.0, 0.0); d];

    let mut local = Vec::with_capacity(sites);
    for j in 0..sites {
        let inc = facets.incident_copies(j);
        let size = super::checked_pow(r, inc.len(), super::DEFAULT_SIZE_CAP, "local family size")?;
        let mut fam = Vec::with_capacity(size);
        for code in 0..size {
            let beta = decode(code, r, inc.len());
            let mut g = None;
            let mut consistent = true;
            for (pos, &f) in inc.iter().enumerate() {
                let h = beta[pos] % order;
                let gf = action.compose(k[f], h);
                match g {
                    None => g = Some(gf),
                    Some(x) if x != gf => {
                        consistent = false;
                        break;
                    }
                    _ => {}
                }
            }
            let g = g.expect("every vertex lies in a facet");
            if !consistent {
                fam.push(zero(dims[j]));
                continue;
            }
            let ginv = action.inverse(g);
            let src = action.act_vertex(ginv, j);
            let beta_prime: Vec<usize> = facets
                .incident_copies(src)
                .iter()
                .map(|&f2| {
                    let image = action.act_copy(g, f2);
                    beta[inc.iter().position(|&c| c == image).expect("equivariant collapse map")] / order
                })
                .collect();
            fam.push(dec_prime.local(src, &beta_prime).iter().map(|z| z * scale).collect());
        }
        local.push(fam);
    }
    let dec = OmegaGDecomposition::new(wsc.clone(), action.clone(), r, dims.to_vec(), local)?;
    Ok((m_prime.group_average(action)?, dec))
}
