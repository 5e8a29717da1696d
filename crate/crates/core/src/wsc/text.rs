//! Line-oriented text formats.
//!
//! Complex: one `facet <vertices> weight <w>` line per facet, for example
//! `facet 0 1 weight 2`. The weight defaults to 1 and `n` is the largest
//! vertex that occurs.
//!
//! Action: one `element <cycles>` line per generator, e.g. `element (0 1 2)`,
//! `element ()` for the identity. An element may be followed by
//! `copy <facet>#<copy> -> <facet>#<copy>` lines (facets written as
//! comma-separated vertices) fixing its action on facet copies; copies that
//! are not listed must map to a facet of multiplicity 1. The action is the
//! group generated by the listed elements.
//!
//! `#` starts a comment when it is the first non-blank character of a line.

use std::collections::HashMap;
use std::fmt::Write;

use super::action::derive_copy_perm;
use super::{FacetMultiset, GroupAction, GroupElement, Wsc};
use crate::error::{Error, Result};

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_usize(line: usize, tok: &str) -> Result<usize> {
    tok.parse().map_err(|_| parse_err(line, format!("expected a vertex number, got {tok:?}")))
}

pub fn parse_wsc(text: &str) -> Result<Wsc> {
    let mut facets = Vec::new();
    for (ln, l) in content_lines(text) {
        let rest = l
            .strip_prefix("facet")
            .ok_or_else(|| parse_err(ln, "expected a line of the form `facet <vertices> weight <w>`"))?;
        let (verts, weight) = match rest.split_once("weight") {
            Some((v, w)) => {
                let w = w.trim();
                (v, w.parse::<u64>().map_err(|_| parse_err(ln, format!("invalid weight {w:?}")))?)
            }
            None => (rest, 1),
        };
        let mut s = verts
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| parse_usize(ln, t))
            .collect::<Result<Vec<_>>>()?;
        if s.is_empty() {
            return Err(parse_err(ln, "facet without vertices"));
        }
        let len = s.len();
        s.sort_unstable();
        s.dedup();
        if s.len() != len {
            return Err(parse_err(ln, "repeated vertex"));
        }
        facets.push((s, weight));
    }
    let n = facets
        .iter()
        .flat_map(|(s, _)| s.iter().copied())
        .max()
        .ok_or_else(|| parse_err(0, "no facets"))?;
    Wsc::from_facets(n, &facets)
}

pub fn format_wsc(w: &Wsc) -> String {
    let f = w.facets();
    let mut out = String::new();
    for (i, s) in f.facets().iter().enumerate() {
        let vs: Vec<String> = s.iter().map(usize::to_string).collect();
        writeln!(out, "facet {} weight {}", vs.join(" "), f.multiplicity(i)).unwrap();
    }
    out
}

fn parse_cycles(line: usize, text: &str, vertices: usize) -> Result<Vec<usize>> {
    let mut perm: Vec<usize> = (0..vertices).collect();
    let mut seen = vec![false; vertices];
    let mut rest = text.trim();
    while !rest.is_empty() {
        let inner_end = rest.find(')').ok_or_else(|| parse_err(line, "unbalanced parenthesis"))?;
        let inner = rest[..inner_end]
            .strip_prefix('(')
            .ok_or_else(|| parse_err(line, "cycles must be written as (a b c)"))?;
        let cycle = inner
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| parse_usize(line, t))
            .collect::<Result<Vec<_>>>()?;
        for &v in &cycle {
            if v >= vertices {
                return Err(parse_err(line, format!("vertex {v} outside the complex")));
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(parse_err(line, format!("vertex {v} appears in two cycles")));
            }
        }
        for (k, &v) in cycle.iter().enumerate() {
            perm[v] = cycle[(k + 1) % cycle.len()];
        }
        rest = rest[inner_end + 1..].trim_start();
    }
    Ok(perm)
}

fn parse_copy_ref(line: usize, tok: &str, facets: &FacetMultiset) -> Result<usize> {
    let (f, c) = tok.split_once('#').ok_or_else(|| parse_err(line, format!("expected <facet>#<copy>, got {tok:?}")))?;
    let mut s = f.split(',').map(|t| parse_usize(line, t.trim())).collect::<Result<Vec<_>>>()?;
    s.sort_unstable();
    let fi = facets.facet_index(&s).ok_or_else(|| parse_err(line, format!("{s:?} is not a facet")))?;
    let c: u64 = c.trim().parse().map_err(|_| parse_err(line, format!("invalid copy index {c:?}")))?;
    facets.copy_id(fi, c).ok_or_else(|| parse_err(line, format!("facet {s:?} has no copy {c}")))
}

/// Parse an action on `w`. The result is validated against `w`.
pub fn parse_action(text: &str, w: &Wsc) -> Result<GroupAction> {
    let facets = w.facets();
    let mut pending: Vec<(usize, Vec<usize>, HashMap<usize, usize>)> = Vec::new();
    for (ln, l) in content_lines(text) {
        if let Some(rest) = l.strip_prefix("element") {
            pending.push((ln, parse_cycles(ln, rest, w.vertex_count())?, HashMap::new()));
        } else if let Some(rest) = l.strip_prefix("copy") {
            let (_, _, map) = pending.last_mut().ok_or_else(|| parse_err(ln, "copy line before any element"))?;
            let (a, b) = rest.split_once("->").ok_or_else(|| parse_err(ln, "expected `copy <src> -> <dst>`"))?;
            let src = parse_copy_ref(ln, a.trim(), &facets)?;
            let dst = parse_copy_ref(ln, b.trim(), &facets)?;
            if map.insert(src, dst).is_some() {
                return Err(parse_err(ln, "copy mapped twice"));
            }
        } else {
            return Err(parse_err(ln, "expected an `element` or `copy` line"));
        }
    }
    let generators = pending
        .into_iter()
        .map(|(ln, vp, map)| {
            let cp = derive_copy_perm(&facets, &vp, &map).map_err(|e| parse_err(ln, e.to_string()))?;
            Ok(GroupElement { vertex_perm: vp, copy_perm: cp })
        })
        .collect::<Result<Vec<_>>>()?;
    let g = GroupAction::generated_by(w.vertex_count(), facets.len(), &generators)?;
    g.validate(w).map_err(|v| Error::InvalidAction(v.to_string()))?;
    Ok(g)
}

fn format_cycles(perm: &[usize]) -> String {
    let mut seen = vec![false; perm.len()];
    let mut out = String::new();
    for start in 0..perm.len() {
        if seen[start] || perm[start] == start {
            continue;
        }
        let mut cycle = Vec::new();
        let mut v = start;
        while !seen[v] {
            seen[v] = true;
            cycle.push(v.to_string());
            v = perm[v];
        }
        write!(out, "({})", cycle.join(" ")).unwrap();
    }
    if out.is_empty() {
        out.push_str("()");
    }
    out
}

/// Every element with its full copy map, in group order.
pub fn format_action(g: &GroupAction, w: &Wsc) -> String {
    let facets = w.facets();
    let copy_ref = |c: usize| {
        let (fi, k) = facets.copy(c);
        let vs: Vec<String> = facets.facets()[fi].iter().map(usize::to_string).collect();
        format!("{}#{k}", vs.join(","))
    };
    let mut out = String::new();
    for e in g.elements() {
        writeln!(out, "element {}", format_cycles(&e.vertex_perm)).unwrap();
        for (c, &d) in e.copy_perm.iter().enumerate() {
            writeln!(out, "copy {} -> {}", copy_ref(c), copy_ref(d)).unwrap();
        }
    }
    out
}
