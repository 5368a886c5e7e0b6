//! Grafting, divergence, the stolon form, the Grossman–Larson product and
//! its antipode.

use std::sync::Arc;

use num_traits::One;

use super::{memo, tuples, HopfError};
use crate::forest::{Deco, Forest, Graph};
use crate::series::{qi, ForestSeries, Q};

fn solid(g: &Graph) -> Vec<usize> {
    (0..g.len()).filter(|&v| g.deco[v].is_solid()).collect()
}

/// Joins `pi` to `gamma` in one graph and attaches each root of `pi` to
/// one of the chosen targets (`None` keeps it a root).
fn attach_all(gamma: &Forest, pi: &Forest, allow_stay: bool, out: &mut ForestSeries, coef: &Q) {
    let mut g = gamma.graph().clone();
    let off = g.append(pi.graph());
    let targets = solid(gamma.graph());
    let roots: Vec<usize> = pi.graph().roots().into_iter().map(|r| r + off).collect();
    let k = targets.len() + usize::from(allow_stay);
    for pick in tuples(&vec![k; roots.len()]) {
        let mut h = g.clone();
        for (r, &i) in roots.iter().zip(&pick) {
            if i < targets.len() {
                h.succ[*r] = Some(targets[i]);
            }
        }
        if let Ok(f) = Forest::from_graph(h) {
            out.add_term(f, coef.clone());
        }
    }
}

/// Guin–Oudom action π ↷ γ: every root of π is attached to a vertex of γ;
/// the aromas of π are carried along. 𝟏 ↷ γ = γ.
pub fn act(pi: &Forest, gamma: &Forest) -> ForestSeries {
    let mut out = ForestSeries::zero();
    attach_all(gamma, pi, false, &mut out, &Q::one());
    out
}

/// τ ↷ γ for an exotic aromatic tree τ.
pub fn graft(tau: &Forest, gamma: &Forest) -> Result<ForestSeries, HopfError> {
    if tau.num_roots() != 1 {
        return Err(HopfError::NotSingleRooted(tau.to_string()));
    }
    Ok(act(tau, gamma))
}

/// Sum over the ways to attach the root of τ to one of its own vertices.
pub fn divergence(tau: &Forest) -> Result<ForestSeries, HopfError> {
    let g = tau.graph();
    let roots = g.roots();
    if roots.len() != 1 {
        return Err(HopfError::NotSingleRooted(tau.to_string()));
    }
    let r = roots[0];
    if g.deco[r].is_liana() {
        return Err(HopfError::NumberedRoot(tau.to_string()));
    }
    let mut out = ForestSeries::zero();
    for v in solid(g) {
        let mut h = g.clone();
        h.succ[r] = Some(v);
        out.add_term(Forest::from_graph(h)?, Q::one());
    }
    Ok(out)
}

/// ⟨τ, γ⟩: the two roots joined by a stolon.
pub fn stolon_pair(tau: &Forest, gamma: &Forest) -> Result<Forest, HopfError> {
    for t in [tau, gamma] {
        let roots = t.graph().roots();
        if roots.len() != 1 {
            return Err(HopfError::NotSingleRooted(t.to_string()));
        }
        if t.graph().deco[roots[0]] != Deco::Black {
            return Err(HopfError::NumberedRoot(t.to_string()));
        }
    }
    let mut g = tau.graph().clone();
    let a = g.roots()[0];
    let off = g.append(gamma.graph());
    let b = off + gamma.graph().roots()[0];
    g.link_stolon(a, b);
    Ok(Forest::from_graph(g)?)
}

/// Grossman–Larson product π₁ ◇ π₂: each root of π₁ is either attached to a
/// vertex of π₂ or left in place.
pub fn gl_product(p1: &Forest, p2: &Forest) -> ForestSeries {
    let mut out = ForestSeries::zero();
    attach_all(p2, p1, true, &mut out, &Q::one());
    out
}

/// ◇ extended bilinearly.
pub fn gl_series(a: &ForestSeries, b: &ForestSeries) -> ForestSeries {
    let mut out = ForestSeries::zero();
    for (x, cx) in a.iter() {
        for (y, cy) in b.iter() {
            attach_all(y, x, true, &mut out, &(cx * cy));
        }
    }
    out
}

/// Antipode S◇ of the Grossman–Larson Hopf algebroid. Aromas ω satisfy
/// S◇(ωπ) = S◇(π) ◇ ω; on aroma-free forests S◇ solves
/// Σ π̂₍₁₎ ◇ S◇(π̂₍₂₎) = ε(π) over the connected rooted components.
pub fn antipode_gl(f: &Forest) -> Arc<ForestSeries> {
    memo("antipode-gl", f, |f| {
        if f.is_empty() {
            return ForestSeries::single(f.clone(), Q::one());
        }
        let (aromas, rest) = f.split_aromas();
        if !aromas.is_empty() {
            let s = antipode_gl(&rest);
            return gl_series(&s, &ForestSeries::single(aromas, Q::one()));
        }
        let g = f.graph();
        let comps = g.exotic_components();
        let k = comps.len();
        let mut out = ForestSeries::zero();
        for mask in 1u64..(1u64 << k) {
            let mut left = vec![false; g.len()];
            for (i, c) in comps.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    for &v in c {
                        left[v] = true;
                    }
                }
            }
            let right: Vec<bool> = left.iter().map(|b| !b).collect();
            let l = Forest::from_valid(g.induced(&left).0);
            let r = Forest::from_valid(g.induced(&right).0);
            let sr = antipode_gl(&r);
            out.add_scaled(&gl_series(&ForestSeries::single(l, Q::one()), &sr), &-Q::one());
        }
        out
    })
}

/// Antipode of the concatenation Hopf algebra at graph level:
/// (−1)^k π for k rooted graph components; aromas are scalars.
pub fn antipode_graph(f: &Forest) -> ForestSeries {
    let k = f.num_roots();
    ForestSeries::single(f.clone(), qi(if k.is_multiple_of(2) { 1 } else { -1 }))
}
