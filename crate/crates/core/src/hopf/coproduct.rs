//! Deshuffle and Butcher–Connes–Kreimer coproducts.

use num_traits::One;

use super::memo;
use crate::forest::{Forest, Graph};
use crate::series::{qi, ForestSeries, Q, TensorSeries};
use std::sync::Arc;

fn side(g: &Graph, keep: &[bool]) -> Forest {
    Forest::from_valid(g.induced(keep).0)
}

fn split_components(f: &Forest, always_left: impl Fn(&Graph, &[usize]) -> bool) -> TensorSeries<Forest> {
    let g = f.graph();
    let comps = g.exotic_components();
    let (fixed, free): (Vec<&Vec<usize>>, Vec<&Vec<usize>>) = comps.iter().partition(|c| always_left(g, c));
    let mut out = TensorSeries::zero();
    for mask in 0u64..(1u64 << free.len()) {
        let mut left = vec![false; g.len()];
        for c in &fixed {
            for &v in c.iter() {
                left[v] = true;
            }
        }
        for (i, c) in free.iter().enumerate() {
            if mask >> i & 1 == 1 {
                for &v in c.iter() {
                    left[v] = true;
                }
            }
        }
        let right: Vec<bool> = left.iter().map(|b| !b).collect();
        out.add_term((side(g, &left), side(g, &right)), Q::one());
    }
    out
}

/// Deshuffle over connected components: Σ π_S ⊗ π_{S^c}.
pub fn deshuffle(f: &Forest) -> Arc<TensorSeries<Forest>> {
    memo("deshuffle", f, |f| split_components(f, |_, _| false))
}

/// Deshuffle linear over aromas: rootless components always sit on the left.
pub fn deshuffle_aroma_linear(f: &Forest) -> Arc<TensorSeries<Forest>> {
    memo("deshuffle-aroma-linear", f, |f| split_components(f, |g, c| c.iter().all(|&v| !g.is_root(v))))
}

/// Antipode of the deshuffle Hopf algebra: (−1)^k π for k connected components.
pub fn antipode_deshuffle(f: &Forest) -> ForestSeries {
    let k = f.exotic_components().len();
    ForestSeries::single(f.clone(), qi(if k.is_multiple_of(2) { 1 } else { -1 }))
}

/// Antipode of the aroma-linear deshuffle: (−1)^k π for k rooted components.
pub fn antipode_deshuffle_aroma_linear(f: &Forest) -> ForestSeries {
    let k = f.exotic_components().iter().filter(|c| c.num_roots() > 0).count();
    ForestSeries::single(f.clone(), qi(if k % 2 == 0 { 1 } else { -1 }))
}

/// Δ_BCK(π) = Σ (π ∖ π₀) ⊗ π₀ over subforests π₀ closed under successors,
/// keeping liana pairs and stolons on one side.
pub fn bck_coproduct(f: &Forest) -> Arc<TensorSeries<Forest>> {
    memo("bck", f, bck_raw)
}

fn bck_raw(f: &Forest) -> TensorSeries<Forest> {
    let g = f.graph();
    let n = g.len();
    assert!(n < 40, "forest too large for subset enumeration");
    let partner = g.partners();
    let mut out = TensorSeries::zero();
    'mask: for mask in 0u64..(1u64 << n) {
        let inside = |v: usize| mask >> v & 1 == 1;
        for v in 0..n {
            if !inside(v) {
                continue;
            }
            let linked = [g.succ[v], partner[v], g.stolon[v]];
            if linked.iter().flatten().any(|&w| !inside(w)) {
                continue 'mask;
            }
        }
        for v in 0..n {
            if inside(v) {
                continue;
            }
            if [partner[v], g.stolon[v]].iter().flatten().any(|&w| inside(w)) {
                continue 'mask;
            }
        }
        let keep: Vec<bool> = (0..n).map(inside).collect();
        let rest: Vec<bool> = keep.iter().map(|b| !b).collect();
        out.add_term((side(g, &rest), side(g, &keep)), Q::one());
    }
    out
}
