//! Graded enumeration of exotic aromatic forests by growth.
//!
//! Every forest of order n+1 arises from one of order n by one of: a new
//! black vertex (as a root or under a black vertex), a new liana, a new
//! `b=b` component, a new `(b)` component, or a black vertex inserted into a
//! cycle edge.

use std::collections::BTreeSet;
use std::sync::{Mutex, OnceLock};

use rayon::prelude::*;

use super::graph::{Deco, Graph};
use super::{Forest, ForestError};

pub const DEFAULT_BOUND: usize = 6;

/// Subsets of exotic aromatic forests.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Filter {
    /// All exotic aromatic forests.
    All,
    /// Exactly one root (the root may be numbered).
    Eat,
    /// One black root and no aromas.
    Trees,
    /// Plain rooted trees: one root, no lianas, no aromas.
    PlainTrees,
    /// No roots.
    Aromas,
    /// Connected through edges, stolons and lianas.
    Connected,
    /// Every component carries a root.
    NoAromas,
}

impl Filter {
    pub fn accepts(self, f: &Forest) -> bool {
        match self {
            Filter::All => true,
            Filter::Eat => f.num_roots() == 1,
            Filter::Trees => f.is_black_rooted_tree(),
            Filter::PlainTrees => f.is_black_rooted_tree() && f.grading().num_lianas == 0,
            Filter::Aromas => f.num_roots() == 0,
            Filter::Connected => f.exotic_components().len() == 1,
            Filter::NoAromas => f.is_aroma_free(),
        }
    }

    pub fn parse(s: &str) -> Option<Filter> {
        Some(match s {
            "all" => Filter::All,
            "eat" => Filter::Eat,
            "trees" => Filter::Trees,
            "plain-trees" => Filter::PlainTrees,
            "aromas" => Filter::Aromas,
            "connected" => Filter::Connected,
            "no-aromas" => Filter::NoAromas,
            _ => return None,
        })
    }
}

fn grow(f: &Forest) -> Vec<Forest> {
    let g = f.graph();
    let n = g.len();
    let mut out = Vec::new();
    let push = |out: &mut Vec<Forest>, g: Graph| out.push(Forest::from_valid(g));
    let blacks: Vec<usize> = (0..n).filter(|&v| g.deco[v] == Deco::Black).collect();

    let mut h = g.clone();
    h.add(Deco::Black, None);
    push(&mut out, h);
    for &v in &blacks {
        let mut h = g.clone();
        h.add(Deco::Black, Some(v));
        push(&mut out, h);
    }

    let label = g.max_label() + 1;
    let mut spots: Vec<Option<usize>> = vec![None];
    spots.extend(blacks.iter().map(|&v| Some(v)));
    for i in 0..spots.len() {
        for j in i..spots.len() {
            let mut h = g.clone();
            h.add(Deco::Liana(label), spots[i]);
            h.add(Deco::Liana(label), spots[j]);
            push(&mut out, h);
        }
    }

    let mut h = g.clone();
    let a = h.add(Deco::Black, None);
    let b = h.add(Deco::Black, None);
    h.link_stolon(a, b);
    push(&mut out, h);

    let mut h = g.clone();
    let a = h.add(Deco::Black, None);
    h.succ[a] = Some(a);
    push(&mut out, h);
    let on = g.cycle_flags();
    for v in 0..n {
        if !on[v] {
            continue;
        }
        let s = g.succ[v].unwrap();
        let mut h = g.clone();
        let x = h.add(Deco::Black, Some(s));
        h.succ[v] = Some(x);
        push(&mut out, h);
    }
    out
}

fn levels() -> &'static Mutex<Vec<Vec<Forest>>> {
    static L: OnceLock<Mutex<Vec<Vec<Forest>>>> = OnceLock::new();
    L.get_or_init(|| Mutex::new(vec![vec![Forest::empty()]]))
}

/// All exotic aromatic forests of exactly order `n`, sorted by key.
pub(crate) fn level(n: usize) -> Vec<Forest> {
    let mut lv = levels().lock().unwrap();
    while lv.len() <= n {
        let prev = lv.last().unwrap();
        let next: BTreeSet<Forest> = prev.par_iter().flat_map_iter(grow).collect::<Vec<_>>().into_iter().collect();
        lv.push(next.into_iter().collect());
    }
    lv[n].clone()
}

pub fn enumerate(max_order: usize, filter: Filter) -> Result<Vec<Forest>, ForestError> {
    enumerate_with_bound(max_order, filter, DEFAULT_BOUND)
}

/// Forests of order at most `max_order` accepted by `filter`, graded.
pub fn enumerate_with_bound(max_order: usize, filter: Filter, bound: usize) -> Result<Vec<Forest>, ForestError> {
    if max_order > bound {
        return Err(ForestError::BoundExceeded { requested: max_order, bound });
    }
    let mut out = Vec::new();
    for n in 0..=max_order {
        out.extend(level(n).into_iter().filter(|f| filter.accepts(f)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn keys(v: &[Forest]) -> Vec<String> {
        v.iter().map(|f| f.key().to_string()).collect()
    }

    #[test]
    fn low_orders() {
        assert_eq!(keys(&enumerate(0, Filter::All).unwrap()), vec!["{}"]);
        let one = keys(&level(1));
        assert_eq!(one, vec!["(b)", "1,1", "b", "b=b"]);
        let eat = enumerate(2, Filter::Eat).unwrap();
        assert_eq!(eat.len(), 7);
    }

    #[test]
    fn bound() {
        assert!(matches!(enumerate(7, Filter::All), Err(ForestError::BoundExceeded { .. })));
    }
}
