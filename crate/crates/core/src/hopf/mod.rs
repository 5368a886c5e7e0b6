//! Products and coproducts on exotic aromatic forests.

mod cem;
mod coproduct;
mod graft;

use std::any::Any;
use std::sync::{Arc, OnceLock};

use dashmap::DashMap;
use thiserror::Error;

use crate::forest::{Deco, Forest, ForestError};
use crate::series::{convolve, Coproduct, Functional, SeriesError};

pub use cem::{
    cem_coaction, cem_decorated, cem_reduced, clumped_value, phi_star, substitute_action, substitute_action_decorated,
    DecoClumps,
};
pub use coproduct::{antipode_deshuffle, antipode_deshuffle_aroma_linear, bck_coproduct, deshuffle, deshuffle_aroma_linear};
pub use graft::{act, antipode_gl, antipode_graph, divergence, gl_product, gl_series, graft, stolon_pair};

#[derive(Debug, Error)]
pub enum HopfError {
    #[error("{0} must have exactly one root")]
    NotSingleRooted(String),
    #[error("{0} has a numbered root")]
    NumberedRoot(String),
    #[error("{0} is not supported on single-root forests")]
    Support(String),
    #[error(transparent)]
    Forest(#[from] ForestError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

type Cache = DashMap<(&'static str, Forest), Arc<dyn Any + Send + Sync>>;

fn cache() -> &'static Cache {
    static C: OnceLock<Cache> = OnceLock::new();
    C.get_or_init(DashMap::new)
}

/// Per-forest memo table shared by all expansions; entries are keyed by the
/// expansion name.
pub(crate) fn memo<T: Any + Send + Sync>(name: &'static str, f: &Forest, compute: impl FnOnce(&Forest) -> T) -> Arc<T> {
    let key = (name, f.clone());
    let hit = cache().get(&key).map(|e| e.value().clone());
    if let Some(v) = hit {
        return v.downcast::<T>().expect("memo type mismatch");
    }
    let v = Arc::new(compute(f));
    cache().insert(key, v.clone());
    v
}

/// All tuples (i_1, …, i_k) with 0 ≤ i_j < sizes[j]; one empty tuple when
/// `sizes` is empty.
pub(crate) fn tuples(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &s in sizes {
        let mut next = Vec::with_capacity(out.len() * s);
        for t in &out {
            for i in 0..s {
                let mut u = t.clone();
                u.push(i);
                next.push(u);
            }
        }
        out = next;
    }
    out
}

/// All tuples of length k with entries below m and sum at most `budget`.
pub(crate) fn bounded_tuples(k: usize, m: usize, budget: usize) -> Vec<Vec<usize>> {
    let mut out = vec![(Vec::new(), 0usize)];
    for _ in 0..k {
        let mut next = Vec::new();
        for (t, s) in &out {
            for i in 0..m.min(budget - s + 1) {
                let mut u = t.clone();
                u.push(i);
                next.push((u, s + i));
            }
        }
        out = next;
    }
    out.into_iter().map(|(t, _)| t).collect()
}

/// Composition law a ∗ b = (a ⊗ b)∘Δ_BCK.
pub fn compose(a: &Functional, b: &Functional) -> Result<Functional, HopfError> {
    Ok(convolve(Coproduct::Bck, a, b)?)
}

/// Substitution law b_c ⋆ a = (b_c ⊗ a)∘Δ_CEM, with b_c the character of
/// clumped forests extending b0. The trees carrying b0 need black roots.
pub fn substitute(b0: &Functional, a: &Functional) -> Result<Functional, HopfError> {
    for (f, _) in b0.support() {
        let g = f.graph();
        let roots = g.roots();
        if roots.len() != 1 {
            return Err(HopfError::Support(f.to_string()));
        }
        if g.deco[roots[0]] != Deco::Black {
            return Err(HopfError::NumberedRoot(f.to_string()));
        }
    }
    Ok(convolve(Coproduct::Cem, b0, a)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tuple_counts() {
        assert_eq!(tuples(&[]), vec![Vec::<usize>::new()]);
        assert_eq!(tuples(&[2, 3]).len(), 6);
        assert!(tuples(&[2, 0]).is_empty());
    }
}
