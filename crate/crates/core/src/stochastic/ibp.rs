//! Integration by parts on F-weighted series and the normalizing map A.

use super::eli::eli_normalize;
use super::StochasticError;
use crate::forest::{Deco, Forest, Graph};
use crate::series::{delta_sigma, delta_sigma_inv, qi, ForestSeries, Functional};

/// Vertices of the tree hanging below root `r` (its edge component).
fn tree_of(g: &Graph, r: usize) -> Vec<bool> {
    let mut inside = vec![false; g.len()];
    inside[r] = true;
    let mut changed = true;
    while changed {
        changed = false;
        for v in 0..g.len() {
            if !inside[v] {
                if let Some(w) = g.succ[v] {
                    if inside[w] {
                        inside[v] = true;
                        changed = true;
                    }
                }
            }
        }
    }
    inside
}

/// Whether π needs rewriting: several roots or a numbered root.
pub fn needs_ibp(f: &Forest) -> bool {
    let g = f.graph();
    let roots = g.roots();
    roots.len() > 1 || roots.iter().any(|&r| g.deco[r].is_liana())
}

/// One integration by parts removing root `r` (a vertex of the canonical
/// graph of π). The output is F-weighted: F(π) ∼ Σ c F(μ).
pub fn ibp_step(f: &Forest, r: usize) -> Result<ForestSeries, StochasticError> {
    let g = f.graph();
    if r >= g.len() || !g.is_root(r) {
        return Err(StochasticError::NotARoot(r, f.to_string()));
    }
    if !needs_ibp(f) {
        return Err(StochasticError::NothingToEliminate(f.to_string()));
    }
    if let Deco::Letter(c) = g.deco[r] {
        return Err(StochasticError::Unsupported(c));
    }
    let mut out = ForestSeries::zero();
    let mut push = |h: Graph, c: i64| -> Result<(), StochasticError> {
        out.add_term(Forest::from_graph(h)?, qi(c));
        Ok(())
    };
    if g.deco[r].is_liana() {
        let p = g.partners()[r].expect("liana without partner");
        for v in (0..g.len()).filter(|&v| v != r && g.deco[v] == Deco::Black) {
            let mut h = g.clone();
            h.succ[r] = Some(v);
            push(h, -1)?;
        }
        let mut h = g.clone();
        h.deco[p] = Deco::Black;
        let keep: Vec<bool> = (0..g.len()).map(|v| v != r).collect();
        push(h.induced(&keep).0, -2)?;
    } else {
        for v in 0..g.len() {
            if g.deco[v] != Deco::Black {
                continue;
            }
            let mut h = g.clone();
            h.succ[r] = Some(v);
            push(h, -1)?;
        }
        let mut h = g.clone();
        let n = h.add(Deco::Black, None);
        h.link_stolon(r, n);
        push(h, -2)?;
    }
    Ok(out)
}

/// Root chosen by the default strategy: numbered singleton roots first,
/// then the smallest tree; ties go to the earliest vertex of the canonical
/// graph.
pub fn default_root(f: &Forest) -> Option<usize> {
    if !needs_ibp(f) {
        return None;
    }
    let g = f.graph();
    g.roots()
        .into_iter()
        .map(|r| {
            let size = tree_of(g, r).iter().filter(|&&b| b).count();
            (!g.deco[r].is_liana(), size, r)
        })
        .min()
        .map(|t| t.2)
}

/// Result of the normalizing map A on an F-weighted series.
#[derive(Clone, Debug, PartialEq)]
pub struct IbpNormalForm {
    /// Single black-rooted terms.
    pub trees: ForestSeries,
    /// Rootless terms that integration by parts cannot remove.
    pub residual: ForestSeries,
}

/// Normal form under ∼ with the default elimination strategy.
pub fn ibp_normalize(s: &ForestSeries) -> Result<IbpNormalForm, StochasticError> {
    ibp_normalize_with(s, &|f| default_root(f))
}

/// Normal form under ∼ with a caller-chosen root at each step.
pub fn ibp_normalize_with(
    s: &ForestSeries,
    choose: &dyn Fn(&Forest) -> Option<usize>,
) -> Result<IbpNormalForm, StochasticError> {
    let mut work = s.clone();
    let mut trees = ForestSeries::zero();
    let mut residual = ForestSeries::zero();
    loop {
        let next = work.iter().next().map(|(f, c)| (f.clone(), c.clone()));
        let Some((f, c)) = next else { break };
        work.add_term(f.clone(), -c.clone());
        if f.num_roots() == 0 {
            residual.add_term(f, c);
            continue;
        }
        match choose(&f) {
            None => trees.add_term(f, c),
            Some(r) => {
                let step = ibp_step(&f, r)?;
                work.add_scaled(&step, &c);
            }
        }
    }
    Ok(IbpNormalForm { trees, residual })
}

/// The map A on functionals: A(x) = δσ⁻¹(gradient normal form of δσ(x)),
/// valued on exotic trees with a black root. Also returns the F-weighted
/// residual that could not be placed on such trees.
pub fn a_map(x: &Functional) -> Result<(Functional, ForestSeries), StochasticError> {
    let nf = eli_normalize(&delta_sigma(&x.to_linear()))?;
    Ok((delta_sigma_inv(&nf.trees.with_trunc(x.trunc())), nf.residual))
}
