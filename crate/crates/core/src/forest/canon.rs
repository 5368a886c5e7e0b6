//! Canonical text encoding.
//!
//! For a fixed liana labelling the rendering below is already canonical:
//! children are sorted by their own rendering, cycles use their minimal
//! rotation, stolon sides and components are sorted. The liana labelling is
//! then fixed by taking the minimal rendering over all label permutations.

use std::collections::BTreeMap;

use itertools::Itertools;

use super::graph::{Deco, Graph};

struct Ctx<'a> {
    g: &'a Graph,
    preds: Vec<Vec<usize>>,
    on_cycle: Vec<bool>,
    relabel: BTreeMap<u32, u32>,
}

impl Ctx<'_> {
    fn label(&self, v: usize) -> String {
        match self.g.deco[v] {
            Deco::Black => "b".to_string(),
            Deco::Letter(c) => c.to_string(),
            Deco::Liana(l) => self.relabel.get(&l).copied().unwrap_or(l).to_string(),
        }
    }

    fn tree(&self, v: usize, skip: Option<usize>) -> String {
        let mut kids: Vec<String> =
            self.preds[v].iter().filter(|&&c| Some(c) != skip).map(|&c| self.tree(c, None)).collect();
        let mut s = self.label(v);
        if !kids.is_empty() {
            kids.sort();
            s.push('[');
            s.push_str(&kids.join(","));
            s.push(']');
        }
        s
    }

    fn component(&self, vs: &[usize]) -> String {
        if let Some(&r) = vs.iter().find(|&&v| self.g.is_root(v)) {
            return self.tree(r, None);
        }
        if let Some(&a) = vs.iter().find(|&&v| self.g.stolon[v].is_some()) {
            let b = self.g.stolon[a].unwrap();
            let (x, y) = (self.tree(a, None), self.tree(b, None));
            return if x <= y { format!("{x}={y}") } else { format!("{y}={x}") };
        }
        let start = *vs.iter().find(|&&v| self.on_cycle[v]).expect("aroma without cycle");
        let mut cyc = vec![start];
        let mut v = self.g.succ[start].unwrap();
        while v != start {
            cyc.push(v);
            v = self.g.succ[v].unwrap();
        }
        let k = cyc.len();
        let parts: Vec<String> = (0..k).map(|i| self.tree(cyc[i], Some(cyc[(i + k - 1) % k]))).collect();
        (0..k)
            .map(|r| format!("({})", (0..k).map(|i| parts[(r + i) % k].as_str()).join(",")))
            .min()
            .unwrap()
    }

    fn render(&self) -> String {
        if self.g.is_empty() {
            return "{}".to_string();
        }
        let mut comps: Vec<String> = self.g.graph_components().iter().map(|vs| self.component(vs)).collect();
        comps.sort();
        comps.join(",")
    }
}

impl<'a> Ctx<'a> {
    fn new(g: &'a Graph) -> Self {
        Ctx { g, preds: g.preds(), on_cycle: g.cycle_flags(), relabel: BTreeMap::new() }
    }
}

/// Rendering with the labels as they are.
pub(crate) fn render_raw(g: &Graph) -> String {
    Ctx::new(g).render()
}

/// Minimal rendering over all liana relabellings by 1..k.
pub(crate) fn canonical_key(g: &Graph) -> String {
    let labels: Vec<u32> = g.liana_groups().keys().copied().collect();
    let k = labels.len();
    if k == 0 {
        return render_raw(g);
    }
    let mut ctx = Ctx::new(g);
    let mut best: Option<String> = None;
    for perm in (1..=k as u32).permutations(k) {
        ctx.relabel = labels.iter().copied().zip(perm).collect();
        let s = ctx.render();
        if best.as_ref().is_none_or(|b| s < *b) {
            best = Some(s);
        }
    }
    best.unwrap()
}
