//! Gradient elimination. For f = −∇V every derivative tensor of f is fully
//! symmetric, so F(π)[φ] only depends on the undirected multigraph of index
//! contractions: one node for φ, one per black vertex, one edge per tree
//! edge, liana pair, stolon or root link. Its edge count is the order.
//! Integration by parts becomes: for a node y of degree ≥ 2 (or φ) and an
//! edge (y, x),
//!   G + Σ_{z ≠ y} G[(y,x) → (z,x)] + 2·G[(y,x) → (new leaf, x)] ∼ 0.
//! Row reduction over all such relations of one order rewrites every
//! combination onto single black-rooted aroma-free trees.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::sync::{Arc, Mutex, OnceLock};

use itertools::Itertools;
use num_traits::Zero;
use rayon::prelude::*;

use super::StochasticError;
use crate::forest::{enumerate, Deco, Filter, Forest, Graph};
use crate::series::{ForestSeries, Q};

/// Contraction multigraph; node 0 is φ. `adj` is symmetric and the
/// diagonal counts loops.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Multigraph {
    n: usize,
    adj: Vec<u8>,
}

impl Multigraph {
    fn empty(n: usize) -> Self {
        Multigraph { n, adj: vec![0; n * n] }
    }

    fn get(&self, i: usize, j: usize) -> u8 {
        self.adj[i * self.n + j]
    }

    fn bump(&mut self, i: usize, j: usize, by: i32) {
        let v = (self.adj[i * self.n + j] as i32 + by) as u8;
        self.adj[i * self.n + j] = v;
        self.adj[j * self.n + i] = v;
    }

    fn with_leaf(&self) -> Self {
        let m = self.n + 1;
        let mut g = Multigraph::empty(m);
        for i in 0..self.n {
            for j in 0..self.n {
                g.adj[i * m + j] = self.get(i, j);
            }
        }
        g
    }

    pub fn nodes(&self) -> usize {
        self.n
    }

    pub fn degree(&self, i: usize) -> usize {
        (0..self.n).map(|j| self.get(i, j) as usize).sum::<usize>() + self.get(i, i) as usize
    }

    /// Number of edges, equal to the order of any forest it comes from.
    pub fn order(&self) -> usize {
        (0..self.n).map(|i| (i..self.n).map(|j| self.get(i, j) as usize).sum::<usize>()).sum()
    }

    fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut k = 0;
            while k < comp.len() {
                let u = comp[k];
                k += 1;
                for v in 0..self.n {
                    if !seen[v] && self.get(u, v) > 0 {
                        seen[v] = true;
                        comp.push(v);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Connected with φ of degree one: the image of an exotic tree with a
    /// black root.
    pub fn is_tree_like(&self) -> bool {
        self.degree(0) == 1 && self.get(0, 0) == 0 && self.components().len() == 1
    }

    pub fn from_forest(f: &Forest) -> Result<Self, StochasticError> {
        let g = f.graph();
        let mut node = vec![0usize; g.len()];
        let mut n = 1;
        for v in 0..g.len() {
            match g.deco[v] {
                Deco::Black => {
                    node[v] = n;
                    n += 1;
                }
                Deco::Letter(c) => return Err(StochasticError::Unsupported(c)),
                Deco::Liana(_) => {}
            }
        }
        let mut m = Multigraph::empty(n);
        let end = |v: usize| g.succ[v].map_or(0, |w| node[w]);
        for v in 0..g.len() {
            if g.deco[v] != Deco::Black {
                continue;
            }
            match (g.succ[v], g.stolon[v]) {
                (Some(w), _) => m.bump(node[v], node[w], 1),
                (None, Some(u)) if u > v => m.bump(node[v], node[u], 1),
                (None, Some(_)) => {}
                (None, None) => m.bump(node[v], 0, 1),
            }
        }
        for halves in g.liana_groups().values() {
            m.bump(end(halves[0]), end(halves[1]), 1);
        }
        Ok(m.canonical())
    }

    fn sub_code(&self, order: &[usize]) -> Vec<u8> {
        let mut code = Vec::with_capacity(order.len() * (order.len() + 1) / 2);
        for (a, &i) in order.iter().enumerate() {
            for &j in &order[a..] {
                code.push(self.get(i, j));
            }
        }
        code
    }

    /// Best ordering of one component (φ first when present).
    fn canonical_component(&self, comp: &[usize]) -> (Vec<u8>, Vec<usize>) {
        let fixed = comp.first() == Some(&0);
        let free: Vec<usize> = comp.iter().copied().filter(|&v| v != 0).collect();
        let mut color: HashMap<usize, usize> = free.iter().map(|&v| (v, 0)).collect();
        loop {
            let sig: Vec<(usize, Vec<(usize, u8)>, u8, u8)> = free
                .iter()
                .map(|&v| {
                    let mut nb: Vec<(usize, u8)> = free
                        .iter()
                        .filter(|&&w| w != v && self.get(v, w) > 0)
                        .map(|&w| (color[&w], self.get(v, w)))
                        .collect();
                    nb.sort_unstable();
                    (color[&v], nb, self.get(v, v), self.get(v, 0))
                })
                .collect();
            let ranks: Vec<_> = sig.iter().cloned().sorted().dedup().collect();
            let next: HashMap<usize, usize> =
                free.iter().zip(&sig).map(|(&v, s)| (v, ranks.binary_search(s).expect("present"))).collect();
            let stable = ranks.len() == color.values().copied().sorted().dedup().count();
            color = next;
            if stable {
                break;
            }
        }
        let classes: Vec<Vec<usize>> = free
            .iter()
            .copied()
            .sorted_by_key(|v| color[v])
            .group_by(|v| color[v])
            .into_iter()
            .map(|(_, g)| g.collect())
            .collect();
        let mut best: Option<(Vec<u8>, Vec<usize>)> = None;
        let perms: Vec<Vec<Vec<usize>>> =
            classes.iter().map(|c| c.iter().copied().permutations(c.len()).collect()).collect();
        for choice in perms.iter().map(|p| p.iter()).multi_cartesian_product() {
            let mut order: Vec<usize> = if fixed { vec![0] } else { Vec::new() };
            for part in choice {
                order.extend(part);
            }
            let code = self.sub_code(&order);
            if best.as_ref().is_none_or(|(b, _)| code < *b) {
                best = Some((code, order));
            }
        }
        best.unwrap_or_else(|| {
            let order = if fixed { vec![0] } else { Vec::new() };
            (self.sub_code(&order), order)
        })
    }

    pub fn canonical(&self) -> Self {
        let mut comps: Vec<(Vec<u8>, Vec<usize>)> =
            self.components().iter().map(|c| self.canonical_component(c)).collect();
        let phi = comps.iter().position(|(_, o)| o.first() == Some(&0)).expect("φ present");
        let head = comps.remove(phi);
        comps.sort_by(|a, b| (a.1.len(), &a.0).cmp(&(b.1.len(), &b.0)));
        let order: Vec<usize> = std::iter::once(head).chain(comps).flat_map(|(_, o)| o).collect();
        let mut g = Multigraph::empty(self.n);
        for (a, &i) in order.iter().enumerate() {
            for (b, &j) in order.iter().enumerate() {
                g.adj[a * self.n + b] = self.get(i, j);
            }
        }
        g
    }

    /// A forest with this multigraph. Deterministic on canonical input;
    /// tree-like graphs give exotic trees with a black root.
    pub fn to_forest(&self) -> Forest {
        let mut g = Graph::new();
        let vid: Vec<usize> = (0..self.n).map(|i| if i == 0 { usize::MAX } else { g.add(Deco::Black, None) }).collect();
        let mut rem = self.clone();
        let mut placed = vec![false; self.n];
        placed[0] = true;
        for comp in self.components() {
            let mut queue: VecDeque<usize> = VecDeque::new();
            if comp[0] == 0 {
                queue.push_back(0);
            } else if comp.len() == 1 {
                let c = comp[0];
                g.succ[vid[c]] = Some(vid[c]);
                rem.bump(c, c, -1);
                placed[c] = true;
                queue.push_back(c);
            } else {
                let c = comp[0];
                let d = comp.iter().copied().find(|&d| d != c && self.get(c, d) > 0).expect("connected");
                g.link_stolon(vid[c], vid[d]);
                rem.bump(c, d, -1);
                placed[c] = true;
                placed[d] = true;
                queue.push_back(c);
                queue.push_back(d);
            }
            while let Some(u) = queue.pop_front() {
                for &v in &comp {
                    if !placed[v] && rem.get(u, v) > 0 {
                        g.succ[vid[v]] = if u == 0 { None } else { Some(vid[u]) };
                        rem.bump(u, v, -1);
                        placed[v] = true;
                        queue.push_back(v);
                    }
                }
            }
        }
        let mut label = 0u32;
        for i in 0..self.n {
            for j in i..self.n {
                for _ in 0..rem.get(i, j) {
                    label += 1;
                    for k in [i, j] {
                        g.add(Deco::Liana(label), if k == 0 { None } else { Some(vid[k]) });
                    }
                }
            }
        }
        Forest::from_graph(g).expect("multigraph realizations are valid forests")
    }

    /// Terms of the integration-by-parts relation for node y and its edge
    /// to x; the relation is Σ c·G ∼ 0.
    fn relation(&self, y: usize, x: usize) -> Vec<(Multigraph, i64)> {
        let mut out = vec![(self.clone(), 1)];
        for z in (0..self.n).filter(|&z| z != y) {
            let mut h = self.clone();
            h.bump(y, x, -1);
            h.bump(z, x, 1);
            out.push((h.canonical(), 1));
        }
        let mut h = self.with_leaf();
        h.bump(y, x, -1);
        h.bump(self.n, x, 1);
        out.push((h.canonical(), 2));
        out
    }

    fn relations(&self) -> Vec<Vec<(Multigraph, i64)>> {
        let mut out = Vec::new();
        for y in 0..self.n {
            if self.degree(y) < if y == 0 { 1 } else { 2 } {
                continue;
            }
            for x in 0..self.n {
                if self.get(y, x) > 0 {
                    out.push(self.relation(y, x));
                }
            }
        }
        out
    }
}

type Row = BTreeMap<usize, Q>;

/// Echelon form of the relations of one order. Columns are ranked with
/// non-tree graphs first so that they are eliminated first.
struct Reducer {
    rank: HashMap<Multigraph, usize>,
    graphs: Vec<Multigraph>,
    first_tree: usize,
    pivots: HashMap<usize, Row>,
}

impl Reducer {
    fn build(order: usize) -> Result<Self, StochasticError> {
        let mut known: HashMap<Multigraph, ()> = HashMap::new();
        let mut frontier: Vec<Multigraph> = Vec::new();
        for f in enumerate(order, Filter::All)? {
            if f.order() == order && (0..f.graph().len()).all(|v| !matches!(f.graph().deco[v], Deco::Letter(_))) {
                let m = Multigraph::from_forest(&f)?;
                if known.insert(m.clone(), ()).is_none() {
                    frontier.push(m);
                }
            }
        }
        let mut relations: Vec<Vec<(Multigraph, i64)>> = Vec::new();
        while !frontier.is_empty() {
            let rels: Vec<Vec<(Multigraph, i64)>> = frontier.par_iter().flat_map(|g| g.relations()).collect();
            frontier.clear();
            for r in &rels {
                for (h, _) in r {
                    if known.insert(h.clone(), ()).is_none() {
                        frontier.push(h.clone());
                    }
                }
            }
            relations.extend(rels);
        }
        let graphs: Vec<Multigraph> =
            known.into_keys().sorted_by(|a, b| (a.is_tree_like(), a).cmp(&(b.is_tree_like(), b))).collect();
        let first_tree = graphs.iter().position(Multigraph::is_tree_like).unwrap_or(graphs.len());
        let rank: HashMap<Multigraph, usize> = graphs.iter().cloned().enumerate().map(|(i, g)| (g, i)).collect();
        let mut red = Reducer { rank, graphs, first_tree, pivots: HashMap::new() };
        for r in relations {
            let mut row = Row::new();
            for (h, c) in r {
                let e = row.entry(red.rank[&h]).or_insert_with(Q::zero);
                *e += Q::from_integer(c.into());
            }
            row.retain(|_, v| !v.is_zero());
            red.insert(row);
        }
        Ok(red)
    }

    fn eliminate(&self, row: &mut Row, limit: usize) {
        let mut cursor = 0;
        loop {
            let next = row.range(cursor..limit).find(|(c, _)| self.pivots.contains_key(c)).map(|(c, v)| (*c, v.clone()));
            let Some((c, v)) = next else { return };
            for (k, p) in &self.pivots[&c] {
                let e = row.entry(*k).or_insert_with(Q::zero);
                *e -= &v * p;
                if e.is_zero() {
                    row.remove(k);
                }
            }
            cursor = c + 1;
        }
    }

    fn insert(&mut self, mut row: Row) {
        self.eliminate(&mut row, usize::MAX);
        if let Some((&c, v)) = row.iter().next() {
            let inv = v.recip();
            for x in row.values_mut() {
                *x *= &inv;
            }
            self.pivots.insert(c, row);
        }
    }

    /// Reduces a combination; with `full` the relations among trees are
    /// used too, which only matters from order four on.
    fn reduce(&self, terms: &BTreeMap<Multigraph, Q>, full: bool) -> Result<Row, StochasticError> {
        let mut row = Row::new();
        for (g, c) in terms {
            let r = *self.rank.get(g).ok_or_else(|| StochasticError::Config("graph outside the relation closure".into()))?;
            let e = row.entry(r).or_insert_with(Q::zero);
            *e += c;
        }
        row.retain(|_, v| !v.is_zero());
        self.eliminate(&mut row, if full { usize::MAX } else { self.first_tree });
        Ok(row)
    }
}

/// Highest order handled by gradient elimination.
pub const MAX_ELI_ORDER: usize = 5;

fn reducer(order: usize) -> Result<Arc<Reducer>, StochasticError> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Reducer>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(r) = cache.lock().expect("cache poisoned").get(&order) {
        return Ok(r.clone());
    }
    if order > MAX_ELI_ORDER {
        return Err(StochasticError::Config(format!("gradient elimination is limited to order {MAX_ELI_ORDER}")));
    }
    let r = Arc::new(Reducer::build(order)?);
    cache.lock().expect("cache poisoned").insert(order, r.clone());
    Ok(r)
}

/// Gradient normal form of an F-weighted series: `trees` holds exotic trees
/// with a black root, `residual` what cannot be moved onto them.
pub fn eli_normalize_with(s: &ForestSeries, full: bool) -> Result<super::IbpNormalForm, StochasticError> {
    let mut by_order: BTreeMap<usize, BTreeMap<Multigraph, Q>> = BTreeMap::new();
    for (f, c) in s.iter() {
        let e = by_order.entry(f.order()).or_default().entry(Multigraph::from_forest(f)?).or_insert_with(Q::zero);
        *e += c;
    }
    let mut trees = ForestSeries::zero();
    let mut residual = ForestSeries::zero();
    for (n, terms) in by_order {
        let red = reducer(n)?;
        for (r, c) in red.reduce(&terms, full)? {
            let g = &red.graphs[r];
            let target = if g.is_tree_like() { &mut trees } else { &mut residual };
            target.add_term(g.to_forest(), c);
        }
    }
    Ok(super::IbpNormalForm { trees, residual })
}

/// [`eli_normalize_with`] keeping relations among trees unused, so that
/// exotic trees are fixed points.
pub fn eli_normalize(s: &ForestSeries) -> Result<super::IbpNormalForm, StochasticError> {
    eli_normalize_with(s, false)
}

/// Whether the F-weighted series is ∼ 0 for every gradient field.
pub fn is_equivalent_to_zero(s: &ForestSeries) -> Result<bool, StochasticError> {
    let nf = eli_normalize_with(s, true)?;
    Ok(nf.trees.is_zero() && nf.residual.is_zero())
}
