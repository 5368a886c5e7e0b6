//! CEM coaction, the substitution action it is dual to, and the clumping
//! maps Φ and Φ*.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use itertools::Itertools;
use num_traits::{One, Zero};

use super::{memo, tuples};
use crate::forest::{ClumpedForest, Deco, Forest, Graph};
use crate::series::{q, ClumpedSeries, ForestSeries, Graded, Q, TensorSeries};

/// Monomial of clumped forests indexed by target decoration: the left
/// factor of the decorated coaction (Π_d p_d ι_d).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct DecoClumps(pub BTreeMap<char, ClumpedForest>);

impl Graded for DecoClumps {
    fn order(&self) -> usize {
        self.0.values().map(ClumpedForest::order).sum()
    }
}

impl fmt::Display for DecoClumps {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("{}");
        }
        let parts: Vec<String> = self.0.iter().map(|(d, p)| format!("({p}) ι_{d}")).collect();
        f.write_str(&parts.join(" · "))
    }
}

/// One contraction: clumps with their target decoration, and the quotient.
struct Contraction {
    blocks: Vec<(Deco, Forest)>,
    quotient: Forest,
}

struct Union(Vec<usize>);

impl Union {
    fn new(n: usize) -> Self {
        Union((0..n).collect())
    }
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        self.0[x] = r;
        r
    }
    fn unite(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Per-vertex state of a partial configuration.
#[derive(Clone)]
struct State {
    in_block: Vec<bool>,
    int_edge: Vec<bool>,
    int_stolon: Vec<bool>,
}

enum Slot {
    /// Edge v → succ(v) between two covered vertices.
    Edge(usize),
    /// Stolon between two covered vertices.
    Stolon(usize, usize),
    /// Liana pair.
    Liana(usize, usize),
}

struct Cem<'a> {
    g: &'a Graph,
    covered: Vec<bool>,
    targets: &'a [Deco],
    partner: Vec<Option<usize>>,
    out: Vec<Contraction>,
}

impl Cem<'_> {
    fn rho(&self, s: &State, v: usize) -> bool {
        s.in_block[v] && !s.int_edge[v] && !s.int_stolon[v]
    }

    fn liana_options(&self, v: usize) -> Vec<bool> {
        // false: block root of its piece, true: attached to its successor.
        let mut o = vec![false];
        if let Some(s) = self.g.succ[v] {
            if self.covered[s] {
                o.push(true);
            }
        }
        o
    }

    fn search(&mut self, slots: &[Slot], i: usize, s: &mut State) {
        if i == slots.len() {
            self.finish(s);
            return;
        }
        match slots[i] {
            Slot::Edge(v) => {
                for int in [true, false] {
                    s.int_edge[v] = int;
                    self.search(slots, i + 1, s);
                }
                s.int_edge[v] = false;
            }
            Slot::Stolon(v, w) => {
                for int in [true, false] {
                    s.int_stolon[v] = int;
                    s.int_stolon[w] = int;
                    self.search(slots, i + 1, s);
                }
                s.int_stolon[v] = false;
                s.int_stolon[w] = false;
            }
            Slot::Liana(a, b) => {
                self.search(slots, i + 1, s);
                let (oa, ob) = (self.liana_options(a), self.liana_options(b));
                s.in_block[a] = true;
                s.in_block[b] = true;
                for &x in &oa {
                    for &y in &ob {
                        s.int_edge[a] = x;
                        s.int_edge[b] = y;
                        self.search(slots, i + 1, s);
                    }
                }
                s.in_block[a] = false;
                s.in_block[b] = false;
                s.int_edge[a] = false;
                s.int_edge[b] = false;
            }
        }
    }

    fn finish(&mut self, s: &State) {
        let g = self.g;
        let n = g.len();
        let mut pieces = Union::new(n);
        for v in 0..n {
            if s.int_edge[v] {
                pieces.unite(v, g.succ[v].unwrap());
            }
            if s.int_stolon[v] {
                pieces.unite(v, g.stolon[v].unwrap());
            }
        }
        let mut rooted = vec![false; n];
        for v in 0..n {
            if self.rho(s, v) {
                let p = pieces.find(v);
                debug_assert!(!rooted[p]);
                rooted[p] = true;
            }
        }
        // Pieces tied by lianas must share a block.
        let mut classes = Union::new(n);
        for v in 0..n {
            if s.in_block[v] {
                let p = pieces.find(v);
                classes.unite(v, p);
                if let Some(w) = self.partner[v] {
                    classes.unite(v, w);
                }
            }
        }
        let mut class_rooted: BTreeMap<usize, usize> = BTreeMap::new();
        let mut members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for v in 0..n {
            if !s.in_block[v] {
                continue;
            }
            let c = classes.find(v);
            members.entry(c).or_default().push(v);
            let e = class_rooted.entry(c).or_insert(0);
            if self.rho(s, v) {
                *e += 1;
            }
        }
        if class_rooted.values().any(|&k| k > 1) {
            return;
        }
        let blocks: Vec<usize> = class_rooted.iter().filter(|(_, &k)| k == 1).map(|(&c, _)| c).collect();
        let free: Vec<usize> = class_rooted.iter().filter(|(_, &k)| k == 0).map(|(&c, _)| c).collect();
        if blocks.is_empty() && !free.is_empty() {
            return;
        }
        let nb = blocks.len();
        for assign in tuples(&vec![nb; free.len()]) {
            let mut block_of = vec![usize::MAX; n];
            let mut has_cov = vec![false; nb];
            for (bi, c) in blocks.iter().enumerate() {
                for &v in &members[c] {
                    block_of[v] = bi;
                }
            }
            for (fi, c) in free.iter().enumerate() {
                for &v in &members[c] {
                    block_of[v] = assign[fi];
                }
            }
            for v in 0..n {
                if block_of[v] != usize::MAX && self.covered[v] {
                    has_cov[block_of[v]] = true;
                }
            }
            if has_cov.iter().any(|&h| !h) {
                continue;
            }
            for ti in tuples(&vec![self.targets.len(); nb]) {
                let tg: Vec<Deco> = ti.iter().map(|&i| self.targets[i]).collect();
                if let Some(c) = self.build(s, &block_of, &tg) {
                    self.out.push(c);
                }
            }
        }
    }

    fn build(&self, s: &State, block_of: &[usize], targets: &[Deco]) -> Option<Contraction> {
        let g = self.g;
        let n = g.len();
        let nb = targets.len();
        let mut q = Graph::new();
        let mut node = vec![0usize; n];
        for &t in targets {
            q.add(t, None);
        }
        for v in 0..n {
            if block_of[v] == usize::MAX {
                node[v] = q.add(g.deco[v], None);
            } else {
                node[v] = block_of[v];
            }
        }
        for v in 0..n {
            let outside = block_of[v] == usize::MAX;
            if outside || self.rho(s, v) {
                if let Some(t) = g.succ[v] {
                    q.succ[node[v]] = Some(node[t]);
                }
                if let Some(w) = g.stolon[v] {
                    if v < w {
                        q.link_stolon(node[v], node[w]);
                    }
                }
            }
        }
        let quotient = Forest::from_graph(q).ok()?;
        let mut blocks = Vec::with_capacity(nb);
        for (b, &t) in targets.iter().enumerate() {
            let verts: Vec<usize> = (0..n).filter(|&v| block_of[v] == b).collect();
            let mut idx = vec![usize::MAX; n];
            let mut c = Graph::new();
            for &v in &verts {
                idx[v] = c.add(g.deco[v], None);
            }
            for &v in &verts {
                if s.int_edge[v] {
                    c.succ[idx[v]] = Some(idx[g.succ[v].unwrap()]);
                }
                if s.int_stolon[v] {
                    c.stolon[idx[v]] = Some(idx[g.stolon[v].unwrap()]);
                }
            }
            blocks.push((t, Forest::from_graph(c).ok()?));
        }
        Some(Contraction { blocks, quotient })
    }
}

fn contractions(f: &Forest, covered: impl Fn(Deco) -> bool, targets: &[Deco]) -> Vec<Contraction> {
    let g = f.graph();
    let n = g.len();
    let cov: Vec<bool> = g.deco.iter().map(|&d| !d.is_liana() && covered(d)).collect();
    let partner = g.partners();
    let mut slots = Vec::new();
    for v in 0..n {
        if cov[v] {
            if let Some(t) = g.succ[v] {
                if cov[t] {
                    slots.push(Slot::Edge(v));
                }
            }
            if let Some(w) = g.stolon[v] {
                if v < w && cov[w] {
                    slots.push(Slot::Stolon(v, w));
                }
            }
        }
        if let Some(w) = partner[v] {
            if v < w {
                slots.push(Slot::Liana(v, w));
            }
        }
    }
    let mut st = State { in_block: cov.clone(), int_edge: vec![false; n], int_stolon: vec![false; n] };
    let mut cem = Cem { g, covered: cov, targets, partner, out: Vec::new() };
    cem.search(&slots, 0, &mut st);
    cem.out
}

/// Δ_CEM(π) = Σ p ⊗ π/p over clumped subforests p covering every black vertex.
pub fn cem_coaction(f: &Forest) -> Arc<TensorSeries<ClumpedForest>> {
    memo("cem", f, |f| {
        let mut t = TensorSeries::zero();
        for c in contractions(f, |d| d == Deco::Black, &[Deco::Black]) {
            let left = ClumpedForest::new(c.blocks.into_iter().map(|(_, b)| b).collect());
            t.add_term((left, c.quotient), Q::one());
        }
        if t.is_zero() {
            t.add_term((ClumpedForest::unit(), f.clone()), Q::one());
        }
        t
    })
}

/// Δ̃_CEM(π) = Δ_CEM(π) − •^n ⊗ π − π ⊗ •, the last term only for forests
/// with a single root.
pub fn cem_reduced(f: &Forest) -> Arc<TensorSeries<ClumpedForest>> {
    memo("cem-reduced", f, |f| {
        let mut t = (*cem_coaction(f)).clone();
        let nb = f.grading().num_black;
        let bullets = ClumpedForest::new(vec![Forest::bullet(); nb]);
        t.add_term((bullets, f.clone()), -Q::one());
        if f.num_roots() == 1 {
            t.add_term((ClumpedForest::single(f.clone()), Forest::bullet()), -Q::one());
        }
        t
    })
}

/// Coaction substituting every solid vertex by trees clumped under one of
/// the `targets` decorations.
pub fn cem_decorated(f: &Forest, targets: &[char]) -> TensorSeries<DecoClumps> {
    let tg: Vec<Deco> = targets.iter().map(|&c| Deco::from_letter(c)).collect();
    let mut t = TensorSeries::zero();
    for c in contractions(f, |d| d.is_solid(), &tg) {
        let mut by: BTreeMap<char, Vec<Forest>> = BTreeMap::new();
        for (d, b) in c.blocks {
            by.entry(d.letter().unwrap()).or_default().push(b);
        }
        let left = DecoClumps(by.into_iter().map(|(d, v)| (d, ClumpedForest::new(v))).collect());
        t.add_term((left, c.quotient), Q::one());
    }
    if t.is_zero() {
        t.add_term((DecoClumps::default(), f.clone()), Q::one());
    }
    t
}

/// Substitutes the vertices of `f` decorated by each key of `clumps` by the
/// listed trees, summing over bijections and over the ways edges re-attach.
fn substitute_general(clumps: &BTreeMap<Deco, Vec<Forest>>, f: &Forest) -> ForestSeries {
    let g = f.graph();
    let n = g.len();
    let mut slots: BTreeMap<Deco, Vec<usize>> = BTreeMap::new();
    for v in 0..n {
        if clumps.contains_key(&g.deco[v]) {
            slots.entry(g.deco[v]).or_default().push(v);
        }
    }
    for (d, cs) in clumps {
        let k = slots.get(d).map_or(0, Vec::len);
        if cs.len() != k {
            return ForestSeries::zero();
        }
        if cs.iter().any(|c| c.num_roots() != 1) {
            return ForestSeries::zero();
        }
    }
    let decos: Vec<Deco> = slots.keys().copied().collect();
    let perms: Vec<Vec<Vec<usize>>> = decos
        .iter()
        .map(|d| {
            let k = slots[d].len();
            (0..k).permutations(k).collect()
        })
        .collect();
    let sizes: Vec<usize> = perms.iter().map(Vec::len).collect();
    let mut out = ForestSeries::zero();
    for pick in tuples(&sizes) {
        let choice: Vec<&Vec<usize>> = pick.iter().enumerate().map(|(i, &j)| &perms[i][j]).collect();
        let mut assigned: Vec<Option<&Forest>> = vec![None; n];
        for (di, perm) in choice.iter().enumerate() {
            let d = decos[di];
            for (j, &v) in slots[&d].iter().enumerate() {
                assigned[v] = Some(&clumps[&d][perm[j]]);
            }
        }
        substitute_one(g, &assigned, &mut out);
    }
    out
}

fn substitute_one(g: &Graph, assigned: &[Option<&Forest>], out: &mut ForestSeries) {
    let n = g.len();
    let mut h = Graph::new();
    let mut root = vec![0usize; n];
    let mut solid: Vec<Vec<usize>> = vec![Vec::new(); n];
    for v in 0..n {
        if let Some(t) = assigned[v] {
            let off = h.append(t.graph());
            let tg = t.graph();
            root[v] = off + tg.roots()[0];
            solid[v] = (0..tg.len()).filter(|&x| tg.deco[x].is_solid()).map(|x| x + off).collect();
        }
    }
    let keep: Vec<bool> = (0..n).map(|v| assigned[v].is_none()).collect();
    let (rest, idx) = g.induced(&keep);
    let off = h.append(&rest);
    for v in 0..n {
        if let Some(i) = idx[v] {
            root[v] = off + i;
            solid[v] = vec![off + i];
        }
    }
    for v in 0..n {
        if let Some(w) = g.stolon[v] {
            if v < w {
                let (a, b) = (root[v], root[w]);
                if h.deco[a].is_liana() || h.deco[b].is_liana() {
                    return;
                }
                h.stolon[a] = None;
                h.stolon[b] = None;
                h.link_stolon(a, b);
            }
        }
    }
    let edges: Vec<usize> = (0..n).filter(|&v| g.succ[v].is_some()).collect();
    let options: Vec<&Vec<usize>> = edges.iter().map(|&v| &solid[g.succ[v].unwrap()]).collect();
    let sizes: Vec<usize> = options.iter().map(|o| o.len()).collect();
    for pick in tuples(&sizes) {
        let mut k = h.clone();
        for (j, &e) in edges.iter().enumerate() {
            k.succ[root[e]] = Some(options[j][pick[j]]);
        }
        if let Ok(f) = Forest::from_graph(k) {
            out.add_term(f, Q::one());
        }
    }
}

/// The substitution action p ▷ π: black vertices of π are replaced by the
/// clumps of p; zero unless the counts agree.
pub fn substitute_action(p: &ClumpedForest, f: &Forest) -> ForestSeries {
    let mut m = BTreeMap::new();
    m.insert(Deco::Black, p.comps().to_vec());
    substitute_general(&m, f)
}

/// Decorated substitution action: each p_d replaces the vertices decorated d.
pub fn substitute_action_decorated(p: &DecoClumps, f: &Forest) -> ForestSeries {
    let m = p.0.iter().map(|(&d, c)| (Deco::from_letter(d), c.comps().to_vec())).collect();
    substitute_general(&m, f)
}

/// Φ*(π): every aroma is attached to one of the rooted connected components
/// in all possible ways. A forest without roots stays a single clump.
pub fn phi_star(f: &Forest) -> ClumpedSeries {
    let comps = f.exotic_components();
    let (aromas, rooted): (Vec<Forest>, Vec<Forest>) = comps.into_iter().partition(|c| c.num_roots() == 0);
    let mut out = ClumpedSeries::zero();
    if f.is_empty() {
        out.add_term(ClumpedForest::unit(), Q::one());
        return out;
    }
    if rooted.is_empty() {
        out.add_term(ClumpedForest::single(f.clone()), Q::one());
        return out;
    }
    for m in tuples(&vec![rooted.len(); aromas.len()]) {
        let mut parts: Vec<Vec<&Forest>> = rooted.iter().map(|r| vec![r]).collect();
        for (a, &r) in m.iter().enumerate() {
            parts[r].push(&aromas[a]);
        }
        let clumps = parts.into_iter().map(Forest::product).collect();
        out.add_term(ClumpedForest::new(clumps), Q::one());
    }
    out
}

/// a_C(p) = a(Φ(p)) / n^m with n rooted clumps and m aromas.
pub fn clumped_value(a: impl Fn(&Forest) -> Q, p: &ClumpedForest) -> Q {
    let phi = p.phi();
    let v = a(&phi);
    if v.is_zero() {
        return v;
    }
    let n = p.comps().iter().filter(|c| c.num_roots() > 0).count() as i64;
    let m = phi.exotic_components().iter().filter(|c| c.num_roots() == 0).count() as u32;
    if n == 0 {
        return v;
    }
    v * q(1, n.pow(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::qi;

    fn f(s: &str) -> Forest {
        Forest::parse(s).unwrap()
    }

    fn c(s: &str) -> ClumpedForest {
        ClumpedForest::parse(s).unwrap()
    }

    #[test]
    fn cem_small() {
        let d = cem_coaction(&f("b"));
        assert_eq!(d.len(), 1);
        assert_eq!(d.coeff(&(c("b"), f("b"))), qi(1));
        let d = cem_coaction(&f("b[b]"));
        assert_eq!(d.len(), 2);
        assert_eq!(d.coeff(&(c("b . b"), f("b[b]"))), qi(1));
        let d = cem_coaction(&f("1,1"));
        assert_eq!(d.coeff(&(c("{}"), f("1,1"))), qi(1));
        let d = cem_coaction(&f("(b),b"));
        assert_eq!(d.len(), 2);
    }

    #[test]
    fn aroma_goes_to_either_rooted_component() {
        let d = cem_coaction(&f("(b),b[1],1,b"));
        assert_eq!(d.coeff(&(c("(b),b . b"), f("b[1],1,b"))), qi(2));
        assert_eq!(d.coeff(&(c("b . b . b"), f("(b),b[1],1,b"))), qi(1));
        assert_eq!(d.len(), 2);
    }

    #[test]
    fn action_counts() {
        assert_eq!(substitute_action(&c("b"), &f("b")).coeff(&f("b")), qi(1));
        assert!(substitute_action(&c("b . b"), &f("b")).is_zero());
        let s = substitute_action(&c("b . b"), &f("b[b]"));
        assert_eq!(s.coeff(&f("b[b]")), qi(2));
        assert_eq!(s.coeff(&f("b,b")), qi(0));
    }

    #[test]
    fn phi_star_counts() {
        let p = phi_star(&f("(b),b=b,b,b[b]"));
        assert_eq!(p.len(), 4);
        assert!(p.iter().all(|(_, v)| *v == qi(1)));
        let p = phi_star(&f("(b),b,b"));
        assert_eq!(p.coeff(&c("(b),b . b")), qi(2));
        assert_eq!(clumped_value(|_| qi(1), &c("(b),b . b")), q(1, 2));
    }
}
