//! Raw, mutable forest graphs.
//!
//! A [`Graph`] is the working representation used while building forests:
//! every vertex has at most one successor, an optional stolon partner, and a
//! decoration. Liana pairs are implicit: the two vertices carrying the same
//! [`Deco::Liana`] label.

use std::collections::BTreeMap;

use super::ForestError;

/// Vertex decoration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Deco {
    Black,
    /// Extra colour from the open alphabet (`w`, ...). Never `b`.
    Letter(char),
    /// One half of a liana; the label pairs it with its partner.
    Liana(u32),
}

impl Deco {
    pub fn is_liana(self) -> bool {
        matches!(self, Deco::Liana(_))
    }

    /// Vertices that can receive edges (everything except liana halves).
    pub fn is_solid(self) -> bool {
        !self.is_liana()
    }

    pub fn from_letter(c: char) -> Deco {
        if c == 'b' {
            Deco::Black
        } else {
            Deco::Letter(c)
        }
    }

    pub fn letter(self) -> Option<char> {
        match self {
            Deco::Black => Some('b'),
            Deco::Letter(c) => Some(c),
            Deco::Liana(_) => None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Graph {
    pub deco: Vec<Deco>,
    pub succ: Vec<Option<usize>>,
    pub stolon: Vec<Option<usize>>,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.deco.len()
    }

    pub fn is_empty(&self) -> bool {
        self.deco.is_empty()
    }

    pub fn add(&mut self, deco: Deco, succ: Option<usize>) -> usize {
        self.deco.push(deco);
        self.succ.push(succ);
        self.stolon.push(None);
        self.deco.len() - 1
    }

    pub fn link_stolon(&mut self, a: usize, b: usize) {
        self.stolon[a] = Some(b);
        self.stolon[b] = Some(a);
    }

    pub fn preds(&self) -> Vec<Vec<usize>> {
        let mut p = vec![Vec::new(); self.len()];
        for (v, s) in self.succ.iter().enumerate() {
            if let Some(s) = s {
                p[*s].push(v);
            }
        }
        p
    }

    pub fn is_root(&self, v: usize) -> bool {
        self.succ[v].is_none() && self.stolon[v].is_none()
    }

    pub fn roots(&self) -> Vec<usize> {
        (0..self.len()).filter(|&v| self.is_root(v)).collect()
    }

    pub fn max_label(&self) -> u32 {
        self.deco
            .iter()
            .filter_map(|d| match d {
                Deco::Liana(l) => Some(*l),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }

    pub fn liana_groups(&self) -> BTreeMap<u32, Vec<usize>> {
        let mut m: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for (v, d) in self.deco.iter().enumerate() {
            if let Deco::Liana(l) = d {
                m.entry(*l).or_default().push(v);
            }
        }
        m
    }

    /// Partner of every liana half (`None` for other vertices).
    pub fn partners(&self) -> Vec<Option<usize>> {
        let mut p = vec![None; self.len()];
        for vs in self.liana_groups().values() {
            if vs.len() == 2 {
                p[vs[0]] = Some(vs[1]);
                p[vs[1]] = Some(vs[0]);
            }
        }
        p
    }

    pub fn count_black(&self) -> usize {
        self.deco.iter().filter(|d| **d == Deco::Black).count()
    }

    pub fn count_solid(&self) -> usize {
        self.deco.iter().filter(|d| d.is_solid()).count()
    }

    pub fn count_liana_halves(&self) -> usize {
        self.deco.iter().filter(|d| d.is_liana()).count()
    }

    pub fn count_stolons(&self) -> usize {
        self.stolon.iter().filter(|s| s.is_some()).count() / 2
    }

    pub fn count_edges(&self) -> usize {
        self.succ.iter().filter(|s| s.is_some()).count()
    }

    /// Shift every liana label by `by`.
    pub fn shift_labels(&mut self, by: u32) {
        for d in &mut self.deco {
            if let Deco::Liana(l) = d {
                *l += by;
            }
        }
    }

    /// Disjoint union; the liana labels of `other` are shifted past ours.
    /// Returns the index offset of `other`'s vertices.
    pub fn append(&mut self, other: &Graph) -> usize {
        let off = self.len();
        let shift = self.max_label();
        for v in 0..other.len() {
            let d = match other.deco[v] {
                Deco::Liana(l) => Deco::Liana(l + shift),
                d => d,
            };
            self.deco.push(d);
            self.succ.push(other.succ[v].map(|s| s + off));
            self.stolon.push(other.stolon[v].map(|s| s + off));
        }
        off
    }

    /// Subgraph on the kept vertices. Successor links leaving the kept set are
    /// cut; stolon links leaving it are dropped as well.
    pub fn induced(&self, keep: &[bool]) -> (Graph, Vec<Option<usize>>) {
        let mut idx = vec![None; self.len()];
        let mut g = Graph::new();
        for v in 0..self.len() {
            if keep[v] {
                idx[v] = Some(g.add(self.deco[v], None));
            }
        }
        for v in 0..self.len() {
            if let Some(nv) = idx[v] {
                g.succ[nv] = self.succ[v].and_then(|s| idx[s]);
                g.stolon[nv] = self.stolon[v].and_then(|s| idx[s]);
            }
        }
        (g, idx)
    }

    fn union_find(&self, lianas: bool) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let nx = p[y];
                p[y] = r;
                y = nx;
            }
            r
        }
        let unite = |p: &mut Vec<usize>, a: usize, b: usize| {
            let (ra, rb) = (find(p, a), find(p, b));
            if ra != rb {
                p[ra.max(rb)] = ra.min(rb);
            }
        };
        for v in 0..n {
            if let Some(s) = self.succ[v] {
                unite(&mut parent, v, s);
            }
            if let Some(s) = self.stolon[v] {
                unite(&mut parent, v, s);
            }
        }
        if lianas {
            for vs in self.liana_groups().values() {
                for w in vs.windows(2) {
                    unite(&mut parent, w[0], w[1]);
                }
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for v in 0..n {
            let r = find(&mut parent, v);
            groups.entry(r).or_default().push(v);
        }
        groups.into_values().collect()
    }

    /// Components linked by edges and stolons only.
    pub fn graph_components(&self) -> Vec<Vec<usize>> {
        self.union_find(false)
    }

    /// Components linked by edges, stolons and liana pairs.
    pub fn exotic_components(&self) -> Vec<Vec<usize>> {
        self.union_find(true)
    }

    /// Vertices lying on a cycle of successor links.
    pub fn cycle_flags(&self) -> Vec<bool> {
        let n = self.len();
        let mut state = vec![0u8; n];
        let mut on = vec![false; n];
        for start in 0..n {
            if state[start] != 0 {
                continue;
            }
            let mut path = Vec::new();
            let mut v = Some(start);
            while let Some(x) = v {
                if state[x] == 2 {
                    break;
                }
                if state[x] == 1 {
                    let pos = path.iter().position(|&y| y == x).unwrap();
                    for &y in &path[pos..] {
                        on[y] = true;
                    }
                    break;
                }
                state[x] = 1;
                path.push(x);
                v = self.succ[x];
            }
            for y in path {
                state[y] = 2;
            }
        }
        on
    }

    pub fn validate(&self) -> Result<(), ForestError> {
        let n = self.len();
        if self.succ.len() != n || self.stolon.len() != n {
            return Err(ForestError::Structure("inconsistent vertex arrays".into()));
        }
        for (l, vs) in self.liana_groups() {
            if vs.len() != 2 {
                return Err(ForestError::LianaCount { label: l, count: vs.len() });
            }
        }
        let preds = self.preds();
        for v in 0..n {
            if let Some(s) = self.succ[v] {
                if s >= n {
                    return Err(ForestError::Structure("successor out of range".into()));
                }
                if self.deco[s].is_liana() {
                    return Err(ForestError::Structure("liana vertex with a predecessor".into()));
                }
            }
            if let Some(p) = self.stolon[v] {
                if p >= n || p == v || self.stolon[p] != Some(v) {
                    return Err(ForestError::Structure("malformed stolon".into()));
                }
                if self.succ[v].is_some() {
                    return Err(ForestError::StolonSuccessor);
                }
                if self.deco[v].is_liana() {
                    return Err(ForestError::Structure("stolon on a liana vertex".into()));
                }
            }
            if self.deco[v].is_liana() && !preds[v].is_empty() {
                return Err(ForestError::Structure("liana vertex with a predecessor".into()));
            }
            if let Deco::Letter(c) = self.deco[v] {
                if c == 'b' || !c.is_ascii_lowercase() {
                    return Err(ForestError::Structure(format!("bad decoration {c:?}")));
                }
            }
        }
        Ok(())
    }
}
