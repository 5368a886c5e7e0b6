//! Automorphism counting by backtracking.

use std::collections::HashMap;

use super::graph::{Deco, Graph};

fn class(d: Deco) -> (u8, char) {
    match d {
        Deco::Black => (0, 'b'),
        Deco::Letter(c) => (1, c),
        Deco::Liana(_) => (2, ' '),
    }
}

/// Stable colouring by iterated refinement over successor, predecessors,
/// stolon and liana partner.
fn refine(g: &Graph, preds: &[Vec<usize>], partner: &[Option<usize>], on_cycle: &[bool]) -> Vec<usize> {
    let n = g.len();
    let mut col: Vec<usize> = {
        let init: Vec<_> = (0..n)
            .map(|v| (class(g.deco[v]), preds[v].len(), g.succ[v].is_some(), g.stolon[v].is_some(), on_cycle[v]))
            .collect();
        compress(&init)
    };
    loop {
        let sig: Vec<_> = (0..n)
            .map(|v| {
                let mut pc: Vec<usize> = preds[v].iter().map(|&p| col[p]).collect();
                pc.sort_unstable();
                (
                    col[v],
                    g.succ[v].map(|s| col[s]),
                    g.stolon[v].map(|s| col[s]),
                    partner[v].map(|s| col[s]),
                    pc,
                )
            })
            .collect();
        let next = compress(&sig);
        let stable = count_distinct(&next) == count_distinct(&col);
        col = next;
        if stable {
            return col;
        }
    }
}

fn compress<T: Ord + Clone + std::hash::Hash>(xs: &[T]) -> Vec<usize> {
    let mut sorted: Vec<T> = xs.to_vec();
    sorted.sort();
    sorted.dedup();
    let idx: HashMap<&T, usize> = sorted.iter().enumerate().map(|(i, x)| (x, i)).collect();
    xs.iter().map(|x| idx[x]).collect()
}

fn count_distinct(xs: &[usize]) -> usize {
    let mut v = xs.to_vec();
    v.sort_unstable();
    v.dedup();
    v.len()
}

struct Search<'a> {
    g: &'a Graph,
    partner: &'a [Option<usize>],
    col: Vec<usize>,
    order: Vec<usize>,
    image: Vec<Option<usize>>,
    used: Vec<bool>,
    count: u64,
}

impl Search<'_> {
    fn rel(x: Option<usize>, y: usize) -> bool {
        x == Some(y)
    }

    fn consistent(&self, v: usize, w: usize) -> bool {
        let g = self.g;
        for (u, x) in self.image.iter().enumerate() {
            let Some(x) = *x else { continue };
            let pairs = [
                (Self::rel(g.succ[v], u), Self::rel(g.succ[w], x)),
                (Self::rel(g.succ[u], v), Self::rel(g.succ[x], w)),
                (Self::rel(g.stolon[v], u), Self::rel(g.stolon[w], x)),
                (Self::rel(self.partner[v], u), Self::rel(self.partner[w], x)),
            ];
            if pairs.iter().any(|(a, b)| a != b) {
                return false;
            }
        }
        Self::rel(g.succ[v], v) == Self::rel(g.succ[w], w)
    }

    fn go(&mut self, depth: usize) {
        if depth == self.order.len() {
            self.count += 1;
            return;
        }
        let v = self.order[depth];
        for w in 0..self.g.len() {
            if self.used[w] || self.col[w] != self.col[v] || !self.consistent(v, w) {
                continue;
            }
            self.image[v] = Some(w);
            self.used[w] = true;
            self.go(depth + 1);
            self.image[v] = None;
            self.used[w] = false;
        }
    }
}

/// Order of the automorphism group.
pub(crate) fn automorphism_count(g: &Graph) -> u64 {
    let n = g.len();
    if n == 0 {
        return 1;
    }
    let preds = g.preds();
    let partner = g.partners();
    let col = refine(g, &preds, &partner, &g.cycle_flags());
    // Breadth-first order so that each new vertex is linked to assigned ones.
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut nb: Vec<usize> = preds[v].clone();
            nb.extend(g.succ[v]);
            nb.extend(g.stolon[v]);
            nb.extend(partner[v]);
            for u in nb {
                if !seen[u] {
                    seen[u] = true;
                    queue.push_back(u);
                }
            }
        }
    }
    let mut s = Search { g, partner: &partner, col, order, image: vec![None; n], used: vec![false; n], count: 0 };
    s.go(0);
    s.count
}
