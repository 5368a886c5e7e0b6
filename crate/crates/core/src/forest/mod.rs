//! Canonical exotic aromatic forests.

mod canon;
mod clumped;
mod enumerate;
mod graph;
mod parse;
mod sigma;

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, OnceLock};

use dashmap::DashMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use clumped::ClumpedForest;
pub use enumerate::{enumerate, enumerate_with_bound, Filter, DEFAULT_BOUND};
pub use graph::{Deco, Graph};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ForestError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("liana label {label} occurs {count} times (expected 2)")]
    LianaCount { label: u32, count: usize },
    #[error("stolon endpoint has a successor")]
    StolonSuccessor,
    #[error("invalid forest: {0}")]
    Structure(String),
    #[error("order {requested} exceeds the enumeration bound {bound}")]
    BoundExceeded { requested: usize, bound: usize },
}

/// Size statistics of a forest.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grading {
    pub order: usize,
    pub num_roots: usize,
    pub num_black: usize,
    pub num_lianas: usize,
    pub num_stolons: usize,
    pub num_edges: usize,
}

struct Inner {
    key: String,
    graph: Graph,
    grading: Grading,
    sigma: OnceLock<u64>,
    exotic: OnceLock<Vec<Forest>>,
}

/// An immutable forest in canonical form. Equality, ordering and hashing go
/// through the canonical key.
#[derive(Clone)]
pub struct Forest(Arc<Inner>);

fn interned() -> &'static DashMap<String, Forest> {
    static MEMO: OnceLock<DashMap<String, Forest>> = OnceLock::new();
    MEMO.get_or_init(DashMap::new)
}

impl Forest {
    pub fn empty() -> Forest {
        Forest::from_graph(Graph::new()).expect("empty graph is valid")
    }

    /// The single black vertex.
    pub fn bullet() -> Forest {
        Forest::parse("b").expect("valid")
    }

    pub fn parse(text: &str) -> Result<Forest, ForestError> {
        let g = parse::parse_graph(text)?;
        Forest::from_graph(g)
    }

    /// Validates and canonicalizes a raw graph.
    pub fn from_graph(g: Graph) -> Result<Forest, ForestError> {
        g.validate()?;
        Ok(Forest::from_valid(g))
    }

    /// Canonicalizes a graph already known to be valid.
    pub(crate) fn from_valid(g: Graph) -> Forest {
        let raw = canon::render_raw(&g);
        let hit = interned().get(&raw).map(|r| r.clone());
        if let Some(f) = hit {
            return f;
        }
        let key = canon::canonical_key(&g);
        let hit = interned().get(&key).map(|r| r.clone());
        let f = if let Some(f) = hit {
            f
        } else {
            let graph = parse::parse_graph(&key).expect("canonical keys parse");
            let grading = grading_of(&graph);
            let f = Forest(Arc::new(Inner { key: key.clone(), graph, grading, sigma: OnceLock::new(), exotic: OnceLock::new() }));
            interned().entry(key).or_insert(f).clone()
        };
        interned().insert(raw, f.clone());
        f
    }

    pub fn key(&self) -> &str {
        &self.0.key
    }

    /// Canonical graph; vertex order follows the canonical key.
    pub fn graph(&self) -> &Graph {
        &self.0.graph
    }

    pub fn grading(&self) -> Grading {
        self.0.grading
    }

    pub fn order(&self) -> usize {
        self.0.grading.order
    }

    pub fn num_roots(&self) -> usize {
        self.0.grading.num_roots
    }

    pub fn is_empty(&self) -> bool {
        self.0.graph.is_empty()
    }

    pub fn sigma(&self) -> u64 {
        *self.0.sigma.get_or_init(|| sigma::automorphism_count(&self.0.graph))
    }

    /// Concatenation product.
    pub fn mul(&self, other: &Forest) -> Forest {
        let mut g = self.graph().clone();
        g.append(other.graph());
        Forest::from_valid(g)
    }

    pub fn product<'a, I: IntoIterator<Item = &'a Forest>>(it: I) -> Forest {
        let mut g = Graph::new();
        for f in it {
            g.append(f.graph());
        }
        Forest::from_valid(g)
    }

    fn split(&self, groups: Vec<Vec<usize>>) -> Vec<Forest> {
        let g = self.graph();
        let mut out: Vec<Forest> = groups
            .into_iter()
            .map(|vs| {
                let mut keep = vec![false; g.len()];
                for v in vs {
                    keep[v] = true;
                }
                Forest::from_valid(g.induced(&keep).0)
            })
            .collect();
        out.sort();
        out
    }

    /// Components joined by edges and stolons (trees, aromas, numbered roots).
    pub fn graph_components(&self) -> Vec<Forest> {
        self.split(self.graph().graph_components())
    }

    /// Components joined by edges, stolons and lianas.
    pub fn exotic_components(&self) -> Vec<Forest> {
        self.0.exotic.get_or_init(|| self.split(self.graph().exotic_components())).clone()
    }

    /// Exotic components carrying no root.
    pub fn is_aroma(&self) -> bool {
        self.num_roots() == 0 && !self.is_empty()
    }

    /// Product of the rootless exotic components and of the rest.
    pub fn split_aromas(&self) -> (Forest, Forest) {
        let (a, r): (Vec<Forest>, Vec<Forest>) =
            self.exotic_components().into_iter().partition(|c| c.num_roots() == 0);
        (Forest::product(&a), Forest::product(&r))
    }

    /// No cycles and no stolons: every graph component is rooted.
    pub fn is_aroma_free(&self) -> bool {
        let g = self.graph();
        g.count_stolons() == 0 && !g.cycle_flags().iter().any(|&c| c)
    }

    /// Exactly one root, which is black, and no aromas.
    pub fn is_black_rooted_tree(&self) -> bool {
        let g = self.graph();
        let roots = g.roots();
        roots.len() == 1 && g.deco[roots[0]] == Deco::Black && self.is_aroma_free()
    }

    /// Every vertex black or numbered.
    pub fn is_exotic(&self) -> bool {
        self.graph().deco.iter().all(|d| !matches!(d, Deco::Letter(_)))
    }

    pub fn has_decoration(&self, c: char) -> bool {
        self.graph().deco.iter().any(|d| d.letter() == Some(c))
    }
}

fn grading_of(g: &Graph) -> Grading {
    let lianas = g.count_liana_halves() / 2;
    let stolons = g.count_stolons();
    Grading {
        order: g.count_solid() + lianas - stolons,
        num_roots: g.roots().len(),
        num_black: g.count_black(),
        num_lianas: lianas,
        num_stolons: stolons,
        num_edges: g.count_edges(),
    }
}

impl PartialEq for Forest {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.key == other.0.key
    }
}

impl Eq for Forest {}

impl Hash for Forest {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.key.hash(state)
    }
}

impl PartialOrd for Forest {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Graded order: by order first, then by key.
impl Ord for Forest {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order().cmp(&other.order()).then_with(|| self.0.key.cmp(&other.0.key))
    }
}

impl fmt::Display for Forest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.key)
    }
}

impl fmt::Debug for Forest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Forest({})", self.0.key)
    }
}

impl std::str::FromStr for Forest {
    type Err = ForestError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Forest::parse(s)
    }
}

impl Serialize for Forest {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.key())
    }
}

impl<'de> Deserialize<'de> for Forest {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Forest::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// JSON export record.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ForestRecord {
    pub forest: String,
    pub order: usize,
    pub sigma: u64,
}

impl From<&Forest> for ForestRecord {
    fn from(f: &Forest) -> Self {
        ForestRecord { forest: f.key().to_string(), order: f.order(), sigma: f.sigma() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(s: &str) -> Forest {
        Forest::parse(s).unwrap()
    }

    #[test]
    fn identical_renderings() {
        assert_eq!(f("(b[b[3],1,1]),b[b[2],b[2,3]]"), f("(b[b[2],3,3]),b[b[1],b[1,2]]"));
        assert_eq!(f("b[1,1,2,2]"), f("b[2,2,1,1]"));
        assert_eq!(f("(b,b[b])"), f("(b[b],b)"));
        assert_ne!(f("(b[b],b,b)"), f("(b,b[b[b]])"));
    }

    #[test]
    fn gradings() {
        assert_eq!(f("b=b").order(), 1);
        assert_eq!(f("b=b,b").order(), 2);
        assert_eq!(f("{}").order(), 0);
        let g = f("b[1,1,2,b[2]]").grading();
        assert_eq!((g.order, g.num_roots, g.num_black, g.num_lianas), (4, 1, 2, 2));
        assert_eq!(f("(b),b").num_roots(), 1);
        assert_eq!(f("(b)").num_roots(), 0);
    }

    #[test]
    fn sigma_values() {
        assert_eq!(f("b[b,b]").sigma(), 2);
        assert_eq!(f("1,1").sigma(), 2);
        assert_eq!(f("b[1,1]").sigma(), 2);
        assert_eq!(f("1,1,2,2").sigma(), 8);
        assert_eq!(f("b=b").sigma(), 2);
        assert_eq!(f("(b,b)").sigma(), 2);
        assert_eq!(f("(b,b,b)").sigma(), 3);
        assert_eq!(f("{}").sigma(), 1);
        assert_eq!(f("b[b[1],b[1]]").sigma(), 2);
    }

    #[test]
    fn components() {
        let p = f("(b[1]),b[1,b],b,(b)");
        assert_eq!(p.graph_components().len(), 4);
        assert_eq!(p.exotic_components().len(), 3);
        let (a, r) = p.split_aromas();
        assert_eq!(a, f("(b)"));
        assert_eq!(r, f("(b[1]),b[1,b],b"));
    }

    #[test]
    fn rejects_malformed() {
        assert!(matches!(Forest::parse("b[1]"), Err(ForestError::LianaCount { .. })));
        assert!(matches!(Forest::parse("b[1,1,1]"), Err(ForestError::LianaCount { .. })));
        assert!(matches!(Forest::parse("b[b"), Err(ForestError::Syntax { .. })));
        assert!(Forest::parse("1=b").is_err());
    }
}
