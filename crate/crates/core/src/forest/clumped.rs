//! Clumped forests: monomials of components that each keep their aromas.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Forest, ForestError};

/// Sorted multiset of clumps. A clump is a forest with at least one root
/// whose aromas are attached to it; a rootless clump only occurs alone.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ClumpedForest {
    comps: Vec<Forest>,
}

impl ClumpedForest {
    pub fn unit() -> Self {
        ClumpedForest { comps: Vec::new() }
    }

    pub fn new(mut comps: Vec<Forest>) -> Self {
        comps.retain(|c| !c.is_empty());
        comps.sort();
        ClumpedForest { comps }
    }

    pub fn single(f: Forest) -> Self {
        Self::new(vec![f])
    }

    /// Parses clumps separated by " . ".
    pub fn parse(text: &str) -> Result<Self, ForestError> {
        let t = text.trim();
        if t == "{}" || t.is_empty() {
            return Ok(Self::unit());
        }
        let comps = t.split(" . ").map(Forest::parse).collect::<Result<Vec<_>, _>>()?;
        Ok(Self::new(comps))
    }

    pub fn comps(&self) -> &[Forest] {
        &self.comps
    }

    pub fn len(&self) -> usize {
        self.comps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn order(&self) -> usize {
        self.comps.iter().map(Forest::order).sum()
    }

    /// Forgets the clumping.
    pub fn phi(&self) -> Forest {
        Forest::product(&self.comps)
    }

    pub fn mul(&self, other: &ClumpedForest) -> ClumpedForest {
        let mut c = self.comps.clone();
        c.extend(other.comps.iter().cloned());
        Self::new(c)
    }

    /// σ of the monomial: product of clump symmetries times the factorials of
    /// the clump multiplicities.
    pub fn sigma(&self) -> u64 {
        let mut s = 1u64;
        let mut i = 0;
        while i < self.comps.len() {
            let mut j = i;
            while j < self.comps.len() && self.comps[j] == self.comps[i] {
                j += 1;
            }
            for m in 1..=(j - i) as u64 {
                s *= m * self.comps[i].sigma();
            }
            i = j;
        }
        s
    }

    pub fn key(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for ClumpedForest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.comps.is_empty() {
            return f.write_str("{}");
        }
        let parts: Vec<&str> = self.comps.iter().map(Forest::key).collect();
        f.write_str(&parts.join(" . "))
    }
}

impl fmt::Debug for ClumpedForest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Clumped({self})")
    }
}

impl Serialize for ClumpedForest {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ClumpedForest {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        ClumpedForest::parse(&s).map_err(serde::de::Error::custom)
    }
}
