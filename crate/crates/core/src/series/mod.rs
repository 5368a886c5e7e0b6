//! Exact rational series over forests, functionals and characters.

mod functional;

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::forest::{ClumpedForest, Forest};

pub use functional::{
    character_extend, convolve, delta_sigma, delta_sigma_inv, exp_conv, log_conv, scale_step, Coproduct, Functional,
    Kind, SeriesError,
};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Parses "p/q", "p" or a finite decimal such as "-0.25".
pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    if let Some((int, frac)) = s.split_once('.') {
        if s.contains('/') || frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let neg = int.starts_with('-');
        let digits: BigInt = format!("{}{}", int.trim_start_matches(['-', '+']), frac).parse().ok()?;
        let v = Q::new(digits, BigInt::from(10).pow(frac.len() as u32));
        return Some(if neg { -v } else { v });
    }
    match s.split_once('/') {
        Some((a, b)) => {
            let (a, b): (BigInt, BigInt) = (a.trim().parse().ok()?, b.trim().parse().ok()?);
            if b.is_zero() {
                None
            } else {
                Some(Q::new(a, b))
            }
        }
        None => s.parse::<BigInt>().ok().map(Q::from_integer),
    }
}

pub fn q_to_f64(x: &Q) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

/// Anything carrying an order.
pub trait Graded {
    fn order(&self) -> usize;
}

impl Graded for Forest {
    fn order(&self) -> usize {
        Forest::order(self)
    }
}

impl Graded for ClumpedForest {
    fn order(&self) -> usize {
        ClumpedForest::order(self)
    }
}

impl<A: Graded, B: Graded> Graded for (A, B) {
    fn order(&self) -> usize {
        self.0.order() + self.1.order()
    }
}

pub const UNTRUNCATED: usize = usize::MAX;

/// Finite linear combination with exact coefficients. Zero coefficients are
/// never stored; terms above `trunc` are dropped on insertion.
#[derive(Clone, PartialEq, Eq)]
pub struct Series<K: Ord> {
    terms: BTreeMap<K, Q>,
    trunc: usize,
}

pub type ForestSeries = Series<Forest>;
pub type ClumpedSeries = Series<ClumpedForest>;
/// Elements of a tensor product with a forest on the right.
pub type TensorSeries<L> = Series<(L, Forest)>;

impl<K: Ord + Clone + Graded> Default for Series<K> {
    fn default() -> Self {
        Self::new(UNTRUNCATED)
    }
}

impl<K: Ord + Clone + Graded> Series<K> {
    pub fn new(trunc: usize) -> Self {
        Series { terms: BTreeMap::new(), trunc }
    }

    pub fn zero() -> Self {
        Self::new(UNTRUNCATED)
    }

    pub fn single(k: K, c: Q) -> Self {
        let mut s = Self::zero();
        s.add_term(k, c);
        s
    }

    pub fn from_terms<I: IntoIterator<Item = (K, Q)>>(it: I) -> Self {
        let mut s = Self::zero();
        for (k, c) in it {
            s.add_term(k, c);
        }
        s
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn with_trunc(mut self, trunc: usize) -> Self {
        self.trunc = trunc;
        self.terms.retain(|k, _| k.order() <= trunc);
        self
    }

    pub fn add_term(&mut self, k: K, c: Q) {
        if c.is_zero() || k.order() > self.trunc {
            return;
        }
        match self.terms.entry(k) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn coeff(&self, k: &K) -> Q {
        self.terms.get(k).cloned().unwrap_or_else(Q::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &Q)> {
        self.terms.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &K> {
        self.terms.keys()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &Q) -> Self {
        let mut s = Self::new(self.trunc);
        if !c.is_zero() {
            for (k, v) in &self.terms {
                s.terms.insert(k.clone(), v * c);
            }
        }
        s
    }

    pub fn add_scaled(&mut self, other: &Self, c: &Q) {
        for (k, v) in &other.terms {
            self.add_term(k.clone(), v * c);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut s = self.clone();
        s.trunc = self.trunc.min(other.trunc);
        s.terms.retain(|k, _| k.order() <= s.trunc);
        s.add_scaled(other, &Q::one());
        s
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut s = self.clone();
        s.trunc = self.trunc.min(other.trunc);
        s.terms.retain(|k, _| k.order() <= s.trunc);
        s.add_scaled(other, &-Q::one());
        s
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Q::one())
    }

    /// Terms of exactly order `n`.
    pub fn graded_part(&self, n: usize) -> Self {
        let mut s = Self::new(self.trunc);
        for (k, v) in &self.terms {
            if k.order() == n {
                s.terms.insert(k.clone(), v.clone());
            }
        }
        s
    }

    pub fn filter(&self, pred: impl Fn(&K) -> bool) -> Self {
        let mut s = Self::new(self.trunc);
        for (k, v) in &self.terms {
            if pred(k) {
                s.terms.insert(k.clone(), v.clone());
            }
        }
        s
    }

    pub fn max_order(&self) -> usize {
        self.terms.keys().map(Graded::order).max().unwrap_or(0)
    }
}

impl<K: Ord + Clone + Graded> FromIterator<(K, Q)> for Series<K> {
    fn from_iter<I: IntoIterator<Item = (K, Q)>>(it: I) -> Self {
        Self::from_terms(it)
    }
}

/// Prints a rational as "p" or "p/q".
pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

fn fmt_terms<K: Ord>(terms: &BTreeMap<K, Q>, key: impl Fn(&K) -> String) -> String {
    if terms.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (k, c)) in terms.iter().enumerate() {
        let neg = c.is_negative();
        let a = c.abs();
        if i == 0 {
            if neg {
                out.push_str("- ");
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        if !a.is_one() {
            out.push_str(&fmt_q(&a));
            out.push(' ');
        }
        out.push_str(&key(k));
    }
    out
}

impl fmt::Display for Series<Forest> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_terms(&self.terms, |k| k.key().to_string()))
    }
}

impl fmt::Display for Series<ClumpedForest> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_terms(&self.terms, |k| k.to_string()))
    }
}

impl<L: Ord + fmt::Display> fmt::Display for Series<(L, Forest)> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_terms(&self.terms, |(l, r)| format!("{l} ⊗ {r}")))
    }
}

impl<K: Ord + fmt::Debug> fmt::Debug for Series<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter().map(|(k, v)| (k, fmt_q(v)))).finish()
    }
}

/// One JSON term.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct JsonTerm {
    pub forest: String,
    pub coeff: String,
}

/// JSON form of a series: truncation and basis headers plus the terms.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct JsonSeries {
    pub truncation: Option<usize>,
    pub basis: String,
    pub terms: Vec<JsonTerm>,
}

impl Series<Forest> {
    pub fn to_json(&self) -> JsonSeries {
        JsonSeries {
            truncation: (self.trunc != UNTRUNCATED).then_some(self.trunc),
            basis: "aromatic-forest".into(),
            terms: self.terms.iter().map(|(k, c)| JsonTerm { forest: k.key().to_string(), coeff: fmt_q(c) }).collect(),
        }
    }

    pub fn from_json(j: &JsonSeries) -> Result<Self, SeriesError> {
        let mut s = Self::new(j.truncation.unwrap_or(UNTRUNCATED));
        for t in &j.terms {
            let f = Forest::parse(&t.forest)?;
            let c = parse_q(&t.coeff).ok_or_else(|| SeriesError::BadCoefficient(t.coeff.clone()))?;
            s.add_term(f, c);
        }
        Ok(s)
    }

    /// Paper-style display with `\forest{...}` macros.
    pub fn to_latex(&self) -> String {
        latex_terms(&self.terms, |k| format!("\\forest{{{}}}", k.key()))
    }
}

impl Series<ClumpedForest> {
    /// Clumps are separated by `\cdot`.
    pub fn to_latex(&self) -> String {
        latex_terms(&self.terms, |k| {
            k.comps().iter().map(|c| format!("\\forest{{{}}}", c.key())).collect::<Vec<_>>().join(" \\cdot ")
        })
    }

    pub fn to_json(&self) -> JsonSeries {
        JsonSeries {
            truncation: (self.trunc != UNTRUNCATED).then_some(self.trunc),
            basis: "clumped-forest".into(),
            terms: self.terms.iter().map(|(k, c)| JsonTerm { forest: k.to_string(), coeff: fmt_q(c) }).collect(),
        }
    }
}

impl<L: Ord + fmt::Display> Series<(L, Forest)> {
    pub fn to_latex(&self) -> String {
        latex_terms(&self.terms, |(l, r)| format!("\\left({l}\\right) \\otimes \\forest{{{}}}", r.key()))
    }

    pub fn to_json(&self) -> JsonSeries {
        JsonSeries {
            truncation: None,
            basis: "tensor".into(),
            terms: self
                .terms
                .iter()
                .map(|((l, r), c)| JsonTerm { forest: format!("{l} ⊗ {r}"), coeff: fmt_q(c) })
                .collect(),
        }
    }
}

fn latex_q(a: &Q) -> String {
    if a.is_integer() {
        a.numer().to_string()
    } else {
        format!("\\frac{{{}}}{{{}}}", a.numer(), a.denom())
    }
}

pub(crate) fn latex_terms<K: Ord>(terms: &BTreeMap<K, Q>, key: impl Fn(&K) -> String) -> String {
    if terms.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (k, c)) in terms.iter().enumerate() {
        let neg = c.is_negative();
        let a = c.abs();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        if !a.is_one() {
            out.push_str(&latex_q(&a));
        }
        out.push_str(&key(k));
    }
    out
}
