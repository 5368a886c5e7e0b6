//! Functionals on forests and their convolution products.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rayon::prelude::*;
use thiserror::Error;

use super::{qi, ForestSeries, Q, UNTRUNCATED};
use crate::forest::{enumerate_with_bound, Filter, Forest, ForestError};
use crate::hopf;

#[derive(Debug, Error)]
pub enum SeriesError {
    #[error("unknown coproduct '{0}'")]
    UnknownCoproduct(String),
    #[error("exponential needs a functional vanishing on the empty forest")]
    NonzeroConstant,
    #[error("logarithm needs a functional equal to 1 on the empty forest")]
    NotUnital,
    #[error("bad coefficient '{0}'")]
    BadCoefficient(String),
    #[error("support violation: {0}")]
    Support(String),
    #[error("truncation {0} is too large for enumeration")]
    Unbounded(usize),
    #[error(transparent)]
    Forest(#[from] ForestError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Linear,
    /// Multiplicative for concatenation; values stored on connected forests.
    Character,
}

/// A functional a on exotic aromatic forests, known up to order `trunc`.
#[derive(Clone, Debug, PartialEq)]
pub struct Functional {
    kind: Kind,
    values: BTreeMap<Forest, Q>,
    trunc: usize,
}

/// Coproducts available for convolution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Coproduct {
    Deshuffle,
    DeshuffleAromaLinear,
    Bck,
    Cem,
    CemReduced,
}

impl std::str::FromStr for Coproduct {
    type Err = SeriesError;
    fn from_str(s: &str) -> Result<Self, SeriesError> {
        Ok(match s {
            "deshuffle" => Coproduct::Deshuffle,
            "deshuffle-aroma-linear" => Coproduct::DeshuffleAromaLinear,
            "bck" => Coproduct::Bck,
            "cem" => Coproduct::Cem,
            "cem-reduced" => Coproduct::CemReduced,
            _ => return Err(SeriesError::UnknownCoproduct(s.to_string())),
        })
    }
}

impl Coproduct {
    /// Whether convolution of two characters is again a character.
    fn multiplicative(self) -> bool {
        matches!(self, Coproduct::Deshuffle | Coproduct::Bck)
    }
}

impl Functional {
    pub fn linear(trunc: usize) -> Self {
        Functional { kind: Kind::Linear, values: BTreeMap::new(), trunc }
    }

    pub fn character(trunc: usize) -> Self {
        Functional { kind: Kind::Character, values: BTreeMap::new(), trunc }
    }

    /// The counit δ_𝟏.
    pub fn unit(trunc: usize) -> Self {
        Self::character(trunc)
    }

    /// δ_•.
    pub fn delta_bullet(trunc: usize) -> Self {
        let mut a = Self::linear(trunc);
        a.set(Forest::bullet(), qi(1));
        a
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn with_trunc(mut self, trunc: usize) -> Self {
        self.trunc = trunc;
        self.values.retain(|k, _| k.order() <= trunc);
        self
    }

    /// Stored values (on generators for a character).
    pub fn values(&self) -> &BTreeMap<Forest, Q> {
        &self.values
    }

    pub fn set(&mut self, f: Forest, v: Q) {
        if f.order() > self.trunc {
            return;
        }
        if v.is_zero() {
            self.values.remove(&f);
        } else {
            self.values.insert(f, v);
        }
    }

    pub fn eval(&self, f: &Forest) -> Q {
        if f.order() > self.trunc {
            return Q::zero();
        }
        match self.kind {
            Kind::Linear => self.values.get(f).cloned().unwrap_or_else(Q::zero),
            Kind::Character => {
                if f.is_empty() {
                    return Q::one();
                }
                let mut p = Q::one();
                for c in f.exotic_components() {
                    match self.values.get(&c) {
                        Some(v) => p *= v,
                        None => return Q::zero(),
                    }
                }
                p
            }
        }
    }

    /// All forests with a nonzero value, with the value.
    pub fn support(&self) -> Vec<(Forest, Q)> {
        match self.kind {
            Kind::Linear => self.values.iter().map(|(k, v)| (k.clone(), v.clone())).collect(),
            Kind::Character => {
                let gens: Vec<(Forest, Q)> = self.values.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
                let mut out = Vec::new();
                let mut chosen: Vec<usize> = Vec::new();
                products(&gens, 0, 0, self.trunc, &mut chosen, &mut out);
                out
            }
        }
    }

    /// Same values as a plain linear functional.
    pub fn to_linear(&self) -> Functional {
        match self.kind {
            Kind::Linear => self.clone(),
            Kind::Character => {
                let mut a = Functional::linear(self.trunc);
                for (f, v) in self.support() {
                    a.set(f, v);
                }
                a
            }
        }
    }

    /// Character agreeing with this functional on connected forests.
    pub fn to_character(&self) -> Functional {
        match self.kind {
            Kind::Character => self.clone(),
            Kind::Linear => {
                let mut a = Functional::character(self.trunc);
                for (f, v) in &self.values {
                    if !f.is_empty() && f.exotic_components().len() == 1 {
                        a.set(f.clone(), v.clone());
                    }
                }
                a
            }
        }
    }

    /// Multiplicativity check on every forest up to `min(trunc, max_order)`.
    pub fn is_character_up_to(&self, max_order: usize) -> bool {
        if self.kind == Kind::Character {
            return true;
        }
        let n = self.trunc.min(max_order);
        if self.eval(&Forest::empty()) != Q::one() {
            return false;
        }
        let Ok(all) = enumerate_with_bound(n, Filter::All, n) else { return false };
        all.iter().all(|f| {
            let prod = f.exotic_components().iter().fold(Q::one(), |acc, c| acc * self.eval(c));
            prod == self.eval(f)
        })
    }

    pub fn is_character(&self) -> bool {
        self.is_character_up_to(4)
    }

    fn combine(&self, other: &Functional, c: &Q) -> Functional {
        let a = self.to_linear();
        let b = other.to_linear();
        let mut out = Functional::linear(a.trunc.min(b.trunc));
        for (f, v) in a.values {
            out.set(f, v);
        }
        for (f, v) in b.values {
            let old = out.eval(&f);
            out.set(f, old + v * c);
        }
        out
    }

    pub fn add(&self, other: &Functional) -> Functional {
        self.combine(other, &Q::one())
    }

    pub fn sub(&self, other: &Functional) -> Functional {
        self.combine(other, &-Q::one())
    }

    pub fn scale(&self, c: &Q) -> Functional {
        let mut a = self.to_linear();
        for v in a.values.values_mut() {
            *v *= c;
        }
        a.values.retain(|_, v| !v.is_zero());
        a
    }

    /// Values restricted to forests accepted by `keep`.
    pub fn restrict(&self, keep: impl Fn(&Forest) -> bool) -> Functional {
        let a = self.to_linear();
        let mut out = Functional::linear(a.trunc);
        for (f, v) in a.values {
            if keep(&f) {
                out.set(f, v);
            }
        }
        out
    }

    /// Values on forests of exactly order `n`.
    pub fn graded_part(&self, n: usize) -> Functional {
        self.restrict(|f| f.order() == n)
    }
}

fn products(
    gens: &[(Forest, Q)],
    start: usize,
    order: usize,
    trunc: usize,
    chosen: &mut Vec<usize>,
    out: &mut Vec<(Forest, Q)>,
) {
    let f = Forest::product(chosen.iter().map(|&i| &gens[i].0));
    let v = chosen.iter().fold(Q::one(), |acc, &i| acc * &gens[i].1);
    out.push((f, v));
    for i in start..gens.len() {
        let o = order + gens[i].0.order();
        if o > trunc || gens[i].0.order() == 0 {
            continue;
        }
        chosen.push(i);
        products(gens, i, o, trunc, chosen, out);
        chosen.pop();
    }
}

/// δσ(a) = Σ a(π)/σ(π) π.
pub fn delta_sigma(a: &Functional) -> ForestSeries {
    let mut s = ForestSeries::new(a.trunc);
    for (f, v) in a.support() {
        let sig = qi(f.sigma() as i64);
        s.add_term(f, v / sig);
    }
    s
}

/// Inverse of [`delta_sigma`]: a(π) = σ(π)·coefficient.
pub fn delta_sigma_inv(s: &ForestSeries) -> Functional {
    let mut a = Functional::linear(s.trunc());
    for (f, c) in s.iter() {
        a.set(f.clone(), c * qi(f.sigma() as i64));
    }
    a
}

/// Character from values on connected generators.
pub fn character_extend(gens: &BTreeMap<Forest, Q>, trunc: usize) -> Result<Functional, SeriesError> {
    let mut a = Functional::character(trunc);
    for (f, v) in gens {
        if f.is_empty() || f.exotic_components().len() != 1 {
            return Err(SeriesError::Support(format!("{f} is not connected")));
        }
        a.set(f.clone(), v.clone());
    }
    Ok(a)
}

fn domain(trunc: usize, filter: Filter) -> Result<Vec<Forest>, SeriesError> {
    if trunc == UNTRUNCATED || trunc > 8 {
        return Err(SeriesError::Unbounded(trunc));
    }
    Ok(enumerate_with_bound(trunc, filter, trunc)?)
}

/// Value of (a ⊗ b)∘Δ on one forest.
pub fn convolve_at(kind: Coproduct, a: &Functional, b: &Functional, f: &Forest) -> Q {
    let mut v = Q::zero();
    match kind {
        Coproduct::Deshuffle | Coproduct::DeshuffleAromaLinear | Coproduct::Bck => {
            let t = match kind {
                Coproduct::Deshuffle => hopf::deshuffle(f),
                Coproduct::DeshuffleAromaLinear => hopf::deshuffle_aroma_linear(f),
                _ => hopf::bck_coproduct(f),
            };
            for ((x, y), c) in t.iter() {
                let ax = a.eval(x);
                if ax.is_zero() {
                    continue;
                }
                let by = b.eval(y);
                if !by.is_zero() {
                    v += c * ax * by;
                }
            }
        }
        Coproduct::Cem | Coproduct::CemReduced => {
            let t = if kind == Coproduct::Cem { hopf::cem_coaction(f) } else { hopf::cem_reduced(f) };
            for ((p, y), c) in t.iter() {
                let by = b.eval(y);
                if by.is_zero() {
                    continue;
                }
                let ap = p.comps().iter().fold(Q::one(), |acc, t| acc * a.eval(t));
                if !ap.is_zero() {
                    v += c * ap * by;
                }
            }
        }
    }
    v
}

/// (a ⊗ b)∘Δ. For the CEM kinds the left functional acts on clumps and is
/// extended multiplicatively over the clumps.
pub fn convolve(kind: Coproduct, a: &Functional, b: &Functional) -> Result<Functional, SeriesError> {
    let trunc = a.trunc.min(b.trunc);
    let as_char = kind.multiplicative() && a.kind == Kind::Character && b.kind == Kind::Character;
    let dom = domain(trunc, if as_char { Filter::Connected } else { Filter::All })?;
    let vals: Vec<(Forest, Q)> = dom.par_iter().map(|f| (f.clone(), convolve_at(kind, a, b, f))).collect();
    let mut out = if as_char { Functional::character(trunc) } else { Functional::linear(trunc) };
    for (f, v) in vals {
        out.set(f, v);
    }
    Ok(out)
}

/// Σ a0^{⊛n}/n!.
pub fn exp_conv(kind: Coproduct, a0: &Functional) -> Result<Functional, SeriesError> {
    if !a0.eval(&Forest::empty()).is_zero() {
        return Err(SeriesError::NonzeroConstant);
    }
    let trunc = a0.trunc;
    domain(trunc, Filter::All)?;
    let mut result = Functional::unit(trunc).to_linear();
    let mut term = result.clone();
    for n in 1..=trunc {
        term = convolve(kind, &term, a0)?.scale(&Q::new(1.into(), (n as i64).into()));
        result = result.add(&term);
    }
    Ok(result)
}

/// Σ (−1)^{n+1} (a − δ_𝟏)^{⊛n}/n.
pub fn log_conv(kind: Coproduct, a: &Functional) -> Result<Functional, SeriesError> {
    if a.eval(&Forest::empty()) != Q::one() {
        return Err(SeriesError::NotUnital);
    }
    let trunc = a.trunc;
    let x = a.sub(&Functional::unit(trunc));
    let mut result = Functional::linear(trunc);
    let mut power = x.clone();
    for n in 1..=trunc {
        let c = Q::new(if n % 2 == 1 { 1.into() } else { (-1).into() }, (n as i64).into());
        result = result.add(&power.scale(&c));
        power = convolve(kind, &power, &x)?;
    }
    Ok(result)
}

/// a_s(π) = a(π)·s^{|π|}.
pub fn scale_step(a: &Functional, s: &Q) -> Functional {
    let mut out = a.clone();
    for (f, v) in out.values.iter_mut() {
        let mut p = Q::one();
        for _ in 0..f.order() {
            p *= s;
        }
        *v *= p;
    }
    out.values.retain(|_, v| !v.is_zero());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::q;

    fn f(s: &str) -> Forest {
        Forest::parse(s).unwrap()
    }

    #[test]
    fn character_eval() {
        let mut a = Functional::character(4);
        a.set(f("b"), qi(2));
        a.set(f("1,1"), q(1, 3));
        assert_eq!(a.eval(&f("b,b,1,1")), q(4, 3));
        assert_eq!(a.eval(&f("{}")), qi(1));
        assert_eq!(a.eval(&f("b[b]")), qi(0));
        assert!(a.to_linear().is_character());
    }

    #[test]
    fn delta_sigma_round_trip() {
        let mut a = Functional::character(3);
        a.set(f("b"), qi(1));
        a.set(f("1,1"), qi(1));
        let s = delta_sigma(&a);
        assert_eq!(s.coeff(&f("1,1")), q(1, 2));
        assert_eq!(s.coeff(&f("1,1,2,2")), q(1, 8));
        assert_eq!(delta_sigma_inv(&s), a.to_linear());
    }

    #[test]
    fn scale_by_zero_is_unit() {
        let mut a = Functional::character(3);
        a.set(f("b"), qi(1));
        let z = scale_step(&a, &qi(0));
        assert_eq!(z.to_linear(), Functional::unit(3).to_linear());
    }
}
