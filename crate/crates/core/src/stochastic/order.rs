//! Generator, exact flow and order conditions.

use num_traits::One;
use serde::Serialize;

use super::eli::eli_normalize_with;
use super::StochasticError;
use crate::forest::{enumerate, Filter, Forest};
use crate::series::{convolve, delta_sigma, exp_conv, fmt_q, Coproduct, Functional, Q};

/// l(•) = l(1,1) = 1, zero elsewhere: the generator φ′f + ½Δφ.
pub fn generator_character(n: usize) -> Functional {
    let mut l = Functional::linear(n);
    l.set(Forest::bullet(), Q::one());
    l.set(Forest::parse("1,1").expect("valid"), Q::one());
    l
}

/// e = exp^∗(l) through order `n`.
pub fn exact_flow_character(n: usize) -> Result<Functional, StochasticError> {
    Ok(exp_conv(Coproduct::Bck, &generator_character(n))?)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrderFailure {
    pub forest: String,
    pub order: usize,
    pub value: String,
    pub expected: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrderReport {
    pub order: usize,
    pub holds: bool,
    /// Set for invariant-measure checks at order ≥ 4, where a nonzero
    /// normal form does not prove failure (the kernel of ∼ on trees is
    /// nontrivial there).
    pub sufficient_only: bool,
    pub failures: Vec<OrderFailure>,
}

impl OrderReport {
    fn new(order: usize, failures: Vec<OrderFailure>, sufficient_only: bool) -> Self {
        OrderReport { order, holds: failures.is_empty(), sufficient_only, failures }
    }
}

/// Weak order p: a and e agree on every forest of order ≤ p.
pub fn check_weak_order(a: &Functional, p: usize) -> Result<OrderReport, StochasticError> {
    let e = exact_flow_character(p)?;
    let mut failures = Vec::new();
    for f in enumerate(p, Filter::All)? {
        let (x, y) = (a.eval(&f), e.eval(&f));
        if x != y {
            failures.push(OrderFailure { forest: f.to_string(), order: f.order(), value: fmt_q(&x), expected: fmt_q(&y) });
        }
    }
    Ok(OrderReport::new(p, failures, false))
}

/// Largest p ≤ `max` with weak order p.
pub fn weak_order(a: &Functional, max: usize) -> Result<usize, StochasticError> {
    let mut p = 0;
    while p < max && check_weak_order(a, p + 1)?.holds {
        p += 1;
    }
    Ok(p)
}

fn equivalence_failures(x: &Functional, p: usize) -> Result<Vec<OrderFailure>, StochasticError> {
    let s = delta_sigma(&x.to_linear().with_trunc(p));
    let mut failures = Vec::new();
    for n in 1..=p {
        let nf = eli_normalize_with(&s.graded_part(n), true)?;
        for (f, c) in nf.trees.iter().chain(nf.residual.iter()) {
            failures.push(OrderFailure { forest: f.to_string(), order: n, value: fmt_q(c), expected: "0".into() });
        }
    }
    Ok(failures)
}

/// Invariant-measure order p: a − δ_𝟏 ∼ 0 through order p. Failures list
/// the F-weighted normal form. For p ≥ 4 a pass is conclusive but a failure
/// is reported with `sufficient_only`.
pub fn check_invariant_order(a: &Functional, p: usize) -> Result<OrderReport, StochasticError> {
    let x = a.to_linear().with_trunc(p).sub(&Functional::unit(p));
    Ok(OrderReport::new(p, equivalence_failures(&x, p)?, p >= 4))
}

/// Largest p ≤ `max` passing [`check_invariant_order`].
pub fn invariant_order(a: &Functional, max: usize) -> Result<usize, StochasticError> {
    let mut p = 0;
    while p < max && check_invariant_order(a, p + 1)?.holds {
        p += 1;
    }
    Ok(p)
}

/// Postprocessed invariant-measure order: a − δ_𝟏 + [l, ā] ∼ 0 through
/// order p, with [x, y] = x ∗ y − y ∗ x.
pub fn postprocessor_check(a: &Functional, abar: &Functional, p: usize) -> Result<OrderReport, StochasticError> {
    let l = generator_character(p);
    let abar = abar.to_linear().with_trunc(p);
    let bracket = convolve(Coproduct::Bck, &l, &abar)?.sub(&convolve(Coproduct::Bck, &abar, &l)?);
    let x = a.to_linear().with_trunc(p).sub(&Functional::unit(p)).add(&bracket);
    Ok(OrderReport::new(p, equivalence_failures(&x, p)?, p >= 4))
}
