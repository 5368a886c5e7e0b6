//! Modified vector fields: backward error analysis for the invariant
//! measure and modified equations, each by the closed series and by the
//! fixed-point recursion.

use num_traits::Zero;

use super::ibp::a_map;
use super::StochasticError;
use crate::forest::{enumerate, Filter, Forest};
use crate::hopf::cem_reduced;
use crate::series::{convolve, Coproduct, ForestSeries, Functional, Q};

/// A modified field b (values on black-rooted aroma-free trees, b(•) from
/// the computation) and everything the normal form could not place on such
/// trees, F-weighted.
#[derive(Clone, Debug, PartialEq)]
pub struct ModifiedField {
    pub b: Functional,
    pub residual: ForestSeries,
}

/// x ~⋆ y for linear x: the left factor is extended to clumped forests by
/// its derivative at δ_•, x(c·•^m) = x(c) and x(•^k) = k·x(•).
pub fn star_tilde_linear(x: &Functional, y: &Functional) -> Result<Functional, StochasticError> {
    let n = x.trunc().min(y.trunc());
    let bullet = Forest::bullet();
    let mut out = Functional::linear(n);
    for mu in enumerate(n, Filter::All)? {
        let mut v = Q::zero();
        for ((p, pi), c) in cem_reduced(&mu).iter() {
            let yv = y.eval(pi);
            if yv.is_zero() {
                continue;
            }
            let rest: Vec<&Forest> = p.comps().iter().filter(|t| **t != bullet).collect();
            let xv = match rest.len() {
                0 => x.eval(&bullet) * Q::from_integer((p.len() as i64).into()),
                1 => x.eval(rest[0]),
                _ => continue,
            };
            v += c * xv * yv;
        }
        out.set(mu, v);
    }
    Ok(out)
}

fn split(raw: &Functional, mut residual: ForestSeries, n: usize) -> ModifiedField {
    let mut b = Functional::delta_bullet(n);
    for (f, v) in raw.support() {
        if f.is_black_rooted_tree() {
            let old = b.eval(&f);
            b.set(f, old + v);
        } else {
            residual.add_term(f.clone(), v / Q::from_integer((f.sigma() as i64).into()));
        }
    }
    ModifiedField { b, residual }
}

/// δ_• + A(Σ_k (−1)^k A_{~⋆y}^k(x0)) restricted to trees.
fn closed_series(x0: Functional, y: &Functional, n: usize) -> Result<ModifiedField, StochasticError> {
    let mut term = x0;
    let mut total = Functional::linear(n);
    for k in 0..=n {
        if term.values().is_empty() {
            break;
        }
        total = if k % 2 == 0 { total.add(&term) } else { total.sub(&term) };
        term = star_tilde_linear(&a_map(&term)?.0, y)?;
    }
    let (raw, rootless) = a_map(&total)?;
    Ok(split(&raw, rootless, n))
}

/// Invariant-measure backward error analysis: b with b_c ⋆ e ∼ a through
/// order `n` for a consistent character a.
pub fn bea_modified_field(a: &Functional, n: usize) -> Result<ModifiedField, StochasticError> {
    let e = super::exact_flow_character(n)?;
    let x0 = a.to_linear().with_trunc(n).sub(&e);
    closed_series(x0, &e, n)
}

/// Modified equation: b with b_c ⋆ a ∼ δ_𝟏 through order `n`.
pub fn modified_equation(a: &Functional, n: usize) -> Result<ModifiedField, StochasticError> {
    let x0 = Functional::unit(n).to_linear().sub(&a.to_linear().with_trunc(n));
    closed_series(x0, &a.to_linear().with_trunc(n), n)
}

fn recursion(n: usize, defect: impl Fn(&Functional) -> Result<Functional, StochasticError>) -> Result<ModifiedField, StochasticError> {
    let mut b = Functional::delta_bullet(n);
    let mut last = ModifiedField { b: b.clone(), residual: ForestSeries::zero() };
    for _ in 0..n {
        let x = defect(&b)?;
        let (ax, rootless) = a_map(&x)?;
        let step = split(&ax, rootless, n);
        b = b.add(&step.b).sub(&Functional::delta_bullet(n));
        last = ModifiedField { b: b.clone(), residual: step.residual };
    }
    Ok(last)
}

/// b_k = b_{k−1} + A(a − b_{k−1,c} ⋆ e) on trees, from b_0 = δ_•.
pub fn bea_recursion(a: &Functional, n: usize) -> Result<ModifiedField, StochasticError> {
    let e = super::exact_flow_character(n)?;
    let a = a.to_linear().with_trunc(n);
    recursion(n, |b| Ok(a.sub(&convolve(Coproduct::Cem, b, &e)?)))
}

/// b_k = b_{k−1} − A(b_{k−1,c} ⋆ a − δ_𝟏) on trees, from b_0 = δ_•.
pub fn modified_recursion(a: &Functional, n: usize) -> Result<ModifiedField, StochasticError> {
    let a = a.to_linear().with_trunc(n);
    recursion(n, |b| Ok(Functional::unit(n).to_linear().sub(&convolve(Coproduct::Cem, b, &a)?)))
}

