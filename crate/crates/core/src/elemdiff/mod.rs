//! Exact elementary differentials on the torus.

mod expr;
mod parse;

use std::collections::HashMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::forest::{Deco, Forest};
use crate::series::{ForestSeries, Q};

pub use expr::{Expr, Mono, NumExpr, MAX_DIM};
pub use parse::parse_expr;

#[derive(Debug, Error)]
pub enum ElemDiffError {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("decoration '{0}' has no elementary differential")]
    Unsupported(char),
    #[error("dimension {0} is outside 1..=3")]
    Dimension(usize),
    #[error("{0} must have exactly one root")]
    NotSingleRooted(String),
}

/// A vector field on 𝕋^d, optionally remembering a potential V with f = −∇V.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    comps: Vec<Expr>,
    potential: Option<Expr>,
}

impl VectorField {
    pub fn new(comps: Vec<Expr>) -> Result<Self, ElemDiffError> {
        if comps.is_empty() || comps.len() > MAX_DIM {
            return Err(ElemDiffError::Dimension(comps.len()));
        }
        Ok(VectorField { comps, potential: None })
    }

    /// f = −∇V in dimension d.
    pub fn gradient(v: &Expr, d: usize) -> Result<Self, ElemDiffError> {
        if d == 0 || d > MAX_DIM || v.dim() > d {
            return Err(ElemDiffError::Dimension(d));
        }
        let comps = (0..d).map(|i| v.partial(i).neg()).collect();
        Ok(VectorField { comps, potential: Some(v.clone()) })
    }

    pub fn zero(d: usize) -> Self {
        VectorField { comps: vec![Expr::zero(); d], potential: None }
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn comp(&self, i: usize) -> &Expr {
        &self.comps[i]
    }

    pub fn comps(&self) -> &[Expr] {
        &self.comps
    }

    pub fn potential(&self) -> Option<&Expr> {
        self.potential.as_ref()
    }

    pub fn is_gradient(&self) -> bool {
        self.potential.is_some()
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Expr::is_zero)
    }

    pub fn add_scaled(&mut self, other: &VectorField, c: &Q) {
        for (a, b) in self.comps.iter_mut().zip(&other.comps) {
            a.add_scaled(b, c);
        }
        self.potential = None;
    }

    /// The generator ℒφ = φ′f + ½Δφ.
    pub fn generator(&self, phi: &Expr) -> Expr {
        let mut out = Expr::zero();
        for i in 0..self.dim() {
            out = out.add(&phi.partial(i).mul(&self.comps[i]));
            out.add_scaled(&phi.partial(i).partial(i), &crate::series::q(1, 2));
        }
        out
    }
}

/// Index structure of a forest: one summation index per black vertex (shared
/// along stolons) and per liana pair.
struct Layout {
    n_idx: usize,
    /// (vertex, its own index, indices of its predecessors)
    factors: Vec<(usize, usize, Vec<usize>)>,
    /// Indices differentiating φ.
    roots: Vec<usize>,
}

fn layout(f: &Forest) -> Result<Layout, ElemDiffError> {
    let g = f.graph();
    let n = g.len();
    let partner = g.partners();
    let mut idx: Vec<Option<usize>> = vec![None; n];
    let mut n_idx = 0;
    for v in 0..n {
        if idx[v].is_some() {
            continue;
        }
        if let Deco::Letter(c) = g.deco[v] {
            return Err(ElemDiffError::Unsupported(c));
        }
        idx[v] = Some(n_idx);
        if let Some(w) = g.stolon[v].or(partner[v]) {
            idx[w] = Some(n_idx);
        }
        n_idx += 1;
    }
    let idx: Vec<usize> = idx.into_iter().map(|i| i.unwrap()).collect();
    let preds = g.preds();
    let factors = (0..n)
        .filter(|&v| g.deco[v] == Deco::Black)
        .map(|v| {
            let mut d: Vec<usize> = preds[v].iter().map(|&u| idx[u]).collect();
            d.sort_unstable();
            (v, idx[v], d)
        })
        .collect();
    let mut roots: Vec<usize> = g.roots().into_iter().map(|r| idx[r]).collect();
    roots.sort_unstable();
    Ok(Layout { n_idx, factors, roots })
}

type DerivCache = HashMap<(usize, usize, Vec<usize>), Expr>;

fn deriv<'a>(cache: &'a mut DerivCache, fields: &[VectorField], which: usize, comp: usize, idx: Vec<usize>) -> &'a Expr {
    cache
        .entry((which, comp, idx))
        .or_insert_with_key(|(w, c, i)| fields[*w].comp(*c).partial_many(i))
}

/// F(π)[φ] where black vertex v uses the field fields[choice(v)].
pub fn elementary_multi(
    f: &Forest,
    fields: &[VectorField],
    choice: &dyn Fn(usize) -> usize,
    phi: &Expr,
) -> Result<Expr, ElemDiffError> {
    let d = fields.first().map_or(1, VectorField::dim);
    let lay = layout(f)?;
    let mut cache = DerivCache::new();
    let mut phi_cache: HashMap<Vec<usize>, Expr> = HashMap::new();
    let mut out = Expr::zero();
    let mut assign = vec![0usize; lay.n_idx];
    loop {
        let mut term = {
            let key: Vec<usize> = {
                let mut k: Vec<usize> = lay.roots.iter().map(|&i| assign[i]).collect();
                k.sort_unstable();
                k
            };
            phi_cache.entry(key).or_insert_with_key(|k| phi.partial_many(k)).clone()
        };
        for (v, own, ds) in &lay.factors {
            if term.is_zero() {
                break;
            }
            let mut k: Vec<usize> = ds.iter().map(|&i| assign[i]).collect();
            k.sort_unstable();
            let e = deriv(&mut cache, fields, choice(*v), assign[*own], k);
            term = if e.is_zero() { Expr::zero() } else { term.mul(e) };
        }
        out = out.add(&term);
        let mut pos = 0;
        loop {
            if pos == lay.n_idx {
                return Ok(out);
            }
            assign[pos] += 1;
            if assign[pos] < d {
                break;
            }
            assign[pos] = 0;
            pos += 1;
        }
    }
}

/// The elementary differential F(π)[φ] for the vector field f.
pub fn elementary(f: &Forest, field: &VectorField, phi: &Expr) -> Result<Expr, ElemDiffError> {
    elementary_multi(f, std::slice::from_ref(field), &|_| 0, phi)
}

/// Components of the vector field F(τ) of a single-root forest τ, read off
/// from F(τ)[x_j].
pub fn elementary_field(tau: &Forest, field: &VectorField) -> Result<VectorField, ElemDiffError> {
    if tau.num_roots() != 1 {
        return Err(ElemDiffError::NotSingleRooted(tau.to_string()));
    }
    let comps = (0..field.dim()).map(|j| elementary(tau, field, &Expr::var(j))).collect::<Result<_, _>>()?;
    VectorField::new(comps)
}

/// Σ c_π F(π)[φ] over the terms of S.
pub fn eval_series(s: &ForestSeries, field: &VectorField, phi: &Expr) -> Result<Expr, ElemDiffError> {
    let parts: Vec<Result<Expr, ElemDiffError>> = s
        .iter()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|(f, c)| Ok(elementary(f, field, phi)?.scale(c)))
        .collect();
    let mut out = Expr::zero();
    for p in parts {
        out = out.add(&p?);
    }
    Ok(out)
}

/// The terms of S applied to a graded test function ψ = Σ h^k ψ_k, collected
/// by total power of h up to `trunc`.
pub fn eval_series_graded(
    s: &ForestSeries,
    field: &VectorField,
    psi: &[Expr],
    trunc: usize,
) -> Result<Vec<Expr>, ElemDiffError> {
    let jobs: Vec<(usize, Forest, Q, usize)> = s
        .iter()
        .flat_map(|(f, c)| {
            (0..psi.len())
                .filter(move |&k| f.order() + k <= trunc)
                .map(move |k| (f.order() + k, f.clone(), c.clone(), k))
        })
        .collect();
    let parts: Vec<Result<(usize, Expr), ElemDiffError>> = jobs
        .par_iter()
        .map(|(n, f, c, k)| Ok((*n, elementary(f, field, &psi[*k])?.scale(c))))
        .collect();
    let mut out = vec![Expr::zero(); trunc + 1];
    for p in parts {
        let (n, e) = p?;
        out[n] = out[n].add(&e);
    }
    Ok(out)
}

/// The modified field f̃ = Σ_τ h^{|τ|−1} c_τ F(τ) as graded pieces f̃_k.
pub fn substituted_field(b: &ForestSeries, field: &VectorField, trunc: usize) -> Result<Vec<VectorField>, ElemDiffError> {
    let mut out = vec![VectorField::zero(field.dim()); trunc];
    for (tau, c) in b.iter() {
        let n = tau.order();
        if n == 0 || n > trunc {
            continue;
        }
        out[n - 1].add_scaled(&elementary_field(tau, field)?, c);
    }
    Ok(out)
}

/// Σ_π h^{|π|} c_π F_{f̃}(π)[φ] with f̃ given by graded pieces, collected by
/// power of h up to `trunc`.
pub fn eval_series_substituted(
    s: &ForestSeries,
    pieces: &[VectorField],
    phi: &Expr,
    trunc: usize,
) -> Result<Vec<Expr>, ElemDiffError> {
    let parts: Vec<Result<Vec<Expr>, ElemDiffError>> = s
        .iter()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|(f, c)| {
            let mut out = vec![Expr::zero(); trunc + 1];
            let blacks: Vec<usize> =
                (0..f.graph().len()).filter(|&v| f.graph().deco[v] == Deco::Black).collect();
            let base = f.order();
            if base > trunc {
                return Ok(out);
            }
            let budget = trunc - base;
            for grades in crate::hopf::bounded_tuples(blacks.len(), pieces.len(), budget) {
                if grades.iter().any(|&g| pieces[g].is_zero()) {
                    continue;
                }
                let mut which = vec![0; f.graph().len()];
                for (&v, &g) in blacks.iter().zip(&grades) {
                    which[v] = g;
                }
                let e = elementary_multi(f, pieces, &|v| which[v], phi)?;
                let n = base + grades.iter().sum::<usize>();
                out[n].add_scaled(&e, c);
            }
            Ok(out)
        })
        .collect();
    let mut out = vec![Expr::zero(); trunc + 1];
    for p in parts {
        for (n, e) in p?.into_iter().enumerate() {
            out[n] = out[n].add(&e);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::q;

    fn f(s: &str) -> Forest {
        Forest::parse(s).unwrap()
    }

    fn field1() -> VectorField {
        VectorField::gradient(&parse_expr("sin(x) + 1/4*cos(2*x)").unwrap(), 1).unwrap()
    }

    #[test]
    fn basic_differentials() {
        let fld = field1();
        let phi = parse_expr("cos(x) + sin(3*x)").unwrap();
        let fx = fld.comp(0).clone();
        assert_eq!(elementary(&Forest::bullet(), &fld, &phi).unwrap(), fx.mul(&phi.partial(0)));
        assert_eq!(elementary(&f("1,1"), &fld, &phi).unwrap(), phi.partial_k(0, 2));
        assert_eq!(elementary(&f("{}"), &fld, &phi).unwrap(), phi);
        let bb = elementary(&f("b[b]"), &fld, &phi).unwrap();
        assert_eq!(bb, fx.mul(&fx.partial(0)).mul(&phi.partial(0)));
        let gen = eval_series(
            &[(Forest::bullet(), Q::from_integer(1.into())), (f("1,1"), q(1, 2))].into_iter().collect(),
            &fld,
            &phi,
        )
        .unwrap();
        assert_eq!(gen, fld.generator(&phi));
    }

    #[test]
    fn worked_exotic_example() {
        let v = parse_expr("sin(x1)*cos(x2) + 1/3*sin(2*x2)").unwrap();
        let fld = VectorField::gradient(&v, 2).unwrap();
        let phi = parse_expr("cos(x1 + x2) + sin(x2)").unwrap();
        let got = elementary(&f("(b[1]),b=b[2],b[1],2"), &fld, &phi).unwrap();
        let mut want = Expr::zero();
        for i in 0..2 {
            for s in 0..2 {
                for j in 0..2 {
                    for l1 in 0..2 {
                        for l2 in 0..2 {
                            let t = fld
                                .comp(i)
                                .partial_many(&[i, l1])
                                .mul(fld.comp(s))
                                .mul(&fld.comp(s).partial(l2))
                                .mul(&fld.comp(j).partial(l1))
                                .mul(&phi.partial_many(&[j, l2]));
                            want = want.add(&t);
                        }
                    }
                }
            }
        }
        assert_eq!(got, want);
    }

    #[test]
    fn isomorphic_forests_agree() {
        let v = parse_expr("sin(x1) + cos(x1 + x2)").unwrap();
        let fld = VectorField::gradient(&v, 2).unwrap();
        let phi = parse_expr("sin(x2)").unwrap();
        let a = elementary(&f("(b[b[3],1,1]),b[b[2],b[2,3]]"), &fld, &phi).unwrap();
        let b = elementary(&f("(b[b[2],3,3]),b[b[1],b[1,2]]"), &fld, &phi).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn finite_differences() {
        let v = parse_expr("sin(x1)*cos(2*x2) + 1/5*cos(x1 - x2)").unwrap();
        let fld = VectorField::gradient(&v, 2).unwrap();
        let phi = parse_expr("cos(x1)*sin(x2)").unwrap();
        let e = elementary(&f("b[1,1,b]"), &fld, &phi).unwrap();
        let de = e.partial(0).partial(1);
        let h = 1e-4;
        for p in [[0.3, 1.1], [2.0, -0.7], [4.4, 5.9]] {
            let ev = |dx: f64, dy: f64| e.eval(&[p[0] + dx, p[1] + dy]);
            let fd = (ev(h, h) - ev(h, -h) - ev(-h, h) + ev(-h, -h)) / (4.0 * h * h);
            let exact = de.eval(&p);
            assert!((fd - exact).abs() <= 1e-6 * exact.abs().max(1.0), "{fd} vs {exact}");
        }
    }
}
