//! Stochastic Runge-Kutta tableaux and their characters.
//!
//! Stages Y^i = X + h Σ_j a_ij f(Y^j) + √h d_i ξ and output
//! X₁ = X + h Σ_i b_i f(Y^i) + √h d0 ξ.

use num_traits::{One, Zero};
use serde_json::Value;

use super::StochasticError;
use crate::forest::{enumerate, Deco, Filter, Forest};
use crate::series::{fmt_q, parse_q, q, Functional, Q};

#[derive(Clone, Debug, PartialEq)]
pub struct SrkTableau {
    pub a: Vec<Vec<Q>>,
    pub b: Vec<Q>,
    pub d: Vec<Q>,
    pub d0: Q,
}

fn ints(v: &[i64]) -> Vec<Q> {
    v.iter().map(|&x| Q::from_integer(x.into())).collect()
}

impl SrkTableau {
    pub fn new(a: Vec<Vec<Q>>, b: Vec<Q>, d: Vec<Q>, d0: Q) -> Result<Self, StochasticError> {
        let s = b.len();
        if s == 0 {
            return Err(StochasticError::Tableau("no stages".into()));
        }
        if a.len() != s || a.iter().any(|r| r.len() != s) || d.len() != s {
            return Err(StochasticError::Tableau(format!("expected an {s}x{s} matrix a and {s} entries of d")));
        }
        Ok(SrkTableau { a, b, d, d0 })
    }

    pub fn stages(&self) -> usize {
        self.b.len()
    }

    /// Whether every stage is explicit (a strictly lower triangular).
    pub fn is_explicit(&self) -> bool {
        (0..self.stages()).all(|i| (i..self.stages()).all(|j| self.a[i][j].is_zero()))
    }

    pub fn euler_maruyama() -> Self {
        SrkTableau { a: vec![ints(&[0])], b: ints(&[1]), d: ints(&[0]), d0: Q::one() }
    }

    /// X₁ = X + h f(X₁) + √h ξ.
    pub fn implicit_euler() -> Self {
        SrkTableau { a: vec![ints(&[1])], b: ints(&[1]), d: ints(&[1]), d0: Q::one() }
    }

    /// X₁ = X + h f(X + √h ξ/2) + √h ξ.
    pub fn leimkuhler_matthews() -> Self {
        SrkTableau { a: vec![ints(&[0])], b: ints(&[1]), d: vec![q(1, 2)], d0: Q::one() }
    }

    /// X̄ = X + √h ξ/2.
    pub fn leimkuhler_matthews_postprocessor() -> Self {
        SrkTableau { a: vec![ints(&[0])], b: ints(&[0]), d: ints(&[0]), d0: q(1, 2) }
    }

    /// Built-in method by name.
    pub fn named(name: &str) -> Option<Self> {
        Some(match name {
            "em" | "euler-maruyama" | "explicit-euler" => Self::euler_maruyama(),
            "implicit-euler" => Self::implicit_euler(),
            "lm" | "leimkuhler-matthews" => Self::leimkuhler_matthews(),
            "lm-post" => Self::leimkuhler_matthews_postprocessor(),
            _ => return None,
        })
    }

    /// Reads `{"a": [[..]], "b": [..], "d": [..], "d0": ..}`; entries are
    /// numbers or rational strings such as "1/2".
    pub fn from_json(text: &str) -> Result<Self, StochasticError> {
        let v: Value = serde_json::from_str(text).map_err(|e| StochasticError::Tableau(e.to_string()))?;
        let entry = |x: &Value| -> Result<Q, StochasticError> {
            let s = match x {
                Value::String(s) => s.clone(),
                Value::Number(n) => n.to_string(),
                _ => return Err(StochasticError::Tableau(format!("bad entry {x}"))),
            };
            parse_q(&s).ok_or_else(|| StochasticError::Tableau(format!("bad entry {s}")))
        };
        let vector = |key: &str| -> Result<Vec<Q>, StochasticError> {
            v.get(key)
                .and_then(Value::as_array)
                .ok_or_else(|| StochasticError::Tableau(format!("missing array '{key}'")))?
                .iter()
                .map(entry)
                .collect()
        };
        let a = v
            .get("a")
            .and_then(Value::as_array)
            .ok_or_else(|| StochasticError::Tableau("missing matrix 'a'".into()))?
            .iter()
            .map(|row| {
                row.as_array()
                    .ok_or_else(|| StochasticError::Tableau("rows of 'a' must be arrays".into()))?
                    .iter()
                    .map(entry)
                    .collect::<Result<Vec<Q>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        let b = vector("b")?;
        let d = match v.get("d") {
            Some(_) => vector("d")?,
            None => vec![Q::zero(); b.len()],
        };
        let d0 = match v.get("d0") {
            Some(x) => entry(x)?,
            None => Q::one(),
        };
        Self::new(a, b, d, d0)
    }

    pub fn to_json(&self) -> Value {
        let row = |r: &[Q]| Value::Array(r.iter().map(|x| Value::String(fmt_q(x))).collect());
        serde_json::json!({
            "a": self.a.iter().map(|r| row(r)).collect::<Vec<_>>(),
            "b": row(&self.b),
            "d": row(&self.d),
            "d0": fmt_q(&self.d0),
        })
    }
}

/// a(π) for a connected forest: a sum over stage labellings of the black
/// vertices. Roots carry b_i, an edge from parent i to child j carries a_ij,
/// a liana half under stage i carries d_i and a liana root carries d0.
/// Forests with aromas, stolons or letters get 0.
pub fn srk_value(t: &SrkTableau, f: &Forest) -> Q {
    let g = f.graph();
    if !f.is_aroma_free() || g.stolon.iter().any(Option::is_some) || g.deco.iter().any(|d| matches!(d, Deco::Letter(_))) {
        return Q::zero();
    }
    let black: Vec<usize> = (0..g.len()).filter(|&v| g.deco[v] == Deco::Black).collect();
    let mut slot = vec![usize::MAX; g.len()];
    for (k, &v) in black.iter().enumerate() {
        slot[v] = k;
    }
    let s = t.stages();
    let mut stage = vec![0usize; black.len()];
    let mut total = Q::zero();
    loop {
        let mut p = Q::one();
        for v in 0..g.len() {
            let factor = match (g.deco[v], g.succ[v]) {
                (Deco::Black, None) => &t.b[stage[slot[v]]],
                (Deco::Black, Some(w)) => &t.a[stage[slot[w]]][stage[slot[v]]],
                (_, None) => &t.d0,
                (_, Some(w)) => &t.d[stage[slot[w]]],
            };
            if factor.is_zero() {
                p = Q::zero();
                break;
            }
            p *= factor;
        }
        total += p;
        let mut k = 0;
        loop {
            if k == stage.len() {
                return total;
            }
            stage[k] += 1;
            if stage[k] < s {
                break;
            }
            stage[k] = 0;
            k += 1;
        }
    }
}

/// The character of the method, exact through order `n`.
pub fn srk_character(t: &SrkTableau, n: usize) -> Result<Functional, StochasticError> {
    let mut a = Functional::character(n);
    for f in enumerate(n, Filter::Connected)? {
        if !f.is_empty() {
            let v = srk_value(t, &f);
            a.set(f, v);
        }
    }
    Ok(a)
}
