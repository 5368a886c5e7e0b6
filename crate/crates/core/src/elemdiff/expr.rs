//! Trigonometric polynomials in x₁..x₃ with exact rational coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::series::{fmt_q, q, q_to_f64, qi, Q};

/// Largest supported dimension.
pub const MAX_DIM: usize = 3;

/// One basis element Π x_i^{p_i} · t_i(x_i), where the trig code t ≥ 0 means
/// cos(t·x) and t < 0 means sin(−t·x).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mono {
    pub pow: [u32; MAX_DIM],
    pub trig: [i32; MAX_DIM],
}

impl Mono {
    pub const ONE: Mono = Mono { pow: [0; MAX_DIM], trig: [0; MAX_DIM] };

    fn is_one(&self) -> bool {
        *self == Mono::ONE
    }
}

/// Product of two univariate trig factors as a list of (code, ±½ or 1).
fn trig_mul(a: i32, b: i32) -> Vec<(i32, Q)> {
    if a == 0 {
        return vec![(b, Q::one())];
    }
    if b == 0 {
        return vec![(a, Q::one())];
    }
    let h = q(1, 2);
    let (ka, kb) = (a.abs(), b.abs());
    let sin_of = |k: i32, c: Q| -> Option<(i32, Q)> {
        match k.cmp(&0) {
            std::cmp::Ordering::Equal => None,
            std::cmp::Ordering::Greater => Some((-k, c)),
            std::cmp::Ordering::Less => Some((k, -c)),
        }
    };
    match (a >= 0, b >= 0) {
        (true, true) => vec![((ka - kb).abs(), h.clone()), (ka + kb, h)],
        (false, false) => vec![((ka - kb).abs(), h.clone()), (ka + kb, -h)],
        (false, true) => [sin_of(ka + kb, h.clone()), sin_of(ka - kb, h)].into_iter().flatten().collect(),
        (true, false) => [sin_of(ka + kb, h.clone()), sin_of(kb - ka, h)].into_iter().flatten().collect(),
    }
}

/// Exact trigonometric polynomial in normal form: no zero coefficients.
#[derive(Clone, PartialEq, Eq, Default, Hash)]
pub struct Expr {
    terms: BTreeMap<Mono, Q>,
}

impl Expr {
    pub fn zero() -> Expr {
        Expr::default()
    }

    pub fn constant(c: Q) -> Expr {
        let mut e = Expr::zero();
        e.add_term(Mono::ONE, c);
        e
    }

    pub fn one() -> Expr {
        Expr::constant(Q::one())
    }

    /// The coordinate x_i (0-based).
    pub fn var(i: usize) -> Expr {
        let mut m = Mono::ONE;
        m.pow[i] = 1;
        Expr::mono(m)
    }

    /// cos(k·x_i).
    pub fn cos(i: usize, k: i32) -> Expr {
        let mut m = Mono::ONE;
        m.trig[i] = k.abs();
        Expr::mono(m)
    }

    /// sin(k·x_i).
    pub fn sin(i: usize, k: i32) -> Expr {
        if k == 0 {
            return Expr::zero();
        }
        let mut m = Mono::ONE;
        m.trig[i] = -k.abs();
        let e = Expr::mono(m);
        if k < 0 {
            e.neg()
        } else {
            e
        }
    }

    /// cos and sin of Σ k_i x_i by angle addition.
    pub fn cos_sin_linear(k: &[i32]) -> (Expr, Expr) {
        let mut c = Expr::one();
        let mut s = Expr::zero();
        for (i, &ki) in k.iter().enumerate() {
            if ki == 0 {
                continue;
            }
            let (ci, si) = (Expr::cos(i, ki), Expr::sin(i, ki));
            let nc = c.mul(&ci).sub(&s.mul(&si));
            let ns = s.mul(&ci).add(&c.mul(&si));
            c = nc;
            s = ns;
        }
        (c, s)
    }

    pub fn mono(m: Mono) -> Expr {
        let mut e = Expr::zero();
        e.terms.insert(m, Q::one());
        e
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &Q)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Constant value when the expression has no variable part.
    pub fn as_constant(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Q::zero()),
            1 => self.terms.get(&Mono::ONE).cloned(),
            _ => None,
        }
    }

    /// Whether no polynomial factor occurs, i.e. the expression is periodic.
    pub fn is_periodic(&self) -> bool {
        self.terms.keys().all(|m| m.pow.iter().all(|&p| p == 0))
    }

    pub fn add_term(&mut self, m: Mono, c: Q) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(m).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn add_scaled(&mut self, other: &Expr, c: &Q) {
        if c.is_zero() {
            return;
        }
        for (m, v) in &other.terms {
            self.add_term(*m, v * c);
        }
    }

    pub fn add(&self, other: &Expr) -> Expr {
        let mut e = self.clone();
        e.add_scaled(other, &Q::one());
        e
    }

    pub fn sub(&self, other: &Expr) -> Expr {
        let mut e = self.clone();
        e.add_scaled(other, &-Q::one());
        e
    }

    pub fn neg(&self) -> Expr {
        self.scale(&-Q::one())
    }

    pub fn scale(&self, c: &Q) -> Expr {
        if c.is_zero() {
            return Expr::zero();
        }
        Expr { terms: self.terms.iter().map(|(m, v)| (*m, v * c)).collect() }
    }

    pub fn mul(&self, other: &Expr) -> Expr {
        let mut out = Expr::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let c = ca * cb;
                if ma.is_one() {
                    out.add_term(*mb, c);
                    continue;
                }
                if mb.is_one() {
                    out.add_term(*ma, c);
                    continue;
                }
                let mut parts = vec![(Mono::ONE, c)];
                for i in 0..MAX_DIM {
                    let prods = trig_mul(ma.trig[i], mb.trig[i]);
                    let mut next = Vec::with_capacity(parts.len() * prods.len());
                    for (m, v) in &parts {
                        for (t, w) in &prods {
                            let mut m2 = *m;
                            m2.pow[i] = ma.pow[i] + mb.pow[i];
                            m2.trig[i] = *t;
                            next.push((m2, v * w));
                        }
                    }
                    parts = next;
                }
                for (m, v) in parts {
                    out.add_term(m, v);
                }
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Expr {
        let mut r = Expr::one();
        for _ in 0..n {
            r = r.mul(self);
        }
        r
    }

    /// ∂/∂x_i.
    pub fn partial(&self, i: usize) -> Expr {
        let mut out = Expr::zero();
        for (m, c) in &self.terms {
            let p = m.pow[i];
            let t = m.trig[i];
            if p > 0 {
                let mut m2 = *m;
                m2.pow[i] = p - 1;
                out.add_term(m2, c * qi(p as i64));
            }
            if t != 0 {
                let mut m2 = *m;
                m2.trig[i] = -t;
                // (cos kx)' = −k sin kx, (sin kx)' = k cos kx
                let k = qi(t.abs() as i64);
                out.add_term(m2, if t > 0 { -(c * k) } else { c * k });
            }
        }
        out
    }

    /// Mixed partial derivative along the listed (0-based) indices.
    pub fn partial_many(&self, idx: &[usize]) -> Expr {
        idx.iter().fold(self.clone(), |e, &i| e.partial(i))
    }

    /// ∂^k/∂x_i^k.
    pub fn partial_k(&self, i: usize, k: usize) -> Expr {
        (0..k).fold(self.clone(), |e, _| e.partial(i))
    }

    /// Floating-point value at a point (missing coordinates are zero).
    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut cache: Vec<BTreeMap<i32, f64>> = vec![BTreeMap::new(); MAX_DIM];
        let mut total = 0.0;
        for (m, c) in &self.terms {
            let mut v = q_to_f64(c);
            for i in 0..MAX_DIM {
                let xi = x.get(i).copied().unwrap_or(0.0);
                if m.pow[i] > 0 {
                    v *= xi.powi(m.pow[i] as i32);
                }
                let t = m.trig[i];
                if t != 0 {
                    let f = *cache[i].entry(t).or_insert_with(|| {
                        if t > 0 {
                            (t as f64 * xi).cos()
                        } else {
                            (-t as f64 * xi).sin()
                        }
                    });
                    v *= f;
                }
            }
            total += v;
        }
        total
    }

    /// Floating-point copy for repeated evaluation.
    pub fn numeric(&self) -> NumExpr {
        NumExpr { terms: self.terms.iter().map(|(m, c)| (q_to_f64(c), *m)).collect() }
    }

    /// Highest variable index used, plus one.
    pub fn dim(&self) -> usize {
        self.terms
            .keys()
            .map(|m| (0..MAX_DIM).rev().find(|&i| m.pow[i] != 0 || m.trig[i] != 0).map_or(0, |i| i + 1))
            .max()
            .unwrap_or(0)
    }
}

/// An [`Expr`] with f64 coefficients, for hot evaluation loops.
#[derive(Clone, Debug)]
pub struct NumExpr {
    terms: Vec<(f64, Mono)>,
}

impl NumExpr {
    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut total = 0.0;
        for (c, m) in &self.terms {
            let mut v = *c;
            for (i, &xi) in x.iter().enumerate().take(MAX_DIM) {
                if m.pow[i] > 0 {
                    v *= xi.powi(m.pow[i] as i32);
                }
                let t = m.trig[i];
                if t > 0 {
                    v *= (t as f64 * xi).cos();
                } else if t < 0 {
                    v *= (-t as f64 * xi).sin();
                }
            }
            total += v;
        }
        total
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (m, c)) in self.terms.iter().enumerate() {
            let mut factors = Vec::new();
            for i in 0..MAX_DIM {
                match m.pow[i] {
                    0 => {}
                    1 => factors.push(format!("x{}", i + 1)),
                    p => factors.push(format!("x{}^{}", i + 1, p)),
                }
                let t = m.trig[i];
                let arg = |k: i32| if k == 1 { format!("x{}", i + 1) } else { format!("{k}*x{}", i + 1) };
                if t > 0 {
                    factors.push(format!("cos({})", arg(t)));
                } else if t < 0 {
                    factors.push(format!("sin({})", arg(-t)));
                }
            }
            let neg = c.is_negative();
            let a = c.abs();
            if n > 0 {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            } else if neg {
                write!(f, "-")?;
            }
            if factors.is_empty() {
                write!(f, "{}", fmt_q(&a))?;
            } else if a.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{}*{}", fmt_q(&a), factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivatives() {
        assert_eq!(Expr::sin(0, 1).partial(0), Expr::cos(0, 1));
        assert_eq!(Expr::cos(0, 2).partial_k(0, 4), Expr::cos(0, 2).scale(&qi(16)));
        let x = Expr::var(0).mul(&Expr::sin(0, 3));
        assert_eq!(x.partial(0), Expr::sin(0, 3).add(&Expr::var(0).mul(&Expr::cos(0, 3)).scale(&qi(3))));
    }

    #[test]
    fn products() {
        let s = Expr::sin(0, 1);
        let c = Expr::cos(0, 1);
        let one = s.mul(&s).add(&c.mul(&c));
        assert_eq!(one, Expr::one());
        assert_eq!(s.mul(&c).scale(&qi(2)), Expr::sin(0, 2));
        let (c12, s12) = Expr::cos_sin_linear(&[1, -1]);
        let v = c12.eval(&[0.3, 0.7]);
        assert!((v - (0.3f64 - 0.7).cos()).abs() < 1e-14);
        assert!((s12.eval(&[0.3, 0.7]) - (0.3f64 - 0.7).sin()).abs() < 1e-14);
    }

    #[test]
    fn mixed_partials_commute() {
        let e = Expr::sin(0, 2).mul(&Expr::cos(1, 3)).add(&Expr::var(1).pow(2).mul(&Expr::sin(0, 1)));
        assert_eq!(e.partial(0).partial(1), e.partial(1).partial(0));
    }
}
