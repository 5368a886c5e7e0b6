//! Parser for expression text: rationals, x1..x3 (x, y, z as aliases),
//! sin(), cos(), +, -, *, ^ with integer exponents, parentheses.

use num_traits::ToPrimitive;

use super::expr::{Expr, Mono, MAX_DIM};
use super::ElemDiffError;
use crate::series::parse_q;

struct Parser<'a> {
    s: &'a [u8],
    i: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> ElemDiffError {
        ElemDiffError::Parse { pos: self.i, msg: msg.to_string() }
    }

    fn skip(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip();
        self.s.get(self.i).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ElemDiffError> {
        let mut e = if self.eat(b'-') { self.term()?.neg() } else { self.term()? };
        loop {
            if self.eat(b'+') {
                e = e.add(&self.term()?);
            } else if self.eat(b'-') {
                e = e.sub(&self.term()?);
            } else {
                return Ok(e);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ElemDiffError> {
        let mut e = self.power()?;
        while self.eat(b'*') {
            e = e.mul(&self.power()?);
        }
        Ok(e)
    }

    fn power(&mut self) -> Result<Expr, ElemDiffError> {
        let base = self.unary()?;
        if self.eat(b'^') {
            self.skip();
            let start = self.i;
            while self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
                self.i += 1;
            }
            let n: u32 = std::str::from_utf8(&self.s[start..self.i])
                .unwrap()
                .parse()
                .map_err(|_| self.err("expected a nonnegative integer exponent"))?;
            return Ok(base.pow(n));
        }
        Ok(base)
    }

    fn unary(&mut self) -> Result<Expr, ElemDiffError> {
        if self.eat(b'-') {
            return Ok(self.unary()?.neg());
        }
        self.primary()
    }

    fn ident(&mut self) -> String {
        let start = self.i;
        while self.i < self.s.len() && (self.s[self.i].is_ascii_alphanumeric() || self.s[self.i] == b'_') {
            self.i += 1;
        }
        String::from_utf8_lossy(&self.s[start..self.i]).into_owned()
    }

    fn primary(&mut self) -> Result<Expr, ElemDiffError> {
        match self.peek() {
            Some(b'(') => {
                self.i += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.i;
                while self.i < self.s.len() && (self.s[self.i].is_ascii_digit() || b"./".contains(&self.s[self.i])) {
                    self.i += 1;
                }
                let text = std::str::from_utf8(&self.s[start..self.i]).unwrap();
                let v = parse_q(text).ok_or_else(|| self.err("bad number"))?;
                Ok(Expr::constant(v))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let name = self.ident();
                match name.as_str() {
                    "sin" | "cos" => {
                        if !self.eat(b'(') {
                            return Err(self.err("expected '(' after function name"));
                        }
                        let arg = self.expr()?;
                        if !self.eat(b')') {
                            return Err(self.err("expected ')'"));
                        }
                        let k = linear_coefficients(&arg).ok_or_else(|| {
                            self.err("trigonometric arguments must be integer combinations of variables")
                        })?;
                        let (c, s) = Expr::cos_sin_linear(&k);
                        Ok(if name == "sin" { s } else { c })
                    }
                    "x" => Ok(Expr::var(0)),
                    "y" => Ok(Expr::var(1)),
                    "z" => Ok(Expr::var(2)),
                    _ => match name.strip_prefix('x').and_then(|n| n.parse::<usize>().ok()) {
                        Some(n) if (1..=MAX_DIM).contains(&n) => Ok(Expr::var(n - 1)),
                        _ => Err(self.err(&format!("unknown identifier '{name}'"))),
                    },
                }
            }
            _ => Err(self.err("unexpected input")),
        }
    }
}

/// Integer coefficients k with e = Σ k_i x_i, if e has that form.
fn linear_coefficients(e: &Expr) -> Option<Vec<i32>> {
    let mut k = vec![0i32; MAX_DIM];
    for (m, c) in e.terms() {
        let vars: Vec<usize> = (0..MAX_DIM).filter(|&i| m.pow[i] != 0).collect();
        if m.trig != Mono::ONE.trig || vars.len() != 1 || m.pow[vars[0]] != 1 || !c.is_integer() {
            return None;
        }
        k[vars[0]] = c.to_integer().to_i32()?;
    }
    Some(k)
}

/// Parses expression text into normal form.
pub fn parse_expr(text: &str) -> Result<Expr, ElemDiffError> {
    let mut p = Parser { s: text.as_bytes(), i: 0 };
    let e = p.expr()?;
    if p.peek().is_some() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{q, qi};

    #[test]
    fn parses_potential() {
        let v = parse_expr("sin(x1) + cos(2*x2)*1/4").unwrap();
        let expect = Expr::sin(0, 1).add(&Expr::cos(1, 2).scale(&q(1, 4)));
        assert_eq!(v, expect);
        assert_eq!(parse_expr("x^2 - 3").unwrap(), Expr::var(0).pow(2).sub(&Expr::constant(qi(3))));
        assert_eq!(parse_expr("2*sin(x)*cos(x)").unwrap(), Expr::sin(0, 2));
        assert_eq!(parse_expr("-(1/2)").unwrap(), Expr::constant(q(-1, 2)));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_expr("sin(x1*x2)").is_err());
        assert!(parse_expr("sin(x + 1)").is_err());
        assert!(parse_expr("x4").is_err());
        assert!(parse_expr("(x").is_err());
        assert!(parse_expr("x ^ -1").is_err());
    }
}
