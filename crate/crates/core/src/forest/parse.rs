//! Recursive-descent parser for the bracket notation.
//!
//! ```text
//! forest := "{}" | comp ("," comp)*
//! comp   := tree | "(" tree ("," tree)* ")" | tree "=" tree | INT
//! tree   := NODE ("[" item ("," item)* "]")?
//! item   := tree | INT
//! ```

use super::graph::{Deco, Graph};
use super::ForestError;

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    g: Graph,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: &str) -> Result<T, ForestError> {
        Err(ForestError::Syntax { pos: self.pos, msg: msg.to_string() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), ForestError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(&format!("expected '{}'", c as char))
        }
    }

    fn int(&mut self) -> Result<u32, ForestError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let txt = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
        match txt.parse::<u32>() {
            Ok(0) | Err(_) => {
                self.pos = start;
                self.err("expected a positive liana label")
            }
            Ok(n) => Ok(n),
        }
    }

    /// Parses a tree whose root gets successor `parent`; returns the root.
    fn tree(&mut self, parent: Option<usize>) -> Result<usize, ForestError> {
        match self.peek() {
            Some(c) if c.is_ascii_lowercase() => {
                self.pos += 1;
                let v = self.g.add(Deco::from_letter(c as char), parent);
                if self.peek() == Some(b'[') {
                    self.pos += 1;
                    loop {
                        self.item(v)?;
                        match self.peek() {
                            Some(b',') => self.pos += 1,
                            Some(b']') => {
                                self.pos += 1;
                                break;
                            }
                            _ => return self.err("expected ',' or ']'"),
                        }
                    }
                }
                Ok(v)
            }
            _ => self.err("expected a vertex letter"),
        }
    }

    fn item(&mut self, parent: usize) -> Result<(), ForestError> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let l = self.int()?;
                self.g.add(Deco::Liana(l), Some(parent));
                Ok(())
            }
            _ => self.tree(Some(parent)).map(|_| ()),
        }
    }

    fn comp(&mut self) -> Result<(), ForestError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let mut roots = vec![self.tree(None)?];
                while self.peek() == Some(b',') {
                    self.pos += 1;
                    roots.push(self.tree(None)?);
                }
                self.expect(b')')?;
                for i in 0..roots.len() {
                    self.g.succ[roots[i]] = Some(roots[(i + 1) % roots.len()]);
                }
                Ok(())
            }
            Some(c) if c.is_ascii_digit() => {
                let l = self.int()?;
                self.g.add(Deco::Liana(l), None);
                Ok(())
            }
            _ => {
                let a = self.tree(None)?;
                if self.peek() == Some(b'=') {
                    self.pos += 1;
                    let b = self.tree(None)?;
                    self.g.link_stolon(a, b);
                }
                Ok(())
            }
        }
    }

    fn forest(&mut self) -> Result<(), ForestError> {
        if self.peek() == Some(b'{') {
            self.pos += 1;
            self.expect(b'}')?;
        } else {
            loop {
                self.comp()?;
                if self.peek() == Some(b',') {
                    self.pos += 1;
                } else {
                    break;
                }
            }
        }
        if self.peek().is_some() {
            return self.err("trailing input");
        }
        Ok(())
    }
}

/// Parses text into a raw graph (not validated, not canonical).
pub(crate) fn parse_graph(text: &str) -> Result<Graph, ForestError> {
    let mut p = Parser { s: text.as_bytes(), pos: 0, g: Graph::new() };
    p.forest()?;
    Ok(p.g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn structure() {
        let g = parse_graph("b[b,1],1").unwrap();
        assert_eq!(g.len(), 4);
        assert_eq!(g.roots().len(), 2);
        let g = parse_graph("(b,b[b])").unwrap();
        assert_eq!(g.succ[0], Some(1));
        assert_eq!(g.succ[1], Some(0));
        let g = parse_graph("b=b[w]").unwrap();
        assert_eq!(g.count_stolons(), 1);
        assert_eq!(g.deco[2], Deco::Letter('w'));
        assert!(parse_graph("{}").unwrap().is_empty());
    }

    #[test]
    fn syntax_errors() {
        for s in ["", "b[", "b]", "(b", "b,,b", "B", "b[0]", "{}b"] {
            assert!(parse_graph(s).is_err(), "{s}");
        }
    }
}
