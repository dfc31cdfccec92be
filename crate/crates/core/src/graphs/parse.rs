//! Graph expressions:
//!
//! ```text
//! expr := "cycle:" N | "complete:" N | "empty:" N
//!       | "complement(" expr ")" | "box(" expr "," expr ")" | "power(" expr "," K ")"
//! ```
//!
//! Whitespace between tokens is ignored. Offsets in errors are byte offsets
//! into the original text.

use super::Graph;
use crate::error::{Error, Result};
use crate::limits::Limits;

pub fn parse_graph_expr(text: &str) -> Result<Graph> {
    parse_graph_expr_with(text, &Limits::from_env())
}

pub fn parse_graph_expr_with(text: &str, limits: &Limits) -> Result<Graph> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        limits,
    };
    let g = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(g)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    limits: &'a Limits,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> Error {
        Error::Syntax {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", c as char)))
        }
    }

    fn ident(&mut self) -> Result<&str> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphabetic() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a graph constructor"));
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos]).expect("ascii"))
    }

    fn integer(&mut self) -> Result<usize> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an integer"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .expect("ascii")
            .parse()
            .map_err(|_| Error::Syntax {
                offset: start,
                message: "integer out of range".into(),
            })
    }

    fn expr(&mut self) -> Result<Graph> {
        let start = {
            self.skip_ws();
            self.pos
        };
        let name = self.ident()?.to_string();
        match name.as_str() {
            "cycle" | "complete" | "empty" => {
                self.expect(b':')?;
                let n = self.integer()?;
                if n > self.limits.max_vertices {
                    return Err(Error::limit(format!(
                        "{n} vertices exceeds the {}-vertex cap",
                        self.limits.max_vertices
                    )));
                }
                match name.as_str() {
                    "cycle" => Graph::cycle(n),
                    "complete" => Graph::complete(n),
                    _ => Graph::edgeless(n),
                }
            }
            "complement" => {
                self.expect(b'(')?;
                let g = self.expr()?;
                self.expect(b')')?;
                Ok(g.complement())
            }
            "box" => {
                self.expect(b'(')?;
                let g = self.expr()?;
                self.expect(b',')?;
                let h = self.expr()?;
                self.expect(b')')?;
                g.strong_product_with(&h, self.limits)
            }
            "power" => {
                self.expect(b'(')?;
                let g = self.expr()?;
                self.expect(b',')?;
                let k = self.integer()?;
                self.expect(b')')?;
                g.strong_power_with(k, self.limits)
            }
            _ => Err(Error::Syntax {
                offset: start,
                message: format!("unknown constructor '{name}'"),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_matches_constructor() {
        let g = parse_graph_expr("power(cycle:5,2)").unwrap();
        assert_eq!(g, Graph::cycle(5).unwrap().strong_power(2).unwrap());
    }

    #[test]
    fn whitespace_insensitive() {
        let a = parse_graph_expr(" box( cycle : 5 ,\tcycle:7 ) ").unwrap();
        assert_eq!(a.vertex_count(), 35);
        let b = parse_graph_expr("complement(empty:2)").unwrap();
        assert_eq!(b, Graph::complete(2).unwrap());
    }

    #[test]
    fn syntax_errors_carry_offsets() {
        match parse_graph_expr("cycle:abc") {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 6),
            other => panic!("unexpected {other:?}"),
        }
        match parse_graph_expr("wheel:5") {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 0),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_graph_expr("cycle:5 x"),
            Err(Error::Syntax { offset: 8, .. })
        ));
        assert!(matches!(
            parse_graph_expr("box(cycle:5"),
            Err(Error::Syntax { offset: 11, .. })
        ));
    }

    #[test]
    fn semantic_errors_propagate() {
        assert!(matches!(parse_graph_expr("cycle:2"), Err(Error::InvalidArgument(_))));
        assert!(matches!(
            parse_graph_expr("power(cycle:7,5)"),
            Err(Error::ResourceLimit(_))
        ));
        assert!(matches!(
            parse_graph_expr("power(cycle:7,0)"),
            Err(Error::InvalidArgument(_))
        ));
    }
}
