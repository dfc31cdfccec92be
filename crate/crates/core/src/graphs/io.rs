//! Edge-list text format.
//!
//! The writer emits a header `p <n> <m>` followed by one `u v` line per edge
//! (0-based, `u < v`). The reader also accepts DIMACS input: `c` comment
//! lines, a `p edge <n> <m>` header and 1-based `e u v` lines.

use super::Graph;
use crate::error::{Error, Result};

pub fn write_edge_list(g: &Graph) -> String {
    let edges = g.edges();
    let mut out = format!("p {} {}\n", g.vertex_count(), edges.len());
    for (u, v) in edges {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

pub fn read_edge_list(text: &str) -> Result<Graph> {
    let mut graph: Option<Graph> = None;
    let mut declared_edges = 0usize;
    for (lineno, line) in text.lines().enumerate() {
        let fields: Vec<&str> = line.split_whitespace().collect();
        let bad = |what: &str| Error::invalid(format!("line {}: {what}", lineno + 1));
        let num = |s: &str| s.parse::<usize>().map_err(|_| bad("expected an integer"));
        match fields.as_slice() {
            [] => {}
            ["c", ..] => {}
            ["p", rest @ ..] => {
                if graph.is_some() {
                    return Err(bad("duplicate header"));
                }
                let (n, m) = match rest {
                    [n, m] => (num(n)?, num(m)?),
                    [_, n, m] => (num(n)?, num(m)?),
                    _ => return Err(bad("malformed header")),
                };
                declared_edges = m;
                graph = Some(Graph::edgeless(n)?);
            }
            ["e", u, v] => {
                let g = graph.as_mut().ok_or_else(|| bad("edge before header"))?;
                let (u, v) = (num(u)?, num(v)?);
                if u == 0 || v == 0 {
                    return Err(bad("DIMACS vertices are 1-based"));
                }
                g.add_edge(u - 1, v - 1).map_err(|e| bad(&e.to_string()))?;
            }
            [u, v] => {
                let g = graph.as_mut().ok_or_else(|| bad("edge before header"))?;
                g.add_edge(num(u)?, num(v)?)
                    .map_err(|e| bad(&e.to_string()))?;
            }
            _ => return Err(bad("unrecognised line")),
        }
    }
    let g = graph.ok_or_else(|| Error::invalid("missing 'p' header"))?;
    if g.edge_count() != declared_edges {
        return Err(Error::invalid(format!(
            "header declares {declared_edges} edges, found {}",
            g.edge_count()
        )));
    }
    Ok(g)
}
