//! Undirected simple graphs, strong products, and exact combinatorial invariants.
//!
//! Vertices are `0..n`. The strong product `G ⊠ H` maps the pair `(i, j)` to the
//! flat index `i * |V(H)| + j`, the same row-major order used by
//! [`crate::symmat::SymMatrix::kron`], so a Kronecker product of matrices indexed
//! by `G` and `H` is indexed by `G ⊠ H` without any permutation.

mod bitset;
mod invariants;
mod io;
mod parse;

pub use bitset::BitSet;
pub use invariants::{
    chromatic_number, chromatic_number_with, independence_number, independence_number_with,
    maximum_independent_set,
};
pub use io::{read_edge_list, write_edge_list};
pub use parse::{parse_graph_expr, parse_graph_expr_with};

use crate::error::{Error, Result};
use crate::limits::Limits;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    rows: Vec<BitSet>,
}

impl Graph {
    /// Graph on `n >= 1` vertices with no edges.
    pub fn edgeless(n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::invalid("a graph needs at least one vertex"));
        }
        Ok(Graph {
            n,
            rows: vec![BitSet::new(n); n],
        })
    }

    pub fn complete(n: usize) -> Result<Self> {
        let mut g = Graph::edgeless(n)?;
        for i in 0..n {
            for j in i + 1..n {
                g.set_edge(i, j);
            }
        }
        Ok(g)
    }

    /// Cycle `C_n` with edges `(i, i+1 mod n)`.
    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::invalid(format!("cycle needs n >= 3, got {n}")));
        }
        let mut g = Graph::edgeless(n)?;
        for i in 0..n {
            g.set_edge(i, (i + 1) % n);
        }
        Ok(g)
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Graph::edgeless(n)?;
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        if u >= self.n || v >= self.n {
            return Err(Error::invalid(format!(
                "edge ({u}, {v}) out of range for {} vertices",
                self.n
            )));
        }
        if u == v {
            return Err(Error::invalid(format!("self-loop at vertex {u}")));
        }
        self.set_edge(u, v);
        Ok(())
    }

    fn set_edge(&mut self, u: usize, v: usize) {
        self.rows[u].insert(v);
        self.rows[v].insert(u);
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(BitSet::len).sum::<usize>() / 2
    }

    #[inline]
    pub fn is_adjacent(&self, i: usize, j: usize) -> bool {
        self.rows[i].contains(j)
    }

    /// The reflexive relation `i ∼ j`: equal or adjacent.
    #[inline]
    pub fn is_related(&self, i: usize, j: usize) -> bool {
        i == j || self.is_adjacent(i, j)
    }

    pub fn neighbors(&self, i: usize) -> &BitSet {
        &self.rows[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.rows[i].len()
    }

    /// Edges `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|u| self.rows[u].iter().filter(move |&v| v > u).map(move |v| (u, v)))
            .collect()
    }

    /// Distinct pairs `(u, v)`, `u < v`, that are not adjacent.
    pub fn non_edges(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|u| (u + 1..self.n).map(move |v| (u, v)))
            .filter(|&(u, v)| !self.is_adjacent(u, v))
            .collect()
    }

    pub fn complement(&self) -> Graph {
        let mut g = Graph {
            n: self.n,
            rows: vec![BitSet::new(self.n); self.n],
        };
        for (u, v) in self.non_edges() {
            g.set_edge(u, v);
        }
        g
    }

    /// Strong product with the default construction cap.
    pub fn strong_product(&self, other: &Graph) -> Result<Graph> {
        self.strong_product_with(other, &Limits::from_env())
    }

    pub fn strong_product_with(&self, other: &Graph, limits: &Limits) -> Result<Graph> {
        let m = other.n;
        let n = self
            .n
            .checked_mul(m)
            .filter(|&n| n <= limits.max_vertices)
            .ok_or_else(|| {
                Error::limit(format!(
                    "strong product of {} and {} vertices exceeds the {}-vertex cap",
                    self.n, m, limits.max_vertices
                ))
            })?;
        let mut g = Graph {
            n,
            rows: vec![BitSet::new(n); n],
        };
        for i in 0..self.n {
            for j in 0..m {
                let a = i * m + j;
                for k in 0..self.n {
                    if !self.is_related(i, k) {
                        continue;
                    }
                    for l in 0..m {
                        let b = k * m + l;
                        if a != b && other.is_related(j, l) {
                            g.rows[a].insert(b);
                        }
                    }
                }
            }
        }
        Ok(g)
    }

    /// `G^k`, the `k`-fold strong product.
    pub fn strong_power(&self, k: usize) -> Result<Graph> {
        self.strong_power_with(k, &Limits::from_env())
    }

    pub fn strong_power_with(&self, k: usize, limits: &Limits) -> Result<Graph> {
        if k < 1 {
            return Err(Error::invalid("strong power needs k >= 1"));
        }
        let total = (1..k).try_fold(self.n, |acc, _| acc.checked_mul(self.n));
        match total {
            Some(t) if t <= limits.max_vertices => {}
            _ => {
                return Err(Error::limit(format!(
                    "{}^{} vertices exceeds the {}-vertex cap",
                    self.n, k, limits.max_vertices
                )))
            }
        }
        let mut g = self.clone();
        for _ in 1..k {
            g = g.strong_product_with(self, limits)?;
        }
        Ok(g)
    }

    /// Adjacency matrix as dense `0/1` rows.
    pub fn adjacency_rows(&self) -> Vec<Vec<bool>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.is_adjacent(i, j)).collect())
            .collect()
    }
}
