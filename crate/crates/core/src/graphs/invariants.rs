//! Exact independence and chromatic numbers.

use super::{BitSet, Graph};
use crate::error::{Error, Result};
use crate::limits::Limits;

/// Exact `α(G)`.
pub fn independence_number(g: &Graph) -> Result<usize> {
    independence_number_with(g, &Limits::from_env())
}

pub fn independence_number_with(g: &Graph, limits: &Limits) -> Result<usize> {
    maximum_independent_set(g, limits).map(|s| s.len())
}

/// A maximum independent set, found by branch and bound.
///
/// Branches on the maximum-degree vertex of the remaining candidate set (lowest
/// index on ties), include-branch first. The bound is a greedy clique cover of
/// the candidates, which is at least their independence number.
pub fn maximum_independent_set(g: &Graph, limits: &Limits) -> Result<Vec<usize>> {
    let n = g.vertex_count();
    if n > limits.max_alpha_vertices {
        return Err(Error::limit(format!(
            "exact independence number limited to {} vertices, got {n}",
            limits.max_alpha_vertices
        )));
    }
    let mut search = MisSearch {
        g,
        current: Vec::new(),
        best: Vec::new(),
    };
    search.run(BitSet::full(n));
    search.best.sort_unstable();
    Ok(search.best)
}

struct MisSearch<'a> {
    g: &'a Graph,
    current: Vec<usize>,
    best: Vec<usize>,
}

impl MisSearch<'_> {
    fn run(&mut self, cand: BitSet) {
        if cand.is_empty() {
            if self.current.len() > self.best.len() {
                self.best = self.current.clone();
            }
            return;
        }
        if self.current.len() + clique_cover_size(self.g, &cand) <= self.best.len() {
            return;
        }
        let mut pivot = usize::MAX;
        let mut pivot_deg = 0;
        for v in cand.iter() {
            let d = self.g.neighbors(v).intersection_len(&cand);
            if pivot == usize::MAX || d > pivot_deg {
                pivot = v;
                pivot_deg = d;
            }
        }
        if pivot_deg == 0 {
            // remaining candidates are pairwise non-adjacent
            let before = self.current.len();
            self.current.extend(cand.iter());
            if self.current.len() > self.best.len() {
                self.best = self.current.clone();
            }
            self.current.truncate(before);
            return;
        }

        let mut with = cand.clone();
        with.difference_with(self.g.neighbors(pivot));
        with.remove(pivot);
        self.current.push(pivot);
        self.run(with);
        self.current.pop();

        let mut without = cand;
        without.remove(pivot);
        self.run(without);
    }
}

/// Number of cliques in a first-fit clique cover of `cand` (ascending vertex order).
fn clique_cover_size(g: &Graph, cand: &BitSet) -> usize {
    // each entry holds the candidates adjacent to every member of that clique
    let mut commons: Vec<BitSet> = Vec::new();
    'next: for v in cand.iter() {
        for common in commons.iter_mut() {
            if common.contains(v) {
                common.intersect_with(g.neighbors(v));
                continue 'next;
            }
        }
        let mut common = g.neighbors(v).clone();
        common.intersect_with(cand);
        commons.push(common);
    }
    commons.len()
}

/// Exact `χ(G)`.
pub fn chromatic_number(g: &Graph) -> Result<usize> {
    chromatic_number_with(g, &Limits::from_env())
}

/// DSatur branch and bound: colour the most saturated vertex next (ties by degree,
/// then lowest index) and never open more than one new colour per step.
pub fn chromatic_number_with(g: &Graph, limits: &Limits) -> Result<usize> {
    let n = g.vertex_count();
    if n > limits.max_chi_vertices {
        return Err(Error::limit(format!(
            "exact chromatic number limited to {} vertices, got {n}",
            limits.max_chi_vertices
        )));
    }
    let lower = greedy_clique(g);
    let mut search = ColorSearch {
        g,
        colors: vec![usize::MAX; n],
        best: n + 1,
        lower,
    };
    search.run(0, 0);
    Ok(search.best)
}

fn greedy_clique(g: &Graph) -> usize {
    let mut best = 1;
    for start in 0..g.vertex_count() {
        let mut cand = g.neighbors(start).clone();
        let mut size = 1;
        while let Some(v) = cand.iter().max_by_key(|&v| g.neighbors(v).intersection_len(&cand)) {
            size += 1;
            cand.intersect_with(g.neighbors(v));
        }
        best = best.max(size);
    }
    best
}

struct ColorSearch<'a> {
    g: &'a Graph,
    colors: Vec<usize>,
    best: usize,
    lower: usize,
}

impl ColorSearch<'_> {
    fn run(&mut self, colored: usize, used: usize) {
        if used >= self.best || self.best == self.lower {
            return;
        }
        let n = self.g.vertex_count();
        if colored == n {
            self.best = used;
            return;
        }
        let mut pick = usize::MAX;
        let mut key = (0usize, 0usize);
        for v in (0..n).filter(|&v| self.colors[v] == usize::MAX) {
            let mut seen = vec![false; used];
            let mut deg = 0;
            for u in self.g.neighbors(v).iter() {
                if self.colors[u] == usize::MAX {
                    deg += 1;
                } else {
                    seen[self.colors[u]] = true;
                }
            }
            let sat = seen.iter().filter(|&&s| s).count();
            if pick == usize::MAX || (sat, deg) > key {
                pick = v;
                key = (sat, deg);
            }
        }
        for c in 0..=used.min(self.best.saturating_sub(2)) {
            if self.g.neighbors(pick).iter().any(|u| self.colors[u] == c) {
                continue;
            }
            self.colors[pick] = c;
            self.run(colored + 1, used.max(c + 1));
            self.colors[pick] = usize::MAX;
            if self.best == self.lower {
                return;
            }
        }
    }
}
