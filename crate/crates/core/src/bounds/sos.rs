//! Coefficient matching for `(Σ x_k²)^r · Σ_ij Q_ij x_i² x_j²` against a Gram form
//! `m(x)ᵀ G m(x)` over the homogeneous monomials of degree `r + 2`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};

/// Homogeneous monomials of one degree in graded lexicographic order
/// (`x₀^d` first, then decreasing powers of `x₀`, and so on).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonomialBasis {
    pub n: usize,
    pub degree: u32,
    pub monomials: Vec<Vec<u32>>,
}

impl MonomialBasis {
    pub fn homogeneous(n: usize, degree: u32) -> Self {
        fn fill(rest: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if rest == 1 {
                prefix.push(left);
                out.push(prefix.clone());
                prefix.pop();
                return;
            }
            for e in (0..=left).rev() {
                prefix.push(e);
                fill(rest - 1, left - e, prefix, out);
                prefix.pop();
            }
        }
        let mut monomials = Vec::new();
        if n > 0 {
            fill(n, degree, &mut Vec::with_capacity(n), &mut monomials);
        }
        MonomialBasis { n, degree, monomials }
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }
}

/// How the Gram matrix is parametrised.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GramLayout {
    /// One PSD block over the whole basis and one equation per monomial of
    /// degree `2(r + 2)`.
    #[default]
    Full,
    /// The target is invariant under every sign flip `x_i → -x_i`, so a Gram
    /// matrix can be averaged over that group without changing feasibility.
    /// The averaged matrix is block diagonal by exponent parity, and only the
    /// all-even monomials carry equations.
    SignSymmetric,
}

/// One coefficient equation: `Σ G-entries = Σ coeff·Q_ij`.
#[derive(Clone, Debug)]
pub struct SosRow {
    pub alpha: Vec<u32>,
    /// `(block, p, q)` with `p <= q` local to the block; each contributes
    /// `G_pq + G_qp` (or `G_pp`).
    pub gram: Vec<(usize, usize, usize)>,
    /// Exact integer coefficients of `Q_ij`, `i <= j` (off-diagonal terms
    /// already counted for both orderings).
    pub target: Vec<((usize, usize), i64)>,
}

#[derive(Clone, Debug)]
pub struct SosSystem {
    pub r: u32,
    pub basis: MonomialBasis,
    /// Basis indices of each Gram block.
    pub blocks: Vec<Vec<usize>>,
    pub rows: Vec<SosRow>,
}

/// Largest Gram order accepted.
pub const MAX_GRAM_ORDER: usize = 128;
/// Largest number of coefficient equations accepted.
pub const MAX_SOS_ROWS: usize = 1_000;

pub(crate) fn multinomial(parts: &[u32]) -> i64 {
    let mut acc: i64 = 1;
    let mut total: i64 = 0;
    for &k in parts {
        for t in 1..=k as i64 {
            total += 1;
            acc = acc * total / t;
        }
    }
    acc
}

pub fn sos_system(n: usize, r: u32, layout: GramLayout) -> Result<SosSystem> {
    if n == 0 {
        return Err(Error::invalid("empty matrix"));
    }
    let basis = MonomialBasis::homogeneous(n, r + 2);
    if basis.len() > MAX_GRAM_ORDER {
        return Err(Error::limit(format!(
            "Gram order {} for n = {n}, r = {r} exceeds {MAX_GRAM_ORDER}",
            basis.len()
        )));
    }
    let blocks: Vec<Vec<usize>> = match layout {
        GramLayout::Full => vec![(0..basis.len()).collect()],
        GramLayout::SignSymmetric => {
            let mut classes: Vec<(Vec<u32>, Vec<usize>)> = Vec::new();
            for (k, m) in basis.monomials.iter().enumerate() {
                let parity: Vec<u32> = m.iter().map(|e| e % 2).collect();
                match classes.iter_mut().find(|(p, _)| *p == parity) {
                    Some((_, members)) => members.push(k),
                    None => classes.push((parity, vec![k])),
                }
            }
            classes.into_iter().map(|(_, members)| members).collect()
        }
    };

    let mut by_alpha: BTreeMap<std::cmp::Reverse<Vec<u32>>, Vec<(usize, usize, usize)>> = BTreeMap::new();
    for (b, members) in blocks.iter().enumerate() {
        for (p, &gp) in members.iter().enumerate() {
            for (q, &gq) in members.iter().enumerate().skip(p) {
                let alpha: Vec<u32> = basis.monomials[gp]
                    .iter()
                    .zip(&basis.monomials[gq])
                    .map(|(a, c)| a + c)
                    .collect();
                by_alpha.entry(std::cmp::Reverse(alpha)).or_default().push((b, p, q));
            }
        }
    }
    if by_alpha.len() > MAX_SOS_ROWS {
        return Err(Error::limit(format!(
            "{} coefficient equations for n = {n}, r = {r} exceed {MAX_SOS_ROWS}",
            by_alpha.len()
        )));
    }
    let rows = by_alpha
        .into_iter()
        .map(|(std::cmp::Reverse(alpha), gram)| {
            let target = target_coefficients(&alpha, r);
            SosRow { alpha, gram, target }
        })
        .collect();
    Ok(SosSystem { r, basis, blocks, rows })
}

/// Coefficient of `x^α` in `(Σ x_k²)^r · Σ_ij Q_ij x_i² x_j²` as a combination of `Q_ij`.
fn target_coefficients(alpha: &[u32], r: u32) -> Vec<((usize, usize), i64)> {
    if alpha.iter().any(|e| e % 2 == 1) {
        return Vec::new();
    }
    let half: Vec<u32> = alpha.iter().map(|e| e / 2).collect();
    let n = half.len();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i..n {
            let mut kappa = half.clone();
            if kappa[i] == 0 {
                continue;
            }
            kappa[i] -= 1;
            if kappa[j] == 0 {
                continue;
            }
            kappa[j] -= 1;
            debug_assert_eq!(kappa.iter().sum::<u32>(), r);
            let c = multinomial(&kappa) * if i == j { 1 } else { 2 };
            out.push(((i, j), c));
        }
    }
    out
}
