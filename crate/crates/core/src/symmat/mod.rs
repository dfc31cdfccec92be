//! Dense real symmetric matrices.
//!
//! Storage keeps only the upper triangle, so symmetry holds by construction.
//! Index pairs `(i, j)` of a Kronecker product `Q ⊗ R` map to `i * m + j`,
//! matching the vertex order of [`crate::graphs::Graph::strong_product`].

mod io;
mod simplex;

pub use self::io::{parse_matrix_text, write_matrix_text};
pub use simplex::{
    is_copositive_oracle, is_copositive_oracle_with, min_quadratic_on_simplex, min_quadratic_on_simplex_with,
    CopositivityVerdict, SimplexMinimum,
};

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::Graph;
use crate::limits::Limits;
use crate::tolerance;

#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix {
    n: usize,
    // row-major upper triangle: (i, j), i <= j
    upper: Vec<f64>,
}

/// A vector together with the quadratic form it attains on some matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub vector: Vec<f64>,
    pub value: f64,
}

/// A point of the standard simplex.
#[derive(Clone, Debug, PartialEq)]
pub struct SimplexPoint(Vec<f64>);

impl SimplexPoint {
    pub fn new(x: Vec<f64>) -> Result<Self> {
        let sum: f64 = x.iter().sum();
        if x.is_empty() || x.iter().any(|&v| !(v >= 0.0)) || (sum - 1.0).abs() > tolerance::EQUALITY {
            return Err(Error::invalid("point is not on the standard simplex"));
        }
        Ok(SimplexPoint(x))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

#[derive(Clone, Debug)]
pub struct PsdVerdict {
    pub is_psd: bool,
    pub min_eigenvalue: f64,
    /// Unit eigenvector of the smallest eigenvalue when the test fails.
    pub witness: Option<Witness>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        SymMatrix {
            n,
            upper: vec![0.0; n * (n + 1) / 2],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    /// `J_n`.
    pub fn all_ones(n: usize) -> Self {
        Self::from_fn(n, |_, _| 1.0)
    }

    /// `Λ = [[1, -1], [-1, 1]]`.
    pub fn lambda2() -> Self {
        Self::from_fn(2, |i, j| if i == j { 1.0 } else { -1.0 })
    }

    /// Builds from `f(i, j)` evaluated on the upper triangle only.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut upper = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in i..n {
                upper.push(f(i, j));
            }
        }
        SymMatrix { n, upper }
    }

    /// Builds from full rows; the input must be square, finite and symmetric.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::invalid("matrix rows must form a square"));
        }
        for i in 0..n {
            for j in 0..n {
                if !rows[i][j].is_finite() {
                    return Err(Error::invalid(format!("entry ({i}, {j}) is not finite")));
                }
                let scale = 1.0f64.max(rows[i][j].abs());
                if (rows[i][j] - rows[j][i]).abs() > tolerance::EQUALITY * scale {
                    return Err(Error::invalid(format!("entries ({i}, {j}) and ({j}, {i}) differ")));
                }
            }
        }
        Ok(Self::from_fn(n, |i, j| rows[i][j]))
    }

    /// Adjacency matrix of `g` with entries in `{0, 1}`.
    pub fn adjacency(g: &Graph) -> Self {
        Self::from_fn(g.vertex_count(), |i, j| if g.is_adjacent(i, j) { 1.0 } else { 0.0 })
    }

    pub fn from_dmatrix(m: &DMatrix<f64>) -> Self {
        assert!(m.is_square());
        Self::from_fn(m.nrows(), |i, j| 0.5 * (m[(i, j)] + m[(j, i)]))
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn offset(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        i * self.n - i * (i + 1) / 2 + j
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.upper[self.offset(i, j)]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        let k = self.offset(i, j);
        self.upper[k] = value;
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j)).collect())
            .collect()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn scale(&self, k: f64) -> SymMatrix {
        self.map(|v| k * v)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> SymMatrix {
        SymMatrix {
            n: self.n,
            upper: self.upper.iter().map(|&v| f(v)).collect(),
        }
    }

    fn zip_with(&self, other: &SymMatrix, f: impl Fn(f64, f64) -> f64) -> Result<SymMatrix> {
        if self.n != other.n {
            return Err(Error::invalid(format!(
                "dimension mismatch: {} vs {}",
                self.n, other.n
            )));
        }
        Ok(SymMatrix {
            n: self.n,
            upper: self.upper.iter().zip(&other.upper).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn add(&self, other: &SymMatrix) -> Result<SymMatrix> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &SymMatrix) -> Result<SymMatrix> {
        self.zip_with(other, |a, b| a - b)
    }

    /// `self + c·J`.
    pub fn add_constant(&self, c: f64) -> SymMatrix {
        self.map(|v| v + c)
    }

    pub fn max_abs_diff(&self, other: &SymMatrix) -> f64 {
        assert_eq!(self.n, other.n);
        self.upper
            .iter()
            .zip(&other.upper)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.upper.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.upper.iter().all(|v| v.is_finite())
    }

    /// Entrywise non-negativity including the diagonal.
    pub fn is_nonnegative(&self) -> bool {
        self.upper.iter().all(|&v| v >= 0.0)
    }

    /// `Q ⊗ R` with the default dimension cap.
    pub fn kron(&self, other: &SymMatrix) -> Result<SymMatrix> {
        self.kron_with(other, &Limits::default())
    }

    /// Entry `((i, j), (k, l))` is `Q[i][k] * R[j][l]`.
    pub fn kron_with(&self, other: &SymMatrix, limits: &Limits) -> Result<SymMatrix> {
        let m = other.n;
        let dim = checked_dim(self.n, m, limits)?;
        let mut out = SymMatrix::zeros(dim);
        for i in 0..self.n {
            for k in i..self.n {
                let q = self.get(i, k);
                for j in 0..m {
                    for l in 0..m {
                        let (a, b) = (i * m + j, k * m + l);
                        if a <= b {
                            out.set(a, b, q * other.get(j, l));
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// `Q ⊙ R = (Q + J_n) ⊗ (R + J_m) - J_{nm}`.
    pub fn odot(&self, other: &SymMatrix) -> Result<SymMatrix> {
        self.odot_with(other, &Limits::default())
    }

    /// Evaluated entrywise as `q·r + q + r`, equal to `(q + 1)(r + 1) - 1`
    /// but exact when either factor is the neutral `[0]`.
    pub fn odot_with(&self, other: &SymMatrix, limits: &Limits) -> Result<SymMatrix> {
        let m = other.n;
        let dim = checked_dim(self.n, m, limits)?;
        let mut out = SymMatrix::zeros(dim);
        for i in 0..self.n {
            for k in i..self.n {
                let q = self.get(i, k);
                for j in 0..m {
                    for l in 0..m {
                        let (a, b) = (i * m + j, k * m + l);
                        if a <= b {
                            let r = other.get(j, l);
                            out.set(a, b, q * r + q + r);
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// `xᵀ M x` with Neumaier-compensated summation.
    pub fn quad_form(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n {
            return Err(Error::invalid(format!(
                "vector of length {} for a {}x{} matrix",
                x.len(),
                self.n,
                self.n
            )));
        }
        let mut acc = CompensatedSum::default();
        for i in 0..self.n {
            acc.add(self.get(i, i) * x[i] * x[i]);
            for j in i + 1..self.n {
                acc.add(2.0 * self.get(i, j) * x[i] * x[j]);
            }
        }
        Ok(acc.value())
    }

    /// `M x`.
    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n {
            return Err(Error::invalid("dimension mismatch in matrix-vector product"));
        }
        Ok((0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * x[j]).sum())
            .collect())
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.to_dmatrix()).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    /// PSD test: smallest eigenvalue at least `-tol`.
    pub fn is_psd(&self, tol: f64) -> PsdVerdict {
        if self.n == 0 {
            return PsdVerdict {
                is_psd: true,
                min_eigenvalue: 0.0,
                witness: None,
            };
        }
        let eig = SymmetricEigen::new(self.to_dmatrix());
        let (idx, &min) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("non-empty spectrum");
        if min >= -tol {
            return PsdVerdict {
                is_psd: true,
                min_eigenvalue: min,
                witness: None,
            };
        }
        let mut v: Vec<f64> = eig.eigenvectors.column(idx).iter().copied().collect();
        // sign convention: first non-negligible component positive
        if let Some(first) = v.iter().find(|c| c.abs() > 1e-12) {
            if *first < 0.0 {
                v.iter_mut().for_each(|c| *c = -*c);
            }
        }
        let value = self.quad_form(&v).expect("matching dimension");
        PsdVerdict {
            is_psd: false,
            min_eigenvalue: min,
            witness: Some(Witness { vector: v, value }),
        }
    }

    /// Whether all diagonal entries equal `self[0][0]` within the equality tolerance.
    pub fn constant_diagonal(&self) -> Option<f64> {
        let mu = *self.diagonal().first()?;
        self.diagonal()
            .iter()
            .all(|&d| (d - mu).abs() <= tolerance::EQUALITY * 1f64.max(mu.abs()))
            .then_some(mu)
    }
}

fn checked_dim(n: usize, m: usize, limits: &Limits) -> Result<usize> {
    n.checked_mul(m)
        .filter(|&d| d <= limits.max_matrix_dim)
        .ok_or_else(|| {
            Error::limit(format!(
                "product dimension {n}x{m} exceeds the {} cap",
                limits.max_matrix_dim
            ))
        })
}

/// Replaces `R[s][t] = R[t][s] = μ` for each listed pair, where `μ` is the
/// constant diagonal of `Q`.
///
/// When `Q` is copositive, so is the result.
pub fn lemma1_transform(q: &SymMatrix, pairs: &[(usize, usize)]) -> Result<SymMatrix> {
    let mu = q
        .constant_diagonal()
        .ok_or_else(|| Error::invalid("matrix diagonal is not constant"))?;
    let mut r = q.clone();
    for &(s, t) in pairs {
        if s == t || s >= q.dim() || t >= q.dim() {
            return Err(Error::invalid(format!("({s}, {t}) is not an off-diagonal pair")));
        }
        r.set(s, t, mu);
    }
    Ok(r)
}

#[derive(Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.carry += (self.sum - t) + v;
        } else {
            self.carry += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> SymMatrix {
        SymMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn offdiag() -> SymMatrix {
        m(&[&[0.0, 1.0], &[1.0, 0.0]])
    }

    #[test]
    fn constructors() {
        let ev = SymMatrix::lambda2().eigenvalues();
        assert!(ev[0].abs() < 1e-12 && (ev[1] - 2.0).abs() < 1e-12);
        assert_eq!(SymMatrix::all_ones(3).mul_vec(&[1.0, 1.0, 1.0]).unwrap(), vec![3.0; 3]);
        let with_ones = SymMatrix::lambda2().add(&offdiag().scale(1.0)).unwrap();
        assert_eq!(with_ones, SymMatrix::identity(2));
    }

    #[test]
    fn from_rows_validates() {
        assert!(SymMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 1.0]]).is_err());
        assert!(SymMatrix::from_rows(&[vec![1.0, 2.0]]).is_err());
        assert!(SymMatrix::from_rows(&[vec![f64::NAN]]).is_err());
    }

    #[test]
    fn kron_examples() {
        let k = SymMatrix::identity(2).kron(&SymMatrix::all_ones(2)).unwrap();
        let expected = m(&[
            &[1.0, 1.0, 0.0, 0.0],
            &[1.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 1.0, 1.0],
            &[0.0, 0.0, 1.0, 1.0],
        ]);
        assert_eq!(k, expected);
        let q = m(&[&[2.0, -1.0, 0.5], &[-1.0, 3.0, 0.0], &[0.5, 0.0, 1.0]]);
        assert_eq!(q.kron(&SymMatrix::identity(1)).unwrap(), q);
        let limits = Limits {
            max_matrix_dim: 8,
            ..Limits::default()
        };
        assert!(matches!(
            SymMatrix::identity(3).kron_with(&SymMatrix::identity(3), &limits),
            Err(Error::ResourceLimit(_))
        ));
    }

    #[test]
    fn odot_block_formula() {
        // block form [[2kA + J, -J], [-J, 2kA + J]] with k = 1
        let b = SymMatrix::lambda2().odot(&offdiag()).unwrap();
        let expected = m(&[
            &[1.0, 3.0, -1.0, -1.0],
            &[3.0, 1.0, -1.0, -1.0],
            &[-1.0, -1.0, 1.0, 3.0],
            &[-1.0, -1.0, 3.0, 1.0],
        ]);
        assert_eq!(b, expected);
        let q = m(&[&[2.0, -1.0], &[-1.0, 3.0]]);
        assert_eq!(q.odot(&SymMatrix::zeros(1)).unwrap(), q);
        assert_eq!(SymMatrix::zeros(1).odot(&q).unwrap(), q);
    }

    #[test]
    fn odot_expansion_identity() {
        let q = m(&[&[2.0, -1.0, 0.3], &[-1.0, 3.0, 0.0], &[0.3, 0.0, -1.0]]);
        let r = m(&[&[0.5, 4.0], &[4.0, -2.0]]);
        let lhs = q.odot(&r).unwrap();
        let rhs = q
            .kron(&r)
            .unwrap()
            .add(&q.kron(&SymMatrix::all_ones(2)).unwrap())
            .unwrap()
            .add(&SymMatrix::all_ones(3).kron(&r).unwrap())
            .unwrap();
        assert!(lhs.max_abs_diff(&rhs) <= 1e-12);
    }

    #[test]
    fn quad_form_examples() {
        assert_eq!(SymMatrix::all_ones(4).quad_form(&[1.0, -1.0, -1.0, 1.0]).unwrap(), 0.0);
        let b = SymMatrix::lambda2().odot(&offdiag()).unwrap();
        assert_eq!(b.quad_form(&[1.0, -1.0, -1.0, 1.0]).unwrap(), -8.0);
        assert_eq!(SymMatrix::identity(3).quad_form(&[1.0; 3]).unwrap(), 3.0);
        assert!(matches!(
            SymMatrix::identity(3).quad_form(&[1.0; 2]),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn psd_examples() {
        assert!(SymMatrix::lambda2().is_psd(1e-9).is_psd);
        let v = offdiag().is_psd(1e-9);
        assert!(!v.is_psd);
        let w = v.witness.unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((w.vector[0] - s).abs() < 1e-12 && (w.vector[1] + s).abs() < 1e-12);
        assert!((w.value + 1.0).abs() < 1e-12);

        let b = SymMatrix::lambda2().odot(&offdiag()).unwrap();
        let ev = b.eigenvalues();
        for (got, want) in ev.iter().zip([-2.0, -2.0, 2.0, 6.0]) {
            assert!((got - want).abs() < 1e-10, "{ev:?}");
        }
        assert!(!b.is_psd(1e-9).is_psd);
    }

    #[test]
    fn lemma1_transform_replaces_pairs() {
        let q = m(&[&[2.0, -1.0, 0.0], &[-1.0, 2.0, 0.5], &[0.0, 0.5, 2.0]]);
        assert_eq!(lemma1_transform(&q, &[]).unwrap(), q);
        let r = lemma1_transform(&q, &[(0, 1)]).unwrap();
        assert_eq!(r.get(1, 0), 2.0);
        assert_eq!(r.get(1, 2), 0.5);
        let bad = m(&[&[1.0, 0.0], &[0.0, 2.0]]);
        assert!(matches!(lemma1_transform(&bad, &[(0, 1)]), Err(Error::InvalidArgument(_))));
        assert!(lemma1_transform(&q, &[(1, 1)]).is_err());
    }

    #[test]
    fn simplex_point_validation() {
        assert!(SimplexPoint::new(vec![0.5, 0.5]).is_ok());
        assert!(SimplexPoint::new(vec![0.5, 0.6]).is_err());
        assert!(SimplexPoint::new(vec![1.5, -0.5]).is_err());
    }
}
