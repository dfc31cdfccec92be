//! Exact minimisation of a quadratic form over the standard simplex.
//!
//! Every local minimiser in the relative interior of a face with support `S`
//! satisfies `Q_S x_S = μ·1, Σ x_S = 1`. Enumerating all supports and solving
//! that bordered system gives every candidate. A support whose bordered system
//! is singular is skipped: the quadratic is then degenerate along the face, so
//! its minimum over the face is also attained on a proper sub-face, which the
//! enumeration visits separately. The best candidate is finally polished by
//! pairwise mass-exchange descent, which can only lower the value.

use nalgebra::{DMatrix, DVector};

use super::{SimplexPoint, SymMatrix, Witness};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::tolerance;

#[derive(Clone, Debug)]
pub struct SimplexMinimum {
    pub value: f64,
    pub point: SimplexPoint,
    /// Support of the enumerated candidate before refinement.
    pub support: Vec<usize>,
    /// Supports skipped because their bordered system was singular.
    pub degenerate_supports: usize,
}

#[derive(Clone, Debug)]
pub struct CopositivityVerdict {
    pub is_copositive: bool,
    pub minimum: f64,
    /// Simplex minimiser when the matrix is not copositive.
    pub witness: Option<Witness>,
}

pub fn min_quadratic_on_simplex(q: &SymMatrix) -> Result<SimplexMinimum> {
    min_quadratic_on_simplex_with(q, &Limits::default())
}

pub fn min_quadratic_on_simplex_with(q: &SymMatrix, limits: &Limits) -> Result<SimplexMinimum> {
    let n = q.dim();
    if n == 0 {
        return Err(Error::invalid("empty matrix"));
    }
    if n > limits.max_copositive_dim {
        return Err(Error::limit(format!(
            "exact simplex enumeration limited to dimension {}, got {n}",
            limits.max_copositive_dim
        )));
    }
    let scale = q.max_abs().max(1.0);
    let mut best: Option<(f64, Vec<usize>, Vec<f64>)> = None;
    let mut degenerate = 0;
    for mask in 1u32..(1u32 << n) {
        let support: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        let Some(x_s) = solve_bordered(q, &support, scale) else {
            degenerate += 1;
            continue;
        };
        if x_s.iter().any(|&v| v < -tolerance::EQUALITY) {
            continue;
        }
        let mut x = vec![0.0; n];
        for (&i, &v) in support.iter().zip(&x_s) {
            x[i] = v.max(0.0);
        }
        let total: f64 = x.iter().sum();
        if total <= 0.0 {
            continue;
        }
        x.iter_mut().for_each(|v| *v /= total);
        let value = q.quad_form(&x)?;
        let better = match &best {
            None => true,
            Some((bv, bs, _)) => value < *bv || (value == *bv && support < *bs),
        };
        if better {
            best = Some((value, support, x));
        }
    }
    let (_, support, mut x) = best.expect("singleton supports are never singular");
    refine_pairwise(q, &mut x);
    let value = q.quad_form(&x)?;
    Ok(SimplexMinimum {
        value,
        point: SimplexPoint::new(x).map_err(|e| Error::Internal(e.to_string()))?,
        support,
        degenerate_supports: degenerate,
    })
}

/// Solves `[Q_S 1; 1ᵀ 0] [x; -μ] = [0; 1]`, returning `None` when singular.
fn solve_bordered(q: &SymMatrix, support: &[usize], scale: f64) -> Option<Vec<f64>> {
    let s = support.len();
    let k = DMatrix::from_fn(s + 1, s + 1, |a, b| match (a < s, b < s) {
        (true, true) => q.get(support[a], support[b]),
        (false, false) => 0.0,
        _ => 1.0,
    });
    let lu = k.full_piv_lu();
    let u = lu.u();
    let min_pivot = (0..=s).map(|i| u[(i, i)].abs()).fold(f64::INFINITY, f64::min);
    if min_pivot <= 1e-11 * scale {
        return None;
    }
    let mut rhs = DVector::zeros(s + 1);
    rhs[s] = 1.0;
    let sol = lu.solve(&rhs)?;
    Some(sol.iter().take(s).copied().collect())
}

/// Exact line search along `e_j - e_i` for all pairs until no move helps.
fn refine_pairwise(q: &SymMatrix, x: &mut [f64]) {
    let n = x.len();
    let mut qx = q.mul_vec(x).expect("matching dimension");
    for _ in 0..200 {
        let mut improved = false;
        for i in 0..n {
            for j in 0..n {
                if i == j || x[i] <= 0.0 {
                    continue;
                }
                // f(x + t(e_j - e_i)) - f(x) = 2t(qx_j - qx_i) + t^2 curvature, t in [0, x_i]
                let slope = 2.0 * (qx[j] - qx[i]);
                let curv = q.get(i, i) + q.get(j, j) - 2.0 * q.get(i, j);
                let mut t = if curv > 0.0 { -slope / (2.0 * curv) } else { x[i] };
                t = t.clamp(0.0, x[i]);
                let gain = slope * t + curv * t * t;
                if t > 0.0 && gain < -1e-15 * (1.0 + q.max_abs()) {
                    x[i] -= t;
                    x[j] += t;
                    for (k, v) in qx.iter_mut().enumerate() {
                        *v += t * (q.get(k, j) - q.get(k, i));
                    }
                    improved = true;
                }
            }
        }
        if !improved {
            break;
        }
    }
    let total: f64 = x.iter().sum();
    x.iter_mut().for_each(|v| *v = v.max(0.0) / total);
}

/// Copositivity by exact simplex minimisation: copositive iff the minimum is at
/// least `-1e-9`.
pub fn is_copositive_oracle(q: &SymMatrix) -> Result<CopositivityVerdict> {
    is_copositive_oracle_with(q, &Limits::default())
}

pub fn is_copositive_oracle_with(q: &SymMatrix, limits: &Limits) -> Result<CopositivityVerdict> {
    let min = min_quadratic_on_simplex_with(q, limits)?;
    let is_copositive = min.value >= -tolerance::CONE;
    Ok(CopositivityVerdict {
        is_copositive,
        minimum: min.value,
        witness: (!is_copositive).then(|| Witness {
            vector: min.point.into_vec(),
            value: min.value,
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::Graph;

    fn ms_matrix(g: &Graph) -> SymMatrix {
        SymMatrix::identity(g.vertex_count())
            .add(&SymMatrix::adjacency(g))
            .unwrap()
    }

    #[test]
    fn motzkin_straus_on_cycles() {
        let c5 = min_quadratic_on_simplex(&ms_matrix(&Graph::cycle(5).unwrap())).unwrap();
        assert!((c5.value - 0.5).abs() < 1e-12);
        let c7 = min_quadratic_on_simplex(&ms_matrix(&Graph::cycle(7).unwrap())).unwrap();
        assert!((c7.value - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn identity_minimum_at_barycentre() {
        for n in 1..=6 {
            let r = min_quadratic_on_simplex(&SymMatrix::identity(n)).unwrap();
            assert!((r.value - 1.0 / n as f64).abs() < 1e-14);
            assert!(r.point.as_slice().iter().all(|&x| (x - 1.0 / n as f64).abs() < 1e-12));
        }
    }

    #[test]
    fn copositivity_examples() {
        assert!(is_copositive_oracle(&SymMatrix::all_ones(3)).unwrap().is_copositive);
        assert!(is_copositive_oracle(&SymMatrix::lambda2()).unwrap().is_copositive);
        let q = SymMatrix::from_rows(&[vec![1.0, -3.0], vec![-3.0, 1.0]]).unwrap();
        let v = is_copositive_oracle(&q).unwrap();
        assert!(!v.is_copositive);
        let w = v.witness.unwrap();
        assert!((w.vector[0] - 0.5).abs() < 1e-12 && (w.vector[1] - 0.5).abs() < 1e-12);
        assert!((w.value + 1.0).abs() < 1e-12);
    }

    #[test]
    fn all_ones_is_degenerate_but_exact() {
        let r = min_quadratic_on_simplex(&SymMatrix::all_ones(4)).unwrap();
        assert!((r.value - 1.0).abs() < 1e-14);
        assert!(r.degenerate_supports > 0);
    }

    #[test]
    fn dimension_cap() {
        assert!(matches!(
            min_quadratic_on_simplex(&SymMatrix::identity(13)),
            Err(Error::ResourceLimit(_))
        ));
    }
}
