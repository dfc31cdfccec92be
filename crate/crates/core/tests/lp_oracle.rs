//! Random LPs `min cᵀx, Ax = b, x ≥ 0` against exact rational vertex enumeration.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shannon_cone::sdp::{solve, BlockKind, ConicProblem, Entry, LinearFunctional, SolveOptions, SolveStatus};

#[derive(Clone, Copy, Debug, PartialEq)]
struct Q {
    n: i128,
    d: i128,
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

impl Q {
    fn new(n: i128, d: i128) -> Q {
        let g = gcd(n, d).max(1);
        let s = if d < 0 { -1 } else { 1 };
        Q { n: s * n / g, d: s * d / g }
    }
    fn int(n: i64) -> Q {
        Q { n: n as i128, d: 1 }
    }
    fn zero(self) -> bool {
        self.n == 0
    }
    fn add(self, o: Q) -> Q {
        Q::new(self.n * o.d + o.n * self.d, self.d * o.d)
    }
    fn sub(self, o: Q) -> Q {
        Q::new(self.n * o.d - o.n * self.d, self.d * o.d)
    }
    fn mul(self, o: Q) -> Q {
        Q::new(self.n * o.n, self.d * o.d)
    }
    fn div(self, o: Q) -> Q {
        Q::new(self.n * o.d, self.d * o.n)
    }
    fn f(self) -> f64 {
        self.n as f64 / self.d as f64
    }
}

/// Solves the square system exactly; `None` when singular.
fn solve_exact(mut a: Vec<Vec<Q>>, mut b: Vec<Q>) -> Option<Vec<Q>> {
    let m = b.len();
    for col in 0..m {
        let piv = (col..m).find(|&r| !a[r][col].zero())?;
        a.swap(col, piv);
        b.swap(col, piv);
        for r in 0..m {
            if r != col && !a[r][col].zero() {
                let f = a[r][col].div(a[col][col]);
                for c in col..m {
                    a[r][c] = a[r][c].sub(f.mul(a[col][c]));
                }
                b[r] = b[r].sub(f.mul(b[col]));
            }
        }
    }
    Some((0..m).map(|r| b[r].div(a[r][r])).collect())
}

fn rank(a: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<Q>> = a.iter().map(|r| r.iter().map(|&v| Q::int(v)).collect()).collect();
    let (rows, cols) = (m.len(), m[0].len());
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&k| !m[k][c].zero()) else { continue };
        m.swap(r, p);
        for k in 0..rows {
            if k != r && !m[k][c].zero() {
                let f = m[k][c].div(m[r][c]);
                for cc in 0..cols {
                    m[k][cc] = m[k][cc].sub(f.mul(m[r][cc]));
                }
            }
        }
        r += 1;
    }
    r
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Optimal value over all basic feasible solutions.
fn vertex_optimum(a: &[Vec<i64>], b: &[i64], c: &[i64]) -> Q {
    let (m, n) = (a.len(), c.len());
    let mut best: Option<Q> = None;
    for basis in subsets(n, m) {
        let sq: Vec<Vec<Q>> = (0..m).map(|r| basis.iter().map(|&j| Q::int(a[r][j])).collect()).collect();
        let Some(xb) = solve_exact(sq, b.iter().map(|&v| Q::int(v)).collect()) else { continue };
        if xb.iter().any(|v| v.n < 0) {
            continue;
        }
        let obj = basis.iter().zip(&xb).fold(Q::int(0), |acc, (&j, &v)| acc.add(Q::int(c[j]).mul(v)));
        if best.is_none_or(|bv| obj.f() < bv.f()) {
            best = Some(obj);
        }
    }
    best.expect("feasible by construction")
}

#[test]
fn random_lps_match_vertex_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut done = 0;
    while done < 50 {
        let m = rng.gen_range(1..=3);
        let n = rng.gen_range(m + 1..=6);
        let a: Vec<Vec<i64>> = (0..m).map(|_| (0..n).map(|_| rng.gen_range(-3..=3)).collect()).collect();
        if rank(&a) < m {
            continue;
        }
        // Feasible via x0 ≥ 0, bounded via a dual-feasible (y0, s0).
        let x0: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=3)).collect();
        let y0: Vec<i64> = (0..m).map(|_| rng.gen_range(-2..=2)).collect();
        let b: Vec<i64> = a.iter().map(|r| r.iter().zip(&x0).map(|(p, q)| p * q).sum()).collect();
        let c: Vec<i64> = (0..n)
            .map(|j| (0..m).map(|r| a[r][j] * y0[r]).sum::<i64>() + rng.gen_range(0..=3))
            .collect();
        let exact = vertex_optimum(&a, &b, &c).f();

        let mut p = ConicProblem::new();
        let blk = p.add_block(BlockKind::Nonneg, n);
        p.objective = LinearFunctional::new((0..n).map(|j| Entry::new(blk, j, j, c[j] as f64)).collect());
        for r in 0..m {
            let f = LinearFunctional::new((0..n).map(|j| Entry::new(blk, j, j, a[r][j] as f64)).collect());
            p.add_constraint(f, b[r] as f64);
        }
        let sol = solve(&p, &SolveOptions { tol: 1e-10, max_iter: 200 }).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal, "A={a:?} b={b:?} c={c:?}");
        assert!((sol.objective_value - exact).abs() < 1e-8 * (1.0 + exact.abs()), "{} vs {exact}", sol.objective_value);
        // weak duality at the returned pair
        assert!(sol.objective_value >= sol.dual_objective - 1e-7);
        done += 1;
    }
}
