//! Infeasible-start primal-dual interior-point method.
//!
//! Search directions use the HKM scaling (`dX = (σμI - XZ - X dZ) Z⁻¹`,
//! symmetrised) with a Mehrotra predictor-corrector step. The Schur complement
//! `M_ij = Σ_b <A_ib, X_b A_jb Z_b⁻¹>` is assembled densely and factored by
//! Cholesky. Constraint rows are normalised and linearly dependent rows are
//! removed (or reported as inconsistent) before the first iteration.

use std::collections::BTreeMap;

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};

use super::{BlockKind, BlockValue, ConicProblem, Solution, SolveOptions, SolveStatus};
use crate::error::Result;
use crate::symmat::SymMatrix;

const STEP_FRACTION: f64 = 0.98;
const DEPENDENT_ROW_TOL: f64 = 1e-10;
const INFEASIBILITY_TOL: f64 = 1e-8;
const FREE_SHRINK: f64 = 0.8;

#[derive(Clone, Debug)]
enum Mat {
    Psd(DMatrix<f64>),
    Lin(DVector<f64>),
}

impl Mat {
    fn zeros_like(kind: BlockKind, n: usize) -> Mat {
        match kind {
            BlockKind::Psd => Mat::Psd(DMatrix::zeros(n, n)),
            BlockKind::Nonneg => Mat::Lin(DVector::zeros(n)),
        }
    }

    fn scaled_identity(kind: BlockKind, n: usize, s: f64) -> Mat {
        match kind {
            BlockKind::Psd => Mat::Psd(DMatrix::identity(n, n) * s),
            BlockKind::Nonneg => Mat::Lin(DVector::from_element(n, s)),
        }
    }

    fn scaled(&self, a: f64) -> Mat {
        match self {
            Mat::Psd(m) => Mat::Psd(m * a),
            Mat::Lin(v) => Mat::Lin(v * a),
        }
    }

    fn norm_sq(&self) -> f64 {
        match self {
            Mat::Psd(m) => m.norm_squared(),
            Mat::Lin(v) => v.norm_squared(),
        }
    }

    fn axpy(&mut self, a: f64, other: &Mat) {
        match (self, other) {
            (Mat::Psd(x), Mat::Psd(d)) => *x += d * a,
            (Mat::Lin(x), Mat::Lin(d)) => *x += d * a,
            _ => unreachable!("block kinds always match"),
        }
    }
}

fn inner(x: &[Mat], z: &[Mat]) -> f64 {
    x.iter()
        .zip(z)
        .map(|(a, b)| match (a, b) {
            (Mat::Psd(a), Mat::Psd(b)) => a.dot(b),
            (Mat::Lin(a), Mat::Lin(b)) => a.dot(b),
            _ => unreachable!(),
        })
        .sum()
}

fn norm(x: &[Mat]) -> f64 {
    x.iter().map(Mat::norm_sq).sum::<f64>().sqrt()
}

fn sub(a: &[Mat], b: &[Mat]) -> Vec<Mat> {
    let mut out = a.to_vec();
    for (o, v) in out.iter_mut().zip(b) {
        o.axpy(-1.0, v);
    }
    out
}

/// One constraint row split by block: SDPA-convention triplets `(i, j, c)`.
#[derive(Clone, Debug, Default)]
struct Row {
    parts: Vec<(usize, Vec<(usize, usize, f64)>)>,
}

struct Model {
    kinds: Vec<(BlockKind, usize)>,
    c: Vec<Mat>,
    rows: Vec<Row>,
    b: DVector<f64>,
    /// For each block, `(row, part index)` of rows touching it.
    block_rows: Vec<Vec<(usize, usize)>>,
    /// For non-negative blocks: per coordinate, `(row, coeff)`.
    lin_cols: Vec<Vec<Vec<(usize, f64)>>>,
    /// Original index and normalisation factor of each kept row.
    kept: Vec<(usize, f64)>,
    removed: Vec<usize>,
    nu: f64,
    /// Coordinates `(block, k, l)` of non-negative blocks whose columns and
    /// costs are exact negatives: a free variable split as `x_k - x_l`.
    free_pairs: Vec<(usize, usize, usize)>,
    /// Cholesky factor of `AAᵀ` over the kept, normalised rows.
    row_gram: Option<Cholesky<f64, nalgebra::Dyn>>,
}

enum Prep {
    Ready(Box<Model>),
    /// The equality system has no solution; `certificate` satisfies
    /// `Aᵀy = 0` and `bᵀy > 0`.
    Inconsistent { removed: Vec<usize>, certificate: Vec<f64> },
}

fn merge_functional(entries: &[super::Entry]) -> BTreeMap<(usize, usize, usize), f64> {
    let mut map = BTreeMap::new();
    for e in entries {
        *map.entry((e.block, e.i, e.j)).or_insert(0.0) += e.coeff;
    }
    map.retain(|_, v| *v != 0.0);
    map
}

fn weight(kind: BlockKind, i: usize, j: usize) -> f64 {
    if kind == BlockKind::Psd && i != j {
        2.0
    } else {
        1.0
    }
}

fn prepare(problem: &ConicProblem) -> Prep {
    let kinds: Vec<(BlockKind, usize)> = problem.blocks.iter().map(|b| (b.kind, b.size)).collect();
    let mut c: Vec<Mat> = kinds.iter().map(|&(k, n)| Mat::zeros_like(k, n)).collect();
    for ((blk, i, j), v) in merge_functional(&problem.objective.entries) {
        match &mut c[blk] {
            Mat::Psd(m) => {
                m[(i, j)] += v;
                if i != j {
                    m[(j, i)] += v;
                }
            }
            Mat::Lin(x) => x[i] += v,
        }
    }

    // merged rows with Frobenius norms
    let merged: Vec<BTreeMap<(usize, usize, usize), f64>> = problem
        .constraints
        .iter()
        .map(|c| merge_functional(&c.functional.entries))
        .collect();
    let norms: Vec<f64> = merged
        .iter()
        .map(|row| {
            row.iter()
                .map(|(&(blk, i, j), v)| weight(kinds[blk].0, i, j) * v * v)
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    let rhs: Vec<f64> = problem.constraints.iter().map(|c| c.rhs).collect();
    let b_scale = 1.0 + rhs.iter().map(|v| v * v).sum::<f64>().sqrt();

    let mut removed = Vec::new();
    let mut live: Vec<usize> = Vec::new();
    for (k, &nrm) in norms.iter().enumerate() {
        if nrm == 0.0 {
            if rhs[k].abs() > 1e-9 * b_scale {
                let mut certificate = vec![0.0; rhs.len()];
                certificate[k] = rhs[k].signum();
                return Prep::Inconsistent { removed: vec![k], certificate };
            }
            removed.push(k);
        } else {
            live.push(k);
        }
    }

    // Gram matrix of normalised rows, then pivoted Cholesky to find a basis.
    let sparse: Vec<Vec<((usize, usize, usize), f64)>> = live
        .iter()
        .map(|&k| {
            merged[k]
                .iter()
                .map(|(&key, &v)| (key, v * weight(kinds[key.0].0, key.1, key.2).sqrt() / norms[k]))
                .collect()
        })
        .collect();
    let m = live.len();
    let mut gram = DMatrix::zeros(m, m);
    for a in 0..m {
        gram[(a, a)] = 1.0;
        for bb in a + 1..m {
            let g = sparse_dot(&sparse[a], &sparse[bb]);
            gram[(a, bb)] = g;
            gram[(bb, a)] = g;
        }
    }
    let basis = pivoted_cholesky_basis(&gram);
    if basis.len() < m {
        let in_basis: Vec<bool> = (0..m).map(|a| basis.contains(&a)).collect();
        let gbb = DMatrix::from_fn(basis.len(), basis.len(), |p, q| gram[(basis[p], basis[q])]);
        let rb = DVector::from_iterator(basis.len(), basis.iter().map(|&a| rhs[live[a]] / norms[live[a]]));
        let chol = Cholesky::new(gbb);
        for a in (0..m).filter(|&a| !in_basis[a]) {
            let g = DVector::from_iterator(basis.len(), basis.iter().map(|&p| gram[(p, a)]));
            let coeffs = match &chol {
                Some(ch) => ch.solve(&g),
                None => DVector::zeros(basis.len()),
            };
            let predicted = coeffs.dot(&rb);
            let actual = rhs[live[a]] / norms[live[a]];
            if (predicted - actual).abs() > 1e-8 * (1.0 + actual.abs()) {
                // A_a/s_a - Σ c_p A_p/s_p = 0
                let sign = (actual - predicted).signum();
                let mut certificate = vec![0.0; rhs.len()];
                certificate[live[a]] = sign / norms[live[a]];
                for (p, &bp) in basis.iter().enumerate() {
                    certificate[live[bp]] -= sign * coeffs[p] / norms[live[bp]];
                }
                return Prep::Inconsistent { removed: vec![live[a]], certificate };
            }
            removed.push(live[a]);
        }
    }
    removed.sort_unstable();
    let mut kept_pos: Vec<usize> = basis.clone();
    kept_pos.sort_unstable_by_key(|&a| live[a]);
    let kept_idx: Vec<usize> = kept_pos.iter().map(|&a| live[a]).collect();
    let row_gram = Cholesky::new(DMatrix::from_fn(kept_pos.len(), kept_pos.len(), |p, q| {
        gram[(kept_pos[p], kept_pos[q])]
    }));

    let mut rows = Vec::with_capacity(kept_idx.len());
    let mut kept = Vec::with_capacity(kept_idx.len());
    let mut b = DVector::zeros(kept_idx.len());
    for (r, &k) in kept_idx.iter().enumerate() {
        let s = norms[k];
        let mut row = Row::default();
        for (&(blk, i, j), &v) in &merged[k] {
            match row.parts.last_mut() {
                Some((bl, list)) if *bl == blk => list.push((i, j, v / s)),
                _ => row.parts.push((blk, vec![(i, j, v / s)])),
            }
        }
        rows.push(row);
        kept.push((k, s));
        b[r] = rhs[k] / s;
    }

    let mut block_rows = vec![Vec::new(); kinds.len()];
    let mut lin_cols: Vec<Vec<Vec<(usize, f64)>>> = kinds
        .iter()
        .map(|&(k, n)| if k == BlockKind::Nonneg { vec![Vec::new(); n] } else { Vec::new() })
        .collect();
    for (r, row) in rows.iter().enumerate() {
        for (p, (blk, list)) in row.parts.iter().enumerate() {
            block_rows[*blk].push((r, p));
            if kinds[*blk].0 == BlockKind::Nonneg {
                for &(i, _, v) in list {
                    lin_cols[*blk][i].push((r, v));
                }
            }
        }
    }
    let nu = kinds.iter().map(|&(_, n)| n as f64).sum();
    let free_pairs = split_pairs(&kinds, &c, &lin_cols);
    Prep::Ready(Box::new(Model {
        kinds,
        c,
        rows,
        b,
        block_rows,
        lin_cols,
        kept,
        removed,
        nu,
        free_pairs,
        row_gram,
    }))
}

fn split_pairs(kinds: &[(BlockKind, usize)], c: &[Mat], lin_cols: &[Vec<Vec<(usize, f64)>>]) -> Vec<(usize, usize, usize)> {
    let mut pairs = Vec::new();
    for (blk, &(kind, n)) in kinds.iter().enumerate() {
        let (BlockKind::Nonneg, Mat::Lin(cb)) = (kind, &c[blk]) else {
            continue;
        };
        let cols = &lin_cols[blk];
        let mut used = vec![false; n];
        for k in 0..n {
            if used[k] || cols[k].is_empty() {
                continue;
            }
            let partner = (k + 1..n).find(|&l| {
                !used[l]
                    && cb[l] == -cb[k]
                    && cols[l].len() == cols[k].len()
                    && cols[l].iter().zip(&cols[k]).all(|(a, b)| a.0 == b.0 && a.1 == -b.1)
            });
            if let Some(l) = partner {
                used[k] = true;
                used[l] = true;
                pairs.push((blk, k, l));
            }
        }
    }
    pairs
}

fn sparse_dot(a: &[((usize, usize, usize), f64)], b: &[((usize, usize, usize), f64)]) -> f64 {
    let (mut p, mut q, mut acc) = (0, 0, 0.0);
    while p < a.len() && q < b.len() {
        match a[p].0.cmp(&b[q].0) {
            std::cmp::Ordering::Less => p += 1,
            std::cmp::Ordering::Greater => q += 1,
            std::cmp::Ordering::Equal => {
                acc += a[p].1 * b[q].1;
                p += 1;
                q += 1;
            }
        }
    }
    acc
}

/// Indices of a maximal linearly independent subset, greedy on the largest
/// remaining pivot (ties to the lowest index).
fn pivoted_cholesky_basis(gram: &DMatrix<f64>) -> Vec<usize> {
    let m = gram.nrows();
    let mut diag: Vec<f64> = (0..m).map(|a| gram[(a, a)]).collect();
    let mut l: Vec<Vec<f64>> = Vec::new();
    let mut chosen = Vec::new();
    let mut used = vec![false; m];
    loop {
        let mut best = None;
        for a in (0..m).filter(|&a| !used[a]) {
            if best.is_none_or(|(_, d)| diag[a] > d) {
                best = Some((a, diag[a]));
            }
        }
        let Some((piv, d)) = best else { break };
        if d <= DEPENDENT_ROW_TOL {
            break;
        }
        used[piv] = true;
        let sd = d.sqrt();
        let col: Vec<f64> = (0..m)
            .map(|a| {
                if used[a] && a != piv {
                    0.0
                } else {
                    let dot: f64 = l.iter().map(|c| c[a] * c[piv]).sum();
                    (gram[(a, piv)] - dot) / sd
                }
            })
            .collect();
        for a in 0..m {
            if !used[a] {
                diag[a] -= col[a] * col[a];
            }
        }
        l.push(col);
        chosen.push(piv);
    }
    chosen
}

impl Model {
    fn m(&self) -> usize {
        self.rows.len()
    }

    /// `<A_i, W>` for every row; `W` need not be symmetric.
    fn apply(&self, w: &[Mat]) -> DVector<f64> {
        DVector::from_iterator(
            self.m(),
            self.rows.iter().map(|row| {
                row.parts
                    .iter()
                    .map(|(blk, list)| match &w[*blk] {
                        Mat::Psd(x) => list
                            .iter()
                            .map(|&(i, j, v)| if i == j { v * x[(i, i)] } else { v * (x[(i, j)] + x[(j, i)]) })
                            .sum::<f64>(),
                        Mat::Lin(x) => list.iter().map(|&(i, _, v)| v * x[i]).sum(),
                    })
                    .sum()
            }),
        )
    }

    /// `Σ_i y_i A_i`.
    fn adjoint(&self, y: &DVector<f64>) -> Vec<Mat> {
        let mut out: Vec<Mat> = self.kinds.iter().map(|&(k, n)| Mat::zeros_like(k, n)).collect();
        for (r, row) in self.rows.iter().enumerate() {
            for (blk, list) in &row.parts {
                match &mut out[*blk] {
                    Mat::Psd(x) => {
                        for &(i, j, v) in list {
                            x[(i, j)] += y[r] * v;
                            if i != j {
                                x[(j, i)] += y[r] * v;
                            }
                        }
                    }
                    Mat::Lin(x) => {
                        for &(i, _, v) in list {
                            x[i] += y[r] * v;
                        }
                    }
                }
            }
        }
        out
    }

    fn schur(&self, x: &[Mat], zinv: &[Mat]) -> DMatrix<f64> {
        let m = self.m();
        let mut big = DMatrix::zeros(m, m);
        for (blk, &(kind, n)) in self.kinds.iter().enumerate() {
            match (kind, &x[blk], &zinv[blk]) {
                (BlockKind::Psd, Mat::Psd(xb), Mat::Psd(zb)) => {
                    let touching = &self.block_rows[blk];
                    for &(r, p) in touching {
                        // G = X A_r Z^{-1}
                        let mut g = DMatrix::<f64>::zeros(n, n);
                        for &(i, j, v) in &self.rows[r].parts[p].1 {
                            g.ger(v, &xb.column(i), &zb.row(j).transpose(), 1.0);
                            if i != j {
                                g.ger(v, &xb.column(j), &zb.row(i).transpose(), 1.0);
                            }
                        }
                        for &(s, q) in touching {
                            if s < r {
                                continue;
                            }
                            let val: f64 = self.rows[s].parts[q]
                                .1
                                .iter()
                                .map(|&(i, j, v)| if i == j { v * g[(i, i)] } else { v * (g[(i, j)] + g[(j, i)]) })
                                .sum();
                            big[(r, s)] += val;
                        }
                    }
                }
                (BlockKind::Nonneg, Mat::Lin(xb), Mat::Lin(zb)) => {
                    for (k, col) in self.lin_cols[blk].iter().enumerate() {
                        let d = xb[k] * zb[k];
                        for &(r, a) in col {
                            for &(s, bv) in col {
                                if s >= r {
                                    big[(r, s)] += a * bv * d;
                                }
                            }
                        }
                    }
                }
                _ => unreachable!(),
            }
        }
        for r in 0..m {
            for s in r + 1..m {
                big[(s, r)] = big[(r, s)];
            }
        }
        big
    }
}

/// Cholesky factor of the Schur matrix, regularised if needed; solves are
/// refined against the unregularised matrix.
struct SchurFactor {
    m: DMatrix<f64>,
    chol: Cholesky<f64, nalgebra::Dyn>,
    regularised: bool,
}

impl SchurFactor {
    fn solve(&self, rhs: &DVector<f64>) -> DVector<f64> {
        let mut dy = self.chol.solve(rhs);
        if self.regularised {
            let norm = rhs.norm();
            for _ in 0..REFINEMENT_STEPS {
                let r = rhs - &self.m * &dy;
                if r.norm() <= 1e-15 * norm {
                    break;
                }
                dy += self.chol.solve(&r);
            }
        }
        dy
    }
}

const REFINEMENT_STEPS: usize = 4;

fn factor(m: DMatrix<f64>) -> Option<SchurFactor> {
    if m.nrows() == 0 {
        let chol = Cholesky::new(m.clone())?;
        return Some(SchurFactor { m, chol, regularised: false });
    }
    let scale = (0..m.nrows()).map(|i| m[(i, i)].abs()).fold(0.0, f64::max).max(1e-300);
    if let Some(chol) = Cholesky::new(m.clone()) {
        return Some(SchurFactor { m, chol, regularised: false });
    }
    for exp in [-14, -12, -10] {
        let mut reg = m.clone();
        for i in 0..reg.nrows() {
            reg[(i, i)] += scale * 10f64.powi(exp);
        }
        if let Some(chol) = Cholesky::new(reg) {
            return Some(SchurFactor { m, chol, regularised: true });
        }
    }
    None
}

fn symmetric_inverse(z: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let inv = Cholesky::new(z.clone())?.inverse();
    Some((&inv + inv.transpose()) * 0.5)
}

/// Largest `α` with `X + α dX` in the cone (`∞` if unbounded).
fn max_step(x: &Mat, dx: &Mat) -> Option<f64> {
    match (x, dx) {
        (Mat::Psd(x), Mat::Psd(d)) => {
            let l = Cholesky::new(x.clone())?.l();
            let t = l.solve_lower_triangular(d)?;
            let s = l.solve_lower_triangular(&t.transpose())?;
            let s = (&s + s.transpose()) * 0.5;
            let min = SymmetricEigen::new(s).eigenvalues.min();
            Some(if min < 0.0 { -1.0 / min } else { f64::INFINITY })
        }
        (Mat::Lin(x), Mat::Lin(d)) => Some(
            x.iter()
                .zip(d.iter())
                .filter(|(_, &dv)| dv < 0.0)
                .map(|(&xv, &dv)| -xv / dv)
                .fold(f64::INFINITY, f64::min),
        ),
        _ => unreachable!(),
    }
}

fn max_step_all(x: &[Mat], dx: &[Mat]) -> Option<f64> {
    let mut a = f64::INFINITY;
    for (xb, db) in x.iter().zip(dx) {
        a = a.min(max_step(xb, db)?);
    }
    Some(a)
}

struct Direction {
    dx: Vec<Mat>,
    dy: DVector<f64>,
    dz: Vec<Mat>,
}

impl Model {
    /// Solves for a direction given `H` (the X-part forcing term).
    fn direction(
        &self,
        chol: &SchurFactor,
        x: &[Mat],
        zinv: &[Mat],
        h: Vec<Mat>,
        rp: &DVector<f64>,
        rd: &[Mat],
        a_x_rd_zinv: &DVector<f64>,
    ) -> Direction {
        let rhs = rp - self.apply(&h) + a_x_rd_zinv;
        let dy = chol.solve(&rhs);
        let aty = self.adjoint(&dy);
        let dz = sub(rd, &aty);
        let mut dx = h;
        for (blk, d) in dx.iter_mut().enumerate() {
            match (d, &x[blk], &zinv[blk], &dz[blk]) {
                (Mat::Psd(d), Mat::Psd(xb), Mat::Psd(zb), Mat::Psd(dzb)) => {
                    *d -= xb * dzb * zb;
                    let sym = (&*d + d.transpose()) * 0.5;
                    *d = sym;
                }
                (Mat::Lin(d), Mat::Lin(xb), Mat::Lin(zb), Mat::Lin(dzb)) => {
                    for k in 0..d.len() {
                        d[k] -= xb[k] * dzb[k] * zb[k];
                    }
                }
                _ => unreachable!(),
            }
        }
        // Rounding in the Schur solve leaves A(dX) ≠ rp, which accumulates
        // as primal infeasibility once μ is small; project it out.
        if let Some(rg) = &self.row_gram {
            let err = rp - self.apply(&dx);
            let fix = self.adjoint(&rg.solve(&err));
            for (d, f) in dx.iter_mut().zip(&fix) {
                d.axpy(1.0, f);
            }
        }
        Direction { dx, dy, dz }
    }
}

fn x_w_zinv(x: &[Mat], w: &[Mat], zinv: &[Mat]) -> Vec<Mat> {
    x.iter()
        .zip(w)
        .zip(zinv)
        .map(|((xb, wb), zb)| match (xb, wb, zb) {
            (Mat::Psd(xb), Mat::Psd(wb), Mat::Psd(zb)) => Mat::Psd(xb * wb * zb),
            (Mat::Lin(xb), Mat::Lin(wb), Mat::Lin(zb)) => Mat::Lin(xb.component_mul(wb).component_mul(zb)),
            _ => unreachable!(),
        })
        .collect()
}

/// Primal-dual interior-point solve. Deterministic for identical input.
pub fn solve(problem: &ConicProblem, options: &SolveOptions) -> Result<Solution> {
    problem.validate()?;
    let model = match prepare(problem) {
        Prep::Ready(m) => m,
        Prep::Inconsistent { removed, certificate } => {
            let mut sol = empty_solution(problem, SolveStatus::PrimalInfeasible, removed);
            sol.dual_objective = problem
                .constraints
                .iter()
                .zip(&certificate)
                .map(|(c, y)| c.rhs * y)
                .sum();
            sol.dual = certificate;
            return Ok(sol);
        }
    };
    Ok(run(problem, &model, options))
}

fn empty_solution(problem: &ConicProblem, status: SolveStatus, removed: Vec<usize>) -> Solution {
    let zero: Vec<BlockValue> = problem
        .blocks
        .iter()
        .map(|b| match b.kind {
            BlockKind::Psd => BlockValue::Psd(SymMatrix::zeros(b.size)),
            BlockKind::Nonneg => BlockValue::Nonneg(vec![0.0; b.size]),
        })
        .collect();
    Solution {
        status,
        objective_value: f64::NAN,
        dual_objective: f64::NAN,
        primal: zero.clone(),
        dual: vec![0.0; problem.constraints.len()],
        dual_slack: zero,
        gap: f64::NAN,
        primal_residual: f64::NAN,
        dual_residual: f64::NAN,
        iterations: 0,
        removed_rows: removed,
    }
}

fn initial_point(model: &Model) -> (Vec<Mat>, DVector<f64>, Vec<Mat>) {
    let m = model.m();
    let b_max = model.b.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let c_norm = norm(&model.c);
    let mut x = Vec::new();
    let mut z = Vec::new();
    for &(kind, n) in &model.kinds {
        let root = (n as f64).sqrt();
        // rows are normalised, so ‖A_i‖ = 1
        let xi = (10.0f64).max(root).max(n as f64 * (1.0 + b_max) / 2.0);
        let eta = (10.0f64).max(root).max(1.0 + c_norm);
        x.push(Mat::scaled_identity(kind, n, xi));
        z.push(Mat::scaled_identity(kind, n, eta));
    }
    (x, DVector::zeros(m), z)
}

fn run(problem: &ConicProblem, model: &Model, options: &SolveOptions) -> Solution {
    let (mut x, mut y, mut z) = initial_point(model);
    let b_norm = model.b.norm();
    let c_norm = norm(&model.c);
    let mut status = SolveStatus::IterationLimit;
    let mut iterations = 0;
    let mut stalls = 0;
    let mut measures = (f64::NAN, f64::NAN, f64::NAN, f64::NAN, f64::NAN);
    let mut best: Option<(f64, Vec<Mat>, DVector<f64>, Vec<Mat>, (f64, f64, f64, f64, f64))> = None;

    for iter in 0..=options.max_iter {
        iterations = iter;
        let rp = &model.b - model.apply(&x);
        let aty = model.adjoint(&y);
        let rd = sub(&sub(&model.c, &aty), &z);
        let pobj = inner(&model.c, &x);
        let dobj = model.b.dot(&y);
        let gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
        let pinf = rp.norm() / (1.0 + b_norm);
        let dinf = norm(&rd) / (1.0 + c_norm);
        measures = (pobj, dobj, gap, pinf, dinf);
        if !(pobj.is_finite() && dobj.is_finite() && pinf.is_finite() && dinf.is_finite()) {
            status = SolveStatus::NumericalFailure;
            break;
        }
        if gap <= options.tol && pinf <= options.tol && dinf <= options.tol {
            status = SolveStatus::Optimal;
            break;
        }
        let merit = gap.max(pinf).max(dinf);
        if best.as_ref().is_none_or(|b| merit < b.0) {
            best = Some((merit, x.clone(), y.clone(), z.clone(), measures));
        }
        if dobj > 0.0 && norm(&sub(&model.c, &rd)) <= INFEASIBILITY_TOL * dobj && pinf > options.tol {
            status = SolveStatus::PrimalInfeasible;
            break;
        }
        if pobj < 0.0 && (&model.b - &rp).norm() <= INFEASIBILITY_TOL * -pobj && dinf > options.tol {
            status = SolveStatus::DualInfeasible;
            break;
        }
        if iter == options.max_iter {
            break;
        }

        let mu = inner(&x, &z) / model.nu;
        let zinv: Option<Vec<Mat>> = z
            .iter()
            .map(|zb| match zb {
                Mat::Psd(m) => symmetric_inverse(m).map(Mat::Psd),
                Mat::Lin(v) => Some(Mat::Lin(v.map(|e| 1.0 / e))),
            })
            .collect();
        let Some(zinv) = zinv else {
            status = SolveStatus::NumericalFailure;
            break;
        };
        let Some(chol) = factor(model.schur(&x, &zinv)) else {
            status = SolveStatus::NumericalFailure;
            break;
        };
        let a_x_rd_zinv = model.apply(&x_w_zinv(&x, &rd, &zinv));

        // predictor
        let h_aff: Vec<Mat> = x.iter().map(|xb| xb.scaled(-1.0)).collect();
        let aff = model.direction(&chol, &x, &zinv, h_aff, &rp, &rd, &a_x_rd_zinv);
        let (Some(ap), Some(ad)) = (max_step_all(&x, &aff.dx), max_step_all(&z, &aff.dz)) else {
            status = SolveStatus::NumericalFailure;
            break;
        };
        let (ap, ad) = (ap.min(1.0), ad.min(1.0));
        let mut xa = x.clone();
        let mut za = z.clone();
        for b in 0..xa.len() {
            xa[b].axpy(ap, &aff.dx[b]);
            za[b].axpy(ad, &aff.dz[b]);
        }
        let mu_aff = inner(&xa, &za) / model.nu;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        // corrector: H = σμ Z⁻¹ - X - dXa dZa Z⁻¹
        let h: Vec<Mat> = (0..x.len())
            .map(|b| match (&x[b], &zinv[b], &aff.dx[b], &aff.dz[b]) {
                (Mat::Psd(xb), Mat::Psd(zb), Mat::Psd(dxa), Mat::Psd(dza)) => {
                    Mat::Psd(zb * (sigma * mu) - xb - dxa * dza * zb)
                }
                (Mat::Lin(xb), Mat::Lin(zb), Mat::Lin(dxa), Mat::Lin(dza)) => Mat::Lin(DVector::from_fn(xb.len(), |k, _| {
                    (sigma * mu - dxa[k] * dza[k]) * zb[k] - xb[k]
                })),
                _ => unreachable!(),
            })
            .collect();
        let dir = model.direction(&chol, &x, &zinv, h, &rp, &rd, &a_x_rd_zinv);
        let (Some(ap), Some(ad)) = (max_step_all(&x, &dir.dx), max_step_all(&z, &dir.dz)) else {
            status = SolveStatus::NumericalFailure;
            break;
        };
        let ap = (STEP_FRACTION * ap).min(1.0);
        let ad = (STEP_FRACTION * ad).min(1.0);
        if ap < 1e-12 && ad < 1e-12 {
            stalls += 1;
            if stalls >= 3 {
                status = SolveStatus::NumericalFailure;
                break;
            }
        } else {
            stalls = 0;
        }
        for b in 0..x.len() {
            x[b].axpy(ap, &dir.dx[b]);
            z[b].axpy(ad, &dir.dz[b]);
        }
        y += &dir.dy * ad;
        // Both halves of a split free variable drift upwards together, which
        // ruins conditioning; removing most of the common part leaves A(X)
        // and <C, X> unchanged.
        for &(blk, k, l) in &model.free_pairs {
            if let Mat::Lin(v) = &mut x[blk] {
                let common = FREE_SHRINK * v[k].min(v[l]);
                v[k] -= common;
                v[l] -= common;
            }
        }
    }

    // A run that stops short reports its best iterate, not its last.
    if matches!(status, SolveStatus::NumericalFailure | SolveStatus::IterationLimit) {
        if let Some((_, bx, by, bz, bm)) = best {
            (x, y, z, measures) = (bx, by, bz, bm);
        }
    }
    let to_value = |mats: &[Mat]| -> Vec<BlockValue> {
        mats.iter()
            .map(|m| match m {
                Mat::Psd(d) => BlockValue::Psd(SymMatrix::from_dmatrix(d)),
                Mat::Lin(v) => BlockValue::Nonneg(v.iter().copied().collect()),
            })
            .collect()
    };
    let mut dual = vec![0.0; problem.constraints.len()];
    for (r, &(k, s)) in model.kept.iter().enumerate() {
        dual[k] = y[r] / s;
    }
    let (pobj, dobj, gap, pinf, dinf) = measures;
    Solution {
        status,
        objective_value: pobj,
        dual_objective: dobj,
        primal: to_value(&x),
        dual,
        dual_slack: to_value(&z),
        gap,
        primal_residual: pinf,
        dual_residual: dinf,
        iterations,
        removed_rows: model.removed.clone(),
    }
}
