//! Graph bounds obtained from the conic program
//!
//! ```text
//! minimise λ  s.t.  Y - J ∈ K,  Y_ii = λ,  Y_ij = 0 for distinct non-adjacent i, j
//! ```
//!
//! with `K` the PSD cone (Lovász ϑ), `P + N` (Schrijver ϑ′) or the degree-`r`
//! sum-of-squares cone (ϑ^(r)). The free scalar `λ` is carried as
//! `λ⁺ - λ⁻` in a two-entry non-negative block, as are the free entries `Y_ij`
//! on edges in the SOS variant.

mod sos;

use std::fmt;
use std::path::PathBuf;

use serde::Serialize;

pub use sos::{sos_system, GramLayout, MonomialBasis, SosRow, SosSystem, MAX_GRAM_ORDER, MAX_SOS_ROWS};

use crate::error::{Error, Result};
use crate::graphs::Graph;
use crate::limits::Limits;
use crate::sdp::{
    check_feasibility_with, dump_problem, solve, BlockKind, BlockValue, ConicProblem, Feasibility, LinearFunctional,
    Entry, SolveOptions, SolveStatus,
};
use crate::symmat::{min_quadratic_on_simplex_with, SymMatrix};

/// Vertex cap for the SDP-based bounds.
pub const MAX_BOUND_VERTICES: usize = 200;
/// Largest vertex count accepted by `theta_r` with `r = 1`.
pub const MAX_THETA1_VERTICES: usize = 7;
/// Largest matrix order accepted by `parrilo_membership`.
pub const MAX_PARRILO_DIM: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundName {
    Theta,
    ThetaPrime,
    ThetaR(u32),
}

impl fmt::Display for BoundName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundName::Theta => f.write_str("theta"),
            BoundName::ThetaPrime => f.write_str("theta_prime"),
            BoundName::ThetaR(r) => write!(f, "theta_r({r})"),
        }
    }
}

impl Serialize for BoundName {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Debug)]
pub struct BoundResult {
    pub graph_id: String,
    pub bound_name: BoundName,
    pub value: f64,
    pub solver_status: SolveStatus,
    /// Primal `Y` of the conic program.
    pub certificate: SymMatrix,
    pub lambda: f64,
    pub iterations: usize,
}

/// Serialised form of a [`BoundResult`].
#[derive(Clone, Debug, Serialize)]
pub struct BoundRecord {
    pub graph: String,
    pub bound: BoundName,
    pub value: f64,
    pub status: SolveStatus,
    pub lambda: f64,
    pub certificate_path: Option<String>,
}

impl BoundResult {
    pub fn record(&self, certificate_path: Option<String>) -> BoundRecord {
        BoundRecord {
            graph: self.graph_id.clone(),
            bound: self.bound_name,
            value: self.value,
            status: self.solver_status,
            lambda: self.lambda,
            certificate_path,
        }
    }

    /// Largest violation of `Y_ii = λ` and `Y_ij = 0` over non-adjacent pairs.
    pub fn certificate_residual(&self, g: &Graph) -> f64 {
        let y = &self.certificate;
        let mut worst: f64 = 0.0;
        for i in 0..y.dim() {
            worst = worst.max((y.get(i, i) - self.lambda).abs());
        }
        for (i, j) in g.non_edges() {
            worst = worst.max(y.get(i, j).abs());
        }
        worst
    }
}

#[derive(Clone, Debug)]
pub struct BoundOptions {
    pub solve: SolveOptions,
    pub layout: GramLayout,
    pub limits: Limits,
    /// Where to write the instance when the solver does not reach optimality.
    pub dump_on_failure: Option<PathBuf>,
    pub graph_id: Option<String>,
}

impl Default for BoundOptions {
    fn default() -> Self {
        BoundOptions {
            solve: SolveOptions::default(),
            layout: GramLayout::SignSymmetric,
            limits: Limits::default(),
            dump_on_failure: None,
            graph_id: None,
        }
    }
}

fn check_graph(g: &Graph) -> Result<()> {
    if g.vertex_count() == 0 {
        return Err(Error::invalid("graph has no vertices"));
    }
    if g.vertex_count() > MAX_BOUND_VERTICES {
        return Err(Error::limit(format!(
            "{} vertices exceed the bound cap of {MAX_BOUND_VERTICES}",
            g.vertex_count()
        )));
    }
    Ok(())
}

fn lambda_terms(f: &mut LinearFunctional, block: usize, coeff: f64) {
    f.entries.push(Entry::new(block, 0, 0, coeff));
    f.entries.push(Entry::new(block, 1, 1, -coeff));
}

fn split_value(v: &[f64], k: usize) -> f64 {
    v[2 * k] - v[2 * k + 1]
}

/// Blocks: `0` = `Y - J` (PSD), `1` = `λ±`.
pub fn lovasz_problem(g: &Graph) -> Result<ConicProblem> {
    check_graph(g)?;
    let n = g.vertex_count();
    let mut p = ConicProblem::new();
    let x = p.add_block(BlockKind::Psd, n);
    let lam = p.add_block(BlockKind::Nonneg, 2);
    lambda_terms(&mut p.objective, lam, 1.0);
    for i in 0..n {
        let mut f = LinearFunctional::default();
        f.add_entry_value(x, i, i, 1.0);
        lambda_terms(&mut f, lam, -1.0);
        p.add_constraint(f, -1.0);
    }
    for (i, j) in g.non_edges() {
        let mut f = LinearFunctional::default();
        f.add_entry_value(x, i, j, 1.0);
        p.add_constraint(f, -1.0);
    }
    Ok(p)
}

/// Blocks: `0` = `P` (PSD), `1` = `λ±`, `2` = `N` on non-adjacent pairs (absent
/// when there are none). Diagonal and edge entries of `N` are omitted: they
/// can be absorbed into `P` and the free `Y_ij` respectively.
pub fn schrijver_problem(g: &Graph) -> Result<ConicProblem> {
    check_graph(g)?;
    let n = g.vertex_count();
    let non_edges = g.non_edges();
    let mut p = ConicProblem::new();
    let pb = p.add_block(BlockKind::Psd, n);
    let lam = p.add_block(BlockKind::Nonneg, 2);
    let nb = (!non_edges.is_empty()).then(|| p.add_block(BlockKind::Nonneg, non_edges.len()));
    lambda_terms(&mut p.objective, lam, 1.0);
    for i in 0..n {
        let mut f = LinearFunctional::default();
        f.add_entry_value(pb, i, i, 1.0);
        lambda_terms(&mut f, lam, -1.0);
        p.add_constraint(f, -1.0);
    }
    for (k, &(i, j)) in non_edges.iter().enumerate() {
        let mut f = LinearFunctional::default();
        f.add_entry_value(pb, i, j, 1.0);
        f.entries.push(Entry::new(nb.expect("non-edge block"), k, k, 1.0));
        p.add_constraint(f, -1.0);
    }
    Ok(p)
}

/// Blocks: the Gram blocks of `sos_system(n, r, layout)`, then `λ±`, then
/// `Y_e±` for every edge `e` in `g.edges()` order (absent without edges).
pub fn theta_r_problem(g: &Graph, r: u32, layout: GramLayout) -> Result<ConicProblem> {
    check_graph(g)?;
    let n = g.vertex_count();
    match r {
        0 => {}
        1 if n <= MAX_THETA1_VERTICES => {}
        1 => {
            return Err(Error::limit(format!(
                "theta_r with r = 1 supports at most {MAX_THETA1_VERTICES} vertices, got {n}"
            )))
        }
        _ => return Err(Error::invalid(format!("r must be 0 or 1, got {r}"))),
    }
    let sys = sos_system(n, r, layout)?;
    let edges = g.edges();
    let mut p = ConicProblem::new();
    for b in &sys.blocks {
        p.add_block(BlockKind::Psd, b.len());
    }
    let lam = p.add_block(BlockKind::Nonneg, 2);
    let eb = (!edges.is_empty()).then(|| p.add_block(BlockKind::Nonneg, 2 * edges.len()));
    lambda_terms(&mut p.objective, lam, 1.0);
    // Q = Y - J: Q_ii = λ - 1, Q_ij = -1 off edges, Q_e free on edges.
    for row in &sys.rows {
        let mut f = LinearFunctional::new(row.gram.iter().map(|&(b, i, j)| Entry::new(b, i, j, 1.0)).collect());
        let mut diag: i64 = 0;
        let mut rhs: i64 = 0;
        for &((i, j), c) in &row.target {
            if i == j {
                diag += c;
                rhs -= c;
            } else if g.is_adjacent(i, j) {
                let e = edges.binary_search(&(i, j)).expect("edge index");
                let blk = eb.expect("edge block");
                f.entries.push(Entry::new(blk, 2 * e, 2 * e, -(c as f64)));
                f.entries.push(Entry::new(blk, 2 * e + 1, 2 * e + 1, c as f64));
            } else {
                rhs -= c;
            }
        }
        if diag != 0 {
            lambda_terms(&mut f, lam, -(diag as f64));
        }
        p.add_constraint(f, rhs as f64);
    }
    Ok(p)
}

fn run(problem: &ConicProblem, options: &BoundOptions) -> Result<crate::sdp::Solution> {
    let sol = solve(problem, &options.solve)?;
    if sol.status == SolveStatus::Optimal {
        return Ok(sol);
    }
    let mut message = format!(
        "solver stopped after {} iterations ({} blocks, {} constraints; gap {:.3e}, residuals {:.3e}/{:.3e})",
        sol.iterations,
        problem.blocks.len(),
        problem.num_constraints(),
        sol.gap,
        sol.primal_residual,
        sol.dual_residual
    );
    if let Some(path) = &options.dump_on_failure {
        match std::fs::write(path, dump_problem(problem)) {
            Ok(()) => message.push_str(&format!("; instance written to {}", path.display())),
            Err(e) => message.push_str(&format!("; instance dump failed: {e}")),
        }
    }
    Err(Error::Solver {
        status: sol.status.to_string(),
        message,
    })
}

fn graph_id(g: &Graph, options: &BoundOptions) -> String {
    options
        .graph_id
        .clone()
        .unwrap_or_else(|| format!("graph(n={}, m={})", g.vertex_count(), g.edge_count()))
}

pub fn lovasz_theta(g: &Graph) -> Result<BoundResult> {
    lovasz_theta_with(g, &BoundOptions::default())
}

pub fn lovasz_theta_with(g: &Graph, options: &BoundOptions) -> Result<BoundResult> {
    let problem = lovasz_problem(g)?;
    let sol = run(&problem, options)?;
    let x = sol.primal[0].as_psd().expect("psd block");
    let lambda = split_value(sol.primal[1].as_nonneg().expect("lambda block"), 0);
    Ok(BoundResult {
        graph_id: graph_id(g, options),
        bound_name: BoundName::Theta,
        value: lambda,
        solver_status: sol.status,
        certificate: x.add_constant(1.0),
        lambda,
        iterations: sol.iterations,
    })
}

pub fn schrijver_theta(g: &Graph) -> Result<BoundResult> {
    schrijver_theta_with(g, &BoundOptions::default())
}

pub fn schrijver_theta_with(g: &Graph, options: &BoundOptions) -> Result<BoundResult> {
    let problem = schrijver_problem(g)?;
    let sol = run(&problem, options)?;
    let mut y = sol.primal[0].as_psd().expect("psd block").add_constant(1.0);
    let lambda = split_value(sol.primal[1].as_nonneg().expect("lambda block"), 0);
    if let Some(nv) = sol.primal.get(2).and_then(BlockValue::as_nonneg) {
        for (k, (i, j)) in g.non_edges().into_iter().enumerate() {
            y.set(i, j, y.get(i, j) + nv[k]);
        }
    }
    Ok(BoundResult {
        graph_id: graph_id(g, options),
        bound_name: BoundName::ThetaPrime,
        value: lambda,
        solver_status: sol.status,
        certificate: y,
        lambda,
        iterations: sol.iterations,
    })
}

pub fn theta_r(g: &Graph, r: u32) -> Result<BoundResult> {
    theta_r_with(g, r, &BoundOptions::default())
}

pub fn theta_r_with(g: &Graph, r: u32, options: &BoundOptions) -> Result<BoundResult> {
    let problem = theta_r_problem(g, r, options.layout)?;
    let sol = run(&problem, options)?;
    let gram_blocks = problem.blocks.len() - 1 - usize::from(g.edge_count() > 0);
    let lambda = split_value(sol.primal[gram_blocks].as_nonneg().expect("lambda block"), 0);
    let n = g.vertex_count();
    let mut y = SymMatrix::zeros(n);
    for i in 0..n {
        y.set(i, i, lambda);
    }
    if let Some(ev) = sol.primal.get(gram_blocks + 1).and_then(BlockValue::as_nonneg) {
        for (k, (i, j)) in g.edges().into_iter().enumerate() {
            y.set(i, j, split_value(ev, k) + 1.0);
        }
    }
    Ok(BoundResult {
        graph_id: graph_id(g, options),
        bound_name: BoundName::ThetaR(r),
        value: lambda,
        solver_status: sol.status,
        certificate: y,
        lambda,
        iterations: sol.iterations,
    })
}

/// `1 / min_{x ∈ Δ} xᵀ(I + A)x`, which equals α(G).
pub fn motzkin_straus_value(g: &Graph) -> Result<f64> {
    motzkin_straus_value_with(g, &Limits::default())
}

pub fn motzkin_straus_value_with(g: &Graph, limits: &Limits) -> Result<f64> {
    if g.vertex_count() == 0 {
        return Err(Error::invalid("graph has no vertices"));
    }
    let m = SymMatrix::adjacency(g).add(&SymMatrix::identity(g.vertex_count()))?;
    Ok(1.0 / min_quadratic_on_simplex_with(&m, limits)?.value)
}

fn check_matrix(q: &SymMatrix) -> Result<()> {
    if q.dim() == 0 {
        return Err(Error::invalid("empty matrix"));
    }
    if !q.is_finite() {
        return Err(Error::invalid("matrix has non-finite entries"));
    }
    Ok(())
}

fn feasibility_options(tol: f64) -> SolveOptions {
    SolveOptions { tol, max_iter: 200 }
}

#[derive(Clone, Debug)]
pub enum ParriloMembership {
    /// `Q = P + N` with `P ⪰ 0` and `N ≥ 0` zero on the diagonal.
    Member { p: SymMatrix, n: SymMatrix },
    /// `W ⪰ 0`, `W ≥ 0` entrywise with `<W, Q> < 0`, normalised to unit trace.
    NonMember { certificate: SymMatrix, violation: f64 },
}

impl ParriloMembership {
    pub fn is_member(&self) -> bool {
        matches!(self, ParriloMembership::Member { .. })
    }
}

pub fn parrilo_problem(q: &SymMatrix) -> Result<ConicProblem> {
    check_matrix(q)?;
    let n = q.dim();
    if n > MAX_PARRILO_DIM {
        return Err(Error::limit(format!("order {n} exceeds the P + N cap of {MAX_PARRILO_DIM}")));
    }
    let mut p = ConicProblem::new();
    let pb = p.add_block(BlockKind::Psd, n);
    let nb = (n > 1).then(|| p.add_block(BlockKind::Nonneg, n * (n - 1) / 2));
    let mut k = 0;
    for i in 0..n {
        for j in i..n {
            let mut f = LinearFunctional::default();
            f.add_entry_value(pb, i, j, 1.0);
            if i != j {
                f.entries.push(Entry::new(nb.expect("off-diagonal block"), k, k, 1.0));
                k += 1;
            }
            p.add_constraint(f, q.get(i, j));
        }
    }
    Ok(p)
}

pub fn parrilo_membership(q: &SymMatrix) -> Result<ParriloMembership> {
    parrilo_membership_with(q, 1e-10)
}

pub fn parrilo_membership_with(q: &SymMatrix, tol: f64) -> Result<ParriloMembership> {
    let problem = parrilo_problem(q)?;
    let n = q.dim();
    match check_feasibility_with(&problem, &feasibility_options(tol))? {
        Feasibility::Feasible { point, .. } => {
            let p = point[0].as_psd().expect("psd block").clone();
            let mut nm = SymMatrix::zeros(n);
            if let Some(v) = point.get(1).and_then(BlockValue::as_nonneg) {
                let mut k = 0;
                for i in 0..n {
                    for j in i + 1..n {
                        nm.set(i, j, v[k]);
                        k += 1;
                    }
                }
            }
            Ok(ParriloMembership::Member { p, n: nm })
        }
        Feasibility::Infeasible { certificate, violation } => {
            // Rows are enumerated (i, j), i <= j; W = -Aᵀy on the P block.
            let mut w = SymMatrix::zeros(n);
            let mut k = 0;
            for i in 0..n {
                for j in i..n {
                    let scale = if i == j { 1.0 } else { 0.5 };
                    w.set(i, j, (-certificate[k] * scale).max(0.0));
                    k += 1;
                }
            }
            let trace: f64 = w.diagonal().iter().sum();
            let certificate = if trace > 0.0 { w.scale(1.0 / trace) } else { w };
            Ok(ParriloMembership::NonMember { certificate, violation })
        }
    }
}

#[derive(Clone, Debug)]
pub enum SosMembership {
    Member {
        basis: MonomialBasis,
        /// Gram matrix over `basis` (block diagonal for the sign-symmetric layout).
        gram: SymMatrix,
        /// Largest coefficient mismatch between `m(x)ᵀ G m(x)` and the target.
        residual: f64,
    },
    NonMember {
        /// Multipliers, one per coefficient equation of `sos_system`.
        certificate: Vec<f64>,
        violation: f64,
    },
}

impl SosMembership {
    pub fn is_member(&self) -> bool {
        matches!(self, SosMembership::Member { .. })
    }
}

pub fn sos_problem(q: &SymMatrix, r: u32, layout: GramLayout) -> Result<(SosSystem, ConicProblem)> {
    check_matrix(q)?;
    let sys = sos_system(q.dim(), r, layout)?;
    let mut p = ConicProblem::new();
    for b in &sys.blocks {
        p.add_block(BlockKind::Psd, b.len());
    }
    for row in &sys.rows {
        let f = LinearFunctional::new(row.gram.iter().map(|&(b, i, j)| Entry::new(b, i, j, 1.0)).collect());
        let rhs: f64 = row.target.iter().map(|&((i, j), c)| c as f64 * q.get(i, j)).sum();
        p.add_constraint(f, rhs);
    }
    Ok((sys, p))
}

pub fn sos_cone_membership(q: &SymMatrix, r: u32) -> Result<SosMembership> {
    sos_cone_membership_with(q, r, GramLayout::SignSymmetric, 1e-10)
}

pub fn sos_cone_membership_with(q: &SymMatrix, r: u32, layout: GramLayout, tol: f64) -> Result<SosMembership> {
    let (sys, problem) = sos_problem(q, r, layout)?;
    match check_feasibility_with(&problem, &feasibility_options(tol))? {
        Feasibility::Feasible { point, .. } => {
            let size = sys.basis.len();
            let mut gram = SymMatrix::zeros(size);
            for (b, members) in sys.blocks.iter().enumerate() {
                let blk = point[b].as_psd().expect("psd block");
                for (p, &gp) in members.iter().enumerate() {
                    for (qq, &gq) in members.iter().enumerate().skip(p) {
                        gram.set(gp, gq, blk.get(p, qq));
                    }
                }
            }
            let residual = gram_residual(&sys.basis, &gram, q, r);
            Ok(SosMembership::Member {
                basis: sys.basis,
                gram,
                residual,
            })
        }
        Feasibility::Infeasible { certificate, violation } => Ok(SosMembership::NonMember { certificate, violation }),
    }
}

/// Largest coefficient mismatch between `m(x)ᵀ G m(x)` and
/// `(Σ x²)^r Σ Q_ij x_i² x_j²`, recomputed from scratch over every monomial.
pub fn gram_residual(basis: &MonomialBasis, gram: &SymMatrix, q: &SymMatrix, r: u32) -> f64 {
    use std::collections::BTreeMap;
    let mut coeffs: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
    for (p, mp) in basis.monomials.iter().enumerate() {
        for (s, ms) in basis.monomials.iter().enumerate() {
            let alpha: Vec<u32> = mp.iter().zip(ms).map(|(a, b)| a + b).collect();
            *coeffs.entry(alpha).or_default() += gram.get(p, s);
        }
    }
    let n = q.dim();
    let squares = MonomialBasis::homogeneous(n, r);
    for kappa in &squares.monomials {
        let mult = sos::multinomial(kappa) as f64;
        for i in 0..n {
            for j in 0..n {
                let mut alpha: Vec<u32> = kappa.iter().map(|e| 2 * e).collect();
                alpha[i] += 2;
                alpha[j] += 2;
                *coeffs.entry(alpha).or_default() -= mult * q.get(i, j);
            }
        }
    }
    coeffs.values().fold(0.0, |m, v| m.max(v.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c5_lovasz() {
        let g = Graph::cycle(5).unwrap();
        let res = lovasz_theta(&g).unwrap();
        assert!((res.value - 5f64.sqrt()).abs() < 1e-7, "{}", res.value);
        assert!(res.certificate_residual(&g) < 1e-8);
    }

    #[test]
    fn complete_graph_is_one() {
        let g = Graph::complete(4).unwrap();
        assert!((lovasz_theta(&g).unwrap().value - 1.0).abs() < 1e-7);
        assert!((schrijver_theta(&g).unwrap().value - 1.0).abs() < 1e-7);
    }

    #[test]
    fn caps_and_arguments() {
        let g = Graph::cycle(8).unwrap();
        assert!(matches!(theta_r(&g, 1), Err(Error::ResourceLimit(_))));
        assert!(matches!(theta_r(&g, 2), Err(Error::InvalidArgument(_))));
        assert!(matches!(parrilo_membership(&SymMatrix::zeros(65)), Err(Error::ResourceLimit(_))));
    }

    #[test]
    fn motzkin_straus_small() {
        assert!((motzkin_straus_value(&Graph::cycle(5).unwrap()).unwrap() - 2.0).abs() < 1e-9);
        assert!((motzkin_straus_value(&Graph::edgeless(4).unwrap()).unwrap() - 4.0).abs() < 1e-9);
    }
}
