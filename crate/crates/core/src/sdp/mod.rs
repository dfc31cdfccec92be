//! Block conic programs over PSD and non-negative-orthant blocks.
//!
//! ```text
//! minimise   Σ_b <C_b, X_b>
//! subject to Σ_b <A_ib, X_b> = b_i     for every constraint i
//!            X_b ⪰ 0 (psd blocks),  X_b ≥ 0 (nonneg blocks)
//! ```
//!
//! Coefficients are given as sparse triplets `(block, i, j, coeff)` with the
//! SDPA convention: for a PSD block the triplet sets both `A[i][j]` and
//! `A[j][i]` to `coeff`, so an off-diagonal triplet contributes
//! `2·coeff·X_ij` to the inner product. A non-negative block of size `n` is a
//! vector; its triplets must have `i == j`.

mod feasibility;
mod io;
mod ipm;

pub use feasibility::{check_feasibility, check_feasibility_with, Feasibility};
pub use io::{dump_problem, load_problem};
pub use ipm::solve;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symmat::SymMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BlockKind {
    Psd,
    Nonneg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Block {
    pub kind: BlockKind,
    pub size: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Entry {
    pub block: usize,
    pub i: usize,
    pub j: usize,
    pub coeff: f64,
}

impl Entry {
    pub fn new(block: usize, i: usize, j: usize, coeff: f64) -> Self {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        Entry { block, i, j, coeff }
    }
}

/// A linear functional `X ↦ Σ_b <A_b, X_b>` in sparse triplet form.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LinearFunctional {
    pub entries: Vec<Entry>,
}

impl LinearFunctional {
    pub fn new(entries: Vec<Entry>) -> Self {
        LinearFunctional { entries }
    }

    /// Adds `coeff·X_ij` (not the SDPA matrix entry) to the functional.
    pub fn add_entry_value(&mut self, block: usize, i: usize, j: usize, coeff: f64) {
        let c = if i == j { coeff } else { 0.5 * coeff };
        self.entries.push(Entry::new(block, i, j, c));
    }

    pub fn evaluate(&self, x: &[BlockValue]) -> f64 {
        self.entries
            .iter()
            .map(|e| match &x[e.block] {
                BlockValue::Psd(m) => {
                    let mult = if e.i == e.j { 1.0 } else { 2.0 };
                    mult * e.coeff * m.get(e.i, e.j)
                }
                BlockValue::Nonneg(v) => e.coeff * v[e.i],
            })
            .sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub functional: LinearFunctional,
    pub rhs: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConicProblem {
    pub blocks: Vec<Block>,
    pub objective: LinearFunctional,
    pub constraints: Vec<Constraint>,
}

impl ConicProblem {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a block and returns its index.
    pub fn add_block(&mut self, kind: BlockKind, size: usize) -> usize {
        self.blocks.push(Block { kind, size });
        self.blocks.len() - 1
    }

    pub fn add_constraint(&mut self, functional: LinearFunctional, rhs: f64) {
        self.constraints.push(Constraint { functional, rhs });
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    /// Checks that every triplet refers to a declared block and a valid index.
    pub fn validate(&self) -> Result<()> {
        if self.blocks.iter().any(|b| b.size == 0) {
            return Err(Error::invalid("blocks must have positive size"));
        }
        let check = |f: &LinearFunctional, what: &str| -> Result<()> {
            for e in &f.entries {
                let block = self.blocks.get(e.block).ok_or_else(|| {
                    Error::invalid(format!("{what} references undeclared block {}", e.block))
                })?;
                if e.j >= block.size {
                    return Err(Error::invalid(format!(
                        "{what} entry ({}, {}) outside block {} of size {}",
                        e.i, e.j, e.block, block.size
                    )));
                }
                if block.kind == BlockKind::Nonneg && e.i != e.j {
                    return Err(Error::invalid(format!(
                        "{what} has an off-diagonal entry in non-negative block {}",
                        e.block
                    )));
                }
                if !e.coeff.is_finite() {
                    return Err(Error::invalid(format!("{what} has a non-finite coefficient")));
                }
            }
            Ok(())
        };
        check(&self.objective, "objective")?;
        for (k, c) in self.constraints.iter().enumerate() {
            check(&c.functional, &format!("constraint {k}"))?;
            if !c.rhs.is_finite() {
                return Err(Error::invalid(format!("constraint {k} has a non-finite rhs")));
            }
        }
        Ok(())
    }

    /// Total cone dimension `ν` (sum of block orders).
    pub fn barrier_degree(&self) -> usize {
        self.blocks.iter().map(|b| b.size).sum()
    }
}

/// Value of one block variable.
#[derive(Clone, Debug, PartialEq)]
pub enum BlockValue {
    Psd(SymMatrix),
    Nonneg(Vec<f64>),
}

impl BlockValue {
    pub fn as_psd(&self) -> Option<&SymMatrix> {
        match self {
            BlockValue::Psd(m) => Some(m),
            BlockValue::Nonneg(_) => None,
        }
    }

    pub fn as_nonneg(&self) -> Option<&[f64]> {
        match self {
            BlockValue::Nonneg(v) => Some(v),
            BlockValue::Psd(_) => None,
        }
    }

    /// Smallest eigenvalue (PSD) or smallest entry (non-negative).
    pub fn cone_margin(&self) -> f64 {
        match self {
            BlockValue::Psd(m) => m.min_eigenvalue(),
            BlockValue::Nonneg(v) => v.iter().copied().fold(f64::INFINITY, f64::min),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Optimal,
    PrimalInfeasible,
    DualInfeasible,
    IterationLimit,
    NumericalFailure,
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::PrimalInfeasible => "primal-infeasible",
            SolveStatus::DualInfeasible => "dual-infeasible",
            SolveStatus::IterationLimit => "iteration-limit",
            SolveStatus::NumericalFailure => "numerical-failure",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveOptions {
    /// Relative tolerance on the duality gap and both residuals.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-8,
            max_iter: 200,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub status: SolveStatus,
    /// `<C, X>` at the returned primal point.
    pub objective_value: f64,
    /// `bᵀy` at the returned dual point.
    pub dual_objective: f64,
    pub primal: Vec<BlockValue>,
    /// Multipliers `y`, one per original constraint (zero for removed redundant rows).
    pub dual: Vec<f64>,
    /// Dual slack `Z = C - Σ y_i A_i`.
    pub dual_slack: Vec<BlockValue>,
    /// `|<C,X> - bᵀy| / (1 + |<C,X>| + |bᵀy|)`.
    pub gap: f64,
    /// `‖b - A(X)‖ / (1 + ‖b‖)`.
    pub primal_residual: f64,
    /// `‖C - Aᵀy - Z‖ / (1 + ‖C‖)`.
    pub dual_residual: f64,
    pub iterations: usize,
    /// Original indices of constraints dropped as linearly dependent.
    pub removed_rows: Vec<usize>,
}
