//! Phase-1 feasibility: `min t  s.t.  A(X̃) - t·A(E) = b,  X̃ ∈ K,  t ≥ 0`,
//! where `E` is the identity of the cone. A point `X = X̃ - tE` satisfies the
//! equalities and lies in the cone up to `t`, so the original system is
//! feasible iff the optimum is zero. The phase-1 dual multipliers are a Farkas
//! certificate: `-Aᵀy ∈ K` and `bᵀy = t* > 0` when infeasible.

use super::{solve, BlockKind, BlockValue, ConicProblem, Entry, LinearFunctional, SolveOptions, SolveStatus};
use crate::error::{Error, Result};
use crate::symmat::SymMatrix;

/// Largest phase-1 optimum accepted as feasible.
pub const FEASIBLE_THRESHOLD: f64 = 1e-8;
/// Smallest certificate violation accepted as infeasible.
pub const INFEASIBLE_THRESHOLD: f64 = 1e-6;

#[derive(Clone, Debug)]
pub enum Feasibility {
    Feasible {
        point: Vec<BlockValue>,
        /// Largest cone violation of `point` (0 when strictly inside).
        cone_violation: f64,
        /// Largest absolute equality residual of `point`.
        residual: f64,
    },
    Infeasible {
        /// Multipliers `y`, one per constraint.
        certificate: Vec<f64>,
        /// `bᵀy`.
        violation: f64,
    },
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible { .. })
    }
}

pub fn check_feasibility(problem: &ConicProblem) -> Result<Feasibility> {
    check_feasibility_with(
        problem,
        &SolveOptions {
            tol: 1e-10,
            max_iter: 200,
        },
    )
}

pub fn check_feasibility_with(problem: &ConicProblem, options: &SolveOptions) -> Result<Feasibility> {
    problem.validate()?;
    let mut phase1 = ConicProblem {
        blocks: problem.blocks.clone(),
        objective: LinearFunctional::default(),
        constraints: Vec::with_capacity(problem.constraints.len()),
    };
    let t_block = phase1.add_block(BlockKind::Nonneg, 1);
    phase1.objective.entries.push(Entry::new(t_block, 0, 0, 1.0));
    for c in &problem.constraints {
        let shift: f64 = c
            .functional
            .entries
            .iter()
            .filter(|e| e.i == e.j)
            .map(|e| e.coeff)
            .sum();
        let mut f = c.functional.clone();
        if shift != 0.0 {
            f.entries.push(Entry::new(t_block, 0, 0, -shift));
        }
        phase1.add_constraint(f, c.rhs);
    }

    let sol = solve(&phase1, options)?;
    if sol.status == SolveStatus::PrimalInfeasible {
        return Ok(Feasibility::Infeasible {
            violation: sol.dual_objective,
            certificate: sol.dual,
        });
    }
    // A solve that stalls short of its tolerance still yields a verdict when
    // the iterate clears the thresholds with accurate residuals.
    let residuals_ok = |r: f64| sol.status == SolveStatus::Optimal || r <= FEASIBLE_THRESHOLD;
    let feasible = sol.objective_value <= FEASIBLE_THRESHOLD && residuals_ok(sol.primal_residual);
    let infeasible = sol.dual_objective >= INFEASIBLE_THRESHOLD && residuals_ok(sol.dual_residual);
    if !feasible && !infeasible && sol.status != SolveStatus::Optimal {
        return Err(Error::Solver {
            status: sol.status.to_string(),
            message: format!(
                "phase-1 solve stopped after {} iterations (objective {:.3e}, gap {:.3e}, residuals {:.3e}/{:.3e})",
                sol.iterations, sol.objective_value, sol.gap, sol.primal_residual, sol.dual_residual
            ),
        });
    }

    let t = sol.primal[t_block].as_nonneg().expect("t block")[0];
    if feasible {
        let point: Vec<BlockValue> = sol.primal[..t_block]
            .iter()
            .map(|b| match b {
                BlockValue::Psd(m) => BlockValue::Psd(m.sub(&SymMatrix::identity(m.dim()).scale(t)).expect("same size")),
                BlockValue::Nonneg(v) => BlockValue::Nonneg(v.iter().map(|x| x - t).collect()),
            })
            .collect();
        let cone_violation = point.iter().map(|b| (-b.cone_margin()).max(0.0)).fold(0.0, f64::max);
        let residual = problem
            .constraints
            .iter()
            .map(|c| (c.functional.evaluate(&point) - c.rhs).abs())
            .fold(0.0, f64::max);
        return Ok(Feasibility::Feasible {
            point,
            cone_violation,
            residual,
        });
    }
    if infeasible {
        return Ok(Feasibility::Infeasible {
            violation: sol.dual_objective,
            certificate: sol.dual,
        });
    }
    Err(Error::Solver {
        status: SolveStatus::NumericalFailure.to_string(),
        message: format!(
            "inconclusive phase-1 optimum {:.3e} (between {FEASIBLE_THRESHOLD:e} and {INFEASIBLE_THRESHOLD:e})",
            sol.objective_value
        ),
    })
}
