use shannon_cone::sdp::{
    check_feasibility, dump_problem, load_problem, solve, BlockKind, BlockValue, ConicProblem, Entry,
    Feasibility, LinearFunctional, SolveOptions, SolveStatus,
};

fn lf(entries: &[(usize, usize, usize, f64)]) -> LinearFunctional {
    LinearFunctional::new(entries.iter().map(|&(b, i, j, c)| Entry::new(b, i, j, c)).collect())
}

/// minimise λ subject to λ·I₂ - J₂ ⪰ 0, with λ split as λ⁺ - λ⁻.
fn lambda_identity_problem() -> ConicProblem {
    let mut p = ConicProblem::new();
    let x = p.add_block(BlockKind::Psd, 2);
    let l = p.add_block(BlockKind::Nonneg, 2);
    p.objective = lf(&[(l, 0, 0, 1.0), (l, 1, 1, -1.0)]);
    for i in 0..2 {
        p.add_constraint(lf(&[(x, i, i, 1.0), (l, 0, 0, -1.0), (l, 1, 1, 1.0)]), -1.0);
    }
    p.add_constraint(lf(&[(x, 0, 1, 0.5)]), -1.0);
    p
}

#[test]
fn largest_eigenvalue_of_all_ones() {
    let sol = solve(&lambda_identity_problem(), &SolveOptions::default()).unwrap();
    assert_eq!(sol.status, SolveStatus::Optimal);
    assert!((sol.objective_value - 2.0).abs() < 1e-7, "{}", sol.objective_value);
    assert!(sol.gap <= 1e-8 && sol.primal_residual <= 1e-8 && sol.dual_residual <= 1e-8);
    assert!(sol.primal[0].cone_margin() >= -1e-9);
}

#[test]
fn scalar_equality() {
    let mut p = ConicProblem::new();
    let b = p.add_block(BlockKind::Nonneg, 1);
    p.objective = lf(&[(b, 0, 0, 1.0)]);
    p.add_constraint(lf(&[(b, 0, 0, 1.0)]), 3.0);
    let sol = solve(&p, &SolveOptions::default()).unwrap();
    assert_eq!(sol.status, SolveStatus::Optimal);
    assert!((sol.objective_value - 3.0).abs() < 1e-8);
}

#[test]
fn redundant_rows_are_removed() {
    let mut p = lambda_identity_problem();
    let dup = p.constraints[2].clone();
    p.add_constraint(
        LinearFunctional::new(dup.functional.entries.iter().map(|e| Entry { coeff: 2.0 * e.coeff, ..*e }).collect()),
        2.0 * dup.rhs,
    );
    let sol = solve(&p, &SolveOptions::default()).unwrap();
    assert_eq!(sol.status, SolveStatus::Optimal);
    assert_eq!(sol.removed_rows, vec![3]);
    assert!((sol.objective_value - 2.0).abs() < 1e-7);

    // inconsistent duplicate
    let mut q = lambda_identity_problem();
    q.add_constraint(lf(&[(0, 0, 1, 0.5)]), 5.0);
    let sol = solve(&q, &SolveOptions::default()).unwrap();
    assert_eq!(sol.status, SolveStatus::PrimalInfeasible);
    assert!(sol.dual_objective > 0.0);
}

#[test]
fn invariant_under_row_and_block_permutation() {
    let base = solve(&lambda_identity_problem(), &SolveOptions::default()).unwrap();
    let mut p = lambda_identity_problem();
    p.constraints.reverse();
    // swap the two blocks
    p.blocks.swap(0, 1);
    let remap = |f: &mut LinearFunctional| {
        for e in f.entries.iter_mut() {
            e.block = 1 - e.block;
        }
    };
    remap(&mut p.objective);
    for c in p.constraints.iter_mut() {
        remap(&mut c.functional);
    }
    let sol = solve(&p, &SolveOptions::default()).unwrap();
    assert!((sol.objective_value - base.objective_value).abs() < 1e-8);
}

#[test]
fn deterministic() {
    let a = solve(&lambda_identity_problem(), &SolveOptions::default()).unwrap();
    let b = solve(&lambda_identity_problem(), &SolveOptions::default()).unwrap();
    assert_eq!(a.objective_value.to_bits(), b.objective_value.to_bits());
    assert_eq!(a.iterations, b.iterations);
}

#[test]
fn psd_with_negative_diagonal_is_infeasible() {
    let mut p = ConicProblem::new();
    let x = p.add_block(BlockKind::Psd, 2);
    p.add_constraint(lf(&[(x, 0, 0, 1.0)]), -1.0);
    match check_feasibility(&p).unwrap() {
        Feasibility::Infeasible { certificate, violation } => {
            assert!(violation >= 1e-6);
            // -Aᵀy = -y·E₁₁ must be PSD, so y ≤ 0 and bᵀy = -y > 0
            assert!(certificate[0] < 0.0);
        }
        f => panic!("expected infeasible, got {f:?}"),
    }
}

/// P ⪰ 0, N ≥ 0 (off-diagonal), P + N = Q for a 2×2 Q.
fn parrilo_2x2(q: [[f64; 2]; 2]) -> ConicProblem {
    let mut p = ConicProblem::new();
    let pb = p.add_block(BlockKind::Psd, 2);
    let nb = p.add_block(BlockKind::Nonneg, 1);
    p.add_constraint(lf(&[(pb, 0, 0, 1.0)]), q[0][0]);
    p.add_constraint(lf(&[(pb, 1, 1, 1.0)]), q[1][1]);
    p.add_constraint(lf(&[(pb, 0, 1, 0.5), (nb, 0, 0, 1.0)]), q[0][1]);
    p
}

#[test]
fn nonnegative_matrix_is_psd_plus_nonneg() {
    match check_feasibility(&parrilo_2x2([[0.0, 1.0], [1.0, 0.0]])).unwrap() {
        Feasibility::Feasible { point, cone_violation, residual } => {
            assert!(cone_violation <= 1e-8 && residual <= 1e-8);
            let pm = point[0].as_psd().unwrap();
            assert!(pm.max_abs() < 1e-6, "P should vanish: {pm:?}");
            let n = point[1].as_nonneg().unwrap();
            assert!((n[0] - 1.0).abs() < 1e-6);
        }
        f => panic!("expected feasible, got {f:?}"),
    }
}

#[test]
fn far_negative_offdiagonal_is_not_psd_plus_nonneg() {
    match check_feasibility(&parrilo_2x2([[1.0, -3.0], [-3.0, 1.0]])).unwrap() {
        Feasibility::Infeasible { violation, .. } => assert!(violation >= 1e-6),
        f => panic!("expected infeasible, got {f:?}"),
    }
}

#[test]
fn dump_roundtrip() {
    let p = lambda_identity_problem();
    let back = load_problem(&dump_problem(&p)).unwrap();
    assert_eq!(back, p);
    assert!(load_problem("blocks 1\npsd 2\nconstraints 1\nrhs 1\n1 2 1 1 1\n").is_err());
}

#[test]
fn validation_rejects_bad_triplets() {
    let mut p = ConicProblem::new();
    let b = p.add_block(BlockKind::Nonneg, 2);
    p.add_constraint(lf(&[(b, 0, 1, 1.0)]), 1.0);
    assert!(solve(&p, &SolveOptions::default()).is_err());
    let mut q = ConicProblem::new();
    q.add_block(BlockKind::Psd, 2);
    q.add_constraint(lf(&[(1, 0, 0, 1.0)]), 1.0);
    assert!(solve(&q, &SolveOptions::default()).is_err());
}

#[test]
fn unbounded_lp_detected() {
    // minimise -x₀ with x₀ - x₁ = 0, x ≥ 0
    let mut p = ConicProblem::new();
    let b = p.add_block(BlockKind::Nonneg, 2);
    p.objective = lf(&[(b, 0, 0, -1.0)]);
    p.add_constraint(lf(&[(b, 0, 0, 1.0), (b, 1, 1, -1.0)]), 0.0);
    let sol = solve(&p, &SolveOptions::default()).unwrap();
    assert_eq!(sol.status, SolveStatus::DualInfeasible);
}

#[test]
fn infeasible_lp_detected() {
    // x₀ + x₁ = -1, x ≥ 0
    let mut p = ConicProblem::new();
    let b = p.add_block(BlockKind::Nonneg, 2);
    p.objective = lf(&[(b, 0, 0, 1.0)]);
    p.add_constraint(lf(&[(b, 0, 0, 1.0), (b, 1, 1, 1.0)]), -1.0);
    let sol = solve(&p, &SolveOptions::default()).unwrap();
    assert_eq!(sol.status, SolveStatus::PrimalInfeasible);
}

#[test]
fn block_values_report_margins() {
    let v = BlockValue::Nonneg(vec![0.5, -0.25]);
    assert_eq!(v.cone_margin(), -0.25);
}
