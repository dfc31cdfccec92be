use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shannon_cone::bounds::*;
use shannon_cone::graphs::{chromatic_number, independence_number};
use shannon_cone::symmat::{is_copositive_oracle, lemma1_transform};
use shannon_cone::{Error, Graph, SymMatrix};

fn random_graph(rng: &mut ChaCha8Rng, n: usize) -> Graph {
    let p: f64 = rng.gen_range(0.2..0.8);
    let mut g = Graph::edgeless(n).unwrap();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                g.add_edge(i, j).unwrap();
            }
        }
    }
    g
}

/// ϑ(C_n) for odd n has the closed form n·cos(π/n) / (1 + cos(π/n)).
fn odd_cycle_theta(n: usize) -> f64 {
    let c = (std::f64::consts::PI / n as f64).cos();
    n as f64 * c / (1.0 + c)
}

fn brute_alpha(g: &Graph) -> usize {
    let n = g.vertex_count();
    (0u32..1 << n)
        .filter(|&s| {
            (0..n).all(|i| (i + 1..n).all(|j| s >> i & 1 == 0 || s >> j & 1 == 0 || !g.is_adjacent(i, j)))
        })
        .map(|s| s.count_ones() as usize)
        .max()
        .unwrap()
}

fn m(rows: &[&[f64]]) -> SymMatrix {
    SymMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
}

#[test]
fn lovasz_on_odd_cycles_matches_closed_form() {
    for n in [5, 7, 9, 11] {
        let g = Graph::cycle(n).unwrap();
        let res = lovasz_theta(&g).unwrap();
        assert!((res.value - odd_cycle_theta(n)).abs() < 1e-6, "C{n}: {}", res.value);
        assert!(res.certificate_residual(&g) < 1e-8);
        assert_eq!(res.value, res.lambda);
    }
    assert!((lovasz_theta(&Graph::cycle(5).unwrap()).unwrap().value - 5f64.sqrt()).abs() < 1e-6);
    assert!((lovasz_theta(&Graph::cycle(7).unwrap()).unwrap().value - 3.3177).abs() < 1e-3);
}

#[test]
fn edgeless_and_complete() {
    let k2c = Graph::edgeless(2).unwrap();
    assert!((lovasz_theta(&k2c).unwrap().value - 2.0).abs() < 1e-8);
    for n in 1..=6 {
        let e = Graph::edgeless(n).unwrap();
        let k = Graph::complete(n).unwrap();
        assert!((lovasz_theta(&e).unwrap().value - n as f64).abs() < 1e-7);
        assert!((lovasz_theta(&k).unwrap().value - 1.0).abs() < 1e-7);
        assert!((schrijver_theta(&e).unwrap().value - n as f64).abs() < 1e-7);
    }
}

#[test]
fn vertex_transitive_product_identity() {
    // ϑ(G)·ϑ(Ḡ) = n for vertex-transitive G.
    let petersen = Graph::from_edges(
        10,
        &[
            (0, 1), (1, 2), (2, 3), (3, 4), (4, 0),
            (5, 7), (7, 9), (9, 6), (6, 8), (8, 5),
            (0, 5), (1, 6), (2, 7), (3, 8), (4, 9),
        ],
    )
    .unwrap();
    for g in [Graph::cycle(5).unwrap(), Graph::cycle(7).unwrap(), Graph::cycle(8).unwrap(), petersen] {
        let a = lovasz_theta(&g).unwrap().value;
        let b = lovasz_theta(&g.complement()).unwrap().value;
        assert!((a * b - g.vertex_count() as f64).abs() < 1e-6, "{a} * {b}");
    }
}

#[test]
fn schrijver_and_sos_on_c5() {
    let c5 = Graph::cycle(5).unwrap();
    let tp = schrijver_theta(&c5).unwrap();
    assert!((tp.value - 5f64.sqrt()).abs() < 1e-6);
    assert!(tp.certificate_residual(&c5) < 1e-8);
    let t0 = theta_r(&c5, 0).unwrap();
    assert!((t0.value - tp.value).abs() < 1e-6);
    let t1 = theta_r(&c5, 1).unwrap();
    assert!((t1.value - 2.0).abs() < 1e-6, "{}", t1.value);
    assert_eq!(t1.bound_name.to_string(), "theta_r(1)");
}

#[test]
fn theta1_of_edgeless_triple() {
    let g = Graph::edgeless(3).unwrap();
    assert!((theta_r(&g, 1).unwrap().value - 3.0).abs() < 1e-6);
}

#[test]
fn gram_layouts_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut graphs = vec![Graph::cycle(5).unwrap(), Graph::cycle(6).unwrap()];
    graphs.extend((0..4).map(|_| {
        let n = rng.gen_range(3..=6);
        random_graph(&mut rng, n)
    }));
    for g in &graphs {
        for r in [0, 1] {
            let full = theta_r_with(g, r, &BoundOptions { layout: GramLayout::Full, ..Default::default() }).unwrap();
            let sym = theta_r_with(g, r, &BoundOptions::default()).unwrap();
            assert!((full.value - sym.value).abs() < 1e-6, "r={r}: {} vs {}", full.value, sym.value);
        }
    }
}

#[test]
fn theta0_equals_schrijver_on_random_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..25 {
        let n = rng.gen_range(2..=9);
        let g = random_graph(&mut rng, n);
        let a = theta_r(&g, 0).unwrap().value;
        let b = schrijver_theta(&g).unwrap().value;
        assert!((a - b).abs() < 1e-6, "{a} vs {b}");
    }
}

#[test]
fn chain_and_sandwich_on_random_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..40 {
        let n = rng.gen_range(1..=7);
        let g = random_graph(&mut rng, n);
        let alpha = brute_alpha(&g) as f64;
        assert_eq!(independence_number(&g).unwrap() as f64, alpha);
        let t1 = theta_r(&g, 1).unwrap().value;
        let tp = schrijver_theta(&g).unwrap().value;
        let t = lovasz_theta(&g).unwrap().value;
        assert!(alpha - 1e-6 <= t1 && t1 <= tp + 1e-6 && tp <= t + 1e-6, "{alpha} {t1} {tp} {t}");
        let chi_bar = chromatic_number(&g.complement()).unwrap() as f64;
        assert!(t <= chi_bar + 1e-6, "{t} > {chi_bar}");
    }
}

#[test]
fn sandwich_up_to_eight_vertices() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..20 {
        let g = random_graph(&mut rng, 8);
        let t = lovasz_theta(&g).unwrap().value;
        assert!(brute_alpha(&g) as f64 <= t + 1e-6);
        assert!(t <= chromatic_number(&g.complement()).unwrap() as f64 + 1e-6);
    }
}

#[test]
fn product_inequality() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..10 {
        let (n, k) = (rng.gen_range(2..=5), rng.gen_range(2..=5));
        let g = random_graph(&mut rng, n);
        let h = random_graph(&mut rng, k);
        let prod = lovasz_theta(&g.strong_product(&h).unwrap()).unwrap().value;
        let bound = lovasz_theta(&g).unwrap().value * lovasz_theta(&h).unwrap().value;
        assert!(prod <= bound + 1e-5, "{prod} > {bound}");
    }
    let c5 = Graph::cycle(5).unwrap();
    let sq = lovasz_theta(&c5.strong_product(&c5).unwrap()).unwrap().value;
    assert!((sq - 5.0).abs() < 1e-5);
}

#[test]
fn certificates_lie_in_their_cones() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut graphs = vec![Graph::cycle(5).unwrap()];
    graphs.extend((0..5).map(|_| {
        let n = rng.gen_range(3..=6);
        random_graph(&mut rng, n)
    }));
    for g in &graphs {
        let n = g.vertex_count();
        let shift = |res: &BoundResult| res.certificate.add_constant(-1.0);
        let t = lovasz_theta(g).unwrap();
        assert!(shift(&t).is_psd(1e-9).is_psd);
        assert_eq!(t.certificate.dim(), n);
        let tp = schrijver_theta(g).unwrap();
        assert!(tp.certificate_residual(g) < 1e-8);
        assert!(parrilo_membership(&shift(&tp)).unwrap().is_member());
        let t1 = theta_r(g, 1).unwrap();
        assert!(t1.certificate_residual(g) < 1e-8);
        assert!(sos_cone_membership(&shift(&t1), 1).unwrap().is_member());
    }
}

#[test]
fn motzkin_straus_examples() {
    assert!((motzkin_straus_value(&Graph::cycle(5).unwrap()).unwrap() - 2.0).abs() < 1e-9);
    assert!((motzkin_straus_value(&Graph::cycle(7).unwrap()).unwrap() - 3.0).abs() < 1e-9);
    assert!((motzkin_straus_value(&Graph::edgeless(4).unwrap()).unwrap() - 4.0).abs() < 1e-9);
    assert!(matches!(
        motzkin_straus_value(&Graph::edgeless(13).unwrap()),
        Err(Error::ResourceLimit(_))
    ));
}

#[test]
fn parrilo_examples() {
    match parrilo_membership(&SymMatrix::lambda2()).unwrap() {
        ParriloMembership::Member { p, n } => {
            assert!(p.max_abs_diff(&SymMatrix::lambda2()) < 1e-6);
            assert!(n.max_abs() < 1e-6);
        }
        other => panic!("{other:?}"),
    }
    let jmi = SymMatrix::all_ones(5).sub(&SymMatrix::identity(5)).unwrap();
    for q in [m(&[&[0.0, 1.0], &[1.0, 0.0]]), jmi] {
        match parrilo_membership(&q).unwrap() {
            ParriloMembership::Member { p, n } => {
                assert!(p.max_abs() < 1e-6);
                assert!(n.max_abs_diff(&q) < 1e-6);
            }
            other => panic!("{other:?}"),
        }
    }
    let bad = m(&[&[1.0, -3.0], &[-3.0, 1.0]]);
    match parrilo_membership(&bad).unwrap() {
        ParriloMembership::NonMember { certificate, violation } => {
            assert!(violation > 0.0);
            // W ⪰ 0, W ≥ 0 and <W, Q> < 0 separate Q from P + N.
            assert!(certificate.is_psd(1e-9).is_psd && certificate.is_nonnegative());
            let inner: f64 = (0..2).flat_map(|i| (0..2).map(move |j| (i, j))).map(|(i, j)| certificate.get(i, j) * bad.get(i, j)).sum();
            assert!(inner < 0.0);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn sos_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..5 {
        let n = rng.gen_range(1..=5);
        let f = SymMatrix::from_fn(n, |_, _| 0.0);
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let q = SymMatrix::from_fn(n, |i, j| v[i] * v[j]).add(&f).unwrap();
        assert!(sos_cone_membership(&q, 0).unwrap().is_member());
    }
    match sos_cone_membership(&m(&[&[0.0, 1.0], &[1.0, 0.0]]), 0).unwrap() {
        SosMembership::Member { gram, residual, .. } => {
            assert!(residual < 1e-8);
            assert!(gram.is_psd(1e-9).is_psd);
        }
        other => panic!("{other:?}"),
    }
    let bad = m(&[&[1.0, -3.0], &[-3.0, 1.0]]);
    assert!(!sos_cone_membership(&bad, 0).unwrap().is_member());
    assert!(!sos_cone_membership(&bad, 1).unwrap().is_member());
    assert!(matches!(
        sos_cone_membership(&SymMatrix::identity(9), 1),
        Err(Error::ResourceLimit(_))
    ));
}

#[test]
fn sos_gram_certificates_reproduce_targets() {
    let c5 = Graph::cycle(5).unwrap();
    let horn_like = SymMatrix::adjacency(&c5).add(&SymMatrix::identity(5)).unwrap().scale(2.0).add_constant(-1.0);
    for layout in [GramLayout::Full, GramLayout::SignSymmetric] {
        match sos_cone_membership_with(&horn_like, 1, layout, 1e-10).unwrap() {
            SosMembership::Member { basis, gram, residual } => {
                assert_eq!(basis.len(), 35);
                assert!(residual < 1e-8, "{residual}");
                assert!((gram_residual(&basis, &gram, &horn_like, 1) - residual).abs() < 1e-15);
                assert!(gram.is_psd(1e-9).is_psd);
            }
            other => panic!("{other:?}"),
        }
    }
}

#[test]
fn parrilo_agrees_with_sos_r0() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut checked = 0;
    while checked < 30 {
        let n = rng.gen_range(2..=5);
        let q = SymMatrix::from_fn(n, |i, j| if i == j { rng.gen_range(0.0..1.0) } else { rng.gen_range(-1.0..1.0) });
        let a = parrilo_membership(&q).unwrap().is_member();
        let b = sos_cone_membership(&q, 0).unwrap().is_member();
        assert_eq!(a, b, "{q:?}");
        checked += 1;
    }
}

#[test]
fn copositive_and_conic_forms_agree_on_odd_cycles() {
    for n in [5, 7] {
        let g = Graph::cycle(n).unwrap();
        let alpha = independence_number(&g).unwrap() as f64;
        let ia = SymMatrix::adjacency(&g).add(&SymMatrix::identity(n)).unwrap();
        // Y* = α(I + A) is feasible for the copositive program.
        let y_star = ia.scale(alpha);
        assert!(is_copositive_oracle(&y_star.add_constant(-1.0)).unwrap().is_copositive);
        // Any smaller λ is not.
        assert!(!is_copositive_oracle(&ia.scale(alpha - 1e-3).add_constant(-1.0)).unwrap().is_copositive);
        // A copositive-program point maps back to λ(I + A) - J via edge replacement.
        let res = lovasz_theta(&g).unwrap();
        let mut y = res.certificate.clone();
        for (i, j) in g.non_edges() {
            y.set(i, j, 0.0);
        }
        for i in 0..n {
            y.set(i, i, res.lambda);
        }
        let yj = y.add_constant(-1.0);
        assert!(is_copositive_oracle(&yj).unwrap().is_copositive);
        let back = lemma1_transform(&yj, &g.edges()).unwrap();
        assert!(back.max_abs_diff(&ia.scale(res.lambda).add_constant(-1.0)) < 1e-12);
        assert!(is_copositive_oracle(&back).unwrap().is_copositive);
    }
}

#[test]
fn dumps_are_loadable() {
    let g = Graph::cycle(5).unwrap();
    for p in [
        lovasz_problem(&g).unwrap(),
        schrijver_problem(&g).unwrap(),
        theta_r_problem(&g, 1, GramLayout::Full).unwrap(),
    ] {
        let text = shannon_cone::sdp::dump_problem(&p);
        let back = shannon_cone::sdp::load_problem(&text).unwrap();
        assert_eq!(back.num_constraints(), p.num_constraints());
    }
    let full = theta_r_problem(&g, 1, GramLayout::Full).unwrap();
    assert_eq!(full.blocks[0].size, 35);
    assert_eq!(full.num_constraints(), 210);
}

#[test]
fn argument_errors() {
    let g8 = Graph::cycle(8).unwrap();
    assert!(matches!(theta_r(&g8, 1), Err(Error::ResourceLimit(_))));
    assert!(theta_r(&g8, 0).is_ok());
    assert!(matches!(theta_r(&Graph::cycle(5).unwrap(), 3), Err(Error::InvalidArgument(_))));
    assert!(matches!(lovasz_theta(&Graph::edgeless(201).unwrap()), Err(Error::ResourceLimit(_))));
}
