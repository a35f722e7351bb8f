use spinglass::numerics::{gaussian_rule, RngStream};
use spinglass::sk::*;
use spinglass::Error;

fn lc(x: f64) -> f64 {
    x.abs() + (-2.0 * x.abs()).exp().ln_1p()
}

fn rs(beta: f64, lambda: f64) -> SkParams {
    SkParams::new(beta, lambda, 0.0).unwrap()
}

#[test]
fn psi_at_origin_is_annealed() {
    for beta in [0.3, 1.0, 2.5] {
        let v = sk_psi_rs(0.0, 0.0, &rs(beta, 0.7)).unwrap();
        assert!((v - (beta * beta / 4.0 + 2f64.ln())).abs() < 1e-13);
    }
}

#[test]
fn high_temperature_is_trivial() {
    let p = sk_solve_rs(&rs(0.5, 0.0)).unwrap();
    assert_eq!((p.b, p.q), (0.0, 0.0));
}

#[test]
fn rs_threshold_at_beta_one() {
    assert!(sk_solve_rs(&rs(0.999, 0.0)).unwrap().q <= 1e-10);
    assert!(sk_solve_rs(&rs(1.01, 0.0)).unwrap().q >= 1e-4);
}

#[test]
fn bayes_point_solves_scalar_equation() {
    let p = sk_solve_rs(&rs(2.0, 2.0)).unwrap();
    assert!((p.b - p.q).abs() <= 1e-10);
    // independent finer rule
    let rule = gaussian_rule(20.0);
    let map = |b: f64| rule.apply(|g| (4.0 * b + 2.0 * b.sqrt() * g).tanh());
    assert!(p.b > 0.5);
    assert!((map(p.b) - p.b).abs() <= 1e-12);
}

#[test]
fn bayes_symmetry_on_the_nishimori_line() {
    for l in [1.2, 1.5, 3.0] {
        let p = sk_solve_rs(&rs(l, l)).unwrap();
        assert!((p.b - p.q).abs() <= 1e-10);
        assert!((sk_bayes_fixed_point(l).unwrap() - p.b).abs() <= 1e-12);
    }
    assert_eq!(sk_bayes_fixed_point(0.9).unwrap(), 0.0);
}

#[test]
fn general_fixed_point_is_stationary() {
    let params = SkParams::new(1.5, 1.2, 0.1).unwrap();
    let p = sk_solve_rs(&params).unwrap();
    let (b, q) = sk_rs_map(p.b, p.q, &params);
    assert!((b - p.b).abs() <= 1e-11 && (q - p.q).abs() <= 1e-11);
    let d = 1e-5;
    let f = |b: f64, q: f64| sk_psi_rs(b, q, &params).unwrap();
    let gb = (f(p.b + d, p.q) - f(p.b - d, p.q)) / (2.0 * d);
    let gq = (f(p.b, p.q + d) - f(p.b, p.q - d)) / (2.0 * d);
    assert!(gb.abs() < 1e-7 && gq.abs() < 1e-7, "{gb} {gq}");
}

#[test]
fn psi_matches_direct_quadrature() {
    let (beta, q) = (4.0f64, 0.8f64);
    let direct = gaussian_rule(40.0).apply(|g| lc(beta * q.sqrt() * g));
    let v = sk_psi_rs(0.0, q, &rs(beta, 0.0)).unwrap();
    assert!((v - 0.25 * beta * beta * (1.0 - q) * (1.0 - q) - direct).abs() < 1e-13);
}

#[test]
fn entropy_limits_and_sign() {
    assert!((sk_rs_entropy(0.01).unwrap() - 2f64.ln()).abs() < 1e-4);
    assert!(sk_rs_entropy(5.0).unwrap() < 0.0);
    assert!(sk_rs_entropy(0.9).unwrap() > 0.0);
}

#[test]
fn entropy_matches_temperature_derivative() {
    let free = |b: f64| {
        let p = rs(b, 0.0);
        sk_psi_rs(0.0, sk_solve_rs(&p).unwrap().q, &p).unwrap()
    };
    for beta in [1.7, 3.0] {
        let d = 1e-4;
        let deriv = (free(beta + d) - free(beta - d)) / (2.0 * d);
        let s = free(beta) - beta * deriv;
        assert!((sk_rs_entropy(beta).unwrap() - s).abs() < 1e-6);
    }
}

#[test]
fn min_psi_rs_matches_fixed_point() {
    let (q, v) = sk_min_psi_rs(0.8).unwrap();
    assert!(q < 1e-6 && (v - (0.16 + 2f64.ln())).abs() < 1e-12);
    let p = rs(3.0, 0.0);
    let qs = sk_solve_rs(&p).unwrap().q;
    let (q, v) = sk_min_psi_rs(3.0).unwrap();
    assert!((q - qs).abs() < 1e-5);
    assert!((v - sk_psi_rs(0.0, qs, &p).unwrap()).abs() < 1e-10);
}

#[test]
fn krsb_reduces_to_rs() {
    for (beta, q) in [(1.5, 0.4), (3.0, 0.9)] {
        let k = krsb_value(&RsbLadder::rs(q).unwrap(), beta).unwrap();
        assert!((k - sk_psi_rs(0.0, q, &rs(beta, 0.0)).unwrap()).abs() < 1e-10);
    }
}

#[test]
fn krsb_embedding_is_exact() {
    let l = RsbLadder::new(vec![0.2, 0.6], vec![0.35, 1.0]).unwrap();
    let e = RsbLadder::new(vec![0.2, 0.6, 1.0], vec![0.35, 1.0, 1.0]).unwrap();
    let (a, b) = (krsb_value(&l, 2.0).unwrap(), krsb_value(&e, 2.0).unwrap());
    assert!((a - b).abs() < 1e-10, "{a} {b}");
}

#[test]
fn degenerate_one_rsb_is_independent_of_m() {
    let r = sk_psi_rs(0.0, 0.5, &rs(2.0, 0.0)).unwrap();
    for m in [0.1, 0.5, 0.9] {
        let v = krsb_value(&RsbLadder::new(vec![0.5, 0.5], vec![m, 1.0]).unwrap(), 2.0).unwrap();
        assert!((v - r).abs() < 1e-10);
    }
}

#[test]
fn krsb_rejects_large_k_and_bad_ladders() {
    let l = RsbLadder {
        q: vec![0.1, 0.2, 0.3, 0.4, 0.5],
        m: vec![0.1, 0.2, 0.3, 0.4, 1.0],
    };
    assert!(matches!(krsb_value(&l, 1.0), Err(Error::Capability(_))));
    assert!(RsbLadder::new(vec![0.5, 0.2], vec![0.5, 1.0]).is_err());
    assert!(RsbLadder::new(vec![0.2, 0.5], vec![0.5, 0.9]).is_err());
    assert!(RsbLadder::new(vec![0.2], vec![0.5, 1.0]).is_err());
}

fn grid(beta: f64) -> PdeGrid {
    PdeGrid::new(10.0 + 4.0 * beta, 2049).unwrap()
}

#[test]
fn parisi_at_delta_zero_is_annealed() {
    for beta in [0.5, 1.0, 3.0] {
        let v = parisi_functional(&ParisiMeasure::delta(0.0).unwrap(), beta, &grid(beta)).unwrap();
        assert!((v - (beta * beta / 4.0 + 2f64.ln())).abs() < 1e-10);
    }
}

#[test]
fn parisi_at_delta_q_is_rs() {
    let v = parisi_functional(&ParisiMeasure::delta(0.4).unwrap(), 1.5, &grid(1.5)).unwrap();
    assert!((v - sk_psi_rs(0.0, 0.4, &rs(1.5, 0.0)).unwrap()).abs() < 1e-8);
}

#[test]
fn parisi_matches_one_rsb_recursion() {
    let l = RsbLadder::new(vec![0.3, 0.8], vec![0.45, 1.0]).unwrap();
    let m = l.to_measure().unwrap();
    let v = parisi_functional(&m, 2.5, &grid(2.5)).unwrap();
    assert!((v - krsb_value(&l, 2.5).unwrap()).abs() < 1e-7);
}

#[test]
fn parisi_grid_checks() {
    assert!(matches!(PdeGrid::new(20.0, 65), Err(Error::Grid(_))));
    assert!(matches!(PdeGrid::new(20.0, 2048), Err(Error::Grid(_))));
    let small = PdeGrid::new(11.0, 257).unwrap();
    assert!(matches!(
        parisi_functional(&ParisiMeasure::delta(0.2).unwrap(), 3.0, &small),
        Err(Error::Grid(_))
    ));
}

#[test]
fn measure_validation() {
    assert!(ParisiMeasure::new(vec![(0.2, 0.5), (0.1, 0.5)]).is_err());
    assert!(ParisiMeasure::new(vec![(0.2, 0.5), (0.4, 0.4)]).is_err());
    assert!(ParisiMeasure::new(vec![(0.2, 0.0), (0.4, 1.0)]).is_err());
    let m = ParisiMeasure::new(vec![(0.2, 0.25), (0.4, 0.75)]).unwrap();
    assert_eq!(m.to_ladder().m, vec![0.25, 1.0]);
}

#[test]
fn minimizer_collapses_in_rs_regime() {
    let (m, v) = minimize_parisi(2, 0.8, &grid(0.8)).unwrap();
    let (_, rsv) = sk_min_psi_rs(0.8).unwrap();
    assert!((v - rsv).abs() < 1e-7);
    let spread = m.atoms.last().unwrap().0 - m.atoms[0].0;
    assert!(m.atoms.len() == 1 || spread < 1e-3, "{m:?}");
}

#[test]
fn more_atoms_never_hurt() {
    let g = grid(2.0);
    let (_, v1) = minimize_parisi(1, 2.0, &g).unwrap();
    let (_, v2) = minimize_parisi(2, 2.0, &g).unwrap();
    assert!(v2 <= v1 + 1e-9);
    assert!(v1 - v2 > 1e-5, "RSB should strictly improve at beta = 2");
}

#[test]
fn cut_examples() {
    let c4 = Graph::new(4, vec![(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
    assert_eq!(cut_value(&c4, &[1, -1, 1, -1]).unwrap(), 4);
    let k4 = Graph::new(4, vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
    let r = maxcut_bruteforce(&k4).unwrap();
    assert_eq!(r.cut_value, 4);
    assert_eq!(r.assignment, vec![1, -1, -1, 1]);
    assert_eq!(maxcut_prediction(4.0), 1.0 + 0.763166726567);
}

#[test]
fn brute_force_matches_exhaustive_search() {
    let rng = RngStream::new(11, 0);
    for i in 0..5 {
        let g = er_graph(10, 3.0, &rng.substream(i)).unwrap();
        let mut best = 0;
        for mask in 0u32..1024 {
            let s: Vec<i8> = (0..10).map(|v| if mask >> v & 1 == 1 { -1 } else { 1 }).collect();
            best = best.max(cut_value(&g, &s).unwrap());
        }
        let r = maxcut_bruteforce(&g).unwrap();
        assert_eq!(r.cut_value, best);
        assert_eq!(r.cut_value, cut_value(&g, &r.assignment).unwrap());
        assert_eq!(r.assignment[0], 1);
    }
}

#[test]
fn local_search_beats_random() {
    let rng = RngStream::new(5, 0);
    for i in 0..10 {
        let g = er_graph(40, 4.0, &rng.substream(i)).unwrap();
        let ls = maxcut_localsearch(&g, 5, &rng.substream(100 + i)).unwrap();
        let rc = maxcut_random(&g, &rng.substream(200 + i));
        assert_eq!(ls.cut_value, cut_value(&g, &ls.assignment).unwrap());
        assert!(ls.cut_value >= rc.cut_value);
        assert!(2 * ls.cut_value >= g.edges.len() as u64);
    }
}

#[test]
fn regular_graphs() {
    let g = reg_graph(30, 3, &RngStream::new(1, 0)).unwrap();
    assert!(g.adjacency().iter().all(|a| a.len() == 3));
    assert!(matches!(
        reg_graph(7, 3, &RngStream::new(1, 0)),
        Err(Error::InvalidArgument(_))
    ));
}

#[test]
fn brute_force_capability_limit() {
    let g = Graph::new(25, vec![(0, 1)]).unwrap();
    assert!(maxcut_bruteforce(&g).unwrap_err().is_capability());
}

#[test]
fn edge_list_round_trip() {
    let g = er_graph(12, 3.0, &RngStream::new(3, 0)).unwrap();
    let text = write_edge_list(&g);
    assert_eq!(parse_edge_list(&text, Some(12)).unwrap(), g);
    assert!(parse_edge_list("0 0\n", None).is_err());
    assert!(parse_edge_list("0 1\n1 0\n", None).is_err());
    assert!(parse_edge_list("0 x\n", None).is_err());
    assert_eq!(parse_edge_list("# c\n\n0 2\n", None).unwrap().n, 3);
}

mod props {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn cut_is_flip_invariant(seed in 0u64..1000, n in 3usize..14) {
            let g = er_graph(n, 2.0, &RngStream::new(seed, 0)).unwrap();
            let s = maxcut_random(&g, &RngStream::new(seed, 1)).assignment;
            let flipped: Vec<i8> = s.iter().map(|x| -x).collect();
            prop_assert_eq!(cut_value(&g, &s).unwrap(), cut_value(&g, &flipped).unwrap());
        }

        #[test]
        fn psi_rs_is_finite(b in 0.0f64..1.0, q in 0.0f64..1.0, beta in 0.0f64..8.0, lambda in 0.0f64..3.0) {
            let v = sk_psi_rs(b, q, &SkParams::new(beta, lambda, 0.0).unwrap()).unwrap();
            prop_assert!(v.is_finite());
        }
    }
}
