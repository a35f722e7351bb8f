use nalgebra::DMatrix;
use rand::Rng;
use spinglass::numerics::{goe_sample, RngStream};
use spinglass::oracle::*;
use spinglass::sk::{sk_min_psi_rs, SkParams};
use spinglass::Error;

fn rng(seed: u64) -> RngStream {
    RngStream::new(seed, 0)
}

fn params(beta: f64, lambda: f64, h: f64) -> SkParams {
    SkParams::new(beta, lambda, h).unwrap()
}

fn signs(n: usize, r: &RngStream) -> Vec<f64> {
    let mut g = r.rng();
    (0..n).map(|_| if g.random::<bool>() { 1.0 } else { -1.0 }).collect()
}

/// Direct sum over states, for cross-checking.
fn brute_log_z(w: &DMatrix<f64>, p: &SkParams, x0: &[f64]) -> f64 {
    let n = x0.len();
    let mut terms = Vec::new();
    for code in 0..1usize << n {
        let s: Vec<f64> = (0..n).map(|i| if code >> i & 1 == 1 { -1.0 } else { 1.0 }).collect();
        let mut e = 0.0;
        for i in 0..n {
            e += p.h * x0[i] * s[i];
            for j in 0..n {
                e += 0.5 * p.beta * (w[(i, j)] + p.lambda / n as f64 * x0[i] * x0[j]) * s[i] * s[j];
            }
        }
        terms.push(e);
    }
    spinglass::numerics::log_sum_exp(&terms)
}

#[test]
fn single_spin() {
    let w = DMatrix::from_element(1, 1, 0.7);
    let g = enumerate_gibbs(&w, &params(1.3, 0.0, 0.0), &[1.0]).unwrap();
    assert!((g.log_z - 0.5 * 1.3 * 0.7 - 2f64.ln()).abs() < 1e-14);
    assert_eq!(g.marginal_means, vec![0.0]);
}

#[test]
fn infinite_temperature() {
    let w = goe_sample(10, &rng(1)).unwrap();
    let x0 = signs(10, &rng(2));
    let g = enumerate_gibbs(&w, &params(0.0, 0.0, 0.0), &x0).unwrap();
    assert!((g.log_z - 10.0 * 2f64.ln()).abs() < 1e-12);
    assert!(g.marginal_means.iter().all(|m| m.abs() < 1e-14));
    assert!(g.effective_fields.is_empty());
}

#[test]
fn gray_code_matches_direct_sum() {
    let n = 9;
    let w = goe_sample(n, &rng(3)).unwrap();
    let x0 = signs(n, &rng(4));
    let p = params(1.7, 1.3, 0.2);
    let g = enumerate_gibbs(&w, &p, &x0).unwrap();
    assert!((g.log_z - brute_log_z(&w, &p, &x0)).abs() < 1e-10);
    assert!(g.marginal_means.iter().all(|m| m.abs() < 1.0));
    for (h, m) in g.effective_fields.iter().zip(&g.marginal_means) {
        assert!(((p.beta * h).tanh() - m).abs() < 1e-12);
    }
}

#[test]
fn marginals_vanish_without_field() {
    let w = goe_sample(12, &rng(5)).unwrap();
    let g = enumerate_gibbs(&w, &params(2.0, 0.0, 0.0), &[1.0; 12]).unwrap();
    assert!(g.marginal_means.iter().all(|m| m.abs() <= 1e-14));
}

#[test]
fn overlap_law_is_normalised_and_symmetric() {
    let w = goe_sample(11, &rng(6)).unwrap();
    let g = enumerate_gibbs(&w, &params(1.5, 0.0, 0.0), &[1.0; 11]).unwrap();
    let total: f64 = g.overlap_hist.iter().map(|x| x.1).sum();
    assert!((total - 1.0).abs() < 1e-12);
    let k = g.overlap_hist.len();
    for d in 0..k {
        assert!((g.overlap_hist[d].1 - g.overlap_hist[k - 1 - d].1).abs() < 1e-12);
    }
}

#[test]
fn overlap_law_matches_double_enumeration() {
    let n = 6;
    let w = goe_sample(n, &rng(7)).unwrap();
    let x0 = signs(n, &rng(8));
    let p = params(1.1, 0.8, 0.3);
    let g = enumerate_gibbs(&w, &p, &x0).unwrap();
    let lz = brute_log_z(&w, &p, &x0);
    let prob: Vec<f64> = (0..1usize << n)
        .map(|code| {
            let s: Vec<f64> = (0..n).map(|i| if code >> i & 1 == 1 { -1.0 } else { 1.0 }).collect();
            let mut e = 0.0;
            for i in 0..n {
                e += p.h * x0[i] * s[i];
                for j in 0..n {
                    e += 0.5 * p.beta * (w[(i, j)] + p.lambda / n as f64 * x0[i] * x0[j]) * s[i] * s[j];
                }
            }
            (e - lz).exp()
        })
        .collect();
    let mut hist = vec![0.0; n + 1];
    for a in 0..prob.len() {
        for b in 0..prob.len() {
            hist[(a ^ b).count_ones() as usize] += prob[a] * prob[b];
        }
    }
    for (d, m) in hist.iter().enumerate() {
        assert!((g.overlap_hist[d].1 - m).abs() < 1e-12);
        assert!((g.overlap_hist[d].0 - (1.0 - 2.0 * d as f64 / n as f64)).abs() < 1e-15);
    }
}

#[test]
fn overlap_concentrates_at_infinite_temperature() {
    let n = 14;
    let w = goe_sample(n, &rng(9)).unwrap();
    let g = enumerate_gibbs(&w, &params(0.0, 0.0, 0.0), &[1.0; 14]).unwrap();
    let cut = 4.0 / (n as f64).sqrt();
    let outside: f64 = g.overlap_hist.iter().filter(|(q, _)| q.abs() > cut).map(|x| x.1).sum();
    assert!(outside <= 1e-3, "{outside}");
}

#[test]
fn enumeration_rejects_bad_input() {
    let w = goe_sample(21, &rng(10)).unwrap();
    let err = enumerate_gibbs(&w, &params(1.0, 0.0, 0.0), &[1.0; 21]).unwrap_err();
    assert!(err.is_capability());
    let mut w = goe_sample(4, &rng(10)).unwrap();
    assert!(enumerate_gibbs(&w, &params(1.0, 0.0, 0.0), &[1.0, 1.0, 0.5, 1.0]).is_err());
    assert!(enumerate_gibbs(&w, &params(1.0, 0.0, 0.0), &[1.0; 3]).is_err());
    w[(0, 1)] += 1.0;
    assert!(matches!(
        enumerate_gibbs(&w, &params(1.0, 0.0, 0.0), &[1.0; 4]),
        Err(Error::InvalidArgument(_))
    ));
}

#[test]
fn h_derivative_identity() {
    let w = goe_sample(12, &rng(11)).unwrap();
    let x0 = signs(12, &rng(12));
    assert!(check_h_derivative(&w, &params(1.2, 1.2, 0.1), &x0).unwrap() <= 1e-8);
    assert!(check_h_derivative(&w, &params(0.7, 0.0, 0.3), &x0).unwrap() <= 1e-8);
    let g = enumerate_gibbs(&w, &params(0.0, 0.0, 0.3), &x0).unwrap();
    let d: f64 = g.marginal_means.iter().zip(&x0).map(|(m, s)| m * s).sum::<f64>() / 12.0;
    assert!((d - 0.3f64.tanh()).abs() < 1e-14);
    let big = goe_sample(17, &rng(11)).unwrap();
    assert!(check_h_derivative(&big, &params(1.0, 0.0, 0.1), &[1.0; 17])
        .unwrap_err()
        .is_capability());
}

#[test]
fn guerra_bound_holds() {
    for beta in [0.5, 3.0] {
        let c = guerra_rs_bound_mc(14, beta, 200, &rng(13)).unwrap();
        assert!(c.mean_phi <= c.bound + 3.0 * c.std_error, "{c:?}");
        if beta > 1.0 {
            assert!(c.margin_se > 3.0, "{c:?}");
        }
    }
    let c = guerra_rs_bound_mc(10, 0.0, 5, &rng(14)).unwrap();
    assert!((c.mean_phi - 2f64.ln()).abs() < 1e-14);
    assert!((c.bound - 2f64.ln()).abs() < 1e-14);
    assert!(guerra_rs_bound_mc(19, 1.0, 5, &rng(14)).unwrap_err().is_capability());
}

#[test]
fn free_energy_near_rs_value_at_high_temperature() {
    let c = guerra_rs_bound_mc(14, 0.6, 200, &rng(15)).unwrap();
    let rs = sk_min_psi_rs(0.6).unwrap().1;
    // finite-size corrections are O(1/n)
    assert!((c.mean_phi - rs).abs() < 3.0 * c.std_error + 0.05, "{c:?}");
}

#[test]
fn immse_identity() {
    let zero = mutual_info_immse_check(10, 0.0, 10, &rng(16)).unwrap();
    assert_eq!((zero.lhs, zero.rhs), (0.0, 0.0));
    let c = mutual_info_immse_check(8, 1.0, 400, &rng(17)).unwrap();
    assert!(c.passes(3.0), "{c:?}");
    let strong = mutual_info_immse_check(8, 4.0, 400, &rng(18)).unwrap();
    assert!(strong.passes(3.0), "{strong:?}");
    assert!(strong.rhs < c.rhs);
    assert!(mutual_info_immse_check(13, 1.0, 10, &rng(18))
        .unwrap_err()
        .is_capability());
}

#[test]
fn ppp_points_decrease() {
    for seed in 0..50 {
        let s = ppp_topk(0.6, 40, &rng(seed)).unwrap();
        assert!(s.points.windows(2).all(|w| w[0] > w[1]));
        assert!(s.points.iter().all(|x| x.is_finite()));
    }
    assert!(ppp_topk(1.0, 10, &rng(0)).is_err());
    assert!(ppp_topk(0.0, 10, &rng(0)).is_err());
    assert!(ppp_topk(0.5, 0, &rng(0)).is_err());
}

#[test]
fn ppp_max_law() {
    let m = 0.5;
    let reps = 20_000;
    let mut maxima: Vec<f64> = (0..reps)
        .map(|r| ppp_topk(m, 1, &rng(20).substream(r)).unwrap().points[0])
        .collect();
    maxima.sort_by(f64::total_cmp);
    let nf = reps as f64;
    let ks = maxima
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let f = ppp_max_cdf(t, m);
            (f - i as f64 / nf).abs().max((f - (i + 1) as f64 / nf).abs())
        })
        .fold(0.0, f64::max);
    assert!(ks <= 0.015, "{ks}");
}

#[test]
fn ppp_positive_count() {
    let m = 0.5;
    let counts: Vec<f64> = (0..4000)
        .map(|r| {
            let s = ppp_topk(m, 60, &rng(21).substream(r)).unwrap();
            assert!(*s.points.last().unwrap() < 0.0);
            s.points.iter().filter(|&&x| x >= 0.0).count() as f64
        })
        .collect();
    let (mean, se) = spinglass::numerics::mean_and_se(&counts);
    assert!((mean - 1.0 / m).abs() <= 3.0 * se, "{mean} {se}");
}

#[test]
fn pd_weights_are_ordered() {
    let s = ppp_topk(0.5, 10_000, &rng(22)).unwrap();
    let w = pd_weights(&s).unwrap();
    assert!(w.weights.windows(2).all(|p| p[0] >= p[1]));
    let total: f64 = w.weights.iter().sum();
    assert!((total - w.truncated_mass).abs() < 1e-12);
    assert!(w.truncated_mass > 0.99 && w.truncated_mass <= 1.0);
    let short = ppp_topk(0.5, 5, &rng(22)).unwrap();
    assert!(matches!(pd_weights(&short), Err(Error::Truncation(_))));
}

#[test]
fn pd_second_moment() {
    for m in [0.5, 0.9] {
        let (est, se) = pd_second_moment_mc(m, 5000, 3000, &rng(23)).unwrap();
        assert!((est - (1.0 - m)).abs() <= 3.0 * se.max(1e-3), "{m}: {est} ± {se}");
    }
}

#[test]
fn shift_invariance() {
    let z = ppp_shift_invariance_mc(0.5, 0.0, 1000, 10, &rng(24)).unwrap();
    assert_eq!((z.lhs, z.rhs), (0.0, 0.0));
    let c = ppp_shift_invariance_mc(0.5, 1.0, 5000, 2000, &rng(25)).unwrap();
    assert!((c.rhs - 0.25).abs() < 1e-15);
    assert!((c.lhs - c.rhs).abs() < 0.02, "{c:?}");
    assert!(ppp_shift_invariance_mc(0.5, -1.0, 100, 10, &rng(25)).is_err());
}
