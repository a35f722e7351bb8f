use spinglass::numerics::*;

#[test]
fn hermite_low_degree_exactness() {
    let r = gauss_hermite(3).unwrap();
    assert!((r.apply(|g| g * g) - 1.0).abs() < 1e-12);
    assert!(gauss_hermite(1).is_err());
    for order in [2, 5, 61, 201] {
        let r = gauss_hermite(order).unwrap();
        assert!((r.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((r.apply(|_| 1.0) - 1.0).abs() < 1e-10);
        assert!(r.apply(|g| g).abs() < 1e-10);
        assert!((r.apply(|g| g * g) - 1.0).abs() < 1e-10);
        for i in 0..order {
            assert_eq!(r.nodes[i], -r.nodes[order - 1 - i]);
        }
    }
}

#[test]
fn hermite_even_moments() {
    let r = standard_rule();
    let mut dfact = 1.0;
    for m in 1..=6 {
        dfact *= (2 * m - 1) as f64;
        let v = r.apply(|g| g.powi(2 * m));
        assert!((v - dfact).abs() < 1e-8 * dfact, "m={m} {v} vs {dfact}");
    }
}

/// Plain composite Simpson on a wide window as an independent integrator.
fn simpson_gauss<F: Fn(f64) -> f64>(f: F) -> f64 {
    let (a, b, n) = (-12.0f64, 12.0f64, 200_000usize);
    let h = (b - a) / n as f64;
    let phi = |x: f64| (-x * x / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let mut s = f(a) * phi(a) + f(b) * phi(b);
    for i in 1..n {
        let x = a + h * i as f64;
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(x) * phi(x);
    }
    s * h / 3.0
}

#[test]
fn hermite_smooth_functions() {
    let r61 = gauss_hermite(61).unwrap();
    let r201 = gauss_hermite(201).unwrap();
    let t = |g: f64| g.tanh().powi(2);
    // poles of tanh at ±iπ/2 cap order 61 at ~5e-9 for this integrand
    assert!((r61.apply(t) - r201.apply(t)).abs() < 1e-8);
    let r101 = gauss_hermite(101).unwrap();
    assert!((r101.apply(t) - r201.apply(t)).abs() < 1e-10);
    let lc = |g: f64| (2.0 * g.cosh()).ln();
    assert!((r61.apply(lc) - simpson_gauss(lc)).abs() < 1e-10);
}

#[test]
fn legendre_integrates_polynomials() {
    let r = gauss_legendre(16).unwrap();
    assert!((r.apply(|x| x.powi(8)) - 2.0 / 9.0).abs() < 1e-14);
    assert!((r.weights.iter().sum::<f64>() - 2.0).abs() < 1e-13);
}

#[test]
fn goe_determinism_and_variance() {
    let s = RngStream::new(7, 3);
    let a = goe_sample(20, &s).unwrap();
    let b = goe_sample(20, &s).unwrap();
    assert_eq!(a, b);
    assert_eq!(a, a.transpose());
    assert!(goe_sample(0, &s).is_err());

    let reps = 100_000;
    let mut acc = 0.0;
    for i in 0..reps {
        let m = goe_sample(1, &s.substream(i)).unwrap();
        acc += m[(0, 0)] * m[(0, 0)];
    }
    let var = acc / reps as f64;
    assert!((var - 2.0).abs() < 0.1, "diag variance {var}");
}

#[test]
fn goe_trace_of_square() {
    let n = 100;
    let vals: Vec<f64> = (0..500)
        .map(|i| {
            let w = goe_sample(n, &RngStream::new(11, i)).unwrap();
            (&w * &w).trace() / n as f64
        })
        .collect();
    let (mean, se) = mean_and_se(&vals);
    let target = 1.0 + 1.0 / n as f64;
    assert!((mean - target).abs() < 3.0 * se, "{mean} vs {target} (se {se})");
}

#[test]
fn goe_edge_and_semicircle_fit() {
    let w = goe_sample(200, &RngStream::new(1, 0)).unwrap();
    let top = sym_eigvals(&w).unwrap().max();
    assert!((1.8..=2.3).contains(&top), "top eigenvalue {top}");

    let w = goe_sample(400, &RngStream::new(2, 0)).unwrap();
    let ev = sym_eigvals(&w).unwrap().eigenvalues;
    let n = ev.len() as f64;
    let ks = ev
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let c = semicircle_cdf(x);
            (c - i as f64 / n).abs().max((c - (i + 1) as f64 / n).abs())
        })
        .fold(0.0, f64::max);
    assert!(ks < 0.05, "KS distance {ks}");
}

#[test]
fn eigvals_small_cases() {
    use nalgebra::DMatrix;
    let s = sym_eigvals(&DMatrix::identity(3, 3)).unwrap();
    assert_eq!(s.eigenvalues, vec![1.0, 1.0, 1.0]);
    let s = sym_eigvals(&DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, -1.0]))).unwrap();
    assert_eq!(s.eigenvalues, vec![-1.0, 2.0]);
    let bad = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]);
    assert!(sym_eigvals(&bad).is_err());

    let w = goe_sample(50, &RngStream::new(5, 5)).unwrap();
    let ev = sym_eigvals(&w).unwrap().eigenvalues;
    assert!(ev.windows(2).all(|p| p[0] <= p[1]));
    assert!((ev.iter().sum::<f64>() - w.trace()).abs() < 1e-8);
    let fro: f64 = w.iter().map(|x| x * x).sum();
    assert!((ev.iter().map(|x| x * x).sum::<f64>() - fro).abs() < 1e-8);
}

fn omega_numeric(x: f64) -> f64 {
    // λ = 2 sin θ removes the endpoint square roots; the log kink at
    // θ0 = asin(x/2) is resolved by geometric panels graded towards it
    use std::f64::consts::{FRAC_PI_2, PI};
    let gl = gauss_legendre(20).unwrap();
    let f = |th: f64| {
        let l = 2.0 * th.sin();
        (l - x).abs().ln() * 2.0 * th.cos() * th.cos() / PI
    };
    let panel = |a: f64, b: f64| gl.apply(|u| f(0.5 * (a + b) + 0.5 * (b - a) * u)) * 0.5 * (b - a);
    let graded = |kink: f64, far: f64| {
        let mut s = 0.0;
        let mut outer = far;
        for _ in 0..40 {
            let inner = kink + 0.5 * (outer - kink);
            s += panel(inner.min(outer), inner.max(outer));
            outer = inner;
        }
        s
    };
    if x.abs() < 2.0 {
        let th0 = (x / 2.0).asin();
        graded(th0, -FRAC_PI_2) + graded(th0, FRAC_PI_2)
    } else {
        let n = 64;
        let h = PI / n as f64;
        (0..n)
            .map(|i| panel(-FRAC_PI_2 + h * i as f64, -FRAC_PI_2 + h * (i + 1) as f64))
            .sum()
    }
}

#[test]
fn omega_closed_form() {
    assert_eq!(semicircle_omega(0.0), -0.5);
    assert!((semicircle_omega(2.0) - 0.5).abs() < 1e-15);
    assert!((semicircle_omega(3.0) - 1.0353728).abs() < 5e-7);
    assert!((semicircle_omega(3.0) - omega_numeric(3.0)).abs() < 1e-7);
    let a = semicircle_omega(2.0 + 1e-12);
    assert!((a - 0.5).abs() < 1e-5);
}

#[test]
fn omega_matches_direct_integration_on_grid() {
    for i in 0..50 {
        let x = -4.0 + 8.0 * i as f64 / 49.0;
        let d = (semicircle_omega(x) - omega_numeric(x)).abs();
        assert!(d < 1e-7, "x={x} diff={d}");
    }
}

#[test]
fn stieltjes_properties() {
    assert!((semicircle_stieltjes(2.5).unwrap() - 0.5).abs() < 1e-15);
    assert!((semicircle_stieltjes(10.0).unwrap() - 0.1010205).abs() < 1e-7);
    assert!(semicircle_stieltjes(1.5).is_err());
    for i in 1..100 {
        let b = i as f64 / 100.0;
        assert!((semicircle_stieltjes(b + 1.0 / b).unwrap() - b).abs() < 1e-12);
    }
    for z in [2.3, 3.0, 5.0, -3.0, -7.5] {
        let h = 1e-5;
        let fd = (semicircle_omega(z + h) - semicircle_omega(z - h)) / (2.0 * h);
        assert!((fd - semicircle_stieltjes(z).unwrap()).abs() < 1e-8, "z={z}");
    }
}

#[test]
fn root_and_minimum() {
    let r = find_root(|x| x * x - 2.0, 1.0, 2.0, 1e-12).unwrap();
    assert!((r - 2f64.sqrt()).abs() < 1e-12);
    assert!(find_root(|x| x * x + 1.0, -1.0, 1.0, 1e-12).is_err());
    let (x, v) = minimize_scalar(|x| (x - 3.0).powi(2), 0.0, 10.0, 1e-12);
    assert!((x - 3.0).abs() < 1e-10 && v < 1e-18);
    let (x, _) = scan_minimize(|x| x, 0.0, 1.0, 64, 1e-12);
    assert_eq!(x, 0.0);
}

#[test]
fn streams_reproducible_and_distinct() {
    use rand::Rng;
    let s = RngStream::new(42, 0);
    let a: Vec<u64> = (0..4).map(|_| 0).scan(s.rng(), |r, _| Some(r.random())).collect();
    let b: Vec<u64> = (0..4).map(|_| 0).scan(s.rng(), |r, _| Some(r.random())).collect();
    assert_eq!(a, b);
    let c: Vec<u64> = (0..4)
        .map(|_| 0)
        .scan(s.substream(1).rng(), |r, _| Some(r.random()))
        .collect();
    assert_ne!(a, c);
}
