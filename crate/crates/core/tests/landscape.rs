use spinglass::landscape::*;
use spinglass::numerics::{semicircle_omega, RngStream};

#[test]
fn s_closed_values() {
    assert!((complexity_s(0.0, 3) - 0.5 * 2f64.ln()).abs() < 1e-15);
    let ed = eps_d(3);
    assert!((ed - (4.0f64 / 3.0).sqrt()).abs() < 1e-15);
    let expect = 0.5 - 4.0 / 3.0 + 0.5 * 2f64.ln() + 0.5;
    assert!((complexity_s(ed, 3) - expect).abs() < 1e-12);
    assert!((complexity_s(ed, 3) - 0.013239).abs() < 2e-6);
}

#[test]
fn edge_argument_identity() {
    for k in 3..=10u32 {
        let kf = k as f64;
        let arg = eps_d(k) * (2.0 * kf / (kf - 1.0)).sqrt();
        assert!((arg - 2.0).abs() < 1e-12);
        assert!((semicircle_omega(arg) - 0.5).abs() < 1e-12);
    }
}

#[test]
fn eps_star_brackets() {
    for k in 3..=10u32 {
        let es = eps_star(k).unwrap();
        assert!(eps_d(k) < es);
        assert!(complexity_s(es + 0.01, k) < 0.0 && complexity_s(es - 0.01, k) > 0.0);
        assert!(complexity_s(es, k).abs() < 1e-11);
        // exactly one sign change on [ε_d, 4]
        let signs: Vec<bool> = (0..=4000)
            .map(|i| complexity_s(eps_d(k) + (4.0 - eps_d(k)) * i as f64 / 4000.0, k) > 0.0)
            .collect();
        assert_eq!(signs.windows(2).filter(|w| w[0] != w[1]).count(), 1);
    }
}

#[test]
fn s_diverges_downwards() {
    let es = eps_star(3).unwrap();
    let vals: Vec<f64> = (0..50).map(|i| complexity_s(es + 0.1 * i as f64, 3)).collect();
    assert!(vals.windows(2).all(|w| w[1] < w[0]));
    assert!(vals[49] < -5.0);
}

#[test]
fn kac_rice_argument_checks() {
    let s = RngStream::new(0, 0);
    assert!(kac_rice_mc(150, (1.0, 1.0), 3, 20, &s).is_err());
    assert!(kac_rice_mc(5, (-1.0, 1.0), 3, 20, &s).is_err());
    assert!(kac_rice_mc(50, (-1.0, 1.0), 3, 5, &s).is_err());
}

#[test]
fn kac_rice_tail_band_is_negative() {
    let k = 3;
    let band = (eps_star(k).unwrap() + 0.2, f64::INFINITY);
    let est = kac_rice_mc(150, band, k, 20, &RngStream::new(4, 0)).unwrap();
    assert!(est.log_count_per_n < 0.0, "{est:?}");
    assert_eq!(est.band.1, 4.0);
}

#[test]
fn kac_rice_full_line_equals_clipped() {
    let s = RngStream::new(5, 0);
    let a = kac_rice_mc(60, (f64::NEG_INFINITY, f64::INFINITY), 3, 20, &s).unwrap();
    let b = kac_rice_mc(60, (-4.0, 4.0), 3, 20, &s).unwrap();
    assert!((a.log_count_per_n - b.log_count_per_n).abs() <= a.std_error.max(1e-12));
}

#[test]
fn kac_rice_trend_in_n() {
    let k = 3;
    let band = (-4.0, 4.0);
    let target = sup_s(band, k);
    let s = RngStream::new(6, 0);
    let a = kac_rice_mc(100, band, k, 40, &s).unwrap();
    let b = kac_rice_mc(200, band, k, 40, &s).unwrap();
    let (da, db) = ((a.log_count_per_n - target).abs(), (b.log_count_per_n - target).abs());
    assert!(db <= da + a.std_error + b.std_error, "{da} {db}");
}
