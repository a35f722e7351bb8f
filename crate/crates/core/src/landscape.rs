//! Kac-Rice complexity of the pure-noise spherical p-spin landscape.

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{invalid, Result};
use crate::numerics::{
    find_root, gauss_legendre, goe_sample, log_sum_exp, semicircle_omega, sym_eigvals, RngStream, DEFAULT_TOL,
};
use crate::par;

/// Bands wider than this are clipped; S(x) < -1 outside.
pub const BAND_CLIP: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexityParams {
    pub k: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KacRiceEstimate {
    pub n: usize,
    pub band: (f64, f64),
    pub log_count_per_n: f64,
    pub std_error: f64,
    pub reps: usize,
}

/// S(x) = Ω(x √(2k/(k-1))) - x² + ½ log(k-1) + ½.
pub fn complexity_s(x: f64, k: u32) -> f64 {
    let kf = k as f64;
    semicircle_omega(x * (2.0 * kf / (kf - 1.0)).sqrt()) - x * x + 0.5 * (kf - 1.0).ln() + 0.5
}

pub fn eps_d(k: u32) -> f64 {
    let kf = k as f64;
    (2.0 * (kf - 1.0) / kf).sqrt()
}

pub fn eps_star(k: u32) -> Result<f64> {
    if k < 3 {
        return Err(invalid("landscape complexity needs k >= 3"));
    }
    find_root(|x| complexity_s(x, k), eps_d(k), 4.0, DEFAULT_TOL)
}

/// sup of S over the band.
pub fn sup_s(band: (f64, f64), k: u32) -> f64 {
    let (lo, hi) = band;
    if lo <= 0.0 && hi >= 0.0 {
        return complexity_s(0.0, k);
    }
    // S is even and decreasing in |x|
    let x = if lo > 0.0 { lo } else { hi };
    complexity_s(x, k)
}

/// log of the energy integral for one GOE draw:
/// ∫_band √(n/π) e^{-n x²} Π_i |λ_i - t√(2n) x| dx.
fn log_energy_integral(eigs: &[f64], n: usize, t: f64, band: (f64, f64)) -> f64 {
    let nf = n as f64;
    let scale = t * (2.0 * nf).sqrt();
    let gl = gauss_legendre(12).expect("order 12");
    let (lo, hi) = band;
    let mut breaks: Vec<f64> = vec![lo, hi];
    breaks.extend(eigs.iter().map(|l| l / scale).filter(|x| *x > lo && *x < hi));
    breaks.sort_by(|a, b| a.total_cmp(b));
    let mut terms = Vec::with_capacity(breaks.len() * 24);
    let log_norm = 0.5 * (nf / std::f64::consts::PI).ln();
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b - a <= 0.0 {
            continue;
        }
        let pieces = ((b - a) / 0.05).ceil().max(1.0) as usize;
        let h = (b - a) / pieces as f64;
        for p in 0..pieces {
            let (pa, pb) = (a + h * p as f64, a + h * (p + 1) as f64);
            for (u, wt) in gl.pairs() {
                let x = 0.5 * (pa + pb) + 0.5 * (pb - pa) * u;
                let z = scale * x;
                let logdet: f64 = eigs.iter().map(|l| (l - z).abs().max(1e-300).ln()).sum();
                terms.push((0.5 * (pb - pa) * wt).ln() + log_norm - nf * x * x + logdet);
            }
        }
    }
    log_sum_exp(&terms)
}

/// Monte-Carlo estimate of (1/n) log E[C_n(band)].
pub fn kac_rice_mc(n: usize, band: (f64, f64), k: u32, reps: usize, rng: &RngStream) -> Result<KacRiceEstimate> {
    if n < 10 {
        return Err(invalid("Kac-Rice estimator needs n >= 10"));
    }
    if reps < 10 {
        return Err(invalid("Kac-Rice estimator needs reps >= 10"));
    }
    if k < 3 {
        return Err(invalid("Kac-Rice estimator needs k >= 3"));
    }
    let (lo, hi) = (band.0.max(-BAND_CLIP), band.1.min(BAND_CLIP));
    if !(lo < hi) {
        return Err(invalid(format!("empty band [{}, {}]", band.0, band.1)));
    }
    let nf = n as f64;
    let kf = k as f64;
    let t = (kf / ((kf - 1.0) * (nf - 1.0))).sqrt();
    let log_pref = 0.5 * (nf - 1.0) * ((kf - 1.0) * (nf - 1.0) / 2.0).ln() + (2.0 * std::f64::consts::PI.sqrt()).ln()
        - ln_gamma(nf / 2.0);

    let logs: Vec<f64> = par::map_indices(reps, |r| {
        let w = goe_sample(n - 1, &rng.substream(r as u64)).expect("n >= 10");
        let ev = sym_eigvals(&w).expect("GOE is symmetric").eigenvalues;
        log_energy_integral(&ev, n, t, (lo, hi))
    });

    let estimate = |v: &[f64]| (log_pref + log_sum_exp(v) - (v.len() as f64).ln()) / nf;
    let value = estimate(&logs);

    let mut brng = rng.substream(u64::MAX).rng();
    let boots: Vec<f64> = (0..200)
        .map(|_| {
            let sample: Vec<f64> = (0..reps).map(|_| logs[brng.random_range(0..reps)]).collect();
            estimate(&sample)
        })
        .collect();
    let bm = boots.iter().sum::<f64>() / boots.len() as f64;
    let se = (boots.iter().map(|b| (b - bm).powi(2)).sum::<f64>() / (boots.len() as f64 - 1.0)).sqrt();

    Ok(KacRiceEstimate {
        n,
        band: (lo, hi),
        log_count_per_n: value,
        std_error: se,
        reps,
    })
}
