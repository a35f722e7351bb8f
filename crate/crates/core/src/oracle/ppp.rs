use rand::Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::numerics::{mean_and_se, RngStream};
use crate::par;

/// Largest tolerated relative fluctuation of the neglected tail sum.
const TAIL_RSD_MAX: f64 = 0.02;

/// Top K points of a PPP with intensity e^{-mx} dx, in decreasing order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PppSample {
    pub m: f64,
    pub points: Vec<f64>,
}

/// Normalised weights w_j ∝ e^{x_j}. The normaliser includes the expected
/// contribution e^{(1-m)x_K}/(1-m) of the points below the truncation;
/// `truncated_mass` is the share carried by the explicit points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdWeights {
    pub weights: Vec<f64>,
    pub truncated_mass: f64,
}

fn check_m(m: f64) -> Result<()> {
    if !(m > 0.0 && m < 1.0) {
        return Err(invalid(format!("m must lie in (0, 1), got {m}")));
    }
    Ok(())
}

/// x_j = -(1/m) log(m Γ_j), Γ_j partial sums of unit exponentials.
pub fn ppp_topk(m: f64, k: usize, rng: &RngStream) -> Result<PppSample> {
    check_m(m)?;
    if k == 0 {
        return Err(invalid("need K >= 1 points"));
    }
    let mut r = rng.rng();
    let mut gamma = 0.0;
    let points = (0..k)
        .map(|_| {
            let e: f64 = r.sample(Exp1);
            gamma += e;
            -(m * gamma).ln() / m
        })
        .collect();
    Ok(PppSample { m, points })
}

/// P[max ≤ t] = exp(-e^{-mt}/m).
pub fn ppp_max_cdf(t: f64, m: f64) -> f64 {
    (-(-m * t).exp() / m).exp()
}

/// Expected Σ e^{x} over points below x_K, and the relative standard
/// deviation of that sum.
fn tail(m: f64, x_k: f64) -> (f64, f64) {
    let mean = ((1.0 - m) * x_k).exp() / (1.0 - m);
    let var = ((2.0 - m) * x_k).exp() / (2.0 - m);
    (mean, var.sqrt() / mean)
}

pub fn pd_weights(sample: &PppSample) -> Result<PdWeights> {
    check_m(sample.m)?;
    let x_k = *sample.points.last().ok_or_else(|| invalid("empty sample"))?;
    let (tail_mean, rsd) = tail(sample.m, x_k);
    if rsd > TAIL_RSD_MAX {
        return Err(Error::Truncation(format!(
            "K = {} leaves a tail with relative fluctuation {rsd:.3}; increase K",
            sample.points.len()
        )));
    }
    let top = sample.points[0];
    let explicit: Vec<f64> = sample.points.iter().map(|x| (x - top).exp()).collect();
    let s: f64 = explicit.iter().sum();
    let t = tail_mean * (-top).exp();
    let total = s + t;
    Ok(PdWeights {
        weights: explicit.iter().map(|e| e / total).collect(),
        truncated_mass: s / total,
    })
}

/// Monte-Carlo E[Σ w²]; returns (estimate, standard error).
pub fn pd_second_moment_mc(m: f64, k: usize, reps: usize, rng: &RngStream) -> Result<(f64, f64)> {
    check_m(m)?;
    if reps < 2 {
        return Err(invalid("need reps >= 2"));
    }
    let vals = par::map_indices(reps, |r| {
        ppp_topk(m, k, &rng.substream(r as u64))
            .and_then(|s| pd_weights(&s))
            .map(|w| w.weights.iter().map(|x| x * x).sum::<f64>())
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(mean_and_se(&vals))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftCheck {
    /// MC estimate of E log Σ e^{x+Δ} - E log Σ e^{x}
    pub lhs: f64,
    /// m σ²/2
    pub rhs: f64,
    pub std_error: f64,
}

/// Invariance of the PPP under i.i.d. N(0, σ²) marks, with common random
/// numbers for both sides.
pub fn ppp_shift_invariance_mc(m: f64, sigma: f64, k: usize, reps: usize, rng: &RngStream) -> Result<ShiftCheck> {
    check_m(m)?;
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(invalid(format!("mark sigma must be non-negative, got {sigma}")));
    }
    if reps < 2 {
        return Err(invalid("need reps >= 2"));
    }
    let rhs = 0.5 * m * sigma * sigma;
    if sigma == 0.0 {
        return Ok(ShiftCheck {
            lhs: 0.0,
            rhs,
            std_error: 0.0,
        });
    }
    let diffs = par::map_indices(reps, |r| -> Result<f64> {
        let sub = rng.substream(r as u64);
        let s = ppp_topk(m, k, &sub.substream(0))?;
        let x_k = *s.points.last().expect("k >= 1");
        let (tail_mean, rsd) = tail(m, x_k);
        if rsd > TAIL_RSD_MAX {
            return Err(Error::Truncation(format!("K = {k} is too small for m = {m}")));
        }
        let mut g = sub.substream(1).rng();
        let top = s.points[0];
        let (mut a, mut b) = (0.0, 0.0);
        for &x in &s.points {
            let d: f64 = sigma * g.sample::<f64, _>(StandardNormal);
            a += (x - top).exp();
            b += (x + d - top).exp();
        }
        let t = tail_mean * (-top).exp();
        Ok((b + t * (0.5 * sigma * sigma).exp()).ln() - (a + t).ln())
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let (lhs, std_error) = mean_and_se(&diffs);
    Ok(ShiftCheck { lhs, rhs, std_error })
}
