use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::numerics::{goe_sample, log_sum_exp, mean_and_se, RngStream};
use crate::par;
use crate::sk::{sk_min_psi_rs, SkParams};

pub const ENUMERATION_MAX_N: usize = 20;
const DERIVATIVE_MAX_N: usize = 16;
const GUERRA_MAX_N: usize = 18;
const IMMSE_MAX_N: usize = 12;

/// Exact Gibbs measure summaries for exp{β/2⟨Y, σσᵀ⟩ + h⟨σ, x0⟩}, with
/// Y = (λ/n) x0 x0ᵀ + W and the diagonal included.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnumeratedGibbs {
    pub n: usize,
    pub log_z: f64,
    pub marginal_means: Vec<f64>,
    /// atanh(⟨σ_i⟩)/β, ±∞ when |⟨σ_i⟩| > 1 - 1e-12; empty at β = 0.
    pub effective_fields: Vec<f64>,
    /// (q, mass) for q = 1 - 2d/n, d = 0..=n.
    pub overlap_hist: Vec<(f64, f64)>,
}

fn check_instance(w: &DMatrix<f64>, x0: &[f64], max_n: usize) -> Result<usize> {
    let n = w.nrows();
    if n == 0 || w.ncols() != n {
        return Err(invalid("coupling matrix must be square and non-empty"));
    }
    if x0.len() != n {
        return Err(invalid("x0 length does not match the matrix"));
    }
    if x0.iter().any(|v| *v != 1.0 && *v != -1.0) {
        return Err(invalid("x0 entries must be ±1"));
    }
    for i in 0..n {
        for j in 0..i {
            if w[(i, j)] != w[(j, i)] {
                return Err(invalid("coupling matrix must be symmetric"));
            }
        }
    }
    if n > max_n {
        return Err(Error::Capability(format!(
            "exact enumeration supports n <= {max_n}, got {n}"
        )));
    }
    Ok(n)
}

/// Log-weights of all 2^n states; bit i of the index set means σ_i = -1.
fn log_weights(w: &DMatrix<f64>, p: &SkParams, x0: &[f64]) -> Vec<f64> {
    let n = x0.len();
    let nf = n as f64;
    let y = |i: usize, j: usize| w[(i, j)] + p.lambda / nf * x0[i] * x0[j];
    let mut sigma = vec![1.0f64; n];
    let mut field: Vec<f64> = (0..n).map(|i| (0..n).map(|j| y(i, j)).sum()).collect();
    let mut quad: f64 = field.iter().sum();
    let mut lin: f64 = x0.iter().sum();
    let mut out = vec![0.0; 1 << n];
    let mut code = 0usize;
    out[0] = 0.5 * p.beta * quad + p.h * lin;
    for step in 1usize..(1 << n) {
        let k = step.trailing_zeros() as usize;
        let s = sigma[k];
        // σᵀYσ changes by -4 s (field_k - Y_kk s)
        quad -= 4.0 * s * (field[k] - y(k, k) * s);
        lin -= 2.0 * s * x0[k];
        for (j, f) in field.iter_mut().enumerate() {
            *f -= 2.0 * s * y(j, k);
        }
        sigma[k] = -s;
        code ^= 1 << k;
        out[code] = 0.5 * p.beta * quad + p.h * lin;
    }
    if p.h == 0.0 {
        // exact σ ↔ -σ symmetry
        let mask = out.len() - 1;
        for c in 0..out.len() / 2 {
            let v = 0.5 * (out[c] + out[c ^ mask]);
            out[c] = v;
            out[c ^ mask] = v;
        }
    }
    out
}

fn probabilities(logw: &[f64]) -> (f64, Vec<f64>) {
    let lz = log_sum_exp(logw);
    (lz, logw.iter().map(|l| (l - lz).exp()).collect())
}

/// Accumulated over σ, -σ pairs so symmetric measures give exact zeros.
fn marginals(prob: &[f64], n: usize) -> Vec<f64> {
    let mut m = vec![0.0; n];
    let mask = prob.len() - 1;
    for code in 0..prob.len() / 2 {
        let d = prob[code] - prob[code ^ mask];
        for (i, mi) in m.iter_mut().enumerate() {
            *mi += if code >> i & 1 == 1 { -d } else { d };
        }
    }
    m
}

/// In-place Walsh-Hadamard transform.
fn fwht(a: &mut [f64]) {
    let mut h = 1;
    while h < a.len() {
        for i in (0..a.len()).step_by(2 * h) {
            for j in i..i + h {
                let (x, y) = (a[j], a[j + h]);
                a[j] = x + y;
                a[j + h] = x - y;
            }
        }
        h *= 2;
    }
}

/// Law of (1/n)⟨σ¹, σ²⟩ under μ⊗μ via the XOR self-convolution of μ.
fn overlap_law(prob: &[f64], n: usize) -> Vec<(f64, f64)> {
    let mut a = prob.to_vec();
    fwht(&mut a);
    for v in a.iter_mut() {
        *v *= *v;
    }
    fwht(&mut a);
    let scale = 1.0 / a.len() as f64;
    let mut hist = vec![0.0; n + 1];
    for (code, v) in a.iter().enumerate() {
        hist[code.count_ones() as usize] += (v * scale).max(0.0);
    }
    let total: f64 = hist.iter().sum();
    hist.iter()
        .enumerate()
        .map(|(d, m)| (1.0 - 2.0 * d as f64 / n as f64, m / total))
        .collect()
}

pub fn enumerate_gibbs(w: &DMatrix<f64>, params: &SkParams, x0: &[f64]) -> Result<EnumeratedGibbs> {
    params.validate()?;
    let n = check_instance(w, x0, ENUMERATION_MAX_N)?;
    let (log_z, prob) = probabilities(&log_weights(w, params, x0));
    let marginal_means = marginals(&prob, n);
    let effective_fields = if params.beta > 0.0 {
        marginal_means
            .iter()
            .map(|&m| {
                if m.abs() > 1.0 - 1e-12 {
                    m.signum() * f64::INFINITY
                } else {
                    m.atanh() / params.beta
                }
            })
            .collect()
    } else {
        Vec::new()
    };
    Ok(EnumeratedGibbs {
        n,
        log_z,
        marginal_means,
        effective_fields,
        overlap_hist: overlap_law(&prob, n),
    })
}

/// |d/dh (1/n) log Z - (1/n) Σ x0_i ⟨σ_i⟩| with a central difference at 1e-5.
pub fn check_h_derivative(w: &DMatrix<f64>, params: &SkParams, x0: &[f64]) -> Result<f64> {
    params.validate()?;
    let n = check_instance(w, x0, DERIVATIVE_MAX_N)?;
    let nf = n as f64;
    let step = 1e-5;
    let lz = |h: f64| {
        let p = SkParams { h, ..*params };
        log_sum_exp(&log_weights(w, &p, x0))
    };
    let fd = (lz(params.h + step) - lz(params.h - step)) / (2.0 * step * nf);
    let (_, prob) = probabilities(&log_weights(w, params, x0));
    let m = marginals(&prob, n);
    let exact = m.iter().zip(x0).map(|(a, b)| a * b).sum::<f64>() / nf;
    Ok((fd - exact).abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GuerraCheck {
    pub n: usize,
    pub beta: f64,
    pub reps: usize,
    pub mean_phi: f64,
    pub std_error: f64,
    pub bound: f64,
    /// (bound - mean_phi) / std_error
    pub margin_se: f64,
}

/// Monte-Carlo (1/n) log Z_n of the SK model against min_q Ψ_RS(q).
pub fn guerra_rs_bound_mc(n: usize, beta: f64, reps: usize, rng: &RngStream) -> Result<GuerraCheck> {
    if n == 0 || n > GUERRA_MAX_N {
        return Err(Error::Capability(format!(
            "Guerra check supports 1 <= n <= {GUERRA_MAX_N}, got {n}"
        )));
    }
    if reps < 2 {
        return Err(invalid("Guerra check needs reps >= 2"));
    }
    let params = SkParams::new(beta, 0.0, 0.0)?;
    let x0 = vec![1.0; n];
    let phis = par::map_indices(reps, |r| {
        let w = goe_sample(n, &rng.substream(r as u64)).expect("n >= 1");
        log_sum_exp(&log_weights(&w, &params, &x0)) / n as f64
    });
    let (mean_phi, std_error) = mean_and_se(&phis);
    let bound = sk_min_psi_rs(beta)?.1;
    let margin_se = if std_error > 0.0 {
        (bound - mean_phi) / std_error
    } else if bound >= mean_phi - 1e-12 {
        f64::INFINITY
    } else {
        f64::NEG_INFINITY
    };
    Ok(GuerraCheck {
        n,
        beta,
        reps,
        mean_phi,
        std_error,
        bound,
        margin_se,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImmseCheck {
    pub lambda: f64,
    /// (2/(nλ)) dI/dλ
    pub lhs: f64,
    /// (2/n²) Σ_{i<j} E(x_i x_j - E[x_i x_j | Y])²
    pub rhs: f64,
    /// combined standard error of lhs - rhs
    pub std_error: f64,
}

impl ImmseCheck {
    pub fn passes(&self, k_se: f64) -> bool {
        (self.lhs - self.rhs).abs() <= k_se * self.std_error
    }
}

/// log dP(Y | x0)/dP(Y) and the pair MMSE for one draw.
fn info_sample(w: &DMatrix<f64>, lambda: f64, n: usize) -> (f64, f64) {
    // gauge x0 = 1; the channel is Y_ij = (λ/n) x_i x_j + W_ij for i < j
    let x0 = vec![1.0; n];
    let p = SkParams {
        beta: lambda,
        lambda,
        h: 0.0,
    };
    let logw = log_weights(w, &p, &x0);
    let (lz, prob) = probabilities(&logw);
    // the diagonal part of the exponent is σ-independent
    let info = logw[0] - lz + (n as f64) * 2f64.ln();
    let mut mmse = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let c: f64 = prob
                .iter()
                .enumerate()
                .map(|(code, q)| if (code >> i ^ code >> j) & 1 == 1 { -q } else { *q })
                .sum();
            mmse += (1.0 - c).powi(2);
        }
    }
    (info, mmse)
}

/// I-MMSE relation for the spiked Wigner model on {±1}^n: (2/(nλ)) dI/dλ
/// against the pair MMSE. dI/dλ by central difference at 1e-3 with common
/// noise across λ ± δ.
pub fn mutual_info_immse_check(n: usize, lambda: f64, reps: usize, rng: &RngStream) -> Result<ImmseCheck> {
    if !(2..=IMMSE_MAX_N).contains(&n) {
        return Err(Error::Capability(format!(
            "I-MMSE check supports 2 <= n <= {IMMSE_MAX_N}, got {n}"
        )));
    }
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(invalid(format!("lambda must be non-negative, got {lambda}")));
    }
    if reps < 2 {
        return Err(invalid("I-MMSE check needs reps >= 2"));
    }
    if lambda == 0.0 {
        return Ok(ImmseCheck {
            lambda,
            lhs: 0.0,
            rhs: 0.0,
            std_error: 0.0,
        });
    }
    let nf = n as f64;
    let delta = 1e-3;
    let samples = par::map_indices(reps, |r| {
        let w = goe_sample(n, &rng.substream(r as u64)).expect("n >= 2");
        let (ip, _) = info_sample(&w, lambda + delta, n);
        let (im, _) = info_sample(&w, lambda - delta, n);
        let (_, mmse) = info_sample(&w, lambda, n);
        let lhs = 2.0 / (nf * lambda) * (ip - im) / (2.0 * delta);
        let rhs = 2.0 / (nf * nf) * mmse;
        (lhs, rhs)
    });
    let diffs: Vec<f64> = samples.iter().map(|(a, b)| a - b).collect();
    let lhs: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let rhs: Vec<f64> = samples.iter().map(|s| s.1).collect();
    Ok(ImmseCheck {
        lambda,
        lhs: mean_and_se(&lhs).0,
        rhs: mean_and_se(&rhs).0,
        std_error: mean_and_se(&diffs).1,
    })
}
