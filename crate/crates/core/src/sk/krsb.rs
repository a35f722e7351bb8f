use serde::{Deserialize, Serialize};

use super::log2cosh;
use super::parisi::ParisiMeasure;
use crate::error::{invalid, Error, Result};
use crate::numerics::{hermite_cached, QuadratureRule, MAX_HERMITE_ORDER};

/// Largest k accepted by the nested recursion.
pub const KRSB_MAX_K: usize = 3;

/// kRSB order parameters: overlaps q_0 ≤ … ≤ q_k and Parisi parameters
/// m_0 ≤ … ≤ m_k = 1. The overlap law puts mass m_l - m_{l-1} on q_l.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RsbLadder {
    pub q: Vec<f64>,
    pub m: Vec<f64>,
}

impl RsbLadder {
    pub fn new(q: Vec<f64>, m: Vec<f64>) -> Result<Self> {
        let l = RsbLadder { q, m };
        l.validate()?;
        Ok(l)
    }

    /// Replica symmetric ladder (k = 0).
    pub fn rs(q: f64) -> Result<Self> {
        Self::new(vec![q], vec![1.0])
    }

    pub fn k(&self) -> usize {
        self.q.len() - 1
    }

    pub fn validate(&self) -> Result<()> {
        if self.q.is_empty() || self.q.len() != self.m.len() {
            return Err(invalid("ladder needs |q| = |m| >= 1"));
        }
        let mono = |v: &[f64]| v.windows(2).all(|w| w[0] <= w[1]);
        if !mono(&self.q) || !self.q.iter().all(|x| (0.0..=1.0).contains(x)) {
            return Err(invalid("ladder overlaps must be non-decreasing in [0, 1]"));
        }
        if !mono(&self.m) || !self.m.iter().all(|x| (0.0..=1.0).contains(x)) {
            return Err(invalid("ladder parameters m must be non-decreasing in [0, 1]"));
        }
        if *self.m.last().expect("non-empty") != 1.0 {
            return Err(invalid("ladder needs m_k = 1"));
        }
        Ok(())
    }

    /// Overlap law Σ (m_l - m_{l-1}) δ_{q_l}, merging equal locations and
    /// dropping empty atoms.
    pub fn to_measure(&self) -> Result<ParisiMeasure> {
        let mut atoms: Vec<(f64, f64)> = Vec::new();
        let mut prev = 0.0;
        for (&q, &m) in self.q.iter().zip(&self.m) {
            let w = m - prev;
            prev = m;
            if w <= 0.0 {
                continue;
            }
            match atoms.last_mut() {
                Some(last) if last.0 == q => last.1 += w,
                _ => atoms.push((q, w)),
            }
        }
        ParisiMeasure::new(atoms)
    }
}

/// Hermite order for a level with increment variance `var` acting on a
/// function of width `width`.
fn level_order(var: f64, width: f64) -> usize {
    let r2 = var / (width * width);
    let n = (20.0 + 45.0 * r2).ceil() as usize;
    n.div_ceil(8).saturating_mul(8).clamp(16, MAX_HERMITE_ORDER)
}

struct Levels {
    beta: f64,
    sd: Vec<f64>,
    m: Vec<f64>,
    rules: Vec<std::sync::Arc<QuadratureRule>>,
}

impl Levels {
    /// Φ_j(x); Φ_k(x) = log 2cosh(βx).
    fn phi(&self, j: usize, x: f64) -> f64 {
        let k = self.m.len() - 1;
        if j == k {
            return log2cosh(self.beta * x);
        }
        let s = self.sd[j + 1];
        if s == 0.0 {
            return self.phi(j + 1, x);
        }
        let rule = &self.rules[j + 1];
        let m = self.m[j];
        if m <= 1e-12 {
            return rule.apply(|g| self.phi(j + 1, x + s * g));
        }
        let vals: Vec<f64> = rule.nodes.iter().map(|g| m * self.phi(j + 1, x + s * g)).collect();
        let top = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let sum: f64 = vals.iter().zip(&rule.weights).map(|(v, w)| w * (v - top).exp()).sum();
        (top + sum.ln()) / m
    }
}

/// Ψ_kRSB(q, m) = β²/4 (1 - 2q_k) + β²/4 Σ (m_l - m_{l-1}) q_l² + E Φ_0(√q_0 G),
/// with Φ_{l}(x) = (1/m_l) log E exp(m_l Φ_{l+1}(x + √(q_{l+1} - q_l) G)).
pub fn krsb_value(ladder: &RsbLadder, beta: f64) -> Result<f64> {
    ladder.validate()?;
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(invalid(format!("beta must be finite and non-negative, got {beta}")));
    }
    let k = ladder.k();
    if k > KRSB_MAX_K {
        return Err(Error::Capability(format!(
            "nested quadrature supports k <= {KRSB_MAX_K}, got k = {k}; use parisi_functional"
        )));
    }
    let q = &ladder.q;
    let var: Vec<f64> = (0..=k).map(|l| if l == 0 { q[0] } else { q[l] - q[l - 1] }).collect();
    let inv_b2 = if beta > 0.0 { 1.0 / (beta * beta) } else { 1e12 };
    // levels with m = 1 above `top` keep the log2cosh shape
    let top = (0..=k).rev().take_while(|&j| ladder.m[j] >= 1.0).last().unwrap_or(k);
    let rules = (0..=k)
        .map(|l| hermite_cached(level_order(var[l], (inv_b2 + (q[top] - q[l]).max(0.0)).sqrt())))
        .collect::<Result<Vec<_>>>()?;
    let levels = Levels {
        beta,
        sd: var.iter().map(|v| v.max(0.0).sqrt()).collect(),
        m: ladder.m.clone(),
        rules,
    };
    let outer = if levels.sd[0] == 0.0 {
        levels.phi(0, 0.0)
    } else {
        let s = levels.sd[0];
        levels.rules[0].apply(|g| levels.phi(0, s * g))
    };
    let b2 = beta * beta;
    let mut quad = 0.0;
    let mut prev = 0.0;
    for (&ql, &ml) in q.iter().zip(&ladder.m) {
        quad += (ml - prev) * ql * ql;
        prev = ml;
    }
    Ok(0.25 * b2 * (1.0 - 2.0 * q[k]) + 0.25 * b2 * quad + outer)
}
