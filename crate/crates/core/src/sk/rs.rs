use serde::{Deserialize, Serialize};

use super::log2cosh;
use crate::error::{invalid, Error, Result};
use crate::numerics::{find_root, gaussian_rule, scan_minimize, QuadratureRule};

const MAX_ITER: usize = 100_000;
const RESIDUAL: f64 = 1e-12;
const NEWTON_AFTER: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SkParams {
    pub beta: f64,
    pub lambda: f64,
    pub h: f64,
}

impl SkParams {
    pub fn new(beta: f64, lambda: f64, h: f64) -> Result<Self> {
        let p = SkParams { beta, lambda, h };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("beta", self.beta), ("lambda", self.lambda), ("h", self.h)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(invalid(format!("{name} must be finite and non-negative, got {v}")));
            }
        }
        Ok(())
    }

    fn rule(&self) -> QuadratureRule {
        gaussian_rule(self.beta.max(1.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SkRsPoint {
    pub b: f64,
    pub q: f64,
}

/// Ψ_RS(b, q) = ¼β²(1-q)² - ½βλb² + E log 2cosh(β(λb + √q G) + h).
pub fn sk_psi_rs(b: f64, q: f64, params: &SkParams) -> Result<f64> {
    params.validate()?;
    if !(0.0..=1.0).contains(&q) {
        return Err(invalid(format!("q must lie in [0, 1], got {q}")));
    }
    let SkParams { beta, lambda, h } = *params;
    let sq = q.sqrt();
    let e = params.rule().apply(|g| log2cosh(beta * (lambda * b + sq * g) + h));
    Ok(0.25 * beta * beta * (1.0 - q).powi(2) - 0.5 * beta * lambda * b * b + e)
}

/// One application of the fixed-point map (b, q) -> (E tanh, E tanh²).
pub fn sk_rs_map(b: f64, q: f64, params: &SkParams) -> (f64, f64) {
    rs_map(b, q, params, &params.rule())
}

fn rs_map(b: f64, q: f64, params: &SkParams, rule: &QuadratureRule) -> (f64, f64) {
    let SkParams { beta, lambda, h } = *params;
    let sq = q.max(0.0).sqrt();
    let (mut tb, mut tq) = (0.0, 0.0);
    for (g, w) in rule.pairs() {
        let t = (beta * (lambda * b + sq * g) + h).tanh();
        tb += w * t;
        tq += w * t * t;
    }
    (tb, tq)
}

/// E tanh(λ²b + λ√b G), the Bayes-optimal overlap map.
fn bayes_map(b: f64, lambda: f64, rule: &QuadratureRule) -> f64 {
    let sb = b.max(0.0).sqrt();
    rule.apply(|g| (lambda * lambda * b + lambda * sb * g).tanh())
}

/// Largest fixed point of b = E tanh(λ²b + λ√b G); zero for λ ≤ 1.
pub fn sk_bayes_fixed_point(lambda: f64) -> Result<f64> {
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(invalid(format!("lambda must be finite and non-negative, got {lambda}")));
    }
    if lambda <= 1.0 {
        return Ok(0.0);
    }
    let rule = gaussian_rule(lambda.max(1.0));
    let ratio = |b: f64| bayes_map(b, lambda, &rule) / b - 1.0;
    let b = find_root(ratio, 1e-13, 1.0, 1e-15)?;
    Ok(polish_scalar(b, |b| bayes_map(b, lambda, &rule)))
}

/// Newton polish of x = f(x) with a finite-difference slope.
fn polish_scalar<F: Fn(f64) -> f64>(mut x: f64, f: F) -> f64 {
    for _ in 0..5 {
        let r = f(x) - x;
        if r.abs() <= 1e-15 {
            break;
        }
        let d = 1e-7 * x.max(1e-8);
        let slope = (f(x + d) - f(x - d)) / (2.0 * d) - 1.0;
        if slope == 0.0 {
            break;
        }
        let nx = x - r / slope;
        if !(nx > 0.0 && nx < 1.0) || (f(nx) - nx).abs() >= r.abs() {
            break;
        }
        x = nx;
    }
    x
}

/// Solves the RS stationarity equations.
pub fn sk_solve_rs(params: &SkParams) -> Result<SkRsPoint> {
    params.validate()?;
    let SkParams { beta, lambda, h } = *params;
    let rule = params.rule();
    if h == 0.0 && lambda == beta && lambda > 0.0 {
        let b = sk_bayes_fixed_point(lambda)?;
        return Ok(SkRsPoint { b, q: b });
    }
    if h == 0.0 && lambda == 0.0 {
        if beta <= 1.0 {
            return Ok(SkRsPoint { b: 0.0, q: 0.0 });
        }
        let map = |q: f64| rs_map(0.0, q, params, &rule).1;
        let q = find_root(|q| map(q) / q - 1.0, 1e-13, 1.0, 1e-15)?;
        let q = polish_scalar(q, map);
        return Ok(SkRsPoint { b: 0.0, q });
    }
    // damped iteration from the top of the domain, then Newton
    let (mut b, mut q) = (1.0, 1.0);
    let damping = 0.5;
    let mut iter = 0;
    while iter < MAX_ITER {
        let (nb, nq) = rs_map(b, q, params, &rule);
        let res = (nb - b).abs().max((nq - q).abs());
        if res <= RESIDUAL {
            return Ok(SkRsPoint { b: nb, q: nq });
        }
        if iter == NEWTON_AFTER || (iter > NEWTON_AFTER && iter % NEWTON_AFTER == 0) {
            if let Some(p) = newton(b, q, params, &rule) {
                return Ok(p);
            }
        }
        b = damping * nb + (1.0 - damping) * b;
        q = damping * nq + (1.0 - damping) * q;
        iter += 1;
    }
    Err(Error::Convergence(MAX_ITER))
}

/// Map values and Jacobian of (b, q) ↦ (E t, E t²), t = tanh(β(λb + √q G) + h),
/// with the q-derivatives taken by Gaussian integration by parts.
fn rs_map_jac(b: f64, q: f64, params: &SkParams, rule: &QuadratureRule) -> ((f64, f64), [[f64; 2]; 2]) {
    let SkParams { beta, lambda, h } = *params;
    let sq = q.max(0.0).sqrt();
    let (mut t1, mut t2, mut d1, mut d2, mut d3) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (g, w) in rule.pairs() {
        let t = (beta * (lambda * b + sq * g) + h).tanh();
        let s = 1.0 - t * t;
        t1 += w * t;
        t2 += w * t * t;
        d1 += w * s;
        d2 += w * t * s;
        d3 += w * s * (1.0 - 3.0 * t * t);
    }
    let jac = [
        [beta * lambda * d1, -beta * beta * d2],
        [2.0 * beta * lambda * d2, beta * beta * d3],
    ];
    ((t1, t2), jac)
}

/// Newton on (b, q) - map(b, q) with backtracking; None when it stalls.
fn newton(mut b: f64, mut q: f64, params: &SkParams, rule: &QuadratureRule) -> Option<SkRsPoint> {
    let resid = |b: f64, q: f64| {
        let (mb, mq) = rs_map(b, q, params, rule);
        (mb - b, mq - q)
    };
    for _ in 0..60 {
        let ((mb, mq), j) = rs_map_jac(b, q, params, rule);
        let (rb, rq) = (mb - b, mq - q);
        let norm = rb.abs().max(rq.abs());
        if norm <= RESIDUAL {
            return Some(SkRsPoint { b: mb, q: mq });
        }
        // (J - I) δ = -r
        let (a11, a12, a21, a22) = (j[0][0] - 1.0, j[0][1], j[1][0], j[1][1] - 1.0);
        let det = a11 * a22 - a12 * a21;
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let db = (-rb * a22 + rq * a12) / det;
        let dq = (-rq * a11 + rb * a21) / det;
        let mut step = 1.0;
        loop {
            let (nb, nq) = (b + step * db, (q + step * dq).clamp(0.0, 1.0));
            let (eb, eq) = resid(nb, nq);
            if eb.abs().max(eq.abs()) < norm {
                b = nb;
                q = nq;
                break;
            }
            step *= 0.5;
            if step < 1e-6 {
                return None;
            }
        }
    }
    None
}

/// RS entropy s(β) = Ψ - β ∂_βΨ at the solved q (λ = 0, h = 0).
pub fn sk_rs_entropy(beta: f64) -> Result<f64> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(invalid(format!("beta must be positive, got {beta}")));
    }
    let params = SkParams::new(beta, 0.0, 0.0)?;
    let q = sk_solve_rs(&params)?.q;
    let psi = sk_psi_rs(0.0, q, &params)?;
    let sq = q.sqrt();
    let dpsi = 0.5 * beta * (1.0 - q).powi(2) + params.rule().apply(|g| sq * g * (beta * sq * g).tanh());
    Ok(psi - beta * dpsi)
}

/// min over q ∈ [0, 1] of Ψ_RS(0, q) at λ = 0; returns (q, value).
pub fn sk_min_psi_rs(beta: f64) -> Result<(f64, f64)> {
    let params = SkParams::new(beta, 0.0, 0.0)?;
    let rule = params.rule();
    let f = |q: f64| {
        let sq = q.sqrt();
        0.25 * beta * beta * (1.0 - q).powi(2) + rule.apply(|g| log2cosh(beta * sq * g))
    };
    let (q, v) = scan_minimize(f, 0.0, 1.0, 101, 1e-12);
    Ok((q, v))
}
