use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

pub const DEFAULT_ORDER: usize = 61;
pub const MAX_HERMITE_ORDER: usize = 700;

/// Quadrature rule for expectations over a standard normal variable
/// (Gauss-Hermite) or for integrals over [-1, 1] (Gauss-Legendre).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Sum of w_i f(x_i).
    pub fn apply<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    /// Iterator over (node, weight) pairs.
    pub fn pairs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }
}

/// Gauss-Hermite rule for the N(0,1) weight, exact for polynomials of
/// degree at most 2*order - 1. Weights are normalised to sum to one.
pub fn gauss_hermite(order: usize) -> Result<QuadratureRule> {
    if order < 2 {
        return Err(invalid(format!("quadrature order must be >= 2, got {order}")));
    }
    if order > MAX_HERMITE_ORDER {
        return Err(invalid(format!(
            "Gauss-Hermite order above {MAX_HERMITE_ORDER} is not supported"
        )));
    }
    let n = order;
    let nf = n as f64;
    // starting nodes from the Jacobi matrix of the e^{-x^2} Hermite family
    let jac = nalgebra::DMatrix::from_fn(n, n, |i, j| {
        if i + 1 == j || j + 1 == i {
            (i.max(j) as f64 / 2.0).sqrt()
        } else {
            0.0
        }
    });
    let mut start: Vec<f64> = jac.symmetric_eigenvalues().iter().copied().collect();
    start.sort_by(|a, b| b.total_cmp(a));
    let pim4 = PI.powf(-0.25);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = start[i];
        let mut pp = 0.0;
        for it in 0..50 {
            let mut p1 = pim4;
            let mut p2 = 0.0;
            for j in 1..=n {
                let jf = j as f64;
                let p3 = p2;
                p2 = p1;
                p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if it > 0 && (z - z1).abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        if n % 2 == 1 && i == n / 2 {
            z = 0.0;
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    // physicists' weight e^{-x^2} -> standard normal
    let total: f64 = w.iter().sum();
    let mut nodes: Vec<f64> = x.iter().map(|v| v * std::f64::consts::SQRT_2).collect();
    let mut weights: Vec<f64> = w.iter().map(|v| v / total).collect();
    nodes.reverse();
    weights.reverse();
    Ok(QuadratureRule { nodes, weights })
}

/// Gauss-Legendre rule on [-1, 1]; weights sum to 2.
pub fn gauss_legendre(order: usize) -> Result<QuadratureRule> {
    if order < 1 {
        return Err(invalid("Gauss-Legendre order must be >= 1"));
    }
    let n = order;
    let nf = n as f64;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 1..=n {
                let jf = j as f64;
                let p3 = p2;
                p2 = p1;
                p1 = ((2.0 * jf - 1.0) * z * p2 - (jf - 1.0) * p3) / jf;
            }
            pp = nf * (z * p1 - p2) / (z * z - 1.0);
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 {
                break;
            }
        }
        if n % 2 == 1 && i == n / 2 {
            z = 0.0;
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        weights[n - 1 - i] = weights[i];
    }
    Ok(QuadratureRule { nodes, weights })
}

/// The shared order-61 Gauss-Hermite rule.
pub fn standard_rule() -> &'static QuadratureRule {
    static RULE: OnceLock<QuadratureRule> = OnceLock::new();
    RULE.get_or_init(|| gauss_hermite(DEFAULT_ORDER).expect("order 61 is valid"))
}

/// Gauss-Hermite rule of the given order, cached for reuse.
pub fn hermite_cached(order: usize) -> Result<std::sync::Arc<QuadratureRule>> {
    use std::collections::HashMap;
    use std::sync::{Arc, Mutex};
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<QuadratureRule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(r) = cache.lock().expect("cache lock").get(&order) {
        return Ok(r.clone());
    }
    let rule = Arc::new(gauss_hermite(order)?);
    cache.lock().expect("cache lock").insert(order, rule.clone());
    Ok(rule)
}

/// Rule for E f(c + s G), G ~ N(0,1), where f varies on unit scale
/// (tanh, log 2cosh). Composite Gauss-Legendre over g in [-12, 12] with
/// panels of width min(1, 0.5/s); weights include the normal density.
pub fn gaussian_rule(scale: f64) -> QuadratureRule {
    const HALF: f64 = 12.0;
    let s = scale.abs().max(1e-6);
    let width = (0.5 / s).min(1.0);
    let panels = (2.0 * HALF / width).ceil() as usize;
    let h = 2.0 * HALF / panels as f64;
    let gl = gauss_legendre(8).expect("order 8");
    let norm = 1.0 / (2.0 * PI).sqrt();
    let mut nodes = Vec::with_capacity(panels * 8);
    let mut weights = Vec::with_capacity(panels * 8);
    for p in 0..panels {
        let mid = -HALF + h * (p as f64 + 0.5);
        for (u, w) in gl.pairs() {
            let g = mid + 0.5 * h * u;
            nodes.push(g);
            weights.push(0.5 * h * w * norm * (-0.5 * g * g).exp());
        }
    }
    QuadratureRule { nodes, weights }
}
