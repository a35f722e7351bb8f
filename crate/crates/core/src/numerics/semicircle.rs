use std::f64::consts::PI;

use crate::error::{domain, Result};

/// Ω(x) = ∫ log|λ - x| s(dλ) for the semicircle law on [-2, 2].
pub fn semicircle_omega(x: f64) -> f64 {
    let a = x.abs();
    if a <= 2.0 {
        x * x / 4.0 - 0.5
    } else {
        let r = (x * x - 4.0).sqrt();
        x * x / 4.0 - 0.5 - a * r / 4.0 + (a / 2.0 + (x * x / 4.0 - 1.0).sqrt()).ln()
    }
}

/// ∫ (z - λ)^{-1} s(dλ) for |z| > 2.
pub fn semicircle_stieltjes(z: f64) -> Result<f64> {
    if !(z.abs() > 2.0) {
        return Err(domain(format!("Stieltjes transform needs |z| > 2, got {z}")));
    }
    Ok((z - z.signum() * (z * z - 4.0).sqrt()) / 2.0)
}

pub fn semicircle_density(x: f64) -> f64 {
    if x.abs() >= 2.0 {
        0.0
    } else {
        (4.0 - x * x).sqrt() / (2.0 * PI)
    }
}

pub fn semicircle_cdf(x: f64) -> f64 {
    if x <= -2.0 {
        0.0
    } else if x >= 2.0 {
        1.0
    } else {
        0.5 + x * (4.0 - x * x).sqrt() / (4.0 * PI) + (x / 2.0).asin() / PI
    }
}
