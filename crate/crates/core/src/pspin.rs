//! Spherical p-spin / spiked tensor model: replica-symmetric functional and
//! phase diagram, Bayes-line thresholds, the 1RSB functional at λ = 0, its
//! zero-temperature limit, and Monasson's complexity construction.

use serde::{Deserialize, Serialize};

use crate::error::{domain, invalid, Error, Result};
use crate::numerics::{find_root, scan_minimize, DEFAULT_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PSpinParams {
    pub k: u32,
    pub beta: f64,
    pub lambda: f64,
    pub h: f64,
}

impl PSpinParams {
    pub fn new(k: u32, beta: f64, lambda: f64, h: f64) -> Result<Self> {
        let p = Self { k, beta, lambda, h };
        p.validate()?;
        Ok(p)
    }

    /// Point on the Bayes line β = λ √(2/k!), h = 0.
    pub fn bayes(k: u32, lambda: f64) -> Self {
        Self {
            k,
            beta: lambda * (2.0 / factorial(k)).sqrt(),
            lambda,
            h: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 1 {
            return Err(invalid("tensor order k must be >= 1"));
        }
        if !(self.beta >= 0.0 && self.lambda >= 0.0 && self.h >= 0.0) {
            return Err(invalid("beta, lambda and h must be non-negative"));
        }
        Ok(())
    }

    /// Coefficient of b^{k-1} in ∂_bΨ_RS.
    fn c(&self) -> f64 {
        let k = self.k as f64;
        self.beta * self.lambda * (k / (2.0 * factorial(self.k - 1))).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RsPoint {
    pub b: f64,
    pub q: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OneRsbPoint {
    pub b: f64,
    pub q0: f64,
    pub q1: f64,
    pub m: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PhaseLabel {
    Paramagnetic,
    SpinGlass,
    Recovery,
}

impl PhaseLabel {
    pub fn short(&self) -> &'static str {
        match self {
            PhaseLabel::Paramagnetic => "P",
            PhaseLabel::SpinGlass => "SG",
            PhaseLabel::Recovery => "R",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    Trivial,
    Nontrivial,
}

/// Parametric Monasson curve; `samples` holds (f, Σ) sorted by f, and `m`
/// the Parisi parameter that produced each sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexityCurve {
    pub samples: Vec<(f64, f64)>,
    pub m: Vec<f64>,
    pub temperature: f64,
}

pub fn factorial(k: u32) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

fn check_q(q: f64) -> Result<()> {
    if !(q < 1.0) {
        return Err(domain(format!("overlap q must be < 1, got {q}")));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Replica-symmetric functional

pub fn psi_rs(point: RsPoint, params: &PSpinParams) -> Result<f64> {
    check_q(point.q)?;
    let PSpinParams { k, beta, lambda, h } = *params;
    let RsPoint { b, q } = point;
    let kf = k as i32;
    Ok(
        h * b + beta * lambda / (2.0 * factorial(k)).sqrt() * b.powi(kf) + beta * beta / 4.0 * (1.0 - q.powi(kf))
            - b * b / (2.0 * (1.0 - q))
            + q / (2.0 * (1.0 - q))
            + 0.5 * (1.0 - q).ln(),
    )
}

pub fn grad_psi_rs(point: RsPoint, params: &PSpinParams) -> Result<(f64, f64)> {
    check_q(point.q)?;
    let RsPoint { b, q } = point;
    let k = params.k as i32;
    let beta = params.beta;
    let db = params.h + params.c() * b.powi(k - 1) - b / (1.0 - q);
    let dq = -(k as f64) * beta * beta / 4.0 * q.powi(k - 1) - b * b / (2.0 * (1.0 - q).powi(2))
        + q / (2.0 * (1.0 - q).powi(2));
    Ok((db, dq))
}

fn hess_psi_rs(point: RsPoint, params: &PSpinParams) -> [[f64; 2]; 2] {
    let RsPoint { b, q } = point;
    let k = params.k as i32;
    let kf = k as f64;
    let beta = params.beta;
    let bb = if k >= 2 {
        params.c() * (kf - 1.0) * b.powi(k - 2)
    } else {
        0.0
    } - 1.0 / (1.0 - q);
    let bq = -b / (1.0 - q).powi(2);
    let qq = if k >= 2 {
        -kf * (kf - 1.0) * beta * beta / 4.0 * q.powi(k - 2)
    } else {
        0.0
    } - b * b / (1.0 - q).powi(3)
        + (1.0 + q) / (2.0 * (1.0 - q).powi(3));
    [[bb, bq], [bq, qq]]
}

fn newton_polish(mut p: RsPoint, params: &PSpinParams) -> Result<RsPoint> {
    for _ in 0..100 {
        let (gb, gq) = grad_psi_rs(p, params)?;
        if gb.hypot(gq) <= 1e-14 {
            break;
        }
        let h = hess_psi_rs(p, params);
        let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        if det.abs() < 1e-300 {
            break;
        }
        let db = (h[1][1] * gb - h[0][1] * gq) / det;
        let dq = (h[0][0] * gq - h[1][0] * gb) / det;
        let mut t = 1.0;
        // keep q inside [0, 1)
        while p.q - t * dq >= 1.0 || p.q - t * dq < 0.0 {
            t *= 0.5;
            if t < 1e-12 {
                break;
            }
        }
        p = RsPoint {
            b: p.b - t * db,
            q: p.q - t * dq,
        };
    }
    Ok(p)
}

fn residual(p: RsPoint, params: &PSpinParams) -> Result<f64> {
    let (a, b) = grad_psi_rs(p, params)?;
    Ok(a.hypot(b))
}

/// Damped fixed-point iteration of
/// b = (1-q)(h + c b^{k-1}),  q = b² + (kβ²/2) q^{k-1} (1-q)².
fn damped_iteration(start: RsPoint, params: &PSpinParams) -> RsPoint {
    let k = params.k as i32;
    let c = params.c();
    let kb2 = params.k as f64 * params.beta * params.beta / 2.0;
    let mut p = start;
    for _ in 0..20_000 {
        let nb = (1.0 - p.q) * (params.h + c * p.b.powi(k - 1));
        let nq = (nb * nb + kb2 * p.q.powi(k - 1) * (1.0 - p.q).powi(2)).clamp(0.0, 1.0 - 1e-12);
        let next = RsPoint {
            b: 0.5 * p.b + 0.5 * nb,
            q: 0.5 * p.q + 0.5 * nq,
        };
        let step = (next.b - p.b).abs() + (next.q - p.q).abs();
        p = next;
        if step < 1e-13 {
            break;
        }
    }
    p
}

fn finish(p: RsPoint, params: &PSpinParams) -> Result<RsPoint> {
    let p = newton_polish(p, params)?;
    if residual(p, params)? > 1e-10 || !(p.q >= 0.0 && p.q < 1.0) {
        return Err(Error::Convergence(20_000));
    }
    Ok(p)
}

fn k1_closed_form(params: &PSpinParams) -> RsPoint {
    let c = params.h + params.c();
    let x = 1.0 / (params.beta * params.beta + 2.0 * c * c);
    let q = 1.0 + x - (2.0 * x + x * x).sqrt();
    RsPoint { b: c * (1.0 - q), q }
}

/// All roots of `f` on (lo, hi) located by a uniform scan and bisection.
fn scan_roots<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let mut roots = Vec::new();
    let h = (hi - lo) / n as f64;
    let mut xa = lo;
    let mut fa = f(xa);
    for i in 1..=n {
        let xb = lo + h * i as f64;
        let fb = f(xb);
        if fa == 0.0 {
            roots.push(xa);
        } else if fa * fb < 0.0 {
            if let Ok(r) = find_root(&f, xa, xb, DEFAULT_TOL) {
                roots.push(r);
            }
        }
        xa = xb;
        fa = fb;
    }
    roots
}

/// Stationary points of Ψ_RS at h = 0 for k >= 3.
fn stationary_points_h0(params: &PSpinParams) -> Vec<RsPoint> {
    let k = params.k as i32;
    let kb2 = params.k as f64 * params.beta * params.beta / 2.0;
    let mut pts = vec![RsPoint { b: 0.0, q: 0.0 }];
    let lo = 1e-12;
    let hi = 1.0 - 1e-12;
    for q in scan_roots(|q| kb2 * q.powi(k - 2) * (1.0 - q).powi(2) - 1.0, lo, hi, 4000) {
        pts.push(RsPoint { b: 0.0, q });
    }
    let c = params.c();
    if c > 0.0 {
        let bq = |q: f64| (c * (1.0 - q)).powf(-1.0 / (k as f64 - 2.0));
        let g = |q: f64| q - bq(q).powi(2) - kb2 * q.powi(k - 1) * (1.0 - q).powi(2);
        for q in scan_roots(g, lo, hi, 4000) {
            let b = bq(q);
            if b * b <= q + 1e-9 {
                pts.push(RsPoint { b, q });
            }
        }
    }
    pts
}

/// Stationary point of Ψ_RS on the requested branch.
pub fn solve_rs(params: &PSpinParams, branch: Branch) -> Result<RsPoint> {
    params.validate()?;
    if params.k == 1 {
        return finish(k1_closed_form(params), params);
    }
    if params.h > 0.0 {
        let h0 = PSpinParams { h: 0.0, ..*params };
        let start = match branch {
            Branch::Trivial => RsPoint { b: 0.0, q: 0.0 },
            Branch::Nontrivial => solve_rs(&h0, Branch::Nontrivial)?,
        };
        return finish(damped_iteration(start, params), params);
    }
    match branch {
        Branch::Trivial => Ok(RsPoint { b: 0.0, q: 0.0 }),
        Branch::Nontrivial if params.k == 2 => {
            let (beta, lambda) = (params.beta, params.lambda);
            if lambda > 1.0 && beta * lambda > 1.0 {
                finish(recovery_point(beta, lambda), params)
            } else if beta > 1.0 {
                Ok(RsPoint {
                    b: 0.0,
                    q: 1.0 - 1.0 / beta,
                })
            } else {
                Err(Error::NoSolution("no non-trivial k=2 stationary point".into()))
            }
        }
        Branch::Nontrivial => {
            let best = stationary_points_h0(params)
                .into_iter()
                .filter(|p| p.q > 0.0)
                .max_by(|a, b| a.q.total_cmp(&b.q));
            match best {
                Some(p) => finish(p, params),
                None => Err(Error::NoSolution("below the spinodal".into())),
            }
        }
    }
}

// ---------------------------------------------------------------------------
// k = 2 phase diagram

fn recovery_point(beta: f64, lambda: f64) -> RsPoint {
    let q = 1.0 - 1.0 / (beta * lambda);
    let b = ((1.0 - 1.0 / (lambda * lambda)) * q).max(0.0).sqrt();
    RsPoint { b, q }
}

pub fn k2_phase(beta: f64, lambda: f64) -> (PhaseLabel, RsPoint) {
    if lambda >= 1.0f64.max(1.0 / beta) {
        (PhaseLabel::Recovery, recovery_point(beta, lambda))
    } else if beta >= 1.0 {
        (
            PhaseLabel::SpinGlass,
            RsPoint {
                b: 0.0,
                q: 1.0 - 1.0 / beta,
            },
        )
    } else {
        (PhaseLabel::Paramagnetic, RsPoint { b: 0.0, q: 0.0 })
    }
}

/// Mean square error 1 - 2b + q of the Gibbs-mean estimator.
pub fn k2_mse(beta: f64, lambda: f64) -> f64 {
    let (_, p) = k2_phase(beta, lambda);
    1.0 - 2.0 * p.b + p.q
}

pub fn mse_ml(lambda: f64) -> f64 {
    2.0 - 2.0 * (1.0 - 1.0 / (lambda * lambda)).max(0.0).sqrt()
}

pub fn mse_bayes(lambda: f64) -> f64 {
    1.0f64.min(1.0 / (lambda * lambda))
}

// ---------------------------------------------------------------------------
// Bayes line

pub fn psi_bayes(b: f64, lambda: f64, k: u32) -> f64 {
    lambda * lambda / (2.0 * factorial(k)) * (1.0 + b.powi(k as i32)) + b / 2.0 + 0.5 * (1.0 - b).ln()
}

/// Solutions of b = ξ b^{k-1} / (1 + ξ b^{k-1}), ξ = λ²/(k-1)!, in
/// increasing order: {0} or {0, b_unst, b_R}.
pub fn bayes_fixed_points(lambda: f64, k: u32) -> Result<Vec<f64>> {
    if k < 3 {
        return Err(domain("Bayes fixed points are tabulated for k >= 3"));
    }
    let xi = lambda * lambda / factorial(k - 1);
    let ki = k as i32;
    let bmax = (k as f64 - 2.0) / (k as f64 - 1.0);
    // non-zero roots solve ξ b^{k-2} (1 - b) = 1
    let g = |b: f64| xi * b.powi(ki - 2) * (1.0 - b) - 1.0;
    let gmax = g(bmax);
    let mut out = vec![0.0];
    if gmax < -1e-12 {
        return Ok(out);
    }
    if gmax <= 0.0 {
        out.extend([bmax, bmax]);
        return Ok(out);
    }
    let lo = find_root(g, 0.0, bmax, 1e-15)?;
    let hi = find_root(g, bmax, 1.0, 1e-15)?;
    out.extend([lo, hi]);
    Ok(out)
}

pub fn lambda_spinodal(k: u32) -> Result<f64> {
    if k < 3 {
        return Err(domain("spinodal defined for k >= 3"));
    }
    let kf = k as f64;
    let xi_s = (kf - 1.0).powf(kf - 1.0) / (kf - 2.0).powf(kf - 2.0);
    Ok((factorial(k - 1) * xi_s).sqrt())
}

pub fn lambda_critical(k: u32) -> Result<f64> {
    let ls = lambda_spinodal(k)?;
    let gap = |l: f64| -> f64 {
        match bayes_fixed_points(l, k) {
            Ok(v) if v.len() == 3 => psi_bayes(v[2], l, k) - psi_bayes(0.0, l, k),
            _ => -1.0,
        }
    };
    let lo = ls * (1.0 + 1e-9);
    let mut hi = 2.0 * ls;
    while gap(hi) <= 0.0 {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::NoSolution("no equal-free-energy point".into()));
        }
    }
    find_root(gap, lo, hi, DEFAULT_TOL)
}

/// Pure-noise RS spinodal β_s with β_s² = k^{k-1} / (2 (k-2)^{k-2}).
pub fn beta_spinodal_rs(k: u32) -> Result<f64> {
    if k < 3 {
        return Err(domain("RS spinodal defined for k >= 3"));
    }
    let kf = k as f64;
    Ok((kf.powf(kf - 1.0) / (2.0 * (kf - 2.0).powf(kf - 2.0))).sqrt())
}

// ---------------------------------------------------------------------------
// One-step RSB

/// General 1RSB functional Ψ_1RSB(b, q0, q1, m).
pub fn psi_1rsb_general(p: OneRsbPoint, params: &PSpinParams) -> Result<f64> {
    let OneRsbPoint { b, q0, q1, m } = p;
    check_q(q1)?;
    if !(0.0..=1.0).contains(&m) || m == 0.0 {
        return Err(domain("m must lie in (0, 1]"));
    }
    let PSpinParams { k, beta, lambda, h } = *params;
    let ki = k as i32;
    let d = 1.0 - (1.0 - m) * q1 - m * q0;
    Ok(h * b
        + beta * lambda / (2.0 * factorial(k)).sqrt() * b.powi(ki)
        + beta * beta / 4.0 * (1.0 - (1.0 - m) * q1.powi(ki) - m * q0.powi(ki))
        + 0.5 * (q0 - b * b) / d
        + d.ln() / (2.0 * m)
        - (1.0 - m) / (2.0 * m) * (1.0 - q1).ln())
}

/// Ψ_1RSB(q1, m) at b = q0 = 0, λ = 0.
pub fn psi_1rsb(q1: f64, m: f64, beta: f64, k: u32) -> f64 {
    let ki = k as i32;
    beta * beta / 4.0 * (1.0 - (1.0 - m) * q1.powi(ki)) + (1.0 - (1.0 - m) * q1).ln() / (2.0 * m)
        - (1.0 - m) / (2.0 * m) * (1.0 - q1).ln()
}

/// f_1(q) = q^{k-2} (1-q) (1 - (1-m) q).
pub fn f1(q: f64, m: f64, k: u32) -> f64 {
    q.powi(k as i32 - 2) * (1.0 - q) * (1.0 - (1.0 - m) * q)
}

fn f1_max(m: f64, k: u32) -> (f64, f64) {
    let (q, v) = scan_minimize(|q| -f1(q, m, k), 0.0, 1.0, 65, 1e-14);
    (q, -v)
}

/// T_d(m) = √(k max_q f_1(q) / 2).
pub fn t_dynamic(m: f64, k: u32) -> f64 {
    (k as f64 * f1_max(m, k).1 / 2.0).sqrt()
}

/// Largest root of f_1(q1) = 2T²/k.
pub fn solve_q1_star(beta: f64, m: f64, k: u32) -> Result<f64> {
    let t = 1.0 / beta;
    let target = 2.0 * t * t / k as f64;
    let (qm, fm) = f1_max(m, k);
    if target > fm {
        return Err(Error::NoSolution(format!("T = {t} above T_d(m = {m})")));
    }
    if target == fm {
        return Ok(qm);
    }
    find_root(|q| f1(q, m, k) - target, qm, 1.0, 1e-15)
}

/// m(T): smallest m with T_d(m) >= T, or None above T_d(1).
pub fn m_lower(t: f64, k: u32) -> Option<f64> {
    if t > t_dynamic(1.0, k) {
        return None;
    }
    if t <= t_dynamic(0.0, k) {
        return Some(0.0);
    }
    find_root(|m| t_dynamic(m, k) - t, 0.0, 1.0, 1e-14).ok()
}

/// g(m) = Ψ_1RSB(q1*(β,m), m) - β²/4.
pub fn g_of_m(m: f64, t: f64, k: u32) -> Result<f64> {
    let beta = 1.0 / t;
    let q1 = solve_q1_star(beta, m, k)?;
    Ok(psi_1rsb(q1, m, beta, k) - beta * beta / 4.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MStar {
    pub m: f64,
    pub q1: f64,
    pub psi: f64,
}

pub fn m_star(t: f64, k: u32) -> Result<MStar> {
    if !(t > 0.0) {
        return Err(invalid("temperature must be positive"));
    }
    let beta = 1.0 / t;
    let rs = beta * beta / 4.0;
    let Some(ml) = m_lower(t, k) else {
        return Ok(MStar {
            m: 1.0,
            q1: 0.0,
            psi: rs,
        });
    };
    let lo = (ml + 1e-6).min(1.0);
    let g = |m: f64| g_of_m(m, t, k).unwrap_or(f64::INFINITY);
    let (m, gv) = scan_minimize(g, lo, 1.0, 64, 1e-13);
    if gv >= -1e-14 || m >= 1.0 {
        let q1 = solve_q1_star(beta, 1.0, k)?;
        return Ok(MStar { m: 1.0, q1, psi: rs });
    }
    let q1 = solve_q1_star(beta, m, k)?;
    Ok(MStar { m, q1, psi: rs + gv })
}

/// Slope of g at m = 1 (envelope in q1): β²q^k/4 + q/2 + ½log(1-q).
fn dg_at_one(t: f64, k: u32) -> f64 {
    let beta = 1.0 / t;
    match solve_q1_star(beta, 1.0, k) {
        Ok(q) => beta * beta / 4.0 * q.powi(k as i32) + q / 2.0 + 0.5 * (1.0 - q).ln(),
        Err(_) => -1.0,
    }
}

/// Static transition T_s: below it the 1RSB minimum over m is negative.
pub fn t_static(k: u32) -> Result<f64> {
    if k < 3 {
        return Err(domain("static transition defined for k >= 3"));
    }
    let td = t_dynamic(1.0, k);
    // scan down from T_d for the sign change of g'(1)
    let n = 400;
    let mut prev = td * (1.0 - 1e-9);
    let mut fprev = dg_at_one(prev, k);
    for i in 1..n {
        let t = td * (1.0 - i as f64 / n as f64);
        let ft = dg_at_one(t, k);
        if ft > 0.0 && fprev <= 0.0 {
            return find_root(|x| dg_at_one(x, k), t, prev, DEFAULT_TOL);
        }
        prev = t;
        fprev = ft;
    }
    Err(Error::NoSolution("no static transition found".into()))
}

// ---------------------------------------------------------------------------
// Zero temperature

pub fn z_star(mu: f64, k: u32) -> f64 {
    (2.0 / k as f64 + mu * mu / 4.0).sqrt() - mu / 2.0
}

pub fn e_1rsb(mu: f64, k: u32) -> f64 {
    let z = z_star(mu, k);
    0.25 * (mu + k as f64 * z) + (1.0 + mu / z).ln() / (2.0 * mu)
}

/// Energy of the states selected at Parisi parameter μ: d(μ e)/dμ.
pub fn eps_of_mu(mu: f64, k: u32) -> f64 {
    0.5 * mu + 0.5 * k as f64 * z_star(mu, k)
}

/// Zero-temperature complexity -μ² e'(μ) (closed form).
pub fn sigma0_of_mu(mu: f64, k: u32) -> f64 {
    mu * e_1rsb(mu, k) - mu * eps_of_mu(mu, k)
}

/// (μ*, e*) minimising e_1RSB.
pub fn gs_energy_1rsb(k: u32) -> Result<(f64, f64)> {
    if k < 3 {
        return Err(domain("ground state energy tabulated for k >= 3"));
    }
    Ok(scan_minimize(|mu| e_1rsb(mu, k), 1e-3, 20.0, 200, 1e-13))
}

// ---------------------------------------------------------------------------
// Monasson construction

fn m_psi(m: f64, t: f64, k: u32) -> Result<f64> {
    let beta = 1.0 / t;
    let q1 = solve_q1_star(beta, m, k)?;
    Ok(m * psi_1rsb(q1, m, beta, k))
}

/// f(m) = d[mΨ]/dm (centered, step 1e-5) and Σ(m) = mΨ - m f.
pub fn monasson_point(m: f64, t: f64, k: u32) -> Result<(f64, f64)> {
    let hstep = 1e-5;
    let up = m_psi((m + hstep).min(1.0), t, k)?;
    let dn = m_psi(m - hstep, t, k)?;
    let span = (m + hstep).min(1.0) - (m - hstep);
    let f = (up - dn) / span;
    let mp = m_psi(m, t, k)?;
    Ok((f, mp - m * f))
}

/// Monasson curve on the physical branch: samples are taken in decreasing m
/// from the largest grid value and the branch ends where f(m) stops being
/// monotone (the threshold states) or at m(T).
pub fn monasson_curve(t: f64, k: u32, m_grid: &[f64]) -> Result<ComplexityCurve> {
    let ml = m_lower(t, k).ok_or_else(|| Error::NoSolution(format!("T = {t} above T_d(1)")))?;
    let mut ms: Vec<f64> = m_grid.to_vec();
    for &m in &ms {
        if !(m > ml && m <= 1.0) {
            return Err(invalid(format!("m = {m} outside (m(T) = {ml}, 1]")));
        }
    }
    ms.sort_by(|a, b| b.total_cmp(a));
    ms.dedup();
    let mut rows: Vec<(f64, f64, f64)> = Vec::with_capacity(ms.len());
    for &m in &ms {
        let (f, s) = monasson_point(m, t, k)?;
        if rows.len() >= 2 {
            let last = rows[rows.len() - 1].1;
            let dir = last - rows[rows.len() - 2].1;
            if (f - last) * dir <= 0.0 {
                break;
            }
        }
        rows.push((m, f, s));
    }
    rows.sort_by(|a, b| a.1.total_cmp(&b.1));
    Ok(ComplexityCurve {
        samples: rows.iter().map(|r| (r.1, r.2)).collect(),
        m: rows.iter().map(|r| r.0).collect(),
        temperature: t,
    })
}

/// (f_s, f_d, f_*): f where Σ = 0, f at the smallest sampled m, and the
/// maximiser of f + Σ over [f_s, f_d].
pub fn extract_fs_fd_fstar(curve: &ComplexityCurve) -> (f64, f64, f64) {
    let s = &curve.samples;
    let i_d = curve
        .m
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let f_d = s[i_d].0;
    let mut f_s = f64::NAN;
    for w in s.windows(2) {
        let ((fa, sa), (fb, sb)) = (w[0], w[1]);
        if sa == 0.0 {
            f_s = fa;
            break;
        }
        if sa * sb < 0.0 {
            f_s = fa + (fb - fa) * sa / (sa - sb);
            break;
        }
    }
    let (flo, fhi) = if f_s.is_nan() {
        (f64::NEG_INFINITY, f64::INFINITY)
    } else {
        (f_s.min(f_d), f_s.max(f_d))
    };
    let f_star = s
        .iter()
        .filter(|(f, sg)| *f >= flo && *f <= fhi && *sg >= 0.0)
        .max_by(|a, b| (a.0 + a.1).total_cmp(&(b.0 + b.1)))
        .map(|p| p.0)
        .unwrap_or(f_d);
    (f_s, f_d, f_star)
}

/// Energy of states ∂_βΨ_1RSB at fixed (q1, m) and complexity Σ at the
/// m where that energy equals `eps`.
pub fn sigma_at_energy(eps: f64, t: f64, k: u32) -> Result<(f64, f64)> {
    let beta = 1.0 / t;
    let ml = m_lower(t, k).ok_or_else(|| Error::NoSolution("T above T_d(1)".into()))?;
    let energy = |m: f64| -> f64 {
        match solve_q1_star(beta, m, k) {
            Ok(q1) => beta / 2.0 * (1.0 - (1.0 - m) * q1.powi(k as i32)),
            Err(_) => f64::NAN,
        }
    };
    // the physical branch starts at the threshold, where the state energy
    // is smallest, and rises towards the ground state as m grows
    let hi = (ml + 40.0 * t).min(1.0);
    let (m_d, e_d) = scan_minimize(energy, ml + 1e-9, hi, 400, 1e-14);
    if eps < e_d {
        return Err(Error::NoSolution(format!(
            "energy {eps} below threshold {e_d} at T = {t}"
        )));
    }
    let root = find_root(|x| energy(x) - eps, m_d, hi, 1e-15)
        .map_err(|_| Error::NoSolution(format!("energy {eps} not reached at T = {t}")))?;
    let (_, sigma) = monasson_point(root, t, k)?;
    Ok((root, sigma))
}

/// Threshold Parisi parameter at temperature t: the m minimising the state
/// energy, where the physical branch ends.
pub fn m_threshold(t: f64, k: u32) -> Result<f64> {
    let beta = 1.0 / t;
    let ml = m_lower(t, k).ok_or_else(|| Error::NoSolution("T above T_d(1)".into()))?;
    let energy = |m: f64| -> f64 {
        match solve_q1_star(beta, m, k) {
            Ok(q1) => beta / 2.0 * (1.0 - (1.0 - m) * q1.powi(k as i32)),
            Err(_) => f64::INFINITY,
        }
    };
    let hi = (ml + 40.0 * t).min(1.0);
    Ok(scan_minimize(energy, ml + 1e-9, hi, 400, 1e-14).0)
}

/// Zero-temperature complexity at energy `eps` by Richardson extrapolation
/// over temperatures t, t/2, ..., t/2^{levels-1} (corrections are a power
/// series in T at fixed state energy).
pub fn sigma_zero_t(eps: f64, t: f64, k: u32, levels: usize) -> Result<f64> {
    let levels = levels.max(1);
    let mut row: Vec<f64> = (0..levels)
        .map(|i| sigma_at_energy(eps, t / 2f64.powi(i as i32), k).map(|r| r.1))
        .collect::<Result<_>>()?;
    for order in 1..levels {
        let f = 2f64.powi(order as i32);
        row = row.windows(2).map(|w| (f * w[1] - w[0]) / (f - 1.0)).collect();
    }
    Ok(row[0])
}
