use serde::{Deserialize, Serialize};

use super::krsb::RsbLadder;
use super::log2cosh;
use super::rs::sk_min_psi_rs;
use crate::error::{invalid, Error, Result};
use crate::numerics::{hermite_cached, minimize_scalar, RngStream};
use crate::par;
use rand::Rng;

/// Ground-state constant of the SK model.
pub const P_STAR: f64 = 0.763166726567;

/// Overlap law Σ w_l δ_{q_l}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParisiMeasure {
    pub atoms: Vec<(f64, f64)>,
}

impl ParisiMeasure {
    pub fn new(atoms: Vec<(f64, f64)>) -> Result<Self> {
        let m = ParisiMeasure { atoms };
        m.validate()?;
        Ok(m)
    }

    pub fn delta(q: f64) -> Result<Self> {
        Self::new(vec![(q, 1.0)])
    }

    pub fn validate(&self) -> Result<()> {
        if self.atoms.is_empty() {
            return Err(invalid("measure needs at least one atom"));
        }
        if !self.atoms.iter().all(|&(q, w)| (0.0..=1.0).contains(&q) && w > 0.0) {
            return Err(invalid("atoms need locations in [0, 1] and positive weights"));
        }
        if !self.atoms.windows(2).all(|a| a[0].0 < a[1].0) {
            return Err(invalid("atom locations must be strictly increasing"));
        }
        let total: f64 = self.atoms.iter().map(|a| a.1).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(invalid(format!("weights sum to {total}, expected 1")));
        }
        Ok(())
    }

    /// Equivalent kRSB ladder with m_l = ρ([0, q_l]).
    pub fn to_ladder(&self) -> RsbLadder {
        let q = self.atoms.iter().map(|a| a.0).collect();
        let mut acc = 0.0;
        let mut m: Vec<f64> = self
            .atoms
            .iter()
            .map(|a| {
                acc += a.1;
                acc.min(1.0)
            })
            .collect();
        *m.last_mut().expect("non-empty") = 1.0;
        RsbLadder { q, m }
    }

    /// ∫ q² ρ(dq).
    pub fn second_moment(&self) -> f64 {
        self.atoms.iter().map(|(q, w)| w * q * q).sum()
    }
}

/// Symmetric spatial grid [-x_max, x_max] with nx points (nx odd).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PdeGrid {
    pub x_max: f64,
    pub nx: usize,
}

impl PdeGrid {
    pub const MIN_NX: usize = 129;

    pub fn new(x_max: f64, nx: usize) -> Result<Self> {
        if nx < Self::MIN_NX || nx.is_multiple_of(2) {
            return Err(Error::Grid(format!("nx must be odd and >= {}, got {nx}", Self::MIN_NX)));
        }
        if !(x_max.is_finite() && x_max > 0.0) {
            return Err(Error::Grid(format!("x_max must be positive, got {x_max}")));
        }
        Ok(PdeGrid { x_max, nx })
    }

    /// x_max = 10 + 4β and spacing at most 0.7/β (nx ≥ 1025).
    pub fn for_beta(beta: f64) -> Self {
        let x_max = 10.0 + 4.0 * beta;
        let half = ((x_max * beta / 0.7).ceil() as usize).max(512);
        PdeGrid {
            x_max,
            nx: 2 * half + 1,
        }
    }

    fn check(&self, beta: f64) -> Result<()> {
        Self::new(self.x_max, self.nx)?;
        if self.x_max < 10.0 + 4.0 * beta - 1e-12 {
            return Err(Error::Grid(format!(
                "x_max = {} is below 10 + 4β = {}",
                self.x_max,
                10.0 + 4.0 * beta
            )));
        }
        if self.x_max < 6.0 {
            return Err(Error::Grid("grid does not contain 6σ of the total smoothing".into()));
        }
        Ok(())
    }
}

/// Half-grid solver state: Φ at x_j = j h, j = 0..=n, extended evenly and
/// by the asymptote Φ_n + β(|x| - x_max) outside.
struct Sweep {
    beta: f64,
    h: f64,
    phi: Vec<f64>,
}

impl Sweep {
    fn n(&self) -> usize {
        self.phi.len() - 1
    }

    fn ext(&self, j: isize) -> f64 {
        let a = j.unsigned_abs();
        let n = self.n();
        if a <= n {
            self.phi[a]
        } else {
            self.phi[n] + self.beta * (a - n) as f64 * self.h
        }
    }

    /// Φ at an arbitrary point by 4-point Lagrange interpolation.
    fn interp(&self, x: f64) -> f64 {
        let p = x / self.h;
        let j0 = p.floor();
        let f = p - j0;
        let j = j0 as isize;
        let (a, b, c, d) = (self.ext(j - 1), self.ext(j), self.ext(j + 1), self.ext(j + 2));
        -f * (f - 1.0) * (f - 2.0) / 6.0 * a + (f + 1.0) * (f - 1.0) * (f - 2.0) / 2.0 * b
            - (f + 1.0) * f * (f - 2.0) / 2.0 * c
            + (f + 1.0) * f * (f - 1.0) / 6.0 * d
    }

    /// Φ(x) <- (1/m) log E exp(m Φ(x + s G)); plain average when m = 0.
    fn convolve(&mut self, var: f64, m: f64) -> Result<()> {
        if var <= 0.0 {
            return Ok(());
        }
        let s = var.sqrt();
        let h = self.h;
        let n = self.n();
        let beta = self.beta;
        let heat = m <= 1e-12;
        let next: Vec<f64> = if s >= 3.0 * h {
            let t_max = (10.0 * s / h).ceil() as isize;
            let norm = h / (s * (2.0 * std::f64::consts::PI).sqrt());
            let kern: Vec<f64> = (-t_max..=t_max)
                .map(|t| {
                    let d = t as f64 * h;
                    norm * (-0.5 * d * d / var).exp()
                })
                .collect();
            if heat {
                par::map_indices(n + 1, |i| {
                    let i = i as isize;
                    (-t_max..=t_max)
                        .map(|t| kern[(t + t_max) as usize] * self.ext(i + t))
                        .sum()
                })
            } else {
                // factor e^{mβ|x|}: u_j = exp(m(Φ_j - β x_j))
                let len = n + t_max as usize + 1;
                let u: Vec<f64> = (0..len)
                    .map(|j| (m * (self.ext(j as isize) - beta * j as f64 * h)).exp())
                    .collect();
                let shifted: Vec<f64> = (-t_max..=t_max)
                    .map(|t| kern[(t + t_max) as usize] * (m * beta * t as f64 * h).exp())
                    .collect();
                par::map_indices(n + 1, |i| {
                    let ii = i as isize;
                    let mut acc = 0.0;
                    for t in -t_max..=t_max {
                        let j = ii + t;
                        let idx = (t + t_max) as usize;
                        if j >= 0 {
                            acc += shifted[idx] * u[j as usize];
                        } else {
                            let a = (-j) as usize;
                            let e = m * beta * (a as f64 - i as f64) * h;
                            acc += kern[idx] * e.exp() * u[a];
                        }
                    }
                    beta * i as f64 * h + acc.ln() / m
                })
            }
        } else {
            let rule = hermite_cached(20)?;
            par::map_indices(n + 1, |i| {
                let x = i as f64 * h;
                if heat {
                    rule.apply(|g| self.interp(x + s * g))
                } else {
                    let c = self.phi[i];
                    c + rule.apply(|g| (m * (self.interp(x + s * g) - c)).exp()).ln() / m
                }
            })
        };
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::Grid("non-finite value in the Parisi sweep".into()));
        }
        self.phi = next;
        Ok(())
    }
}

/// Φ(0, 0) for atoms at `locs` with exponent `cum[l]` on [q_l, q_{l+1});
/// the last exponent must be 1. Equal locations and repeated exponents are
/// allowed.
fn phi_core(locs: &[f64], cum: &[f64], beta: f64, grid: &PdeGrid) -> Result<f64> {
    let half = (grid.nx - 1) / 2;
    let h = grid.x_max / half as f64;
    let last = *locs.last().expect("non-empty");
    let shift = 0.5 * beta * beta * (1.0 - last);
    let mut sw = Sweep {
        beta,
        h,
        phi: (0..=half).map(|j| log2cosh(beta * j as f64 * h) + shift).collect(),
    };
    for l in (0..locs.len() - 1).rev() {
        sw.convolve(locs[l + 1] - locs[l], cum[l])?;
    }
    sw.convolve(locs[0], 0.0)?;
    Ok(sw.phi[0])
}

fn functional_core(locs: &[f64], cum: &[f64], beta: f64, grid: &PdeGrid) -> Result<f64> {
    let phi = phi_core(locs, cum, beta, grid)?;
    let mut prev = 0.0;
    let mut mom = 0.0;
    for (&q, &c) in locs.iter().zip(cum) {
        mom += (c - prev) * q * q;
        prev = c;
    }
    Ok(-0.25 * beta * beta + 0.25 * beta * beta * mom + phi)
}

/// Φ(0, 0; ρ) from the backward Cole-Hopf sweep.
pub fn parisi_phi(measure: &ParisiMeasure, beta: f64, grid: &PdeGrid) -> Result<f64> {
    measure.validate()?;
    check_beta(beta)?;
    grid.check(beta)?;
    let l = measure.to_ladder();
    phi_core(&l.q, &l.m, beta, grid)
}

/// 𝒫(ρ) = -β²/4 + β²/4 ∫ q² ρ(dq) + Φ(0, 0; ρ).
pub fn parisi_functional(measure: &ParisiMeasure, beta: f64, grid: &PdeGrid) -> Result<f64> {
    let phi = parisi_phi(measure, beta, grid)?;
    Ok(-0.25 * beta * beta + 0.25 * beta * beta * measure.second_moment() + phi)
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(invalid(format!("beta must be finite and non-negative, got {beta}")));
    }
    Ok(())
}

const STARTS: usize = 8;
const SCREEN_SWEEPS: usize = 4;
const KEEP: usize = 2;
const MAX_SWEEPS: usize = 60;

#[derive(Clone)]
struct Candidate {
    locs: Vec<f64>,
    cum: Vec<f64>,
    steps: Vec<f64>,
    value: f64,
}

impl Candidate {
    fn new(locs: Vec<f64>, cum: Vec<f64>) -> Self {
        let n = locs.len() + cum.len() - 1;
        Candidate {
            locs,
            cum,
            steps: vec![0.05; n],
            value: f64::INFINITY,
        }
    }
}

/// Golden-section search on a window of half-width `step` around the
/// current coordinate; returns the new point, its value and the next step.
fn local_line<F: FnMut(f64) -> f64>(mut f: F, x0: f64, f0: f64, lo: f64, hi: f64, step: f64) -> (f64, f64, f64) {
    let a = (x0 - step).max(lo);
    let b = (x0 + step).min(hi);
    if b <= a {
        return (x0, f0, step);
    }
    let (x, v) = minimize_scalar(&mut f, a, b, (step * 1e-3).max(1e-9));
    if v >= f0 {
        return (x0, f0, (step * 0.25).max(1e-7));
    }
    let at_edge = ((x - a).abs() < step * 1e-2 && a > lo) || ((b - x).abs() < step * 1e-2 && b < hi);
    let next = if at_edge {
        step * 4.0
    } else {
        (4.0 * (x - x0).abs()).max(1e-7)
    };
    (x, v, next.min(0.5))
}

fn sweep(c: &mut Candidate, beta: f64, grid: &PdeGrid) {
    let k = c.locs.len();
    let eval = |locs: &[f64], cum: &[f64]| functional_core(locs, cum, beta, grid).unwrap_or(f64::INFINITY);
    for l in 0..k {
        let lo = if l == 0 { 0.0 } else { c.locs[l - 1] };
        let hi = if l + 1 == k { 1.0 } else { c.locs[l + 1] };
        let mut trial = c.locs.clone();
        let (x, v, st) = local_line(
            |x| {
                trial[l] = x;
                eval(&trial, &c.cum)
            },
            c.locs[l],
            c.value,
            lo,
            hi,
            c.steps[l],
        );
        c.locs[l] = x;
        c.value = v;
        c.steps[l] = st;
    }
    for l in 0..k - 1 {
        let lo = if l == 0 { 0.0 } else { c.cum[l - 1] };
        let hi = c.cum[l + 1];
        let mut trial = c.cum.clone();
        let (x, v, st) = local_line(
            |x| {
                trial[l] = x;
                eval(&c.locs, &trial)
            },
            c.cum[l],
            c.value,
            lo,
            hi,
            c.steps[k + l],
        );
        c.cum[l] = x;
        c.value = v;
        c.steps[k + l] = st;
    }
}

fn coordinate_descent(mut c: Candidate, beta: f64, grid: &PdeGrid, sweeps: usize) -> Result<Candidate> {
    if !c.value.is_finite() {
        c.value = functional_core(&c.locs, &c.cum, beta, grid)?;
    }
    for _ in 0..sweeps {
        let before = c.value;
        sweep(&mut c, beta, grid);
        if before - c.value < 1e-11 && c.steps.iter().all(|s| *s < 1e-4) {
            break;
        }
    }
    Ok(c)
}

/// Minimizes 𝒫 over measures with `k` atoms by multi-start coordinate
/// descent; `warm`, if given, seeds the first start (split into k atoms).
pub fn minimize_parisi_from(
    k: usize,
    beta: f64,
    grid: &PdeGrid,
    warm: Option<&ParisiMeasure>,
) -> Result<(ParisiMeasure, f64)> {
    if !(1..=3).contains(&k) {
        return Err(invalid(format!("minimize_parisi supports 1 to 3 atoms, got {k}")));
    }
    if !(beta.is_finite() && beta > 0.0) {
        return Err(invalid(format!("beta must be positive, got {beta}")));
    }
    grid.check(beta)?;
    let first = match warm {
        Some(m) => split_to(m, k),
        None => {
            let (q, _) = sk_min_psi_rs(beta)?;
            (vec![q; k], uniform_cum(k))
        }
    };
    let rng = RngStream::new(0x5eed, k as u64);
    let mut starts = vec![first];
    starts.push(((1..=k).map(|l| l as f64 / (k + 1) as f64).collect(), uniform_cum(k)));
    for s in 2..STARTS {
        let mut r = rng.substream(s as u64).rng();
        let mut locs: Vec<f64> = (0..k).map(|_| r.random::<f64>()).collect();
        let mut cum: Vec<f64> = (0..k).map(|_| r.random::<f64>()).collect();
        locs.sort_by(|a, b| a.total_cmp(b));
        cum.sort_by(|a, b| a.total_cmp(b));
        cum[k - 1] = 1.0;
        starts.push((locs, cum));
    }
    let screened = par::map_slice(&starts, |(locs, cum)| {
        coordinate_descent(Candidate::new(locs.clone(), cum.clone()), beta, grid, SCREEN_SWEEPS)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let mut order: Vec<usize> = (0..screened.len()).collect();
    order.sort_by(|&a, &b| screened[a].value.total_cmp(&screened[b].value));
    let keep: Vec<Candidate> = order.iter().take(KEEP).map(|&i| screened[i].clone()).collect();
    let refined = par::map_slice(&keep, |c| coordinate_descent(c.clone(), beta, grid, MAX_SWEEPS));
    let mut best: Option<Candidate> = None;
    for r in refined {
        let r = r?;
        if best.as_ref().is_none_or(|b| r.value < b.value) {
            best = Some(r);
        }
    }
    let best = best.expect("at least one start");
    let measure = RsbLadder {
        q: best.locs,
        m: best.cum,
    }
    .to_measure()?;
    Ok((measure, best.value))
}

fn uniform_cum(k: usize) -> Vec<f64> {
    (1..=k).map(|l| l as f64 / k as f64).collect()
}

/// Splits the heaviest atoms of `m` until it has k (possibly coincident) atoms.
fn split_to(m: &ParisiMeasure, k: usize) -> (Vec<f64>, Vec<f64>) {
    let mut atoms = m.atoms.clone();
    atoms.truncate(k);
    while atoms.len() < k {
        let (i, _) = atoms
            .iter()
            .enumerate()
            .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
            .expect("non-empty");
        let (q, w) = atoms[i];
        atoms[i] = (q, 0.5 * w);
        atoms.insert(i + 1, (q, 0.5 * w));
    }
    let total: f64 = atoms.iter().map(|a| a.1).sum();
    let mut acc = 0.0;
    let cum = atoms
        .iter()
        .map(|a| {
            acc += a.1 / total;
            acc.min(1.0)
        })
        .collect::<Vec<_>>();
    let mut cum = cum;
    cum[k - 1] = 1.0;
    (atoms.iter().map(|a| a.0).collect(), cum)
}

/// Optima for 1, 2, …, k atoms, each warm-started from the previous one so
/// the values are non-increasing.
pub fn minimize_parisi_chain(k: usize, beta: f64, grid: &PdeGrid) -> Result<Vec<(ParisiMeasure, f64)>> {
    if !(1..=3).contains(&k) {
        return Err(invalid(format!("minimize_parisi supports 1 to 3 atoms, got {k}")));
    }
    let mut out = vec![minimize_parisi_from(1, beta, grid, None)?];
    for j in 2..=k {
        let prev = out.last().expect("non-empty").clone();
        let next = minimize_parisi_from(j, beta, grid, Some(&prev.0))?;
        out.push(if next.1 <= prev.1 { next } else { prev });
    }
    Ok(out)
}

/// Minimizes 𝒫 over measures with at most k atoms.
pub fn minimize_parisi(k: usize, beta: f64, grid: &PdeGrid) -> Result<(ParisiMeasure, f64)> {
    Ok(minimize_parisi_chain(k, beta, grid)?.pop().expect("non-empty"))
}

/// 𝒫*/β at each β and its linear extrapolation in 1/β.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PStarFit {
    pub betas: Vec<f64>,
    /// 𝒫*/β with k atoms at each β
    pub per_beta: Vec<f64>,
    /// 𝒫* for 1..=k atoms at each β
    pub by_atoms: Vec<Vec<f64>>,
    pub p_star: f64,
    pub slope: f64,
}

pub fn p_star_extrapolate(betas: &[f64], k: usize) -> Result<PStarFit> {
    if betas.len() < 2 {
        return Err(invalid("extrapolation needs at least two temperatures"));
    }
    let by_atoms = betas
        .iter()
        .map(|&b| {
            minimize_parisi_chain(k, b, &PdeGrid::for_beta(b)).map(|c| c.into_iter().map(|r| r.1).collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    let per_beta: Vec<f64> = by_atoms.iter().zip(betas).map(|(v, b)| v[v.len() - 1] / b).collect();
    let xs: Vec<f64> = betas.iter().map(|b| 1.0 / b).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = per_beta.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&per_beta).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    Ok(PStarFit {
        betas: betas.to_vec(),
        per_beta,
        by_atoms,
        p_star: my - slope * mx,
        slope,
    })
}
