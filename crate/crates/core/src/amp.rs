//! Spiked Wigner model, approximate message passing and state evolution.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::numerics::{gaussian_rule, goe_sample, mean_and_se, RngStream};
use crate::par;

/// Y = (λ/n) x0 x0ᵀ + W with W ~ GOE(n).
#[derive(Debug, Clone)]
pub struct SpikedInstance {
    pub n: usize,
    pub lambda: f64,
    pub x0: Vec<f64>,
    pub y: DMatrix<f64>,
}

pub fn sample_instance(n: usize, lambda: f64, rng: &RngStream) -> Result<SpikedInstance> {
    if n < 2 {
        return Err(invalid(format!("instance needs n >= 2, got {n}")));
    }
    if !lambda.is_finite() {
        return Err(invalid("lambda must be finite"));
    }
    let x0 = rng.substream(0).signs(n);
    let mut y = goe_sample(n, &rng.substream(1))?;
    if lambda != 0.0 {
        let c = lambda / n as f64;
        for j in 0..n {
            for i in 0..n {
                y[(i, j)] += c * x0[i] * x0[j];
            }
        }
    }
    Ok(SpikedInstance { n, lambda, x0, y })
}

/// Iterate x^{(t)} with the stored f_{t-1}(x^{(t-1)}) and Onsager coefficient
/// d_{t-1} used to produce it.
#[derive(Debug, Clone, PartialEq)]
pub struct AmpState {
    pub t: usize,
    pub x: Vec<f64>,
    pub x_prev: Vec<f64>,
    pub f_prev: Vec<f64>,
    pub onsager: f64,
}

impl AmpState {
    pub fn new(x0: Vec<f64>) -> Self {
        let n = x0.len();
        AmpState {
            t: 0,
            x: x0,
            x_prev: vec![0.0; n],
            f_prev: vec![0.0; n],
            onsager: 0.0,
        }
    }
}

/// Non-linearities of the form f_t(y) = tanh(c_t y).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum NonlinearitySchedule {
    /// c_0 = ε (posterior mean from side information), c_t = λ afterwards.
    Bayes { lambda: f64, eps: f64 },
    /// c_t = scale for every t.
    Tanh { scale: f64 },
}

impl NonlinearitySchedule {
    pub fn scale(&self, t: usize) -> f64 {
        match *self {
            NonlinearitySchedule::Bayes { lambda, eps } => {
                if t == 0 {
                    eps
                } else {
                    lambda
                }
            }
            NonlinearitySchedule::Tanh { scale } => scale,
        }
    }

    pub fn f(&self, t: usize, y: f64) -> f64 {
        (self.scale(t) * y).tanh()
    }

    pub fn df(&self, t: usize, y: f64) -> f64 {
        let c = self.scale(t);
        let th = (c * y).tanh();
        c * (1.0 - th * th)
    }
}

/// x^{(t+1)} = Y f_t(x^{(t)}) - d_t f_{t-1}(x^{(t-1)}), d_t = mean f'_t(x^{(t)}).
/// With `correct = false` the memory term is dropped.
pub fn amp_step_with<F, D>(state: &AmpState, y: &DMatrix<f64>, f: F, df: D, correct: bool) -> Result<AmpState>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let n = state.x.len();
    if y.nrows() != n || y.ncols() != n || state.f_prev.len() != n {
        return Err(invalid(format!(
            "dimension mismatch: state has {n} entries, matrix is {}x{}",
            y.nrows(),
            y.ncols()
        )));
    }
    let fx: Vec<f64> = state.x.iter().map(|&v| f(v)).collect();
    let d = state.x.iter().map(|&v| df(v)).sum::<f64>() / n as f64;
    let mut next = vec![0.0; n];
    par::sym_matvec(y.as_slice(), n, &fx, &mut next);
    if correct && state.t > 0 {
        for (o, p) in next.iter_mut().zip(&state.f_prev) {
            *o -= d * p;
        }
    }
    Ok(AmpState {
        t: state.t + 1,
        x_prev: state.x.clone(),
        x: next,
        f_prev: fx,
        onsager: if state.t > 0 { d } else { 0.0 },
    })
}

pub fn amp_step<F, D>(state: &AmpState, y: &DMatrix<f64>, f: F, df: D) -> Result<AmpState>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    amp_step_with(state, y, f, df, true)
}

/// Per-iteration empirical summaries of one AMP run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmpRecord {
    pub t: usize,
    /// (1/n)⟨x0, x^{(t)}⟩
    pub overlap: f64,
    /// (1/n)‖x^{(t)}‖²
    pub sqnorm: f64,
    /// (1/n)⟨x0, f_t(x^{(t)})⟩
    pub estimate_overlap: f64,
    /// (1/n)‖f_t(x^{(t)})‖²
    pub estimate_sqnorm: f64,
    /// (1/n) Σ tanh²(λ x_i^{(t)})
    pub tanh2: f64,
}

fn record(t: usize, x: &[f64], x0: &[f64], sched: &NonlinearitySchedule, lambda: f64) -> AmpRecord {
    let n = x.len() as f64;
    let mut r = AmpRecord {
        t,
        overlap: 0.0,
        sqnorm: 0.0,
        estimate_overlap: 0.0,
        estimate_sqnorm: 0.0,
        tanh2: 0.0,
    };
    for (&v, &s) in x.iter().zip(x0) {
        let fv = sched.f(t, v);
        r.tanh2 += (lambda * v).tanh().powi(2);
        r.overlap += s * v;
        r.sqnorm += v * v;
        r.estimate_overlap += s * fv;
        r.estimate_sqnorm += fv * fv;
    }
    r.overlap /= n;
    r.sqnorm /= n;
    r.estimate_overlap /= n;
    r.estimate_sqnorm /= n;
    r.tanh2 /= n;
    r
}

/// Runs `iters` AMP steps from x^{(0)} with the given schedule, recording
/// t = 0..=iters.
pub fn run_amp(
    inst: &SpikedInstance,
    init: Vec<f64>,
    sched: &NonlinearitySchedule,
    iters: usize,
    correct: bool,
) -> Result<(AmpState, Vec<AmpRecord>)> {
    if init.len() != inst.n {
        return Err(invalid("initial iterate has the wrong length"));
    }
    let mut state = AmpState::new(init);
    let mut recs = vec![record(0, &state.x, &inst.x0, sched, inst.lambda)];
    for t in 0..iters {
        state = amp_step_with(&state, &inst.y, |v| sched.f(t, v), |v| sched.df(t, v), correct)?;
        recs.push(record(t + 1, &state.x, &inst.x0, sched, inst.lambda));
    }
    Ok((state, recs))
}

/// x^{(0)} = ε x0 + g with g ~ N(0, I).
pub fn side_information(inst: &SpikedInstance, eps: f64, rng: &RngStream) -> Vec<f64> {
    let mut r = rng.rng();
    inst.x0
        .iter()
        .map(|&s| {
            let g: f64 = r.sample(StandardNormal);
            eps * s + g
        })
        .collect()
}

/// Bayes AMP, f_0(y) = tanh(εy) and f_t(y) = tanh(λy), from side information.
pub fn run_bayes_amp(
    inst: &SpikedInstance,
    eps: f64,
    iters: usize,
    rng: &RngStream,
) -> Result<(AmpState, Vec<AmpRecord>)> {
    if !(eps.is_finite() && eps >= 0.0) {
        return Err(invalid(format!("side-information strength must be >= 0, got {eps}")));
    }
    if iters == 0 {
        return Err(invalid("need at least one iteration"));
    }
    let sched = NonlinearitySchedule::Bayes {
        lambda: inst.lambda,
        eps,
    };
    run_amp(inst, side_information(inst, eps, rng), &sched, iters, true)
}

/// Spectral initialisation: √n times the top eigenvector of Y (power
/// iteration on Y + 3I). Not independent of W, so outside the validated
/// state-evolution regime.
pub fn spectral_init(inst: &SpikedInstance, iters: usize) -> Vec<f64> {
    let n = inst.n;
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + (i % 7) as f64 * 1e-3).collect();
    let mut w = vec![0.0; n];
    for _ in 0..iters {
        par::sym_matvec(inst.y.as_slice(), n, &v, &mut w);
        for (wi, vi) in w.iter_mut().zip(&v) {
            *wi += 3.0 * vi;
        }
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / norm * (n as f64).sqrt();
        }
    }
    v
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeTrajectory {
    pub entries: Vec<(f64, f64)>,
}

/// a_{t+1} = λ E f_t(a_t + √q_t G), q_{t+1} = E f_t(a_t + √q_t G)², for
/// odd f_t and X0 uniform on {±1}.
pub fn state_evolution(
    lambda: f64,
    sched: &NonlinearitySchedule,
    a0: f64,
    q0: f64,
    iters: usize,
) -> Result<SeTrajectory> {
    if !(q0 >= 0.0 && q0.is_finite() && a0.is_finite()) {
        return Err(invalid("state evolution needs finite a0 and q0 >= 0"));
    }
    let mut entries = vec![(a0, q0)];
    let (mut a, mut q) = (a0, q0);
    for t in 0..iters {
        let c = sched.scale(t);
        let sq = q.sqrt();
        let rule = gaussian_rule((c * sq).max(1.0));
        let (mut m1, mut m2) = (0.0, 0.0);
        for (g, w) in rule.pairs() {
            let v = (c * (a + sq * g)).tanh();
            m1 += w * v;
            m2 += w * v * v;
        }
        a = lambda * m1;
        q = m2;
        entries.push((a, q));
    }
    Ok(SeTrajectory { entries })
}

/// b_{t+1} = E tanh(λ² b_t + λ√b_t G); returns b_0..=b_T.
pub fn bayes_se(lambda: f64, b0: f64, iters: usize) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&b0) {
        return Err(invalid(format!("b0 must lie in [0, 1], got {b0}")));
    }
    let rule = gaussian_rule(lambda.abs().max(1.0));
    let mut out = vec![b0];
    let mut b = b0;
    for _ in 0..iters {
        let sb = b.sqrt();
        b = rule.apply(|g| (lambda * lambda * b + lambda * sb * g).tanh());
        out.push(b);
    }
    Ok(out)
}

/// SE prediction for E tanh²(λ(a + √q G)).
fn se_tanh2(lambda: f64, a: f64, q: f64) -> f64 {
    let sq = q.sqrt();
    gaussian_rule((lambda * sq).max(1.0)).apply(|g| (lambda * (a + sq * g)).tanh().powi(2))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeComparisonRow {
    pub t: usize,
    pub a_t: f64,
    pub q_t: f64,
    pub overlap: f64,
    pub overlap_se: f64,
    pub sqnorm: f64,
    pub sqnorm_se: f64,
    pub tanh2: f64,
    pub tanh2_se: f64,
    pub tanh2_pred: f64,
}

impl SeComparisonRow {
    pub fn overlap_dev(&self) -> f64 {
        (self.overlap - self.a_t).abs()
    }
    pub fn sqnorm_dev(&self) -> f64 {
        (self.sqnorm - (self.a_t * self.a_t + self.q_t)).abs()
    }
    pub fn tanh2_dev(&self) -> f64 {
        (self.tanh2 - self.tanh2_pred).abs()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeComparison {
    pub n: usize,
    pub lambda: f64,
    pub eps: f64,
    pub reps: usize,
    pub rows: Vec<SeComparisonRow>,
    /// mean over reps of the final estimator overlap (1/n)⟨x0, f_T(x^{(T)})⟩
    pub final_estimate_overlap: f64,
}

impl SeComparison {
    /// max_t of the three deviations.
    pub fn max_deviation(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.overlap_dev().max(r.sqnorm_dev()).max(r.tanh2_dev()))
            .fold(0.0, f64::max)
    }
}

/// Bayes AMP on `reps` fresh instances against state evolution started
/// from (a_0, q_0) = (ε, 1).
pub fn empirical_vs_se(
    n: usize,
    lambda: f64,
    eps: f64,
    iters: usize,
    reps: usize,
    rng: &RngStream,
) -> Result<SeComparison> {
    if n < 1000 {
        return Err(invalid(format!("comparison needs n >= 1000, got {n}")));
    }
    if reps == 0 {
        return Err(invalid("need at least one replicate"));
    }
    let sched = NonlinearitySchedule::Bayes { lambda, eps };
    let se = state_evolution(lambda, &sched, eps, 1.0, iters)?;
    let mut runs = Vec::with_capacity(reps);
    for r in 0..reps {
        let sub = rng.substream(r as u64);
        let inst = sample_instance(n, lambda, &sub.substream(0))?;
        let (_, recs) = run_bayes_amp(&inst, eps, iters, &sub.substream(1))?;
        runs.push(recs);
    }
    let mut rows = Vec::with_capacity(iters + 1);
    for t in 0..=iters {
        let ov: Vec<f64> = runs.iter().map(|r| r[t].overlap).collect();
        let sn: Vec<f64> = runs.iter().map(|r| r[t].sqnorm).collect();
        let th: Vec<f64> = runs.iter().map(|r| r[t].tanh2).collect();
        let (a_t, q_t) = se.entries[t];
        let (om, ose) = mean_and_se(&ov);
        let (sm, sse) = mean_and_se(&sn);
        let (tm, tse) = mean_and_se(&th);
        rows.push(SeComparisonRow {
            t,
            a_t,
            q_t,
            overlap: om,
            overlap_se: ose,
            sqnorm: sm,
            sqnorm_se: sse,
            tanh2: tm,
            tanh2_se: tse,
            tanh2_pred: se_tanh2(lambda, a_t, q_t),
        });
    }
    let finals: Vec<f64> = runs.iter().map(|r| r[iters].estimate_overlap).collect();
    Ok(SeComparison {
        n,
        lambda,
        eps,
        reps,
        rows,
        final_estimate_overlap: mean_and_se(&finals).0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OnsagerAblation {
    pub t: usize,
    pub se_sqnorm: f64,
    pub dev_corrected: f64,
    pub dev_uncorrected: f64,
}

impl OnsagerAblation {
    pub fn ratio(&self) -> f64 {
        self.dev_uncorrected / self.dev_corrected
    }
}

/// Pure-noise AMP with f = tanh from x^{(0)} = g, with and without the
/// Onsager term: mean over reps of |(1/n)‖x^{(t)}‖² - q_t|.
pub fn onsager_ablation(n: usize, t: usize, reps: usize, rng: &RngStream) -> Result<OnsagerAblation> {
    if reps == 0 || t == 0 {
        return Err(invalid("ablation needs reps >= 1 and t >= 1"));
    }
    let sched = NonlinearitySchedule::Tanh { scale: 1.0 };
    let se = state_evolution(0.0, &sched, 0.0, 1.0, t)?;
    let (a, q) = se.entries[t];
    let target = a * a + q;
    let (mut dc, mut du) = (0.0, 0.0);
    for r in 0..reps {
        let sub = rng.substream(r as u64);
        let inst = sample_instance(n, 0.0, &sub.substream(0))?;
        let init = side_information(&inst, 0.0, &sub.substream(1));
        let (_, rc) = run_amp(&inst, init.clone(), &sched, t, true)?;
        let (_, ru) = run_amp(&inst, init, &sched, t, false)?;
        dc += (rc[t].sqnorm - target).abs();
        du += (ru[t].sqnorm - target).abs();
    }
    Ok(OnsagerAblation {
        t,
        se_sqnorm: target,
        dev_corrected: dc / reps as f64,
        dev_uncorrected: du / reps as f64,
    })
}
