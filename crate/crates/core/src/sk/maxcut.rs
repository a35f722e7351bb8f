use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::parisi::P_STAR;
use crate::error::{invalid, Error, Result};
use crate::numerics::RngStream;

pub const BRUTE_FORCE_MAX_N: usize = 24;
const PAIRING_RETRIES: usize = 1000;

/// Simple undirected graph on vertices 0..n.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Builds a graph, normalising each edge to (min, max). Rejects loops,
    /// duplicates and out-of-range endpoints.
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(edges.len());
        let mut out = Vec::with_capacity(edges.len());
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(invalid(format!("edge ({u}, {v}) out of range for n = {n}")));
            }
            if u == v {
                return Err(invalid(format!("self-loop at vertex {u}")));
            }
            let e = (u.min(v), u.max(v));
            if !seen.insert(e) {
                return Err(invalid(format!("duplicate edge ({}, {})", e.0, e.1)));
            }
            out.push(e);
        }
        Ok(Graph { n, edges: out })
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        adj
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CutMethod {
    Brute,
    LocalSearch,
    Random,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutResult {
    pub assignment: Vec<i8>,
    pub cut_value: u64,
    pub method: CutMethod,
}

/// d/4 + P*·√(d/4): predicted max-cut per vertex for average degree d.
pub fn maxcut_prediction(d: f64) -> f64 {
    d / 4.0 + P_STAR * (d / 4.0).sqrt()
}

/// cut(σ) = ½ Σ_{ij} A_ij (1 - σ_iσ_j): the number of edges cut.
pub fn cut_value(g: &Graph, sigma: &[i8]) -> Result<u64> {
    if sigma.len() != g.n {
        return Err(invalid(format!(
            "assignment has length {}, graph has {} vertices",
            sigma.len(),
            g.n
        )));
    }
    if sigma.iter().any(|s| *s != 1 && *s != -1) {
        return Err(invalid("assignment entries must be ±1"));
    }
    Ok(g.edges.iter().filter(|&&(u, v)| sigma[u] != sigma[v]).count() as u64)
}

/// Exact maximum cut by Gray-code enumeration with σ_0 = +1. Ties go to
/// the lexicographically smallest assignment (−1 < +1).
pub fn maxcut_bruteforce(g: &Graph) -> Result<CutResult> {
    if g.n > BRUTE_FORCE_MAX_N {
        return Err(Error::Capability(format!(
            "brute force supports n <= {BRUTE_FORCE_MAX_N}, got {}",
            g.n
        )));
    }
    let mut sigma = vec![1i8; g.n];
    if g.n <= 1 {
        return Ok(CutResult {
            assignment: sigma,
            cut_value: 0,
            method: CutMethod::Brute,
        });
    }
    let adj = g.adjacency();
    let mut cut: i64 = 0;
    let mut best = 0i64;
    let mut best_sigma = sigma.clone();
    let free = g.n - 1;
    for step in 1u64..(1u64 << free) {
        let bit = step.trailing_zeros() as usize;
        let v = bit + 1;
        // flipping v changes the cut by (agreeing neighbours) - (disagreeing)
        let delta: i64 = adj[v].iter().map(|&u| if sigma[u] == sigma[v] { 1 } else { -1 }).sum();
        sigma[v] = -sigma[v];
        cut += delta;
        if cut > best || (cut == best && sigma < best_sigma) {
            best = cut;
            best_sigma.copy_from_slice(&sigma);
        }
    }
    Ok(CutResult {
        cut_value: best as u64,
        assignment: best_sigma,
        method: CutMethod::Brute,
    })
}

/// Uniformly random assignment.
pub fn maxcut_random(g: &Graph, rng: &RngStream) -> CutResult {
    let mut r = rng.rng();
    let assignment: Vec<i8> = (0..g.n).map(|_| if r.random::<bool>() { 1 } else { -1 }).collect();
    let cut_value = cut_value(g, &assignment).expect("valid assignment");
    CutResult {
        assignment,
        cut_value,
        method: CutMethod::Random,
    }
}

/// Steepest single-flip ascent from random starts; best of `restarts`.
pub fn maxcut_localsearch(g: &Graph, restarts: usize, rng: &RngStream) -> Result<CutResult> {
    if restarts == 0 {
        return Err(invalid("local search needs at least one restart"));
    }
    let adj = g.adjacency();
    let mut best: Option<CutResult> = None;
    for r in 0..restarts {
        let mut sigma = maxcut_random(g, &rng.substream(r as u64)).assignment;
        let gain = |s: &[i8], v: usize| -> i64 { adj[v].iter().map(|&u| if s[u] == s[v] { 1 } else { -1 }).sum() };
        loop {
            let (v, gv) = (0..g.n)
                .map(|v| (v, gain(&sigma, v)))
                .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
                .unwrap_or((0, 0));
            if gv <= 0 {
                break;
            }
            sigma[v] = -sigma[v];
        }
        let cv = cut_value(g, &sigma)?;
        if best.as_ref().is_none_or(|b| cv > b.cut_value) {
            best = Some(CutResult {
                assignment: sigma,
                cut_value: cv,
                method: CutMethod::LocalSearch,
            });
        }
    }
    Ok(best.expect("restarts >= 1"))
}

/// Erdős–Rényi graph with edge probability d/(n-1).
pub fn er_graph(n: usize, d: f64, rng: &RngStream) -> Result<Graph> {
    if n < 2 {
        return Err(invalid("ER graph needs n >= 2"));
    }
    let p = d / (n - 1) as f64;
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid(format!("average degree {d} is out of range for n = {n}")));
    }
    let mut r = rng.rng();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if r.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, edges)
}

/// Random d-regular graph by configuration-model pairing, rejecting
/// pairings with loops or multi-edges.
pub fn reg_graph(n: usize, d: usize, rng: &RngStream) -> Result<Graph> {
    if (n * d) % 2 == 1 {
        return Err(invalid(format!("n·d must be even, got n = {n}, d = {d}")));
    }
    if d >= n {
        return Err(invalid(format!("degree {d} must be below n = {n}")));
    }
    let mut r = rng.rng();
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    'retry: for _ in 0..PAIRING_RETRIES {
        stubs.shuffle(&mut r);
        let mut seen = HashSet::with_capacity(n * d / 2);
        for pair in stubs.chunks(2) {
            let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if u == v || !seen.insert((u, v)) {
                continue 'retry;
            }
        }
        let mut edges: Vec<(usize, usize)> = seen.into_iter().collect();
        edges.sort_unstable();
        return Graph::new(n, edges);
    }
    Err(Error::Convergence(PAIRING_RETRIES))
}

/// One "u v" line per edge.
pub fn write_edge_list(g: &Graph) -> String {
    g.edges.iter().map(|(u, v)| format!("{u} {v}\n")).collect()
}

/// Parses "u v" lines; blank lines and lines starting with '#' are skipped.
/// The vertex count is `n` if given, otherwise one more than the largest index.
pub fn parse_edge_list(text: &str, n: Option<usize>) -> Result<Graph> {
    let mut edges = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        let parse = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| invalid(format!("line {}: bad vertex index {s:?}", lineno + 1)))
        };
        if parts.len() != 2 {
            return Err(invalid(format!("line {}: expected \"u v\"", lineno + 1)));
        }
        edges.push((parse(parts[0])?, parse(parts[1])?));
    }
    let n = n.unwrap_or_else(|| edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0));
    Graph::new(n, edges)
}
