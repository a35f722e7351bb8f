//! SK model and Z2 synchronization: replica symmetric theory, kRSB and
//! the Parisi functional, and the max-cut harness.

mod krsb;
mod maxcut;
mod parisi;
mod rs;

pub use krsb::{krsb_value, RsbLadder};
pub use maxcut::{
    cut_value, er_graph, maxcut_bruteforce, maxcut_localsearch, maxcut_prediction, maxcut_random, parse_edge_list,
    reg_graph, write_edge_list, CutMethod, CutResult, Graph, BRUTE_FORCE_MAX_N,
};
pub use parisi::{
    minimize_parisi, minimize_parisi_chain, minimize_parisi_from, p_star_extrapolate, parisi_functional, parisi_phi,
    PStarFit, ParisiMeasure, PdeGrid, P_STAR,
};
pub use rs::{
    sk_bayes_fixed_point, sk_min_psi_rs, sk_psi_rs, sk_rs_entropy, sk_rs_map, sk_solve_rs, SkParams, SkRsPoint,
};

/// log(2 cosh x) without overflow.
pub(crate) fn log2cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p()
}
