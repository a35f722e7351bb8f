//! Ground-truth engines: exact enumeration for small systems, identity
//! checks, and Poisson point process samplers.

mod enumerate;
mod ppp;

pub use enumerate::{
    check_h_derivative, enumerate_gibbs, guerra_rs_bound_mc, mutual_info_immse_check, EnumeratedGibbs, GuerraCheck,
    ImmseCheck, ENUMERATION_MAX_N,
};
pub use ppp::{
    pd_second_moment_mc, pd_weights, ppp_max_cdf, ppp_shift_invariance_mc, ppp_topk, PdWeights, PppSample, ShiftCheck,
};
