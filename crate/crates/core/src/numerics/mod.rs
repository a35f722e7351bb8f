//! Deterministic math kernel shared by every model module.

mod eig;
mod goe;
mod optim;
mod quad;
mod rng;
mod semicircle;
mod stats;

pub use eig::{sym_eigvals, SymmetricSpectrum};
pub use goe::goe_sample;
pub use optim::{find_root, minimize_scalar, scan_minimize, DEFAULT_TOL};
pub use quad::{
    gauss_hermite, gauss_legendre, gaussian_rule, hermite_cached, standard_rule, QuadratureRule, DEFAULT_ORDER,
    MAX_HERMITE_ORDER,
};
pub use rng::RngStream;
pub use semicircle::{semicircle_cdf, semicircle_density, semicircle_omega, semicircle_stieltjes};
pub use stats::{log_sum_exp, mean_and_se};
