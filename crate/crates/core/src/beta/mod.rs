//! Beta distribution machinery for the exact tests, and the two auxiliary
//! tails the crate needs: chi-square (Bartlett approximation for Wilks Λ)
//! and the Kolmogorov distribution (KS checks in the simulations).

mod chi2;
mod incbeta;
mod ks;

pub use chi2::{chi_square_sf, regularized_gamma_p, regularized_gamma_q};
pub use incbeta::{
    beta_cdf, beta_critical_value, beta_density, beta_pvalue, beta_quantile, beta_sf, ln_beta,
    BetaParams, PValue, P_VALUE_FLOOR,
};
pub use ks::{
    kolmogorov_sf, ks_one_sample, ks_one_sample_pvalue, ks_two_sample, ks_two_sample_pvalue,
};
