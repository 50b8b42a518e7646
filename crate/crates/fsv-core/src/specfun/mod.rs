//! Complex special functions: gamma, Gauss ₂F₁, incomplete gamma, dilogarithm.

mod dilog;
mod gamma;
mod hyp2f1;
mod incgamma;

pub use dilog::dilog;
pub use gamma::{gamma, gamma_r, ln_gamma_r, rgamma};
pub use hyp2f1::{hyp2f1 as gauss_2f1, series as hyp2f1_series};
pub use incgamma::{lower_inc_gamma, lower_inc_gamma_r, upper_inc_gamma};

/// Complex values used throughout the engine.
pub type ComplexValue = num_complex::Complex64;
