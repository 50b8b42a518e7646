//! Pricing, hedging and calibration of crypto inverse-power and Quanto
//! inverse-power options under a fractional stochastic-volatility model
//! with time-changed Lévy prices.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calib;
pub mod chain_io;
pub mod charfn;
pub mod config;
pub mod error;
pub mod hedger;
pub mod kernels;
pub mod levy;
pub mod mc_oracle;
pub mod pricer;
pub mod quad;
pub mod specfun;

pub use charfn::{CfContext, FsvModel};
pub use error::{FsvError, Result};
pub use kernels::{KernelFamily, KernelSpec};
pub use levy::{AljdParams, BaseProcess, GmrtsParams};
pub use pricer::{OptionContract, OptionStyle, PriceResult, Pricer};
pub use config::RunConfig;

pub use num_complex::Complex64 as C64;
