//! Exact path simulation of ALJD-based models at a single horizon, used as an
//! independent check on characteristic functions and prices.

use crate::charfn::FsvModel;
use crate::error::{FsvError, Result};
use crate::levy::BaseProcess;
use crate::pricer::{payoff, OptionContract};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Poisson, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathBatch {
    pub n_paths: usize,
    pub terminal_log_s: Vec<f64>,
    pub business_time: Vec<f64>,
    pub realized_qv: Vec<f64>,
    pub seed: u64,
}

/// Sample mean and its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_err: f64,
}

impl Estimate {
    pub fn from_samples(xs: impl Iterator<Item = f64>) -> Self {
        let (mut n, mut mean, mut m2) = (0.0, 0.0, 0.0);
        for x in xs {
            n += 1.0;
            let d = x - mean;
            mean += d / n;
            m2 += d * (x - mean);
        }
        let var = if n > 1.0 { m2 / (n - 1.0) } else { 0.0 };
        Self { mean, std_err: (var / n).sqrt() }
    }

    /// Whether `x` lies within `k` standard errors.
    pub fn covers(&self, x: f64, k: f64) -> bool {
        (self.mean - x).abs() <= k * self.std_err
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalCf {
    pub value: C64,
    pub se_re: f64,
    pub se_im: f64,
}

fn poisson(rng: &mut ChaCha8Rng, mean: f64) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).map(|p| p.sample(rng) as u64).unwrap_or(0)
}

/// Simulate (log S_t, T_t, realized QV) on `n_paths` independent paths.
/// Path i draws from ChaCha8 stream i of `seed`, so results do not depend on
/// thread scheduling.
pub fn simulate_aljd(model: &FsvModel, t: f64, n_paths: usize, seed: u64) -> Result<PathBatch> {
    let p = match model.base {
        BaseProcess::Aljd(p) => p,
        BaseProcess::Gmrts(_) => return Err(FsvError::InvalidBase("path simulation requires an ALJD base")),
    };
    model.validate()?;
    if !(t > 0.0) {
        return Err(FsvError::InvalidParams("horizon must be positive".into()));
    }
    let (lx, ly) = model.base.log_compensators(model.rho)?;
    let b0 = model.b_deterministic(t);
    let log_s0 = 0.0;
    let kernel = model.kernel;
    let rho = model.rho;
    let p_neg = p.eta * p.eta / (1.0 + p.eta * p.eta);
    let neg = Exp::new(p.b_x / p.eta).expect("rate");
    let pos = Exp::new(p.b_x * p.eta).expect("rate");
    let zmark = Exp::new(p.b_y).expect("rate");
    let rows: Vec<(f64, f64, f64)> = (0..n_paths)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let mut bt = b0;
            let mut ysum = 0.0;
            let mut zsq = 0.0;
            for _ in 0..poisson(&mut rng, p.lambda_y * t) {
                let s: f64 = rng.random::<f64>() * t;
                let z = zmark.sample(&mut rng);
                bt += z * kernel.eval_h_integral(t - s);
                ysum += z;
                zsq += z * z;
            }
            let n: f64 = StandardNormal.sample(&mut rng);
            let mut x = p.sigma_x * bt.sqrt() * n;
            let mut jsq = 0.0;
            for _ in 0..poisson(&mut rng, p.lambda_x * bt) {
                let j = if rng.random::<f64>() < p_neg { -neg.sample(&mut rng) } else { pos.sample(&mut rng) };
                x += j;
                jsq += j * j;
            }
            let log_s = log_s0 + x + rho * ysum - bt * lx - t * ly;
            let qv = p.sigma_x * p.sigma_x * bt + jsq + rho * rho * zsq;
            (log_s, bt, qv)
        })
        .collect();
    let mut batch = PathBatch {
        n_paths,
        terminal_log_s: Vec::with_capacity(n_paths),
        business_time: Vec::with_capacity(n_paths),
        realized_qv: Vec::with_capacity(n_paths),
        seed,
    };
    for (l, b, q) in rows {
        batch.terminal_log_s.push(l);
        batch.business_time.push(b);
        batch.realized_qv.push(q);
    }
    Ok(batch)
}

impl PathBatch {
    /// Terminal log prices for spot `s0` (paths are stored relative to S₀ = 1).
    pub fn log_prices(&self, s0: f64) -> impl Iterator<Item = f64> + '_ {
        let l0 = s0.ln();
        self.terminal_log_s.iter().map(move |x| x + l0)
    }

    pub fn business_time_mean(&self) -> Estimate {
        Estimate::from_samples(self.business_time.iter().copied())
    }

    pub fn realized_qv_mean(&self) -> Estimate {
        Estimate::from_samples(self.realized_qv.iter().copied())
    }

    /// Write the batch as CSV with columns path_id, T_t, log_s_T.
    pub fn dump_csv(&self, path: &Path, s0: f64) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["path_id", "T_t", "log_s_T"])?;
        for (i, (b, l)) in self.business_time.iter().zip(self.log_prices(s0)).enumerate() {
            w.write_record([i.to_string(), b.to_string(), l.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Sample mean of the contract payoff at spot `s0`.
pub fn mc_price(batch: &PathBatch, s0: f64, contract: &OptionContract) -> Estimate {
    Estimate::from_samples(batch.log_prices(s0).map(|l| payoff(contract, l.exp())))
}

/// Sample mean of e^{iu·log S_t} with componentwise standard errors.
pub fn empirical_cf(batch: &PathBatch, s0: f64, u: f64) -> EmpiricalCf {
    let re = Estimate::from_samples(batch.log_prices(s0).map(|l| (u * l).cos()));
    let im = Estimate::from_samples(batch.log_prices(s0).map(|l| (u * l).sin()));
    EmpiricalCf { value: C64::new(re.mean, im.mean), se_re: re.std_err, se_im: im.std_err }
}
