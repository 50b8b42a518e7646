//! Joint calibration across maturities: ARPE objective, genetic search
//! followed by pattern search, and benchmark models.

pub mod benchmark;
pub mod optim;
pub mod params;

pub use benchmark::{benchmark_price, CalibModel, HestonParams, PreparedModel};
pub use optim::{genetic_search, pattern_search, pattern_search_residuals, Candidate, GaConfig, PsConfig};
pub use params::{build_model, fsv_param_map, ModelFamily, ParamBox, ParamMap, ParamSpec};

use crate::chain_io::QuoteSet;
use crate::error::{FsvError, Result};
use crate::kernels::KernelFamily;
use crate::quad::QuadConfig;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::time::Instant;

/// Objective value given to candidates that cannot be priced.
pub const PENALTY: f64 = 1e6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CalibConfig {
    pub ga: GaConfig,
    pub ps: PsConfig,
    pub quad: QuadConfig,
    pub day_count: f64,
    /// Parameters pinned to a value (e.g. m = 0.1).
    pub fixed: BTreeMap<String, f64>,
}

impl Default for CalibConfig {
    fn default() -> Self {
        Self {
            ga: GaConfig::default(),
            ps: PsConfig::default(),
            quad: QuadConfig::default().with_tol(1e-7, 1e-10),
            day_count: 365.0,
            fixed: BTreeMap::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub strike: f64,
    pub maturity_days: u32,
    pub market: f64,
    pub model: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationResult {
    pub family: ModelFamily,
    pub kernel: KernelFamily,
    pub params: ParamMap,
    pub arpe: f64,
    pub arpe_percent: f64,
    pub n_objective_evals: usize,
    pub wall_time_ga_s: f64,
    pub wall_time_ps_s: f64,
    pub seed: u64,
    pub n_quotes: usize,
    pub residuals: Vec<Residual>,
}

/// Kept quotes grouped by maturity so each group shares one u-integral.
#[derive(Clone, Debug)]
pub struct CalibQuotes {
    pub spot: f64,
    groups: Vec<Group>,
    n: usize,
}

#[derive(Clone, Debug)]
struct Group {
    t: f64,
    strikes: Vec<f64>,
    idx: Vec<usize>,
}

impl CalibQuotes {
    pub fn new(qs: &QuoteSet, day_count: f64) -> Self {
        let kept: Vec<_> = qs.kept().collect();
        let mut groups: Vec<Group> = Vec::new();
        for (i, q) in kept.iter().enumerate() {
            let t = q.maturity_days as f64 / day_count;
            match groups.iter_mut().find(|g| g.t == t) {
                Some(g) => {
                    g.strikes.push(q.strike);
                    g.idx.push(i);
                }
                None => groups.push(Group { t, strikes: vec![q.strike], idx: vec![i] }),
            }
        }
        Self { spot: qs.spot, groups, n: kept.len() }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Model prices in kept-quote order.
    pub fn model_prices(&self, model: &CalibModel, quad: &QuadConfig) -> Result<Vec<f64>> {
        let p = model.prepare()?;
        let mut out = vec![0.0; self.n];
        for g in &self.groups {
            let fail = |i: usize, e: FsvError| FsvError::PricingFailed { index: i, source: Box::new(e) };
            let v = p.call_ladder(self.spot, g.t, &g.strikes, quad).map_err(|e| fail(g.idx[0], e))?;
            for (r, &i) in v.iter().zip(&g.idx) {
                out[i] = r.value;
            }
        }
        Ok(out)
    }
}

/// Σ |market − model| / market.
pub fn arpe_from_prices(market: &[f64], model: &[f64]) -> f64 {
    market.iter().zip(model).map(|(m, p)| (m - p).abs() / m).sum()
}

/// ARPE of a model on the kept quotes of a chain (sum form).
pub fn arpe(model: &CalibModel, qs: &QuoteSet, quad: &QuadConfig, day_count: f64) -> Result<f64> {
    let cq = CalibQuotes::new(qs, day_count);
    let market: Vec<f64> = qs.kept().map(|q| q.price).collect();
    Ok(arpe_from_prices(&market, &cq.model_prices(model, quad)?))
}

/// Genetic search then pattern search over the family's parameter box.
pub fn calibrate(family: ModelFamily, kernel: KernelFamily, qs: &QuoteSet, cfg: &CalibConfig) -> Result<CalibrationResult> {
    let mut pbox = ParamBox::default_for(family, kernel);
    for (k, v) in &cfg.fixed {
        pbox.fix(k, *v)?;
    }
    pbox.validate()?;
    let cq = CalibQuotes::new(qs, cfg.day_count);
    if cq.is_empty() {
        return Err(FsvError::InvalidParams("no quotes to calibrate on".into()));
    }
    let market: Vec<f64> = qs.kept().map(|q| q.price).collect();
    let residuals = |x: &[f64]| -> Option<Vec<f64>> {
        let p = pbox.build(&pbox.to_params(x)).and_then(|m| cq.model_prices(&m, &cfg.quad)).ok()?;
        Some(market.iter().zip(&p).map(|(m, v)| (v - m) / m).collect())
    };
    let objective = |x: &[f64]| -> f64 {
        match residuals(x) {
            Some(r) => {
                let v: f64 = r.iter().map(|e| e.abs()).sum();
                if v.is_finite() {
                    v
                } else {
                    PENALTY
                }
            }
            None => PENALTY,
        }
    };
    let t0 = Instant::now();
    let (cands, ga_evals) = genetic_search(&objective, pbox.dim(), &cfg.ga);
    let wall_ga = t0.elapsed().as_secs_f64();
    let t1 = Instant::now();
    // refine every surviving GA candidate and keep the best end point
    let mut ps_evals = 0;
    let mut best: Option<Candidate> = None;
    for c in &cands {
        let (r, n) = pattern_search_residuals(&residuals, PENALTY, &c.x, &cfg.ps);
        ps_evals += n;
        if best.as_ref().is_none_or(|b| r.value < b.value) {
            best = Some(r);
        }
    }
    let best = best.expect("genetic search returns at least one candidate");
    let wall_ps = t1.elapsed().as_secs_f64();
    let params = pbox.to_params(&best.x);
    let model = pbox.build(&params)?;
    let prices = cq.model_prices(&model, &cfg.quad)?;
    let arpe = arpe_from_prices(&market, &prices);
    let residuals = qs
        .kept()
        .zip(&prices)
        .map(|(q, &p)| Residual { strike: q.strike, maturity_days: q.maturity_days, market: q.price, model: p })
        .collect();
    Ok(CalibrationResult {
        family,
        kernel: pbox.kernel,
        params,
        arpe,
        arpe_percent: 100.0 * arpe / cq.len() as f64,
        n_objective_evals: ga_evals + ps_evals,
        wall_time_ga_s: wall_ga,
        wall_time_ps_s: wall_ps,
        seed: cfg.ga.seed,
        n_quotes: cq.len(),
        residuals,
    })
}
