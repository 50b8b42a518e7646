//! Benchmark models (Black–Scholes and Heston) and a common priceable model
//! type shared with the FSV family.

use crate::charfn::{CfEvaluator, FsvModel};
use crate::error::{FsvError, Result};
use crate::pricer::{parity_calls_with, OptionContract, OptionStyle, PriceResult};
use crate::quad::QuadConfig;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Heston variance dynamics dv = κ(m − v)dt + ς√v dZ with d⟨W, Z⟩ = ρ dt.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HestonParams {
    pub kappa: f64,
    pub rho: f64,
    pub varsigma: f64,
    pub v0: f64,
    pub m: f64,
}

impl HestonParams {
    pub fn validate(&self) -> Result<()> {
        if self.kappa > 0.0 && self.varsigma > 0.0 && self.v0 > 0.0 && self.m > 0.0 && self.rho.abs() <= 1.0 {
            Ok(())
        } else {
            Err(FsvError::InvalidParams("Heston needs kappa, varsigma, v0, m > 0 and |rho| <= 1".into()))
        }
    }

    /// log E[e^{iu log S_t}] in the rotation-free ("little trap") form.
    pub fn log_cf(&self, log_s0: f64, t: f64, u: C64) -> Result<C64> {
        let (k, r, s) = (self.kappa, self.rho, self.varsigma);
        let beta = k - r * s * I * u;
        let d = (beta * beta + s * s * (I * u + u * u)).sqrt();
        let g = (beta - d) / (beta + d);
        let e = (-d * t).exp();
        let c = k * self.m / (s * s) * ((beta - d) * t - 2.0 * ((1.0 - g * e) / (1.0 - g)).ln());
        let dd = (beta - d) / (s * s) * (1.0 - e) / (1.0 - g * e);
        let v = I * u * log_s0 + c + dd * self.v0;
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(FsvError::NotFinite { what: "Heston characteristic function" })
        }
    }
}

/// Any model the calibrator can price.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CalibModel {
    Fsv(FsvModel),
    Heston(HestonParams),
    BlackScholes { sigma: f64 },
}

/// A model prepared for repeated CF evaluation.
pub enum PreparedModel<'a> {
    Fsv(CfEvaluator),
    Heston(&'a HestonParams),
    BlackScholes(f64),
}

impl CalibModel {
    pub fn prepare(&self) -> Result<PreparedModel<'_>> {
        Ok(match self {
            CalibModel::Fsv(m) => PreparedModel::Fsv(m.evaluator()?),
            CalibModel::Heston(h) => PreparedModel::Heston(h),
            CalibModel::BlackScholes { sigma } => PreparedModel::BlackScholes(*sigma),
        })
    }
}

impl PreparedModel<'_> {
    pub fn log_cf(&self, log_s0: f64, t: f64, u: C64) -> Result<C64> {
        match self {
            PreparedModel::Fsv(ev) => ev.log_cf_deterministic(log_s0, t, u),
            PreparedModel::Heston(h) => h.log_cf(log_s0, t, u),
            PreparedModel::BlackScholes(s) => {
                let w = s * s * t;
                Ok(I * u * (log_s0 - 0.5 * w) - 0.5 * w * u * u)
            }
        }
    }

    /// Direct calls over one maturity's strike ladder by the parity formula.
    pub fn call_ladder(&self, spot: f64, t: f64, strikes: &[f64], quad: &QuadConfig) -> Result<Vec<PriceResult>> {
        let ls = spot.ln();
        let cf = |u: C64| self.log_cf(ls, t, u);
        parity_calls_with(&cf, spot, strikes, quad)
    }
}

/// Direct-call price of a benchmark (or FSV) model through the parity route.
pub fn benchmark_price(model: &CalibModel, contract: &OptionContract, s0: f64) -> Result<f64> {
    contract.validate()?;
    if contract.style != OptionStyle::DirectCall || !contract.is_call {
        return Err(FsvError::InvalidParams("benchmark pricing covers direct calls".into()));
    }
    let p = model.prepare()?;
    Ok(p.call_ladder(s0, contract.maturity, &[contract.strike], &QuadConfig::default())?[0].value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pricer::black_scholes_call;

    #[test]
    fn black_scholes_reproduces_closed_form() {
        let m = CalibModel::BlackScholes { sigma: 0.75637 };
        for days in [19.0, 47.0, 166.0, 257.0] {
            let t = days / 365.0;
            for k in [6000.0, 9000.0, 12000.0] {
                let c = OptionContract::direct_call(k, t);
                let v = benchmark_price(&m, &c, 9232.98).unwrap();
                let bs = black_scholes_call(9232.98, k, 0.75637f64.powi(2) * t);
                assert!((v - bs).abs() < 1e-7 * 9232.98, "{v} vs {bs}");
            }
        }
    }

    #[test]
    fn heston_small_volvol_is_black_scholes() {
        let h = HestonParams { kappa: 5.0, rho: -0.3, varsigma: 1e-4, v0: 0.25, m: 0.25 };
        let m = CalibModel::Heston(h);
        let c = OptionContract::direct_call(9000.0, 0.5);
        let v = benchmark_price(&m, &c, 9232.98).unwrap();
        let bs = black_scholes_call(9232.98, 9000.0, 0.125);
        assert!((v - bs).abs() < 1e-3 * bs);
    }

    #[test]
    fn heston_cf_is_normalized_and_martingale() {
        let h = HestonParams { kappa: 2.0, rho: -0.7, varsigma: 0.8, v0: 0.3, m: 0.4 };
        assert!(h.log_cf(0.0, 1.0, C64::new(0.0, 0.0)).unwrap().norm() < 1e-14);
        let l = h.log_cf(2.0, 1.0, C64::new(0.0, -1.0)).unwrap();
        assert!((l - 2.0).norm() < 1e-12);
    }
}
