//! Option values from the characteristic function: direct calls by three
//! Fourier routes, Quanto inverse-power calls and puts, inverse-power
//! forwards and power grids.

use crate::charfn::{CfEvaluator, FsvModel};
use crate::error::{FsvError, Result};
use crate::quad::{integrate_semi_infinite_vec, Integral, QuadConfig};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const I: C64 = C64 { re: 0.0, im: 1.0 };

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptionStyle {
    #[serde(alias = "direct")]
    DirectCall,
    #[serde(alias = "ip")]
    InversePower,
    #[serde(alias = "qip")]
    QuantoInversePower,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptionContract {
    pub strike: f64,
    pub maturity: f64,
    pub p1: f64,
    pub p2: f64,
    pub conversion_rate: f64,
    pub style: OptionStyle,
    pub is_call: bool,
}

impl OptionContract {
    pub fn direct_call(strike: f64, maturity: f64) -> Self {
        Self { strike, maturity, p1: 1.0, p2: 1.0, conversion_rate: 1.0, style: OptionStyle::DirectCall, is_call: true }
    }

    pub fn qip(strike: f64, maturity: f64, p1: f64, p2: f64, rate: f64, is_call: bool) -> Self {
        Self { strike, maturity, p1, p2, conversion_rate: rate, style: OptionStyle::QuantoInversePower, is_call }
    }

    /// Crypto-settled inverse-power option, priced as a Quanto contract with R = 1.
    pub fn inverse_power(strike: f64, maturity: f64, p1: f64, p2: f64, is_call: bool) -> Self {
        Self { strike, maturity, p1, p2, conversion_rate: 1.0, style: OptionStyle::InversePower, is_call }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(FsvError::InvalidParams(m.to_string()));
        if !(self.strike > 0.0 && self.strike.is_finite()) {
            return bad("strike must be positive");
        }
        if !(self.maturity > 0.0 && self.maturity.is_finite()) {
            return bad("maturity must be positive");
        }
        if !(self.conversion_rate > 0.0) {
            return bad("conversion rate must be positive");
        }
        match self.style {
            OptionStyle::DirectCall if self.p1 != 1.0 || self.p2 != 1.0 => bad("direct options use p1 = p2 = 1"),
            OptionStyle::DirectCall => Ok(()),
            _ if !(self.p1 > 0.0) || !(self.p2 >= 0.0) => bad("inverse-power options need p1 > 0 and p2 >= 0"),
            _ => Ok(()),
        }
    }

    /// R^{p1} with R = 1 for crypto-settled contracts.
    pub fn notional(&self) -> f64 {
        match self.style {
            OptionStyle::InversePower => 1.0,
            _ => self.conversion_rate.powf(self.p1),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PriceResult {
    pub value: f64,
    pub integral_abs_err_est: f64,
    pub u_truncation: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

/// Terminal payoff of a contract.
pub fn payoff(contract: &OptionContract, s_t: f64) -> f64 {
    let c = contract;
    match c.style {
        OptionStyle::DirectCall => {
            if c.is_call {
                (s_t - c.strike).max(0.0)
            } else {
                (c.strike - s_t).max(0.0)
            }
        }
        _ => {
            let ratio = c.strike.powf(c.p2) / s_t.powf(c.p1);
            let x = if c.is_call { 1.0 - ratio } else { ratio - 1.0 };
            c.notional() * x.max(0.0)
        }
    }
}

/// Source of log φ_{log S_T}(u) for a fixed maturity and conditioning state.
pub trait LogCf: Sync {
    fn log_cf(&self, u: C64) -> Result<C64>;
}

impl<F: Fn(C64) -> Result<C64> + Sync> LogCf for F {
    fn log_cf(&self, u: C64) -> Result<C64> {
        self(u)
    }
}

fn strip_to_moment(e: FsvError, what: &str) -> FsvError {
    match e {
        FsvError::OutsideStrip { .. } | FsvError::NotFinite { .. } | FsvError::BranchCut { .. } => {
            FsvError::MomentUnavailable(what.to_string())
        }
        other => other,
    }
}

/// E[S_T^{-p1}] = φ(i·p1).
pub fn inverse_power_forward_with(cf: &impl LogCf, p1: f64) -> Result<f64> {
    if p1 == 0.0 {
        return Ok(1.0);
    }
    let what = format!("E[S^-{p1}]");
    let v = cf.log_cf(C64::new(0.0, p1)).map_err(|e| strip_to_moment(e, &what))?;
    let v = v.re.exp();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(FsvError::MomentUnavailable(what))
    }
}

/// Shared semi-infinite u-integral: one CF evaluation per node feeds `dim`
/// real integrands.
pub fn fourier_integrals(
    cf: &impl LogCf,
    dim: usize,
    quad: &QuadConfig,
    integrand: impl Fn(f64, C64, &mut [f64]),
) -> Result<Integral<Vec<f64>>> {
    integrate_semi_infinite_vec(
        |u, out| {
            let l = cf.log_cf(C64::new(u, 0.0))?;
            integrand(u, l, out);
            Ok(())
        },
        dim,
        quad,
    )
}

/// Clip small negatives relative to the notional scale; reject larger ones.
fn finish(value: f64, scale: f64, it: &Integral<Vec<f64>>, quad: &QuadConfig) -> Result<PriceResult> {
    let tol = scale * 1e-10f64.max(10.0 * quad.rel_tol);
    let mut warning = None;
    let value = if value < 0.0 {
        if value < -tol {
            return Err(FsvError::NegativePrice { value });
        }
        warning = Some(format!("clipped negative value {value:e} to 0"));
        0.0
    } else {
        value
    };
    if !value.is_finite() {
        return Err(FsvError::NotFinite { what: "price" });
    }
    Ok(PriceResult { value, integral_abs_err_est: it.abs_err * scale, u_truncation: it.u_truncation, warning })
}

/// Direct calls on a strike ladder of one maturity by the parity formula,
/// sharing CF evaluations across strikes.
pub fn parity_calls_with(cf: &impl LogCf, spot: f64, strikes: &[f64], quad: &QuadConfig) -> Result<Vec<PriceResult>> {
    let logk: Vec<f64> = strikes.iter().map(|k| k.ln()).collect();
    let it = fourier_integrals(cf, strikes.len(), quad, |u, l, out| {
        let den = C64::new(u * u, u);
        for (o, lk) in out.iter_mut().zip(&logk) {
            *o = ((l - I * u * lk).exp() / den).re;
        }
    })?;
    strikes
        .iter()
        .zip(&it.value)
        .map(|(&k, &v)| {
            let c = spot - k * (0.5 + v / PI);
            finish(c, spot, &it, quad).map(|mut r| {
                r.integral_abs_err_est *= k / (PI * spot);
                r
            })
        })
        .collect()
}

/// Direct call as S₀Π₁ − KΠ₂ with in-the-money probabilities.
pub fn bakshi_madan_call_with(cf: &impl LogCf, spot: f64, strike: f64, quad: &QuadConfig) -> Result<PriceResult> {
    let lk = strike.ln();
    let lfwd = cf.log_cf(C64::new(0.0, -1.0))?;
    let r = integrate_semi_infinite_vec(
        |u, out| {
            let z = C64::new(u, 0.0);
            let shifted = cf.log_cf(z - I)?;
            let plain = cf.log_cf(z)?;
            let k = -I * u * lk;
            out[0] = ((shifted - lfwd + k).exp() / (I * u)).re;
            out[1] = ((plain + k).exp() / (I * u)).re;
            Ok(())
        },
        2,
        quad,
    )?;
    let pi1 = 0.5 + r.value[0] / PI;
    // the standard constant 1/2 in Π₂
    let pi2 = 0.5 + r.value[1] / PI;
    finish(spot * pi1 - strike * pi2, spot, &r, quad)
}

/// Damped-transform direct call with damping α.
pub fn carr_madan_call_with(cf: &impl LogCf, strike: f64, alpha: f64, quad: &QuadConfig) -> Result<PriceResult> {
    if !(alpha > 0.0) {
        return Err(FsvError::InvalidParams("damping alpha must be positive".into()));
    }
    let what = format!("E[S^{}]", alpha + 1.0);
    let m = cf.log_cf(C64::new(0.0, -(alpha + 1.0))).map_err(|e| strip_to_moment(e, &what))?;
    if !m.re.is_finite() {
        return Err(FsvError::MomentUnavailable(what));
    }
    let lk = strike.ln();
    let r = integrate_semi_infinite_vec(
        |u, out| {
            let l = cf.log_cf(C64::new(u, -(alpha + 1.0)))?;
            let den = C64::new(alpha * alpha + alpha - u * u, (2.0 * alpha + 1.0) * u);
            out[0] = ((l - I * u * lk).exp() / den).re;
            Ok(())
        },
        1,
        quad,
    )?;
    let scale = (-alpha * lk).exp() / PI;
    let it = Integral { value: r.value.clone(), abs_err: r.abs_err * scale, u_truncation: r.u_truncation, panels: r.panels };
    finish(scale * r.value[0], 1.0, &it, quad)
}

/// Quanto inverse-power calls for several (strike, p1, p2) sharing one u-grid.
/// `notional` is R^{p1} per entry.
pub fn qip_calls_with(
    cf: &impl LogCf,
    legs: &[(f64, f64, f64)],
    notionals: &[f64],
    quad: &QuadConfig,
) -> Result<Vec<PriceResult>> {
    for &(k, p1, p2) in legs {
        if !(k > 0.0 && p1 > 0.0 && p2 >= 0.0) {
            return Err(FsvError::InvalidParams("inverse-power legs need K > 0, p1 > 0, p2 >= 0".into()));
        }
    }
    let shifts: Vec<(f64, f64)> = legs.iter().map(|&(k, p1, p2)| (p2 / p1 * k.ln(), p1)).collect();
    let it = fourier_integrals(cf, legs.len(), quad, |u, l, out| {
        for (o, &(s, p1)) in out.iter_mut().zip(&shifts) {
            *o = ((l - I * u * s).exp() / C64::new(-u * u, p1 * u)).re;
        }
    })?;
    legs.iter()
        .zip(notionals)
        .zip(&it.value)
        .map(|((&(_, p1, _), &n), &v)| {
            let c = n * (0.5 + p1 * v / PI);
            finish(c, n, &it, quad).map(|mut r| {
                r.integral_abs_err_est *= p1 / PI;
                r
            })
        })
        .collect()
}

/// Put from the call by Quanto put–call parity.
pub fn qip_put_from_call(call: &PriceResult, cf: &impl LogCf, strike: f64, p1: f64, p2: f64, notional: f64, quad: &QuadConfig) -> Result<PriceResult> {
    let fwd = inverse_power_forward_with(cf, p1)?;
    let v = call.value + notional * (strike.powf(p2) * fwd - 1.0);
    let it = Integral { value: vec![], abs_err: call.integral_abs_err_est / notional, u_truncation: call.u_truncation, panels: 0 };
    finish(v, notional, &it, quad)
}

/// Power specification of a grid: equal powers on a line or an independent
/// rectangle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PowerSpec {
    Equal { lo: f64, hi: f64, n: usize },
    Independent { lo: f64, hi: f64, n: usize },
}

impl PowerSpec {
    fn axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        if n <= 1 {
            return vec![lo];
        }
        (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
    }

    pub fn points(&self) -> Vec<(f64, f64)> {
        match *self {
            PowerSpec::Equal { lo, hi, n } => Self::axis(lo, hi, n).into_iter().map(|p| (p, p)).collect(),
            PowerSpec::Independent { lo, hi, n } => {
                let a = Self::axis(lo, hi, n);
                a.iter().flat_map(|&p1| a.iter().map(move |&p2| (p1, p2))).collect()
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerGridRow {
    pub p1: f64,
    pub p2: f64,
    pub call: f64,
    /// None when E[S_T^{-p1}] does not exist under the model.
    pub put: Option<f64>,
}

/// Quanto call and put values over a power grid at one strike and maturity.
pub fn power_grid_with(cf: &impl LogCf, strike: f64, rate: f64, spec: &PowerSpec, quad: &QuadConfig) -> Result<Vec<PowerGridRow>> {
    let pts = spec.points();
    let legs: Vec<(f64, f64, f64)> = pts.iter().map(|&(p1, p2)| (strike, p1, p2)).collect();
    let notionals: Vec<f64> = pts.iter().map(|&(p1, _)| rate.powf(p1)).collect();
    let calls = qip_calls_with(cf, &legs, &notionals, quad)?;
    pts.iter()
        .zip(calls.iter().zip(&notionals))
        .map(|(&(p1, p2), (c, &n))| {
            let put = match qip_put_from_call(c, cf, strike, p1, p2, n, quad) {
                Ok(p) => Some(p.value),
                Err(FsvError::MomentUnavailable(_)) => None,
                Err(e) => return Err(e),
            };
            Ok(PowerGridRow { p1, p2, call: c.value, put })
        })
        .collect()
}

/// Pricing of any contract under an FSV model from a time-0 spot.
#[derive(Clone, Debug)]
pub struct Pricer {
    pub ev: CfEvaluator,
    pub spot: f64,
    pub quad: QuadConfig,
    pub discount_rate: f64,
}

impl Pricer {
    pub fn new(model: &FsvModel, spot: f64) -> Result<Self> {
        if !(spot > 0.0 && spot.is_finite()) {
            return Err(FsvError::InvalidParams("spot must be positive".into()));
        }
        Ok(Self { ev: model.evaluator()?, spot, quad: QuadConfig::default(), discount_rate: 0.0 })
    }

    pub fn with_quad(mut self, quad: QuadConfig) -> Self {
        self.quad = quad;
        self
    }

    pub fn with_discount_rate(mut self, r: f64) -> Self {
        self.discount_rate = r;
        self
    }

    /// log φ_{log S_T | 0} as a pricing source.
    pub fn cf_at(&self, t: f64) -> impl LogCf + '_ {
        let ls = self.spot.ln();
        move |u: C64| self.ev.log_cf_deterministic(ls, t, u)
    }

    fn discount(&self, t: f64, mut r: PriceResult) -> PriceResult {
        let df = (-self.discount_rate * t).exp();
        r.value *= df;
        r.integral_abs_err_est *= df;
        r
    }

    pub fn call_parity(&self, c: &OptionContract) -> Result<PriceResult> {
        self.direct_only(c)?;
        let r = parity_calls_with(&self.cf_at(c.maturity), self.spot, &[c.strike], &self.quad)?.remove(0);
        Ok(self.discount(c.maturity, r))
    }

    /// Direct calls over a strike ladder of one maturity.
    pub fn call_ladder(&self, strikes: &[f64], t: f64) -> Result<Vec<PriceResult>> {
        let v = parity_calls_with(&self.cf_at(t), self.spot, strikes, &self.quad)?;
        Ok(v.into_iter().map(|r| self.discount(t, r)).collect())
    }

    pub fn call_bakshi_madan(&self, c: &OptionContract) -> Result<PriceResult> {
        self.direct_only(c)?;
        let r = bakshi_madan_call_with(&self.cf_at(c.maturity), self.spot, c.strike, &self.quad)?;
        Ok(self.discount(c.maturity, r))
    }

    pub fn call_carr_madan(&self, c: &OptionContract, alpha: f64) -> Result<PriceResult> {
        self.direct_only(c)?;
        let r = carr_madan_call_with(&self.cf_at(c.maturity), c.strike, alpha, &self.quad)?;
        Ok(self.discount(c.maturity, r))
    }

    fn direct_only(&self, c: &OptionContract) -> Result<()> {
        c.validate()?;
        if c.style != OptionStyle::DirectCall {
            return Err(FsvError::InvalidParams("direct-call formula needs a DirectCall contract".into()));
        }
        Ok(())
    }

    fn inverse_only(&self, c: &OptionContract) -> Result<()> {
        c.validate()?;
        if c.style == OptionStyle::DirectCall {
            return Err(FsvError::InvalidParams("inverse-power formula needs an inverse-power contract".into()));
        }
        Ok(())
    }

    pub fn qip_call(&self, c: &OptionContract) -> Result<PriceResult> {
        self.inverse_only(c)?;
        let cf = self.cf_at(c.maturity);
        let r = qip_calls_with(&cf, &[(c.strike, c.p1, c.p2)], &[c.notional()], &self.quad)?.remove(0);
        Ok(self.discount(c.maturity, r))
    }

    pub fn qip_put(&self, c: &OptionContract) -> Result<PriceResult> {
        self.inverse_only(c)?;
        let cf = self.cf_at(c.maturity);
        let call = qip_calls_with(&cf, &[(c.strike, c.p1, c.p2)], &[c.notional()], &self.quad)?.remove(0);
        let r = qip_put_from_call(&call, &cf, c.strike, c.p1, c.p2, c.notional(), &self.quad)?;
        Ok(self.discount(c.maturity, r))
    }

    pub fn inverse_power_forward(&self, t: f64, p1: f64) -> Result<f64> {
        inverse_power_forward_with(&self.cf_at(t), p1)
    }

    /// Default route per style: parity formula for direct options (puts via
    /// put–call parity), Quanto formulas otherwise.
    pub fn price(&self, c: &OptionContract) -> Result<PriceResult> {
        match (c.style, c.is_call) {
            (OptionStyle::DirectCall, true) => self.call_parity(c),
            (OptionStyle::DirectCall, false) => {
                let mut r = self.call_parity(c)?;
                let df = (-self.discount_rate * c.maturity).exp();
                r.value = (r.value + df * (c.strike - self.spot)).max(0.0);
                Ok(r)
            }
            (_, true) => self.qip_call(c),
            (_, false) => self.qip_put(c),
        }
    }

    pub fn power_grid(&self, strike: f64, t: f64, rate: f64, spec: &PowerSpec) -> Result<Vec<PowerGridRow>> {
        let df = (-self.discount_rate * t).exp();
        let rows = power_grid_with(&self.cf_at(t), strike, rate, spec, &self.quad)?;
        Ok(rows.into_iter().map(|r| PowerGridRow { call: r.call * df, put: r.put.map(|p| p * df), ..r }).collect())
    }
}

pub fn price_call_parity(model: &FsvModel, s0: f64, contract: &OptionContract) -> Result<PriceResult> {
    Pricer::new(model, s0)?.call_parity(contract)
}

pub fn price_call_bakshi_madan(model: &FsvModel, s0: f64, contract: &OptionContract) -> Result<PriceResult> {
    Pricer::new(model, s0)?.call_bakshi_madan(contract)
}

pub fn price_call_carr_madan(model: &FsvModel, s0: f64, contract: &OptionContract, alpha: f64) -> Result<PriceResult> {
    Pricer::new(model, s0)?.call_carr_madan(contract, alpha)
}

pub fn price_qip_call(model: &FsvModel, s0: f64, contract: &OptionContract) -> Result<PriceResult> {
    Pricer::new(model, s0)?.qip_call(contract)
}

pub fn price_qip_put(model: &FsvModel, s0: f64, contract: &OptionContract) -> Result<PriceResult> {
    Pricer::new(model, s0)?.qip_put(contract)
}

pub fn inverse_power_forward(model: &FsvModel, s0: f64, t: f64, p1: f64) -> Result<f64> {
    Pricer::new(model, s0)?.inverse_power_forward(t, p1)
}

pub fn power_grid(model: &FsvModel, s0: f64, strike: f64, t: f64, rate: f64, spec: &PowerSpec) -> Result<Vec<PowerGridRow>> {
    Pricer::new(model, s0)?.power_grid(strike, t, rate, spec)
}

/// Black–Scholes call with total variance `w` (undiscounted).
pub fn black_scholes_call(spot: f64, strike: f64, w: f64) -> f64 {
    use statrs::distribution::{ContinuousCDF, Normal};
    let n = Normal::new(0.0, 1.0).expect("standard normal");
    if w <= 0.0 {
        return (spot - strike).max(0.0);
    }
    let sw = w.sqrt();
    let d1 = ((spot / strike).ln() + 0.5 * w) / sw;
    spot * n.cdf(d1) - strike * n.cdf(d1 - sw)
}
