//! Hedge ratios of Quanto inverse-power calls: time decay, delta, gamma,
//! variance-swap vega and responses to a price/volatility co-jump.

use crate::charfn::{CfContext, CfEvaluator, FsvModel};
use crate::error::{FsvError, Result};
use crate::pricer::{qip_calls_with, OptionContract, OptionStyle, PriceResult};
use crate::quad::{integrate_semi_infinite_vec, QuadConfig};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Market state at the hedge time s.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HedgeState {
    pub s: f64,
    pub spot: f64,
    /// Variance-swap value V_S(s, T); the model-implied E₀ value when absent.
    pub vs: Option<f64>,
}

/// A co-jump (ΔX on the business clock, ΔY in the activity driver).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JumpSizes {
    pub dx: f64,
    pub dy: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JumpResponse {
    pub dx: f64,
    pub dy: f64,
    pub delta_c: f64,
    pub delta_s: f64,
    pub delta_vs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HedgeReport {
    pub s: f64,
    pub spot: f64,
    pub vs: f64,
    pub theta_term: f64,
    pub delta: f64,
    pub gamma: f64,
    pub vs_vega: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jump: Option<JumpResponse>,
    pub u_truncation: f64,
}

#[derive(Clone, Debug)]
pub struct Hedger {
    pub ev: CfEvaluator,
    pub quad: QuadConfig,
}

impl Hedger {
    pub fn new(model: &FsvModel) -> Result<Self> {
        Ok(Self { ev: model.evaluator()?, quad: QuadConfig::default().with_tol(1e-10, 1e-14) })
    }

    pub fn with_quad(mut self, quad: QuadConfig) -> Self {
        self.quad = quad;
        self
    }

    /// V_S(s, T) implied at time 0: V_S(0, T) − V_S(0, s).
    pub fn implied_vs(&self, s: f64, t: f64) -> f64 {
        let m = &self.ev.model;
        m.model_variance_swap(t) - m.model_variance_swap(s)
    }

    fn context(&self, st: &HedgeState, c: &OptionContract) -> Result<CfContext> {
        c.validate()?;
        if c.style == OptionStyle::DirectCall {
            return Err(FsvError::InvalidParams("hedge ratios are defined for inverse-power contracts".into()));
        }
        if !(st.s >= 0.0 && st.s < c.maturity) || !(st.spot > 0.0) {
            return Err(FsvError::InvalidParams("hedge state needs 0 <= s < T and a positive spot".into()));
        }
        let vs = st.vs.unwrap_or_else(|| self.implied_vs(st.s, c.maturity));
        Ok(CfContext { t0: st.s, t: c.maturity, log_s_t0: st.spot.ln(), vs })
    }

    /// Quanto call value at state `st` in the variance-swap form of the CF.
    pub fn price_at(&self, st: &HedgeState, c: &OptionContract) -> Result<PriceResult> {
        let ctx = self.context(st, c)?;
        let cf = |u: C64| self.ev.log_cf_variance_swap(&ctx, u);
        Ok(qip_calls_with(&cf, &[(c.strike, c.p1, c.p2)], &[c.notional()], &self.quad)?.remove(0))
    }

    /// The four hedge integrals and, if requested, the jump responses.
    pub fn greeks(&self, st: &HedgeState, c: &OptionContract, jump: Option<JumpSizes>) -> Result<HedgeReport> {
        let ctx = self.context(st, c)?;
        let tau = c.maturity - st.s;
        let (_, ly) = self.ev.compensators();
        let mo = self.ev.moments();
        let rho = self.ev.model.rho;
        let h = self.ev.model.kernel.eval_h_integral(tau);
        let drift = rho * rho * mo.vary1 / mo.varx1 + h * mo.ey1;
        let shift = c.p2 / c.p1 * c.strike.ln();
        let p1 = c.p1;
        let dim = if jump.is_some() { 5 } else { 4 };
        let it = integrate_semi_infinite_vec(
            |u, out| {
                let z = C64::new(u, 0.0);
                let l = self.ev.log_cf_variance_swap(&ctx, z)?;
                let hp = self.ev.helpers(z)?;
                let psi = self.ev.psi(z)?;
                let base = (l - I * u * shift).exp();
                let q = base / C64::new(-u * u, p1 * u);
                let ly_arg = self.ev.y_exponent(z, hp.phi, tau)?;
                out[0] = (q * (I * u * ly - ly_arg + psi * drift)).re;
                let d = base / C64::new(p1, u);
                out[1] = d.re;
                out[2] = (C64::new(-1.0, u) * d).re;
                out[3] = (q * psi).re;
                if let Some(j) = jump {
                    let e = (I * u * (j.dx + rho * j.dy) + psi * h * j.dy).exp() - 1.0;
                    out[4] = (q * e).re;
                }
                Ok(())
            },
            dim,
            &self.quad,
        )?;
        let k = p1 * c.notional() / PI;
        let v = &it.value;
        let spot = st.spot;
        let jump = jump.map(|j| JumpResponse {
            dx: j.dx,
            dy: j.dy,
            delta_c: k * v[4],
            delta_s: spot * (j.dx + rho * j.dy).exp_m1(),
            delta_vs: h * j.dy * mo.varx1,
        });
        let rep = HedgeReport {
            s: st.s,
            spot,
            vs: ctx.vs,
            theta_term: k * v[0],
            delta: k * v[1] / spot,
            gamma: k * v[2] / (spot * spot),
            vs_vega: k * v[3] / mo.varx1,
            jump,
            u_truncation: it.u_truncation,
        };
        for x in [rep.theta_term, rep.delta, rep.gamma, rep.vs_vega] {
            if !x.is_finite() {
                return Err(FsvError::NotFinite { what: "hedge ratio" });
            }
        }
        Ok(rep)
    }

    /// Sensitivity to a single variance swap issued at 0, which equals the
    /// variance-swap vega.
    pub fn single_swap_hedge(&self, st: &HedgeState, c: &OptionContract) -> Result<f64> {
        Ok(self.greeks(st, c, None)?.vs_vega)
    }
}

pub fn greeks(model: &FsvModel, spot: f64, contract: &OptionContract, s: f64) -> Result<HedgeReport> {
    Hedger::new(model)?.greeks(&HedgeState { s, spot, vs: None }, contract, None)
}

pub fn single_swap_hedge(model: &FsvModel, spot: f64, contract: &OptionContract, s: f64) -> Result<f64> {
    Hedger::new(model)?.single_swap_hedge(&HedgeState { s, spot, vs: None }, contract)
}
