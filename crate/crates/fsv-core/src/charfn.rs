//! Conditional characteristic function of the log-price, the closed-form
//! type-III s-integral, and model-implied variance-swap values.

use crate::error::{FsvError, Result};
use crate::kernels::{KernelFamily, KernelSpec};
use crate::levy::{BaseProcess, Moments};
use crate::quad::{integrate_finite, QuadConfig};
use crate::specfun::{dilog, gamma_r, gauss_2f1};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

const I: C64 = C64 { re: 0.0, im: 1.0 };
/// Smallest admissible Var[X₁] (it normalizes the variance-swap term).
pub const MIN_VARX: f64 = 1e-12;
// |φ₄e^{−κc*}/φ₃| below this uses the power series for the tempered-stable tail
const TAIL_SERIES_RADIUS: f64 = 0.7;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FsvModel {
    pub base: BaseProcess,
    pub kernel: KernelSpec,
    pub a0: f64,
    pub m: f64,
    pub rho: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CfContext {
    pub t0: f64,
    pub t: f64,
    pub log_s_t0: f64,
    /// Variance-swap value V_S(t0, t); ignored when t0 = 0.
    pub vs: f64,
}

impl CfContext {
    /// Time-0 context: spot S₀ and maturity t.
    pub fn spot(s0: f64, t: f64) -> Self {
        Self { t0: 0.0, t, log_s_t0: s0.ln(), vs: 0.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhiHelpers {
    pub phi: C64,
    pub phi1: C64,
    pub phi2: C64,
    pub phi3: C64,
    pub phi4: C64,
}

impl FsvModel {
    pub fn new(base: BaseProcess, kernel: KernelSpec, a0: f64, m: f64, rho: f64) -> Result<Self> {
        let model = Self { base, kernel, a0, m, rho };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        self.kernel.validate()?;
        if !(self.a0 > 0.0 && self.a0.is_finite()) {
            return Err(FsvError::InvalidParams(format!("a0 = {} must be positive", self.a0)));
        }
        if !(self.m >= 0.0 && self.m.is_finite()) || !self.rho.is_finite() {
            return Err(FsvError::InvalidParams("m must be non-negative and rho finite".into()));
        }
        if self.base.moments().varx1 <= MIN_VARX {
            return Err(FsvError::InvalidParams("Var[X1] must exceed 1e-12".into()));
        }
        self.base.log_compensators(self.rho)?;
        Ok(())
    }

    pub fn moments(&self) -> Moments {
        self.base.moments()
    }

    /// Deterministic part B(0, t) of the expected business time.
    pub fn b_deterministic(&self, t: f64) -> f64 {
        let k = self.kernel.kappa;
        (self.a0 - self.m) * (-(-k * t).exp_m1()) / k + self.m * t
    }

    /// Expected business time B(0, t) + J(t)·E[Y₁].
    pub fn expected_business_time(&self, t: f64) -> f64 {
        self.b_deterministic(t) + self.kernel.eval_j(t) * self.moments().ey1
    }

    /// Model-implied variance swap V_S(0, t).
    pub fn model_variance_swap(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let mo = self.moments();
        self.expected_business_time(t) * mo.varx1 + self.rho * self.rho * t * mo.vary1
    }

    pub fn evaluator(&self) -> Result<CfEvaluator> {
        CfEvaluator::new(*self)
    }
}

/// Per-model cache of constants used by every CF evaluation.
#[derive(Clone, Debug)]
pub struct CfEvaluator {
    pub model: FsvModel,
    lx: f64,
    ly: f64,
    mom: Moments,
    g_d1: f64,
    k3: f64,
    squad: QuadConfig,
    closed_type3: bool,
}

/// log φ_{X₁}(u) together with φ(u) and ψ(u) = log φ_{X₁}(u) − iu·log φ_{X₁}(−i).
#[derive(Clone, Copy, Debug)]
struct Exponents {
    phi: C64,
    psi: C64,
}

impl CfEvaluator {
    pub fn new(model: FsvModel) -> Result<Self> {
        model.validate()?;
        let (lx, ly) = model.base.log_compensators(model.rho)?;
        let d = model.kernel.d;
        let g_d1 = gamma_r(d + 1.0);
        let k3 = if d < 1.0 {
            model.kernel.breakpoint().powf(d) / ((1.0 - d) * g_d1)
        } else {
            1.0 / model.kernel.kappa
        };
        Ok(Self {
            model,
            lx,
            ly,
            mom: model.base.moments(),
            g_d1,
            k3,
            squad: QuadConfig { rel_tol: 1e-12, abs_tol: 1e-15, ..QuadConfig::default() },
            closed_type3: true,
        })
    }

    /// Tolerances of the numeric s-integral.
    pub fn with_s_quad(mut self, cfg: QuadConfig) -> Self {
        self.squad = cfg;
        self
    }

    /// Force the numeric s-integral even for type-III kernels.
    pub fn numeric_only(mut self) -> Self {
        self.closed_type3 = false;
        self
    }

    pub fn compensators(&self) -> (f64, f64) {
        (self.lx, self.ly)
    }

    pub fn moments(&self) -> Moments {
        self.mom
    }

    fn exponents(&self, u: C64) -> Result<Exponents> {
        let lpx = self.model.base.log_phi_x(u)?;
        Ok(Exponents { phi: I * lpx + u * self.lx, psi: lpx - I * u * self.lx })
    }

    fn helpers_from(&self, u: C64, e: &Exponents) -> PhiHelpers {
        let d = self.model.kernel.d;
        let iphi = I * e.phi;
        let phi1 = self.model.base.b_y() - I * self.model.rho * u;
        PhiHelpers {
            phi: e.phi,
            phi1,
            phi2: iphi / self.g_d1,
            phi3: phi1 + self.k3 * iphi,
            phi4: self.k3 * d * (1.0 - d).exp() * iphi,
        }
    }

    /// The helper quantities φ, φ₁..φ₄ at u.
    pub fn helpers(&self, u: C64) -> Result<PhiHelpers> {
        let e = self.exponents(u)?;
        Ok(self.helpers_from(u, &e))
    }

    /// ψ(u) = log φ_{X₁}(u) − iu·log φ_{X₁}(−i).
    pub fn psi(&self, u: C64) -> Result<C64> {
        Ok(self.exponents(u)?.psi)
    }

    /// log φ_{Y₁}(ρu − H(v)φ(u)), the integrand of the s-integral at lag v.
    pub fn y_exponent(&self, u: C64, phi: C64, lag: f64) -> Result<C64> {
        let h = self.model.kernel.eval_h_integral(lag);
        self.model.base.log_phi_y(self.model.rho * u - h * phi)
    }

    fn numeric_from(&self, tau: f64, u: C64, phi: C64) -> Result<C64> {
        if tau <= 0.0 {
            return Ok(C64::new(0.0, 0.0));
        }
        let f = |v: f64| self.y_exponent(u, phi, v);
        // v = a·x² softens the v^d behaviour of H at the origin
        let sqrt_sub = |a: f64| -> Result<C64> {
            integrate_finite(|x| Ok(f(a * x * x)? * (2.0 * a * x)), 0.0, 1.0, &self.squad)
        };
        let kernel = self.model.kernel;
        if kernel.family == KernelFamily::TypeIII && tau > kernel.breakpoint() {
            let c = kernel.breakpoint();
            Ok(sqrt_sub(c)? + integrate_finite(f, c, tau, &self.squad)?)
        } else {
            sqrt_sub(tau)
        }
    }

    /// ∫₀^τ log φ_{Y₁}(ρu − H(v)φ(u)) dv by adaptive quadrature.
    pub fn s_integral_numeric(&self, tau: f64, u: C64) -> Result<C64> {
        let e = self.exponents(u)?;
        self.numeric_from(tau, u, e.phi)
    }

    fn closed_from(&self, tau: f64, u: C64, e: &Exponents) -> Result<C64> {
        let kernel = self.model.kernel;
        if kernel.family != KernelFamily::TypeIII {
            return Err(FsvError::InvalidParams("closed-form s-integral requires a type-III kernel".into()));
        }
        if tau <= 0.0 || (u.re == 0.0 && u.im == 0.0) {
            return Ok(C64::new(0.0, 0.0));
        }
        let h = self.helpers_from(u, e);
        let (k, d) = (kernel.kappa, kernel.d);
        let cs = kernel.breakpoint();
        let t1 = tau.min(cs);
        let tail = tau > cs;
        let inv_d = C64::new(1.0 / d, 0.0);
        let one = C64::new(1.0, 0.0);
        let z1 = -t1.powf(d) * h.phi2 / h.phi1;
        let decay = |s: f64| (-k * s).exp();
        let v = match self.model.base {
            BaseProcess::Aljd(p) => {
                let f = gauss_2f1(one, inv_d, inv_d + 1.0, z1)?;
                let mut v = p.lambda_y * t1 * (p.b_y / h.phi1 * f - 1.0);
                if tail {
                    let lg = |s: f64| (h.phi3 - h.phi4 * decay(s)).ln();
                    v += p.lambda_y
                        * (p.b_y / (k * h.phi3) * (k * (tau - cs) + lg(tau) - lg(cs)) - (tau - cs));
                }
                v
            }
            BaseProcess::Gmrts(p) if p.c_y > 0.0 => {
                let c = p.c_y;
                let c0 = p.a_y * gamma_r(-c);
                let bc = p.b_y.powf(c);
                let f = gauss_2f1(C64::new(-c, 0.0), inv_d, inv_d + 1.0, z1)?;
                let mut v = c0 * t1 * (h.phi1.powf(c) * f - bc);
                if tail {
                    v += c0 * (gmrts_tail(&h, c, k, cs, tau)? - bc * (tau - cs));
                }
                v
            }
            BaseProcess::Gmrts(p) => {
                let lb = p.b_y.ln();
                let f = gauss_2f1(one, inv_d, inv_d + 1.0, z1)?;
                let mut v = p.a_y * t1 * (lb - (h.phi1 + t1.powf(d) * h.phi2).ln() - d * (f - 1.0));
                if tail {
                    let lphi3 = h.phi3.ln();
                    let anti = |s: f64| -> Result<C64> { Ok(s * lphi3 + dilog(decay(s) * h.phi4 / h.phi3)? / k) };
                    v += p.a_y * ((tau - cs) * lb - (anti(tau)? - anti(cs)?));
                }
                v
            }
        };
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(FsvError::NotFinite { what: "closed-form s-integral" })
        }
    }

    /// Closed-form type-III s-integral.
    pub fn s_integral_closed_type3(&self, tau: f64, u: C64) -> Result<C64> {
        let e = self.exponents(u)?;
        self.closed_from(tau, u, &e)
    }

    fn s_integral_from(&self, tau: f64, u: C64, e: &Exponents) -> Result<C64> {
        if self.closed_type3 && self.model.kernel.family == KernelFamily::TypeIII {
            self.closed_from(tau, u, e)
        } else {
            self.numeric_from(tau, u, e.phi)
        }
    }

    /// Preferred s-integral: closed form for type III, quadrature otherwise.
    pub fn s_integral(&self, tau: f64, u: C64) -> Result<C64> {
        let e = self.exponents(u)?;
        self.s_integral_from(tau, u, &e)
    }

    /// log φ_{log S_t | t0}(u). At t0 = 0 uses the deterministic B(0, t);
    /// otherwise the variance-swap form with `ctx.vs`.
    pub fn log_cf(&self, ctx: &CfContext, u: C64) -> Result<C64> {
        if ctx.t0 == 0.0 {
            self.log_cf_deterministic(ctx.log_s_t0, ctx.t, u)
        } else {
            self.log_cf_variance_swap(ctx, u)
        }
    }

    /// Time-0 form with the deterministic business-time drift B(0, t).
    pub fn log_cf_deterministic(&self, log_s0: f64, t: f64, u: C64) -> Result<C64> {
        if !(t > 0.0) {
            return Err(FsvError::InvalidParams("maturity must exceed t0".into()));
        }
        let e = self.exponents(u)?;
        let s = self.s_integral_from(t, u, &e)?;
        Ok(I * u * (log_s0 - t * self.ly) + s + e.psi * self.model.b_deterministic(t))
    }

    /// Variance-swap form for a generic t0 >= 0 with state V_S(t0, t) = ctx.vs.
    pub fn log_cf_variance_swap(&self, ctx: &CfContext, u: C64) -> Result<C64> {
        let tau = ctx.t - ctx.t0;
        if !(tau > 0.0) || ctx.t0 < 0.0 {
            return Err(FsvError::InvalidParams("require 0 <= t0 < t".into()));
        }
        let e = self.exponents(u)?;
        let s = self.s_integral_from(tau, u, &e)?;
        let mo = self.mom;
        let rho = self.model.rho;
        let drift = (ctx.vs - rho * rho * tau * mo.vary1) / mo.varx1 - self.model.kernel.eval_j(tau) * mo.ey1;
        Ok(I * u * (ctx.log_s_t0 - tau * self.ly) + s + e.psi * drift)
    }

    pub fn cf(&self, ctx: &CfContext, u: C64) -> Result<C64> {
        Ok(self.log_cf(ctx, u)?.exp())
    }
}

/// Helper quantities φ, φ₁..φ₄ at u.
pub fn helpers(model: &FsvModel, u: C64) -> Result<PhiHelpers> {
    model.evaluator()?.helpers(u)
}

/// ∫_{t0}^{t} log φ_{Y₁}(ρu − H(t − s)φ(u)) ds by quadrature.
pub fn s_integral_numeric(model: &FsvModel, t0: f64, t: f64, u: C64) -> Result<C64> {
    model.evaluator()?.s_integral_numeric(t - t0, u)
}

/// ∫_{c*}^{τ} (φ₃ − φ₄e^{−κs})^c ds for the tempered-stable tail.
fn gmrts_tail(h: &PhiHelpers, c: f64, k: f64, cs: f64, tau: f64) -> Result<C64> {
    let t_at = |s: f64| (-k * s).exp() * h.phi4 / h.phi3;
    let t_cs = t_at(cs);
    if t_cs.norm() <= TAIL_SERIES_RADIUS {
        // x = e^{−κs}: (1 − t)^c/t integrated term by term
        let series = |t: C64| -> Result<C64> {
            let (mut coef, mut tk, mut sum) = (1.0, C64::new(1.0, 0.0), C64::new(0.0, 0.0));
            for j in 1..4000 {
                let jf = j as f64;
                coef *= (jf - 1.0 - c) / jf;
                tk *= t;
                let term = tk * (coef / jf);
                sum += term;
                if term.norm() <= 1e-17 * sum.norm().max(1e-300) {
                    return Ok(sum);
                }
            }
            Err(FsvError::NonConvergence { what: "tempered-stable tail series" })
        };
        return Ok(h.phi3.powf(c) / k * (k * (tau - cs) + series(t_cs)? - series(t_at(tau))?));
    }
    let one = C64::new(1.0, 0.0);
    let anti = |s: f64| -> Result<C64> {
        let w = (k * s).exp() * h.phi3 / h.phi4;
        let g = gauss_2f1(one, one, C64::new(1.0 - c, 0.0), w)?;
        Ok(h.phi3.powf(c) / (k * c) * (w - 1.0) * (1.0 - 1.0 / w).powf(c) * g)
    };
    Ok(anti(tau)? - anti(cs)?)
}


/// The same integral in closed form for type-III kernels.
pub fn s_integral_closed_type3(model: &FsvModel, t0: f64, t: f64, u: C64) -> Result<C64> {
    model.evaluator()?.s_integral_closed_type3(t - t0, u)
}

/// φ_{log S_t | t0}(u).
pub fn conditional_cf(model: &FsvModel, ctx: &CfContext, u: C64) -> Result<C64> {
    model.evaluator()?.cf(ctx, u)
}

pub fn model_variance_swap(model: &FsvModel, t: f64) -> f64 {
    model.model_variance_swap(t)
}
