//! Base Lévy processes X (price) and Y (activity driver): asymmetric Laplace
//! jump-diffusion and Gaussian-mixed regulated tempered stable.

use crate::error::{FsvError, Result};
use crate::specfun::{gamma_r, gauss_2f1};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

const I: C64 = C64 { re: 0.0, im: 1.0 };

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AljdParams {
    pub sigma_x: f64,
    pub lambda_x: f64,
    pub b_x: f64,
    pub eta: f64,
    pub lambda_y: f64,
    pub b_y: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GmrtsParams {
    pub a_x: f64,
    pub b_x: f64,
    #[serde(default = "half")]
    pub c_x: f64,
    pub theta: f64,
    #[serde(default = "two")]
    pub n: f64,
    pub a_y: f64,
    pub b_y: f64,
    #[serde(default = "half")]
    pub c_y: f64,
}

fn half() -> f64 {
    0.5
}
fn two() -> f64 {
    2.0
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum BaseProcess {
    Aljd(AljdParams),
    Gmrts(GmrtsParams),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub ey1: f64,
    pub vary1: f64,
    pub varx1: f64,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(FsvError::InvalidParams(format!("{name} = {v} must be positive")))
    }
}

impl AljdParams {
    pub fn validate(&self) -> Result<()> {
        positive("sigma_x", self.sigma_x)?;
        positive("b_x", self.b_x)?;
        positive("eta", self.eta)?;
        positive("b_y", self.b_y)?;
        if !(self.lambda_x >= 0.0 && self.lambda_y >= 0.0) {
            return Err(FsvError::InvalidParams("jump intensities must be non-negative".into()));
        }
        if self.lambda_x > 0.0 && self.b_x * self.eta <= 1.0 {
            return Err(FsvError::InvalidParams("b_x·eta must exceed 1 for the price compensator".into()));
        }
        Ok(())
    }

    pub fn log_phi_x(&self, u: C64) -> Result<C64> {
        if self.lambda_x > 0.0 && !(u.im > -self.b_x * self.eta && u.im < self.b_x / self.eta) {
            return Err(FsvError::OutsideStrip { which: "phi_x" });
        }
        let jump = 1.0 / ((1.0 + I * self.eta * u / self.b_x) * (1.0 - I * u / (self.b_x * self.eta))) - 1.0;
        Ok(-0.5 * self.sigma_x * self.sigma_x * u * u + self.lambda_x * jump)
    }

    pub fn log_phi_y(&self, u: C64) -> Result<C64> {
        if !(u.im > -self.b_y) {
            return Err(FsvError::OutsideStrip { which: "phi_y" });
        }
        Ok(self.lambda_y * (1.0 / (1.0 - I * u / self.b_y) - 1.0))
    }

    /// Var[X₁] from the second derivative of the characteristic exponent:
    /// σ² + 2λ(η⁴ − η² + 1)/(b²η²).
    pub fn varx1(&self) -> f64 {
        let e2 = self.eta * self.eta;
        self.sigma_x * self.sigma_x
            + 2.0 * self.lambda_x * (e2 * e2 - e2 + 1.0) / (self.b_x * self.b_x * e2)
    }
}

impl GmrtsParams {
    pub fn validate(&self) -> Result<()> {
        positive("a_x", self.a_x)?;
        positive("b_x", self.b_x)?;
        positive("a_y", self.a_y)?;
        positive("b_y", self.b_y)?;
        if !(0.0..1.0).contains(&self.c_x) || !(0.0..1.0).contains(&self.c_y) {
            return Err(FsvError::InvalidParams("c_x, c_y must lie in [0, 1)".into()));
        }
        if !(self.n >= 0.0 && self.n.is_finite()) || !self.theta.is_finite() {
            return Err(FsvError::InvalidParams("n must be non-negative and theta finite".into()));
        }
        Ok(())
    }

    /// Log-CF of the regulated tempered stable subordinator Z⁽ⁿ⁾ at w.
    fn log_phi_z(&self, w: C64) -> Result<C64> {
        let (a, b, c, n) = (self.a_x, self.b_x, self.c_x, self.n);
        if n == 0.0 {
            let base = 1.0 - I * w / b;
            if base.im == 0.0 && base.re <= 0.0 {
                return Err(FsvError::OutsideStrip { which: "phi_x" });
            }
            return Ok(if c > 0.0 {
                a * b.powf(c) * gamma_r(-c) * (base.powf(c) - 1.0)
            } else {
                -a * base.ln()
            });
        }
        let z = I * w / (b * gamma_r(n + 1.0));
        if z.im.abs() <= 1e-14 * z.norm() && z.re >= 1.0 {
            return Err(FsvError::OutsideStrip { which: "phi_x" });
        }
        let inv_n = 1.0 / n;
        if c > 0.0 {
            let f = gauss_2f1(C64::new(-c, 0.0), C64::new(inv_n, 0.0), C64::new(inv_n + 1.0, 0.0), z)?;
            Ok(a * b.powf(c) * gamma_r(-c) * (f - 1.0))
        } else {
            let f = gauss_2f1(C64::new(1.0, 0.0), C64::new(inv_n + 1.0, 0.0), C64::new(inv_n + 2.0, 0.0), z)?;
            Ok(-a * (1.0 - z).ln() - I * a * n * w / (b * gamma_r(n + 2.0)) * f)
        }
    }

    pub fn log_phi_x(&self, u: C64) -> Result<C64> {
        self.log_phi_z(self.theta * u + 0.5 * I * u * u)
    }

    pub fn log_phi_y(&self, u: C64) -> Result<C64> {
        if !(u.im > -self.b_y) {
            return Err(FsvError::OutsideStrip { which: "phi_y" });
        }
        let base = self.b_y - I * u;
        Ok(if self.c_y > 0.0 {
            self.a_y * gamma_r(-self.c_y) * (base.powf(self.c_y) - self.b_y.powf(self.c_y))
        } else {
            -self.a_y * (base / self.b_y).ln()
        })
    }

    pub fn varx1(&self) -> f64 {
        let (a, b, c, n, th) = (self.a_x, self.b_x, self.c_x, self.n, self.theta);
        a / b.powf(2.0 - c)
            * (b * gamma_r(1.0 - c) / gamma_r(n + 2.0)
                + th * th * gamma_r(2.0 - c) / ((2.0 * n + 1.0) * gamma_r(n + 1.0).powi(2)))
    }
}

impl BaseProcess {
    pub fn validate(&self) -> Result<()> {
        match self {
            BaseProcess::Aljd(p) => p.validate(),
            BaseProcess::Gmrts(p) => p.validate(),
        }
    }

    /// log φ_{X₁}(u).
    pub fn log_phi_x(&self, u: C64) -> Result<C64> {
        match self {
            BaseProcess::Aljd(p) => p.log_phi_x(u),
            BaseProcess::Gmrts(p) => p.log_phi_x(u),
        }
    }

    /// log φ_{Y₁}(u).
    pub fn log_phi_y(&self, u: C64) -> Result<C64> {
        match self {
            BaseProcess::Aljd(p) => p.log_phi_y(u),
            BaseProcess::Gmrts(p) => p.log_phi_y(u),
        }
    }

    pub fn phi_x1(&self, u: C64) -> Result<C64> {
        Ok(self.log_phi_x(u)?.exp())
    }

    pub fn phi_y1(&self, u: C64) -> Result<C64> {
        Ok(self.log_phi_y(u)?.exp())
    }

    /// Rate b_Y of the activity driver.
    pub fn b_y(&self) -> f64 {
        match self {
            BaseProcess::Aljd(p) => p.b_y,
            BaseProcess::Gmrts(p) => p.b_y,
        }
    }

    pub fn moments(&self) -> Moments {
        match self {
            BaseProcess::Aljd(p) => Moments {
                ey1: p.lambda_y / p.b_y,
                vary1: 2.0 * p.lambda_y / (p.b_y * p.b_y),
                varx1: p.varx1(),
            },
            BaseProcess::Gmrts(p) => Moments {
                ey1: p.a_y * gamma_r(1.0 - p.c_y) / p.b_y.powf(1.0 - p.c_y),
                vary1: p.a_y * gamma_r(2.0 - p.c_y) / p.b_y.powf(2.0 - p.c_y),
                varx1: p.varx1(),
            },
        }
    }

    /// (log φ_{X₁}(−i), log φ_{Y₁}(−iρ)), both real.
    pub fn log_compensators(&self, rho: f64) -> Result<(f64, f64)> {
        let lx = self.log_phi_x(C64::new(0.0, -1.0))?;
        let ly = self.log_phi_y(C64::new(0.0, -rho))?;
        if !(lx.re.is_finite() && ly.re.is_finite()) {
            return Err(FsvError::OutsideStrip { which: "compensator" });
        }
        Ok((lx.re, ly.re))
    }
}
