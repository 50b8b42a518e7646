//! Fractional kernels h, their tail integrals H and second integrals J.

use crate::error::{FsvError, Result};
use crate::specfun::{gamma_r, lower_inc_gamma, lower_inc_gamma_r};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

/// Lags below this are treated as singular for d < 1.
pub const MIN_LAG: f64 = 1e-12;
const IMAG_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelFamily {
    #[serde(alias = "type1", alias = "I")]
    TypeI,
    #[serde(alias = "type2", alias = "II")]
    TypeII,
    #[serde(alias = "type3", alias = "III")]
    TypeIII,
    #[serde(alias = "exp")]
    Exponential,
}

impl std::fmt::Display for KernelFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            KernelFamily::TypeI => "typei",
            KernelFamily::TypeII => "typeii",
            KernelFamily::TypeIII => "typeiii",
            KernelFamily::Exponential => "exponential",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for KernelFamily {
    type Err = FsvError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "typei" | "type1" | "i" | "1" => Ok(KernelFamily::TypeI),
            "typeii" | "type2" | "ii" | "2" => Ok(KernelFamily::TypeII),
            "typeiii" | "type3" | "iii" | "3" => Ok(KernelFamily::TypeIII),
            "exponential" | "exp" | "0" => Ok(KernelFamily::Exponential),
            other => Err(FsvError::InvalidParams(format!("unknown kernel family '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub family: KernelFamily,
    pub kappa: f64,
    pub d: f64,
}

impl KernelSpec {
    pub fn new(family: KernelFamily, kappa: f64, d: f64) -> Result<Self> {
        let k = Self { family, kappa, d };
        k.validate()?;
        Ok(k)
    }

    pub fn exponential(kappa: f64) -> Result<Self> {
        Self::new(KernelFamily::Exponential, kappa, 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa > 0.0 && self.kappa.is_finite()) {
            return Err(FsvError::InvalidParams(format!("kappa = {} must be positive", self.kappa)));
        }
        let ok = match self.family {
            KernelFamily::Exponential => self.d == 1.0,
            KernelFamily::TypeI | KernelFamily::TypeII => self.d > 0.5 && self.d <= 1.0,
            KernelFamily::TypeIII => self.d > 0.5 && self.d < 1.0,
        };
        if ok {
            Ok(())
        } else {
            Err(FsvError::InvalidParams(format!("d = {} invalid for {} kernel", self.d, self.family)))
        }
    }

    /// Breakpoint (1 − d)/κ of the type-III kernel.
    pub fn breakpoint(&self) -> f64 {
        (1.0 - self.d) / self.kappa
    }

    /// Kernel value h(v) at lag v > 0.
    pub fn eval_h(&self, v: f64) -> Result<f64> {
        let (k, d) = (self.kappa, self.d);
        if v < MIN_LAG && d < 1.0 {
            return Err(FsvError::SingularLag { v });
        }
        Ok(match self.family {
            KernelFamily::Exponential => (-k * v).exp(),
            KernelFamily::TypeI => (-k * v).exp() * v.powf(d - 1.0) / gamma_r(d),
            KernelFamily::TypeII => {
                let x = C64::new(-k * v, 0.0);
                let mk = C64::new(-k, 0.0);
                let z = mk.powf(1.0 - d) * (-k * v).exp() * lower_inc_gamma(d, x)?;
                let head = v.powf(d - 1.0);
                real_part(head + z, head.abs() + z.norm())? / gamma_r(d)
            }
            KernelFamily::TypeIII => {
                let c = self.breakpoint();
                if v < c {
                    v.powf(d - 1.0) / gamma_r(d)
                } else {
                    (1.0 - d - k * v).exp() * c.powf(d - 1.0) / gamma_r(d)
                }
            }
        })
    }

    /// Tail-integrated kernel H(v) = ∫₀^v h(w) dw.
    pub fn eval_h_integral(&self, v: f64) -> f64 {
        if v <= 0.0 {
            return 0.0;
        }
        let (k, d) = (self.kappa, self.d);
        match self.family {
            KernelFamily::Exponential => -(-k * v).exp_m1() / k,
            KernelFamily::TypeI => lower_inc_gamma_r(d, k * v) / (k.powf(d) * gamma_r(d)),
            KernelFamily::TypeII => {
                let x = C64::new(-k * v, 0.0);
                let mk = C64::new(-k, 0.0);
                let head = x.powf(d);
                let tail = (-k * v).exp() * lower_inc_gamma(d + 1.0, x).unwrap_or(C64::new(f64::NAN, 0.0));
                let num = head + tail;
                let den = mk.powf(d) * gamma_r(d + 1.0);
                let val = num / den;
                real_or_nan(val, (head.norm() + tail.norm()) / den.norm())
            }
            KernelFamily::TypeIII => {
                let c = self.breakpoint();
                if v < c {
                    v.powf(d) / gamma_r(d + 1.0)
                } else {
                    c.powf(d) * (1.0 - d * (1.0 - d - k * v).exp()) / ((1.0 - d) * gamma_r(d + 1.0))
                }
            }
        }
    }

    /// J(τ) = ∫₀^τ H(w) dw.
    pub fn eval_j(&self, tau: f64) -> f64 {
        if tau <= 0.0 {
            return 0.0;
        }
        let (k, d) = (self.kappa, self.d);
        match self.family {
            KernelFamily::Exponential => (k * tau + (-k * tau).exp_m1()) / (k * k),
            KernelFamily::TypeI => {
                let x = k * tau;
                (x * lower_inc_gamma_r(d, x) - lower_inc_gamma_r(d + 1.0, x)) / (k.powf(d + 1.0) * gamma_r(d))
            }
            KernelFamily::TypeII => {
                let x = C64::new(-k * tau, 0.0);
                let mk = C64::new(-k, 0.0);
                let g = lower_inc_gamma(d + 1.0, x).unwrap_or(C64::new(f64::NAN, 0.0));
                let num = (-k * tau).exp() * (d + 1.0) * g;
                let den = mk.powf(d + 1.0) * gamma_r(d + 2.0);
                real_or_nan(num / den, num.norm() / den.norm())
            }
            KernelFamily::TypeIII => {
                let c = self.breakpoint();
                if tau < c {
                    tau.powf(d + 1.0) / gamma_r(d + 2.0)
                } else {
                    (d * (d + 1.0) * (1.0 - d - k * tau).exp() + k * (d + 1.0) * tau - d * (3.0 - d))
                        * c.powf(d + 1.0)
                        / ((1.0 - d) * (1.0 - d) * gamma_r(d + 2.0))
                }
            }
        }
    }

    /// Long-run average of the activity rate given E[Y₁] and the level m.
    pub fn long_run_mean(&self, ey1: f64, m: f64) -> f64 {
        let (k, d) = (self.kappa, self.d);
        match self.family {
            KernelFamily::Exponential => m + ey1 / k,
            KernelFamily::TypeI => m + ey1 / k.powf(d),
            KernelFamily::TypeII => {
                if d == 1.0 {
                    m + ey1 / k
                } else {
                    m
                }
            }
            KernelFamily::TypeIII => m + ey1 * self.breakpoint().powf(d) / ((1.0 - d) * gamma_r(d + 1.0)),
        }
    }
}

fn real_part(z: C64, scale: f64) -> Result<f64> {
    if z.im.abs() > IMAG_TOL * scale.max(1.0) {
        return Err(FsvError::NonConvergence { what: "type-II kernel imaginary cancellation" });
    }
    Ok(z.re)
}

fn real_or_nan(z: C64, scale: f64) -> f64 {
    debug_assert!(z.im.abs() <= IMAG_TOL * scale.max(1.0), "type-II imaginary residue {}", z.im);
    z.re
}
