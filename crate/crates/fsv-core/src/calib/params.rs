//! Model families, parameter boxes and the mapping from named parameters to
//! priceable models.

use super::benchmark::{CalibModel, HestonParams};
use crate::charfn::FsvModel;
use crate::error::{FsvError, Result};
use crate::kernels::{KernelFamily, KernelSpec};
use crate::levy::{AljdParams, BaseProcess, GmrtsParams};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

pub type ParamMap = BTreeMap<String, f64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelFamily {
    FsvAljd,
    FsvGmrts,
    SvAljd,
    SvGmrts,
    Heston,
    #[serde(alias = "bs")]
    BlackScholes,
}

impl ModelFamily {
    pub const ALL: [ModelFamily; 6] = [
        ModelFamily::FsvAljd,
        ModelFamily::FsvGmrts,
        ModelFamily::SvAljd,
        ModelFamily::SvGmrts,
        ModelFamily::Heston,
        ModelFamily::BlackScholes,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ModelFamily::FsvAljd => "fsv-aljd",
            ModelFamily::FsvGmrts => "fsv-gmrts",
            ModelFamily::SvAljd => "sv-aljd",
            ModelFamily::SvGmrts => "sv-gmrts",
            ModelFamily::Heston => "heston",
            ModelFamily::BlackScholes => "blackscholes",
        }
    }

    fn is_fsv_like(&self) -> bool {
        !matches!(self, ModelFamily::Heston | ModelFamily::BlackScholes)
    }

    /// Kernel actually used: SV families run on the exponential kernel.
    pub fn effective_kernel(&self, requested: KernelFamily) -> Option<KernelFamily> {
        match self {
            ModelFamily::FsvAljd | ModelFamily::FsvGmrts => Some(requested),
            ModelFamily::SvAljd | ModelFamily::SvGmrts => Some(KernelFamily::Exponential),
            _ => None,
        }
    }
}

impl fmt::Display for ModelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelFamily {
    type Err = FsvError;
    fn from_str(s: &str) -> Result<Self> {
        let k = s.to_ascii_lowercase().replace('_', "-");
        match k.as_str() {
            "bs" | "black-scholes" => return Ok(ModelFamily::BlackScholes),
            _ => {}
        }
        ModelFamily::ALL
            .into_iter()
            .find(|f| f.name() == k)
            .ok_or_else(|| FsvError::InvalidParams(format!("unknown model family '{s}'")))
    }
}

const LOG_SCALE_RATIO: f64 = 100.0;
/// |ρ| is searched as a fraction of b_y, which keeps the CF strip open.
const RHO_FRACTION: f64 = 0.999;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamSpec {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed: Option<f64>,
    /// Parameter whose value this one copies.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tied_to: Option<String>,
    /// Bounds are fractions of this parameter's value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale_by: Option<String>,
}

impl ParamSpec {
    fn free(name: &str, lower: f64, upper: f64) -> Self {
        Self { name: name.into(), lower, upper, fixed: None, tied_to: None, scale_by: None }
    }

    fn scaled(name: &str, lower: f64, upper: f64, by: &str) -> Self {
        Self { scale_by: Some(by.into()), ..Self::free(name, lower, upper) }
    }

    fn fixed(name: &str, v: f64) -> Self {
        Self { name: name.into(), lower: v, upper: v, fixed: Some(v), tied_to: None, scale_by: None }
    }

    fn tied(name: &str, to: &str) -> Self {
        Self { name: name.into(), lower: 0.0, upper: 0.0, fixed: None, tied_to: Some(to.into()), scale_by: None }
    }

    pub fn is_free(&self) -> bool {
        self.fixed.is_none() && self.tied_to.is_none()
    }

    /// Positive ranges spanning two decades or more are searched in log space.
    pub fn log_scaled(&self) -> bool {
        self.lower > 0.0 && self.upper >= LOG_SCALE_RATIO * self.lower
    }

    /// Parameter value at unit coordinate t.
    pub fn from_unit(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, 1.0);
        if self.log_scaled() {
            self.lower * (self.upper / self.lower).powf(t)
        } else {
            self.lower + t * (self.upper - self.lower)
        }
    }

    /// Unit coordinate of a value, clamped to the box.
    pub fn to_unit(&self, v: f64) -> f64 {
        let t = if self.log_scaled() {
            (v / self.lower).ln() / (self.upper / self.lower).ln()
        } else {
            (v - self.lower) / (self.upper - self.lower)
        };
        t.clamp(0.0, 1.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamBox {
    pub family: ModelFamily,
    pub kernel: KernelFamily,
    pub params: Vec<ParamSpec>,
}

impl ParamBox {
    pub fn default_for(family: ModelFamily, kernel: KernelFamily) -> Self {
        use ParamSpec as P;
        let mut params = Vec::new();
        let kernel = family.effective_kernel(kernel).unwrap_or(kernel);
        match family {
            ModelFamily::FsvAljd | ModelFamily::SvAljd => params.extend([
                P::free("sigma_x", 1e-3, 5.0),
                P::free("lambda_x", 1e-4, 20.0),
                P::free("b_x", 1e-2, 100.0),
                P::free("eta", 0.05, 20.0),
                P::free("lambda_y", 1e-4, 20.0),
                P::free("b_y", 1e-2, 100.0),
            ]),
            ModelFamily::FsvGmrts | ModelFamily::SvGmrts => params.extend([
                P::free("a_x", 1e-3, 100.0),
                P::free("b_x", 1e-2, 100.0),
                P::fixed("c_x", 0.5),
                P::free("theta", -5.0, 5.0),
                P::fixed("n", 2.0),
                P::free("a_y", 1e-3, 100.0),
                P::tied("b_y", "a_y"),
                P::fixed("c_y", 0.5),
            ]),
            ModelFamily::Heston => params.extend([
                P::free("kappa", 0.1, 20.0),
                P::free("rho", -1.0, 1.0),
                P::free("varsigma", 1e-3, 5.0),
                P::free("v0", 1e-3, 2.0),
                P::free("m", 1e-3, 2.0),
            ]),
            ModelFamily::BlackScholes => params.push(P::free("sigma", 1e-3, 5.0)),
        }
        if family.is_fsv_like() {
            params.push(P::free("kappa", 0.1, 20.0));
            if kernel == KernelFamily::Exponential {
                params.push(P::fixed("d", 1.0));
            } else {
                params.push(P::free("d", 0.505, 0.995));
            }
            params.extend([P::free("a0", 1e-3, 2.0), P::free("m", 0.0, 2.0), P::scaled("rho", -RHO_FRACTION, RHO_FRACTION, "b_y")]);
        }
        Self { family, kernel, params }
    }

    /// Pin a parameter to a value (must be a known name).
    pub fn fix(&mut self, name: &str, v: f64) -> Result<()> {
        let p = self
            .params
            .iter_mut()
            .find(|p| p.name == name)
            .ok_or_else(|| FsvError::InvalidParams(format!("unknown parameter '{name}' for {}", self.family)))?;
        p.fixed = Some(v);
        p.tied_to = None;
        p.scale_by = None;
        p.lower = v;
        p.upper = v;
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        for p in self.params.iter().filter(|p| p.is_free()) {
            if !(p.lower < p.upper) {
                return Err(FsvError::InvalidParams(format!("empty range for {}", p.name)));
            }
        }
        Ok(())
    }

    pub fn free_names(&self) -> Vec<&str> {
        self.params.iter().filter(|p| p.is_free()).map(|p| p.name.as_str()).collect()
    }

    pub fn dim(&self) -> usize {
        self.params.iter().filter(|p| p.is_free()).count()
    }

    /// Named parameters from normalized free coordinates in [0, 1].
    pub fn to_params(&self, x: &[f64]) -> ParamMap {
        let mut map = ParamMap::new();
        let mut it = x.iter();
        for p in &self.params {
            if let Some(v) = p.fixed {
                map.insert(p.name.clone(), v);
            } else if p.tied_to.is_none() {
                map.insert(p.name.clone(), p.from_unit(it.next().copied().unwrap_or(0.5)));
            }
        }
        for p in self.params.iter().filter(|p| p.fixed.is_none()) {
            if let Some(src) = &p.tied_to {
                let v = map.get(src).copied().unwrap_or(f64::NAN);
                map.insert(p.name.clone(), v);
            }
        }
        for p in self.params.iter().filter(|p| p.is_free()) {
            if let Some(by) = &p.scale_by {
                let f = map.get(by).copied().unwrap_or(f64::NAN);
                map.entry(p.name.clone()).and_modify(|v| *v *= f);
            }
        }
        map
    }

    /// Normalized coordinates of a named parameter map (clamped to the box).
    pub fn to_unit(&self, map: &ParamMap) -> Vec<f64> {
        self.params
            .iter()
            .filter(|p| p.is_free())
            .map(|p| {
                let scale = p.scale_by.as_ref().map_or(Some(1.0), |by| map.get(by).copied());
                match (map.get(&p.name), scale) {
                    (Some(&v), Some(f)) if f != 0.0 => p.to_unit(v / f),
                    _ => 0.5,
                }
            })
            .collect()
    }

    pub fn build(&self, map: &ParamMap) -> Result<CalibModel> {
        build_model(self.family, self.kernel, map)
    }
}

fn get(map: &ParamMap, k: &str) -> Result<f64> {
    map.get(k).copied().ok_or_else(|| FsvError::InvalidParams(format!("missing parameter '{k}'")))
}

/// Assemble a priceable model from named parameters.
pub fn build_model(family: ModelFamily, kernel: KernelFamily, map: &ParamMap) -> Result<CalibModel> {
    let g = |k: &str| get(map, k);
    match family {
        ModelFamily::BlackScholes => {
            let sigma = g("sigma")?;
            if !(sigma > 0.0) {
                return Err(FsvError::InvalidParams("sigma must be positive".into()));
            }
            Ok(CalibModel::BlackScholes { sigma })
        }
        ModelFamily::Heston => {
            let h = HestonParams { kappa: g("kappa")?, rho: g("rho")?, varsigma: g("varsigma")?, v0: g("v0")?, m: g("m")? };
            h.validate()?;
            Ok(CalibModel::Heston(h))
        }
        _ => {
            let base = match family {
                ModelFamily::FsvAljd | ModelFamily::SvAljd => BaseProcess::Aljd(AljdParams {
                    sigma_x: g("sigma_x")?,
                    lambda_x: g("lambda_x")?,
                    b_x: g("b_x")?,
                    eta: g("eta")?,
                    lambda_y: g("lambda_y")?,
                    b_y: g("b_y")?,
                }),
                _ => BaseProcess::Gmrts(GmrtsParams {
                    a_x: g("a_x")?,
                    b_x: g("b_x")?,
                    c_x: map.get("c_x").copied().unwrap_or(0.5),
                    theta: g("theta")?,
                    n: map.get("n").copied().unwrap_or(2.0),
                    a_y: g("a_y")?,
                    b_y: map.get("b_y").copied().unwrap_or(g("a_y")?),
                    c_y: map.get("c_y").copied().unwrap_or(0.5),
                }),
            };
            let kf = family.effective_kernel(kernel).unwrap_or(kernel);
            let kspec = if kf == KernelFamily::Exponential {
                KernelSpec::exponential(g("kappa")?)?
            } else {
                KernelSpec::new(kf, g("kappa")?, g("d")?)?
            };
            let rho = g("rho")?;
            if rho.abs() >= base.b_y() {
                return Err(FsvError::InvalidParams("|rho| must stay below b_y".into()));
            }
            Ok(CalibModel::Fsv(FsvModel::new(base, kspec, g("a0")?, g("m")?, rho)?))
        }
    }
}

/// Named parameters of an FSV model, as used by the boxes above.
pub fn fsv_param_map(model: &FsvModel) -> ParamMap {
    let mut m = ParamMap::new();
    let mut put = |k: &str, v: f64| {
        m.insert(k.to_string(), v);
    };
    match model.base {
        BaseProcess::Aljd(p) => {
            put("sigma_x", p.sigma_x);
            put("lambda_x", p.lambda_x);
            put("b_x", p.b_x);
            put("eta", p.eta);
            put("lambda_y", p.lambda_y);
            put("b_y", p.b_y);
        }
        BaseProcess::Gmrts(p) => {
            put("a_x", p.a_x);
            put("b_x", p.b_x);
            put("c_x", p.c_x);
            put("theta", p.theta);
            put("n", p.n);
            put("a_y", p.a_y);
            put("b_y", p.b_y);
            put("c_y", p.c_y);
        }
    }
    put("kappa", model.kernel.kappa);
    put("d", model.kernel.d);
    put("a0", model.a0);
    put("m", model.m);
    put("rho", model.rho);
    m
}
