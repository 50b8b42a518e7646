//! Run configuration shared by the command-line tool and the bindings.

use crate::calib::{build_model, CalibModel, ModelFamily, ParamMap};
use crate::charfn::FsvModel;
use crate::error::{FsvError, Result};
use crate::kernels::KernelFamily;
use crate::quad::QuadConfig;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub family: ModelFamily,
    pub kernel: KernelFamily,
    pub params: ParamMap,
}

impl ModelConfig {
    /// Reference type-III FSV-ALJD parameter set.
    pub fn reference() -> Self {
        let params = [
            ("sigma_x", 0.73208),
            ("lambda_x", 0.21292),
            ("b_x", 0.98634),
            ("eta", 2.10382),
            ("lambda_y", 8.52514),
            ("b_y", 4.14291),
            ("kappa", 9.70963),
            ("d", 0.54194),
            ("rho", 0.00641),
            ("a0", 0.24452),
            ("m", 0.1),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
        Self { family: ModelFamily::FsvAljd, kernel: KernelFamily::TypeIII, params }
    }

    pub fn build(&self) -> Result<CalibModel> {
        build_model(self.family, self.kernel, &self.params)
    }

    /// The FSV model, or an error for benchmark families.
    pub fn fsv(&self) -> Result<FsvModel> {
        match self.build()? {
            CalibModel::Fsv(m) => Ok(m),
            _ => Err(FsvError::InvalidParams(format!("family {} is not an FSV model", self.family))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct McConfig {
    pub n_paths: usize,
    pub seed: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        Self { n_paths: 200_000, seed: 42 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub quad: QuadConfig,
    pub mc: McConfig,
    pub day_count: f64,
    pub discount_rate: f64,
    pub spot: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: ModelConfig::reference(),
            quad: QuadConfig::default(),
            mc: McConfig::default(),
            day_count: 365.0,
            discount_rate: 0.0,
            spot: 9232.98,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.quad.validate()?;
        self.model.build()?;
        if !(self.spot > 0.0) || !(self.day_count > 0.0) || !self.discount_rate.is_finite() {
            return Err(FsvError::InvalidParams("spot and day_count must be positive".into()));
        }
        Ok(())
    }

    pub fn years(&self, days: f64) -> f64 {
        days / self.day_count
    }
}
