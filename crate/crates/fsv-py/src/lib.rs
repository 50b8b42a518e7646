//! Python bindings. Results come back as plain dicts and lists; configs may
//! be passed as dicts or JSON strings with the same layout as the CLI files.

use fsv_core::calib::{self, CalibConfig, CalibModel, ModelFamily};
use fsv_core::chain_io::{arbitrage_filter, load_chain, save_chain};
use fsv_core::hedger::{HedgeState, Hedger, JumpSizes};
use fsv_core::mc_oracle::simulate_aljd;
use fsv_core::pricer::{self, PowerSpec, Pricer};
use fsv_core::{FsvError, KernelFamily, OptionContract, RunConfig};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use serde::de::DeserializeOwned;
use serde::Serialize;
use std::path::PathBuf;

create_exception!(fsv_quant, FsvQuantError, PyException);

const THREADS_ENV: &str = "FSV_QUANT_THREADS";

fn err(e: FsvError) -> PyErr {
    match e {
        FsvError::InvalidParams(_) | FsvError::Schema { .. } | FsvError::NonPositivePrice { .. } => PyValueError::new_err(e.to_string()),
        _ => FsvQuantError::new_err(e.to_string()),
    }
}

fn to_py<T: Serialize>(py: Python<'_>, v: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(v).map_err(|e| FsvQuantError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

/// Accepts None, a JSON string or any object `json.dumps` can serialize.
fn from_py<T: DeserializeOwned + Default>(obj: Option<&Bound<'_, PyAny>>) -> PyResult<T> {
    let Some(obj) = obj else { return Ok(T::default()) };
    if obj.is_none() {
        return Ok(T::default());
    }
    let text: String = match obj.extract::<String>() {
        Ok(s) => s,
        Err(_) => obj.py().import("json")?.call_method1("dumps", (obj,))?.extract()?,
    };
    serde_json::from_str(&text).map_err(|e| PyValueError::new_err(format!("config: {e}")))
}

fn run_config(obj: Option<&Bound<'_, PyAny>>) -> PyResult<RunConfig> {
    let cfg: RunConfig = from_py(obj)?;
    cfg.validate().map_err(err)?;
    Ok(cfg)
}

fn make_contract(style: &str, k: f64, t: f64, p1: f64, p2: f64, rate: f64, is_call: bool) -> PyResult<OptionContract> {
    Ok(match style.to_ascii_lowercase().as_str() {
        "direct" | "direct_call" => OptionContract { is_call, ..OptionContract::direct_call(k, t) },
        "ip" | "inverse_power" => OptionContract::inverse_power(k, t, p1, p2, is_call),
        "qip" | "quanto_inverse_power" => OptionContract::qip(k, t, p1, p2, rate, is_call),
        _ => return Err(PyValueError::new_err(format!("unknown style '{style}'"))),
    })
}

/// Price one contract under the configured model.
#[pyfunction]
#[pyo3(signature = (k, t_days, style="direct", p1=1.0, p2=1.0, r=None, is_call=true, config=None))]
#[allow(clippy::too_many_arguments)]
fn price(
    py: Python<'_>,
    k: f64,
    t_days: f64,
    style: &str,
    p1: f64,
    p2: f64,
    r: Option<f64>,
    is_call: bool,
    config: Option<&Bound<'_, PyAny>>,
) -> PyResult<Py<PyAny>> {
    let cfg = run_config(config)?;
    let c = make_contract(style, k, cfg.years(t_days), p1, p2, r.unwrap_or(cfg.spot), is_call)?;
    let res = py
        .detach(|| -> fsv_core::Result<_> {
            match cfg.model.build()? {
                CalibModel::Fsv(m) => Pricer::new(&m, cfg.spot)?.with_quad(cfg.quad).with_discount_rate(cfg.discount_rate).price(&c),
                other => {
                    let value = calib::benchmark_price(&other, &c, cfg.spot)? * (-cfg.discount_rate * c.maturity).exp();
                    Ok(fsv_core::PriceResult { value, integral_abs_err_est: 0.0, u_truncation: 0.0, warning: None })
                }
            }
        })
        .map_err(err)?;
    to_py(py, &res)
}

/// Hedge ratios of an inverse-power contract at elapsed time `s` (years).
#[pyfunction]
#[pyo3(signature = (k, t_days, p1=1.0, p2=1.0, r=None, s=0.0, spot=None, vs=None, jump=None, config=None))]
#[allow(clippy::too_many_arguments)]
fn greeks(
    py: Python<'_>,
    k: f64,
    t_days: f64,
    p1: f64,
    p2: f64,
    r: Option<f64>,
    s: f64,
    spot: Option<f64>,
    vs: Option<f64>,
    jump: Option<(f64, f64)>,
    config: Option<&Bound<'_, PyAny>>,
) -> PyResult<Py<PyAny>> {
    let cfg = run_config(config)?;
    let c = OptionContract::qip(k, cfg.years(t_days), p1, p2, r.unwrap_or(cfg.spot), true);
    let st = HedgeState { s, spot: spot.unwrap_or(cfg.spot), vs };
    let jump = jump.map(|(dx, dy)| JumpSizes { dx, dy });
    let rep = py
        .detach(|| -> fsv_core::Result<_> {
            let m = cfg.model.fsv()?;
            Hedger::new(&m)?.with_quad(cfg.quad).greeks(&st, &c, jump)
        })
        .map_err(err)?;
    to_py(py, &rep)
}

/// Quanto call and put values over a power grid; `kind` is "equal" or
/// "independent". Puts are None where E[S_T^-p1] does not exist.
#[pyfunction]
#[pyo3(signature = (k, t_days, lo, hi, n, kind="equal", r=None, config=None))]
#[allow(clippy::too_many_arguments)]
fn power_surface(
    py: Python<'_>,
    k: f64,
    t_days: f64,
    lo: f64,
    hi: f64,
    n: usize,
    kind: &str,
    r: Option<f64>,
    config: Option<&Bound<'_, PyAny>>,
) -> PyResult<Py<PyAny>> {
    let cfg = run_config(config)?;
    let spec = match kind {
        "equal" => PowerSpec::Equal { lo, hi, n },
        "independent" => PowerSpec::Independent { lo, hi, n },
        _ => return Err(PyValueError::new_err(format!("unknown grid kind '{kind}'"))),
    };
    let rate = r.unwrap_or(cfg.spot);
    let rows = py
        .detach(|| -> fsv_core::Result<_> {
            let m = cfg.model.fsv()?;
            Pricer::new(&m, cfg.spot)?.with_quad(cfg.quad).with_discount_rate(cfg.discount_rate).power_grid(k, cfg.years(t_days), rate, &spec)
        })
        .map_err(err)?;
    to_py(py, &rows)
}

/// Calibrate a model family to a chain CSV (with its spot sidecar).
#[pyfunction]
#[pyo3(signature = (chain, family, kernel="III", fixed=None, calib_config=None, filter=true))]
fn calibrate(
    py: Python<'_>,
    chain: PathBuf,
    family: &str,
    kernel: &str,
    fixed: Option<std::collections::BTreeMap<String, f64>>,
    calib_config: Option<&Bound<'_, PyAny>>,
    filter: bool,
) -> PyResult<Py<PyAny>> {
    let family: ModelFamily = family.parse().map_err(err)?;
    let kernel: KernelFamily = kernel.parse().map_err(err)?;
    let mut cc: CalibConfig = from_py(calib_config)?;
    cc.fixed.extend(fixed.unwrap_or_default());
    let res = py
        .detach(|| -> fsv_core::Result<_> {
            let mut qs = load_chain(&chain)?;
            if filter {
                qs = arbitrage_filter(qs);
            }
            calib::calibrate(family, kernel, &qs, &cc)
        })
        .map_err(err)?;
    to_py(py, &res)
}

/// Run the arbitrage filter on a chain; writes the kept quotes when `out` is
/// given and returns every quote with its keep flag.
#[pyfunction]
#[pyo3(signature = (chain, out=None))]
fn filter_chain(py: Python<'_>, chain: PathBuf, out: Option<PathBuf>) -> PyResult<Py<PyAny>> {
    let qs = arbitrage_filter(load_chain(&chain).map_err(err)?);
    if let Some(p) = out {
        save_chain(&qs, &p, true).map_err(err)?;
    }
    to_py(py, &qs)
}

/// Simulate the configured ALJD model; returns summary statistics and
/// optionally writes the paths as CSV.
#[pyfunction]
#[pyo3(signature = (t_days, n_paths=None, seed=None, out=None, config=None))]
fn simulate(
    py: Python<'_>,
    t_days: f64,
    n_paths: Option<usize>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    config: Option<&Bound<'_, PyAny>>,
) -> PyResult<Py<PyAny>> {
    let cfg = run_config(config)?;
    let n = n_paths.unwrap_or(cfg.mc.n_paths);
    let seed = seed.unwrap_or(cfg.mc.seed);
    let batch = py
        .detach(|| -> fsv_core::Result<_> {
            let m = cfg.model.fsv()?;
            let b = simulate_aljd(&m, cfg.years(t_days), n, seed)?;
            if let Some(p) = &out {
                b.dump_csv(p, cfg.spot)?;
            }
            Ok(b)
        })
        .map_err(err)?;
    let summary = serde_json::json!({
        "n_paths": n,
        "seed": seed,
        "business_time_mean": batch.business_time_mean(),
        "realized_qv_mean": batch.realized_qv_mean(),
    });
    to_py(py, &summary)
}

/// Black–Scholes call with total variance `w`.
#[pyfunction]
fn black_scholes_call(spot: f64, strike: f64, w: f64) -> f64 {
    pricer::black_scholes_call(spot, strike, w)
}

/// The default run configuration as a dict.
#[pyfunction]
fn default_config(py: Python<'_>) -> PyResult<Py<PyAny>> {
    to_py(py, &RunConfig::default())
}

#[pymodule]
fn fsv_quant(m: &Bound<'_, PyModule>) -> PyResult<()> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        if let Ok(n) = v.trim().parse::<usize>() {
            // a pool may already exist if the host process built one
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
        }
    }
    m.add("FsvQuantError", m.py().get_type::<FsvQuantError>())?;
    m.add_function(wrap_pyfunction!(price, m)?)?;
    m.add_function(wrap_pyfunction!(greeks, m)?)?;
    m.add_function(wrap_pyfunction!(power_surface, m)?)?;
    m.add_function(wrap_pyfunction!(calibrate, m)?)?;
    m.add_function(wrap_pyfunction!(filter_chain, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(black_scholes_call, m)?)?;
    m.add_function(wrap_pyfunction!(default_config, m)?)?;
    Ok(())
}
