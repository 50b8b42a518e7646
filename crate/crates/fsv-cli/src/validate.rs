//! Built-in checks on the configured model, grouped so a failure names the
//! part of the engine that disagrees.

use anyhow::Result;
use clap::Args;
use fsv_core::calib::CalibModel;
use fsv_core::charfn::CfContext;
use fsv_core::levy::BaseProcess;
use fsv_core::mc_oracle::{empirical_cf, mc_price, simulate_aljd};
use fsv_core::{FsvModel, KernelFamily, OptionContract, Pricer, RunConfig, C64};
use serde_json::json;

const CLOSED_FORM_TOL: f64 = 1e-8;
const CF_TOL: f64 = 1e-10;
const ROUTE_TOL: f64 = 1e-6;
const Z_LIMIT: f64 = 3.0;

#[derive(Args, Debug)]
pub struct ValidateArgs {
    #[arg(long, default_value_t = 47.0)]
    t_days: f64,
    #[arg(long)]
    n_paths: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    skip_mc: bool,
    /// Carr–Madan damping used in the route comparison.
    #[arg(long, default_value_t = 0.75)]
    alpha: f64,
}

struct Group {
    name: &'static str,
    status: &'static str,
    metric: f64,
    limit: f64,
    detail: String,
}

impl Group {
    fn checked(name: &'static str, metric: f64, limit: f64, detail: String) -> Self {
        let status = if metric.is_finite() && metric < limit { "pass" } else { "fail" };
        Self { name, status, metric, limit, detail }
    }

    fn skipped(name: &'static str, why: &str) -> Self {
        Self { name, status: "skipped", metric: f64::NAN, limit: f64::NAN, detail: why.to_string() }
    }

    fn failed(name: &'static str, e: impl std::fmt::Display) -> Self {
        Self { name, status: "fail", metric: f64::NAN, limit: f64::NAN, detail: format!("error: {e}") }
    }
}

fn closed_form(model: &FsvModel, t: f64) -> Result<Group> {
    let ev = model.evaluator()?;
    let cs = model.kernel.breakpoint();
    let mut worst: f64 = 0.0;
    for tau in [0.5 * cs, cs + t, cs + 1.0] {
        for u in [0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0] {
            let z = C64::new(u, 0.0);
            let a = ev.s_integral_closed_type3(tau, z)?;
            let b = ev.s_integral_numeric(tau, z)?;
            worst = worst.max((a - b).norm() / b.norm());
        }
    }
    Ok(Group::checked("closed_form", worst, CLOSED_FORM_TOL, "closed-form vs numeric s-integral, max rel err".into()))
}

fn cf_invariants(model: &FsvModel, spot: f64, t: f64) -> Result<Group> {
    let ev = model.evaluator()?;
    let ctx = CfContext::spot(spot, t);
    let cf = |u: C64| ev.cf(&ctx, u);
    let mut worst = (cf(C64::new(0.0, 0.0))? - 1.0).norm();
    worst = worst.max((cf(C64::new(0.0, -1.0))? - spot).norm() / spot);
    for u in [0.3, 1.0, 3.0, 10.0, 30.0] {
        let p = cf(C64::new(u, 0.0))?;
        let m = cf(C64::new(-u, 0.0))?;
        worst = worst.max((p - m.conj()).norm()).max(p.norm() - 1.0);
    }
    Ok(Group::checked("cf_invariants", worst, CF_TOL, "normalization, martingale, symmetry and modulus, max violation".into()))
}

fn routes(pr: &Pricer, spot: f64, t: f64, alpha: f64) -> Result<Group> {
    let mut worst: f64 = 0.0;
    for m in [0.8, 0.9, 1.0, 1.1, 1.2] {
        let c = OptionContract::direct_call(m * spot, t);
        let a = pr.call_parity(&c)?.value;
        let b = pr.call_bakshi_madan(&c)?.value;
        let d = pr.call_carr_madan(&c, alpha)?.value;
        worst = worst.max((a - b).abs() / a).max((a - d).abs() / a);
    }
    Ok(Group::checked("pricing_routes", worst, ROUTE_TOL, "parity vs Bakshi–Madan vs Carr–Madan, max rel diff".into()))
}

fn monte_carlo(model: &FsvModel, pr: &Pricer, spot: f64, t: f64, n: usize, seed: u64) -> Result<Group> {
    let batch = simulate_aljd(model, t, n, seed)?;
    let mut zs: Vec<(String, f64)> = Vec::new();
    let c = OptionContract::direct_call(spot, t);
    let e = mc_price(&batch, spot, &c);
    zs.push(("atm call".into(), (e.mean - pr.call_parity(&c)?.value) / e.std_err));
    let ev = model.evaluator()?;
    for u in [1.0, 3.0, 7.0] {
        let emp = empirical_cf(&batch, spot, u);
        let th = ev.cf(&CfContext::spot(spot, t), C64::new(u, 0.0))?;
        zs.push((format!("cf re u={u}"), (emp.value.re - th.re) / emp.se_re));
        zs.push((format!("cf im u={u}"), (emp.value.im - th.im) / emp.se_im));
    }
    let bt = batch.business_time_mean();
    zs.push(("E[T]".into(), (bt.mean - model.expected_business_time(t)) / bt.std_err));
    let qv = batch.realized_qv_mean();
    zs.push(("mean QV".into(), (qv.mean - model.model_variance_swap(t)) / qv.std_err));
    let worst = zs.iter().map(|(_, z)| z.abs()).fold(0.0, f64::max);
    let detail: Vec<String> = zs.iter().map(|(k, z)| format!("{k} z={z:+.2}")).collect();
    Ok(Group::checked("monte_carlo", worst, Z_LIMIT, format!("{n} paths, max |z|; {}", detail.join(", "))))
}

fn guard(name: &'static str, r: Result<Group>) -> Group {
    r.unwrap_or_else(|e| Group::failed(name, e))
}

pub fn run(cfg: &RunConfig, a: &ValidateArgs) -> Result<bool> {
    let t = cfg.years(a.t_days);
    let mut groups = Vec::new();
    match cfg.model.build()? {
        CalibModel::Fsv(model) => {
            groups.push(if model.kernel.family == KernelFamily::TypeIII {
                guard("closed_form", closed_form(&model, t))
            } else {
                Group::skipped("closed_form", "kernel is not type III")
            });
            groups.push(guard("cf_invariants", cf_invariants(&model, cfg.spot, t)));
            let pr = Pricer::new(&model, cfg.spot)?.with_quad(cfg.quad);
            groups.push(guard("pricing_routes", routes(&pr, cfg.spot, t, a.alpha)));
            groups.push(if a.skip_mc {
                Group::skipped("monte_carlo", "disabled by --skip-mc")
            } else if !matches!(model.base, BaseProcess::Aljd(_)) {
                Group::skipped("monte_carlo", "simulation covers the ALJD base process")
            } else {
                let n = a.n_paths.unwrap_or(cfg.mc.n_paths);
                guard("monte_carlo", monte_carlo(&model, &pr, cfg.spot, t, n, a.seed.unwrap_or(cfg.mc.seed)))
            });
        }
        _ => {
            for name in ["closed_form", "cf_invariants", "pricing_routes", "monte_carlo"] {
                groups.push(Group::skipped(name, "benchmark family"));
            }
        }
    }
    let ok = groups.iter().all(|g| g.status != "fail");
    let list: Vec<_> = groups
        .iter()
        .map(|g| {
            let num = |x: f64| if x.is_finite() { json!(x) } else { json!(null) };
            json!({ "name": g.name, "status": g.status, "metric": num(g.metric), "limit": num(g.limit), "detail": g.detail })
        })
        .collect();
    let out = json!({ "passed": ok, "family": cfg.model.family, "kernel": cfg.model.kernel, "t_days": a.t_days, "groups": list });
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(ok)
}
