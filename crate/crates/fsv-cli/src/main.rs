mod validate;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use fsv_core::calib::{calibrate, CalibConfig, CalibModel, ModelFamily};
use fsv_core::chain_io::{arbitrage_filter, load_chain, save_chain, QuoteSet};
use fsv_core::hedger::{HedgeState, Hedger, JumpSizes};
use fsv_core::mc_oracle::simulate_aljd;
use fsv_core::pricer::{PowerSpec, Pricer};
use fsv_core::{FsvError, KernelFamily, OptionContract, OptionStyle, PriceResult, RunConfig};
use serde_json::{json, Value};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const THREADS_ENV: &str = "FSV_QUANT_THREADS";

#[derive(Parser, Debug)]
#[command(name = "fsv", version, about = "Price, hedge and calibrate inverse-power crypto options")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Debug)]
struct GlobalOpts {
    /// JSON run configuration; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    spot: Option<f64>,
    #[arg(long, global = true)]
    day_count: Option<f64>,
    #[arg(long, global = true)]
    discount_rate: Option<f64>,
    /// Override one model parameter, e.g. --param kappa=9.7 (repeatable).
    #[arg(long = "param", global = true, value_parser = parse_kv)]
    params: Vec<(String, f64)>,
    #[arg(long, global = true)]
    rel_tol: Option<f64>,
    #[arg(long, global = true)]
    abs_tol: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Price one contract or every quote of a chain.
    Price(PriceArgs),
    /// Fit a model family to a chain.
    Calibrate(CalibrateArgs),
    /// Quanto call and put values over a grid of powers.
    Surface(SurfaceArgs),
    /// Simulate terminal log prices and business times.
    Simulate(SimulateArgs),
    /// Drop quotes that violate monotonicity or convexity in strike.
    Filter(FilterArgs),
    /// Run the built-in consistency checks on the configured model.
    Validate(validate::ValidateArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Style {
    Direct,
    Ip,
    Qip,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Method {
    Parity,
    BakshiMadan,
    CarrMadan,
}

#[derive(Args, Debug)]
struct PriceArgs {
    #[arg(long, value_enum, default_value = "direct")]
    style: Style,
    #[arg(long)]
    k: Option<f64>,
    #[arg(long)]
    t_days: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    p1: f64,
    #[arg(long, default_value_t = 1.0)]
    p2: f64,
    /// Conversion rate R, a number or `spot`.
    #[arg(long, default_value = "spot")]
    r: String,
    #[arg(long)]
    put: bool,
    /// Direct-call formula.
    #[arg(long, value_enum, default_value = "parity")]
    method: Method,
    #[arg(long, default_value_t = 1.5)]
    alpha: f64,
    /// Price every quote of this chain CSV (spot from its sidecar).
    #[arg(long, conflicts_with_all = ["k", "t_days"])]
    chain: Option<PathBuf>,
    /// Add hedge ratios at elapsed time --s (years).
    #[arg(long)]
    greeks: bool,
    #[arg(long, default_value_t = 0.0)]
    s: f64,
    /// Variance-swap value at s; model implied if absent.
    #[arg(long)]
    vs: Option<f64>,
    /// Co-jump (ΔX, ΔY) for the jump response, as DX,DY.
    #[arg(long, value_parser = parse_pair)]
    jump: Option<(f64, f64)>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CalibrateArgs {
    #[arg(long)]
    chain: PathBuf,
    #[arg(long, value_parser = parse_family)]
    family: ModelFamily,
    #[arg(long, default_value = "III", value_parser = parse_kernel)]
    kernel: KernelFamily,
    /// Pin a parameter, e.g. --fix m=0.1 (repeatable).
    #[arg(long, value_parser = parse_kv)]
    fix: Vec<(String, f64)>,
    /// JSON calibration settings (genetic and pattern search, quadrature).
    #[arg(long)]
    calib_config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    population: Option<usize>,
    #[arg(long)]
    generations: Option<usize>,
    #[arg(long)]
    max_evals: Option<usize>,
    /// Calibrate on the chain as given, without the arbitrage filter.
    #[arg(long)]
    no_filter: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SurfaceArgs {
    #[arg(long)]
    k: f64,
    #[arg(long)]
    t_days: f64,
    #[arg(long, default_value = "spot")]
    r: String,
    /// p1 = p2 on a line: LO,HI,N
    #[arg(long, value_parser = parse_grid, conflicts_with = "independent", required_unless_present = "independent")]
    equal: Option<(f64, f64, usize)>,
    /// p1 and p2 on a square: LO,HI,N
    #[arg(long, value_parser = parse_grid)]
    independent: Option<(f64, f64, usize)>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long)]
    t_days: f64,
    #[arg(long)]
    n_paths: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// CSV with columns path_id, T_t, log_s_T.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct FilterArgs {
    #[arg(long)]
    chain: PathBuf,
    /// Filtered chain CSV; a spot sidecar is written next to it.
    #[arg(long)]
    out: PathBuf,
}

fn parse_kv(s: &str) -> std::result::Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected NAME=VALUE, got '{s}'"))?;
    let v: f64 = v.trim().parse().map_err(|e| format!("{k}: {e}"))?;
    Ok((k.trim().to_string(), v))
}

fn parse_pair(s: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected A,B, got '{s}'"))?;
    Ok((a.trim().parse().map_err(|e| format!("{e}"))?, b.trim().parse().map_err(|e| format!("{e}"))?))
}

fn parse_grid(s: &str) -> std::result::Result<(f64, f64, usize), String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected LO,HI,N, got '{s}'"));
    }
    let lo: f64 = parts[0].parse().map_err(|e| format!("{e}"))?;
    let hi: f64 = parts[1].parse().map_err(|e| format!("{e}"))?;
    let n: usize = parts[2].parse().map_err(|e| format!("{e}"))?;
    if !(lo > 0.0 && hi >= lo && n >= 1) {
        return Err("need 0 < LO <= HI and N >= 1".into());
    }
    Ok((lo, hi, n))
}

fn parse_family(s: &str) -> std::result::Result<ModelFamily, String> {
    s.parse().map_err(|e: FsvError| e.to_string())
}

fn parse_kernel(s: &str) -> std::result::Result<KernelFamily, String> {
    s.parse().map_err(|e: FsvError| e.to_string())
}

fn load_config(g: &GlobalOpts) -> Result<RunConfig> {
    let mut cfg = match &g.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading config {}", p.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing config {}", p.display()))?
        }
        None => RunConfig::default(),
    };
    if let Some(v) = g.spot {
        cfg.spot = v;
    }
    if let Some(v) = g.day_count {
        cfg.day_count = v;
    }
    if let Some(v) = g.discount_rate {
        cfg.discount_rate = v;
    }
    if let Some(v) = g.rel_tol {
        cfg.quad.rel_tol = v;
    }
    if let Some(v) = g.abs_tol {
        cfg.quad.abs_tol = v;
    }
    for (k, v) in &g.params {
        cfg.model.params.insert(k.clone(), *v);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn conversion_rate(r: &str, spot: f64) -> Result<f64> {
    if r.eq_ignore_ascii_case("spot") {
        return Ok(spot);
    }
    let v: f64 = r.parse().map_err(|_| anyhow!("--r must be a number or 'spot', got '{r}'"))?;
    Ok(v)
}

fn contract(style: Style, k: f64, t: f64, p1: f64, p2: f64, rate: f64, is_call: bool) -> OptionContract {
    match style {
        Style::Direct => OptionContract { is_call, ..OptionContract::direct_call(k, t) },
        Style::Ip => OptionContract::inverse_power(k, t, p1, p2, is_call),
        Style::Qip => OptionContract::qip(k, t, p1, p2, rate, is_call),
    }
}

fn style_name(s: OptionStyle) -> &'static str {
    match s {
        OptionStyle::DirectCall => "direct",
        OptionStyle::InversePower => "ip",
        OptionStyle::QuantoInversePower => "qip",
    }
}

fn price_one(cfg: &RunConfig, pricer: Option<&Pricer>, c: &OptionContract, method: Method, alpha: f64) -> Result<PriceResult> {
    let Some(pr) = pricer else {
        let model = cfg.model.build()?;
        let value = fsv_core::calib::benchmark_price(&model, c, cfg.spot)? * (-cfg.discount_rate * c.maturity).exp();
        return Ok(PriceResult { value, integral_abs_err_est: 0.0, u_truncation: 0.0, warning: None });
    };
    Ok(match (c.style, c.is_call, method) {
        (OptionStyle::DirectCall, true, Method::BakshiMadan) => pr.call_bakshi_madan(c)?,
        (OptionStyle::DirectCall, true, Method::CarrMadan) => pr.call_carr_madan(c, alpha)?,
        _ => pr.price(c)?,
    })
}

fn result_json(c: &OptionContract, t_days: f64, r: &PriceResult) -> Value {
    let mut v = json!({
        "style": style_name(c.style),
        "strike": c.strike,
        "t_days": t_days,
        "maturity": c.maturity,
        "p1": c.p1,
        "p2": c.p2,
        "conversion_rate": c.conversion_rate,
        "is_call": c.is_call,
        "value": r.value,
        "integral_abs_err_est": r.integral_abs_err_est,
        "u_truncation": r.u_truncation,
    });
    if let Some(w) = &r.warning {
        v["warning"] = json!(w);
    }
    v
}

fn emit(v: &Value, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(v)?;
    if let Some(p) = out {
        std::fs::write(p, &text).with_context(|| format!("writing {}", p.display()))?;
    }
    println!("{text}");
    Ok(())
}

fn fsv_pricer(cfg: &RunConfig) -> Result<Option<Pricer>> {
    match cfg.model.build()? {
        CalibModel::Fsv(m) => Ok(Some(Pricer::new(&m, cfg.spot)?.with_quad(cfg.quad).with_discount_rate(cfg.discount_rate))),
        _ => Ok(None),
    }
}

fn cmd_price(cfg: RunConfig, a: &PriceArgs) -> Result<()> {
    if let Some(path) = &a.chain {
        let qs = load_chain(path).with_context(|| format!("loading chain {}", path.display()))?;
        let cfg = RunConfig { spot: qs.spot, ..cfg };
        let pricer = fsv_pricer(&cfg)?;
        let rate = conversion_rate(&a.r, cfg.spot)?;
        let mut rows = Vec::with_capacity(qs.quotes.len());
        for q in &qs.quotes {
            let c = contract(a.style, q.strike, cfg.years(q.maturity_days as f64), a.p1, a.p2, rate, !a.put);
            let r = price_one(&cfg, pricer.as_ref(), &c, a.method, a.alpha)?;
            let mut row = result_json(&c, q.maturity_days as f64, &r);
            row["market"] = json!(q.price);
            row["kept"] = json!(q.kept);
            rows.push(row);
        }
        return emit(&json!({ "spot": cfg.spot, "n_quotes": rows.len(), "rows": rows }), a.out.as_deref());
    }
    let k = a.k.ok_or_else(|| anyhow!("--k is required without --chain"))?;
    let t_days = a.t_days.ok_or_else(|| anyhow!("--t-days is required without --chain"))?;
    let rate = conversion_rate(&a.r, cfg.spot)?;
    let c = contract(a.style, k, cfg.years(t_days), a.p1, a.p2, rate, !a.put);
    let pricer = fsv_pricer(&cfg)?;
    let r = price_one(&cfg, pricer.as_ref(), &c, a.method, a.alpha)?;
    let mut v = result_json(&c, t_days, &r);
    v["spot"] = json!(cfg.spot);
    if a.greeks {
        if c.style == OptionStyle::DirectCall {
            bail!("hedge ratios are available for inverse-power contracts");
        }
        let model = cfg.model.fsv()?;
        let h = Hedger::new(&model)?.with_quad(cfg.quad);
        let st = HedgeState { s: a.s, spot: cfg.spot, vs: a.vs };
        let jump = a.jump.map(|(dx, dy)| JumpSizes { dx, dy });
        v["greeks"] = serde_json::to_value(h.greeks(&st, &c, jump)?)?;
    }
    emit(&v, a.out.as_deref())
}

fn cmd_calibrate(cfg: RunConfig, a: &CalibrateArgs) -> Result<()> {
    let mut cc: CalibConfig = match &a.calib_config {
        Some(p) => serde_json::from_str(&std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?)?,
        None => CalibConfig { day_count: cfg.day_count, ..CalibConfig::default() },
    };
    if let Some(s) = a.seed {
        cc.ga.seed = s;
        cc.ps.seed = s;
    }
    if let Some(n) = a.population {
        cc.ga.population = n;
    }
    if let Some(n) = a.generations {
        cc.ga.generations = n;
    }
    if let Some(n) = a.max_evals {
        cc.ps.max_evals = n;
    }
    for (k, v) in &a.fix {
        cc.fixed.insert(k.clone(), *v);
    }
    let mut qs: QuoteSet = load_chain(&a.chain).with_context(|| format!("loading chain {}", a.chain.display()))?;
    if !a.no_filter {
        qs = arbitrage_filter(qs);
    }
    let res = calibrate(a.family, a.kernel, &qs, &cc)?;
    let mut v = serde_json::to_value(&res)?;
    v["n_dropped"] = json!(qs.n_dropped());
    emit(&v, a.out.as_deref())
}

fn cmd_surface(cfg: RunConfig, a: &SurfaceArgs) -> Result<()> {
    let spec = match (a.equal, a.independent) {
        (Some((lo, hi, n)), _) => PowerSpec::Equal { lo, hi, n },
        (None, Some((lo, hi, n))) => PowerSpec::Independent { lo, hi, n },
        (None, None) => bail!("one of --equal or --independent is required"),
    };
    let rate = conversion_rate(&a.r, cfg.spot)?;
    let pr = fsv_pricer(&cfg)?.ok_or_else(|| anyhow!("surface needs an FSV model family"))?;
    let rows = pr.power_grid(a.k, cfg.years(a.t_days), rate, &spec)?;
    let missing = rows.iter().filter(|r| r.put.is_none()).count();
    if missing > 0 {
        eprintln!("{}", json!({ "warning": format!("{missing} puts left empty: E[S_T^-p1] does not exist under the model") }));
    }
    let sink: Box<dyn Write> = match &a.out {
        Some(p) => Box::new(std::fs::File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(std::io::stdout().lock()),
    };
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["p1", "p2", "call", "put"])?;
    for r in &rows {
        w.write_record([r.p1.to_string(), r.p2.to_string(), r.call.to_string(), r.put.map(|p| p.to_string()).unwrap_or_default()])?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_simulate(cfg: RunConfig, a: &SimulateArgs) -> Result<()> {
    let model = cfg.model.fsv()?;
    let n = a.n_paths.unwrap_or(cfg.mc.n_paths);
    let seed = a.seed.unwrap_or(cfg.mc.seed);
    let t = cfg.years(a.t_days);
    let batch = simulate_aljd(&model, t, n, seed)?;
    batch.dump_csv(&a.out, cfg.spot)?;
    let bt = batch.business_time_mean();
    let qv = batch.realized_qv_mean();
    emit(
        &json!({
            "n_paths": n,
            "seed": seed,
            "t_days": a.t_days,
            "out": a.out,
            "business_time_mean": bt,
            "realized_qv_mean": qv,
        }),
        None,
    )
}

fn cmd_filter(a: &FilterArgs) -> Result<()> {
    let qs = arbitrage_filter(load_chain(&a.chain).with_context(|| format!("loading chain {}", a.chain.display()))?);
    save_chain(&qs, &a.out, true)?;
    let dropped: Vec<Value> = qs
        .quotes
        .iter()
        .filter(|q| !q.kept)
        .map(|q| json!({ "strike": q.strike, "maturity_days": q.maturity_days, "price": q.price, "reason": q.drop_reason }))
        .collect();
    emit(
        &json!({ "n_quotes": qs.quotes.len(), "n_kept": qs.quotes.len() - dropped.len(), "n_dropped": dropped.len(), "dropped": dropped }),
        None,
    )
}

fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v.trim().parse().map_err(|_| anyhow!("{THREADS_ENV} must be a positive integer, got '{v}'"))?;
        if n == 0 {
            bail!("{THREADS_ENV} must be a positive integer");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn error_kind(e: &anyhow::Error) -> &'static str {
    match e.downcast_ref::<FsvError>() {
        Some(FsvError::InvalidParams(_)) | Some(FsvError::MomentUnavailable(_)) | Some(FsvError::InvalidBase(_)) => "invalid_input",
        Some(FsvError::Schema { .. }) | Some(FsvError::NonPositivePrice { .. }) | Some(FsvError::Csv(_)) => "schema",
        Some(FsvError::Io(_)) => "io",
        Some(FsvError::Json(_)) => "config",
        Some(FsvError::PricingFailed { .. }) | Some(FsvError::NegativePrice { .. }) => "pricing",
        Some(_) => "numerical",
        None if e.downcast_ref::<std::io::Error>().is_some() => "io",
        None if e.downcast_ref::<serde_json::Error>().is_some() => "config",
        None => "error",
    }
}

fn run(cli: Cli) -> Result<bool> {
    init_threads()?;
    if let Command::Filter(a) = &cli.cmd {
        cmd_filter(a)?;
        return Ok(true);
    }
    let cfg = load_config(&cli.global)?;
    match &cli.cmd {
        Command::Price(a) => cmd_price(cfg, a)?,
        Command::Calibrate(a) => cmd_calibrate(cfg, a)?,
        Command::Surface(a) => cmd_surface(cfg, a)?,
        Command::Simulate(a) => cmd_simulate(cfg, a)?,
        Command::Validate(a) => return validate::run(&cfg, a),
        Command::Filter(_) => unreachable!(),
    }
    Ok(true)
}

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            let chain: Vec<String> = e.chain().skip(1).map(|c| c.to_string()).collect();
            let v = json!({ "error": { "kind": error_kind(&e), "message": e.to_string(), "causes": chain } });
            eprintln!("{}", serde_json::to_string_pretty(&v).unwrap_or_else(|_| e.to_string()));
            ExitCode::FAILURE
        }
    }
}
