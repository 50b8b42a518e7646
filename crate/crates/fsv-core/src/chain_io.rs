//! Option-chain files, strike-wise no-arbitrage filtering and persistence.

use crate::error::{FsvError, Result};
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::{Path, PathBuf};

pub const CSV_HEADER: [&str; 3] = ["strike_usd", "maturity_days", "last_price_usd"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DropReason {
    Monotonicity,
    Convexity,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quote {
    pub strike: f64,
    pub maturity_days: u32,
    pub price: f64,
    pub kept: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drop_reason: Option<DropReason>,
}

impl Quote {
    pub fn new(strike: f64, maturity_days: u32, price: f64) -> Self {
        Self { strike, maturity_days, price, kept: true, drop_reason: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuoteSet {
    pub spot: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub as_of: Option<String>,
    pub quotes: Vec<Quote>,
}

#[derive(Debug, Serialize, Deserialize)]
struct Sidecar {
    spot_usd: f64,
    #[serde(default)]
    as_of: Option<String>,
}

/// The spot sidecar sits next to the chain with a `.json` extension.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

impl QuoteSet {
    pub fn kept(&self) -> impl Iterator<Item = &Quote> {
        self.quotes.iter().filter(|q| q.kept)
    }

    pub fn n_dropped(&self) -> usize {
        self.quotes.iter().filter(|q| !q.kept).count()
    }

    /// Distinct maturities in ascending order.
    pub fn maturities(&self) -> Vec<u32> {
        let mut m: Vec<u32> = self.quotes.iter().map(|q| q.maturity_days).collect();
        m.sort_unstable();
        m.dedup();
        m
    }

    fn sort(&mut self) {
        self.quotes.sort_by(|a, b| a.maturity_days.cmp(&b.maturity_days).then(a.strike.total_cmp(&b.strike)));
    }
}

fn schema(line: usize, msg: impl Into<String>) -> FsvError {
    FsvError::Schema { line, msg: msg.into() }
}

/// Parse chain rows from CSV text; `line` numbers count the header as line 1.
pub fn parse_chain_csv(text: &str) -> Result<Vec<Quote>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let header = rdr.headers().map_err(|e| schema(1, e.to_string()))?.clone();
    if header.iter().collect::<Vec<_>>() != CSV_HEADER {
        return Err(schema(1, format!("expected header {}", CSV_HEADER.join(","))));
    }
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| schema(line, e.to_string()))?;
        if rec.len() != 3 {
            return Err(schema(line, "expected 3 fields"));
        }
        let strike: f64 = rec[0].parse().map_err(|_| schema(line, "strike_usd is not a number"))?;
        let days: u32 = rec[1].parse().map_err(|_| schema(line, "maturity_days is not a positive integer"))?;
        let price: f64 = rec[2].parse().map_err(|_| schema(line, "last_price_usd is not a number"))?;
        if !(strike > 0.0 && strike.is_finite()) {
            return Err(schema(line, "strike must be positive"));
        }
        if days == 0 {
            return Err(schema(line, "maturity_days must be positive"));
        }
        if !(price > 0.0 && price.is_finite()) {
            return Err(FsvError::NonPositivePrice { line });
        }
        out.push(Quote::new(strike, days, price));
    }
    Ok(out)
}

/// Build a sorted quote set, rejecting duplicate (maturity, strike) pairs.
pub fn quote_set(spot: f64, as_of: Option<String>, quotes: Vec<Quote>) -> Result<QuoteSet> {
    if !(spot > 0.0 && spot.is_finite()) {
        return Err(FsvError::InvalidParams("spot must be positive".into()));
    }
    let mut qs = QuoteSet { spot, as_of, quotes };
    qs.sort();
    for w in qs.quotes.windows(2) {
        if w[0].maturity_days == w[1].maturity_days && w[0].strike == w[1].strike {
            return Err(schema(0, format!("duplicate strike {} at {} days", w[0].strike, w[0].maturity_days)));
        }
    }
    Ok(qs)
}

/// Load a chain CSV and its spot sidecar.
pub fn load_chain(path: &Path) -> Result<QuoteSet> {
    let quotes = parse_chain_csv(&fs::read_to_string(path)?)?;
    let side = sidecar_path(path);
    let text = fs::read_to_string(&side)
        .map_err(|e| FsvError::Schema { line: 0, msg: format!("spot sidecar {}: {e}", side.display()) })?;
    let sc: Sidecar = serde_json::from_str(&text)?;
    quote_set(sc.spot_usd, sc.as_of, quotes)
}

/// Write the kept quotes (or all, if `kept_only` is false) and the sidecar.
pub fn save_chain(qs: &QuoteSet, path: &Path, kept_only: bool) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(CSV_HEADER)?;
    for q in qs.quotes.iter().filter(|q| q.kept || !kept_only) {
        w.write_record([q.strike.to_string(), q.maturity_days.to_string(), q.price.to_string()])?;
    }
    w.flush()?;
    let sc = Sidecar { spot_usd: qs.spot, as_of: qs.as_of.clone() };
    fs::write(sidecar_path(path), serde_json::to_string_pretty(&sc)?)?;
    Ok(())
}

// Tolerance on price comparisons, relative to the ladder's largest price.
const REL_TOL: f64 = 1e-12;

/// Index of the next monotonicity violator among `idx`: the higher-strike
/// quote of the first increasing pair.
fn monotonicity_violator(q: &[Quote], idx: &[usize], tol: f64) -> Option<usize> {
    idx.windows(2).find(|w| q[w[1]].price > q[w[0]].price + tol).map(|w| w[1])
}

/// Index of the middle quote with the largest convexity excess, if any.
fn convexity_violator(q: &[Quote], idx: &[usize], tol: f64) -> Option<usize> {
    let mut worst: Option<(usize, f64)> = None;
    for w in idx.windows(3) {
        let (a, b, c) = (&q[w[0]], &q[w[1]], &q[w[2]]);
        let d1 = b.strike - a.strike;
        let d2 = c.strike - b.strike;
        let chord = (d2 * a.price + d1 * c.price) / (d1 + d2);
        let excess = b.price - chord;
        if excess > tol && worst.is_none_or(|(_, e)| excess > e) {
            worst = Some((w[1], excess));
        }
    }
    worst.map(|(i, _)| i)
}

/// Mark quotes that break call-price monotonicity or convexity in strike,
/// maturity by maturity, until no violation remains. Values and order are
/// never changed; already dropped quotes stay dropped.
pub fn arbitrage_filter(mut qs: QuoteSet) -> QuoteSet {
    for m in qs.maturities() {
        loop {
            let idx: Vec<usize> = (0..qs.quotes.len()).filter(|&i| qs.quotes[i].kept && qs.quotes[i].maturity_days == m).collect();
            let scale = idx.iter().map(|&i| qs.quotes[i].price).fold(0.0, f64::max);
            let tol = REL_TOL * scale;
            let hit = monotonicity_violator(&qs.quotes, &idx, tol)
                .map(|i| (i, DropReason::Monotonicity))
                .or_else(|| convexity_violator(&qs.quotes, &idx, tol).map(|i| (i, DropReason::Convexity)));
            match hit {
                Some((i, why)) => {
                    qs.quotes[i].kept = false;
                    qs.quotes[i].drop_reason = Some(why);
                }
                None => break,
            }
        }
    }
    qs
}
