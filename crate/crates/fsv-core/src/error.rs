use thiserror::Error;

#[derive(Debug, Error)]
pub enum FsvError {
    #[error("{what} did not converge")]
    NonConvergence { what: &'static str },
    #[error("2F1 parameter c is a non-positive integer")]
    PoleAtC,
    #[error("{what}: argument lies on the branch cut")]
    BranchCut { what: &'static str },
    #[error("non-finite value produced in {what}")]
    NotFinite { what: &'static str },
    #[error("kernel lag {v:e} is too small for a singular kernel")]
    SingularLag { v: f64 },
    #[error("argument outside the analyticity strip of {which}")]
    OutsideStrip { which: &'static str },
    #[error("integrand did not decay before u = {u_max}")]
    NoDecay { u_max: f64 },
    #[error("quadrature panel budget of {max_panels} exceeded")]
    PanelBudgetExceeded { max_panels: usize },
    #[error("moment unavailable: {0}")]
    MomentUnavailable(String),
    #[error("base process not supported here: {0}")]
    InvalidBase(&'static str),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("negative price {value:e} below clipping tolerance")]
    NegativePrice { value: f64 },
    #[error("pricing failed for quote {index}: {source}")]
    PricingFailed {
        index: usize,
        #[source]
        source: Box<FsvError>,
    },
    #[error("schema error at line {line}: {msg}")]
    Schema { line: usize, msg: String },
    #[error("non-positive price at line {line}")]
    NonPositivePrice { line: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, FsvError>;
