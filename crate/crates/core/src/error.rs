use thiserror::Error;

use crate::role::Role;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("column `{column}` not found in {source_name}")]
    MissingColumn { column: String, source_name: String },

    #[error("years are not contiguous: {previous} followed by {next}")]
    GapInYears { previous: i32, next: i32 },

    #[error("only {found} usable observations, need at least {required}")]
    TooFewObservations { found: usize, required: usize },

    #[error("cannot parse `{value}` in column `{column}` (row {row})")]
    Parse { column: String, row: usize, value: String },

    #[error("sample span {start}-{end} is not covered by the data ({first}-{last})")]
    SpanOutsideData { start: i32, end: i32, first: i32, last: i32 },

    #[error("no panel covers the span of `{target}`")]
    NoOverlap { target: String },

    #[error("`{target}` is the only panel available for an aggregate that excludes it")]
    SelfOnly { target: String },

    #[error("role {role} contains a non-positive value ({value}) at year {year}; cannot take logs")]
    NonPositiveValue { role: Role, year: i32, value: f64 },

    #[error("role {0} missing from panel")]
    MissingRole(Role),

    #[error("insufficient sample for equation {equation}: {rows} rows, {regressors} regressors")]
    InsufficientSample { equation: Role, rows: usize, regressors: usize },

    #[error("regressor matrix{} is rank deficient", .context.as_deref().map(|c| format!(" for {c}")).unwrap_or_default())]
    RankDeficient { context: Option<String> },

    #[error("matrix is not positive definite: {0}")]
    NotPositiveDefinite(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("structural factor has a zero diagonal entry for {0}")]
    ZeroDiagonal(Role),

    #[error("horizon {0} is not in the table")]
    HorizonMissing(usize),

    #[error("metric `{metric}` missing for country `{country}`")]
    MissingMetric { metric: String, country: String },

    #[error("data-generating process is explosive (spectral radius {0:.4})")]
    ExplosiveDgp(f64),

    #[error("supply and demand curves are parallel; no equilibrium")]
    NoEquilibrium,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
