use thiserror::Error;

/// Errors produced by the algebra kernel, the network model and the
/// simulators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} would need {requested} rows or columns, above the dimension cap of {cap}")]
    DimensionCap {
        what: &'static str,
        requested: u128,
        cap: usize,
    },

    #[error("shape mismatch in {op}: {detail}")]
    Shape { op: &'static str, detail: String },

    #[error("{0}")]
    Domain(String),

    #[error("value {value} out of range [{min}, {max}]")]
    OutOfRange {
        value: usize,
        min: usize,
        max: usize,
    },

    #[error("matrix entry at row {row}, column {column} is not finite")]
    NonFinite { row: usize, column: usize },

    #[error("column {column} sums to {sum}, expected 1")]
    ColumnSum { column: usize, sum: f64 },

    #[error("negative entry {value} at row {row}, column {column}")]
    NegativeEntry {
        row: usize,
        column: usize,
        value: f64,
    },

    #[error("vector is not a probability distribution: {0}")]
    NotDistribution(String),

    #[error("distribution drifted {drift:e} off the simplex (hard limit {limit:e})")]
    Drift { drift: f64, limit: f64 },

    #[error("exact consistency check needs k^n = {size} coefficients, above the cap of {cap}; use the sampled method instead")]
    ExactCap { size: u128, cap: u128 },

    #[error("{0}")]
    Mode(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn shape(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Shape {
            op,
            detail: detail.into(),
        }
    }

    pub fn is_dimension_cap(&self) -> bool {
        matches!(self, Error::DimensionCap { .. } | Error::ExactCap { .. })
    }
}
