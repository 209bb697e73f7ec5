use thiserror::Error;

pub type Result<T, E = MonMinError> = std::result::Result<T, E>;

/// Errors raised by the MonMin arithmetic and the series computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MonMinError {
    #[error("non-positive input: {what} = {value}")]
    NonPositiveInput { what: &'static str, value: f64 },

    #[error("currency mismatch: expected {expected}, found {found}")]
    CurrencyMismatch { expected: String, found: String },

    #[error("item mismatch: reference is {reference:?}, local is {local:?}")]
    ItemMismatch { reference: String, local: String },

    #[error("invalid currency code {0:?}: expected 3-4 uppercase ASCII letters")]
    InvalidCurrencyCode(String),

    #[error("exchange rate base and quote are both {0}")]
    SameCurrency(String),

    #[error("series is empty")]
    EmptySeries,

    #[error("series needs at least 3 points, got {0}")]
    TooShort(usize),

    #[error("years must be strictly increasing: {previous} followed by {next}")]
    NonMonotoneYears { previous: i32, next: i32 },

    #[error("year {year}: {source}")]
    InYear {
        year: i32,
        #[source]
        source: Box<MonMinError>,
    },
}

/// Rejects zero, negative and non-finite inputs.
pub(crate) fn ensure_positive(what: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(MonMinError::NonPositiveInput { what, value })
    }
}

pub(crate) fn ensure_non_negative(what: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(MonMinError::NonPositiveInput { what, value })
    }
}
