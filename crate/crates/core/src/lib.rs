//! The Monetary Minute (MonMin, ṁ): a unit of account worth 1/525600 of a
//! year's GDP per capita.
//!
//! * [`unit`] holds the domain types and the MonMin arithmetic.
//! * [`series`] restates a money stock series in MonMin and finds its extrema.
//! * [`ingest`] loads the CSV inputs.
//! * [`report`] renders tables and plot data.
//! * [`cli`] wires everything into the `monmin` binary.

pub mod cli;
pub mod error;
pub mod ingest;
pub mod report;
pub mod rounding;
pub mod series;
pub mod unit;

pub use error::{MonMinError, Result};
pub use series::{detect_extrema, m1_in_monmin, series_in_monmin, AggregateSeries, AggregateYear, ExtremaReport};
pub use unit::{
    compute_cm, cross_cm, from_monmin, invert_cm, parity_rate, parity_rate_any_item, percent_of_salary, to_monmin,
    CmSource, CurrencyCode, EconomySnapshot, ExchangeRate, MonMinPrice, MonMinValue, PriceQuote, RateTable,
    TimeStandard,
};
