//! Money stock M1 restated in Monetary Minutes, year by year, and the local
//! peaks and troughs of the resulting curve.

use crate::error::{ensure_non_negative, ensure_positive, MonMinError, Result};
use crate::unit::{CurrencyCode, TimeStandard};

/// One year of aggregate data, all money amounts absolute.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateYear {
    pub year: i32,
    pub m1: f64,
    pub gdp: f64,
    pub population: u64,
    /// Free-text annotation carried through to reports untouched.
    pub events: Option<String>,
}

impl AggregateYear {
    pub fn new(year: i32, m1: f64, gdp: f64, population: u64) -> Result<Self> {
        let year = Self {
            year,
            m1,
            gdp,
            population,
            events: None,
        };
        year.validate()?;
        Ok(year)
    }

    pub fn with_events(mut self, events: impl Into<String>) -> Self {
        let events = events.into();
        self.events = (!events.is_empty()).then_some(events);
        self
    }

    fn validate(&self) -> Result<()> {
        ensure_non_negative("m1", self.m1)?;
        ensure_positive("gdp", self.gdp)?;
        ensure_positive("population", self.population as f64)?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateSeries {
    pub currency: CurrencyCode,
    pub years: Vec<AggregateYear>,
    pub std: TimeStandard,
}

impl AggregateSeries {
    pub fn new(currency: CurrencyCode, years: Vec<AggregateYear>, std: TimeStandard) -> Result<Self> {
        let series = Self { currency, years, std };
        series.validate()?;
        Ok(series)
    }

    /// Non-empty with strictly increasing years.
    pub fn validate(&self) -> Result<()> {
        if self.years.is_empty() {
            return Err(MonMinError::EmptySeries);
        }
        check_increasing(self.years.iter().map(|y| y.year))
    }
}

fn check_increasing(years: impl Iterator<Item = i32>) -> Result<()> {
    let mut previous: Option<i32> = None;
    for year in years {
        if let Some(p) = previous {
            if year <= p {
                return Err(MonMinError::NonMonotoneYears { previous: p, next: year });
            }
        }
        previous = Some(year);
    }
    Ok(())
}

/// M1 divided by that year's `$ṁ`, i.e. `m1 × population × minutes / gdp`.
pub fn m1_in_monmin(year: &AggregateYear, std: TimeStandard) -> Result<f64> {
    year.validate()?;
    let minutes = ensure_positive("minutes_per_year", std.minutes_per_year())?;
    Ok(year.m1 * year.population as f64 * minutes / year.gdp)
}

pub fn series_in_monmin(series: &AggregateSeries) -> Result<Vec<(i32, f64)>> {
    series.validate()?;
    series
        .years
        .iter()
        .map(|y| {
            m1_in_monmin(y, series.std)
                .map(|v| (y.year, v))
                .map_err(|e| MonMinError::InYear {
                    year: y.year,
                    source: Box::new(e),
                })
        })
        .collect()
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExtremaReport {
    pub peaks: Vec<i32>,
    pub troughs: Vec<i32>,
}

/// Strict local extrema.
///
/// Runs of exactly equal values are treated as one point dated at the run's
/// first year. A run is a peak when both neighbouring runs are lower, a
/// trough when both are higher. The first and last runs never qualify.
pub fn detect_extrema(values: &[(i32, f64)]) -> Result<ExtremaReport> {
    if values.len() < 3 {
        return Err(MonMinError::TooShort(values.len()));
    }
    check_increasing(values.iter().map(|(y, _)| *y))?;

    let mut runs: Vec<(i32, f64)> = Vec::with_capacity(values.len());
    for &(year, value) in values {
        match runs.last() {
            Some(&(_, last)) if last == value => {}
            _ => runs.push((year, value)),
        }
    }

    let mut report = ExtremaReport::default();
    for window in runs.windows(3) {
        let [(_, before), (year, value), (_, after)] = [window[0], window[1], window[2]];
        if value > before && value > after {
            report.peaks.push(year);
        } else if value < before && value < after {
            report.troughs.push(year);
        }
    }
    Ok(report)
}
