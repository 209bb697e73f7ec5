//! Table rendering and plot-data output.
//!
//! Pipelines build a [`TableSpec`] and a full-precision [`TableData`];
//! [`render_table`] is the only step that rounds. Output comes in two
//! flavours: CSV for machines and column-aligned text for people.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::error::MonMinError;
use crate::ingest::{Basket, CountryBasket};
use crate::rounding::{format_decimals, Rounding};
use crate::series::{series_in_monmin, AggregateSeries, ExtremaReport};
use crate::unit::{
    compute_cm, cross_cm, invert_cm, percent_of_salary, to_monmin, CurrencyCode, EconomySnapshot, MonMinValue,
    RateTable, TimeStandard,
};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("row {row}: expected {expected} cells, found {found}")]
    ShapeMismatch { row: usize, expected: usize, found: usize },

    #[error("row {row}, column {column:?}: cell type does not match the column rule")]
    CellMismatch { row: usize, column: String },

    #[error("no Cm value for currency {0}")]
    MissingCm(String),

    #[error("no salary row for {country} ({currency})")]
    MissingSalary { country: String, currency: String },

    #[error("series is empty")]
    EmptySeries,

    #[error("unknown column {0:?}")]
    UnknownColumn(String),

    #[error(transparent)]
    Compute(#[from] MonMinError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TableId {
    T1,
    T2,
    T3,
    T4,
    T4B,
    T5,
}

impl FromStr for TableId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().trim_start_matches('t') {
            "1" => Ok(TableId::T1),
            "2" => Ok(TableId::T2),
            "3" => Ok(TableId::T3),
            "4" => Ok(TableId::T4),
            "4b" => Ok(TableId::T4B),
            "5" => Ok(TableId::T5),
            _ => Err(format!("unknown table {s:?}; expected one of 1, 2, 3, 4, 4b, 5")),
        }
    }
}

impl fmt::Display for TableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TableId::T1 => "1",
            TableId::T2 => "2",
            TableId::T3 => "3",
            TableId::T4 => "4",
            TableId::T4B => "4b",
            TableId::T5 => "5",
        };
        f.write_str(s)
    }
}

/// How a column's cells are printed. Exactly one per column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnRule {
    Text,
    Number(Rounding),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ColumnSpec {
    pub name: String,
    pub rule: ColumnRule,
}

impl ColumnSpec {
    pub fn text(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            rule: ColumnRule::Text,
        }
    }

    pub fn decimals(name: impl Into<String>, dp: u32) -> Self {
        Self {
            name: name.into(),
            rule: ColumnRule::Number(Rounding::Decimals(dp)),
        }
    }

    pub fn significant(name: impl Into<String>, sf: u32) -> Self {
        Self {
            name: name.into(),
            rule: ColumnRule::Number(Rounding::Significant(sf)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableSpec {
    pub table_id: TableId,
    pub title: String,
    pub columns: Vec<ColumnSpec>,
}

impl TableSpec {
    /// Replaces the rounding of a numeric column.
    pub fn override_rounding(&mut self, column: &str, rounding: Rounding) -> Result<(), ReportError> {
        let col = self
            .columns
            .iter_mut()
            .find(|c| c.name == column && c.rule != ColumnRule::Text)
            .ok_or_else(|| ReportError::UnknownColumn(column.to_string()))?;
        col.rule = ColumnRule::Number(rounding);
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Number(f64),
    Empty,
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Number(v)
    }
}

/// Full-precision table contents. `notes` are free text printed with the
/// table, e.g. which Cm provenance was used.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TableData {
    pub rows: Vec<Vec<Cell>>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderedTable {
    pub title: String,
    pub header: Vec<String>,
    pub numeric: Vec<bool>,
    pub rows: Vec<Vec<String>>,
    pub notes: Vec<String>,
}

pub fn render_table(spec: &TableSpec, data: &TableData) -> Result<RenderedTable, ReportError> {
    let mut rows = Vec::with_capacity(data.rows.len());
    for (r, row) in data.rows.iter().enumerate() {
        if row.len() != spec.columns.len() {
            return Err(ReportError::ShapeMismatch {
                row: r,
                expected: spec.columns.len(),
                found: row.len(),
            });
        }
        let cells = row
            .iter()
            .zip(&spec.columns)
            .map(|(cell, col)| match (cell, col.rule) {
                (Cell::Empty, _) => Ok(String::new()),
                (Cell::Text(s), ColumnRule::Text) => Ok(s.clone()),
                (Cell::Number(v), ColumnRule::Number(rounding)) => Ok(rounding.format(*v)),
                _ => Err(ReportError::CellMismatch {
                    row: r,
                    column: col.name.clone(),
                }),
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(cells);
    }
    Ok(RenderedTable {
        title: spec.title.clone(),
        header: spec.columns.iter().map(|c| c.name.clone()).collect(),
        numeric: spec.columns.iter().map(|c| c.rule != ColumnRule::Text).collect(),
        rows,
        notes: data.notes.clone(),
    })
}

impl RenderedTable {
    /// Notes first as `#` comment lines, then header and rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for note in &self.notes {
            out.push_str("# ");
            out.push_str(note);
            out.push('\n');
        }
        let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
        // Writing to a Vec cannot fail.
        w.write_record(&self.header).expect("in-memory csv");
        for row in &self.rows {
            w.write_record(row).expect("in-memory csv");
        }
        let bytes = w.into_inner().expect("in-memory csv");
        out.push_str(&String::from_utf8(bytes).expect("utf-8 input"));
        out
    }

    /// Title, aligned columns (numbers right-aligned), then notes.
    pub fn to_text(&self) -> String {
        let width = |s: &str| s.chars().count();
        let mut widths: Vec<usize> = self.header.iter().map(|h| width(h)).collect();
        for row in &self.rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(width(cell));
            }
        }
        let line = |cells: &[String]| -> String {
            let parts: Vec<String> = cells
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    let pad = " ".repeat(widths[i] - width(c));
                    if self.numeric[i] {
                        format!("{pad}{c}")
                    } else {
                        format!("{c}{pad}")
                    }
                })
                .collect();
            parts.join("  ").trim_end().to_string()
        };

        let mut out = String::new();
        out.push_str(&self.title);
        out.push_str("\n\n");
        out.push_str(&line(&self.header));
        out.push('\n');
        let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
        out.push_str(&rule.join("  "));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&line(row));
            out.push('\n');
        }
        if !self.notes.is_empty() {
            out.push('\n');
            for note in &self.notes {
                out.push_str(note);
                out.push('\n');
            }
        }
        out
    }
}

fn cm_note(cm: &MonMinValue) -> String {
    format!(
        "Cm {} = {} per MonMin ({})",
        cm.currency,
        format_decimals(cm.value(), 7),
        cm.source
    )
}

/// Per-country Cm computed from GDP and population.
pub fn table1(economies: &[EconomySnapshot], std: TimeStandard) -> Result<(TableSpec, TableData), ReportError> {
    let spec = TableSpec {
        table_id: TableId::T1,
        title: "Table 1: Monetary Minute values Cm from GDP and population".to_string(),
        columns: vec![
            ColumnSpec::text("country"),
            ColumnSpec::text("currency"),
            ColumnSpec::decimals("gdp", 0),
            ColumnSpec::decimals("population", 0),
            ColumnSpec::decimals("gdp_per_capita", 0),
            ColumnSpec::decimals("cm", 7),
            ColumnSpec::text("cm_source"),
        ],
    };
    let mut data = TableData {
        notes: vec![format!("minutes per year = {}", std.minutes_per_year())],
        ..Default::default()
    };
    for econ in economies {
        let cm = compute_cm(econ, std)?;
        data.rows.push(vec![
            econ.country.as_str().into(),
            econ.currency.to_string().into(),
            econ.gdp().into(),
            (econ.population() as f64).into(),
            econ.gdp_per_capita().into(),
            cm.value().into(),
            cm.source.label().into(),
        ]);
    }
    Ok((spec, data))
}

/// Cm of the reference currency restated through every rate quoted from it,
/// with the inverse (MonMin per currency unit).
pub fn table2(reference: &MonMinValue, rates: &RateTable) -> Result<(TableSpec, TableData), ReportError> {
    let spec = TableSpec {
        table_id: TableId::T2,
        title: format!("Table 2: MonMin rates derived from the {} Cm", reference.currency),
        columns: vec![
            ColumnSpec::text("currency"),
            ColumnSpec::significant("rate", 6),
            ColumnSpec::significant("cm", 6),
            ColumnSpec::text("cm_source"),
            ColumnSpec::decimals("inverse_cm", 2),
        ],
    };
    let mut data = TableData {
        notes: vec![
            format!("rate = units of currency per 1 {}", reference.currency),
            cm_note(reference),
        ],
        ..Default::default()
    };
    data.rows.push(vec![
        reference.currency.to_string().into(),
        1.0.into(),
        reference.value().into(),
        reference.source.label().into(),
        invert_cm(reference)?.into(),
    ]);
    for rate in rates.iter().filter(|r| r.base == reference.currency) {
        let cm = cross_cm(reference, rate)?;
        data.rows.push(vec![
            rate.quote.to_string().into(),
            rate.rate().into(),
            cm.value().into(),
            cm.source.label().into(),
            invert_cm(&cm)?.into(),
        ]);
    }
    Ok((spec, data))
}

fn cm_for<'a>(cms: &'a [MonMinValue], currency: &CurrencyCode) -> Result<&'a MonMinValue, ReportError> {
    cms.iter()
        .find(|c| &c.currency == currency)
        .ok_or_else(|| ReportError::MissingCm(currency.to_string()))
}

fn group_notes(basket: &Basket, cms: &[MonMinValue]) -> Result<Vec<String>, ReportError> {
    basket
        .groups
        .iter()
        .map(|g| Ok(format!("{}: {}", g.country, cm_note(cm_for(cms, &g.currency)?))))
        .collect()
}

fn monmin_of(group: &CountryBasket, cm: &MonMinValue, item: &str, unit: &str) -> Result<Option<f64>, ReportError> {
    match group.find(item, unit) {
        Some(entry) => Ok(Some(to_monmin(&entry.quote, cm)?.monmin())),
        None => Ok(None),
    }
}

fn number_or_empty(v: Option<f64>) -> Cell {
    v.map(Cell::Number).unwrap_or(Cell::Empty)
}

/// Raw prices and their MonMin equivalents, one column pair per currency
/// context of the basket.
pub fn table3(basket: &Basket, cms: &[MonMinValue]) -> Result<(TableSpec, TableData), ReportError> {
    let mut columns = vec![ColumnSpec::text("item"), ColumnSpec::text("unit")];
    for g in &basket.groups {
        columns.push(ColumnSpec::decimals(format!("price {}", g.currency), 2));
    }
    for g in &basket.groups {
        columns.push(ColumnSpec::decimals(format!("MonMin {}", g.currency), 0));
    }
    let spec = TableSpec {
        table_id: TableId::T3,
        title: "Table 3: Prices in national currencies and in MonMin".to_string(),
        columns,
    };
    let mut data = TableData {
        notes: group_notes(basket, cms)?,
        ..Default::default()
    };
    for (item, unit) in basket.item_keys() {
        let mut row: Vec<Cell> = vec![item.as_str().into(), unit.as_str().into()];
        for g in &basket.groups {
            row.push(number_or_empty(g.find(&item, &unit).map(|e| e.quote.amount())));
        }
        for g in &basket.groups {
            row.push(number_or_empty(monmin_of(g, cm_for(cms, &g.currency)?, &item, &unit)?));
        }
        data.rows.push(row);
    }
    Ok((spec, data))
}

fn group_label(g: &CountryBasket) -> String {
    format!("{} ({})", g.country, g.currency)
}

/// MonMin prices, one column per country basket.
pub fn table4(basket: &Basket, cms: &[MonMinValue]) -> Result<(TableSpec, TableData), ReportError> {
    let mut columns = vec![ColumnSpec::text("item"), ColumnSpec::text("unit")];
    columns.extend(basket.groups.iter().map(|g| ColumnSpec::decimals(group_label(g), 0)));
    let spec = TableSpec {
        table_id: TableId::T4,
        title: "Table 4: Prices and monthly net salaries in MonMin".to_string(),
        columns,
    };
    let mut data = TableData {
        notes: group_notes(basket, cms)?,
        ..Default::default()
    };
    for (item, unit) in basket.item_keys() {
        let mut row: Vec<Cell> = vec![item.as_str().into(), unit.as_str().into()];
        for g in &basket.groups {
            row.push(number_or_empty(monmin_of(g, cm_for(cms, &g.currency)?, &item, &unit)?));
        }
        data.rows.push(row);
    }
    Ok((spec, data))
}

/// Prices as a percentage of each country's average monthly net salary.
pub fn table4b(basket: &Basket, cms: &[MonMinValue]) -> Result<(TableSpec, TableData), ReportError> {
    let mut columns = vec![ColumnSpec::text("item"), ColumnSpec::text("unit")];
    columns.extend(basket.groups.iter().map(|g| ColumnSpec::decimals(group_label(g), 2)));
    let spec = TableSpec {
        table_id: TableId::T4B,
        title: "Table 4b: Prices in percent of the average monthly net salary".to_string(),
        columns,
    };
    let mut salaries = Vec::with_capacity(basket.groups.len());
    for g in &basket.groups {
        let cm = cm_for(cms, &g.currency)?;
        let salary = g.salary().ok_or_else(|| ReportError::MissingSalary {
            country: g.country.clone(),
            currency: g.currency.to_string(),
        })?;
        salaries.push((cm, to_monmin(salary, cm)?));
    }
    let mut data = TableData {
        notes: group_notes(basket, cms)?,
        ..Default::default()
    };
    for (item, unit) in basket.item_keys() {
        let mut row: Vec<Cell> = vec![item.as_str().into(), unit.as_str().into()];
        for (g, (cm, salary)) in basket.groups.iter().zip(&salaries) {
            let cell = match g.find(&item, &unit) {
                Some(entry) => Cell::Number(percent_of_salary(&to_monmin(&entry.quote, cm)?, salary)?),
                None => Cell::Empty,
            };
            row.push(cell);
        }
        data.rows.push(row);
    }
    Ok((spec, data))
}

const BILLION: f64 = 1e9;

/// M1, M1 in MonMin and GDP per year, all in billions.
pub fn table5(series: &AggregateSeries) -> Result<(TableSpec, TableData), ReportError> {
    let spec = TableSpec {
        table_id: TableId::T5,
        title: format!(
            "Table 5: Money stock M1 in billions of {c} and of {c} MonMin, GDP in billions of {c}",
            c = series.currency
        ),
        columns: vec![
            ColumnSpec::decimals("year", 0),
            ColumnSpec::decimals("m1", 0),
            ColumnSpec::decimals("m1_monmin", 0),
            ColumnSpec::decimals("gdp", 0),
            ColumnSpec::text("events"),
        ],
    };
    let monmin = series_in_monmin(series).map_err(|e| match e {
        MonMinError::EmptySeries => ReportError::EmptySeries,
        other => ReportError::Compute(other),
    })?;
    let mut data = TableData {
        notes: vec![format!("minutes per year = {}", series.std.minutes_per_year())],
        ..Default::default()
    };
    for (y, (_, m)) in series.years.iter().zip(&monmin) {
        data.rows.push(vec![
            (y.year as f64).into(),
            (y.m1 / BILLION).into(),
            (m / BILLION).into(),
            (y.gdp / BILLION).into(),
            y.events.clone().map(Cell::Text).unwrap_or(Cell::Empty),
        ]);
    }
    Ok((spec, data))
}

/// Plot-ready CSV: `year,m1_currency,m1_monmin,gdp_currency`, plus an
/// `extremum` column (`peak`, `trough` or empty) when extrema are given.
/// Values are written at full precision.
pub fn emit_plot_data(series: &AggregateSeries, extrema: Option<&ExtremaReport>) -> Result<String, ReportError> {
    let monmin = series_in_monmin(series).map_err(|e| match e {
        MonMinError::EmptySeries => ReportError::EmptySeries,
        other => ReportError::Compute(other),
    })?;
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    let mut header = vec!["year", "m1_currency", "m1_monmin", "gdp_currency"];
    if extrema.is_some() {
        header.push("extremum");
    }
    w.write_record(&header).expect("in-memory csv");
    for (y, (_, m)) in series.years.iter().zip(&monmin) {
        let mut record = vec![y.year.to_string(), y.m1.to_string(), m.to_string(), y.gdp.to_string()];
        if let Some(ex) = extrema {
            let mark = if ex.peaks.contains(&y.year) {
                "peak"
            } else if ex.troughs.contains(&y.year) {
                "trough"
            } else {
                ""
            };
            record.push(mark.to_string());
        }
        w.write_record(&record).expect("in-memory csv");
    }
    let bytes = w.into_inner().expect("in-memory csv");
    Ok(String::from_utf8(bytes).expect("utf-8 output"))
}
