//! Loaders for the four input files.
//!
//! Every file is header-first CSV: UTF-8, comma separated, `.` as decimal
//! point and no thousands separators. Leading `#` lines may carry
//! `key=value` directives:
//!
//! * `scale=<factor>` multiplies money columns (`gdp`, `m1`) so stored values
//!   are absolute currency units, e.g. `# scale=1e9` for tables in billions.
//! * `currency=<CODE>` names the currency of an aggregate series (USD when
//!   absent).
//!
//! Any other `#` line is a comment. Loads are all-or-nothing: a single bad
//! row rejects the whole file and the report lists every problem found,
//! keyed by 1-based physical line number.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use thiserror::Error;

use crate::series::{AggregateSeries, AggregateYear};
use crate::unit::{CurrencyCode, EconomySnapshot, ExchangeRate, PriceQuote, RateTable, TimeStandard};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagnosticKind {
    MalformedRow,
    NonPositiveInput,
    DuplicateCountry,
    DuplicatePair,
    DuplicateItem,
    NonMonotoneYears,
    UnknownCurrency,
    ReciprocalMismatch,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub line: u64,
    pub kind: DiagnosticKind,
    pub message: String,
}

impl Diagnostic {
    fn new(line: u64, kind: DiagnosticKind, message: impl Into<String>) -> Self {
        Self {
            line,
            kind,
            message: message.into(),
        }
    }

    fn malformed(line: u64, message: impl Into<String>) -> Self {
        Self::new(line, DiagnosticKind::MalformedRow, message)
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {:?}: {}", self.line, self.kind, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct IngestReport {
    pub records_accepted: usize,
    pub warnings: Vec<Diagnostic>,
    pub errors: Vec<Diagnostic>,
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{}: file not found", path.display())]
    NotFound { path: PathBuf },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: rejected with {} error(s)", path.display(), report.errors.len())]
    Rejected { path: PathBuf, report: IngestReport },
}

impl IngestError {
    pub fn report(&self) -> Option<&IngestReport> {
        match self {
            IngestError::Rejected { report, .. } => Some(report),
            _ => None,
        }
    }
}

/// A successfully loaded dataset and the warnings raised on the way.
#[derive(Debug, Clone, PartialEq)]
pub struct Loaded<T> {
    pub data: T,
    pub report: IngestReport,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuoteRole {
    Item,
    Salary,
}

impl QuoteRole {
    fn parse(raw: &str) -> Option<Self> {
        let raw = raw.strip_prefix("role=").unwrap_or(raw);
        match raw {
            "" | "item" => Some(QuoteRole::Item),
            "salary" => Some(QuoteRole::Salary),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            QuoteRole::Item => "item",
            QuoteRole::Salary => "salary",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasketEntry {
    pub quote: PriceQuote,
    pub role: QuoteRole,
}

/// Quotes of one country in one currency context.
#[derive(Debug, Clone, PartialEq)]
pub struct CountryBasket {
    pub country: String,
    pub currency: CurrencyCode,
    pub entries: Vec<BasketEntry>,
}

impl CountryBasket {
    pub fn salary(&self) -> Option<&PriceQuote> {
        self.entries
            .iter()
            .find(|e| e.role == QuoteRole::Salary)
            .map(|e| &e.quote)
    }

    pub fn find(&self, item: &str, unit: &str) -> Option<&BasketEntry> {
        self.entries
            .iter()
            .find(|e| e.quote.item == item && e.quote.unit == unit)
    }
}

/// Price quotes grouped by `(country, currency)` in file order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Basket {
    pub groups: Vec<CountryBasket>,
}

impl Basket {
    /// Distinct `(item, unit)` keys in first-seen order.
    pub fn item_keys(&self) -> Vec<(String, String)> {
        let mut seen = HashSet::new();
        let mut keys = Vec::new();
        for entry in self.groups.iter().flat_map(|g| &g.entries) {
            let key = (entry.quote.item.clone(), entry.quote.unit.clone());
            if seen.insert(key.clone()) {
                keys.push(key);
            }
        }
        keys
    }

    pub fn len(&self) -> usize {
        self.groups.iter().map(|g| g.entries.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Directives {
    scale: f64,
    currency: Option<String>,
}

fn read_file(path: &Path) -> Result<String, IngestError> {
    std::fs::read_to_string(path).map_err(|source| match source.kind() {
        std::io::ErrorKind::NotFound => IngestError::NotFound {
            path: path.to_path_buf(),
        },
        _ => IngestError::Io {
            path: path.to_path_buf(),
            source,
        },
    })
}

fn parse_directives(text: &str) -> Result<Directives, Diagnostic> {
    let mut directives = Directives {
        scale: 1.0,
        currency: None,
    };
    for (idx, line) in text.lines().enumerate() {
        let Some(comment) = line.trim_start().strip_prefix('#') else {
            break;
        };
        let line_no = idx as u64 + 1;
        let comment = comment.trim();
        if let Some(raw) = comment.strip_prefix("scale=") {
            match raw.trim().parse::<f64>() {
                Ok(s) if s.is_finite() && s > 0.0 => directives.scale = s,
                _ => return Err(Diagnostic::malformed(line_no, format!("bad scale directive {raw:?}"))),
            }
        } else if let Some(raw) = comment.strip_prefix("currency=") {
            directives.currency = Some(raw.trim().to_string());
        }
    }
    Ok(directives)
}

/// 1-based physical line of the record starting at byte `offset`.
///
/// The csv reader reports a record's position before the comment and blank
/// lines it skipped, so those are stepped over first.
fn physical_line(text: &str, offset: u64) -> u64 {
    let mut start = (offset as usize).min(text.len());
    let mut line = text.as_bytes()[..start].iter().filter(|&&b| b == b'\n').count() as u64 + 1;
    while start < text.len() {
        let rest = &text[start..];
        let current = rest.split('\n').next().unwrap_or("");
        let skipped = current.starts_with('#') || current.trim_end_matches('\r').is_empty();
        if !skipped || current.len() == rest.len() {
            break;
        }
        start += current.len() + 1;
        line += 1;
    }
    line
}

/// Header-resolved CSV rows with their physical line numbers.
struct Table {
    directives: Directives,
    width: usize,
    columns: HashMap<String, usize>,
    rows: Vec<(u64, csv::StringRecord)>,
}

impl Table {
    fn parse(text: &str, required: &[&str]) -> Result<Self, Diagnostic> {
        let directives = parse_directives(text)?;
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let line_of = |pos: Option<&csv::Position>| -> u64 {
            pos.map(|p| physical_line(text, p.byte())).unwrap_or(0)
        };
        let headers = reader
            .headers()
            .map_err(|e| Diagnostic::malformed(line_of(e.position()), e.to_string()))?
            .clone();
        let header_line = line_of(headers.position());
        let columns: HashMap<String, usize> = headers
            .iter()
            .enumerate()
            .map(|(i, h)| (h.to_ascii_lowercase(), i))
            .collect();
        for name in required {
            if !columns.contains_key(*name) {
                return Err(Diagnostic::malformed(
                    header_line,
                    format!("missing column {name:?} in header"),
                ));
            }
        }
        let width = headers.len();
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| Diagnostic::malformed(line_of(e.position()), e.to_string()))?;
            let line = line_of(record.position());
            if record.iter().all(str::is_empty) {
                continue;
            }
            rows.push((line, record));
        }
        Ok(Self {
            directives,
            width,
            columns,
            rows,
        })
    }
}

/// Field accessor for one data row.
struct Row<'a> {
    line: u64,
    record: &'a csv::StringRecord,
    columns: &'a HashMap<String, usize>,
}

impl<'a> Row<'a> {
    fn check_width(&self, width: usize) -> Result<(), Diagnostic> {
        if self.record.len() != width {
            return Err(Diagnostic::malformed(
                self.line,
                format!("expected {width} columns, found {}", self.record.len()),
            ));
        }
        Ok(())
    }

    fn optional(&self, name: &str) -> Option<&'a str> {
        self.columns.get(name).and_then(|&i| self.record.get(i))
    }

    fn text(&self, name: &str) -> Result<&'a str, Diagnostic> {
        match self.optional(name) {
            Some(v) if !v.is_empty() => Ok(v),
            _ => Err(Diagnostic::malformed(self.line, format!("empty {name}"))),
        }
    }

    fn currency(&self, name: &str) -> Result<CurrencyCode, Diagnostic> {
        let raw = self.text(name)?;
        CurrencyCode::new(raw).map_err(|e| Diagnostic::malformed(self.line, e.to_string()))
    }

    fn number(&self, name: &str) -> Result<f64, Diagnostic> {
        let raw = self.text(name)?;
        match raw.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(Diagnostic::malformed(self.line, format!("{name}: not a number: {raw:?}"))),
        }
    }

    fn positive(&self, name: &str) -> Result<f64, Diagnostic> {
        let v = self.number(name)?;
        if v > 0.0 {
            Ok(v)
        } else {
            Err(self.non_positive(name, v))
        }
    }

    fn non_negative(&self, name: &str) -> Result<f64, Diagnostic> {
        let v = self.number(name)?;
        if v >= 0.0 {
            Ok(v)
        } else {
            Err(self.non_positive(name, v))
        }
    }

    fn count(&self, name: &str) -> Result<u64, Diagnostic> {
        let raw = self.text(name)?;
        let v: i64 = raw
            .parse()
            .map_err(|_| Diagnostic::malformed(self.line, format!("{name}: not an integer: {raw:?}")))?;
        if v <= 0 {
            return Err(self.non_positive(name, v as f64));
        }
        Ok(v as u64)
    }

    fn integer(&self, name: &str) -> Result<i32, Diagnostic> {
        let raw = self.text(name)?;
        raw.parse()
            .map_err(|_| Diagnostic::malformed(self.line, format!("{name}: not an integer: {raw:?}")))
    }

    fn date(&self, name: &str) -> Result<Option<NaiveDate>, Diagnostic> {
        match self.optional(name) {
            None | Some("") => Ok(None),
            Some(raw) => NaiveDate::parse_from_str(raw, "%Y-%m-%d")
                .map(Some)
                .map_err(|_| Diagnostic::malformed(self.line, format!("{name}: not an ISO date: {raw:?}"))),
        }
    }

    fn non_positive(&self, name: &str, v: f64) -> Diagnostic {
        Diagnostic::new(
            self.line,
            DiagnosticKind::NonPositiveInput,
            format!("{name} must be positive, got {v}"),
        )
    }
}

/// Drives row parsing and turns the collected diagnostics into a result.
fn load_rows(
    path: &Path,
    required: &[&str],
    mut parse_row: impl FnMut(&Row<'_>, &Directives, &mut IngestReport) -> Result<(), Diagnostic>,
) -> Result<IngestReport, IngestError> {
    let text = read_file(path)?;
    let reject = |report: IngestReport| IngestError::Rejected {
        path: path.to_path_buf(),
        report,
    };
    let table = match Table::parse(&text, required) {
        Ok(t) => t,
        Err(d) => {
            return Err(reject(IngestReport {
                errors: vec![d],
                ..Default::default()
            }))
        }
    };
    let mut report = IngestReport::default();
    for (line, record) in &table.rows {
        let row = Row {
            line: *line,
            record,
            columns: &table.columns,
        };
        let outcome = row
            .check_width(table.width)
            .and_then(|_| parse_row(&row, &table.directives, &mut report));
        match outcome {
            Ok(()) => report.records_accepted += 1,
            Err(d) => report.errors.push(d),
        }
    }
    if !report.errors.is_empty() {
        report.records_accepted = 0;
        return Err(reject(report));
    }
    Ok(report)
}

pub const ECONOMIES_HEADER: [&str; 5] = ["country", "currency", "gdp", "population", "as_of"];
pub const RATES_HEADER: [&str; 4] = ["base", "quote", "rate", "as_of"];
pub const BASKET_HEADER: [&str; 6] = ["country", "currency", "item", "unit", "amount", "role"];
pub const SERIES_HEADER: [&str; 5] = ["year", "m1", "gdp", "population", "events"];

/// `country,currency,gdp,population,as_of`
pub fn load_economies(path: impl AsRef<Path>) -> Result<Loaded<Vec<EconomySnapshot>>, IngestError> {
    let mut out = Vec::new();
    let mut seen: HashMap<String, u64> = HashMap::new();
    let loaded = load_rows(
        path.as_ref(),
        &ECONOMIES_HEADER,
        |row, directives, _| {
            let country = row.text("country")?;
            let currency = row.currency("currency")?;
            let gdp = row.positive("gdp")? * directives.scale;
            let population = row.count("population")?;
            let as_of = row
                .date("as_of")?
                .ok_or_else(|| Diagnostic::malformed(row.line, "empty as_of"))?;
            if let Some(first) = seen.insert(country.to_string(), row.line) {
                return Err(Diagnostic::new(
                    row.line,
                    DiagnosticKind::DuplicateCountry,
                    format!("{country:?} already defined on line {first}"),
                ));
            }
            let snapshot = EconomySnapshot::new(country, currency, gdp, population, as_of)
                .map_err(|e| Diagnostic::new(row.line, DiagnosticKind::NonPositiveInput, e.to_string()))?;
            out.push(snapshot);
            Ok(())
        },
    )?;
    Ok(Loaded {
        data: out,
        report: loaded,
    })
}

/// `base,quote,rate[,as_of]`. Reciprocal pairs whose product is not 1 are
/// reported as warnings.
pub fn load_rates(path: impl AsRef<Path>) -> Result<Loaded<RateTable>, IngestError> {
    let mut table = RateTable::new();
    let mut lines: HashMap<(CurrencyCode, CurrencyCode), u64> = HashMap::new();
    let loaded = load_rows(
        path.as_ref(),
        &RATES_HEADER[..3],
        |row, _, _| {
            let base = row.currency("base")?;
            let quote = row.currency("quote")?;
            let value = row.positive("rate")?;
            let mut rate = ExchangeRate::new(base.clone(), quote.clone(), value)
                .map_err(|e| Diagnostic::malformed(row.line, e.to_string()))?;
            if let Some(date) = row.date("as_of")? {
                rate = rate.as_of(date);
            }
            if table.insert(rate).is_err() {
                let first = lines[&(base.clone(), quote.clone())];
                return Err(Diagnostic::new(
                    row.line,
                    DiagnosticKind::DuplicatePair,
                    format!("{base}->{quote} already defined on line {first}"),
                ));
            }
            lines.insert((base, quote), row.line);
            Ok(())
        },
    )?;
    let mut report = loaded;
    for m in table.reciprocal_mismatches() {
        let a = lines[&(m.base.clone(), m.quote.clone())];
        let b = lines[&(m.quote.clone(), m.base.clone())];
        report.warnings.push(Diagnostic::new(
            a.max(b),
            DiagnosticKind::ReciprocalMismatch,
            format!("{}<->{} rates multiply to {} instead of 1", m.base, m.quote, m.product),
        ));
    }
    Ok(Loaded { data: table, report })
}

/// `country,currency,item,unit,amount[,role]` where role is `item` (default)
/// or `salary`.
pub fn load_basket(path: impl AsRef<Path>) -> Result<Loaded<Basket>, IngestError> {
    load_basket_impl(path.as_ref(), None)
}

/// Like [`load_basket`], also rejecting currencies outside `known`.
pub fn load_basket_checked(
    path: impl AsRef<Path>,
    known: &[CurrencyCode],
) -> Result<Loaded<Basket>, IngestError> {
    load_basket_impl(path.as_ref(), Some(known))
}

fn load_basket_impl(path: &Path, known: Option<&[CurrencyCode]>) -> Result<Loaded<Basket>, IngestError> {
    let mut basket = Basket::default();
    let mut keys: HashSet<(usize, String, String)> = HashSet::new();
    let loaded = load_rows(
        path,
        &BASKET_HEADER[..5],
        |row, _, report| {
            let country = row.text("country")?;
            let currency = row.currency("currency")?;
            let item = row.text("item")?;
            let unit = row.optional("unit").unwrap_or("");
            let amount = row.non_negative("amount")?;
            let role_raw = row.optional("role").unwrap_or("");
            let role = QuoteRole::parse(role_raw)
                .ok_or_else(|| Diagnostic::malformed(row.line, format!("unknown role {role_raw:?}")))?;
            if let Some(known) = known {
                if !known.contains(&currency) {
                    return Err(Diagnostic::new(
                        row.line,
                        DiagnosticKind::UnknownCurrency,
                        format!("currency {currency} has no economy"),
                    ));
                }
            }
            let idx = match basket
                .groups
                .iter()
                .position(|g| g.country == country && g.currency == currency)
            {
                Some(i) => i,
                None => {
                    basket.groups.push(CountryBasket {
                        country: country.to_string(),
                        currency: currency.clone(),
                        entries: Vec::new(),
                    });
                    basket.groups.len() - 1
                }
            };
            let group = &mut basket.groups[idx];
            if role == QuoteRole::Salary && group.salary().is_some() {
                return Err(Diagnostic::malformed(
                    row.line,
                    format!("second salary row for {country} ({currency})"),
                ));
            }
            if !keys.insert((idx, item.to_string(), unit.to_string())) {
                report.warnings.push(Diagnostic::new(
                    row.line,
                    DiagnosticKind::DuplicateItem,
                    format!("{item:?} ({unit}) repeated for {country} ({currency})"),
                ));
            }
            let quote = PriceQuote::new(item, unit, currency, amount)
                .map_err(|e| Diagnostic::new(row.line, DiagnosticKind::NonPositiveInput, e.to_string()))?;
            group.entries.push(BasketEntry { quote, role });
            Ok(())
        },
    )?;
    Ok(Loaded {
        data: basket,
        report: loaded,
    })
}

/// `year,m1,gdp,population[,events]`. `scale` applies to `m1` and `gdp`.
pub fn load_series(path: impl AsRef<Path>) -> Result<Loaded<AggregateSeries>, IngestError> {
    let path = path.as_ref();
    let mut years: Vec<AggregateYear> = Vec::new();
    let mut currency_raw = None;
    let loaded = load_rows(
        path,
        &SERIES_HEADER[..4],
        |row, directives, _| {
            currency_raw = directives.currency.clone();
            let year = row.integer("year")?;
            let m1 = row.non_negative("m1")? * directives.scale;
            let gdp = row.positive("gdp")? * directives.scale;
            let population = row.count("population")?;
            if let Some(prev) = years.last() {
                if year <= prev.year {
                    return Err(Diagnostic::new(
                        row.line,
                        DiagnosticKind::NonMonotoneYears,
                        format!("year {year} follows {}", prev.year),
                    ));
                }
            }
            let y = AggregateYear::new(year, m1, gdp, population)
                .map_err(|e| Diagnostic::new(row.line, DiagnosticKind::NonPositiveInput, e.to_string()))?
                .with_events(row.optional("events").unwrap_or(""));
            years.push(y);
            Ok(())
        },
    )?;
    let raw = currency_raw.unwrap_or_else(|| "USD".to_string());
    let currency = CurrencyCode::new(&raw).map_err(|e| IngestError::Rejected {
        path: path.to_path_buf(),
        report: IngestReport {
            errors: vec![Diagnostic::malformed(1, e.to_string())],
            ..Default::default()
        },
    })?;
    if years.is_empty() {
        return Err(IngestError::Rejected {
            path: path.to_path_buf(),
            report: IngestReport {
                errors: vec![Diagnostic::malformed(0, "series has no data rows")],
                ..Default::default()
            },
        });
    }
    Ok(Loaded {
        data: AggregateSeries {
            currency,
            years,
            std: TimeStandard::default(),
        },
        report: loaded,
    })
}

fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().from_writer(out)
}

fn date_text(date: Option<NaiveDate>) -> String {
    date.map(|d| d.format("%Y-%m-%d").to_string()).unwrap_or_default()
}

pub fn write_economies<W: Write>(economies: &[EconomySnapshot], out: W) -> csv::Result<()> {
    let mut w = csv_writer(out);
    w.write_record(ECONOMIES_HEADER)?;
    for e in economies {
        w.write_record([
            e.country.clone(),
            e.currency.to_string(),
            e.gdp().to_string(),
            e.population().to_string(),
            date_text(Some(e.as_of)),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_rates<W: Write>(rates: &RateTable, out: W) -> csv::Result<()> {
    let mut w = csv_writer(out);
    w.write_record(RATES_HEADER)?;
    for r in rates.iter() {
        w.write_record([
            r.base.to_string(),
            r.quote.to_string(),
            r.rate().to_string(),
            date_text(r.as_of),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_basket<W: Write>(basket: &Basket, out: W) -> csv::Result<()> {
    let mut w = csv_writer(out);
    w.write_record(BASKET_HEADER)?;
    for g in &basket.groups {
        for e in &g.entries {
            w.write_record([
                g.country.as_str(),
                g.currency.code(),
                e.quote.item.as_str(),
                e.quote.unit.as_str(),
                &e.quote.amount().to_string(),
                e.role.as_str(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_series<W: Write>(series: &AggregateSeries, mut out: W) -> csv::Result<()> {
    writeln!(out, "# currency={}", series.currency)?;
    let mut w = csv_writer(out);
    w.write_record(SERIES_HEADER)?;
    for y in &series.years {
        w.write_record([
            y.year.to_string(),
            y.m1.to_string(),
            y.gdp.to_string(),
            y.population.to_string(),
            y.events.clone().unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn file(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    fn rejected(err: IngestError) -> IngestReport {
        match err {
            IngestError::Rejected { report, .. } => report,
            other => panic!("expected rejection, got {other}"),
        }
    }

    #[test]
    fn economies_us_row() {
        let f = file("country,currency,gdp,population,as_of\nUnited States,USD,20891400000000,328467812,2019-01-01\n");
        let loaded = load_economies(f.path()).unwrap();
        assert_eq!(loaded.data.len(), 1);
        assert_eq!(loaded.report.records_accepted, 1);
        assert!((loaded.data[0].gdp_per_capita() - 63603.0).abs() < 0.5);
    }

    #[test]
    fn economies_empty_file_with_header() {
        let f = file("country,currency,gdp,population,as_of\n");
        let loaded = load_economies(f.path()).unwrap();
        assert!(loaded.data.is_empty());
        assert!(loaded.report.errors.is_empty());
    }

    #[test]
    fn economies_zero_population_is_rejected_at_line() {
        let f = file("country,currency,gdp,population,as_of\nA,USD,100,5,2019-01-01\nB,EUR,100,0,2019-01-01\n");
        let report = rejected(load_economies(f.path()).unwrap_err());
        assert_eq!(report.errors.len(), 1);
        assert_eq!(report.errors[0].line, 3);
        assert_eq!(report.errors[0].kind, DiagnosticKind::NonPositiveInput);
        assert_eq!(report.records_accepted, 0);
    }

    #[test]
    fn economies_scale_and_comments() {
        let f = file("# scale=1e9\n# GDP in billions\ncountry,currency,gdp,population,as_of\nA,USD,2.5,10,2019-01-01\n");
        let loaded = load_economies(f.path()).unwrap();
        assert_eq!(loaded.data[0].gdp(), 2.5e9);
    }

    #[test]
    fn economies_line_numbers_count_comments() {
        let f = file("# scale=1\ncountry,currency,gdp,population,as_of\n# note\nA,USD,abc,10,2019-01-01\n");
        let report = rejected(load_economies(f.path()).unwrap_err());
        assert_eq!(report.errors[0].line, 4);
        assert_eq!(report.errors[0].kind, DiagnosticKind::MalformedRow);
    }

    #[test]
    fn economies_duplicates_and_bad_width() {
        let f = file("country,currency,gdp,population,as_of\nA,USD,1,1,2019-01-01\nA,USD,1,1,2019-01-01\nB,USD,1\n");
        let report = rejected(load_economies(f.path()).unwrap_err());
        let kinds: Vec<_> = report.errors.iter().map(|d| (d.line, d.kind)).collect();
        assert_eq!(
            kinds,
            vec![(3, DiagnosticKind::DuplicateCountry), (4, DiagnosticKind::MalformedRow)]
        );
    }

    #[test]
    fn economies_thousands_separators_rejected() {
        let f = file("country,currency,gdp,population,as_of\nA,USD,\"1,000\",10,2019-01-01\n");
        assert!(load_economies(f.path()).is_err());
    }

    #[test]
    fn missing_file() {
        let err = load_economies("/definitely/not/here.csv").unwrap_err();
        assert!(matches!(err, IngestError::NotFound { .. }));
        assert!(err.to_string().contains("file not found"));
    }

    #[test]
    fn missing_header_column() {
        let f = file("country,currency,gdp\nA,USD,1\n");
        let report = rejected(load_economies(f.path()).unwrap_err());
        assert_eq!(report.errors[0].line, 1);
    }

    #[test]
    fn rates_basic() {
        let f = file("base,quote,rate,as_of\nUSD,EUR,1.1325,2019-07-01\n");
        let loaded = load_rates(f.path()).unwrap();
        let usd = CurrencyCode::new("USD").unwrap();
        let eur = CurrencyCode::new("EUR").unwrap();
        let r = loaded.data.get(&usd, &eur).unwrap();
        assert_eq!(r.rate(), 1.1325);
        assert_eq!(r.as_of, NaiveDate::from_ymd_opt(2019, 7, 1));
    }

    #[test]
    fn rates_reciprocal_pair_is_clean() {
        let f = file("base,quote,rate,as_of\nUSD,EUR,2.0,\nEUR,USD,0.5,\n");
        let loaded = load_rates(f.path()).unwrap();
        assert_eq!(loaded.data.len(), 2);
        assert!(loaded.report.warnings.is_empty());
    }

    #[test]
    fn rates_reciprocal_mismatch_warns() {
        let f = file("base,quote,rate\nUSD,EUR,2.0\nEUR,USD,0.4\n");
        let loaded = load_rates(f.path()).unwrap();
        assert_eq!(loaded.report.warnings.len(), 1);
        let w = &loaded.report.warnings[0];
        assert_eq!(w.kind, DiagnosticKind::ReciprocalMismatch);
        assert_eq!(w.line, 3);
        assert!(w.message.contains("0.8"));
    }

    #[test]
    fn rates_errors() {
        let f = file("base,quote,rate\nUSD,EUR,2.0\nUSD,EUR,2.1\nUSD,GBP,0\nUSD,USD,1\n");
        let report = rejected(load_rates(f.path()).unwrap_err());
        let kinds: Vec<_> = report.errors.iter().map(|d| d.kind).collect();
        assert_eq!(
            kinds,
            vec![
                DiagnosticKind::DuplicatePair,
                DiagnosticKind::NonPositiveInput,
                DiagnosticKind::MalformedRow
            ]
        );
    }

    #[test]
    fn basket_rows_and_roles() {
        let f = file(
            "country,currency,item,unit,amount,role\n\
             United States,USD,Gold,1 oz,1447.00,item\n\
             United States,USD,Air,1 l,0.00,item\n\
             United States,USD,Salary,month,3130.16,salary\n\
             Germany,EUR,McMeal,meal,7.46,role=item\n",
        );
        let basket = load_basket(f.path()).unwrap().data;
        assert_eq!(basket.groups.len(), 2);
        let us = &basket.groups[0];
        assert_eq!(us.entries[0].quote.amount(), 1447.0);
        assert_eq!(us.entries[1].quote.amount(), 0.0);
        assert_eq!(us.salary().unwrap().amount(), 3130.16);
        assert_eq!(basket.groups[1].entries[0].role, QuoteRole::Item);
    }

    #[test]
    fn basket_unknown_currency_when_checked() {
        let f = file("country,currency,item,unit,amount,role\nX,USD,A,u,1,item\nY,CHF,A,u,1,item\n");
        let known = [CurrencyCode::new("USD").unwrap()];
        let report = rejected(load_basket_checked(f.path(), &known).unwrap_err());
        assert_eq!(report.errors.len(), 1);
        assert_eq!(report.errors[0].kind, DiagnosticKind::UnknownCurrency);
        assert_eq!(report.errors[0].line, 3);
        assert!(load_basket(f.path()).is_ok());
    }

    #[test]
    fn basket_negative_amount_and_bad_role() {
        let f = file("country,currency,item,unit,amount,role\nX,USD,A,u,-1,item\nX,USD,B,u,1,boss\n");
        let report = rejected(load_basket(f.path()).unwrap_err());
        assert_eq!(report.errors[0].kind, DiagnosticKind::NonPositiveInput);
        assert_eq!(report.errors[1].kind, DiagnosticKind::MalformedRow);
    }

    #[test]
    fn series_row_and_scale() {
        let f = file("year,m1,gdp,population,events\n1960,140000000000,542000000000,180671000,Recession.\n");
        let s = load_series(f.path()).unwrap().data;
        assert_eq!(s.years[0].year, 1960);
        assert_eq!(s.years[0].m1, 140e9);
        assert_eq!(s.years[0].events.as_deref(), Some("Recession."));

        let f = file("# scale=1e9\nyear,m1,gdp,population,events\n1960,140,542,180671000,\n");
        let s = load_series(f.path()).unwrap().data;
        assert_eq!(s.years[0].gdp, 542e9);
        assert_eq!(s.years[0].events, None);
    }

    #[test]
    fn series_errors() {
        let f = file("year,m1,gdp,population,events\n1980,1,1,1,\n1980,1,1,1,\n");
        let report = rejected(load_series(f.path()).unwrap_err());
        assert_eq!(report.errors[0].kind, DiagnosticKind::NonMonotoneYears);
        assert_eq!(report.errors[0].line, 3);

        let f = file("year,m1,gdp,population,events\n1980,1,-1,1,\n");
        let report = rejected(load_series(f.path()).unwrap_err());
        assert_eq!(report.errors[0].kind, DiagnosticKind::NonPositiveInput);
    }

    #[test]
    fn series_currency_directive() {
        let f = file("# currency=CZK\nyear,m1,gdp,population\n2000,1,1,1\n");
        let s = load_series(f.path()).unwrap().data;
        assert_eq!(s.currency.code(), "CZK");
    }

    #[test]
    fn basket_writer_round_trip() {
        let f = file("country,currency,item,unit,amount,role\n\"Czech Republic\",CZK,\"Meal, Inexpensive\",meal,130.42,item\nCzech Republic,CZK,Salary,month,24276.45,salary\n");
        let basket = load_basket(f.path()).unwrap().data;
        let mut buf = Vec::new();
        write_basket(&basket, &mut buf).unwrap();
        let g = file(std::str::from_utf8(&buf).unwrap());
        assert_eq!(load_basket(g.path()).unwrap().data, basket);
    }
}
