//! The `monmin` command line.
//!
//! Exit codes: 0 on success, 1 for usage errors, 2 for data errors.
//! Results go to the output stream (or `--output`), diagnostics to the
//! error stream.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::ingest::{self, IngestError, IngestReport, Loaded};
use crate::report::{self, render_table, RenderedTable, ReportError, TableData, TableId, TableSpec};
use crate::rounding::{format_decimals, Rounding};
use crate::series::{detect_extrema, series_in_monmin, ExtremaReport};
use crate::unit::{
    compute_cm, parity_rate_any_item, percent_of_salary, to_monmin, CurrencyCode, EconomySnapshot, ExchangeRate,
    MonMinPrice, MonMinValue, PriceQuote, TimeStandard,
};
use crate::MonMinError;

pub const TETCY_ENV: &str = "MONMIN_TETCY";

#[derive(Debug, Parser)]
#[command(name = "monmin", version, about = "Monetary Minute (MonMin) unit-of-account calculator")]
pub struct Cli {
    /// TOML file with defaults for any of the long flags. Flags win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cm per country from an economies file.
    Cm(CmArgs),
    /// Convert a price into MonMin.
    Convert(ConvertArgs),
    /// Exchange rate that equalises two MonMin prices.
    Parity(ParityArgs),
    /// Every basket quote restated in MonMin.
    Basket(BasketArgs),
    /// A price as a percentage of a salary.
    Percent(PercentArgs),
    /// M1 in MonMin, with optional plot data and extrema.
    Series(SeriesArgs),
    /// Render one of the reference tables.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Csv,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write results here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Rounding override for a numeric column, `COLUMN=DECIMALS`.
    #[arg(long = "round", value_name = "COLUMN=DECIMALS")]
    pub round: Vec<String>,
}

#[derive(Debug, Args)]
pub struct CmArgs {
    #[arg(long)]
    pub economies: Option<PathBuf>,
    /// Minutes per year (default 525600).
    #[arg(long)]
    pub tetcy: Option<f64>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub amount: f64,
    /// Explicit Cm value in currency units per MonMin.
    #[arg(long, conflicts_with_all = ["economies", "country"])]
    pub cm: Option<f64>,
    #[arg(long, requires = "country")]
    pub economies: Option<PathBuf>,
    #[arg(long, requires = "economies")]
    pub country: Option<String>,
    /// Currency of the amount; checked against the Cm source.
    #[arg(long)]
    pub currency: Option<String>,
    #[arg(long)]
    pub tetcy: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub decimals: u32,
}

#[derive(Debug, Args)]
pub struct ParityArgs {
    /// Current rate, local currency units per reference currency unit.
    #[arg(long, allow_negative_numbers = true)]
    pub rate: f64,
    /// MonMin price in the reference currency context.
    #[arg(long = "ref", allow_negative_numbers = true)]
    pub reference: f64,
    /// MonMin price in the local currency context.
    #[arg(long, allow_negative_numbers = true)]
    pub local: f64,
    #[arg(long, default_value_t = 3)]
    pub decimals: u32,
}

#[derive(Debug, Args)]
pub struct CmSourceArgs {
    /// Manual Cm, `CODE=VALUE`; repeat per currency.
    #[arg(long = "cm", value_name = "CODE=VALUE")]
    pub cm: Vec<String>,
    /// Compute Cm per currency from this economies file.
    #[arg(long)]
    pub economies: Option<PathBuf>,
    #[arg(long)]
    pub tetcy: Option<f64>,
}

#[derive(Debug, Args)]
pub struct BasketArgs {
    #[arg(long)]
    pub basket: Option<PathBuf>,
    #[command(flatten)]
    pub source: CmSourceArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct PercentArgs {
    #[arg(long, allow_negative_numbers = true, requires = "salary")]
    pub price: Option<f64>,
    #[arg(long, allow_negative_numbers = true, requires = "price")]
    pub salary: Option<f64>,
    /// Render the salary-percent table for a whole basket instead.
    #[arg(long, conflicts_with_all = ["price", "salary"])]
    pub basket: Option<PathBuf>,
    #[command(flatten)]
    pub source: CmSourceArgs,
    #[arg(long, default_value_t = 2)]
    pub decimals: u32,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SeriesArgs {
    #[arg(long)]
    pub series: Option<PathBuf>,
    #[arg(long)]
    pub tetcy: Option<f64>,
    /// Write plot data (`year,m1_currency,m1_monmin,gdp_currency`) here.
    #[arg(long)]
    pub plot: Option<PathBuf>,
    /// Report peaks and troughs of the MonMin series.
    #[arg(long)]
    pub extrema: bool,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// One of 1, 2, 3, 4, 4b, 5.
    #[arg(long)]
    pub table: TableId,
    #[arg(long)]
    pub rates: Option<PathBuf>,
    #[arg(long)]
    pub basket: Option<PathBuf>,
    #[arg(long)]
    pub series: Option<PathBuf>,
    /// Reference country for table 2 when Cm comes from an economies file.
    #[arg(long)]
    pub country: Option<String>,
    #[command(flatten)]
    pub source: CmSourceArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

/// Optional TOML defaults. Every key mirrors a long flag.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub tetcy: Option<f64>,
    pub economies: Option<PathBuf>,
    pub rates: Option<PathBuf>,
    pub basket: Option<PathBuf>,
    pub series: Option<PathBuf>,
    pub country: Option<String>,
    pub format: Option<Format>,
    #[serde(default)]
    pub cm: BTreeMap<String, f64>,
    #[serde(default)]
    pub round: BTreeMap<String, u32>,
}

/// Settings after merging flags, environment, config file and defaults.
#[derive(Debug, Clone)]
pub struct CliConfig {
    pub std: TimeStandard,
    pub economies: Option<PathBuf>,
    pub rates: Option<PathBuf>,
    pub basket: Option<PathBuf>,
    pub series: Option<PathBuf>,
    pub country: Option<String>,
    pub manual_cm: Vec<(String, f64)>,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub table: Option<TableId>,
    pub round: Vec<(String, u32)>,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Data(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
        }
    }
}

impl From<MonMinError> for CliError {
    fn from(e: MonMinError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<ReportError> for CliError {
    fn from(e: ReportError) -> Self {
        CliError::Data(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I, env_tetcy: Option<String>, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{rendered}");
            } else {
                let _ = write!(err, "{rendered}");
            }
            return code;
        }
    };
    match execute(cli, env_tetcy, err) {
        Ok(Output { text, path }) => match path {
            Some(path) => match std::fs::write(&path, text) {
                Ok(()) => 0,
                Err(e) => {
                    let _ = writeln!(err, "error: {}: {e}", path.display());
                    2
                }
            },
            None => match out.write_all(text.as_bytes()) {
                Ok(()) => 0,
                Err(e) => {
                    let _ = writeln!(err, "error: {e}");
                    2
                }
            },
        },
        Err(e) => {
            let (CliError::Usage(msg) | CliError::Data(msg)) = &e;
            let _ = writeln!(err, "error: {msg}");
            e.code()
        }
    }
}

struct Output {
    text: String,
    path: Option<PathBuf>,
}

fn load_config(path: Option<&Path>) -> CliResult<ConfigFile> {
    let Some(path) = path else {
        return Ok(ConfigFile::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn parse_pair<T: std::str::FromStr>(raw: &str, what: &str) -> CliResult<(String, T)> {
    let (key, value) = raw
        .split_once('=')
        .ok_or_else(|| CliError::Usage(format!("{what} must look like KEY=VALUE, got {raw:?}")))?;
    let value = value
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("{what}: bad value in {raw:?}")))?;
    Ok((key.trim().to_string(), value))
}

fn resolve_tetcy(flag: Option<f64>, env: Option<&str>, file: Option<f64>) -> CliResult<TimeStandard> {
    let minutes = match (flag, env) {
        (Some(v), _) => v,
        (None, Some(raw)) => raw
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{TETCY_ENV}: not a number: {raw:?}")))?,
        (None, None) => file.unwrap_or(TimeStandard::POSTULATED_MINUTES),
    };
    TimeStandard::new(minutes).map_err(|e| CliError::Usage(format!("tetcy: {e}")))
}

impl CliConfig {
    fn resolve(cli: &Cli, env_tetcy: Option<&str>) -> CliResult<Self> {
        let file = load_config(cli.config.as_deref())?;
        let empty_out = OutputArgs {
            format: None,
            output: None,
            round: Vec::new(),
        };
        let (tetcy, economies, rates, basket, series, country, cm_flags, out, table) = match &cli.command {
            Command::Cm(a) => (a.tetcy, a.economies.clone(), None, None, None, None, &[][..], &a.out, None),
            Command::Convert(a) => (
                a.tetcy,
                a.economies.clone(),
                None,
                None,
                None,
                a.country.clone(),
                &[][..],
                &empty_out,
                None,
            ),
            Command::Parity(_) => (None, None, None, None, None, None, &[][..], &empty_out, None),
            Command::Basket(a) => (
                a.source.tetcy,
                a.source.economies.clone(),
                None,
                a.basket.clone(),
                None,
                None,
                &a.source.cm[..],
                &a.out,
                None,
            ),
            Command::Percent(a) => (
                a.source.tetcy,
                a.source.economies.clone(),
                None,
                a.basket.clone(),
                None,
                None,
                &a.source.cm[..],
                &a.out,
                None,
            ),
            Command::Series(a) => (a.tetcy, None, None, None, a.series.clone(), None, &[][..], &a.out, None),
            Command::Report(a) => (
                a.source.tetcy,
                a.source.economies.clone(),
                a.rates.clone(),
                a.basket.clone(),
                a.series.clone(),
                a.country.clone(),
                &a.source.cm[..],
                &a.out,
                Some(a.table),
            ),
        };

        let manual_cm = if cm_flags.is_empty() {
            file.cm.clone().into_iter().collect()
        } else {
            cm_flags
                .iter()
                .map(|raw| parse_pair::<f64>(raw, "--cm"))
                .collect::<CliResult<Vec<_>>>()?
        };
        let mut round: BTreeMap<String, u32> = file.round.clone();
        for raw in &out.round {
            let (k, v) = parse_pair::<u32>(raw, "--round")?;
            round.insert(k, v);
        }

        Ok(CliConfig {
            std: resolve_tetcy(tetcy, env_tetcy, file.tetcy)?,
            economies: economies.or(file.economies),
            rates: rates.or(file.rates),
            basket: basket.or(file.basket),
            series: series.or(file.series),
            country: country.or(file.country),
            manual_cm,
            format: out.format.or(file.format).unwrap_or(Format::Text),
            output: out.output.clone(),
            table,
            round: round.into_iter().collect(),
        })
    }
}

fn require<'a>(path: &'a Option<PathBuf>, flag: &str) -> CliResult<&'a Path> {
    path.as_deref()
        .ok_or_else(|| CliError::Usage(format!("missing --{flag}")))
}

fn report_warnings(report: &IngestReport, err: &mut dyn Write) {
    for w in &report.warnings {
        let _ = writeln!(err, "warning: {w}");
    }
}

fn loaded<T>(result: Result<Loaded<T>, IngestError>, err: &mut dyn Write) -> CliResult<T> {
    match result {
        Ok(l) => {
            report_warnings(&l.report, err);
            Ok(l.data)
        }
        Err(e) => {
            if let Some(report) = e.report() {
                report_warnings(report, err);
                for d in &report.errors {
                    let _ = writeln!(err, "error: {d}");
                }
            }
            Err(CliError::Data(e.to_string()))
        }
    }
}

fn code(raw: &str) -> CliResult<CurrencyCode> {
    CurrencyCode::new(raw).map_err(|e| CliError::Usage(e.to_string()))
}

/// Cm values from either `--cm CODE=VALUE` flags or an economies file.
fn basket_cms(cfg: &CliConfig, err: &mut dyn Write) -> CliResult<Vec<MonMinValue>> {
    match (cfg.manual_cm.is_empty(), &cfg.economies) {
        (false, Some(_)) => Err(CliError::Usage(
            "give Cm either as --cm CODE=VALUE or via --economies, not both".into(),
        )),
        (false, None) => cfg
            .manual_cm
            .iter()
            .map(|(c, v)| Ok(MonMinValue::manual(code(c)?, *v)?))
            .collect(),
        (true, Some(path)) => {
            let economies = loaded(ingest::load_economies(path), err)?;
            cms_from_economies(&economies, cfg.std)
        }
        (true, None) => Err(CliError::Usage(
            "missing Cm source: use --cm CODE=VALUE or --economies FILE".into(),
        )),
    }
}

fn cms_from_economies(economies: &[EconomySnapshot], std: TimeStandard) -> CliResult<Vec<MonMinValue>> {
    let mut cms: Vec<MonMinValue> = Vec::with_capacity(economies.len());
    for e in economies {
        if cms.iter().any(|c| c.currency == e.currency) {
            return Err(CliError::Data(format!(
                "currency {} appears for more than one economy; Cm per currency is ambiguous",
                e.currency
            )));
        }
        cms.push(compute_cm(e, std)?);
    }
    Ok(cms)
}

fn find_country<'a>(economies: &'a [EconomySnapshot], country: &str) -> CliResult<&'a EconomySnapshot> {
    economies
        .iter()
        .find(|e| e.country == country)
        .ok_or_else(|| CliError::Data(format!("country {country:?} not found in economies file")))
}

fn finish_table(mut spec: TableSpec, data: TableData, cfg: &CliConfig) -> CliResult<RenderedTable> {
    for (column, dp) in &cfg.round {
        spec.override_rounding(column, Rounding::Decimals(*dp))
            .map_err(|e| CliError::Usage(format!("--round: {e}")))?;
    }
    Ok(render_table(&spec, &data)?)
}

fn format_table(table: &RenderedTable, format: Format) -> String {
    match format {
        Format::Text => table.to_text(),
        Format::Csv => table.to_csv(),
    }
}

fn execute(cli: Cli, env_tetcy: Option<String>, err: &mut dyn Write) -> CliResult<Output> {
    let cfg = CliConfig::resolve(&cli, env_tetcy.as_deref())?;
    let text = match &cli.command {
        Command::Cm(_) => {
            let path = require(&cfg.economies, "economies")?;
            let economies = loaded(ingest::load_economies(path), err)?;
            let (spec, data) = report::table1(&economies, cfg.std)?;
            format_table(&finish_table(spec, data, &cfg)?, cfg.format)
        }
        Command::Convert(a) => cmd_convert(a, &cfg, err)?,
        Command::Parity(a) => {
            let placeholder = |c: &str| CurrencyCode::new(c).expect("static code");
            let rate = ExchangeRate::new(placeholder("REF"), placeholder("LOC"), a.rate)?;
            let reference = MonMinPrice::new("item", "", placeholder("REF"), a.reference)?;
            let local = MonMinPrice::new("item", "", placeholder("LOC"), a.local)?;
            let parity = parity_rate_any_item(&rate, &reference, &local)?;
            format!("{}\n", format_decimals(parity, a.decimals))
        }
        Command::Basket(_) => {
            let path = require(&cfg.basket, "basket")?;
            let basket = loaded(ingest::load_basket(path), err)?;
            let cms = basket_cms(&cfg, err)?;
            let (spec, data) = basket_listing(&basket, &cms)?;
            format_table(&finish_table(spec, data, &cfg)?, cfg.format)
        }
        Command::Percent(a) => match (a.price, a.salary) {
            (Some(price), Some(salary)) => {
                let ctx = code("XXX")?;
                let price = MonMinPrice::new("price", "", ctx.clone(), price)?;
                let salary = MonMinPrice::new("salary", "", ctx, salary)?;
                format!("{}\n", format_decimals(percent_of_salary(&price, &salary)?, a.decimals))
            }
            _ => {
                let path = require(&cfg.basket, "basket (or --price with --salary)")?;
                let basket = loaded(ingest::load_basket(path), err)?;
                let cms = basket_cms(&cfg, err)?;
                let (mut spec, data) = report::table4b(&basket, &cms)?;
                for col in spec.columns.iter_mut().skip(2) {
                    col.rule = report::ColumnRule::Number(Rounding::Decimals(a.decimals));
                }
                format_table(&finish_table(spec, data, &cfg)?, cfg.format)
            }
        },
        Command::Series(a) => cmd_series(a, &cfg, err)?,
        Command::Report(_) => cmd_report(&cfg, err)?,
    };
    Ok(Output {
        text,
        path: cfg.output.clone(),
    })
}

fn cmd_convert(a: &ConvertArgs, cfg: &CliConfig, err: &mut dyn Write) -> CliResult<String> {
    let cm = match (a.cm, &cfg.economies, &cfg.country) {
        (Some(v), _, _) => {
            let currency = match &a.currency {
                Some(c) => code(c)?,
                None => code("XXX")?,
            };
            MonMinValue::manual(currency, v)?
        }
        (None, Some(path), Some(country)) => {
            let economies = loaded(ingest::load_economies(path), err)?;
            compute_cm(find_country(&economies, country)?, cfg.std)?
        }
        _ => {
            return Err(CliError::Usage(
                "missing Cm source: use --cm VALUE or --economies FILE --country NAME".into(),
            ))
        }
    };
    let currency = match &a.currency {
        Some(c) => code(c)?,
        None => cm.currency.clone(),
    };
    let price = PriceQuote::new("amount", "", currency, a.amount)?;
    let monmin = to_monmin(&price, &cm)?;
    Ok(format!("{}\n", format_decimals(monmin.monmin(), a.decimals)))
}

fn extrema_text(ex: &ExtremaReport) -> String {
    let join = |ys: &[i32]| ys.iter().map(i32::to_string).collect::<Vec<_>>().join(",");
    format!("peaks: {}\ntroughs: {}\n", join(&ex.peaks), join(&ex.troughs))
}

fn cmd_series(a: &SeriesArgs, cfg: &CliConfig, err: &mut dyn Write) -> CliResult<String> {
    let path = require(&cfg.series, "series")?;
    let mut series = loaded(ingest::load_series(path), err)?;
    series.std = cfg.std;
    let extrema = if a.extrema {
        Some(detect_extrema(&series_in_monmin(&series)?)?)
    } else {
        None
    };
    let (spec, data) = report::table5(&series)?;
    let mut text = format_table(&finish_table(spec, data, cfg)?, cfg.format);
    if let Some(plot) = &a.plot {
        let csv = report::emit_plot_data(&series, extrema.as_ref())?;
        std::fs::write(plot, csv).map_err(|e| CliError::Data(format!("{}: {e}", plot.display())))?;
    }
    if let Some(ex) = &extrema {
        text.push('\n');
        text.push_str(&extrema_text(ex));
    }
    Ok(text)
}

fn cmd_report(cfg: &CliConfig, err: &mut dyn Write) -> CliResult<String> {
    let table = cfg.table.expect("report always has a table");
    let (spec, data) = match table {
        TableId::T1 => {
            let economies = loaded(ingest::load_economies(require(&cfg.economies, "economies")?), err)?;
            report::table1(&economies, cfg.std)?
        }
        TableId::T2 => {
            let rates = loaded(ingest::load_rates(require(&cfg.rates, "rates")?), err)?;
            let reference = match (&cfg.manual_cm[..], &cfg.economies, &cfg.country) {
                ([(c, v)], _, None) => MonMinValue::manual(code(c)?, *v)?,
                ([], Some(path), Some(country)) => {
                    let economies = loaded(ingest::load_economies(path), err)?;
                    compute_cm(find_country(&economies, country)?, cfg.std)?
                }
                _ => {
                    return Err(CliError::Usage(
                        "table 2 needs one reference Cm: --cm CODE=VALUE or --economies FILE --country NAME".into(),
                    ))
                }
            };
            report::table2(&reference, &rates)?
        }
        TableId::T3 | TableId::T4 | TableId::T4B => {
            let basket = loaded(ingest::load_basket(require(&cfg.basket, "basket")?), err)?;
            let cms = basket_cms(cfg, err)?;
            match table {
                TableId::T3 => report::table3(&basket, &cms)?,
                TableId::T4 => report::table4(&basket, &cms)?,
                _ => report::table4b(&basket, &cms)?,
            }
        }
        TableId::T5 => {
            let mut series = loaded(ingest::load_series(require(&cfg.series, "series")?), err)?;
            series.std = cfg.std;
            report::table5(&series)?
        }
    };
    Ok(format_table(&finish_table(spec, data, cfg)?, cfg.format))
}

/// Long-format listing of every basket quote with its MonMin price.
fn basket_listing(
    basket: &ingest::Basket,
    cms: &[MonMinValue],
) -> Result<(TableSpec, TableData), ReportError> {
    use crate::report::{Cell, ColumnSpec};
    let spec = TableSpec {
        table_id: TableId::T3,
        title: "Basket in MonMin".to_string(),
        columns: vec![
            ColumnSpec::text("country"),
            ColumnSpec::text("currency"),
            ColumnSpec::text("item"),
            ColumnSpec::text("unit"),
            ColumnSpec::decimals("amount", 2),
            ColumnSpec::decimals("monmin", 0),
            ColumnSpec::text("role"),
        ],
    };
    let mut data = TableData::default();
    for g in &basket.groups {
        let cm = cms
            .iter()
            .find(|c| c.currency == g.currency)
            .ok_or_else(|| ReportError::MissingCm(g.currency.to_string()))?;
        data.notes.push(format!(
            "{}: Cm {} = {} per MonMin ({})",
            g.country,
            cm.currency,
            format_decimals(cm.value(), 7),
            cm.source
        ));
        for e in &g.entries {
            data.rows.push(vec![
                Cell::from(g.country.as_str()),
                Cell::from(g.currency.code()),
                Cell::from(e.quote.item.as_str()),
                Cell::from(e.quote.unit.as_str()),
                Cell::Number(e.quote.amount()),
                Cell::Number(to_monmin(&e.quote, cm)?.monmin()),
                Cell::from(e.role.as_str()),
            ]);
        }
    }
    Ok((spec, data))
}
