//! Domain types and arithmetic of the Monetary Minute (ṁ).
//!
//! One Monetary Minute is 1/525600 of a year's total economic time capacity.
//! Its value `Cṁ` in a currency `C` is GDP per capita divided by the number
//! of minutes in the year, so prices can be restated as a share of the
//! average person's yearly output:
//!
//! ```text
//! Cṁ  = GDP / population / minutes_per_year
//! Cṁ' = Cṁ × rate(C → C')
//! P_ṁ = P_C / Cṁ
//! ```
//!
//! All arithmetic is carried in `f64`. Rounding belongs to the reporting
//! layer (see [`crate::rounding`]).

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use chrono::NaiveDate;

use crate::error::{ensure_non_negative, ensure_positive, MonMinError, Result};

/// ISO-style currency identifier, optionally carrying a display glyph.
///
/// Equality, ordering and hashing only look at the code.
#[derive(Debug, Clone)]
pub struct CurrencyCode {
    code: String,
    symbol: Option<String>,
}

impl CurrencyCode {
    pub fn new(code: &str) -> Result<Self> {
        let valid = (3..=4).contains(&code.len()) && code.bytes().all(|b| b.is_ascii_uppercase());
        if !valid {
            return Err(MonMinError::InvalidCurrencyCode(code.to_string()));
        }
        Ok(Self {
            code: code.to_string(),
            symbol: None,
        })
    }

    pub fn with_symbol(mut self, symbol: impl Into<String>) -> Self {
        self.symbol = Some(symbol.into());
        self
    }

    pub fn code(&self) -> &str {
        &self.code
    }

    pub fn symbol(&self) -> Option<&str> {
        self.symbol.as_deref()
    }
}

impl PartialEq for CurrencyCode {
    fn eq(&self, other: &Self) -> bool {
        self.code == other.code
    }
}

impl Eq for CurrencyCode {}

impl Hash for CurrencyCode {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.code.hash(state);
    }
}

impl PartialOrd for CurrencyCode {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CurrencyCode {
    fn cmp(&self, other: &Self) -> Ordering {
        self.code.cmp(&other.code)
    }
}

impl FromStr for CurrencyCode {
    type Err = MonMinError;

    fn from_str(s: &str) -> Result<Self> {
        Self::new(s)
    }
}

impl fmt::Display for CurrencyCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.code)
    }
}

/// Minutes in the economic year. Defaults to 365 × 24 × 60 = 525600.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeStandard {
    minutes_per_year: f64,
}

impl TimeStandard {
    /// 365 days × 24 hours × 60 minutes.
    pub const POSTULATED_MINUTES: f64 = 525_600.0;
    /// Mean astronomical year in minutes.
    pub const ASTRONOMICAL_MINUTES: f64 = 525_948.766;

    pub fn new(minutes_per_year: f64) -> Result<Self> {
        ensure_positive("minutes_per_year", minutes_per_year)?;
        Ok(Self { minutes_per_year })
    }

    pub fn astronomical() -> Self {
        Self {
            minutes_per_year: Self::ASTRONOMICAL_MINUTES,
        }
    }

    pub fn minutes_per_year(&self) -> f64 {
        self.minutes_per_year
    }
}

impl Default for TimeStandard {
    fn default() -> Self {
        Self {
            minutes_per_year: Self::POSTULATED_MINUTES,
        }
    }
}

/// One economy's GDP (absolute currency units) and head count at a date.
#[derive(Debug, Clone, PartialEq)]
pub struct EconomySnapshot {
    pub country: String,
    pub currency: CurrencyCode,
    gdp: f64,
    population: u64,
    pub as_of: NaiveDate,
}

impl EconomySnapshot {
    pub fn new(
        country: impl Into<String>,
        currency: CurrencyCode,
        gdp: f64,
        population: u64,
        as_of: NaiveDate,
    ) -> Result<Self> {
        ensure_positive("gdp", gdp)?;
        if population == 0 {
            return Err(MonMinError::NonPositiveInput {
                what: "population",
                value: 0.0,
            });
        }
        Ok(Self {
            country: country.into(),
            currency,
            gdp,
            population,
            as_of,
        })
    }

    pub fn gdp(&self) -> f64 {
        self.gdp
    }

    pub fn population(&self) -> u64 {
        self.population
    }

    pub fn gdp_per_capita(&self) -> f64 {
        self.gdp / self.population as f64
    }
}

/// Where a `Cṁ` figure came from. Reports always print it next to the value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmSource {
    ComputedFromGdp,
    CrossRate,
    Manual,
}

impl CmSource {
    pub fn label(self) -> &'static str {
        match self {
            CmSource::ComputedFromGdp => "computed-from-gdp",
            CmSource::CrossRate => "cross-rate",
            CmSource::Manual => "manual",
        }
    }
}

impl fmt::Display for CmSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Currency units per Monetary Minute.
#[derive(Debug, Clone, PartialEq)]
pub struct MonMinValue {
    pub currency: CurrencyCode,
    value: f64,
    pub source: CmSource,
}

impl MonMinValue {
    /// A `Cṁ` supplied by hand, e.g. a figure transcribed from a published table.
    pub fn manual(currency: CurrencyCode, value: f64) -> Result<Self> {
        ensure_positive("cm", value)?;
        Ok(Self {
            currency,
            value,
            source: CmSource::Manual,
        })
    }

    pub fn value(&self) -> f64 {
        self.value
    }
}

/// `rate` units of `quote` buy one unit of `base`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExchangeRate {
    pub base: CurrencyCode,
    pub quote: CurrencyCode,
    rate: f64,
    pub as_of: Option<NaiveDate>,
}

impl ExchangeRate {
    pub fn new(base: CurrencyCode, quote: CurrencyCode, rate: f64) -> Result<Self> {
        ensure_positive("rate", rate)?;
        if base == quote {
            return Err(MonMinError::SameCurrency(base.code().to_string()));
        }
        Ok(Self {
            base,
            quote,
            rate,
            as_of: None,
        })
    }

    pub fn as_of(mut self, date: NaiveDate) -> Self {
        self.as_of = Some(date);
        self
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn inverse(&self) -> ExchangeRate {
        ExchangeRate {
            base: self.quote.clone(),
            quote: self.base.clone(),
            rate: 1.0 / self.rate,
            as_of: self.as_of,
        }
    }
}

/// Relative tolerance for `rate(a,b) × rate(b,a) = 1`.
pub const RECIPROCAL_TOLERANCE: f64 = 1e-6;

/// A reciprocal pair whose product strays from 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ReciprocalMismatch {
    pub base: CurrencyCode,
    pub quote: CurrencyCode,
    pub product: f64,
}

/// Directed exchange rates, at most one per `(base, quote)` pair.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RateTable {
    rates: BTreeMap<(CurrencyCode, CurrencyCode), ExchangeRate>,
}

impl RateTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a rate. A pair that is already present is handed back unchanged.
    pub fn insert(&mut self, rate: ExchangeRate) -> std::result::Result<(), ExchangeRate> {
        let key = (rate.base.clone(), rate.quote.clone());
        if self.rates.contains_key(&key) {
            return Err(rate);
        }
        self.rates.insert(key, rate);
        Ok(())
    }

    pub fn get(&self, base: &CurrencyCode, quote: &CurrencyCode) -> Option<&ExchangeRate> {
        self.rates.get(&(base.clone(), quote.clone()))
    }

    pub fn iter(&self) -> impl Iterator<Item = &ExchangeRate> {
        self.rates.values()
    }

    pub fn len(&self) -> usize {
        self.rates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rates.is_empty()
    }

    /// Pairs where both directions are quoted and their product is not 1.
    /// Each pair is reported once, from the lexically smaller base.
    pub fn reciprocal_mismatches(&self) -> Vec<ReciprocalMismatch> {
        self.rates
            .iter()
            .filter(|((base, quote), _)| base < quote)
            .filter_map(|((base, quote), forward)| {
                let back = self.get(quote, base)?;
                let product = forward.rate * back.rate;
                ((product - 1.0).abs() > RECIPROCAL_TOLERANCE).then(|| ReciprocalMismatch {
                    base: base.clone(),
                    quote: quote.clone(),
                    product,
                })
            })
            .collect()
    }
}

/// A price in a national currency.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceQuote {
    pub item: String,
    pub unit: String,
    pub currency: CurrencyCode,
    amount: f64,
}

impl PriceQuote {
    pub fn new(
        item: impl Into<String>,
        unit: impl Into<String>,
        currency: CurrencyCode,
        amount: f64,
    ) -> Result<Self> {
        ensure_non_negative("amount", amount)?;
        Ok(Self {
            item: item.into(),
            unit: unit.into(),
            currency,
            amount,
        })
    }

    pub fn amount(&self) -> f64 {
        self.amount
    }
}

/// A price expressed in Monetary Minutes of one currency context.
#[derive(Debug, Clone, PartialEq)]
pub struct MonMinPrice {
    pub item: String,
    pub unit: String,
    pub currency_context: CurrencyCode,
    monmin: f64,
}

impl MonMinPrice {
    pub fn new(
        item: impl Into<String>,
        unit: impl Into<String>,
        currency_context: CurrencyCode,
        monmin: f64,
    ) -> Result<Self> {
        ensure_non_negative("monmin", monmin)?;
        Ok(Self {
            item: item.into(),
            unit: unit.into(),
            currency_context,
            monmin,
        })
    }

    pub fn monmin(&self) -> f64 {
        self.monmin
    }
}

/// `Cṁ = GDP / population / minutes_per_year`.
pub fn compute_cm(econ: &EconomySnapshot, std: TimeStandard) -> Result<MonMinValue> {
    let gdp = ensure_positive("gdp", econ.gdp)?;
    let population = ensure_positive("population", econ.population as f64)?;
    let minutes = ensure_positive("minutes_per_year", std.minutes_per_year)?;
    Ok(MonMinValue {
        currency: econ.currency.clone(),
        value: gdp / population / minutes,
        source: CmSource::ComputedFromGdp,
    })
}

/// Restates a reference `Cṁ` in the rate's quote currency.
pub fn cross_cm(reference: &MonMinValue, rate: &ExchangeRate) -> Result<MonMinValue> {
    if rate.base != reference.currency {
        return Err(MonMinError::CurrencyMismatch {
            expected: reference.currency.to_string(),
            found: rate.base.to_string(),
        });
    }
    Ok(MonMinValue {
        currency: rate.quote.clone(),
        value: reference.value * rate.rate,
        source: CmSource::CrossRate,
    })
}

/// Monetary Minutes bought by one currency unit.
pub fn invert_cm(cm: &MonMinValue) -> Result<f64> {
    let value = ensure_positive("cm", cm.value)?;
    Ok(1.0 / value)
}

/// `P_ṁ = P_C / Cṁ`.
pub fn to_monmin(price: &PriceQuote, cm: &MonMinValue) -> Result<MonMinPrice> {
    if price.currency != cm.currency {
        return Err(MonMinError::CurrencyMismatch {
            expected: cm.currency.to_string(),
            found: price.currency.to_string(),
        });
    }
    let value = ensure_positive("cm", cm.value)?;
    Ok(MonMinPrice {
        item: price.item.clone(),
        unit: price.unit.clone(),
        currency_context: cm.currency.clone(),
        monmin: price.amount / value,
    })
}

/// `P_C = P_ṁ × Cṁ`.
pub fn from_monmin(price: &MonMinPrice, cm: &MonMinValue) -> Result<PriceQuote> {
    if price.currency_context != cm.currency {
        return Err(MonMinError::CurrencyMismatch {
            expected: cm.currency.to_string(),
            found: price.currency_context.to_string(),
        });
    }
    Ok(PriceQuote {
        item: price.item.clone(),
        unit: price.unit.clone(),
        currency: cm.currency.clone(),
        amount: price.monmin * cm.value,
    })
}

/// The exchange rate at which `local` would cost as many Monetary Minutes
/// as `reference`: `rate × reference / local`.
///
/// Fails with [`MonMinError::ItemMismatch`] when the two prices name
/// different items; use [`parity_rate_any_item`] to override.
pub fn parity_rate(
    current_rate: &ExchangeRate,
    reference: &MonMinPrice,
    local: &MonMinPrice,
) -> Result<f64> {
    if reference.item != local.item {
        return Err(MonMinError::ItemMismatch {
            reference: reference.item.clone(),
            local: local.item.clone(),
        });
    }
    parity_rate_any_item(current_rate, reference, local)
}

pub fn parity_rate_any_item(
    current_rate: &ExchangeRate,
    reference: &MonMinPrice,
    local: &MonMinPrice,
) -> Result<f64> {
    let local_monmin = ensure_positive("local monmin", local.monmin)?;
    Ok(current_rate.rate * reference.monmin / local_monmin)
}

/// `100 × price / salary`, both in the same currency context.
pub fn percent_of_salary(price: &MonMinPrice, salary: &MonMinPrice) -> Result<f64> {
    if price.currency_context != salary.currency_context {
        return Err(MonMinError::CurrencyMismatch {
            expected: salary.currency_context.to_string(),
            found: price.currency_context.to_string(),
        });
    }
    let salary = ensure_positive("salary monmin", salary.monmin)?;
    Ok(100.0 * price.monmin / salary)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code(c: &str) -> CurrencyCode {
        CurrencyCode::new(c).unwrap()
    }

    fn date() -> NaiveDate {
        NaiveDate::from_ymd_opt(2019, 1, 1).unwrap()
    }

    fn econ(cur: &str, gdp: f64, pop: u64) -> EconomySnapshot {
        EconomySnapshot::new("X", code(cur), gdp, pop, date()).unwrap()
    }

    fn cm(cur: &str, v: f64) -> MonMinValue {
        MonMinValue::manual(code(cur), v).unwrap()
    }

    fn mp(item: &str, cur: &str, v: f64) -> MonMinPrice {
        MonMinPrice::new(item, "", code(cur), v).unwrap()
    }

    fn rate(b: &str, q: &str, r: f64) -> ExchangeRate {
        ExchangeRate::new(code(b), code(q), r).unwrap()
    }

    #[test]
    fn currency_code_validation() {
        assert!(CurrencyCode::new("USD").is_ok());
        assert!(CurrencyCode::new("USDT").is_ok());
        assert!(CurrencyCode::new("usd").is_err());
        assert!(CurrencyCode::new("US").is_err());
        assert!(CurrencyCode::new("").is_err());
        assert!(CurrencyCode::new("EURO1").is_err());
        assert_eq!(code("JPY").with_symbol("Y"), code("JPY"));
    }

    #[test]
    fn time_standard_default_is_exact() {
        assert_eq!(TimeStandard::default().minutes_per_year(), 525600.0);
        assert_eq!(TimeStandard::astronomical().minutes_per_year(), 525948.766);
        assert!(TimeStandard::new(0.0).is_err());
        assert!(TimeStandard::new(-1.0).is_err());
        assert!(TimeStandard::new(f64::NAN).is_err());
    }

    #[test]
    fn snapshot_rejects_non_positive() {
        assert!(EconomySnapshot::new("X", code("USD"), 0.0, 1, date()).is_err());
        assert!(EconomySnapshot::new("X", code("USD"), -5.0, 1, date()).is_err());
        assert!(EconomySnapshot::new("X", code("USD"), 5.0, 0, date()).is_err());
    }

    #[test]
    fn compute_cm_us() {
        let v = compute_cm(&econ("USD", 20_891_400_000_000.0, 328_467_812), TimeStandard::default()).unwrap();
        assert!((v.value() - 0.1210095).abs() < 5e-8);
        assert_eq!(v.source, CmSource::ComputedFromGdp);
        assert_eq!(v.currency, code("USD"));
    }

    #[test]
    fn compute_cm_unit_value_when_gdp_is_minutes_times_population() {
        let pop = 12_345_u64;
        let v = compute_cm(&econ("CZK", 525600.0 * pop as f64, pop), TimeStandard::default()).unwrap();
        assert_eq!(v.value(), 1.0);
    }

    #[test]
    fn compute_cm_czech_and_japan() {
        let cz = compute_cm(&econ("CZK", 5_328_738_000_000.0, 10_649_800), TimeStandard::default()).unwrap();
        assert!((cz.value() - 0.9519794).abs() < 5e-8);
        let jp = compute_cm(&econ("JPY", 549_700_000_000_000.0, 126_200_000), TimeStandard::default()).unwrap();
        assert!((jp.value() - 8.2872612).abs() < 5e-8);
    }

    #[test]
    fn cross_cm_euro_column() {
        let eur = cross_cm(&cm("USD", 0.11918), &rate("USD", "EUR", 1.1325)).unwrap();
        assert!((eur.value() - 0.134971).abs() < 5e-6);
        assert_eq!(eur.currency, code("EUR"));
        assert_eq!(eur.source, CmSource::CrossRate);
    }

    #[test]
    fn cross_cm_identity_and_doubling() {
        let usd = cm("USD", 0.11918);
        assert_eq!(cross_cm(&usd, &rate("USD", "EUR", 1.0)).unwrap().value(), 0.11918);
        let x = cross_cm(&usd, &rate("USD", "XAU", 2.0)).unwrap();
        assert!((x.value() - 0.23836).abs() < 1e-15);
    }

    #[test]
    fn cross_cm_rejects_wrong_base() {
        let err = cross_cm(&cm("USD", 0.11918), &rate("EUR", "GBP", 0.9)).unwrap_err();
        assert!(matches!(err, MonMinError::CurrencyMismatch { .. }));
    }

    #[test]
    fn invert_cm_values() {
        assert!((invert_cm(&cm("USD", 0.11918)).unwrap() - 8.39).abs() < 0.005);
        assert_eq!(invert_cm(&cm("USD", 1.0)).unwrap(), 1.0);
        assert!((invert_cm(&cm("CNY", 0.00023033)).unwrap() - 4341.59).abs() < 0.05);
    }

    #[test]
    fn to_monmin_gold() {
        let gold = PriceQuote::new("Gold", "1 oz", code("USD"), 1447.0).unwrap();
        let p = to_monmin(&gold, &cm("USD", 0.121001)).unwrap();
        assert!((p.monmin() - 11958.0).abs() <= 1.0);
        let gold = PriceQuote::new("Gold", "1 oz", code("CZK"), 32940.96).unwrap();
        let p = to_monmin(&gold, &cm("CZK", 0.951979)).unwrap();
        assert!((p.monmin() - 34603.0).abs() <= 1.0);
    }

    #[test]
    fn to_monmin_zero_price_and_mismatch() {
        let zero = PriceQuote::new("Air", "1 l", code("GBP"), 0.0).unwrap();
        assert_eq!(to_monmin(&zero, &cm("GBP", 0.0146)).unwrap().monmin(), 0.0);
        let err = to_monmin(&zero, &cm("USD", 0.12)).unwrap_err();
        assert!(matches!(err, MonMinError::CurrencyMismatch { .. }));
    }

    #[test]
    fn from_monmin_values() {
        let c = cm("USD", 0.121001);
        let q = from_monmin(&mp("X", "USD", 10_000.0), &c).unwrap();
        assert!((q.amount() - 1210.01).abs() < 1e-9);
        assert_eq!(from_monmin(&mp("X", "USD", 0.0), &c).unwrap().amount(), 0.0);
        let gold = PriceQuote::new("Gold", "1 oz", code("USD"), 1447.0).unwrap();
        let back = from_monmin(&to_monmin(&gold, &c).unwrap(), &c).unwrap();
        assert!((back.amount() - 1447.0).abs() / 1447.0 < 1e-12);
        assert!(from_monmin(&mp("X", "EUR", 1.0), &c).is_err());
    }

    #[test]
    fn parity_rate_czech_crown() {
        let usd_gold = mp("Gold", "USD", 11958.0);
        let p = parity_rate(&rate("USD", "CZK", 22.765), &usd_gold, &mp("Gold", "CZK", 34603.0)).unwrap();
        assert!((p - 7.867).abs() < 0.005);
        let p = parity_rate(&rate("EUR", "CZK", 25.549), &usd_gold, &mp("Gold", "EUR", 16589.0)).unwrap();
        assert!((p - 18.417).abs() < 0.005);
    }

    #[test]
    fn parity_rate_mcmeal_and_fixed_point() {
        let p = parity_rate(&rate("USD", "EUR", 0.88), &mp("McMeal", "USD", 58.0), &mp("McMeal", "EUR", 96.0)).unwrap();
        assert!((p - 0.53).abs() < 0.005);
        let p = parity_rate(&rate("USD", "EUR", 3.21), &mp("A", "USD", 77.0), &mp("A", "EUR", 77.0)).unwrap();
        assert_eq!(p, 3.21);
    }

    #[test]
    fn parity_rate_errors() {
        let r = rate("USD", "EUR", 0.88);
        let err = parity_rate(&r, &mp("A", "USD", 1.0), &mp("A", "EUR", 0.0)).unwrap_err();
        assert!(matches!(err, MonMinError::NonPositiveInput { .. }));
        let err = parity_rate(&r, &mp("A", "USD", 1.0), &mp("B", "EUR", 2.0)).unwrap_err();
        assert!(matches!(err, MonMinError::ItemMismatch { .. }));
        assert_eq!(parity_rate_any_item(&r, &mp("A", "USD", 1.0), &mp("B", "EUR", 2.0)).unwrap(), 0.44);
    }

    #[test]
    fn percent_of_salary_values() {
        let salary = mp("Salary", "USD", 25867.0);
        let p = percent_of_salary(&mp("McMeal", "USD", 58.0), &salary).unwrap();
        assert!((p - 0.22).abs() < 0.005);
        let p = percent_of_salary(&mp("Meal", "USD", 123.0), &salary).unwrap();
        assert!((p - 0.48).abs() < 0.005);
        assert_eq!(percent_of_salary(&salary, &salary).unwrap(), 100.0);
        assert!(percent_of_salary(&salary, &mp("S", "USD", 0.0)).is_err());
        assert!(percent_of_salary(&mp("M", "EUR", 1.0), &salary).is_err());
    }

    #[test]
    fn rate_table_duplicates_and_reciprocals() {
        let mut t = RateTable::new();
        t.insert(rate("USD", "EUR", 2.0)).unwrap();
        assert!(t.insert(rate("USD", "EUR", 2.1)).is_err());
        t.insert(rate("EUR", "USD", 0.5)).unwrap();
        assert!(t.reciprocal_mismatches().is_empty());

        let mut t = RateTable::new();
        t.insert(rate("USD", "EUR", 2.0)).unwrap();
        t.insert(rate("EUR", "USD", 0.4)).unwrap();
        let warn = t.reciprocal_mismatches();
        assert_eq!(warn.len(), 1);
        assert!((warn[0].product - 0.8).abs() < 1e-12);
    }

    #[test]
    fn exchange_rate_invariants() {
        assert!(ExchangeRate::new(code("USD"), code("USD"), 1.0).is_err());
        assert!(ExchangeRate::new(code("USD"), code("EUR"), 0.0).is_err());
        let inv = rate("USD", "CZK", 22.765).inverse();
        assert_eq!(inv.base, code("CZK"));
        assert!((inv.rate() * 22.765 - 1.0).abs() < 1e-15);
    }
}
