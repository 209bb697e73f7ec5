//! Display rounding. Values stay at full `f64` precision everywhere else;
//! these helpers are the only place digits are dropped.

use rust_decimal::prelude::FromPrimitive;
use rust_decimal::{Decimal, RoundingStrategy};
use serde::Deserialize;

/// How one column of numbers is printed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rounding {
    /// Fixed number of decimals, half away from zero.
    Decimals(u32),
    /// Fixed number of significant digits, half away from zero.
    Significant(u32),
}

impl Rounding {
    pub fn format(self, value: f64) -> String {
        match self {
            Rounding::Decimals(dp) => format_decimals(value, dp),
            Rounding::Significant(sf) => format_significant(value, sf),
        }
    }
}

// `Decimal::from_f64` takes the shortest decimal that round-trips to the
// same f64, so 0.125 stays a tie and 2.675 rounds from its printed form.
fn to_decimal(value: f64) -> Option<Decimal> {
    Decimal::from_f64(value)
}

fn strip_negative_zero(s: String) -> String {
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

/// `value` with exactly `dp` decimals, ties away from zero.
pub fn format_decimals(value: f64, dp: u32) -> String {
    match to_decimal(value) {
        Some(d) => {
            let mut r = d.round_dp_with_strategy(dp, RoundingStrategy::MidpointAwayFromZero);
            r.rescale(dp);
            strip_negative_zero(r.to_string())
        }
        None => format!("{:.*}", dp as usize, value),
    }
}

/// `value` rounded to `sf` significant digits, ties away from zero.
/// Integers keep their magnitude (12345 at 3 digits prints 12300).
pub fn format_significant(value: f64, sf: u32) -> String {
    let sf = sf.max(1);
    if value == 0.0 {
        return "0".to_string();
    }
    let Some(d) = to_decimal(value) else {
        return format!("{:.*e}", (sf - 1) as usize, value);
    };
    match d.round_sf_with_strategy(sf, RoundingStrategy::MidpointAwayFromZero) {
        Some(r) => {
            let magnitude = value.abs().log10().floor() as i64;
            let dp = (sf as i64 - 1 - magnitude).max(0) as u32;
            let mut r = r;
            r.rescale(dp);
            strip_negative_zero(r.to_string())
        }
        None => format!("{:.*e}", (sf - 1) as usize, value),
    }
}
