//! Partial-sum series with exact decimal values.

use std::fmt;

use rust_decimal::Decimal;
use serde::Serialize;
use thiserror::Error;

/// Errors raised while building a [`BSeries`] or parsing one of its values.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("need at least 2 values, got {0}")]
    TooShort(usize),
    #[error("dimension must be a positive integer")]
    ZeroDimension,
    #[error("value {index} ({text:?}): {reason}")]
    InvalidValue { index: usize, text: String, reason: DecimalSyntax },
}

/// Why a decimal string was rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum DecimalSyntax {
    #[error("empty value")]
    Empty,
    #[error("exponent notation is not accepted")]
    Exponent,
    #[error("not a plain decimal number")]
    NotNumeric,
    #[error("too many significant digits for exact arithmetic")]
    TooPrecise,
}

/// Parses a plain decimal string (`-0.25`, `.1931`, `7`) without rounding.
///
/// Exponent notation is rejected, as is anything that does not fit in 28
/// significant digits.
pub fn parse_decimal(text: &str) -> Result<Decimal, DecimalSyntax> {
    let t = text.trim();
    if t.is_empty() {
        return Err(DecimalSyntax::Empty);
    }
    if t.contains(['e', 'E']) {
        return Err(DecimalSyntax::Exponent);
    }
    let (sign, body) = match t.as_bytes()[0] {
        b'-' => ("-", &t[1..]),
        b'+' => ("", &t[1..]),
        _ => ("", t),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    let digits_ok = |s: &str| s.bytes().all(|b| b.is_ascii_digit());
    if (int.is_empty() && frac.is_empty()) || !digits_ok(int) || !digits_ok(frac) {
        return Err(DecimalSyntax::NotNumeric);
    }
    let int = if int.is_empty() { "0" } else { int };
    let canonical = if frac.is_empty() { format!("{sign}{int}") } else { format!("{sign}{int}.{frac}") };
    Decimal::from_str_exact(&canonical).map_err(|_| DecimalSyntax::TooPrecise)
}

/// A finite sequence of partial sums `B_0..B_n` for one lattice dimension.
///
/// The original digit strings are kept next to the parsed values so that a
/// series written back out is digit-for-digit what was read in.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BSeries {
    #[serde(rename = "d")]
    dimension: u32,
    #[serde(rename = "B")]
    digits: Vec<String>,
    #[serde(skip)]
    values: Vec<Decimal>,
    label: String,
}

impl BSeries {
    /// Builds a series from decimal strings.
    pub fn parse<I, S>(dimension: u32, digits: I, label: impl Into<String>) -> Result<Self, SeriesError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let digits: Vec<String> = digits.into_iter().map(|s| s.as_ref().trim().to_owned()).collect();
        let values = digits
            .iter()
            .enumerate()
            .map(|(index, text)| {
                parse_decimal(text).map_err(|reason| SeriesError::InvalidValue { index, text: text.clone(), reason })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::check(dimension, values.len())?;
        Ok(BSeries { dimension, digits, values, label: label.into() })
    }

    /// Builds a series from already-exact values; the digit strings are the
    /// values' canonical renderings.
    pub fn from_values(dimension: u32, values: Vec<Decimal>, label: impl Into<String>) -> Result<Self, SeriesError> {
        Self::check(dimension, values.len())?;
        let digits = values.iter().map(Decimal::to_string).collect();
        Ok(BSeries { dimension, digits, values, label: label.into() })
    }

    fn check(dimension: u32, len: usize) -> Result<(), SeriesError> {
        if dimension == 0 {
            return Err(SeriesError::ZeroDimension);
        }
        if len < 2 {
            return Err(SeriesError::TooShort(len));
        }
        Ok(())
    }

    pub fn dimension(&self) -> u32 {
        self.dimension
    }

    pub fn values(&self) -> &[Decimal] {
        &self.values
    }

    /// The digit strings exactly as supplied.
    pub fn digits(&self) -> &[String] {
        &self.digits
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; a series holds at least two values.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Index of the last value, `n` in `B_0..B_n`.
    pub fn last_index(&self) -> usize {
        self.values.len() - 1
    }
}

impl fmt::Display for BSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d={} [{}]", self.dimension, self.digits.join(", "))
    }
}
