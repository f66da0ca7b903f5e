//! Optimal truncation of a partial-sum series.
//!
//! Given partial sums `B_0..B_n` of an asymptotic expansion, the best value
//! is read off where two successive partial sums agree most closely. With
//! `g` the index minimising `|B_g - B_{g+1}|`:
//!
//! ```text
//! a = (B_g + B_{g+1}) / 2
//! b = |B_g - B_{g+1}|
//! estimate = a ± b
//! ```
//!
//! All arithmetic is exact decimal arithmetic, so gaps compare exactly and
//! ties are detected exactly. Ties go to the smallest `g`.

use std::fmt;
use std::str::FromStr;

use rust_decimal::{Decimal, RoundingStrategy};
use serde::Serialize;
use thiserror::Error;

use crate::serde_util::decimal_str;
use crate::series::{BSeries, SeriesError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EstimateError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("value out of range for exact decimal arithmetic")]
    Overflow,
}

/// When to widen the half-width `b`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorPolicy {
    /// Report `b = |B_g - B_{g+1}|` unchanged.
    #[default]
    AsIs,
    /// Double `b` when the chosen pair ends at the last available term,
    /// i.e. when no later term could have shown a smaller gap.
    DoubleIfTerminal,
    /// Always double `b`.
    AlwaysDouble,
}

impl ErrorPolicy {
    pub const ALL: [ErrorPolicy; 3] = [ErrorPolicy::AsIs, ErrorPolicy::DoubleIfTerminal, ErrorPolicy::AlwaysDouble];

    pub fn as_str(self) -> &'static str {
        match self {
            ErrorPolicy::AsIs => "as-is",
            ErrorPolicy::DoubleIfTerminal => "double-if-terminal",
            ErrorPolicy::AlwaysDouble => "always-double",
        }
    }
}

impl fmt::Display for ErrorPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ErrorPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.replace('_', "-").as_str() {
            "as-is" => Ok(ErrorPolicy::AsIs),
            "double-if-terminal" => Ok(ErrorPolicy::DoubleIfTerminal),
            "always-double" => Ok(ErrorPolicy::AlwaysDouble),
            other => {
                Err(format!("unknown error policy {other:?} (expected as-is, double-if-terminal or always-double)"))
            }
        }
    }
}

/// Whether the policy actually widened `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PolicyApplied {
    None,
    Doubled,
}

/// Result of optimal truncation: `a ± b` from the pair `(B_g, B_{g+1})`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TruncationEstimate {
    pub g: usize,
    #[serde(serialize_with = "decimal_str")]
    pub a: Decimal,
    #[serde(serialize_with = "decimal_str")]
    pub b_raw: Decimal,
    #[serde(serialize_with = "decimal_str")]
    pub b: Decimal,
    pub policy_applied: PolicyApplied,
    /// `g + 1` is the last index of the series.
    pub terminal_pair: bool,
}

/// `|B_i - B_{i+1}|` for every successive pair.
pub fn successive_gaps(series: &BSeries) -> Result<Vec<Decimal>, EstimateError> {
    gaps(series.values())
}

fn gaps(values: &[Decimal]) -> Result<Vec<Decimal>, EstimateError> {
    if values.len() < 2 {
        return Err(SeriesError::TooShort(values.len()).into());
    }
    values.windows(2).map(|w| w[0].checked_sub(w[1]).map(|d| d.abs()).ok_or(EstimateError::Overflow)).collect()
}

/// Exact midpoint of two decimals, rendered with no fewer fractional digits
/// than the inputs carry.
fn midpoint(x: Decimal, y: Decimal) -> Result<Decimal, EstimateError> {
    let sum = x.checked_add(y).ok_or(EstimateError::Overflow)?;
    let half = sum.checked_mul(Decimal::new(5, 1)).ok_or(EstimateError::Overflow)?;
    // mul silently rounds past 28 fractional digits
    if half.checked_mul(Decimal::TWO) != Some(sum) {
        return Err(EstimateError::Overflow);
    }
    let mut out = half.normalize();
    let scale = x.scale().max(y.scale());
    if out.scale() < scale {
        out.rescale(scale);
    }
    Ok(out)
}

/// Picks the successive pair with the smallest gap and returns `a ± b`.
pub fn optimal_truncation(series: &BSeries, policy: ErrorPolicy) -> Result<TruncationEstimate, EstimateError> {
    truncate_values(series.values(), policy)
}

/// Same as [`optimal_truncation`] on a bare slice; rejects fewer than two values.
pub fn truncate_values(values: &[Decimal], policy: ErrorPolicy) -> Result<TruncationEstimate, EstimateError> {
    let gaps = gaps(values)?;
    let mut g = 0;
    for (i, gap) in gaps.iter().enumerate().skip(1) {
        if *gap < gaps[g] {
            g = i;
        }
    }
    let b_raw = gaps[g];
    let a = midpoint(values[g], values[g + 1])?;
    let terminal_pair = g + 2 == values.len();
    let doubled = match policy {
        ErrorPolicy::AsIs => false,
        ErrorPolicy::DoubleIfTerminal => terminal_pair,
        ErrorPolicy::AlwaysDouble => true,
    };
    let (b, policy_applied) = if doubled {
        (b_raw.checked_mul(Decimal::TWO).ok_or(EstimateError::Overflow)?, PolicyApplied::Doubled)
    } else {
        (b_raw, PolicyApplied::None)
    };
    Ok(TruncationEstimate { g, a, b_raw, b, policy_applied, terminal_pair })
}

/// Rounded copies of `a` and `b` for presentation only.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DisplayValues {
    pub digits: u32,
    #[serde(serialize_with = "decimal_str")]
    pub a: Decimal,
    #[serde(serialize_with = "decimal_str")]
    pub b: Decimal,
}

/// Rounds half-to-even to exactly `digits` decimal places.
pub fn round_for_display(value: Decimal, digits: u32) -> Decimal {
    let mut r = value.round_dp_with_strategy(digits, RoundingStrategy::MidpointNearestEven);
    r.rescale(digits);
    r
}

/// An estimate together with the series it came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EstimateReport {
    pub series: BSeries,
    pub policy: ErrorPolicy,
    pub estimate: TruncationEstimate,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub display: Option<DisplayValues>,
}

pub fn estimate_report(
    series: &BSeries,
    policy: ErrorPolicy,
    display_digits: Option<u32>,
) -> Result<EstimateReport, EstimateError> {
    let estimate = optimal_truncation(series, policy)?;
    let display = display_digits.map(|digits| DisplayValues {
        digits,
        a: round_for_display(estimate.a, digits),
        b: round_for_display(estimate.b, digits),
    });
    Ok(EstimateReport { series: series.clone(), policy, estimate, display })
}
