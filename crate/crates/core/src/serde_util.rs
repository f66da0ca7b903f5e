//! Serde helpers that keep exact values as strings on the wire.

use rust_decimal::Decimal;
use serde::Serializer;

pub(crate) fn decimal_str<S: Serializer>(value: &Decimal, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(value)
}
