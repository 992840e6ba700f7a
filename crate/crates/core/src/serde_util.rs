//! Serialization helpers: rationals as `"a/b"` strings, positions 1-based.

use num_rational::BigRational;
use serde::Serializer;

use crate::matcore::format_rational;

pub fn rational<S: Serializer>(x: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(x))
}

/// Positions are 0-based in memory and 1-based on disk.
pub fn one_based<S: Serializer>(xs: &[usize], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(xs.iter().map(|&i| i + 1))
}
