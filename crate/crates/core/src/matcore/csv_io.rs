use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::matrix::{DenseMatrix, EntryMode};
use crate::error::{Error, Result};

/// Parses a headerless numeric CSV. Rational mode accepts integers,
/// fractions `a/b`, and decimals with an optional exponent, all exactly.
pub fn parse_csv(text: &str, mode: EntryMode) -> Result<DenseMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut rows = 0;
    let mut cols = None;
    let mut floats = Vec::new();
    let mut exact = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        match cols {
            None => cols = Some(rec.len()),
            Some(c) if c != rec.len() => {
                return Err(Error::Parse(format!(
                    "row {} has {} fields, expected {c}",
                    rows + 1,
                    rec.len()
                )))
            }
            _ => {}
        }
        for field in rec.iter() {
            match mode {
                EntryMode::Float => floats.push(
                    field
                        .parse::<f64>()
                        .map_err(|_| Error::Parse(format!("not a number: {field:?}")))?,
                ),
                EntryMode::Rational => exact.push(parse_rational(field)?),
            }
        }
        rows += 1;
    }
    let cols = cols.ok_or_else(|| Error::Parse("empty matrix".into()))?;
    match mode {
        EntryMode::Float => DenseMatrix::from_f64(rows, cols, floats),
        EntryMode::Rational => DenseMatrix::from_rational(rows, cols, exact),
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if let Some((a, b)) = s.split_once('/') {
        let a: BigInt = a.trim().parse().map_err(|_| bad())?;
        let b: BigInt = b.trim().parse().map_err(|_| bad())?;
        if b.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(a, b));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(k) => (&s[..k], s[k + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all: BigInt = format!("0{int_part}{frac_part}").parse().map_err(|_| bad())?;
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut v = BigRational::from_integer(all);
    if scale >= 0 {
        v *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        v /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if neg { -v } else { v })
}

pub fn format_rational(x: &BigRational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Writes one line per row; rational entries as `a/b`, floats in shortest
/// round-trip form.
pub fn write_csv(m: &DenseMatrix) -> String {
    let mut out = String::new();
    for i in 0..m.rows() {
        let line: Vec<String> = (0..m.cols())
            .map(|j| match m.mode() {
                EntryMode::Rational => format_rational(&m.get_exact(i, j)),
                EntryMode::Float => format!("{}", m.get(i, j)),
            })
            .collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}
