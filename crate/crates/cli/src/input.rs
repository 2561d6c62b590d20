//! Sample, moment and CDF-table files.

use std::fs;

use mochis_core::numeric::{parse_rational, BigRational};
use mochis_core::stattest::{CdfTable, NullCdfSpec};

use crate::{usage, CliError};

fn read(path: &str) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| usage(format!("{path}: {e}")))
}

/// Whitespace or newline separated decimals.
pub fn read_sample(path: &str) -> Result<Vec<f64>, CliError> {
    let text = read(path)?;
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        for token in line.split_whitespace() {
            match token.parse::<f64>() {
                Ok(v) if v.is_finite() => values.push(v),
                _ => return Err(usage(format!("{path}:{}: cannot parse {token:?} as a finite number", i + 1))),
            }
        }
    }
    Ok(values)
}

/// One rational per line, starting with `mu_0`.
pub fn read_moments(path: &str) -> Result<Vec<BigRational>, CliError> {
    let text = read(path)?;
    let values = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            parse_rational(l.trim())
                .ok_or_else(|| usage(format!("{path}:{}: cannot parse {:?} as a rational", i + 1, l.trim())))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if values.is_empty() {
        return Err(usage(format!("{path}: no moments")));
    }
    Ok(values)
}

/// Lines of `x F(x)`.
pub fn read_null_table(path: &str) -> Result<NullCdfSpec, CliError> {
    let text = read(path)?;
    let mut knots = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        let parsed: Option<Vec<f64>> = fields.iter().map(|f| f.parse().ok()).collect();
        match parsed.as_deref() {
            Some(&[x, f]) => knots.push((x, f)),
            _ => return Err(usage(format!("{path}:{}: expected \"x F(x)\"", i + 1))),
        }
    }
    Ok(NullCdfSpec::Table(CdfTable::new(knots)?))
}
