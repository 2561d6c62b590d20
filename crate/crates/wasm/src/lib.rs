//! Browser bindings. Every export returns a JSON string or throws a message.

use mochis_core::moments::moments as exact_moments;
use mochis_core::numeric::format_rational;
use mochis_core::reconstruct::reconstruct_cdf;
use mochis_core::stattest::{two_sample_test as run_two_sample, Side, TwoSampleConfig};
use mochis_core::{StatisticSpec, WeightVector};
use serde_json::json;
use wasm_bindgen::prelude::*;

fn fail(e: impl std::fmt::Display) -> JsValue {
    JsValue::from_str(&e.to_string())
}

fn spec(continuous: bool, n: u32, p: u32, weights: &str) -> Result<StatisticSpec, JsValue> {
    let w = WeightVector::parse(weights).map_err(fail)?;
    if continuous {
        StatisticSpec::continuous(p, w).map_err(fail)
    } else {
        StatisticSpec::discrete(u64::from(n), p, w).map_err(fail)
    }
}

fn parse_sample(text: &str) -> Result<Vec<f64>, JsValue> {
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| match t.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(fail(format!("cannot parse {t:?} as a number"))),
        })
        .collect()
}

#[wasm_bindgen]
pub fn moments(continuous: bool, n: u32, p: u32, weights: &str, count: u32) -> Result<String, JsValue> {
    let spec = spec(continuous, n, p, weights)?;
    let seq = exact_moments(&spec, count as usize).map_err(fail)?;
    let rows: Vec<_> = (0..=count as usize)
        .map(|m| {
            json!({
                "order": m,
                "raw": format_rational(&seq.raw_moment(m)),
                "normalized": format_rational(&seq.moment(m)),
                "approx": seq.moment_f64(m),
            })
        })
        .collect();
    Ok(json!(rows).to_string())
}

/// CDF of the normalized statistic sampled at `points + 1` evenly spaced values.
#[wasm_bindgen]
pub fn cdf_curve(continuous: bool, n: u32, p: u32, weights: &str, count: u32, points: u32) -> Result<String, JsValue> {
    let spec = spec(continuous, n, p, weights)?;
    let seq = exact_moments(&spec, count as usize).map_err(fail)?;
    let est = reconstruct_cdf(&seq, count as usize).map_err(fail)?;
    let points = points.max(1);
    let xs: Vec<f64> = (0..=points).map(|i| f64::from(i) / f64::from(points)).collect();
    let ys: Vec<f64> = xs.iter().map(|&x| est.cdf(x)).collect();
    Ok(json!({ "x": xs, "cdf": ys, "error_bound": est.error_bound() }).to_string())
}

#[wasm_bindgen]
pub fn two_sample(x: &str, y: &str, p: u32, weights: &str, side: &str, seed: u32) -> Result<String, JsValue> {
    let x = parse_sample(x)?;
    let y = parse_sample(y)?;
    let w = if weights.trim().is_empty() {
        WeightVector::ones(x.len() + 1).map_err(fail)?
    } else {
        WeightVector::parse(weights).map_err(fail)?
    };
    let side: Side = side.parse().map_err(fail)?;
    let config = TwoSampleConfig::new(p, w).side(side);
    let result = run_two_sample(&x, &y, &config, u64::from(seed)).map_err(fail)?;
    serde_json::to_string(&result).map_err(fail)
}
