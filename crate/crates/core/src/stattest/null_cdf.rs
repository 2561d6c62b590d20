use std::str::FromStr;

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Piecewise-linear CDF through `(x, F(x))` knots with `F` rising from 0 to 1.
#[derive(Clone, Debug, PartialEq)]
pub struct CdfTable {
    knots: Vec<(f64, f64)>,
}

impl CdfTable {
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        let bad = |m: &str| Err(Error::InvalidArgument(format!("CDF table: {m}")));
        if knots.len() < 2 {
            return bad("needs at least two knots");
        }
        if knots.iter().any(|(x, f)| !x.is_finite() || !f.is_finite()) {
            return bad("knots must be finite");
        }
        if knots.windows(2).any(|w| w[1].0 <= w[0].0 || w[1].1 < w[0].1) {
            return bad("x must increase strictly and F must not decrease");
        }
        if knots[0].1 != 0.0 || knots[knots.len() - 1].1 != 1.0 {
            return bad("F must start at 0 and end at 1");
        }
        Ok(Self { knots })
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    fn cdf(&self, x: f64) -> Result<f64> {
        let first = self.knots[0].0;
        let last = self.knots[self.knots.len() - 1].0;
        if !(first..=last).contains(&x) {
            return Err(Error::OutsideSupport { value: x });
        }
        let i = self.knots.partition_point(|k| k.0 <= x).clamp(1, self.knots.len() - 1);
        let (x0, f0) = self.knots[i - 1];
        let (x1, f1) = self.knots[i];
        Ok(f0 + (f1 - f0) * (x - x0) / (x1 - x0))
    }

    fn quantile(&self, u: f64) -> f64 {
        let i = self.knots.partition_point(|k| k.1 < u).clamp(1, self.knots.len() - 1);
        let (x0, f0) = self.knots[i - 1];
        let (x1, f1) = self.knots[i];
        if f1 == f0 {
            x0
        } else {
            x0 + (x1 - x0) * (u - f0) / (f1 - f0)
        }
    }
}

/// Fully specified continuous null distribution of a one-sample test.
#[derive(Clone, Debug, PartialEq)]
pub enum NullCdfSpec {
    Uniform,
    Normal { mean: f64, sd: f64 },
    Exponential { rate: f64 },
    Table(CdfTable),
}

impl NullCdfSpec {
    pub fn normal(mean: f64, sd: f64) -> Result<Self> {
        if !(mean.is_finite() && sd.is_finite() && sd > 0.0) {
            return Err(Error::InvalidArgument("normal null needs a finite mean and sd > 0".into()));
        }
        Ok(NullCdfSpec::Normal { mean, sd })
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::InvalidArgument("exponential null needs rate > 0".into()));
        }
        Ok(NullCdfSpec::Exponential { rate })
    }

    /// `F(x)`; errors outside the support.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        if x.is_nan() {
            return Err(Error::OutsideSupport { value: x });
        }
        match self {
            NullCdfSpec::Uniform => {
                if (0.0..=1.0).contains(&x) {
                    Ok(x)
                } else {
                    Err(Error::OutsideSupport { value: x })
                }
            }
            NullCdfSpec::Normal { mean, sd } => {
                if !x.is_finite() {
                    return Err(Error::OutsideSupport { value: x });
                }
                Ok(Normal::new(*mean, *sd).expect("validated").cdf(x))
            }
            NullCdfSpec::Exponential { rate } => {
                if x < 0.0 || !x.is_finite() {
                    return Err(Error::OutsideSupport { value: x });
                }
                Ok(-(-rate * x).exp_m1())
            }
            NullCdfSpec::Table(t) => t.cdf(x),
        }
    }

    /// `F^{-1}(u)` for `u` in `[0, 1]`.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::InvalidArgument(format!("probability {u} outside [0, 1]")));
        }
        Ok(match self {
            NullCdfSpec::Uniform => u,
            NullCdfSpec::Normal { mean, sd } => Normal::new(*mean, *sd).expect("validated").inverse_cdf(u),
            NullCdfSpec::Exponential { rate } => -(-u).ln_1p() / rate,
            NullCdfSpec::Table(t) => t.quantile(u),
        })
    }
}

impl FromStr for NullCdfSpec {
    type Err = Error;

    /// `uniform`, `normal:mu,sigma` or `exp:lambda`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (family, params) = s.split_once(':').unwrap_or((s, ""));
        let nums = || -> Result<Vec<f64>> {
            params
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::InvalidArgument(format!("bad parameter {t:?} in null spec {s:?}")))
                })
                .collect()
        };
        match family.to_ascii_lowercase().as_str() {
            "uniform" if params.is_empty() => Ok(NullCdfSpec::Uniform),
            "normal" => match nums()?.as_slice() {
                [m, sd] => Self::normal(*m, *sd),
                _ => Err(Error::InvalidArgument(format!("expected normal:mu,sigma, got {s:?}"))),
            },
            "exp" | "exponential" => match nums()?.as_slice() {
                [rate] => Self::exponential(*rate),
                _ => Err(Error::InvalidArgument(format!("expected exp:lambda, got {s:?}"))),
            },
            _ => Err(Error::InvalidArgument(format!("unknown null distribution {s:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_evaluate() {
        assert_eq!("uniform".parse::<NullCdfSpec>().unwrap(), NullCdfSpec::Uniform);
        let n: NullCdfSpec = "normal:1,2".parse().unwrap();
        assert!((n.cdf(1.0).unwrap() - 0.5).abs() < 1e-15);
        let e: NullCdfSpec = "exp:2".parse().unwrap();
        assert!((e.cdf(0.5).unwrap() - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
        assert!(e.cdf(-1.0).is_err());
        assert!("normal:a,b".parse::<NullCdfSpec>().is_err());
        assert!("normal:0,-1".parse::<NullCdfSpec>().is_err());
        assert!("cauchy".parse::<NullCdfSpec>().is_err());
        assert!(NullCdfSpec::Uniform.cdf(1.5).is_err());
    }

    #[test]
    fn quantiles_invert() {
        for spec in [
            NullCdfSpec::Uniform,
            NullCdfSpec::normal(-1.0, 0.5).unwrap(),
            NullCdfSpec::exponential(3.0).unwrap(),
            NullCdfSpec::Table(CdfTable::new(vec![(0.0, 0.0), (1.0, 0.25), (3.0, 1.0)]).unwrap()),
        ] {
            for u in [0.1, 0.25, 0.5, 0.9] {
                let x = spec.quantile(u).unwrap();
                assert!((spec.cdf(x).unwrap() - u).abs() < 1e-9, "{spec:?} at {u}");
            }
        }
    }

    #[test]
    fn table_validation() {
        assert!(CdfTable::new(vec![(0.0, 0.0)]).is_err());
        assert!(CdfTable::new(vec![(0.0, 0.0), (0.0, 1.0)]).is_err());
        assert!(CdfTable::new(vec![(0.0, 0.1), (1.0, 1.0)]).is_err());
        assert!(CdfTable::new(vec![(0.0, 0.0), (1.0, 0.6), (2.0, 0.5), (3.0, 1.0)]).is_err());
    }
}
