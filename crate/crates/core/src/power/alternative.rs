use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Law of a single inter-arrival time, scaled to mean 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "kebab-case")]
pub enum ArrivalLaw {
    Exponential,
    /// Sum of `shape` exponentials: squared coefficient of variation `1/shape`.
    Erlang { shape: u32 },
    /// Balanced two-phase hyperexponential with squared coefficient of variation `cv2 >= 1`.
    HyperExponential { cv2: f64 },
}

impl ArrivalLaw {
    pub fn cv2(&self) -> f64 {
        match self {
            ArrivalLaw::Exponential => 1.0,
            ArrivalLaw::Erlang { shape } => 1.0 / *shape as f64,
            ArrivalLaw::HyperExponential { cv2 } => *cv2,
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            ArrivalLaw::Erlang { shape: 0 } => Err(Error::InvalidArgument("Erlang shape must be >= 1".into())),
            ArrivalLaw::HyperExponential { cv2 } if !(cv2.is_finite() && *cv2 >= 1.0) => Err(
                Error::InvalidArgument(format!("hyperexponential needs a finite cv2 >= 1, got {cv2}")),
            ),
            _ => Ok(()),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            ArrivalLaw::Exponential => Exp1.sample(rng),
            ArrivalLaw::Erlang { shape } => {
                (0..*shape).map(|_| -> f64 { Exp1.sample(rng) }).sum::<f64>() / *shape as f64
            }
            ArrivalLaw::HyperExponential { cv2 } => {
                let q = 0.5 * (1.0 + ((cv2 - 1.0) / (cv2 + 1.0)).sqrt());
                let phase = if rng.random::<f64>() < q { q } else { 1.0 - q };
                let e: f64 = Exp1.sample(rng);
                e / (2.0 * phase)
            }
        }
    }
}

impl fmt::Display for ArrivalLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArrivalLaw::Exponential => write!(f, "exp"),
            ArrivalLaw::Erlang { shape } => write!(f, "erlang:{shape}"),
            ArrivalLaw::HyperExponential { cv2 } => write!(f, "hyperexp:{cv2}"),
        }
    }
}

impl FromStr for ArrivalLaw {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (family, param) = split_family(s);
        let law = match family.as_str() {
            "exp" | "exponential" if param.is_empty() => ArrivalLaw::Exponential,
            "erlang" => ArrivalLaw::Erlang {
                shape: param.trim().parse().map_err(|_| bad_alt(s))?,
            },
            "hyperexp" => ArrivalLaw::HyperExponential { cv2: parse_f64(param, s)? },
            _ => return Err(bad_alt(s)),
        };
        law.validate()?;
        Ok(law)
    }
}

/// Experimental layout that a sampler fills.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "design", rename_all = "kebab-case")]
pub enum Design {
    /// `k-1` reference points from N(0, 1) and `n` points from the alternative.
    TwoSample { k: usize, n: usize },
    /// `k` arrival times normalized to the `k-1` interior points of `[0, 1]`.
    OneSample { k: usize },
}

impl Design {
    pub fn k(&self) -> usize {
        match self {
            Design::TwoSample { k, .. } | Design::OneSample { k } => *k,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.k() < 2 {
            return Err(Error::InvalidArgument("designs need k >= 2".into()));
        }
        Ok(())
    }
}

/// One simulated data set.
#[derive(Clone, Debug, PartialEq)]
pub enum Sample {
    TwoSample { x: Vec<f64>, y: Vec<f64> },
    OneSample { z: Vec<f64> },
}

/// Alternative family for power studies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum AlternativeSpec {
    /// The design's null: `y ~ N(0, 1)` or exponential arrivals.
    Null,
    Location { mu: f64 },
    Scale { sigma: f64 },
    LocationScale { mu: f64, sigma: f64 },
    Arrivals { law: ArrivalLaw },
    /// `k-1` arrivals from `minus` and one, at a uniform position, from `plus`.
    Spiked { minus: ArrivalLaw, plus: ArrivalLaw },
    /// Each replicate draws from one component chosen uniformly.
    Mixture { components: Vec<AlternativeSpec> },
}

impl AlternativeSpec {
    pub fn validate(&self, design: &Design) -> Result<()> {
        design.validate()?;
        let two = matches!(design, Design::TwoSample { .. });
        let need = |ok: bool, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!("alternative {self} does not fit a {what} design")))
            }
        };
        match self {
            AlternativeSpec::Null => Ok(()),
            AlternativeSpec::Location { mu } => {
                check_finite(*mu, "mu")?;
                need(two, "one-sample")
            }
            AlternativeSpec::Scale { sigma } => {
                check_sigma(*sigma)?;
                need(two, "one-sample")
            }
            AlternativeSpec::LocationScale { mu, sigma } => {
                check_finite(*mu, "mu")?;
                check_sigma(*sigma)?;
                need(two, "one-sample")
            }
            AlternativeSpec::Arrivals { law } => {
                law.validate()?;
                need(!two, "two-sample")
            }
            AlternativeSpec::Spiked { minus, plus } => {
                minus.validate()?;
                plus.validate()?;
                need(!two, "two-sample")
            }
            AlternativeSpec::Mixture { components } => {
                if components.is_empty() {
                    return Err(Error::InvalidArgument("mixture needs at least one component".into()));
                }
                components.iter().try_for_each(|c| c.validate(design))
            }
        }
    }

    /// Draws one data set. Call [`AlternativeSpec::validate`] first.
    pub fn draw<R: Rng + ?Sized>(&self, design: &Design, rng: &mut R) -> Sample {
        if let AlternativeSpec::Mixture { components } = self {
            let i = rng.random_range(0..components.len());
            return components[i].draw(design, rng);
        }
        match *design {
            Design::TwoSample { k, n } => {
                let x = (0..k - 1).map(|_| rng.sample(StandardNormal)).collect();
                let (mu, sigma) = match self {
                    AlternativeSpec::Location { mu } => (*mu, 1.0),
                    AlternativeSpec::Scale { sigma } => (0.0, *sigma),
                    AlternativeSpec::LocationScale { mu, sigma } => (*mu, *sigma),
                    _ => (0.0, 1.0),
                };
                let y = (0..n)
                    .map(|_| {
                        let e: f64 = rng.sample(StandardNormal);
                        mu + sigma * e
                    })
                    .collect();
                Sample::TwoSample { x, y }
            }
            Design::OneSample { k } => {
                let times: Vec<f64> = match self {
                    AlternativeSpec::Arrivals { law } => (0..k).map(|_| law.sample(rng)).collect(),
                    AlternativeSpec::Spiked { minus, plus } => {
                        let spike = rng.random_range(0..k);
                        (0..k).map(|i| if i == spike { plus.sample(rng) } else { minus.sample(rng) }).collect()
                    }
                    _ => (0..k).map(|_| ArrivalLaw::Exponential.sample(rng)).collect(),
                };
                let total: f64 = times.iter().sum();
                let mut acc = 0.0;
                let z = times[..k - 1]
                    .iter()
                    .map(|t| {
                        acc += t;
                        (acc / total).min(1.0)
                    })
                    .collect();
                Sample::OneSample { z }
            }
        }
    }
}

impl fmt::Display for AlternativeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlternativeSpec::Null => write!(f, "null"),
            AlternativeSpec::Location { mu } => write!(f, "loc:{mu}"),
            AlternativeSpec::Scale { sigma } => write!(f, "scale:{sigma}"),
            AlternativeSpec::LocationScale { mu, sigma } => write!(f, "locscale:{mu},{sigma}"),
            AlternativeSpec::Arrivals { law } => write!(f, "{law}"),
            AlternativeSpec::Spiked { minus, plus } => write!(f, "spiked:{minus}/{plus}"),
            AlternativeSpec::Mixture { components } => {
                write!(f, "mix:")?;
                for (i, c) in components.iter().enumerate() {
                    if i > 0 {
                        write!(f, "+")?;
                    }
                    write!(f, "{c}")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for AlternativeSpec {
    type Err = Error;

    /// `null`, `loc:mu`, `scale:sigma`, `locscale:mu,sigma`, an arrival law
    /// (`exp`, `erlang:r`, `hyperexp:c2`), `spiked:<law>/<law>` or `mix:a+b+...`.
    fn from_str(s: &str) -> Result<Self> {
        let (family, param) = split_family(s);
        match family.as_str() {
            "null" if param.is_empty() => Ok(AlternativeSpec::Null),
            "loc" | "location" => {
                let mu = parse_f64(param, s)?;
                check_finite(mu, "mu")?;
                Ok(AlternativeSpec::Location { mu })
            }
            "scale" => {
                let sigma = parse_f64(param, s)?;
                check_sigma(sigma)?;
                Ok(AlternativeSpec::Scale { sigma })
            }
            "locscale" => {
                let (a, b) = param.split_once(',').ok_or_else(|| bad_alt(s))?;
                let (mu, sigma) = (parse_f64(a, s)?, parse_f64(b, s)?);
                check_finite(mu, "mu")?;
                check_sigma(sigma)?;
                Ok(AlternativeSpec::LocationScale { mu, sigma })
            }
            "spiked" => {
                let (minus, plus) = param.split_once('/').ok_or_else(|| bad_alt(s))?;
                Ok(AlternativeSpec::Spiked { minus: minus.parse()?, plus: plus.parse()? })
            }
            "mix" => {
                let components = param.split('+').map(str::parse).collect::<Result<Vec<_>>>()?;
                Ok(AlternativeSpec::Mixture { components })
            }
            _ => Ok(AlternativeSpec::Arrivals { law: s.parse().map_err(|_| bad_alt(s))? }),
        }
    }
}

fn split_family(s: &str) -> (String, &str) {
    let s = s.trim();
    let (family, param) = s.split_once(':').unwrap_or((s, ""));
    (family.trim().to_ascii_lowercase(), param)
}

fn parse_f64(text: &str, whole: &str) -> Result<f64> {
    text.trim().parse().map_err(|_| bad_alt(whole))
}

fn bad_alt(s: &str) -> Error {
    Error::InvalidArgument(format!("cannot parse alternative {s:?}"))
}

fn check_finite(v: f64, name: &str) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must be finite")))
    }
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma.is_finite() && sigma > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("sigma must be positive and finite, got {sigma}")))
    }
}
