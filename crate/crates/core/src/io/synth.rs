//! Deterministic synthetic test signals.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::series::TimeSeries;

#[derive(Debug, Clone, PartialEq)]
pub enum Synth {
    /// `70 cos(pi t / 150) + 30 cos(pi t / 15)` on `0..=span`.
    TwoCosine { span: f64, step: f64 },
    /// `amplitude * cos(2 pi t / period)` on `0..=span`.
    Sinusoid { amplitude: f64, period: f64, span: f64, step: f64 },
    /// Cumulative sum of standard normal increments.
    RandomWalk { seed: u64, span: f64, step: f64 },
    /// Slow sinusoid with a small fast ripple riding its edges.
    RidingWave { span: f64, step: f64 },
}

impl Synth {
    pub fn two_cosine() -> Self {
        Self::TwoCosine { span: 900.0, step: 1.0 }
    }

    pub fn random_walk(seed: u64) -> Self {
        Self::RandomWalk { seed, span: 1999.0, step: 1.0 }
    }

    pub fn riding_wave() -> Self {
        Self::RidingWave { span: 800.0, step: 1.0 }
    }

    pub fn generate(&self) -> Result<TimeSeries> {
        match *self {
            Self::TwoCosine { span, step } => {
                check(step, span)?;
                TimeSeries::sample(0.0, span, step, two_cosine)
            }
            Self::Sinusoid { amplitude, period, span, step } => {
                check(step, span)?;
                if !(period > 0.0) {
                    return Err(Error::InvalidInput(format!("period must be positive, got {period}")));
                }
                TimeSeries::sample(0.0, span, step, |t| amplitude * (2.0 * PI * t / period).cos())
            }
            Self::RandomWalk { seed, span, step } => {
                check(step, span)?;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let n = ((span / step) + 1e-9).floor() as usize + 1;
                let mut level = 0.0;
                let values = (0..n)
                    .map(|_| {
                        let v = level;
                        let z: f64 = StandardNormal.sample(&mut rng);
                        level += z;
                        v
                    })
                    .collect();
                TimeSeries::uniform(0.0, step, values)
            }
            Self::RidingWave { span, step } => {
                check(step, span)?;
                TimeSeries::sample(0.0, span, step, riding_wave)
            }
        }
    }
}

pub fn two_cosine(t: f64) -> f64 {
    70.0 * (PI * t / 150.0).cos() + 30.0 * (PI * t / 15.0).cos()
}

/// Period of the slow wave in [`riding_wave`].
pub const RIDING_WAVE_PERIOD: f64 = 400.0;
/// Period of the ripple in [`riding_wave`].
pub const RIPPLE_PERIOD: f64 = 12.0;
pub const RIDING_WAVE_AMPLITUDE: f64 = 50.0;
pub const RIPPLE_AMPLITUDE: f64 = 0.3;

/// The ripple's largest slope is a fifth of the slow wave's, so over most of
/// each edge the sum is monotone and the ripple leaves no extrema in the data.
pub fn riding_wave(t: f64) -> f64 {
    RIDING_WAVE_AMPLITUDE * (2.0 * PI * t / RIDING_WAVE_PERIOD).sin()
        + RIPPLE_AMPLITUDE * (2.0 * PI * t / RIPPLE_PERIOD).sin()
}

fn check(step: f64, span: f64) -> Result<()> {
    if !(step > 0.0) {
        return Err(Error::InvalidInput(format!("step must be positive, got {step}")));
    }
    if !(span >= step) {
        return Err(Error::InvalidInput(format!("span {span} is shorter than one step {step}")));
    }
    Ok(())
}

/// Parses `kind[:key=value,...]`, e.g. `sinusoid:amplitude=3,period=40`.
impl FromStr for Synth {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut params = BTreeMap::new();
        for pair in rest.split(',').filter(|p| !p.is_empty()) {
            let (key, value) = pair
                .split_once('=')
                .ok_or_else(|| Error::InvalidInput(format!("expected key=value, got `{pair}`")))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| Error::InvalidInput(format!("`{key}` is not a number: `{value}`")))?;
            params.insert(key.trim().to_string(), value);
        }
        let mut take = |key: &str, default: f64| params.remove(key).unwrap_or(default);
        let synth = match kind.trim() {
            "two_cosine" => Self::TwoCosine { span: take("span", 900.0), step: take("step", 1.0) },
            "sinusoid" => Self::Sinusoid {
                amplitude: take("amplitude", 30.0),
                period: take("period", 30.0),
                span: take("span", 900.0),
                step: take("step", 1.0),
            },
            "random_walk" => {
                let seed = take("seed", 0.0);
                if seed < 0.0 || seed.fract() != 0.0 {
                    return Err(Error::InvalidInput(format!("seed must be a non-negative integer, got {seed}")));
                }
                Self::RandomWalk { seed: seed as u64, span: take("span", 1999.0), step: take("step", 1.0) }
            }
            "riding_wave" => Self::RidingWave { span: take("span", 800.0), step: take("step", 1.0) },
            other => return Err(Error::InvalidInput(format!("unknown synthetic signal `{other}`"))),
        };
        if let Some(key) = params.keys().next() {
            return Err(Error::InvalidInput(format!("unknown parameter `{key}` for `{}`", kind.trim())));
        }
        Ok(synth)
    }
}

impl fmt::Display for Synth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::TwoCosine { span, step } => write!(f, "two_cosine:span={span},step={step}"),
            Self::Sinusoid { amplitude, period, span, step } => write!(
                f,
                "sinusoid:amplitude={amplitude},period={period},span={span},step={step}"
            ),
            Self::RandomWalk { seed, span, step } => {
                write!(f, "random_walk:seed={seed},span={span},step={step}")
            }
            Self::RidingWave { span, step } => write!(f, "riding_wave:span={span},step={step}"),
        }
    }
}
