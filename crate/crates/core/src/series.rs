//! Sampled-series primitives: the [`TimeSeries`] carrier, discrete
//! differentiation, extrema and zero-crossing detection, inflection point
//! extraction and the IMF condition report.

use crate::error::{Error, Result};
use crate::spline::{CubicSpline, EndCondition, Knot};

/// A strictly increasing grid of sample times with one finite value per time.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::InvalidInput(format!(
                "{} times but {} values",
                times.len(),
                values.len()
            )));
        }
        if times.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "a series needs at least 2 samples, got {}",
                times.len()
            )));
        }
        if let Some(index) = times.iter().position(|t| !t.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        if let Some(i) = times.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput(format!(
                "times must be strictly increasing (t[{}] = {} >= t[{}] = {})",
                i,
                times[i],
                i + 1,
                times[i + 1]
            )));
        }
        Ok(Self { times, values })
    }

    /// Series on the implicit grid `0, 1, 2, ...`.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        Self::uniform(0.0, 1.0, values)
    }

    pub fn uniform(start: f64, step: f64, values: Vec<f64>) -> Result<Self> {
        if !(step > 0.0) {
            return Err(Error::InvalidInput(format!("step must be positive, got {step}")));
        }
        let times = (0..values.len()).map(|i| start + step * i as f64).collect();
        Self::new(times, values)
    }

    /// Samples `f` on `start, start + step, ...` up to and including `end`.
    pub fn sample<F: Fn(f64) -> f64>(start: f64, end: f64, step: f64, f: F) -> Result<Self> {
        if !(step > 0.0) {
            return Err(Error::InvalidInput(format!("step must be positive, got {step}")));
        }
        let n = ((end - start) / step + 1e-9).floor() as usize + 1;
        let times: Vec<f64> = (0..n).map(|i| start + step * i as f64).collect();
        let values = times.iter().map(|&t| f(t)).collect();
        Self::new(times, values)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn start(&self) -> f64 {
        self.times[0]
    }

    pub fn end(&self) -> f64 {
        self.times[self.times.len() - 1]
    }

    /// Same grid, new values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.len() {
            return Err(Error::InvalidInput(format!(
                "expected {} values, got {}",
                self.len(),
                values.len()
            )));
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { times: self.times.clone(), values })
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Result<Self> {
        self.with_values(self.values.iter().map(|&v| f(v)).collect())
    }

    /// Pointwise `self - other` on a shared grid.
    pub fn sub(&self, other: &TimeSeries) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Pointwise `self + other` on a shared grid.
    pub fn add(&self, other: &TimeSeries) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    fn zip_with<F: Fn(f64, f64) -> f64>(&self, other: &TimeSeries, f: F) -> Result<Self> {
        if self.times != other.times {
            return Err(Error::InvalidInput("series are on different grids".into()));
        }
        self.with_values(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }

    /// `max - min` of the values.
    pub fn range(&self) -> f64 {
        let (lo, hi) = self.min_max();
        hi - lo
    }
}

/// A `(time, value)` knot on the data function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlPoint {
    pub t: f64,
    pub value: f64,
}

impl ControlPoint {
    pub fn new(t: f64, value: f64) -> Self {
        Self { t, value }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExtremumKind {
    Maximum,
    Minimum,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub index: usize,
    pub time: f64,
    pub value: f64,
    pub kind: ExtremumKind,
}

impl Extremum {
    pub fn control_point(&self) -> ControlPoint {
        ControlPoint::new(self.time, self.value)
    }
}

/// Central differences inside, one-sided differences at both ends.
pub fn differentiate(s: &TimeSeries) -> Result<TimeSeries> {
    let n = s.len();
    if n < 3 {
        return Err(Error::InvalidInput(format!(
            "differentiation needs at least 3 samples, got {n}"
        )));
    }
    let (t, v) = (s.times(), s.values());
    let mut d = Vec::with_capacity(n);
    d.push((v[1] - v[0]) / (t[1] - t[0]));
    for i in 1..n - 1 {
        d.push((v[i + 1] - v[i - 1]) / (t[i + 1] - t[i - 1]));
    }
    d.push((v[n - 1] - v[n - 2]) / (t[n - 1] - t[n - 2]));
    s.with_values(d)
}

/// Neighbours closer than this fraction of the series range are treated as
/// equal, so that round-off cannot decide where a plateau's extremum sits.
pub const PLATEAU_FRACTION: f64 = 1e-12;

/// Interior local extrema in index order.
///
/// A run of equal samples counts as a single sample placed at the middle of
/// the run (lower middle for even lengths). Samples within
/// [`PLATEAU_FRACTION`] of the range of the run's first sample are equal. Runs touching either end of the
/// series are never extrema. Because equal neighbours are merged first, the
/// output alternates between maxima and minima.
pub fn find_extrema(s: &TimeSeries) -> Vec<Extremum> {
    let v = s.values();
    let t = s.times();

    let eps = PLATEAU_FRACTION * s.range();
    // (first index, last index) of each run of equal values
    let mut runs: Vec<(usize, usize)> = Vec::new();
    let mut start = 0;
    for i in 1..=v.len() {
        if i == v.len() || (v[i] - v[start]).abs() > eps {
            runs.push((start, i - 1));
            start = i;
        }
    }

    let mut out = Vec::new();
    for w in runs.windows(3) {
        let (prev, cur, next) = (v[w[0].0], v[w[1].0], v[w[2].0]);
        let kind = if cur > prev && cur > next {
            ExtremumKind::Maximum
        } else if cur < prev && cur < next {
            ExtremumKind::Minimum
        } else {
            continue;
        };
        let index = w[1].0 + (w[1].1 - w[1].0) / 2;
        out.push(Extremum { index, time: t[index], value: v[index], kind });
    }
    out
}

/// Sign changes between successive non-zero samples. A run of exact zeros
/// counts once when the samples around it have opposite signs, and not at all
/// otherwise.
pub fn count_zero_crossings(s: &TimeSeries) -> usize {
    let mut last_positive: Option<bool> = None;
    let mut count = 0;
    for &v in s.values() {
        if v == 0.0 {
            continue;
        }
        let positive = v > 0.0;
        if last_positive.is_some_and(|p| p != positive) {
            count += 1;
        }
        last_positive = Some(positive);
    }
    count
}

/// Points on the data function at the times where its first derivative has
/// an extremum.
pub fn inflection_control_points(s: &TimeSeries) -> Vec<ControlPoint> {
    let Ok(derivative) = differentiate(s) else {
        return Vec::new();
    };
    find_extrema(&derivative)
        .iter()
        .map(|e| ControlPoint::new(e.time, s.values()[e.index]))
        .collect()
}

/// Counts backing the first IMF condition plus an envelope-mean diagnostic.
#[derive(Debug, Clone, PartialEq)]
pub struct ImfReport {
    pub zero_crossings: usize,
    pub extrema_count: usize,
    pub condition1_ok: bool,
    /// Largest `|upper + lower| / 2` of natural-spline envelopes over the span
    /// both envelopes cover. `None` when either kind has fewer than 2 extrema.
    pub max_abs_envelope_mean: Option<f64>,
}

pub fn imf_report(imf: &TimeSeries) -> ImfReport {
    let extrema = find_extrema(imf);
    let zero_crossings = count_zero_crossings(imf);
    let extrema_count = extrema.len();
    ImfReport {
        zero_crossings,
        extrema_count,
        condition1_ok: zero_crossings.abs_diff(extrema_count) <= 1,
        max_abs_envelope_mean: envelope_mean(imf, &extrema),
    }
}

fn envelope_mean(imf: &TimeSeries, extrema: &[Extremum]) -> Option<f64> {
    let envelope = |kind: ExtremumKind| -> Option<CubicSpline> {
        let knots: Vec<Knot> = extrema
            .iter()
            .filter(|e| e.kind == kind)
            .map(|e| Knot::new(e.time, e.value))
            .collect();
        if knots.len() < 2 {
            return None;
        }
        CubicSpline::new(&knots, EndCondition::Natural).ok()
    };
    let upper = envelope(ExtremumKind::Maximum)?;
    let lower = envelope(ExtremumKind::Minimum)?;
    let lo = upper.domain().0.max(lower.domain().0);
    let hi = upper.domain().1.min(lower.domain().1);
    imf.times()
        .iter()
        .filter(|&&t| t >= lo && t <= hi)
        .map(|&t| {
            let u = upper.evaluate(t).ok()?;
            let l = lower.evaluate(t).ok()?;
            Some(((u + l) / 2.0).abs())
        })
        .try_fold(None, |acc: Option<f64>, m| m.map(|m| Some(acc.map_or(m, |a| a.max(m)))))
        .flatten()
}
