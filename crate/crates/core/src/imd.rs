//! Fast intrinsic mode decomposition.
//!
//! One mode is separated by repeatedly re-estimating the residue (the local
//! mean) of the data:
//!
//! 1. the initial residue is the polyline through the data at the extrema of
//!    its first derivative (or zero, for data-function initialization);
//! 2. the extrema of the current IMF `data - residue` select control points
//!    on the data function;
//! 3. each control point is replaced by its median point, computed from the
//!    turning directions of the control polyline;
//! 4. a natural cubic spline through the medians is the improved residue.
//!
//! Steps 2–4 repeat until the residue stops moving. The residue then becomes
//! the input for the next mode.

use crate::error::{Error, Result};
use crate::extension::{extend_with, ExtensionKind, FormulaVariant};
use crate::series::{
    differentiate, find_extrema, inflection_control_points, ControlPoint, TimeSeries,
};
use crate::spline::{CubicSpline, Knot};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Initialization {
    /// Polyline through the inflection points of the data.
    #[default]
    Derivative,
    /// Zero residue: the first IMF estimate is the data itself.
    DataFunction,
}

/// Boundary extension applied to the control points of each refinement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Boundary {
    #[default]
    Even,
    Odd,
    Cyclic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tolerance {
    /// Fraction of the `max - min` range of the series being processed.
    Relative(f64),
    Absolute(f64),
}

impl Tolerance {
    pub fn resolve(self, range: f64) -> f64 {
        match self {
            Self::Relative(f) => f * range,
            Self::Absolute(a) => a,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefinementConfig {
    pub max_iterations: usize,
    /// Stop once the largest pointwise residue change drops below this.
    pub delta_tolerance: Tolerance,
    /// Stop (keeping the previous iterate) when the change fails to shrink.
    pub stop_on_nondecreasing_delta: bool,
    pub boundary: Boundary,
    pub formulas: FormulaVariant,
    pub initialization: Initialization,
}

impl Default for RefinementConfig {
    fn default() -> Self {
        Self {
            max_iterations: 12,
            delta_tolerance: Tolerance::Relative(1e-3),
            stop_on_nondecreasing_delta: true,
            boundary: Boundary::Even,
            formulas: FormulaVariant::Strict,
            initialization: Initialization::Derivative,
        }
    }
}

impl RefinementConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::InvalidInput("max_iterations must be at least 1".into()));
        }
        let tol = match self.delta_tolerance {
            Tolerance::Relative(v) | Tolerance::Absolute(v) => v,
        };
        if !(tol >= 0.0) {
            return Err(Error::InvalidInput(format!("delta tolerance must be >= 0, got {tol}")));
        }
        Ok(())
    }
}

/// Why refinement of one mode ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Converged,
    DeltaStoppedDecreasing,
    MaxIterations,
    /// The IMF had fewer than 3 extrema, so no further refinement is possible.
    TooFewExtrema,
}

#[derive(Debug, Clone)]
pub struct ModeComponent {
    pub imf: TimeSeries,
    pub residue: TimeSeries,
    /// Accepted refinement passes.
    pub iterations: usize,
    /// Largest residue change of the last accepted pass.
    pub final_delta: f64,
    /// Grid time where that change occurred.
    pub delta_time: f64,
    pub extrema_count: usize,
    pub value_range: (f64, f64),
    /// Residue change of every pass that ran, including a rejected final one.
    pub delta_history: Vec<f64>,
    pub stop_reason: StopReason,
}

#[derive(Debug, Clone)]
pub struct DecompositionResult {
    /// Highest frequency first.
    pub modes: Vec<ModeComponent>,
    pub final_residue: TimeSeries,
}

impl DecompositionResult {
    /// Sum of all IMFs and the final residue.
    pub fn reconstruct(&self) -> TimeSeries {
        self.modes
            .iter()
            .try_fold(self.final_residue.clone(), |acc, m| acc.add(&m.imf))
            .expect("modes share the input grid")
    }
}

/// Scalar cross products `(P[i] - P[i-1]) x (P[i+1] - P[i])` for every
/// interior point.
pub fn turning_directions(points: &[ControlPoint]) -> Result<Vec<f64>> {
    if points.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "turning directions need at least 3 points, got {}",
            points.len()
        )));
    }
    Ok(points
        .windows(3)
        .map(|w| {
            let (dx1, dy1) = (w[1].t - w[0].t, w[1].value - w[0].value);
            let (dx2, dy2) = (w[2].t - w[1].t, w[2].value - w[1].value);
            dx1 * dy2 - dy1 * dx2
        })
        .collect())
}

/// Median points for `points[2..len-2]`.
///
/// Where the turning direction flips on either side of a point, its median
/// is halfway between the point and the chord joining its neighbours.
/// Otherwise the point is its own median.
pub fn median_points(points: &[ControlPoint]) -> Result<Vec<ControlPoint>> {
    if points.len() < 5 {
        return Err(Error::InvalidInput(format!(
            "median points need at least 5 control points, got {}",
            points.len()
        )));
    }
    // alpha[j] belongs to points[j + 1]
    let alpha = turning_directions(points)?;
    Ok((2..points.len() - 2)
        .map(|i| {
            let (before, here, after) = (alpha[i - 2], alpha[i - 1], alpha[i]);
            let p = points[i];
            if before * here < 0.0 || here * after < 0.0 {
                ControlPoint::new(p.t, chord_midpoint(points[i - 1], p, points[i + 1]))
            } else {
                p
            }
        })
        .collect())
}

/// `(E[i] + chord(t[i])) / 2`, the chord running from `prev` to `next`.
pub(crate) fn chord_midpoint(prev: ControlPoint, p: ControlPoint, next: ControlPoint) -> f64 {
    let chord = prev.value + (next.value - prev.value) * (p.t - prev.t) / (next.t - prev.t);
    0.5 * (p.value + chord)
}

/// Starting residue of one mode, or `None` when derivative initialization
/// finds no inflection point.
pub fn initial_residue(data: &TimeSeries, init: Initialization) -> Result<Option<TimeSeries>> {
    match init {
        Initialization::DataFunction => data.with_values(vec![0.0; data.len()]).map(Some),
        Initialization::Derivative => {
            let points = inflection_control_points(data);
            if points.is_empty() {
                return Ok(None);
            }
            data.with_values(polyline(&points, data.times())).map(Some)
        }
    }
}

/// Piecewise-linear interpolation through `points`, held constant beyond the
/// first and last point.
fn polyline(points: &[ControlPoint], times: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(times.len());
    let mut seg = 0;
    let last = points[points.len() - 1];
    for &t in times {
        if t <= points[0].t {
            out.push(points[0].value);
        } else if t >= last.t {
            out.push(last.value);
        } else {
            while points[seg + 1].t < t {
                seg += 1;
            }
            let (a, b) = (points[seg], points[seg + 1]);
            if t == b.t {
                out.push(b.value);
            } else {
                out.push(a.value + (b.value - a.value) * (t - a.t) / (b.t - a.t));
            }
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct Refinement {
    pub residue: TimeSeries,
    pub imf: TimeSeries,
    /// Extrema of the IMF the control points were taken from.
    pub extrema_count: usize,
}

/// One pass of residue improvement, or `None` when `current_imf` has fewer
/// than 3 extrema.
pub fn refine_once(
    data: &TimeSeries,
    current_imf: &TimeSeries,
    cfg: &RefinementConfig,
) -> Result<Option<Refinement>> {
    let extrema = find_extrema(current_imf);
    if extrema.len() < 3 {
        return Ok(None);
    }
    let values = data.values();
    let start = ControlPoint::new(data.start(), values[0]);
    let end = ControlPoint::new(data.end(), values[values.len() - 1]);

    let mut controls = Vec::with_capacity(extrema.len() + 2);
    let kind = match cfg.boundary {
        // the boundary samples act as the first and last control points
        Boundary::Even | Boundary::Cyclic => {
            controls.push(start);
            controls.extend(extrema.iter().map(|e| ControlPoint::new(e.time, values[e.index])));
            controls.push(end);
            if cfg.boundary == Boundary::Even {
                ExtensionKind::Even
            } else {
                ExtensionKind::Cyclic
            }
        }
        Boundary::Odd => {
            controls.extend(extrema.iter().map(|e| ControlPoint::new(e.time, values[e.index])));
            ExtensionKind::Odd { start, end }
        }
    };

    let extended = extend_with(&controls, kind, cfg.formulas)?;
    let medians = median_points(&extended)?;

    let mut knots: Vec<Knot> = Vec::with_capacity(medians.len() + 2);
    if cfg.boundary == Boundary::Odd {
        // the centre of a point reflection is its own median
        knots.push(start.into());
        knots.extend(medians.iter().map(|&p| Knot::from(p)));
        knots.push(end.into());
    } else {
        knots.extend(medians.iter().map(|&p| Knot::from(p)));
    }
    let spline = CubicSpline::natural(&knots)?;
    let residue = data.with_values(spline.evaluate_on_grid(data.times())?)?;
    let imf = data.sub(&residue)?;
    Ok(Some(Refinement { residue, imf, extrema_count: extrema.len() }))
}

/// Separates the highest-frequency mode of `data`, or returns `None` when
/// the first derivative or the initial IMF has fewer than 3 extrema.
pub fn extract_mode(data: &TimeSeries, cfg: &RefinementConfig) -> Result<Option<ModeComponent>> {
    cfg.validate()?;
    if data.len() < 3 || find_extrema(&differentiate(data)?).len() < 3 {
        return Ok(None);
    }
    let Some(mut residue) = initial_residue(data, cfg.initialization)? else {
        return Ok(None);
    };
    let mut imf = data.sub(&residue)?;
    let tolerance = cfg.delta_tolerance.resolve(data.range());

    if find_extrema(&imf).len() < 3 {
        // nothing to refine: the remaining oscillation is below one cycle
        return Ok(None);
    }

    let mut iterations = 0;
    let mut final_delta = 0.0;
    let mut delta_time = data.start();
    let mut history = Vec::new();
    let mut stop_reason = StopReason::MaxIterations;

    for _ in 0..cfg.max_iterations {
        let Some(next) = refine_once(data, &imf, cfg)? else {
            stop_reason = StopReason::TooFewExtrema;
            break;
        };
        let (at, delta) = max_abs_difference(next.residue.values(), residue.values());
        history.push(delta);
        // a change equal to the last one up to round-off is a 2-cycle, not progress
        if cfg.stop_on_nondecreasing_delta
            && iterations > 0
            && delta >= final_delta * (1.0 - DELTA_TIE_FRACTION)
        {
            stop_reason = StopReason::DeltaStoppedDecreasing;
            break;
        }
        residue = next.residue;
        imf = next.imf;
        iterations += 1;
        final_delta = delta;
        delta_time = data.times()[at];
        if delta < tolerance {
            stop_reason = StopReason::Converged;
            break;
        }
    }

    let extrema_count = find_extrema(&imf).len();
    let value_range = imf.min_max();
    Ok(Some(ModeComponent {
        imf,
        residue,
        iterations,
        final_delta,
        delta_time,
        extrema_count,
        value_range,
        delta_history: history,
        stop_reason,
    }))
}

/// Relative band within which successive residue changes count as equal.
const DELTA_TIE_FRACTION: f64 = 1e-9;

/// Residues whose range falls to this fraction of the input range are
/// round-off, not signal.
const FLAT_RESIDUE_FRACTION: f64 = 1e-9;

/// Extracts modes from the running residue until none is left, the residue
/// is numerically flat, or `max_modes` have been taken.
pub fn decompose(
    data: &TimeSeries,
    cfg: &RefinementConfig,
    max_modes: usize,
) -> Result<DecompositionResult> {
    if max_modes == 0 {
        return Err(Error::InvalidInput("max_modes must be at least 1".into()));
    }
    let mut modes = Vec::new();
    let mut residue = data.clone();
    let floor = FLAT_RESIDUE_FRACTION * data.range();
    while modes.len() < max_modes {
        if residue.range() <= floor {
            break;
        }
        match extract_mode(&residue, cfg)? {
            Some(mode) => {
                residue = mode.residue.clone();
                modes.push(mode);
            }
            None => break,
        }
    }
    Ok(DecompositionResult { modes, final_residue: residue })
}

/// `(index, value)` of the largest `|a[i] - b[i]|`.
fn max_abs_difference(a: &[f64], b: &[f64]) -> (usize, f64) {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .enumerate()
        .fold((0, 0.0), |best, (i, d)| if d > best.1 { (i, d) } else { best })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn cp(t: f64, v: f64) -> ControlPoint {
        ControlPoint::new(t, v)
    }

    fn sinusoid(amplitude: f64, period: f64, end: f64) -> TimeSeries {
        TimeSeries::sample(0.0, end, 1.0, |t| amplitude * (2.0 * PI * t / period).cos()).unwrap()
    }

    fn interior(s: &TimeSeries, frac: f64) -> std::ops::Range<usize> {
        let cut = (s.len() as f64 * frac) as usize;
        cut..s.len() - cut
    }

    #[test]
    fn turning_direction_examples() {
        assert_eq!(turning_directions(&[cp(0., 0.), cp(1., 1.), cp(2., 2.)]).unwrap(), vec![0.0]);
        assert_eq!(turning_directions(&[cp(0., 0.), cp(1., 1.), cp(2., 0.)]).unwrap(), vec![-2.0]);
        assert_eq!(
            turning_directions(&[cp(0., 0.), cp(1., 1.), cp(2., 0.), cp(3., 1.)]).unwrap(),
            vec![-2.0, 2.0]
        );
        assert!(turning_directions(&[cp(0., 0.), cp(1., 1.)]).is_err());
    }

    #[test]
    fn median_of_a_peak() {
        let padded = [cp(-2., 2.), cp(-1., 0.), cp(0., 0.), cp(1., 2.), cp(2., 0.), cp(3., 0.), cp(4., 2.)];
        let medians = median_points(&padded).unwrap();
        assert_eq!(medians.len(), 3);
        assert_eq!(medians[1], cp(1.0, 1.0));
    }

    #[test]
    fn convex_arc_medians_are_the_controls() {
        let arc: Vec<ControlPoint> = (0..8).map(|i| cp(i as f64, (i as f64).powi(2))).collect();
        let medians = median_points(&arc).unwrap();
        assert_eq!(medians, arc[2..6].to_vec());
    }

    #[test]
    fn median_needs_five_points() {
        assert!(median_points(&[cp(0., 0.), cp(1., 1.), cp(2., 0.), cp(3., 1.)]).is_err());
    }

    /// Direct per-point transcription of the two median formulas.
    fn brute_force_median(points: &[ControlPoint], i: usize) -> f64 {
        let cross = |j: usize| {
            let (a, b, c) = (points[j - 1], points[j], points[j + 1]);
            (b.t - a.t) * (c.value - b.value) - (b.value - a.value) * (c.t - b.t)
        };
        if cross(i - 1) * cross(i) < 0.0 || cross(i) * cross(i + 1) < 0.0 {
            let (e0, e1, e2) = (points[i - 1].value, points[i].value, points[i + 1].value);
            let (t0, t1, t2) = (points[i - 1].t, points[i].t, points[i + 1].t);
            0.5 * (e1 + e0 + (e2 - e0) * (t1 - t0) / (t2 - t0))
        } else {
            points[i].value
        }
    }

    #[test]
    fn medians_match_brute_force_on_random_zigzags() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let mut t = 0.0;
            let points: Vec<ControlPoint> = (0..50)
                .map(|i| {
                    t += rng.random_range(0.5..3.0);
                    let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                    cp(t, sign * rng.random_range(0.1..10.0) + rng.random_range(-3.0..3.0))
                })
                .collect();
            let medians = median_points(&points).unwrap();
            for (k, m) in medians.iter().enumerate() {
                let expected = brute_force_median(&points, k + 2);
                assert!((m.value - expected).abs() <= 1e-12 * (1.0 + expected.abs()));
                assert_eq!(m.t, points[k + 2].t);
            }
        }
    }

    #[test]
    fn data_function_initialization_is_zero() {
        let s = sinusoid(3.0, 20.0, 100.0);
        let r = initial_residue(&s, Initialization::DataFunction).unwrap().unwrap();
        assert!(r.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn derivative_initialization_of_sine_is_near_zero() {
        let s = TimeSeries::sample(0.0, 20.0, 0.01, f64::sin).unwrap();
        let r = initial_residue(&s, Initialization::Derivative).unwrap().unwrap();
        let points = inflection_control_points(&s);
        let (lo, hi) = (points[0].t, points[points.len() - 1].t);
        for (t, v) in s.times().iter().zip(r.values()) {
            if *t >= lo && *t <= hi {
                assert!(v.abs() < 0.05, "{t}: {v}");
            }
        }
    }

    #[test]
    fn derivative_initialization_passes_through_inflections() {
        let s = TimeSeries::sample(0.0, 900.0, 1.0, |t| {
            70.0 * (PI * t / 150.0).cos() + 30.0 * (PI * t / 15.0).cos()
        })
        .unwrap();
        let r = initial_residue(&s, Initialization::Derivative).unwrap().unwrap();
        for p in inflection_control_points(&s) {
            let i = p.t as usize;
            assert_eq!(r.values()[i], s.values()[i]);
        }
    }

    #[test]
    fn line_has_no_initial_residue() {
        let s = TimeSeries::sample(0.0, 10.0, 1.0, |t| 2.0 * t).unwrap();
        assert!(initial_residue(&s, Initialization::Derivative).unwrap().is_none());
    }

    #[test]
    fn refining_a_pure_sinusoid_gives_near_zero_residue() {
        let s = sinusoid(10.0, 40.0, 400.0);
        let r = refine_once(&s, &s, &RefinementConfig::default()).unwrap().unwrap();
        for i in interior(&s, 0.1) {
            assert!(r.residue.values()[i].abs() < 0.5);
            assert_eq!(r.imf.values()[i] + r.residue.values()[i], s.values()[i]);
        }
    }

    #[test]
    fn refinement_is_shift_equivariant() {
        let s = sinusoid(10.0, 40.0, 400.0);
        let c = 17.25;
        let shifted = s.map(|v| v + c).unwrap();
        let cfg = RefinementConfig::default();
        let a = refine_once(&s, &s, &cfg).unwrap().unwrap();
        let b = refine_once(&shifted, &s, &cfg).unwrap().unwrap();
        for i in interior(&s, 0.1) {
            assert!((b.residue.values()[i] - a.residue.values()[i] - c).abs() < 1e-9);
        }
    }

    #[test]
    fn refinement_needs_three_extrema() {
        let s = TimeSeries::from_values(vec![0.0, 1.0, 0.0, 1.0, 1.5]).unwrap();
        assert!(refine_once(&s, &s, &RefinementConfig::default()).unwrap().is_none());
    }

    #[test]
    fn ramp_has_no_mode() {
        let s = TimeSeries::sample(0.0, 100.0, 1.0, |t| 0.5 * t + 3.0).unwrap();
        assert!(extract_mode(&s, &RefinementConfig::default()).unwrap().is_none());
        let d = decompose(&s, &RefinementConfig::default(), 16).unwrap();
        assert!(d.modes.is_empty());
        assert_eq!(d.final_residue, s);
    }

    #[test]
    fn single_sinusoid_gives_one_mode() {
        let s = sinusoid(5.0, 50.0, 500.0);
        let d = decompose(&s, &RefinementConfig::default(), 16).unwrap();
        assert_eq!(d.modes.len(), 1, "{:?}", d.modes.iter().map(|m| m.extrema_count).collect::<Vec<_>>());
        for i in interior(&s, 0.1) {
            assert!((d.modes[0].imf.values()[i] - s.values()[i]).abs() < 0.25);
            assert!(d.final_residue.values()[i].abs() < 0.25);
        }
    }

    #[test]
    fn rejects_bad_config() {
        let s = sinusoid(5.0, 50.0, 500.0);
        let cfg = RefinementConfig { max_iterations: 0, ..Default::default() };
        assert!(extract_mode(&s, &cfg).is_err());
        let cfg = RefinementConfig { delta_tolerance: Tolerance::Absolute(-1.0), ..Default::default() };
        assert!(extract_mode(&s, &cfg).is_err());
        assert!(decompose(&s, &RefinementConfig::default(), 0).is_err());
    }

    #[test]
    fn odd_and_cyclic_boundaries_run() {
        let s = sinusoid(5.0, 50.0, 500.0);
        for boundary in [Boundary::Odd, Boundary::Cyclic] {
            for formulas in [FormulaVariant::Strict, FormulaVariant::Consistent] {
                let cfg = RefinementConfig { boundary, formulas, ..Default::default() };
                let d = decompose(&s, &cfg, 16).unwrap();
                assert!(!d.modes.is_empty());
                let back = d.reconstruct();
                for (a, b) in back.values().iter().zip(s.values()) {
                    assert!((a - b).abs() < 1e-9 * 10.0);
                }
            }
        }
    }

    #[test]
    fn cyclic_rejects_unequal_ends() {
        let s = TimeSeries::sample(0.0, 130.0, 1.0, |t| 5.0 * (2.0 * PI * t / 50.0).cos()).unwrap();
        let cfg = RefinementConfig { boundary: Boundary::Cyclic, ..Default::default() };
        assert!(matches!(extract_mode(&s, &cfg), Err(Error::Extension(_))));
    }
}
