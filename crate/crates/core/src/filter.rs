//! Filtering in the IMF domain.
//!
//! Each pass separates the first IMF of the current signal, marks the IMF
//! extrema whose edge jump time falls in a blocked range (or whose amplitude
//! is below a floor), and replaces every run of marked extrema with a
//! zero-slope clamped spline through their median points. The passed IMF
//! plus the residue is the filtered signal for the next pass.

use crate::error::{Error, Result};
use crate::imd::{chord_midpoint, extract_mode, Initialization, RefinementConfig, Tolerance};
use crate::series::{find_extrema, ControlPoint, Extremum, TimeSeries};
use crate::spline::{CubicSpline, Knot};

/// Half-open range `[lo, hi)` of edge durations to block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpBlock {
    pub lo: f64,
    pub hi: f64,
}

impl JumpBlock {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) {
            return Err(Error::InvalidInput(format!("jump block needs lo < hi, got [{lo}, {hi})")));
        }
        Ok(Self { lo, hi })
    }

    /// Blocks everything shorter than `limit`.
    pub fn low_pass(limit: f64) -> Result<Self> {
        Self::new(0.0, limit)
    }

    pub fn contains(&self, duration: f64) -> bool {
        duration >= self.lo && duration < self.hi
    }
}

/// How the duration of an IMF edge is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EdgeReading {
    /// From the neighbouring extremum (one full monotone rise or fall).
    #[default]
    AdjacentExtrema,
    /// From the nearest zero crossing on that side.
    ZeroCrossing,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterCriteria {
    pub jump_time_blocks: Vec<JumpBlock>,
    /// Extrema with `0 < |value| < amplitude_floor` are blocked.
    pub amplitude_floor: f64,
    pub max_passes: usize,
    /// Stop once the filtered signal moves less than this between passes.
    pub settle_tolerance: Tolerance,
    pub edge_reading: EdgeReading,
}

impl Default for FilterCriteria {
    fn default() -> Self {
        Self {
            jump_time_blocks: Vec::new(),
            amplitude_floor: 0.0,
            max_passes: 8,
            settle_tolerance: Tolerance::Relative(1e-3),
            edge_reading: EdgeReading::AdjacentExtrema,
        }
    }
}

impl FilterCriteria {
    pub fn low_pass(limit: f64) -> Result<Self> {
        Ok(Self { jump_time_blocks: vec![JumpBlock::low_pass(limit)?], ..Self::default() })
    }

    fn validate(&self) -> Result<()> {
        if !(self.amplitude_floor >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "amplitude floor must be >= 0, got {}",
                self.amplitude_floor
            )));
        }
        if self.max_passes == 0 {
            return Err(Error::InvalidInput("max_passes must be at least 1".into()));
        }
        Ok(())
    }

    fn blocks(&self, edges: EdgeTimes, value: f64) -> bool {
        let in_block = |d: f64| self.jump_time_blocks.iter().any(|b| b.contains(d));
        in_block(edges.front)
            || in_block(edges.back)
            || (value != 0.0 && value.abs() < self.amplitude_floor)
    }
}

/// Durations of the rising/falling edges on either side of one extremum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeTimes {
    pub front: f64,
    pub back: f64,
}

/// Edge durations for every extremum of `imf`. The outer edges of the first
/// and last extremum run to the ends of the series.
pub fn edge_jump_times(imf: &TimeSeries) -> Vec<(Extremum, EdgeTimes)> {
    edge_times_with(imf, &find_extrema(imf), EdgeReading::AdjacentExtrema)
}

fn edge_times_with(
    imf: &TimeSeries,
    extrema: &[Extremum],
    reading: EdgeReading,
) -> Vec<(Extremum, EdgeTimes)> {
    let (start, end) = (imf.start(), imf.end());
    match reading {
        EdgeReading::AdjacentExtrema => extrema
            .iter()
            .enumerate()
            .map(|(k, e)| {
                let prev = if k == 0 { start } else { extrema[k - 1].time };
                let next = extrema.get(k + 1).map_or(end, |n| n.time);
                (*e, EdgeTimes { front: e.time - prev, back: next - e.time })
            })
            .collect(),
        EdgeReading::ZeroCrossing => {
            let crossings = zero_crossing_times(imf);
            extrema
                .iter()
                .map(|e| {
                    let after = crossings.partition_point(|&c| c <= e.time);
                    let prev = if after == 0 { start } else { crossings[after - 1] };
                    let next = crossings.get(after).copied().unwrap_or(end);
                    (*e, EdgeTimes { front: e.time - prev, back: next - e.time })
                })
                .collect()
        }
    }
}

/// Linearly interpolated times where the series changes sign.
fn zero_crossing_times(s: &TimeSeries) -> Vec<f64> {
    let (t, v) = (s.times(), s.values());
    let mut out = Vec::new();
    let mut last: Option<usize> = None;
    for i in 0..v.len() {
        if v[i] == 0.0 {
            continue;
        }
        if let Some(j) = last {
            if (v[j] > 0.0) != (v[i] > 0.0) {
                out.push(t[j] + (t[i] - t[j]) * v[j] / (v[j] - v[i]));
            }
        }
        last = Some(i);
    }
    out
}

/// End point of a marked run: either an unmarked extremum, or a synthetic
/// point at the series boundary when the run reaches it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Anchor {
    pub point: ControlPoint,
    pub synthetic: bool,
}

/// A maximal run of contiguous marked extrema.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkedList {
    pub extrema: Vec<Extremum>,
    pub anchor_before: Anchor,
    pub anchor_after: Anchor,
    /// IMF values adjacent to the run, used as chord ends for the medians.
    /// They equal the anchors except at the series boundary, where they are
    /// the raw boundary samples.
    neighbour_before: ControlPoint,
    neighbour_after: ControlPoint,
}

impl MarkedList {
    pub fn len(&self) -> usize {
        self.extrema.len()
    }

    pub fn is_empty(&self) -> bool {
        self.extrema.is_empty()
    }

    /// `[anchor_before.t, anchor_after.t]`
    pub fn span(&self) -> (f64, f64) {
        (self.anchor_before.point.t, self.anchor_after.point.t)
    }
}

/// Marks blocked extrema and groups contiguous marks into [`MarkedList`]s.
pub fn mark_extrema(imf: &TimeSeries, criteria: &FilterCriteria) -> Vec<MarkedList> {
    let extrema = find_extrema(imf);
    let edges = edge_times_with(imf, &extrema, criteria.edge_reading);
    let marked: Vec<bool> = edges.iter().map(|(e, d)| criteria.blocks(*d, e.value)).collect();

    let values = imf.values();
    let start = ControlPoint::new(imf.start(), values[0]);
    let end = ControlPoint::new(imf.end(), values[values.len() - 1]);

    let mut lists = Vec::new();
    let mut k = 0;
    while k < extrema.len() {
        if !marked[k] {
            k += 1;
            continue;
        }
        let first = k;
        while k < extrema.len() && marked[k] {
            k += 1;
        }
        let run = &extrema[first..k];

        let (anchor_before, neighbour_before) = if first == 0 {
            (boundary_anchor(start, run[0].control_point()), start)
        } else {
            let p = extrema[first - 1].control_point();
            (Anchor { point: p, synthetic: false }, p)
        };
        let (anchor_after, neighbour_after) = if k == extrema.len() {
            (boundary_anchor(end, run[run.len() - 1].control_point()), end)
        } else {
            let p = extrema[k].control_point();
            (Anchor { point: p, synthetic: false }, p)
        };
        lists.push(MarkedList {
            extrema: run.to_vec(),
            anchor_before,
            anchor_after,
            neighbour_before,
            neighbour_after,
        });
    }
    lists
}

/// Treats the boundary sample as one more blocked extremum: under an even
/// mirror its chord partners are both `inner`, so its median is the mean of
/// the two values.
fn boundary_anchor(boundary: ControlPoint, inner: ControlPoint) -> Anchor {
    Anchor {
        point: ControlPoint::new(boundary.t, 0.5 * (boundary.value + inner.value)),
        synthetic: true,
    }
}

/// Glues a clamped spline over each marked run onto the IMF.
pub fn build_passed_function(imf: &TimeSeries, lists: &[MarkedList]) -> Result<TimeSeries> {
    let times = imf.times();
    let mut passed = imf.values().to_vec();
    for list in lists {
        if list.is_empty() {
            continue;
        }
        let mut knots = Vec::with_capacity(list.len() + 2);
        knots.push(Knot::from(list.anchor_before.point));
        for (i, e) in list.extrema.iter().enumerate() {
            let prev = if i == 0 { list.neighbour_before } else { list.extrema[i - 1].control_point() };
            let next = list.extrema.get(i + 1).map_or(list.neighbour_after, |n| n.control_point());
            let value = if e.value != 0.0 {
                chord_midpoint(prev, e.control_point(), next)
            } else {
                e.value
            };
            knots.push(Knot::new(e.time, value));
        }
        knots.push(Knot::from(list.anchor_after.point));

        let spline = CubicSpline::clamped(&knots, 0.0, 0.0)?;
        let (lo, hi) = list.span();
        let from = times.partition_point(|&t| t < lo);
        let to = times.partition_point(|&t| t <= hi);
        let values = spline.evaluate_on_grid(&times[from..to])?;
        passed[from..to].copy_from_slice(&values);
    }
    imf.with_values(passed)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PassDiagnostics {
    pub marked: usize,
    /// Largest pointwise change of the filtered signal in this pass.
    pub max_change: f64,
}

#[derive(Debug, Clone)]
pub struct FilterResult {
    pub filtered: TimeSeries,
    pub blocked: TimeSeries,
    /// Passes that changed the signal.
    pub passes: usize,
    /// One entry per examined pass, including a final pass with no marks.
    pub diagnostics: Vec<PassDiagnostics>,
}

/// Iterates decomposition, marking and gluing until nothing is marked, the
/// filtered signal settles, or `max_passes` is reached.
///
/// Every pass uses derivative initialization regardless of
/// `cfg.initialization`, since marking relies on the riding waves it reveals.
pub fn filter_series(
    data: &TimeSeries,
    criteria: &FilterCriteria,
    cfg: &RefinementConfig,
) -> Result<FilterResult> {
    criteria.validate()?;
    let cfg = RefinementConfig { initialization: Initialization::Derivative, ..cfg.clone() };
    let settle = criteria.settle_tolerance.resolve(data.range());

    let mut filtered = data.clone();
    let mut passes = 0;
    let mut diagnostics = Vec::new();
    while passes < criteria.max_passes {
        let Some(mode) = extract_mode(&filtered, &cfg)? else {
            break;
        };
        let lists = mark_extrema(&mode.imf, criteria);
        let marked = lists.iter().map(MarkedList::len).sum();
        if marked == 0 {
            diagnostics.push(PassDiagnostics { marked, max_change: 0.0 });
            break;
        }
        let passed = build_passed_function(&mode.imf, &lists)?;
        let next = passed.add(&mode.residue)?;
        let max_change = next
            .values()
            .iter()
            .zip(filtered.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        filtered = next;
        passes += 1;
        diagnostics.push(PassDiagnostics { marked, max_change });
        if max_change < settle {
            break;
        }
    }
    let blocked = data.sub(&filtered)?;
    Ok(FilterResult { filtered, blocked, passes, diagnostics })
}
