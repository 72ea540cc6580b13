//! Boundary extension of control-point sequences.
//!
//! Turning directions and median points at the first and last control point
//! need two neighbours on each side, so every sequence is padded with exactly
//! two synthetic points per end before medians are taken.

use crate::error::{Error, Result};
use crate::series::ControlPoint;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum ExtensionKind {
    #[default]
    /// Mirror about the first and last control point, which are taken to be
    /// the boundary samples of the data.
    Even,
    /// Point reflection through the boundary samples `start` and `end`, which
    /// lie strictly outside the control points.
    Odd { start: ControlPoint, end: ControlPoint },
    /// Periodic wrap; first and last control values must agree.
    Cyclic,
}

/// Which formula set to use for the cyclic tail.
///
/// Under `Strict` the outermost tail point of the cyclic extension takes its
/// time offset from `t[m-1] - t[m-3]` but its value from `E(t[2])`. `Consistent` uses the periodic offset
/// `t[2] - t[0]` for that point. The even and odd sets are the same under
/// both variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FormulaVariant {
    #[default]
    Strict,
    Consistent,
}

const CYCLIC_RELATIVE_TOLERANCE: f64 = 1e-9;

/// [`extend_with`] using the strict formula set.
pub fn extend(points: &[ControlPoint], kind: ExtensionKind) -> Result<Vec<ControlPoint>> {
    extend_with(points, kind, FormulaVariant::Strict)
}

/// Returns `points` with two synthetic points prepended and two appended.
pub fn extend_with(
    points: &[ControlPoint],
    kind: ExtensionKind,
    variant: FormulaVariant,
) -> Result<Vec<ControlPoint>> {
    let m = points.len();
    if m < 3 {
        return Err(Error::Extension(format!("need at least 3 control points, got {m}")));
    }
    if points.windows(2).any(|w| w[1].t <= w[0].t) {
        return Err(Error::Extension("control point times must be strictly increasing".into()));
    }
    let t = |i: usize| points[i].t;
    let e = |i: usize| points[i].value;
    let p = ControlPoint::new;

    let [before2, before1, after1, after2] = match kind {
        ExtensionKind::Even => [
            p(t(0) - (t(2) - t(0)), e(2)),
            p(t(0) - (t(1) - t(0)), e(1)),
            p(t(m - 1) + (t(m - 1) - t(m - 2)), e(m - 2)),
            p(t(m - 1) + (t(m - 1) - t(m - 3)), e(m - 3)),
        ],
        ExtensionKind::Odd { start, end } => {
            let (ts, fs) = (start.t, start.value);
            let (te, fe) = (end.t, end.value);
            [
                p(ts - (t(1) - ts), fs - (e(1) - fs)),
                p(ts - (t(0) - ts), fs - (e(0) - fs)),
                p(te + (te - t(m - 1)), fe - (e(m - 1) - fe)),
                p(te + (te - t(m - 2)), fe - (e(m - 2) - fe)),
            ]
        }
        ExtensionKind::Cyclic => {
            let (first, last) = (e(0), e(m - 1));
            let scale = first.abs().max(last.abs());
            if first != last && (first - last).abs() > CYCLIC_RELATIVE_TOLERANCE * scale {
                return Err(Error::Extension(format!(
                    "cyclic extension needs equal end values, got {first} and {last}"
                )));
            }
            let tail_offset = match variant {
                FormulaVariant::Strict => t(m - 1) - t(m - 3),
                FormulaVariant::Consistent => t(2) - t(0),
            };
            [
                p(t(0) - (t(m - 1) - t(m - 3)), e(m - 3)),
                p(t(0) - (t(m - 1) - t(m - 2)), e(m - 2)),
                p(t(m - 1) + (t(1) - t(0)), e(1)),
                p(t(m - 1) + tail_offset, e(2)),
            ]
        }
    };

    let mut out = Vec::with_capacity(m + 4);
    out.push(before2);
    out.push(before1);
    out.extend_from_slice(points);
    out.push(after1);
    out.push(after2);
    if out.windows(2).any(|w| w[1].t <= w[0].t) {
        return Err(Error::Extension(
            "extended control point times are not strictly increasing".into(),
        ));
    }
    Ok(out)
}
