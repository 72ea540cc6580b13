//! Cubic spline interpolation over strictly increasing knots.
//!
//! The spline is stored in second-derivative form: for each knot we keep
//! `M_i = S''(t_i)`, obtained from the usual tridiagonal continuity system.
//! Natural ends pin `M_0 = M_n = 0`; clamped ends prescribe `S'` at the first
//! and last knot instead.

use crate::error::{Error, Result};
use crate::series::ControlPoint;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Knot {
    pub t: f64,
    pub y: f64,
}

impl Knot {
    pub fn new(t: f64, y: f64) -> Self {
        Self { t, y }
    }
}

impl From<ControlPoint> for Knot {
    fn from(p: ControlPoint) -> Self {
        Self { t: p.t, y: p.value }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EndCondition {
    /// Zero second derivative at both ends.
    Natural,
    /// Prescribed first derivative at the first and last knot.
    Clamped { d_start: f64, d_end: f64 },
}

#[derive(Debug, Clone)]
pub struct CubicSpline {
    t: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
    end_condition: EndCondition,
}

impl CubicSpline {
    pub fn new(knots: &[Knot], end_condition: EndCondition) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::InvalidKnots(format!(
                "need at least 2 knots, got {}",
                knots.len()
            )));
        }
        if let Some(k) = knots.iter().find(|k| !k.t.is_finite() || !k.y.is_finite()) {
            return Err(Error::InvalidKnots(format!("non-finite knot ({}, {})", k.t, k.y)));
        }
        if let Some(i) = knots.windows(2).position(|w| w[1].t <= w[0].t) {
            return Err(Error::InvalidKnots(format!(
                "knot times must be strictly increasing (t[{}] = {}, t[{}] = {})",
                i,
                knots[i].t,
                i + 1,
                knots[i + 1].t
            )));
        }

        let t: Vec<f64> = knots.iter().map(|k| k.t).collect();
        let y: Vec<f64> = knots.iter().map(|k| k.y).collect();
        let m = second_derivatives(&t, &y, end_condition);
        Ok(Self { t, y, m, end_condition })
    }

    pub fn natural(knots: &[Knot]) -> Result<Self> {
        Self::new(knots, EndCondition::Natural)
    }

    pub fn clamped(knots: &[Knot], d_start: f64, d_end: f64) -> Result<Self> {
        Self::new(knots, EndCondition::Clamped { d_start, d_end })
    }

    pub fn end_condition(&self) -> EndCondition {
        self.end_condition
    }

    /// `(first knot time, last knot time)`.
    pub fn domain(&self) -> (f64, f64) {
        (self.t[0], self.t[self.t.len() - 1])
    }

    pub fn knots(&self) -> impl Iterator<Item = Knot> + '_ {
        self.t.iter().zip(&self.y).map(|(&t, &y)| Knot { t, y })
    }

    pub fn evaluate(&self, t: f64) -> Result<f64> {
        let i = self.interval(t)?;
        Ok(self.value_in(i, t))
    }

    pub fn derivative(&self, t: f64) -> Result<f64> {
        let i = self.interval(t)?;
        let h = self.t[i + 1] - self.t[i];
        let a = self.t[i + 1] - t;
        let b = t - self.t[i];
        Ok(-self.m[i] * a * a / (2.0 * h) + self.m[i + 1] * b * b / (2.0 * h)
            + (self.y[i + 1] - self.y[i]) / h
            - (self.m[i + 1] - self.m[i]) * h / 6.0)
    }

    /// Evaluates at every time, walking the intervals once when `times` is sorted.
    pub fn evaluate_on_grid(&self, times: &[f64]) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(times.len());
        let mut i = 0;
        for &t in times {
            self.check_domain(t)?;
            if t < self.t[i] {
                i = self.interval(t)?;
            }
            while i + 2 < self.t.len() && t > self.t[i + 1] {
                i += 1;
            }
            out.push(self.value_in(i, t));
        }
        Ok(out)
    }

    fn check_domain(&self, t: f64) -> Result<()> {
        let (lo, hi) = self.domain();
        if t >= lo && t <= hi {
            Ok(())
        } else {
            Err(Error::OutOfDomain { t, lo, hi })
        }
    }

    fn interval(&self, t: f64) -> Result<usize> {
        self.check_domain(t)?;
        let upper = self.t.partition_point(|&k| k < t);
        Ok(upper.saturating_sub(1).min(self.t.len() - 2))
    }

    fn value_in(&self, i: usize, t: f64) -> f64 {
        // exact at knots, so residues through control points leave exact zeros
        if t == self.t[i] {
            return self.y[i];
        }
        if t == self.t[i + 1] {
            return self.y[i + 1];
        }
        let h = self.t[i + 1] - self.t[i];
        let a = self.t[i + 1] - t;
        let b = t - self.t[i];
        (self.m[i] * a * a * a + self.m[i + 1] * b * b * b) / (6.0 * h)
            + (self.y[i] / h - self.m[i] * h / 6.0) * a
            + (self.y[i + 1] / h - self.m[i + 1] * h / 6.0) * b
    }
}

fn second_derivatives(t: &[f64], y: &[f64], end: EndCondition) -> Vec<f64> {
    let n = t.len();
    let h: Vec<f64> = t.windows(2).map(|w| w[1] - w[0]).collect();
    let slope: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();

    let mut sub = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut sup = vec![0.0; n];
    let mut rhs = vec![0.0; n];

    for i in 1..n - 1 {
        sub[i] = h[i - 1];
        diag[i] = 2.0 * (h[i - 1] + h[i]);
        sup[i] = h[i];
        rhs[i] = 6.0 * (slope[i] - slope[i - 1]);
    }
    match end {
        EndCondition::Natural => {
            diag[0] = 1.0;
            diag[n - 1] = 1.0;
        }
        EndCondition::Clamped { d_start, d_end } => {
            diag[0] = 2.0 * h[0];
            sup[0] = h[0];
            rhs[0] = 6.0 * (slope[0] - d_start);
            sub[n - 1] = h[n - 2];
            diag[n - 1] = 2.0 * h[n - 2];
            rhs[n - 1] = 6.0 * (d_end - slope[n - 2]);
        }
    }
    solve_tridiagonal(&sub, &diag, &sup, &mut rhs);
    rhs
}

/// Thomas elimination; the solution overwrites `rhs`. The systems built here
/// are strictly diagonally dominant, so no pivoting is needed.
fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &mut [f64]) {
    let n = diag.len();
    let mut c = vec![0.0; n];
    c[0] = sup[0] / diag[0];
    rhs[0] /= diag[0];
    for i in 1..n {
        let denom = diag[i] - sub[i] * c[i - 1];
        c[i] = sup[i] / denom;
        rhs[i] = (rhs[i] - sub[i] * rhs[i - 1]) / denom;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= c[i] * rhs[i + 1];
    }
}
