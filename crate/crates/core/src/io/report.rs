//! Human-readable run diagnostics.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::Result;
use crate::filter::PassDiagnostics;
use crate::imd::ModeComponent;

/// `IMF component 1, Extrema count: 147, Value range: [-80.422, 74.992], Iterations: 3, Delta: 2.106113 at 368.00`
pub fn mode_line(k: usize, mode: &ModeComponent) -> String {
    let (min, max) = mode.value_range;
    format!(
        "IMF component {k}, Extrema count: {}, Value range: [{min:.3}, {max:.3}], Iterations: {}, Delta: {:.6} at {:.2}",
        mode.extrema_count, mode.iterations, mode.final_delta, mode.delta_time
    )
}

pub fn pass_line(pass: usize, d: &PassDiagnostics) -> String {
    format!("Filter pass {pass}, Marked extrema: {}, Max change: {:.6}", d.marked, d.max_change)
}

/// What was run and how: resolved settings plus the diagnostics lines.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunManifest {
    pub subcommand: String,
    pub input: String,
    pub settings: Vec<(String, String)>,
    pub lines: Vec<String>,
}

impl RunManifest {
    pub fn new(subcommand: &str, input: &str) -> Self {
        Self { subcommand: subcommand.into(), input: input.into(), ..Self::default() }
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.settings.push((key.into(), value.to_string()));
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "subcommand = {}", self.subcommand);
        let _ = writeln!(out, "input = {}", self.input);
        for (k, v) in &self.settings {
            let _ = writeln!(out, "{k} = {v}");
        }
        out.push('\n');
        for line in &self.lines {
            out.push_str(line);
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        super::csv::write_atomic(path, self.render().as_bytes())
    }
}
