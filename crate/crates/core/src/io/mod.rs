//! File formats, synthetic signals and run reports.

pub mod csv;
pub mod report;
pub mod svg;
pub mod synth;
