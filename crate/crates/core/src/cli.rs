//! Command-line front end.
//!
//! Exit codes: 0 success, 1 invalid arguments or configuration, 2 I/O or
//! parse failure, 3 non-finite numbers.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::extension::FormulaVariant;
use crate::filter::{filter_series, EdgeReading, FilterCriteria, JumpBlock};
use crate::imd::{decompose, Boundary, Initialization, RefinementConfig, Tolerance};
use crate::io::csv::{read_csv, write_csv};
use crate::io::report::{mode_line, pass_line, RunManifest};
use crate::io::svg::write_svg;
use crate::io::synth::Synth;
use crate::series::TimeSeries;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "fast-imd", version, about = "Fast intrinsic mode decomposition and IMF-domain filtering")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Split a series into IMFs and a final residue.
    Decompose(DecomposeArgs),
    /// Remove IMF oscillations by edge duration or amplitude.
    Filter(FilterArgs),
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false, id = "source")]
pub struct Source {
    /// CSV file with `time,value` rows or a single value column.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Synthetic signal, e.g. `two_cosine` or `random_walk:seed=3`.
    #[arg(long)]
    pub synth: Option<String>,
}

#[derive(Debug, Args)]
pub struct Common {
    #[command(flatten)]
    pub source: Source,
    #[arg(long, default_value = "out")]
    pub output_dir: PathBuf,
    /// Refinement passes per mode.
    #[arg(long, default_value_t = 12)]
    pub max_iters: usize,
    /// Stop refining when the residue moves less than this fraction of the range.
    #[arg(long, default_value_t = 1e-3)]
    pub delta_tol: f64,
    #[arg(long, value_enum, default_value_t = ExtensionArg::Even)]
    pub extension: ExtensionArg,
    /// Cyclic tail formula set.
    #[arg(long, value_enum, default_value_t = FormulasArg::Strict)]
    pub formulas: FormulasArg,
    /// Also write an SVG plot.
    #[arg(long)]
    pub plot: bool,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 16)]
    pub max_modes: usize,
    #[arg(long, value_enum, default_value_t = InitArg::Derivative)]
    pub init: InitArg,
}

#[derive(Debug, Args)]
pub struct FilterArgs {
    #[command(flatten)]
    pub common: Common,
    /// Block edges with duration in `[lo, hi)`; repeatable.
    #[arg(long = "block-jump", value_name = "LO:HI", value_parser = parse_block)]
    pub block_jump: Vec<JumpBlock>,
    /// Block extrema with absolute value below this.
    #[arg(long, default_value_t = 0.0)]
    pub amp_floor: f64,
    #[arg(long, default_value_t = 8)]
    pub max_passes: usize,
    /// Stop when the filtered series moves less than this fraction of the range.
    #[arg(long, default_value_t = 1e-3)]
    pub settle_tol: f64,
    #[arg(long, value_enum, default_value_t = EdgeArg::Adjacent)]
    pub edge: EdgeArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExtensionArg {
    Even,
    Odd,
    Cyclic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormulasArg {
    Strict,
    Consistent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InitArg {
    Derivative,
    Data,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EdgeArg {
    /// Between neighbouring extrema.
    Adjacent,
    /// From the extremum to the nearest zero crossing.
    ZeroCrossing,
}

fn parse_block(s: &str) -> Result<JumpBlock, String> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| format!("expected LO:HI, got `{s}`"))?;
    let num = |v: &str| v.trim().parse::<f64>().map_err(|_| format!("`{v}` is not a number"));
    JumpBlock::new(num(lo)?, num(hi)?).map_err(|e| e.to_string())
}

impl Common {
    fn config(&self, init: Initialization) -> RefinementConfig {
        RefinementConfig {
            max_iterations: self.max_iters,
            delta_tolerance: Tolerance::Relative(self.delta_tol),
            boundary: match self.extension {
                ExtensionArg::Even => Boundary::Even,
                ExtensionArg::Odd => Boundary::Odd,
                ExtensionArg::Cyclic => Boundary::Cyclic,
            },
            formulas: match self.formulas {
                FormulasArg::Strict => FormulaVariant::Strict,
                FormulasArg::Consistent => FormulaVariant::Consistent,
            },
            initialization: init,
            ..RefinementConfig::default()
        }
    }

    fn load(&self) -> Outcome<(String, TimeSeries)> {
        if let Some(path) = &self.source.input {
            let series = read_csv(path).map_err(Failure::input)?;
            Ok((path.display().to_string(), series))
        } else {
            let spec = self.source.synth.as_deref().unwrap_or_default();
            let synth: Synth = spec.parse().map_err(Failure::usage)?;
            let series = synth.generate().map_err(Failure::usage)?;
            Ok((format!("synth:{synth}"), series))
        }
    }

    fn manifest(&self, subcommand: &str, input: &str) -> RunManifest {
        let mut m = RunManifest::new(subcommand, input);
        m.set("output_dir", self.output_dir.display());
        m.set("max_iters", self.max_iters);
        m.set("delta_tol", self.delta_tol);
        m.set("extension", format!("{:?}", self.extension).to_lowercase());
        m.set("formulas", format!("{:?}", self.formulas).to_lowercase());
        m
    }

    fn prepare_output(&self) -> Outcome<()> {
        std::fs::create_dir_all(&self.output_dir)
            .map_err(|source| Failure::io(Error::Io { path: self.output_dir.clone(), source }))
    }
}

type Outcome<T> = Result<T, Failure>;

/// An error paired with its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    error: Error,
}

impl Failure {
    fn classify(error: Error, fallback: i32) -> Self {
        let code = match error {
            Error::NonFinite { .. } => EXIT_NUMERIC,
            Error::Io { .. } | Error::Parse { .. } => EXIT_IO,
            _ => fallback,
        };
        Self { code, error }
    }

    fn usage(error: Error) -> Self {
        Self::classify(error, EXIT_USAGE)
    }

    /// Bad input data counts as a parse failure.
    fn input(error: Error) -> Self {
        Self::classify(error, EXIT_IO)
    }

    fn io(error: Error) -> Self {
        Self::classify(error, EXIT_IO)
    }

    /// Failures inside the numerics: configuration problems aside, these
    /// only arise from non-finite values.
    fn numeric(error: Error) -> Self {
        Self::classify(error, EXIT_USAGE)
    }
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Decompose(args) => run_decompose(args, out),
        Command::Filter(args) => run_filter(args, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.error);
            f.code
        }
    }
}

fn run_decompose(args: &DecomposeArgs, out: &mut dyn Write) -> Outcome<()> {
    let common = &args.common;
    let init = match args.init {
        InitArg::Derivative => Initialization::Derivative,
        InitArg::Data => Initialization::DataFunction,
    };
    let cfg = common.config(init);
    cfg.validate().map_err(Failure::usage)?;
    let (input, data) = common.load()?;
    let result = decompose(&data, &cfg, args.max_modes).map_err(Failure::numeric)?;

    common.prepare_output()?;
    let dir = &common.output_dir;
    let mut manifest = common.manifest("decompose", &input);
    manifest.set("max_modes", args.max_modes);
    manifest.set("init", format!("{:?}", args.init).to_lowercase());
    for (k, mode) in result.modes.iter().enumerate() {
        let k = k + 1;
        write(&dir.join(format!("imf_{k}.csv")), &mode.imf)?;
        write(&dir.join(format!("residue_{k}.csv")), &mode.residue)?;
        let line = mode_line(k, mode);
        let _ = writeln!(out, "{line}");
        manifest.lines.push(line);
    }
    write(&dir.join("final_residue.csv"), &result.final_residue)?;
    if common.plot {
        let names: Vec<String> = (1..=result.modes.len()).map(|k| format!("imf {k}")).collect();
        let mut series: Vec<(&str, &TimeSeries)> = vec![("data", &data)];
        series.extend(names.iter().map(String::as_str).zip(result.modes.iter().map(|m| &m.imf)));
        series.push(("final residue", &result.final_residue));
        write_svg(&dir.join("decomposition.svg"), &series).map_err(Failure::io)?;
    }
    manifest.write(&dir.join("manifest.txt")).map_err(Failure::io)
}

fn run_filter(args: &FilterArgs, out: &mut dyn Write) -> Outcome<()> {
    let common = &args.common;
    let cfg = common.config(Initialization::Derivative);
    cfg.validate().map_err(Failure::usage)?;
    let criteria = FilterCriteria {
        jump_time_blocks: args.block_jump.clone(),
        amplitude_floor: args.amp_floor,
        max_passes: args.max_passes,
        settle_tolerance: Tolerance::Relative(args.settle_tol),
        edge_reading: match args.edge {
            EdgeArg::Adjacent => EdgeReading::AdjacentExtrema,
            EdgeArg::ZeroCrossing => EdgeReading::ZeroCrossing,
        },
    };
    let (input, data) = common.load()?;
    let result = filter_series(&data, &criteria, &cfg).map_err(Failure::numeric)?;

    common.prepare_output()?;
    let dir = &common.output_dir;
    let mut manifest = common.manifest("filter", &input);
    let blocks: Vec<String> = args.block_jump.iter().map(|b| format!("{}:{}", b.lo, b.hi)).collect();
    manifest.set("block_jump", blocks.join(" "));
    manifest.set("amp_floor", args.amp_floor);
    manifest.set("max_passes", args.max_passes);
    manifest.set("settle_tol", args.settle_tol);
    manifest.set("edge", format!("{:?}", args.edge).to_lowercase());
    for (p, d) in result.diagnostics.iter().enumerate() {
        let line = pass_line(p + 1, d);
        let _ = writeln!(out, "{line}");
        manifest.lines.push(line);
    }
    write(&dir.join("filtered.csv"), &result.filtered)?;
    write(&dir.join("blocked.csv"), &result.blocked)?;
    if common.plot {
        let series =
            [("data", &data), ("filtered", &result.filtered), ("blocked", &result.blocked)];
        write_svg(&dir.join("filter.svg"), &series).map_err(Failure::io)?;
    }
    manifest.write(&dir.join("manifest.txt")).map_err(Failure::io)
}

fn write(path: &Path, s: &TimeSeries) -> Outcome<()> {
    write_csv(path, s).map_err(Failure::io)
}
