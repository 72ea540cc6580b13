use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use fast_imd::io::csv::{read_csv, write_csv};
use fast_imd::series::TimeSeries;

fn fast_imd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fast-imd")).args(args).output().expect("binary runs")
}

fn interior_rmse(s: &TimeSeries, f: impl Fn(f64) -> f64) -> f64 {
    let (lo, hi) = (90.0, 810.0);
    let idx: Vec<usize> = (0..s.len()).filter(|&i| s.times()[i] >= lo && s.times()[i] <= hi).collect();
    (idx.iter().map(|&i| (s.values()[i] - f(s.times()[i])).powi(2)).sum::<f64>() / idx.len() as f64).sqrt()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn decompose_two_cosine() {
    let dir = tempfile::tempdir().unwrap();
    let out = fast_imd(&["decompose", "--synth", "two_cosine", "--output-dir", path_str(dir.path()), "--plot"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("IMF component 1, Extrema count: 59, Value range: ["), "{stdout}");
    assert_eq!(stdout.lines().count(), 2);

    for f in ["imf_1.csv", "imf_2.csv", "residue_1.csv", "residue_2.csv", "final_residue.csv", "decomposition.svg", "manifest.txt"] {
        assert!(dir.path().join(f).exists(), "{f} missing");
    }
    let imf = read_csv(&dir.path().join("imf_1.csv")).unwrap();
    assert!(interior_rmse(&imf, |t| 30.0 * (PI * t / 15.0).cos()) <= 3.0);
    let manifest = fs::read_to_string(dir.path().join("manifest.txt")).unwrap();
    assert!(manifest.contains("subcommand = decompose"));
    assert!(manifest.contains("IMF component 2,"));
}

#[test]
fn ramp_has_no_modes() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("ramp.csv");
    let ramp = TimeSeries::sample(0.0, 50.0, 1.0, |t| 3.0 * t - 1.0).unwrap();
    write_csv(&input, &ramp).unwrap();
    let out_dir = dir.path().join("out");
    let out = fast_imd(&["decompose", "--input", path_str(&input), "--output-dir", path_str(&out_dir)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert!(!out_dir.join("imf_1.csv").exists());
    assert_eq!(read_csv(&out_dir.join("final_residue.csv")).unwrap(), ramp);
}

#[test]
fn filter_two_cosine() {
    let dir = tempfile::tempdir().unwrap();
    let out = fast_imd(&["filter", "--synth", "two_cosine", "--block-jump", "0:20", "--output-dir", path_str(dir.path())]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("Filter pass 1, Marked extrema: "));

    let filtered = read_csv(&dir.path().join("filtered.csv")).unwrap();
    let blocked = read_csv(&dir.path().join("blocked.csv")).unwrap();
    assert!(interior_rmse(&blocked, |t| 30.0 * (PI * t / 15.0).cos()) <= 3.0);
    let input = fast_imd::io::synth::Synth::two_cosine().generate().unwrap();
    for i in 0..input.len() {
        let sum = filtered.values()[i] + blocked.values()[i];
        assert!((sum - input.values()[i]).abs() <= 1e-9 * input.range());
    }
}

#[test]
fn filter_without_blocks_is_identity() {
    let dir = tempfile::tempdir().unwrap();
    let out = fast_imd(&["filter", "--synth", "riding_wave", "--output-dir", path_str(dir.path()), "--plot"]);
    assert_eq!(out.status.code(), Some(0));
    let filtered = read_csv(&dir.path().join("filtered.csv")).unwrap();
    assert_eq!(filtered, fast_imd::io::synth::Synth::riding_wave().generate().unwrap());
    assert!(dir.path().join("filter.svg").exists());
}

#[test]
fn usage_errors_exit_1() {
    let out = fast_imd(&["decompose"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));

    for args in [
        &["decompose", "--synth", "two_cosine", "--input", "x.csv"][..],
        &["decompose", "--synth", "two_cosine", "--extension", "sideways"],
        &["decompose", "--synth", "nonsense"],
        &["decompose", "--synth", "two_cosine", "--max-iters", "0"],
        &["filter", "--synth", "two_cosine", "--block-jump", "20:0"],
        &["bogus"],
    ] {
        assert_eq!(fast_imd(args).status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn help_and_version_exit_0() {
    assert_eq!(fast_imd(&["--help"]).status.code(), Some(0));
    assert_eq!(fast_imd(&["decompose", "--help"]).status.code(), Some(0));
    assert_eq!(fast_imd(&["--version"]).status.code(), Some(0));
}

#[test]
fn io_and_numeric_failures() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.csv");
    let out = fast_imd(&["decompose", "--input", path_str(&missing), "--output-dir", path_str(dir.path())]);
    assert_eq!(out.status.code(), Some(2));

    let garbled = dir.path().join("garbled.csv");
    fs::write(&garbled, "0,1\n1,2\n2,oops\n").unwrap();
    let out = fast_imd(&["decompose", "--input", path_str(&garbled), "--output-dir", path_str(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    let nan = dir.path().join("nan.csv");
    fs::write(&nan, "0,1\n1,inf\n2,3\n").unwrap();
    let out = fast_imd(&["filter", "--input", path_str(&nan), "--output-dir", path_str(dir.path())]);
    assert_eq!(out.status.code(), Some(3));
}
