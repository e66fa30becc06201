//! Benchmark harness for spectral gradient methods: suites, tables,
//! performance profiles and the acceptance checks.

pub mod criteria;
pub mod suite;
pub mod table;

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use spectral_core::analysis::{default_rho_grid, performance_profile, profile_svg, write_profile_csv};
use spectral_core::solver::{read_rows_csv, write_rows_csv, ResultRow};
use spectral_core::{QuadraticProblem, SpectrumKind};

use crate::criteria::{Harness, Outcome};
use crate::suite::{run_suite, ExperimentSuite};
use crate::table::{aggregate, format_table, write_table_csv};

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("empty input")]
    EmptyInput,
    #[error(transparent)]
    Core(#[from] spectral_core::Error),
}

impl From<std::io::Error> for BenchError {
    fn from(e: std::io::Error) -> Self {
        BenchError::Io(e.to_string())
    }
}

impl From<csv::Error> for BenchError {
    fn from(e: csv::Error) -> Self {
        BenchError::Io(e.to_string())
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, BenchError> {
    let f = File::create(path).map_err(|e| BenchError::Io(format!("{}: {e}", path.display())))?;
    Ok(BufWriter::new(f))
}

fn read_rows(path: &Path) -> Result<Vec<ResultRow>, BenchError> {
    let f = File::open(path).map_err(|e| BenchError::Io(format!("{}: {e}", path.display())))?;
    let rows = read_rows_csv(BufReader::new(f))?;
    if rows.is_empty() {
        return Err(BenchError::EmptyInput);
    }
    Ok(rows)
}

/// Run every job of the suite and write the rows to `out`.
pub fn cmd_run(suite: &ExperimentSuite, out: &Path, workers: usize) -> Result<Vec<ResultRow>, BenchError> {
    let rows = run_suite(suite, workers)?;
    let mut w = create(out)?;
    write_rows_csv(&rows, &mut w)?;
    w.flush()?;
    Ok(rows)
}

/// Writes `<out>` as CSV and returns the aligned text table.
pub fn cmd_table(input: &Path, out: Option<&Path>) -> Result<String, BenchError> {
    let cells = aggregate(&read_rows(input)?)?;
    if let Some(out) = out {
        let mut w = create(out)?;
        write_table_csv(&cells, &mut w)?;
        w.flush()?;
    }
    Ok(format_table(&cells))
}

/// Writes `<out>` (CSV) and `<out>` with extension `.svg`; returns both paths.
pub fn cmd_profile(input: &Path, out: &Path) -> Result<(PathBuf, PathBuf), BenchError> {
    let rows = read_rows(input)?;
    let mut methods: Vec<&str> = rows.iter().map(|r| r.method.as_str()).collect();
    methods.sort();
    methods.dedup();
    if methods.len() < 2 {
        return Err(BenchError::Config(format!("a profile needs at least 2 methods, found {}", methods.len())));
    }
    let curves = performance_profile(&rows, &default_rho_grid())?;
    let mut w = create(out)?;
    write_profile_csv(&curves, &mut w)?;
    w.flush()?;
    let svg = out.with_extension("svg");
    std::fs::write(&svg, profile_svg(&curves)).map_err(|e| BenchError::Io(format!("{}: {e}", svg.display())))?;
    Ok((out.to_path_buf(), svg))
}

pub fn cmd_gen(kind: SpectrumKind, n: usize, kappa: f64, seed: u64, out: &Path) -> Result<(), BenchError> {
    let p = QuadraticProblem::generate(kind, n, kappa, seed)?;
    let mut w = create(out)?;
    p.write_to(&mut w)?;
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tier {
    Fast,
    Full,
}

/// Runs the checks of the tier, printing one line per check as it finishes.
pub fn cmd_verify<W: Write>(tier: Tier, harness: &mut Harness, mut log: W) -> Vec<Outcome> {
    let ids: &[u8] = match tier {
        Tier::Fast => &criteria::FAST,
        Tier::Full => &criteria::ALL,
    };
    let mut outcomes = Vec::new();
    for &id in ids {
        let o = harness.run(id);
        // A closed log stream should not abort the checks.
        let _ = writeln!(log, "{}", o.line());
        outcomes.push(o);
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    let _ = writeln!(log, "{passed}/{} checks passed", outcomes.len());
    outcomes
}
