//! Mean iteration counts per (set, method, kappa, epsilon) cell.

use std::io::Write;

use serde::Serialize;
use spectral_core::solver::ResultRow;

use crate::BenchError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableCell {
    pub set: String,
    pub method: String,
    pub kappa: f64,
    pub epsilon: f64,
    pub solved: usize,
    pub unsolved: usize,
    /// Mean over solved runs only; `None` when no run solved.
    pub mean_iterations: Option<f64>,
}

/// The set is the problem id up to its `-s<seed>` suffix.
pub fn set_of(problem_id: &str) -> &str {
    match problem_id.rfind("-s") {
        Some(i) if problem_id[i + 2..].bytes().all(|b| b.is_ascii_digit()) && i + 2 < problem_id.len() => {
            &problem_id[..i]
        }
        _ => problem_id,
    }
}

/// Cells in order of first appearance. Unsolved runs are counted but never
/// enter the mean.
pub fn aggregate(rows: &[ResultRow]) -> Result<Vec<TableCell>, BenchError> {
    if rows.is_empty() {
        return Err(BenchError::EmptyInput);
    }
    let mut cells: Vec<(TableCell, usize)> = Vec::new();
    for r in rows {
        let set = set_of(&r.problem_id);
        let pos = cells.iter().position(|(c, _)| {
            c.set == set && c.method == r.method && c.kappa == r.kappa && c.epsilon == r.epsilon
        });
        let idx = pos.unwrap_or_else(|| {
            cells.push((
                TableCell {
                    set: set.to_string(),
                    method: r.method.clone(),
                    kappa: r.kappa,
                    epsilon: r.epsilon,
                    solved: 0,
                    unsolved: 0,
                    mean_iterations: None,
                },
                0,
            ));
            cells.len() - 1
        });
        let (cell, total) = &mut cells[idx];
        if r.solved {
            cell.solved += 1;
            *total += r.iterations;
        } else {
            cell.unsolved += 1;
        }
    }
    Ok(cells
        .into_iter()
        .map(|(mut c, total)| {
            c.mean_iterations = (c.solved > 0).then(|| total as f64 / c.solved as f64);
            c
        })
        .collect())
}

pub fn write_table_csv<W: Write>(cells: &[TableCell], w: W) -> Result<(), BenchError> {
    let mut wtr = csv::Writer::from_writer(w);
    for c in cells {
        wtr.serialize(c)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn format_table(cells: &[TableCell]) -> String {
    let header = ["set", "method", "kappa", "epsilon", "mean_iter", "solved", "unsolved"];
    let body: Vec<[String; 7]> = cells
        .iter()
        .map(|c| {
            [
                c.set.clone(),
                c.method.clone(),
                format!("{:e}", c.kappa),
                format!("{:e}", c.epsilon),
                c.mean_iterations.map_or("-".into(), |m| format!("{m:.1}")),
                c.solved.to_string(),
                c.unsolved.to_string(),
            ]
        })
        .collect();
    let mut width = header.map(str::len);
    for row in &body {
        for (w, s) in width.iter_mut().zip(row) {
            *w = (*w).max(s.len());
        }
    }
    let line = |cols: Vec<&str>| {
        let parts: Vec<String> = cols
            .iter()
            .zip(width)
            .enumerate()
            // Text columns left-aligned, numbers right-aligned.
            .map(|(i, (s, w))| if i < 2 { format!("{s:<w$}") } else { format!("{s:>w$}") })
            .collect();
        parts.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(header.to_vec());
    for row in &body {
        out += &line(row.iter().map(String::as_str).collect());
    }
    out
}
