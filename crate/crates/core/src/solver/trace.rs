use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Termination {
    /// `‖g_k‖ <= epsilon ‖g_1‖`
    Converged,
    /// The iteration cap was exceeded.
    MaxIter,
    /// The step or the curvature fell to round-off scale before convergence.
    Stagnated,
}

/// One visited iterate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Record {
    pub k: usize,
    /// Stepsize taken from this iterate; `None` on the final record.
    pub alpha: Option<f64>,
    pub grad_norm: f64,
    pub f_value: f64,
}

/// Final iterate of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct IterateState {
    pub x: Vec<f64>,
    pub g: Vec<f64>,
    pub k: usize,
    pub f: f64,
}

/// Everything a run produced.
///
/// `records` holds one entry per visited iterate `x_1, ..., x_K`; the last
/// one carries no stepsize. [`RunTrace::iterations`] counts steps taken,
/// `K - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub records: Vec<Record>,
    pub termination: Termination,
    pub final_state: IterateState,
    /// Gradients `g_1, ..., g_K` when the run was asked to keep them.
    pub gradients: Option<Vec<Vec<f64>>>,
}

impl RunTrace {
    pub fn iterations(&self) -> usize {
        self.records.len().saturating_sub(1)
    }

    pub fn solved(&self) -> bool {
        self.termination == Termination::Converged
    }

    pub fn initial_grad_norm(&self) -> f64 {
        self.records.first().map_or(0.0, |r| r.grad_norm)
    }

    pub fn final_grad_norm(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.grad_norm)
    }

    pub fn grad_norms(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.grad_norm).collect()
    }

    /// Stepsizes `alpha_1, ..., alpha_{K-1}`.
    pub fn stepsizes(&self) -> Vec<f64> {
        self.records.iter().filter_map(|r| r.alpha).collect()
    }

    /// Per-iteration CSV with header `k,alpha,gradnorm,fvalue`; the final
    /// record has an empty `alpha` field.
    pub fn write_iterations_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["k", "alpha", "gradnorm", "fvalue"])?;
        for r in &self.records {
            wtr.write_record([
                r.k.to_string(),
                r.alpha.map_or(String::new(), |a| format!("{a:e}")),
                format!("{:e}", r.grad_norm),
                format!("{:e}", r.f_value),
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn to_row(&self, problem_id: &str, method: &str, epsilon: f64, kappa: f64, n: usize, seed: u64) -> ResultRow {
        ResultRow {
            problem_id: problem_id.to_string(),
            method: method.to_string(),
            epsilon,
            kappa,
            n,
            seed,
            iterations: self.iterations(),
            solved: self.solved(),
            final_gradnorm: self.final_grad_norm(),
        }
    }
}

/// Summary of one run; the column order is the CSV schema
/// `problem_id,method,epsilon,kappa,n,seed,iterations,solved,final_gradnorm`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub problem_id: String,
    pub method: String,
    pub epsilon: f64,
    pub kappa: f64,
    pub n: usize,
    pub seed: u64,
    pub iterations: usize,
    pub solved: bool,
    pub final_gradnorm: f64,
}

pub fn write_rows_csv<W: Write>(rows: &[ResultRow], w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    for r in rows {
        wtr.serialize(r)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_rows_csv<R: std::io::Read>(r: R) -> Result<Vec<ResultRow>> {
    let mut rdr = csv::Reader::from_reader(r);
    let mut rows = Vec::new();
    for row in rdr.deserialize() {
        rows.push(row?);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_csv_header_and_roundtrip() {
        let rows = vec![ResultRow {
            problem_id: "set1-s7".into(),
            method: "ATC1".into(),
            epsilon: 1e-6,
            kappa: 1e4,
            n: 100,
            seed: 7,
            iterations: 321,
            solved: true,
            final_gradnorm: 3.5e-4,
        }];
        let mut buf = Vec::new();
        write_rows_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(
            text.lines().next().unwrap(),
            "problem_id,method,epsilon,kappa,n,seed,iterations,solved,final_gradnorm"
        );
        assert_eq!(read_rows_csv(buf.as_slice()).unwrap(), rows);
    }
}
