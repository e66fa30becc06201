//! Rate diagnostics on gradient-norm traces.

use std::io::Write;

use crate::error::{Error, Result};
use crate::solver::RunTrace;

/// One row of a bound check: an observed `value` against its `bound`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundRow {
    pub k: usize,
    pub value: f64,
    pub bound: f64,
    pub satisfied: bool,
    /// False when the bound is at least 1 and so says nothing about decrease.
    pub active: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EnvelopeReport {
    /// `‖g_{k+5}‖ / ‖g_k‖` against the five-step superlinear bound, `k >= 2`.
    pub rows: Vec<BoundRow>,
}

impl EnvelopeReport {
    pub fn ratios(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.value).collect()
    }

    pub fn all_satisfied(&self) -> bool {
        self.rows.iter().all(|r| r.satisfied)
    }

    /// Whether the ratios over the last three disjoint five-step windows,
    /// the final one ending at the last record, strictly decrease.
    pub fn tail_decreasing(&self) -> bool {
        let Some(last) = self.rows.last() else { return false };
        let pick = |back: usize| {
            last.k
                .checked_sub(back)
                .and_then(|k| self.rows.iter().find(|r| r.k == k))
                .map(|r| r.value)
        };
        match (pick(10), pick(5), pick(0)) {
            (Some(a), Some(b), Some(c)) => a > b && b > c,
            _ => false,
        }
    }

    /// CSV with header `k,value,bound,satisfied`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        write_bound_rows(&self.rows, w)
    }
}

pub fn write_bound_rows<W: Write>(rows: &[BoundRow], w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["k", "value", "bound", "satisfied"])?;
    for r in rows {
        let satisfied = if r.active { r.satisfied.to_string() } else { "bound inactive".to_string() };
        wtr.write_record([r.k.to_string(), format!("{:e}", r.value), format!("{:e}", r.bound), satisfied])?;
    }
    wtr.flush()?;
    Ok(())
}

/// `lambda (lambda - 1)^5 exp(-(sqrt 2 - 1)² 2^{k/2} c1 + 2 c1)` with
/// `c1 = 2 log lambda`.
pub fn superlinear_bound(lambda: f64, k: usize) -> f64 {
    let c1 = 2.0 * lambda.ln();
    let s = 2f64.sqrt() - 1.0;
    let log_bound = lambda.ln() + 5.0 * (lambda - 1.0).ln() - s * s * 2f64.powf(k as f64 / 2.0) * c1 + 2.0 * c1;
    log_bound.exp()
}

/// Five-step gradient ratios of a two-dimensional run against the
/// superlinear bound. Traces with fewer than seven records give an empty
/// report.
pub fn superlinear_envelope_check(trace: &RunTrace, lambda: f64) -> Result<EnvelopeReport> {
    let n = trace.final_state.x.len();
    if n != 2 {
        return Err(Error::DimensionNotTwo(n));
    }
    let g = trace.grad_norms();
    let mut rows = Vec::new();
    // g[i] is ‖g_{i+1}‖.
    for k in 2..g.len().saturating_sub(4) {
        let value = g[k + 4] / g[k - 1];
        let bound = superlinear_bound(lambda, k);
        rows.push(BoundRow { k, value, bound, satisfied: value <= bound, active: bound < 1.0 });
    }
    Ok(EnvelopeReport { rows })
}

/// Log-ratios `log ‖g_end‖ - log ‖g_{end-width}‖` over the last `count`
/// disjoint windows of a `log ‖g_k‖` sequence, oldest first.
pub fn window_log_ratios(log_norms: &[f64], width: usize, count: usize) -> Option<Vec<f64>> {
    let last = log_norms.len().checked_sub(1)?;
    if width == 0 || width * count > last {
        return None;
    }
    Some(
        (0..count)
            .rev()
            .map(|j| {
                let end = last - j * width;
                log_norms[end] - log_norms[end - width]
            })
            .collect(),
    )
}

pub fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[0] > w[1])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    /// `exp(slope)` of the log running minimum; below 1 means R-linear decay.
    pub rate: f64,
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit in natural-log units.
    pub quality: f64,
}

/// Least-squares line through `(k, log min_{j<=k} ‖g_j‖)`.
pub fn rlinear_fit(trace: &RunTrace) -> Result<LinearFit> {
    let g = trace.grad_norms();
    if g.len() < 10 {
        return Err(Error::TooShort { needed: 10, got: g.len() });
    }
    let mut best = f64::INFINITY;
    let pts: Vec<(f64, f64)> = trace
        .records
        .iter()
        .map(|r| {
            best = best.min(r.grad_norm);
            (r.k as f64, best.ln())
        })
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    Ok(LinearFit { rate: slope.exp(), slope, intercept, quality: (sse / n).sqrt() })
}
