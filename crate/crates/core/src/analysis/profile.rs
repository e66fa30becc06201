//! Dolan-Moré performance profiles over iteration counts.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;

use crate::error::{Error, Result};
use crate::solver::ResultRow;

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileCurve {
    pub method: String,
    /// `(rho, fraction of problems solved within rho times the best count)`.
    pub points: Vec<(f64, f64)>,
}

impl ProfileCurve {
    /// Fraction at the largest grid point not above `rho`.
    pub fn value_at(&self, rho: f64) -> f64 {
        self.points
            .iter()
            .take_while(|p| p.0 <= rho * (1.0 + 1e-12))
            .last()
            .map_or(0.0, |p| p.1)
    }
}

/// Geometric grid of `points` values from 1 to `max`, both included.
pub fn rho_grid(max: f64, points: usize) -> Vec<f64> {
    let step = max.ln() / (points - 1) as f64;
    (0..points)
        .map(|i| if i + 1 == points { max } else { (step * i as f64).exp() })
        .collect()
}

pub fn default_rho_grid() -> Vec<f64> {
    rho_grid(16.0, 200)
}

type ProblemKey = (String, u64, u64, usize);

fn key(r: &ResultRow) -> ProblemKey {
    (r.problem_id.clone(), r.kappa.to_bits(), r.epsilon.to_bits(), r.n)
}

/// One curve per method, in order of first appearance. A problem is one
/// `(problem_id, kappa, epsilon, n)` cell; problems no method solved are
/// left out, and unsolved runs count as never within any factor.
pub fn performance_profile(rows: &[ResultRow], rho: &[f64]) -> Result<Vec<ProfileCurve>> {
    if rows.is_empty() || rho.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut methods: Vec<String> = Vec::new();
    let mut table: BTreeMap<ProblemKey, BTreeMap<String, f64>> = BTreeMap::new();
    for r in rows {
        if !methods.contains(&r.method) {
            methods.push(r.method.clone());
        }
        // Zero-step runs would make every ratio infinite; count them as one.
        let cost = if r.solved { r.iterations.max(1) as f64 } else { f64::INFINITY };
        if table.entry(key(r)).or_default().insert(r.method.clone(), cost).is_some() {
            return Err(Error::InvalidConfig(format!(
                "duplicate result for {} / {}",
                r.problem_id, r.method
            )));
        }
    }
    let ratios: Vec<Vec<f64>> = table
        .values()
        .filter_map(|costs| {
            let best = costs.values().cloned().fold(f64::INFINITY, f64::min);
            best.is_finite().then(|| {
                methods
                    .iter()
                    .map(|m| costs.get(m).map_or(f64::INFINITY, |c| c / best))
                    .collect()
            })
        })
        .collect();
    if ratios.is_empty() {
        return Err(Error::EmptyInput);
    }
    let total = ratios.len() as f64;
    Ok(methods
        .iter()
        .enumerate()
        .map(|(j, m)| ProfileCurve {
            method: m.clone(),
            points: rho
                .iter()
                .map(|&t| (t, ratios.iter().filter(|r| r[j] <= t).count() as f64 / total))
                .collect(),
        })
        .collect())
}

/// CSV with header `method,rho,fraction`.
pub fn write_profile_csv<W: Write>(curves: &[ProfileCurve], w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["method", "rho", "fraction"])?;
    for c in curves {
        for (rho, frac) in &c.points {
            wtr.write_record([c.method.clone(), format!("{rho}"), format!("{frac}")])?;
        }
    }
    wtr.flush()?;
    Ok(())
}

const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

/// Step plot of the curves on a log2 `rho` axis.
pub fn profile_svg(curves: &[ProfileCurve]) -> String {
    let (w, h, pad) = (640.0, 420.0, 50.0);
    let rho_max = curves
        .iter()
        .flat_map(|c| c.points.iter().map(|p| p.0))
        .fold(1.0f64, f64::max);
    let span = rho_max.log2().max(1e-9);
    let px = |rho: f64| pad + (rho.log2() / span) * (w - 2.0 * pad);
    let py = |f: f64| h - pad - f * (h - 2.0 * pad);

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<path d="M{x0},{y1} L{x0},{y0} L{x1},{y0}" stroke="black" fill="none"/>"#,
        x0 = pad,
        y0 = h - pad,
        x1 = w - pad,
        y1 = pad
    );
    for f in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{f}</text>"#, pad - 6.0, py(f) + 4.0);
    }
    let mut tick = 1.0;
    while tick <= rho_max * (1.0 + 1e-12) {
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{tick}</text>"#, px(tick), h - pad + 16.0);
        tick *= 2.0;
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">rho</text>"#, w / 2.0, h - 10.0);
    for (i, c) in curves.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut d = String::new();
        let mut prev: Option<f64> = None;
        for &(rho, f) in &c.points {
            match prev {
                None => {
                    let _ = write!(d, "M{:.2},{:.2}", px(rho), py(f));
                }
                Some(pf) => {
                    let _ = write!(d, " L{:.2},{:.2} L{:.2},{:.2}", px(rho), py(pf), px(rho), py(f));
                }
            }
            prev = Some(f);
        }
        let _ = writeln!(s, r#"<path d="{d}" stroke="{color}" stroke-width="1.5" fill="none"/>"#);
        let ly = pad + 16.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
            w - pad - 110.0,
            w - pad - 90.0,
            w - pad - 85.0,
            ly + 4.0,
            xml_escape(&c.method)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
