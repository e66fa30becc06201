//! Reciprocal-stepsize localization on quadratics.
//!
//! Condition (i): `min(v) <= 1/alpha_k <= max(v)` for every `k >= 2`.
//! Condition (ii) involves the partial energies
//! `G(k, l) = sum_{i <= l} (g_k^(i))²` in the eigenbasis (eigenvalues
//! ascending) and is only testable for chosen `(epsilon, l, m)`.

use crate::error::{Error, Result};
use crate::problem::QuadraticProblem;
use crate::solver::RunTrace;

/// Relative slack on the eigenvalue bounds, absorbing round-off in `1/alpha`.
pub const RECIPROCAL_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyAReport {
    pub lower: f64,
    pub upper: f64,
    /// Number of stepsizes examined (`k >= 2`).
    pub checked: usize,
    /// `(k, 1/alpha_k)` outside `[lower, upper]`.
    pub violations: Vec<(usize, f64)>,
}

impl PropertyAReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn property_a_check(trace: &RunTrace, v: &[f64]) -> Result<PropertyAReport> {
    if v.is_empty() {
        return Err(Error::EmptyInput);
    }
    let lower = v.iter().cloned().fold(f64::INFINITY, f64::min);
    let upper = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut checked = 0;
    let mut violations = Vec::new();
    for r in trace.records.iter().filter(|r| r.k >= 2) {
        let Some(alpha) = r.alpha else { continue };
        checked += 1;
        let recip = 1.0 / alpha;
        if recip < lower * (1.0 - RECIPROCAL_SLACK) || recip > upper * (1.0 + RECIPROCAL_SLACK) {
            violations.push((r.k, recip));
        }
    }
    Ok(PropertyAReport { lower, upper, checked, violations })
}

/// Recorded gradients in the eigenbasis, components ordered by ascending
/// eigenvalue. Needs a trace run with `record_gradients`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenGradients {
    /// Eigenvalues in ascending order.
    pub eigenvalues: Vec<f64>,
    /// `grads[k - 1]` is `g_k`.
    pub grads: Vec<Vec<f64>>,
}

impl EigenGradients {
    pub fn from_trace(trace: &RunTrace, prob: &QuadraticProblem) -> Result<Self> {
        let recorded = trace.gradients.as_ref().ok_or(Error::MissingEigenbasis)?;
        let v = prob.eigenvalues();
        let mut order: Vec<usize> = (0..v.len()).collect();
        order.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        let grads = recorded
            .iter()
            .map(|g| {
                let e = prob.to_eigenbasis(g)?;
                Ok(order.iter().map(|&i| e[i]).collect())
            })
            .collect::<Result<Vec<Vec<f64>>>>()?;
        Ok(EigenGradients { eigenvalues: order.iter().map(|&i| v[i]).collect(), grads })
    }

    /// `G(k, l)`, 1-based `k`.
    pub fn partial_energy(&self, k: usize, l: usize) -> f64 {
        self.grads[k - 1][..l].iter().map(|c| c * c).sum()
    }

    /// Condition (ii) with `M2 = 2` for a single `(epsilon, l, m)`: at every
    /// `k >= 2` whose premise holds, `1/alpha_k >= (2/3) lambda_{l+1}` must
    /// hold too. Returns `(premises met, violations)`.
    pub fn condition_ii(&self, trace: &RunTrace, epsilon: f64, l: usize, m: usize) -> (usize, Vec<usize>) {
        const M2: f64 = 2.0;
        let threshold = 2.0 / 3.0 * self.eigenvalues[l];
        let mut met = 0;
        let mut violations = Vec::new();
        for r in trace.records.iter().filter(|r| r.k >= 2) {
            let Some(alpha) = r.alpha else { continue };
            let k = r.k;
            let premise = (0..k.min(m)).all(|j| {
                let kj = k - j;
                self.partial_energy(kj, l) <= epsilon && self.grads[kj - 1][l].powi(2) >= M2 * epsilon
            });
            if premise {
                met += 1;
                if 1.0 / alpha < threshold {
                    violations.push(k);
                }
            }
        }
        (met, violations)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{run_gradient_method, MethodId, RunConfig};
    use crate::SpectrumKind;

    #[test]
    fn sd_and_family_satisfy_condition_i() {
        let p = QuadraticProblem::generate(SpectrumKind::Set1, 30, 1e3, 5).unwrap();
        for m in [MethodId::Sd, MethodId::Bb1, MethodId::Bb2, MethodId::FamilyRandom, MethodId::Atc1] {
            let t = run_gradient_method(&p, &[1.0; 30], &RunConfig::new(m, 1e-8)).unwrap();
            let r = property_a_check(&t, p.eigenvalues()).unwrap();
            assert!(r.holds(), "{m}: {:?}", r.violations);
            assert!(r.checked > 0);
        }
    }

    #[test]
    fn full_partial_energy_is_squared_norm() {
        let p = QuadraticProblem::generate(SpectrumKind::Set3, 20, 1e2, 9).unwrap();
        let cfg = RunConfig::new(MethodId::Bb1, 1e-6).recording_gradients();
        let t = run_gradient_method(&p, &[1.0; 20], &cfg).unwrap();
        let e = EigenGradients::from_trace(&t, &p).unwrap();
        for r in &t.records {
            let g = e.partial_energy(r.k, 20);
            assert!((g - r.grad_norm.powi(2)).abs() <= 1e-12 * g);
        }
        assert!(e.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        let (_, violations) = e.condition_ii(&t, 1e-3, 5, 2);
        assert!(violations.is_empty());
    }

    #[test]
    fn missing_gradients() {
        let p = QuadraticProblem::generate(SpectrumKind::Set1, 10, 1e2, 1).unwrap();
        let t = run_gradient_method(&p, &[1.0; 10], &RunConfig::new(MethodId::Bb1, 1e-6)).unwrap();
        assert!(matches!(EigenGradients::from_trace(&t, &p), Err(Error::MissingEigenbasis)));
    }
}
