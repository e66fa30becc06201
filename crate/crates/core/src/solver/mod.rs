//! Gradient iteration `x_{k+1} = x_k - alpha_k g_k` on a quadratic.
//!
//! The gradient is carried by the recurrence `g_{k+1} = g_k - alpha_k A g_k`,
//! so every iteration costs one Hessian product. That product also yields the
//! exact line-search step `g'g / g'Ag` and, with `s = -alpha g` and
//! `y = -alpha A g`, the pair products for the next BB-type step.

mod methods;
mod trace;

pub use methods::{
    abb_step, abbmin_step, baseline_alternate_or_cyclic, baseline_yuan, yuan_step, DyCycle, MethodId,
    MethodRule, ScheduledFamily,
};
pub use trace::{read_rows_csv, write_rows_csv, IterateState, Record, ResultRow, RunTrace, Termination};

use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, norm};
use crate::problem::QuadraticProblem;
use crate::stepsize::PairProducts;

pub const DEFAULT_MAX_ITER: usize = 20_000;

/// A step shorter than this multiple of `1 + ‖x‖` ends the run as stagnated.
pub const STAGNATION_TOL: f64 = 1e-16;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub method: MethodId,
    /// Relative tolerance: stop once `‖g_k‖ <= epsilon ‖g_1‖`.
    pub epsilon: f64,
    pub max_iter: usize,
    /// Cycle or window length; `None` picks the method default.
    pub m: Option<usize>,
    pub gamma: Option<f64>,
    /// Ratio threshold of ABB / ABBMIN1 / ABBMIN2.
    pub tau: Option<f64>,
    /// Number of exact steps per SDC cycle (default 8).
    pub sdc_h: Option<usize>,
    pub dy_cycle: DyCycle,
    pub seed: u64,
    /// Keep every gradient in the trace (needed by the eigenbasis checks).
    pub record_gradients: bool,
}

impl RunConfig {
    pub fn new(method: MethodId, epsilon: f64) -> Self {
        RunConfig {
            method,
            epsilon,
            max_iter: DEFAULT_MAX_ITER,
            m: None,
            gamma: None,
            tau: None,
            sdc_h: None,
            dy_cycle: DyCycle::default(),
            seed: 0,
            record_gradients: false,
        }
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_m(mut self, m: usize) -> Self {
        self.m = Some(m);
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = Some(gamma);
        self
    }

    pub fn with_tau(mut self, tau: f64) -> Self {
        self.tau = Some(tau);
        self
    }

    pub fn with_sdc(mut self, h: usize, m: usize) -> Self {
        self.sdc_h = Some(h);
        self.m = Some(m);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn recording_gradients(mut self) -> Self {
        self.record_gradients = true;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidConfig(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be >= 1".into()));
        }
        Ok(())
    }
}

/// What a stepsize rule sees at iteration `k >= 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepContext {
    pub k: usize,
    /// Products of `s_{k-1} = x_k - x_{k-1}` and `y_{k-1} = g_k - g_{k-1}`.
    pub pair: Option<PairProducts>,
    /// Exact line-search step at `x_k`.
    pub sd: f64,
    /// Minimal-gradient step at `x_k`.
    pub mg: f64,
    pub grad_norm: f64,
}

pub trait StepRule {
    fn next_step(&mut self, ctx: &StepContext) -> Result<f64>;

    /// Called once per iteration, including `k = 1`, with the step taken.
    fn accept(&mut self, ctx: &StepContext, alpha: f64);
}

/// Stepsize of the first iteration for every method: the exact line search.
pub fn first_stepsize(prob: &QuadraticProblem, g1: &[f64]) -> Result<f64> {
    prob.sd_stepsize(g1)
}

pub fn run_gradient_method(prob: &QuadraticProblem, x1: &[f64], cfg: &RunConfig) -> Result<RunTrace> {
    cfg.validate()?;
    let mut rule = MethodRule::new(cfg)?;
    run_with_rule(prob, x1, cfg, &mut rule)
}

/// Drive the iteration with any [`StepRule`]. Only `epsilon`, `max_iter` and
/// `record_gradients` are read from `cfg`.
pub fn run_with_rule(
    prob: &QuadraticProblem,
    x1: &[f64],
    cfg: &RunConfig,
    rule: &mut dyn StepRule,
) -> Result<RunTrace> {
    cfg.validate()?;
    let n = prob.n();
    if x1.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x1.len() });
    }
    let mut x = x1.to_vec();
    let mut g = prob.gradient(&x)?;
    let mut w = vec![0.0; n];
    let g1_norm = norm(&g);
    let target = cfg.epsilon * g1_norm;

    let mut records = Vec::new();
    let mut gradients = cfg.record_gradients.then(Vec::new);
    let mut pair: Option<PairProducts> = None;
    let mut k = 1;

    let termination = loop {
        let gnorm = norm(&g);
        // f = x'Ax/2 - b'x with Ax = g + b.
        let f = 0.5 * (dot(&x, &g) - dot(&x, prob.b()));
        if let Some(gs) = gradients.as_mut() {
            gs.push(g.clone());
        }
        let mut finish = |t| {
            records.push(Record { k, alpha: None, grad_norm: gnorm, f_value: f });
            t
        };
        if gnorm <= target {
            break finish(Termination::Converged);
        }
        if k > cfg.max_iter {
            break finish(Termination::MaxIter);
        }

        prob.hessian_apply_into(&g, &mut w)?;
        let gg = gnorm * gnorm;
        let gw = dot(&g, &w);
        let ww = dot(&w, &w);
        if !(gw > 0.0) || !(ww > 0.0) {
            break finish(Termination::Stagnated);
        }
        let ctx = StepContext { k, pair, sd: gg / gw, mg: gw / ww, grad_norm: gnorm };
        let alpha = if k == 1 { Ok(ctx.sd) } else { rule.next_step(&ctx) };
        let alpha = match alpha {
            Ok(a) if a.is_finite() && a > 0.0 => a,
            // Non-positive curvature or a degenerate pair can only come
            // from round-off this close to the solution.
            Ok(_) | Err(Error::CurvatureNonPositive { .. }) | Err(Error::DegeneratePair(_)) => {
                break finish(Termination::Stagnated)
            }
            Err(e) => return Err(e),
        };
        if alpha * gnorm <= STAGNATION_TOL * (1.0 + norm(&x)) {
            break finish(Termination::Stagnated);
        }

        records.push(Record { k, alpha: Some(alpha), grad_norm: gnorm, f_value: f });
        rule.accept(&ctx, alpha);
        axpy(-alpha, &g, &mut x);
        axpy(-alpha, &w, &mut g);
        let a2 = alpha * alpha;
        pair = Some(PairProducts::new(a2 * gg, a2 * gw, a2 * ww));
        k += 1;
    };

    let f = records.last().map_or(0.0, |r| r.f_value);
    Ok(RunTrace {
        records,
        termination,
        final_state: IterateState { x, g, k, f },
        gradients,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_converges_in_one_step() {
        let p = QuadraticProblem::diagonal(vec![1.0; 5], vec![1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        for m in MethodId::ALL {
            let cfg = RunConfig::new(m, 1e-12).with_gamma(0.5);
            let t = run_gradient_method(&p, &[0.0; 5], &cfg).unwrap();
            assert_eq!(t.iterations(), 1, "{m}");
            assert_eq!(t.records[0].alpha, Some(1.0));
            assert!(t.solved());
        }
    }

    #[test]
    fn start_at_minimizer() {
        let p = QuadraticProblem::diagonal(vec![1.0, 4.0], vec![2.0, 8.0]).unwrap();
        let t = run_gradient_method(&p, &[2.0, 2.0], &RunConfig::new(MethodId::Bb1, 1e-6)).unwrap();
        assert_eq!(t.iterations(), 0);
        assert_eq!(t.records.len(), 1);
        assert_eq!(t.termination, Termination::Converged);
    }

    #[test]
    fn first_step_is_exact_line_search() {
        let p = QuadraticProblem::diagonal(vec![1.0, 2.0], vec![0.0, 0.0]).unwrap();
        assert!((first_stepsize(&p, &[1.0, 1.0]).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!(matches!(first_stepsize(&p, &[0.0, 0.0]), Err(Error::ZeroGradient)));
    }

    #[test]
    fn invalid_config() {
        let p = QuadraticProblem::diagonal(vec![1.0, 2.0], vec![0.0, 0.0]).unwrap();
        assert!(run_gradient_method(&p, &[1.0, 1.0], &RunConfig::new(MethodId::Sd, 0.0)).is_err());
        assert!(run_gradient_method(&p, &[1.0, 1.0], &RunConfig::new(MethodId::Sd, 1e-3).with_max_iter(0)).is_err());
        assert!(matches!(
            run_gradient_method(&p, &[1.0], &RunConfig::new(MethodId::Sd, 1e-3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn max_iter_cap() {
        let p = QuadraticProblem::diagonal(vec![1.0, 1000.0], vec![0.0, 0.0]).unwrap();
        let t = run_gradient_method(&p, &[1.0, 1.0], &RunConfig::new(MethodId::Sd, 1e-12).with_max_iter(5)).unwrap();
        assert_eq!(t.termination, Termination::MaxIter);
        assert_eq!(t.iterations(), 5);
        assert_eq!(t.records.last().unwrap().k, 6);
    }
}
