//! Two-dimensional model: `A = diag(1, lambda)`, `b = 0`.
//!
//! With `q_k = (g_k^(1))² / (g_k^(2))²` a family step with weight `gamma_k`
//! gives `q_{k+1} = h_k(q_{k-1})² q_k / q_{k-1}²`. In logarithms,
//! `M_k = log q_k` obeys `M_{k+1} = M_k - 2 M_{k-1} + 2 log h_k(q_{k-1})`,
//! and `xi_k = M_k + (theta - 1) M_{k-1}` with `theta² - theta + 2 = 0`
//! satisfies `xi_{k+1} = theta xi_k + 2 log h_k(q_{k-1})`.

use crate::error::{Error, Result};
use crate::problem::QuadraticProblem;
use crate::solver::{run_with_rule, RunConfig, MethodId, ScheduledFamily};

/// `theta = (1 + i sqrt 7) / 2`.
pub const THETA: (f64, f64) = (0.5, 1.322_875_655_532_295_3);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoDimState {
    pub lambda: f64,
    pub q_prev: f64,
    pub q_curr: f64,
}

impl TwoDimState {
    pub fn new(lambda: f64, q_prev: f64, q_curr: f64) -> Result<Self> {
        if !(lambda > 1.0) || !lambda.is_finite() {
            return Err(Error::InvalidConfig(format!("lambda must exceed 1, got {lambda}")));
        }
        for q in [q_prev, q_curr] {
            if !(q > 0.0) || !q.is_finite() {
                return Err(Error::InvalidConfig(format!("q must be positive and finite, got {q}")));
            }
        }
        Ok(TwoDimState { lambda, q_prev, q_curr })
    }
}

pub fn h_eval(lambda: f64, w: f64, gamma: f64) -> f64 {
    let long = gamma * (lambda * lambda + w);
    (long + (1.0 - gamma) * lambda * (lambda + w)) / (long + (1.0 - gamma) * (lambda + w))
}

/// `log h(exp(m))` without forming `exp(m)`, so `m` may be far outside the
/// range of `f64` exponents.
pub fn log_h(lambda: f64, m: f64, gamma: f64) -> f64 {
    if m <= 0.0 {
        return h_eval(lambda, m.exp(), gamma).ln();
    }
    // Divide numerator and denominator by w.
    let r = (-m).exp();
    let long = gamma * (lambda * lambda * r + 1.0);
    ((long + (1.0 - gamma) * lambda * (lambda * r + 1.0)) / (long + (1.0 - gamma) * (lambda * r + 1.0))).ln()
}

pub fn recurrence_q_step(state: &TwoDimState, gamma: f64) -> f64 {
    let h = h_eval(state.lambda, state.q_prev, gamma);
    h * h * state.q_curr / (state.q_prev * state.q_prev)
}

/// `M_{k+1}` from `M_k`, `M_{k-1}` and `gamma_k`.
pub fn recurrence_m_step(lambda: f64, m_prev: f64, m_curr: f64, gamma: f64) -> f64 {
    m_curr - 2.0 * m_prev + 2.0 * log_h(lambda, m_prev, gamma)
}

/// `M_1, ..., M_{len}` from `M_1`, `M_2` and `gamma_2, gamma_3, ...`.
pub fn m_sequence(lambda: f64, m1: f64, m2: f64, gammas: &[f64], len: usize) -> Vec<f64> {
    let mut m = vec![m1, m2];
    let mut k = 2;
    while m.len() < len {
        let g = gammas[k - 2];
        m.push(recurrence_m_step(lambda, m[k - 2], m[k - 1], g));
        k += 1;
    }
    m.truncate(len);
    m
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiRecord {
    pub k: usize,
    /// `M_k`.
    pub m: f64,
    pub xi_re: f64,
    pub xi_im: f64,
    /// `2 log lambda`.
    pub c1: f64,
}

impl XiRecord {
    pub fn modulus(&self) -> f64 {
        self.xi_re.hypot(self.xi_im)
    }

    /// `(sqrt 2 - 1) 2^{k/2} c1`.
    pub fn lower_bound(&self) -> f64 {
        (2f64.sqrt() - 1.0) * 2f64.powf(self.k as f64 / 2.0) * self.c1
    }

    pub fn bound_holds(&self) -> bool {
        self.modulus() >= self.lower_bound()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct XiReport {
    /// `xi_2, xi_3, ...`
    pub records: Vec<XiRecord>,
    /// `|xi_2| > 8 log lambda`.
    pub hypothesis_met: bool,
    /// `|xi_k| >= (sqrt 2 - 1) 2^{k/2} c1` for every reported `k`.
    pub bound_holds: bool,
}

/// `xi_k = M_k + (theta - 1) M_{k-1}` for `k >= 2`, where `m[0]` is `M_1`.
pub fn xi_sequence(m: &[f64], lambda: f64) -> Result<XiReport> {
    if m.len() < 2 {
        return Err(Error::TooShort { needed: 2, got: m.len() });
    }
    let c1 = 2.0 * lambda.ln();
    let records: Vec<XiRecord> = (1..m.len())
        .map(|i| XiRecord {
            k: i + 1,
            m: m[i],
            xi_re: m[i] + (THETA.0 - 1.0) * m[i - 1],
            xi_im: THETA.1 * m[i - 1],
            c1,
        })
        .collect();
    let hypothesis_met = records[0].modulus() > 8.0 * lambda.ln();
    let bound_holds = records.iter().all(XiRecord::bound_holds);
    Ok(XiReport { records, hypothesis_met, bound_holds })
}

/// Error-estimate level beyond which solver iterates are treated as
/// round-off dominated.
pub const ROUNDOFF_LIMIT: f64 = 1e-9;

/// Number of leading iterates of a two-dimensional diagonal run whose `q_k`
/// still follows the exact recurrence to about `limit`, taking `q_1`, `q_2`
/// as given.
///
/// First-order model: the update of component `i` rounds with a relative
/// error of a few `u` times `|alpha lambda_i| / |1 - alpha lambda_i|`, which
/// is large exactly when the step nearly annihilates that component. Errors
/// already present in `log q` propagate through the linearized recurrence
/// `dM_{k+1} = dM_k - 2 (1 - (log h)') dM_{k-1}`, bounded here by
/// `d_{k+1} = d_k + 4 d_{k-1} + 10 u amp_k`.
pub fn accurate_prefix(lambdas: &[f64], alphas: &[f64], limit: f64) -> usize {
    const U: f64 = f64::EPSILON / 2.0;
    let (mut d_prev, mut d) = (0.0, 0.0);
    // alphas[k - 1] maps x_k to x_{k+1}; the first step only produces the seed q_2.
    for (k, &alpha) in alphas.iter().enumerate().skip(1) {
        let amp = lambdas
            .iter()
            .map(|&l| (alpha * l).abs() / (1.0 - alpha * l).abs())
            .fold(0.0, f64::max);
        let next = d + 4.0 * d_prev + 10.0 * U * amp;
        if !(next <= limit) {
            // x_{k+2} (1-based) is the first unreliable iterate.
            return k + 1;
        }
        (d_prev, d) = (d, next);
    }
    alphas.len() + 1
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecurrenceCheck {
    /// Largest `|q_solver - q_recurrence| / q_recurrence`.
    pub max_deviation: f64,
    /// Number of `q_k`, `k >= 3`, that were compared.
    pub compared: usize,
}

/// Cross-check of the solver against the `q` recurrence on `diag(1, lambda)`.
///
/// The solver runs the family step with `gammas[k - 2]` at iteration `k >= 2`
/// (the first step is the exact line search). The recurrence starts from the
/// solver's `q_1`, `q_2`. Iterates are compared while `‖g_k‖ > 1e-12 ‖g_1‖`
/// and the [`accurate_prefix`] error estimate stays below [`ROUNDOFF_LIMIT`].
pub fn solver_vs_recurrence(prob: &QuadraticProblem, x1: &[f64], gammas: &[f64]) -> Result<RecurrenceCheck> {
    const CUTOFF: f64 = 1e-12;
    if prob.n() != 2 {
        return Err(Error::DimensionNotTwo(prob.n()));
    }
    let v = prob.eigenvalues();
    if prob.householder().is_some() || v[0] != 1.0 || !prob.b().iter().all(|&b| b == 0.0) {
        return Err(Error::InvalidConfig("expected diag(1, lambda) with b = 0".into()));
    }
    let lambda = v[1];
    if prob.gradient(x1)?.contains(&0.0) {
        return Err(Error::StartCondition("g_1 needs two nonzero components"));
    }
    let mut rule = ScheduledFamily::new(gammas.to_vec())?;
    let cfg = RunConfig::new(MethodId::FamilyFixed, CUTOFF)
        .with_max_iter(gammas.len() + 1)
        .recording_gradients();
    let trace = run_with_rule(prob, x1, &cfg, &mut rule)?;
    let grads = trace.gradients.as_ref().expect("gradients were requested");
    let g1 = trace.initial_grad_norm();
    let reliable = accurate_prefix(v, &trace.stepsizes(), ROUNDOFF_LIMIT);
    let live: Vec<&Vec<f64>> = grads
        .iter()
        .zip(&trace.records)
        .take(reliable)
        .take_while(|(_, r)| r.grad_norm > CUTOFF * g1)
        .map(|(g, _)| g)
        .collect();
    if live.len() < 2 {
        return Err(Error::TooShort { needed: 2, got: live.len() });
    }
    if live[1].contains(&0.0) {
        return Err(Error::StartCondition("g_2 needs two nonzero components"));
    }
    let q_solver: Vec<f64> = live.iter().map(|g| (g[0] * g[0]) / (g[1] * g[1])).collect();

    let mut state = TwoDimState::new(lambda, q_solver[0], q_solver[1])?;
    let mut worst: f64 = 0.0;
    for (i, &qs) in q_solver.iter().enumerate().skip(2) {
        // q_{i+1} (1-based) from gamma_i.
        let q = recurrence_q_step(&state, gammas[i - 2]);
        worst = worst.max((qs - q).abs() / q);
        state = TwoDimState { lambda, q_prev: state.q_curr, q_curr: q };
    }
    Ok(RecurrenceCheck { max_deviation: worst, compared: q_solver.len() - 2 })
}

fn log_sum_exp(a: f64, b: f64) -> f64 {
    let hi = a.max(b);
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    hi + ((a - hi).exp() + (b - hi).exp()).ln()
}

/// The family iteration on `diag(1, lambda)`, `b = 0`, carried out on
/// `log |g^(i)_k|`.
///
/// Both contraction factors have closed forms without cancellation,
/// `1 - alpha_k = (lambda - 1) N1 / D` and
/// `1 - lambda alpha_k = -(lambda - 1) q_{k-1} N2 / D`, with
/// `N1 = gamma (lambda² + q) + (1 - gamma) lambda (lambda + q)`,
/// `N2 = gamma (lambda² + q) + (1 - gamma) (lambda + q)` and
/// `D = (lambda + q)(lambda² + q)`, so the iterates can be followed far below
/// the range where double-precision vectors are dominated by round-off. The
/// first step is the exact line search, as in the solver; `gammas[k - 2]` is
/// used at iteration `k >= 2`.
///
/// Returns `[log |g^(1)_k|, log |g^(2)_k|]` for `k = 1, ..., gammas.len() + 2`.
pub fn log_gradient_trajectory(lambda: f64, g1: [f64; 2], gammas: &[f64]) -> Result<Vec<[f64; 2]>> {
    if !(lambda > 1.0) {
        return Err(Error::InvalidConfig(format!("lambda must exceed 1, got {lambda}")));
    }
    if g1[0] == 0.0 || g1[1] == 0.0 {
        return Err(Error::StartCondition("g_1 needs two nonzero components"));
    }
    let ll = lambda.ln();
    let lm1 = (lambda - 1.0).ln();
    let mut out = vec![[g1[0].abs().ln(), g1[1].abs().ln()]];
    // Exact line search: 1 - alpha = (lambda - 1) v² / (u² + lambda v²).
    let [a, b] = out[0];
    let den = log_sum_exp(2.0 * a, ll + 2.0 * b);
    out.push([a + lm1 + 2.0 * b - den, b + lm1 + 2.0 * a - den]);
    for &gamma in gammas {
        let k = out.len();
        let [ap, bp] = out[k - 2];
        let [a, b] = out[k - 1];
        let m = 2.0 * (ap - bp);
        let l_lq = log_sum_exp(ll, m);
        let l_l2q = log_sum_exp(2.0 * ll, m);
        let lg = gamma.ln();
        let lg1 = (1.0 - gamma).ln();
        let n1 = log_sum_exp(lg + l_l2q, lg1 + ll + l_lq);
        let n2 = log_sum_exp(lg + l_l2q, lg1 + l_lq);
        let d = l_lq + l_l2q;
        out.push([a + lm1 + n1 - d, b + m + lm1 + n2 - d]);
    }
    Ok(out)
}

/// `log ‖g_k‖` from log-components.
pub fn log_norms(traj: &[[f64; 2]]) -> Vec<f64> {
    traj.iter().map(|[a, b]| 0.5 * log_sum_exp(2.0 * a, 2.0 * b)).collect()
}
