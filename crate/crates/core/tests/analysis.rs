use spectral_core::analysis::*;
use spectral_core::problem::QuadraticProblem;
use spectral_core::rng::{tag, Stream};
use spectral_core::solver::{run_gradient_method, MethodId, RunConfig};
use spectral_core::{Error, SpectrumKind};

fn diag2(lambda: f64) -> QuadraticProblem {
    QuadraticProblem::diagonal(vec![1.0, lambda], vec![0.0, 0.0]).unwrap()
}

#[test]
fn h_is_increasing_in_w() {
    let mut rng = Stream::new(17);
    for _ in 0..1000 {
        let lambda = 1.0 + rng.uniform(0.01, 1e3);
        let gamma = rng.open01();
        let w = rng.uniform(0.0, 1e3);
        let dw = 1e-6 * (1.0 + w);
        // Sign of the difference quotient, computed without cancellation in
        // the numerator: h(w + dw) - h(w) has the sign of
        // N(w + dw) D(w) - N(w) D(w + dw).
        let n = |w: f64| gamma * (lambda * lambda + w) + (1.0 - gamma) * lambda * (lambda + w);
        let d = |w: f64| gamma * (lambda * lambda + w) + (1.0 - gamma) * (lambda + w);
        let cross = n(w + dw) * d(w) - n(w) * d(w + dw);
        assert!(cross > 0.0, "lambda={lambda} gamma={gamma} w={w}");
        assert!(h_eval(lambda, w + 1.0, gamma) >= h_eval(lambda, w, gamma));
    }
}

#[test]
fn h_stays_strictly_inside_its_bounds() {
    let mut rng = Stream::new(3);
    for _ in 0..2000 {
        let lambda = 1.0 + rng.uniform(0.1, 1e4);
        let gamma = rng.uniform(0.01, 0.99);
        let w = rng.uniform(0.0, 1e6);
        let h = h_eval(lambda, w, gamma);
        let lo = lambda / (gamma * lambda + 1.0 - gamma);
        let hi = gamma + (1.0 - gamma) * lambda;
        assert!(h > lo && h < hi, "{lo} < {h} < {hi}");
    }
}

#[test]
fn recurrence_identities() {
    let theta = THETA;
    let mut rng = Stream::new(99);
    for _ in 0..50 {
        let lambda = rng.uniform(2.0, 50.0);
        let mut state = TwoDimState::new(lambda, rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0)).unwrap();
        let mut m = vec![state.q_prev.ln(), state.q_curr.ln()];
        for _ in 0..6 {
            let gamma = rng.open01();
            let q_next = recurrence_q_step(&state, gamma);
            let (m_prev, m_curr) = (m[m.len() - 2], m[m.len() - 1]);
            let lh = log_h(lambda, m_prev, gamma);
            let m_next = recurrence_m_step(lambda, m_prev, m_curr, gamma);
            assert!((q_next.ln() - m_next).abs() <= 1e-12 * (1.0 + m_next.abs()));
            assert!((m_next - (m_curr - 2.0 * m_prev + 2.0 * lh)).abs() <= 1e-12 * (1.0 + m_next.abs()));

            // xi_{k+1} = theta xi_k + 2 log h
            let xi_k = (m_curr + (theta.0 - 1.0) * m_prev, theta.1 * m_prev);
            let xi_next = (m_next + (theta.0 - 1.0) * m_curr, theta.1 * m_curr);
            let rhs = (theta.0 * xi_k.0 - theta.1 * xi_k.1 + 2.0 * lh, theta.0 * xi_k.1 + theta.1 * xi_k.0);
            let scale = 1.0 + xi_next.0.abs() + xi_next.1.abs();
            assert!((xi_next.0 - rhs.0).abs() <= 1e-12 * scale);
            assert!((xi_next.1 - rhs.1).abs() <= 1e-12 * scale);

            m.push(m_next);
            state = TwoDimState { lambda, q_prev: state.q_curr, q_curr: q_next };
        }
    }
}

#[test]
fn solver_agrees_with_q_recurrence() {
    let p = diag2(100.0);
    for gamma in [1.0, 0.0, 0.5] {
        let c = solver_vs_recurrence(&p, &[1.0, 0.3], &[gamma; 30]).unwrap();
        assert!(c.max_deviation <= 1e-8, "gamma={gamma}: {c:?}");
        assert!(c.compared >= 1);
    }
    let mut rng = Stream::new(5);
    let gammas: Vec<f64> = (0..30).map(|_| rng.open01()).collect();
    assert!(solver_vs_recurrence(&p, &[-2.0, 0.7], &gammas).unwrap().max_deviation <= 1e-8);
}

#[test]
fn recurrence_check_rejects_bad_starts() {
    let p = diag2(100.0);
    assert!(matches!(solver_vs_recurrence(&p, &[0.0, 1.0], &[1.0; 10]), Err(Error::StartCondition(_))));
    let p3 = QuadraticProblem::diagonal(vec![1.0, 2.0, 3.0], vec![0.0; 3]).unwrap();
    assert!(matches!(solver_vs_recurrence(&p3, &[1.0; 3], &[1.0; 10]), Err(Error::DimensionNotTwo(3))));
}

#[test]
fn xi_growth_bound_along_recurrence() {
    let lambda = 1e3;
    let mut qualifying = 0;
    for seed in 0..50 {
        let mut rng = Stream::new(seed);
        let m1 = rng.uniform(-60.0, 60.0);
        let m2 = rng.uniform(-60.0, 60.0);
        let gammas: Vec<f64> = (0..40).map(|_| rng.open01()).collect();
        let m = m_sequence(lambda, m1, m2, &gammas, 40);
        let r = xi_sequence(&m, lambda).unwrap();
        if r.hypothesis_met {
            qualifying += 1;
            assert!(r.bound_holds, "seed {seed}");
            assert_eq!(r.records.last().unwrap().k, 40);
        }
    }
    assert!(qualifying > 10);
}

#[test]
fn log_trajectory_tracks_solver_before_round_off() {
    let lambda = 1e3;
    let p = diag2(lambda);
    let mut compared = 0;
    for seed in 0..10 {
        let mut start = Stream::derive(seed, tag::START);
        let x1 = [start.uniform(-10.0, 10.0), start.uniform(-10.0, 10.0)];
        let cfg = RunConfig::new(MethodId::FamilyRandom, 1e-8).with_seed(seed);
        let t = run_gradient_method(&p, &x1, &cfg).unwrap();
        let mut gs = Stream::derive(seed, tag::GAMMA);
        let gammas: Vec<f64> = (0..t.records.len()).map(|_| gs.open01()).collect();
        let l = log_norms(&log_gradient_trajectory(lambda, [x1[0], lambda * x1[1]], &gammas).unwrap());
        let reliable = accurate_prefix(&[1.0, lambda], &t.stepsizes(), 1e-7);
        for r in &t.records[..reliable.min(t.records.len())] {
            assert!((r.grad_norm.ln() - l[r.k - 1]).abs() < 1e-6, "seed {seed} k {}", r.k);
            compared += 1;
        }
    }
    assert!(compared >= 25, "{compared}");
}

#[test]
fn bb1_two_dimensional_superlinear_shape() {
    let lambda = 1e3;
    let t = run_gradient_method(&diag2(lambda), &[3.0, -0.007], &RunConfig::new(MethodId::Bb1, 1e-12)).unwrap();
    let r = superlinear_envelope_check(&t, lambda).unwrap();
    assert!(!r.rows.is_empty());
    assert!(r.ratios().iter().all(|&x| x >= 0.0));
    assert!(*r.ratios().last().unwrap() < 1.0);

    let l = log_norms(&log_gradient_trajectory(lambda, [3.0, -7.0], &[1.0; 40]).unwrap());
    let w = window_log_ratios(&l, 5, 3).unwrap();
    assert!(w.iter().all(|&x| x < 0.0));
    assert!(strictly_decreasing(&w), "{w:?}");
}

#[test]
fn bb1_is_r_linear_on_set1() {
    let p = QuadraticProblem::generate(SpectrumKind::Set1, 100, 1e4, 12).unwrap();
    let t = run_gradient_method(&p, &[1.0; 100], &RunConfig::new(MethodId::Bb1, 1e-9)).unwrap();
    let fit = rlinear_fit(&t).unwrap();
    assert!(fit.rate < 1.0 && fit.rate > 0.0);
    assert!(fit.quality.is_finite());
}

#[test]
fn profile_of_real_runs_is_monotone() {
    let mut rows = Vec::new();
    for seed in 0..5 {
        let p = QuadraticProblem::generate(SpectrumKind::Set2, 60, 1e3, seed).unwrap();
        for m in [MethodId::Bb1, MethodId::Bb2, MethodId::Atc1, MethodId::Sd] {
            let t = run_gradient_method(&p, &[1.0; 60], &RunConfig::new(m, 1e-6).with_max_iter(300)).unwrap();
            rows.push(t.to_row(&format!("set2-s{seed}"), m.name(), 1e-6, 1e3, 60, seed));
        }
    }
    for c in performance_profile(&rows, &default_rho_grid()).unwrap() {
        assert!(c.points.windows(2).all(|w| w[0].1 <= w[1].1));
        assert!(c.points.iter().all(|p| (0.0..=1.0).contains(&p.1)));
    }
}
