//! Rules for choosing the family weight `gamma_k`.
//!
//! The cyclic rule picks the member of the family closest to the previous
//! stepsize; composing it with [`StepInterval::family_step`] gives the
//! adaptive truncated cyclic (ATC) step, which [`atc_step`] computes directly.
//! The ATC1/ATC2/ATC3 variants replace it every `m` iterations with the long
//! BB step, the short BB step, or their geometric mean.

use crate::error::{Error, Result};
use crate::rng::Stream;
use crate::stepsize::{PairProducts, StepInterval};

/// Per-run mutable state shared by the `gamma` rules.
#[derive(Debug, Clone)]
pub struct StrategyState {
    /// `alpha_{k-1}`, the stepsize used at the previous iteration.
    pub prev_alpha: Option<f64>,
    /// 1-based iteration counter.
    pub k: usize,
    /// Cycle length of the refreshed ATC variants.
    pub m: usize,
    pub fixed_gamma: Option<f64>,
    pub rng: Stream,
}

impl StrategyState {
    pub fn new(m: usize, rng: Stream) -> Self {
        StrategyState {
            prev_alpha: None,
            k: 1,
            m: m.max(1),
            fixed_gamma: None,
            rng,
        }
    }

    pub fn with_fixed_gamma(mut self, gamma: f64) -> Self {
        self.fixed_gamma = Some(gamma);
        self
    }

    /// Record the stepsize taken at the current iteration and move to the next.
    pub fn advance(&mut self, alpha: f64) {
        debug_assert!(alpha > 0.0);
        self.prev_alpha = Some(alpha);
        self.k += 1;
    }

    fn prev(&self) -> Result<f64> {
        self.prev_alpha
            .ok_or(Error::MissingParameter("previous stepsize"))
    }
}

/// Which stepsize refreshes the ATC cycle every `m` iterations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AtcRefresh {
    /// ATC1: long BB step.
    Long,
    /// ATC2: short BB step.
    Short,
    /// ATC3: geometric mean of the two.
    GeometricMean,
}

pub fn gamma_fixed(state: &StrategyState) -> Result<f64> {
    let g = state
        .fixed_gamma
        .ok_or(Error::MissingParameter("fixed gamma"))?;
    if !(0.0..=1.0).contains(&g) {
        return Err(Error::GammaOutOfRange(g));
    }
    Ok(g)
}

/// One uniform draw from the open interval (0, 1).
pub fn gamma_random(state: &mut StrategyState) -> f64 {
    state.rng.open01()
}

/// `gamma` whose family member is closest to the previous stepsize.
pub fn gamma_cyclic(state: &StrategyState, iv: &StepInterval) -> Result<f64> {
    let prev = state.prev()?;
    if iv.is_degenerate() {
        return Ok(1.0);
    }
    Ok(((prev - iv.bb2) / (iv.bb1 - iv.bb2)).clamp(0.0, 1.0))
}

/// Previous stepsize truncated into `[bb2, bb1]`.
pub fn atc_step(state: &StrategyState, iv: &StepInterval) -> Result<f64> {
    let prev = state.prev()?;
    Ok(if prev <= iv.bb2 {
        iv.bb2
    } else if prev >= iv.bb1 {
        iv.bb1
    } else {
        prev
    })
}

pub fn is_refresh(state: &StrategyState) -> bool {
    state.k % state.m == 0
}

pub fn atc_variant_step(
    refresh: AtcRefresh,
    state: &StrategyState,
    iv: &StepInterval,
    p: &PairProducts,
) -> Result<f64> {
    // The truncation needs alpha_{k-1} on every iteration, refresh or not.
    let reuse = atc_step(state, iv)?;
    if !is_refresh(state) {
        return Ok(reuse);
    }
    match refresh {
        AtcRefresh::Long => Ok(iv.bb1),
        AtcRefresh::Short => Ok(iv.bb2),
        AtcRefresh::GeometricMean => p.geomean(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn state(prev: Option<f64>, k: usize, m: usize) -> StrategyState {
        let mut s = StrategyState::new(m, Stream::new(1));
        s.prev_alpha = prev;
        s.k = k;
        s
    }

    fn iv(bb1: f64, bb2: f64) -> StepInterval {
        StepInterval::new(bb1, bb2).unwrap()
    }

    #[test]
    fn fixed_gamma_independent_of_k() {
        let mut s = state(None, 1, 5).with_fixed_gamma(0.9);
        for k in 1..50 {
            s.k = k;
            assert_eq!(gamma_fixed(&s).unwrap(), 0.9);
        }
        assert!(matches!(
            gamma_fixed(&state(None, 1, 5)),
            Err(Error::MissingParameter(_))
        ));
    }

    #[test]
    fn random_gamma_determinism_and_mean() {
        let mut a = state(None, 1, 1);
        let mut b = state(None, 1, 1);
        for _ in 0..100 {
            assert_eq!(gamma_random(&mut a), gamma_random(&mut b));
        }
        let mut s = StrategyState::new(1, Stream::new(2024));
        let n = 100_000;
        let mut sum = 0.0;
        for _ in 0..n {
            let g = gamma_random(&mut s);
            assert!(g > 0.0 && g < 1.0);
            sum += g;
        }
        let mean = sum / n as f64;
        assert!((mean - 0.5).abs() < 0.01, "mean {mean}");
        assert_eq!(s.rng.position(), n as u64);
    }

    #[test]
    fn cyclic_truncation() {
        let i = iv(0.9, 0.3);
        assert_eq!(gamma_cyclic(&state(Some(0.2), 2, 1), &i).unwrap(), 0.0);
        assert_eq!(gamma_cyclic(&state(Some(0.3), 2, 1), &i).unwrap(), 0.0);
        assert_eq!(gamma_cyclic(&state(Some(1.2), 2, 1), &i).unwrap(), 1.0);
        assert!((gamma_cyclic(&state(Some(0.6), 2, 1), &i).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(gamma_cyclic(&state(Some(0.6), 2, 1), &iv(0.4, 0.4)).unwrap(), 1.0);
        assert!(gamma_cyclic(&state(None, 2, 1), &i).is_err());
    }

    #[test]
    fn atc_branches() {
        let i = iv(0.9, 0.3);
        assert_eq!(atc_step(&state(Some(0.2), 2, 1), &i).unwrap(), 0.3);
        assert_eq!(atc_step(&state(Some(1.2), 2, 1), &i).unwrap(), 0.9);
        assert_eq!(atc_step(&state(Some(0.5), 2, 1), &i).unwrap(), 0.5);
        assert!(matches!(
            atc_step(&state(None, 2, 1), &i),
            Err(Error::MissingParameter(_))
        ));
    }

    #[test]
    fn atc_variant_refresh() {
        let p = PairProducts::new(2.0, 3.0, 5.0);
        let i = p.interval().unwrap();
        let m = 4;
        let s = state(Some(0.61), m, m);
        assert_eq!(atc_variant_step(AtcRefresh::Long, &s, &i, &p).unwrap(), i.bb1);
        assert_eq!(atc_variant_step(AtcRefresh::Short, &s, &i, &p).unwrap(), i.bb2);
        assert_eq!(
            atc_variant_step(AtcRefresh::GeometricMean, &s, &i, &p).unwrap(),
            p.geomean().unwrap()
        );
        let s = state(Some(0.61), m + 1, m);
        for r in [AtcRefresh::Long, AtcRefresh::Short, AtcRefresh::GeometricMean] {
            assert_eq!(atc_variant_step(r, &s, &i, &p).unwrap(), 0.61);
        }
    }

    proptest! {
        #[test]
        fn prop_cyclic_then_family_is_atc(
            bb2 in 0.01f64..10.0, ratio in 1.0f64..100.0, prev in 0.001f64..1000.0
        ) {
            let i = iv(bb2 * ratio, bb2);
            let s = state(Some(prev), 3, 1);
            let via_gamma = i.family_step(gamma_cyclic(&s, &i).unwrap()).unwrap();
            let direct = atc_step(&s, &i).unwrap();
            prop_assert!((via_gamma - direct).abs() <= 1e-14 * direct);
        }

        #[test]
        fn prop_variant_outputs_in_interval(
            s1 in -5.0f64..5.0, s2 in -5.0f64..5.0, d1 in 0.1f64..50.0, d2 in 0.1f64..50.0,
            prev in 0.001f64..100.0, k in 2usize..100, m in 1usize..12
        ) {
            prop_assume!(s1.abs() + s2.abs() > 1e-3);
            let p = PairProducts::new(s1 * s1 + s2 * s2, d1 * s1 * s1 + d2 * s2 * s2, d1 * d1 * s1 * s1 + d2 * d2 * s2 * s2);
            let i = p.interval().unwrap();
            prop_assume!(!i.is_degenerate());
            let st = state(Some(prev), k, m);
            for r in [AtcRefresh::Long, AtcRefresh::Short, AtcRefresh::GeometricMean] {
                let a = atc_variant_step(r, &st, &i, &p).unwrap();
                prop_assert!(a >= i.bb2 * (1.0 - 1e-15) && a <= i.bb1 * (1.0 + 1e-15));
                let refreshed = k % m == 0;
                let reuse = atc_step(&st, &i).unwrap();
                if !refreshed {
                    prop_assert_eq!(a, reuse);
                }
            }
        }
    }
}
