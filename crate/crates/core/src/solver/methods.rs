//! Stepsize rules for every method the driver knows about.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::gamma::{self, AtcRefresh, StrategyState};
use crate::rng::{tag, Stream};
use crate::stepsize::{PairProducts, StepInterval};

use super::{RunConfig, StepContext, StepRule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MethodId {
    /// Exact line search every iteration.
    Sd,
    Bb1,
    Bb2,
    /// Geometric mean of the two BB steps every iteration.
    P,
    FamilyFixed,
    FamilyRandom,
    Atc,
    Atc1,
    Atc2,
    Atc3,
    Albb,
    Abb,
    Cbb1,
    Cbb2,
    Cp,
    Dy,
    AbbMin1,
    AbbMin2,
    Sdc,
}

impl MethodId {
    pub const ALL: [MethodId; 19] = [
        MethodId::Sd,
        MethodId::Bb1,
        MethodId::Bb2,
        MethodId::P,
        MethodId::FamilyFixed,
        MethodId::FamilyRandom,
        MethodId::Atc,
        MethodId::Atc1,
        MethodId::Atc2,
        MethodId::Atc3,
        MethodId::Albb,
        MethodId::Abb,
        MethodId::Cbb1,
        MethodId::Cbb2,
        MethodId::Cp,
        MethodId::Dy,
        MethodId::AbbMin1,
        MethodId::AbbMin2,
        MethodId::Sdc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MethodId::Sd => "SD",
            MethodId::Bb1 => "BB1",
            MethodId::Bb2 => "BB2",
            MethodId::P => "P",
            MethodId::FamilyFixed => "FAMILY_FIXED",
            MethodId::FamilyRandom => "FAMILY_RANDOM",
            MethodId::Atc => "ATC",
            MethodId::Atc1 => "ATC1",
            MethodId::Atc2 => "ATC2",
            MethodId::Atc3 => "ATC3",
            MethodId::Albb => "ALBB",
            MethodId::Abb => "ABB",
            MethodId::Cbb1 => "CBB1",
            MethodId::Cbb2 => "CBB2",
            MethodId::Cp => "CP",
            MethodId::Dy => "DY",
            MethodId::AbbMin1 => "ABBMIN1",
            MethodId::AbbMin2 => "ABBMIN2",
            MethodId::Sdc => "SDC",
        }
    }

    /// Methods whose stepsize always lies in `[bb2, bb1]` from `k = 2` on.
    pub fn is_family(self) -> bool {
        matches!(
            self,
            MethodId::Bb1
                | MethodId::Bb2
                | MethodId::P
                | MethodId::FamilyFixed
                | MethodId::FamilyRandom
                | MethodId::Atc
                | MethodId::Atc1
                | MethodId::Atc2
                | MethodId::Atc3
                | MethodId::Albb
                | MethodId::Abb
        )
    }

    /// Default cycle / window length, when the method has one.
    pub fn default_m(self) -> Option<usize> {
        match self {
            MethodId::Atc1 | MethodId::Atc2 | MethodId::Atc3 => Some(30),
            MethodId::Cbb1 => Some(3),
            MethodId::Cbb2 | MethodId::Cp => Some(4),
            MethodId::AbbMin1 | MethodId::AbbMin2 => Some(9),
            MethodId::Sdc => Some(6),
            _ => None,
        }
    }

    /// Default ratio threshold of the adaptive BB methods.
    pub fn default_tau(self) -> Option<f64> {
        match self {
            MethodId::Abb => Some(0.1),
            MethodId::AbbMin1 => Some(0.8),
            MethodId::AbbMin2 => Some(0.9),
            _ => None,
        }
    }
}

impl fmt::Display for MethodId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MethodId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_uppercase().replace('-', "_");
        let key = match key.as_str() {
            "BB" => "BB1",
            "RAND" | "RANDOM" => "FAMILY_RANDOM",
            "FIXED" | "FAMILY" => "FAMILY_FIXED",
            "ABBMIN_1" => "ABBMIN1",
            "ABBMIN_2" => "ABBMIN2",
            other => other,
        };
        MethodId::ALL
            .into_iter()
            .find(|m| m.name() == key)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown method '{s}'")))
    }
}

/// ALBB, CBB1, CBB2 and CP.
///
/// ALBB takes the long step at odd `k` and the short one at even `k`. The
/// cyclic methods compute their step when `k ≡ 1 (mod m)` and reuse `held`
/// otherwise.
pub fn baseline_alternate_or_cyclic(
    method: MethodId,
    k: usize,
    m: usize,
    held: f64,
    p: &PairProducts,
) -> Result<f64> {
    let refresh = (k - 1) % m.max(1) == 0;
    match method {
        MethodId::Albb => {
            if k % 2 == 1 {
                p.bb1()
            } else {
                p.bb2()
            }
        }
        MethodId::Cbb1 if refresh => p.bb1(),
        MethodId::Cbb2 if refresh => p.bb2(),
        MethodId::Cp if refresh => p.geomean(),
        MethodId::Cbb1 | MethodId::Cbb2 | MethodId::Cp => Ok(held),
        other => Err(Error::InvalidConfig(format!("{other} is not an alternate/cyclic method"))),
    }
}

/// ABB: short step when `bb2 / bb1 < tau`, long step otherwise.
pub fn abb_step(iv: &StepInterval, tau: f64) -> f64 {
    if iv.bb2 / iv.bb1 < tau {
        iv.bb2
    } else {
        iv.bb1
    }
}

/// ABBmin: the smallest short step in `window` when `bb2 / bb1 < tau`,
/// the long step otherwise. `window` must already contain the current `bb2`.
pub fn abbmin_step(iv: &StepInterval, tau: f64, window: &VecDeque<f64>) -> f64 {
    if iv.bb2 / iv.bb1 < tau {
        window.iter().cloned().fold(iv.bb2, f64::min)
    } else {
        iv.bb1
    }
}

/// Yuan's stepsize from two consecutive exact line-search steps:
///
/// ```text
/// 2 / ( sqrt((1/sd_prev - 1/sd)² + 4 ‖g‖² / (sd_prev ‖g_prev‖)²) + 1/sd_prev + 1/sd )
/// ```
pub fn yuan_step(sd_prev: f64, sd: f64, gnorm_prev: f64, gnorm: f64) -> f64 {
    let (a, b) = (1.0 / sd_prev, 1.0 / sd);
    let r = gnorm / (sd_prev * gnorm_prev);
    2.0 / (((a - b) * (a - b) + 4.0 * r * r).sqrt() + a + b)
}

/// Exact-step history the Yuan-type methods draw on: `(alpha_sd, ‖g‖)` of
/// recent iterates, oldest first.
pub fn baseline_yuan(history: &[(f64, f64)]) -> Result<f64> {
    match history {
        [.., (sd_prev, g_prev), (sd, g)] => Ok(yuan_step(*sd_prev, *sd, *g_prev, *g)),
        _ => Err(Error::InsufficientHistory("Yuan step needs two exact steps")),
    }
}

/// Where the Dai-Yuan method places its exact steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum DyCycle {
    /// Two exact steps, then two Yuan steps (`k mod 4` in {1, 2} exact).
    #[default]
    TwoTwo,
    /// Exact step at odd `k`, Yuan step at even `k`.
    Alternate,
}

impl DyCycle {
    pub fn exact_step_at(self, k: usize) -> bool {
        match self {
            DyCycle::TwoTwo => (k - 1) % 4 < 2,
            DyCycle::Alternate => k % 2 == 1,
        }
    }
}

/// Stateful rule for a [`MethodId`].
#[derive(Debug, Clone)]
pub struct MethodRule {
    method: MethodId,
    m: usize,
    tau: f64,
    sdc_h: usize,
    dy_cycle: DyCycle,
    state: StrategyState,
    bb2_window: VecDeque<f64>,
    /// `(alpha_sd, ‖g‖)` of the last two iterates.
    sd_history: VecDeque<(f64, f64)>,
    yuan_hold: f64,
}

impl MethodRule {
    pub fn new(cfg: &RunConfig) -> Result<Self> {
        let method = cfg.method;
        let m = cfg.m.or(method.default_m()).unwrap_or(1);
        if m == 0 {
            return Err(Error::InvalidConfig("cycle length m must be >= 1".into()));
        }
        let tau = cfg.tau.or(method.default_tau()).unwrap_or(0.0);
        let sdc_h = cfg.sdc_h.unwrap_or(8);
        if method == MethodId::Sdc && sdc_h < 2 {
            return Err(Error::InvalidConfig("SDC needs h >= 2 exact steps per cycle".into()));
        }
        let mut state = StrategyState::new(m, Stream::derive(cfg.seed, tag::GAMMA));
        if method == MethodId::FamilyFixed {
            let g = cfg.gamma.ok_or(Error::MissingParameter("gamma for FAMILY_FIXED"))?;
            if !(0.0..=1.0).contains(&g) {
                return Err(Error::GammaOutOfRange(g));
            }
            state = state.with_fixed_gamma(g);
        }
        Ok(MethodRule {
            method,
            m,
            tau,
            sdc_h,
            dy_cycle: cfg.dy_cycle,
            state,
            bb2_window: VecDeque::with_capacity(m + 1),
            sd_history: VecDeque::with_capacity(3),
            yuan_hold: f64::NAN,
        })
    }

    pub fn method(&self) -> MethodId {
        self.method
    }

    pub fn cycle_length(&self) -> usize {
        self.m
    }

    pub fn threshold(&self) -> f64 {
        self.tau
    }

    fn pair(ctx: &StepContext) -> Result<PairProducts> {
        ctx.pair.ok_or(Error::InsufficientHistory("no gradient pair at k = 1"))
    }

    fn push_bb2(&mut self, bb2: f64) {
        if self.bb2_window.len() == self.m {
            self.bb2_window.pop_front();
        }
        self.bb2_window.push_back(bb2);
    }
}

impl StepRule for MethodRule {
    fn next_step(&mut self, ctx: &StepContext) -> Result<f64> {
        debug_assert_eq!(ctx.k, self.state.k);
        let prev = self.state.prev_alpha.unwrap_or(ctx.sd);
        match self.method {
            MethodId::Sd => Ok(ctx.sd),
            MethodId::Bb1 => Self::pair(ctx)?.bb1(),
            MethodId::Bb2 => Self::pair(ctx)?.bb2(),
            MethodId::P => Self::pair(ctx)?.geomean(),
            MethodId::FamilyFixed => {
                let iv = Self::pair(ctx)?.interval()?;
                iv.family_step(gamma::gamma_fixed(&self.state)?)
            }
            MethodId::FamilyRandom => {
                let iv = Self::pair(ctx)?.interval()?;
                let g = gamma::gamma_random(&mut self.state);
                iv.family_step(g)
            }
            MethodId::Atc => {
                let iv = Self::pair(ctx)?.interval()?;
                gamma::atc_step(&self.state, &iv)
            }
            MethodId::Atc1 | MethodId::Atc2 | MethodId::Atc3 => {
                let p = Self::pair(ctx)?;
                let iv = p.interval()?;
                let refresh = match self.method {
                    MethodId::Atc1 => AtcRefresh::Long,
                    MethodId::Atc2 => AtcRefresh::Short,
                    _ => AtcRefresh::GeometricMean,
                };
                gamma::atc_variant_step(refresh, &self.state, &iv, &p)
            }
            MethodId::Albb | MethodId::Cbb1 | MethodId::Cbb2 | MethodId::Cp => {
                let p = Self::pair(ctx)?;
                baseline_alternate_or_cyclic(self.method, ctx.k, self.m, prev, &p)
            }
            MethodId::Abb => Ok(abb_step(&Self::pair(ctx)?.interval()?, self.tau)),
            MethodId::AbbMin1 => {
                let iv = Self::pair(ctx)?.interval()?;
                self.push_bb2(iv.bb2);
                Ok(abbmin_step(&iv, self.tau, &self.bb2_window))
            }
            MethodId::AbbMin2 => {
                // Variable threshold: shrink by 1.1 after a short step, grow
                // by 1.1 after a long one.
                let iv = Self::pair(ctx)?.interval()?;
                self.push_bb2(iv.bb2);
                let short = iv.bb2 / iv.bb1 < self.tau;
                let alpha = abbmin_step(&iv, self.tau, &self.bb2_window);
                self.tau = if short { self.tau / 1.1 } else { self.tau * 1.1 };
                Ok(alpha)
            }
            MethodId::Dy => {
                if self.dy_cycle.exact_step_at(ctx.k) {
                    Ok(ctx.sd)
                } else {
                    let prev = *self
                        .sd_history
                        .back()
                        .ok_or(Error::InsufficientHistory("DY needs the previous exact step"))?;
                    baseline_yuan(&[prev, (ctx.sd, ctx.grad_norm)])
                }
            }
            MethodId::Sdc => {
                let pos = (ctx.k - 1) % (self.sdc_h + self.m);
                if pos < self.sdc_h {
                    Ok(ctx.sd)
                } else {
                    if pos == self.sdc_h {
                        let h: Vec<(f64, f64)> = self.sd_history.iter().cloned().collect();
                        self.yuan_hold = baseline_yuan(&h)?;
                    }
                    Ok(self.yuan_hold)
                }
            }
        }
    }

    fn accept(&mut self, ctx: &StepContext, alpha: f64) {
        if self.sd_history.len() == 2 {
            self.sd_history.pop_front();
        }
        self.sd_history.push_back((ctx.sd, ctx.grad_norm));
        self.state.advance(alpha);
    }
}

/// Family stepsize with an externally supplied `gamma_k` for `k = 2, 3, ...`.
#[derive(Debug, Clone)]
pub struct ScheduledFamily {
    gammas: Vec<f64>,
}

impl ScheduledFamily {
    pub fn new(gammas: Vec<f64>) -> Result<Self> {
        if let Some(&g) = gammas.iter().find(|g| !(0.0..=1.0).contains(*g)) {
            return Err(Error::GammaOutOfRange(g));
        }
        Ok(ScheduledFamily { gammas })
    }
}

impl StepRule for ScheduledFamily {
    fn next_step(&mut self, ctx: &StepContext) -> Result<f64> {
        let g = *self
            .gammas
            .get(ctx.k - 2)
            .ok_or(Error::InsufficientHistory("gamma schedule exhausted"))?;
        let iv = ctx
            .pair
            .ok_or(Error::InsufficientHistory("no gradient pair at k = 1"))?
            .interval()?;
        iv.family_step(g)
    }

    fn accept(&mut self, _ctx: &StepContext, _alpha: f64) {}
}
