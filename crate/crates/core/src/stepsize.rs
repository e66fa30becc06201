//! Barzilai–Borwein stepsizes and the one-parameter family between them.
//!
//! For a displacement `s` and gradient difference `y` with `s·y > 0` the long
//! step `bb1 = s·s / s·y` and the short step `bb2 = s·y / y·y` bracket every
//! member `gamma * bb1 + (1 - gamma) * bb2` of the family. Each member is the
//! minimizer on `[bb2, bb1]` of the combined secant residual
//!
//! ```text
//! phi_tau(a) = ‖tau (s / a - y) + (1 - tau) (s - a y)‖²
//! ```
//!
//! for a matching weight `tau`, which [`StepInterval::tau_for_gamma`] returns.

use crate::error::{Error, Result};
use crate::linalg::dot;

/// Relative threshold below which `s·y` is treated as non-positive.
pub const CURVATURE_GUARD: f64 = 1e-30;

/// Absolute tolerance of the bracketing phase of [`PairProducts::root_for_tau`],
/// relative to `bb1`.
pub const ROOT_TOL: f64 = 1e-13;

/// The three inner products every stepsize formula is built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairProducts {
    pub ss: f64,
    pub sy: f64,
    pub yy: f64,
}

/// An iterate displacement `s = x_k - x_{k-1}` and gradient difference
/// `y = g_k - g_{k-1}`, with cached inner products.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientPair {
    s: Vec<f64>,
    y: Vec<f64>,
    products: PairProducts,
}

impl GradientPair {
    pub fn new(s: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if s.len() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: s.len(),
                got: y.len(),
            });
        }
        if s.is_empty() {
            return Err(Error::DegeneratePair("empty vectors"));
        }
        let products = PairProducts {
            ss: dot(&s, &s),
            sy: dot(&s, &y),
            yy: dot(&y, &y),
        };
        Ok(GradientPair { s, y, products })
    }

    pub fn s(&self) -> &[f64] {
        &self.s
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn dim(&self) -> usize {
        self.s.len()
    }

    pub fn products(&self) -> PairProducts {
        self.products
    }
}

impl From<&GradientPair> for PairProducts {
    fn from(p: &GradientPair) -> Self {
        p.products
    }
}

impl PairProducts {
    pub fn new(ss: f64, sy: f64, yy: f64) -> Self {
        PairProducts { ss, sy, yy }
    }

    fn check_curvature(&self) -> Result<()> {
        if self.sy <= CURVATURE_GUARD * self.ss.max(self.yy) || self.sy.is_nan() {
            return Err(Error::CurvatureNonPositive { sy: self.sy });
        }
        Ok(())
    }

    /// Long BB stepsize `s·s / s·y`.
    pub fn bb1(&self) -> Result<f64> {
        if self.ss == 0.0 {
            return Err(Error::DegeneratePair("s = 0"));
        }
        self.check_curvature()?;
        Ok(self.ss / self.sy)
    }

    /// Short BB stepsize `s·y / y·y`.
    pub fn bb2(&self) -> Result<f64> {
        self.check_curvature()?;
        Ok(self.sy / self.yy)
    }

    /// `‖s‖ / ‖y‖`, the geometric mean of the two BB stepsizes.
    pub fn geomean(&self) -> Result<f64> {
        if self.ss == 0.0 {
            return Err(Error::DegeneratePair("s = 0"));
        }
        if self.yy == 0.0 {
            return Err(Error::DegeneratePair("y = 0"));
        }
        Ok(self.ss.sqrt() / self.yy.sqrt())
    }

    pub fn interval(&self) -> Result<StepInterval> {
        Ok(StepInterval {
            bb1: self.bb1()?,
            bb2: self.bb2()?,
        })
    }

    /// Scaled derivative `psi(tau, a) = a³ phi'_tau(a) / (2 (tau + (1 - tau) a))`,
    /// evaluated in the factored form
    /// `(1 - tau) yy (a³ - a² bb2) + tau sy (a - bb1)`.
    pub fn psi(&self, tau: f64, alpha: f64) -> Result<f64> {
        let iv = self.interval()?;
        Ok(self.psi_with(&iv, tau, alpha))
    }

    #[inline]
    fn psi_with(&self, iv: &StepInterval, tau: f64, alpha: f64) -> f64 {
        (1.0 - tau) * self.yy * (alpha * alpha * (alpha - iv.bb2)) + tau * self.sy * (alpha - iv.bb1)
    }

    #[inline]
    fn dpsi_dalpha(&self, iv: &StepInterval, tau: f64, alpha: f64) -> f64 {
        (1.0 - tau) * self.yy * (3.0 * alpha * alpha - 2.0 * iv.bb2 * alpha) + tau * self.sy
    }

    /// `phi_tau(a)` expanded in the inner products.
    pub fn phi(&self, tau: f64, alpha: f64) -> f64 {
        let cs = tau / alpha + (1.0 - tau);
        let cy = tau + (1.0 - tau) * alpha;
        cs * cs * self.ss - 2.0 * cs * cy * self.sy + cy * cy * self.yy
    }

    /// `d phi_tau / d a`.
    pub fn phi_derivative(&self, tau: f64, alpha: f64) -> f64 {
        let a2 = alpha * alpha;
        let a3 = a2 * alpha;
        let inner = -tau / a3 * self.ss - ((1.0 - tau) / alpha - tau / a2) * self.sy
            + (1.0 - tau) * self.yy;
        2.0 * (tau + (1.0 - tau) * alpha) * inner
    }

    /// The unique root of `psi(tau, .)` in `[bb2, bb1]`.
    ///
    /// Bisection down to `1e-13 * bb1`, then two Newton steps that are only
    /// accepted when they stay inside the final bracket.
    pub fn root_for_tau(&self, tau: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&tau) {
            return Err(Error::TauOutOfRange(tau));
        }
        let iv = self.interval()?;
        if tau == 1.0 || iv.is_degenerate() {
            return Ok(iv.bb1);
        }
        if tau == 0.0 {
            return Ok(iv.bb2);
        }

        let (mut lo, mut hi) = (iv.bb2, iv.bb1);
        let f_lo = self.psi_with(&iv, tau, lo);
        let f_hi = self.psi_with(&iv, tau, hi);
        if f_lo == 0.0 {
            return Ok(lo);
        }
        if f_hi == 0.0 {
            return Ok(hi);
        }
        if f_lo > 0.0 || f_hi < 0.0 {
            return Err(Error::NoSignChange);
        }

        let tol = ROOT_TOL * iv.bb1;
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let f = self.psi_with(&iv, tau, mid);
            if f == 0.0 {
                return Ok(mid);
            }
            if f < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }

        let mut alpha = 0.5 * (lo + hi);
        for _ in 0..2 {
            let f = self.psi_with(&iv, tau, alpha);
            let df = self.dpsi_dalpha(&iv, tau, alpha);
            if f == 0.0 || df <= 0.0 {
                break;
            }
            let next = alpha - f / df;
            if next >= lo && next <= hi {
                alpha = next;
            }
        }
        Ok(alpha)
    }
}

/// The interval `[bb2, bb1]` spanned by the short and long BB stepsizes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInterval {
    pub bb1: f64,
    pub bb2: f64,
}

impl StepInterval {
    pub fn new(bb1: f64, bb2: f64) -> Result<Self> {
        if !(bb2 > 0.0 && bb1 > 0.0 && bb2.is_finite() && bb1.is_finite()) {
            return Err(Error::DegeneratePair("stepsizes must be positive and finite"));
        }
        if bb2 > bb1 {
            return Err(Error::DegeneratePair("bb2 exceeds bb1"));
        }
        Ok(StepInterval { bb1, bb2 })
    }

    /// `bb1 == bb2` (or reversed by round-off): the gradient is an eigenvector.
    pub fn is_degenerate(&self) -> bool {
        self.bb1 <= self.bb2
    }

    pub fn contains(&self, alpha: f64) -> bool {
        alpha >= self.bb2 && alpha <= self.bb1
    }

    /// `gamma * bb1 + (1 - gamma) * bb2`.
    pub fn family_step(&self, gamma: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::GammaOutOfRange(gamma));
        }
        if self.is_degenerate() {
            return Ok(self.bb1);
        }
        Ok(gamma * self.bb1 + (1.0 - gamma) * self.bb2)
    }

    /// Weight `tau` for which `family_step(gamma)` is the stationary point of
    /// `phi_tau` on `[bb2, bb1]`.
    pub fn tau_for_gamma(&self, gamma: f64) -> Result<f64> {
        let alpha = self.family_step(gamma)?;
        if gamma == 0.0 {
            return Ok(0.0);
        }
        let a = gamma * alpha * alpha;
        Ok(a / (a + (1.0 - gamma) * self.bb2))
    }
}
