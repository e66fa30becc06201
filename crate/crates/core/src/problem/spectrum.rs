//! Eigenvalue generators for the quadratic test problems.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::rng::Stream;

/// Distribution of the Hessian eigenvalues.
///
/// `Set1`–`Set7` sample the interior eigenvalues `v_2..v_{n-1}` uniformly
/// from the intervals below, with `v_1 = 1` and `v_n = kappa`. Fractional
/// index boundaries `n/5`, `n/2`, `4n/5` are rounded down.
///
/// | kind | `(1, 100)`        | `(100, kappa/2)`    | `(kappa/2, kappa)`   |
/// |------|-------------------|---------------------|----------------------|
/// | set1 | all of `(1, kappa)` |                   |                      |
/// | set2 | `v_2..v_{n/5}`    |                     | the rest             |
/// | set3 | `v_2..v_{n/2}`    |                     | the rest             |
/// | set4 | `v_2..v_{4n/5}`   |                     | the rest             |
/// | set5 | `v_2..v_{n/5}`    | `v_{n/5+1}..v_{4n/5}` | the rest           |
/// | set6 | `v_2..v_10`       |                     | `v_11..v_{n-1}`      |
/// | set7 | `v_2..v_{n-10}`   |                     | `v_{n-9}..v_{n-1}`   |
///
/// `Even` is the deterministic equispaced grid on `[1, kappa]`; `NonRandom`
/// is the log-spaced diagonal of [`nonrand_spectrum`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SpectrumKind {
    Set1,
    Set2,
    Set3,
    Set4,
    Set5,
    Set6,
    Set7,
    Even,
    NonRandom,
}

impl SpectrumKind {
    pub const ALL: [SpectrumKind; 9] = [
        SpectrumKind::Set1,
        SpectrumKind::Set2,
        SpectrumKind::Set3,
        SpectrumKind::Set4,
        SpectrumKind::Set5,
        SpectrumKind::Set6,
        SpectrumKind::Set7,
        SpectrumKind::Even,
        SpectrumKind::NonRandom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SpectrumKind::Set1 => "set1",
            SpectrumKind::Set2 => "set2",
            SpectrumKind::Set3 => "set3",
            SpectrumKind::Set4 => "set4",
            SpectrumKind::Set5 => "set5",
            SpectrumKind::Set6 => "set6",
            SpectrumKind::Set7 => "set7",
            SpectrumKind::Even => "even",
            SpectrumKind::NonRandom => "nonrand",
        }
    }

    /// Problems of this kind carry a random rotation and linear term.
    pub fn is_random(self) -> bool {
        self != SpectrumKind::NonRandom
    }

    /// Default ATC cycle length: 30 for sets 1 and 5, 8 otherwise.
    pub fn default_cycle_length(self) -> usize {
        match self {
            SpectrumKind::Set1 | SpectrumKind::Set5 | SpectrumKind::Even => 30,
            _ => 8,
        }
    }

    /// Groups of 1-based indices and the interval each group is drawn from.
    fn layout(self, n: usize, kappa: f64) -> Result<Vec<(usize, usize, f64, f64)>> {
        let low = (1.0, 100.0);
        let mid = (100.0, kappa / 2.0);
        let high = (kappa / 2.0, kappa);
        let (n5, n2, n45) = (n / 5, n / 2, 4 * n / 5);
        let groups = match self {
            SpectrumKind::Set1 => vec![(2, n - 1, 1.0, kappa)],
            SpectrumKind::Set2 => vec![(2, n5, low.0, low.1), (n5 + 1, n - 1, high.0, high.1)],
            SpectrumKind::Set3 => vec![(2, n2, low.0, low.1), (n2 + 1, n - 1, high.0, high.1)],
            SpectrumKind::Set4 => vec![(2, n45, low.0, low.1), (n45 + 1, n - 1, high.0, high.1)],
            SpectrumKind::Set5 => vec![
                (2, n5, low.0, low.1),
                (n5 + 1, n45, mid.0, mid.1),
                (n45 + 1, n - 1, high.0, high.1),
            ],
            SpectrumKind::Set6 => vec![(2, 10, low.0, low.1), (11, n - 1, high.0, high.1)],
            SpectrumKind::Set7 => vec![
                (2, n.saturating_sub(10), low.0, low.1),
                (n.saturating_sub(9), n - 1, high.0, high.1),
            ],
            SpectrumKind::Even | SpectrumKind::NonRandom => return Ok(vec![]),
        };
        if groups.len() > 1 && groups.iter().any(|&(a, b, _, _)| a > b || a < 2) {
            return Err(Error::BadFraction {
                kind: self.name().to_string(),
                n,
                min_n: self.min_dimension(),
            });
        }
        Ok(groups)
    }

    /// Smallest `n` for which every index group of the layout is non-empty.
    pub fn min_dimension(self) -> usize {
        match self {
            SpectrumKind::Set1 | SpectrumKind::Even | SpectrumKind::NonRandom => 2,
            SpectrumKind::Set6 | SpectrumKind::Set7 => 12,
            _ => (2..)
                .find(|&n| self.layout_nonempty(n))
                .expect("some dimension fits"),
        }
    }

    fn layout_nonempty(self, n: usize) -> bool {
        let (n5, n2, n45) = (n / 5, n / 2, 4 * n / 5);
        match self {
            SpectrumKind::Set2 => n5 >= 2 && n5 < n - 1,
            SpectrumKind::Set3 => n2 >= 2 && n2 < n - 1,
            SpectrumKind::Set4 => n45 >= 2 && n45 < n - 1,
            SpectrumKind::Set5 => n5 >= 2 && n45 > n5 && n45 < n - 1,
            _ => true,
        }
    }
}

impl fmt::Display for SpectrumKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SpectrumKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase();
        let key = match key.as_str() {
            "1" | "2" | "3" | "4" | "5" | "6" | "7" => format!("set{key}"),
            "non-random" | "nonrandom" => "nonrand".to_string(),
            _ => key,
        };
        SpectrumKind::ALL
            .into_iter()
            .find(|k| k.name() == key)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown spectrum kind '{s}'")))
    }
}

fn check_dims(n: usize, kappa: f64) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidConfig(format!("dimension n = {n} must be >= 2")));
    }
    if !(kappa > 1.0 && kappa.is_finite()) {
        return Err(Error::InvalidConfig(format!("condition number {kappa} must exceed 1")));
    }
    Ok(())
}

/// Eigenvalues for `kind`, in generation order (`v[0] = 1`, `v[n-1] = kappa`).
pub fn spectrum_sample(kind: SpectrumKind, n: usize, kappa: f64, rng: &mut Stream) -> Result<Vec<f64>> {
    check_dims(n, kappa)?;
    match kind {
        SpectrumKind::NonRandom => return nonrand_spectrum(n, kappa),
        SpectrumKind::Even => {
            let mut v: Vec<f64> = (0..n)
                .map(|j| 1.0 + (kappa - 1.0) * j as f64 / (n - 1) as f64)
                .collect();
            v[0] = 1.0;
            v[n - 1] = kappa;
            return Ok(v);
        }
        _ => {}
    }
    if n < kind.min_dimension() {
        return Err(Error::BadFraction {
            kind: kind.name().to_string(),
            n,
            min_n: kind.min_dimension(),
        });
    }
    let mut v = vec![0.0; n];
    v[0] = 1.0;
    v[n - 1] = kappa;
    for (first, last, lo, hi) in kind.layout(n, kappa)? {
        for j in first..=last {
            v[j - 1] = rng.uniform(lo, hi);
        }
    }
    Ok(v)
}

/// Diagonal `A_11 = 1`, `A_nn = kappa`, and
/// `A_jj = 10^(log10(kappa) / (n - 1) * (n - j))` in between.
pub fn nonrand_spectrum(n: usize, kappa: f64) -> Result<Vec<f64>> {
    check_dims(n, kappa)?;
    let ncond = kappa.log10();
    let mut v = Vec::with_capacity(n);
    v.push(1.0);
    for j in 2..n {
        v.push(10f64.powf(ncond / (n - 1) as f64 * (n - j) as f64));
    }
    v.push(kappa);
    Ok(v)
}
