//! Strictly convex quadratic test problems `f(x) = ½ xᵀA x - bᵀx`.
//!
//! `A = Q V Qᵀ` with `V = diag(v)` and `Q = H3 H2 H1` a product of three
//! Householder reflectors `H_i = I - 2 w_i w_iᵀ`. `A` is never formed; every
//! product costs `O(n)`.

mod io;
mod spectrum;

pub use spectrum::{nonrand_spectrum, spectrum_sample, SpectrumKind};

use crate::error::{Error, Result};
use crate::linalg::{dot, norm, reflect};
use crate::rng::{tag, Stream};

/// The three unit vectors defining `Q = H3 H2 H1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Householder {
    pub w: [Vec<f64>; 3],
}

impl Householder {
    /// Three independent standard-normal vectors, normalized.
    pub fn random(n: usize, rng: &mut Stream) -> Self {
        let mut draw = || {
            let mut w: Vec<f64> = (0..n).map(|_| rng.normal()).collect();
            let nw = norm(&w);
            w.iter_mut().for_each(|x| *x /= nw);
            w
        };
        let w1 = draw();
        let w2 = draw();
        let w3 = draw();
        Householder { w: [w1, w2, w3] }
    }

    /// `d <- Qᵀ d = H1 H2 H3 d`
    pub fn apply_qt(&self, d: &mut [f64]) {
        reflect(&self.w[2], d);
        reflect(&self.w[1], d);
        reflect(&self.w[0], d);
    }

    /// `d <- Q d = H3 H2 H1 d`
    pub fn apply_q(&self, d: &mut [f64]) {
        reflect(&self.w[0], d);
        reflect(&self.w[1], d);
        reflect(&self.w[2], d);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticProblem {
    v: Vec<f64>,
    householder: Option<Householder>,
    b: Vec<f64>,
    kappa: f64,
    kind: Option<SpectrumKind>,
    seed: u64,
}

impl QuadraticProblem {
    /// `A = diag(v)` with linear term `b`.
    pub fn diagonal(v: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        Self::from_parts(v, None, b, None, 0)
    }

    pub fn from_parts(
        v: Vec<f64>,
        householder: Option<Householder>,
        b: Vec<f64>,
        kind: Option<SpectrumKind>,
        seed: u64,
    ) -> Result<Self> {
        let n = v.len();
        if n == 0 {
            return Err(Error::InvalidConfig("empty spectrum".into()));
        }
        if b.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: b.len() });
        }
        if v.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
            return Err(Error::InvalidConfig("eigenvalues must be positive and finite".into()));
        }
        if let Some(h) = &householder {
            for w in &h.w {
                if w.len() != n {
                    return Err(Error::DimensionMismatch { expected: n, got: w.len() });
                }
                if (norm(w) - 1.0).abs() > 1e-12 {
                    return Err(Error::InvalidConfig("reflector vector is not unit length".into()));
                }
            }
        }
        let min = v.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = v.iter().cloned().fold(0.0, f64::max);
        Ok(QuadraticProblem {
            v,
            householder,
            b,
            kappa: max / min,
            kind,
            seed,
        })
    }

    /// Generate a problem of the given kind, fully determined by
    /// `(kind, n, kappa, seed)`.
    ///
    /// Random kinds draw, from `Stream::derive(seed, PROBLEM)` and in this
    /// order: the interior eigenvalues, `w1`, `w2`, `w3` and the entries of
    /// `b` (uniform in `[-10, 10]`). `NonRandom` is diagonal with `b = 0`.
    pub fn generate(kind: SpectrumKind, n: usize, kappa: f64, seed: u64) -> Result<Self> {
        let mut rng = Stream::derive(seed, tag::PROBLEM);
        let v = spectrum_sample(kind, n, kappa, &mut rng)?;
        if !kind.is_random() {
            let mut p = Self::from_parts(v, None, vec![0.0; n], Some(kind), seed)?;
            p.kappa = kappa;
            return Ok(p);
        }
        let h = Householder::random(n, &mut rng);
        let b = (0..n).map(|_| rng.uniform(-10.0, 10.0)).collect();
        let mut p = Self::from_parts(v, Some(h), b, Some(kind), seed)?;
        p.kappa = kappa;
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.v.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.v
    }

    pub fn householder(&self) -> Option<&Householder> {
        self.householder.as_ref()
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn kind(&self) -> Option<SpectrumKind> {
        self.kind
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.v.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.v.iter().cloned().fold(0.0, f64::max)
    }

    fn check_dim(&self, len: usize) -> Result<()> {
        if len != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), got: len });
        }
        Ok(())
    }

    /// `out <- A d`
    pub fn hessian_apply_into(&self, d: &[f64], out: &mut [f64]) -> Result<()> {
        self.check_dim(d.len())?;
        self.check_dim(out.len())?;
        out.copy_from_slice(d);
        match &self.householder {
            Some(h) => {
                h.apply_qt(out);
                out.iter_mut().zip(&self.v).for_each(|(o, v)| *o *= v);
                h.apply_q(out);
            }
            None => out.iter_mut().zip(&self.v).for_each(|(o, v)| *o *= v),
        }
        Ok(())
    }

    pub fn hessian_apply(&self, d: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.n()];
        self.hessian_apply_into(d, &mut out)?;
        Ok(out)
    }

    /// `A x - b`
    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut g = self.hessian_apply(x)?;
        g.iter_mut().zip(&self.b).for_each(|(gi, bi)| *gi -= bi);
        Ok(g)
    }

    pub fn value(&self, x: &[f64]) -> Result<f64> {
        let ax = self.hessian_apply(x)?;
        Ok(0.5 * dot(x, &ax) - dot(&self.b, x))
    }

    /// Components of `d` in the eigenvector basis, `Qᵀ d`.
    pub fn to_eigenbasis(&self, d: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(d.len())?;
        let mut out = d.to_vec();
        if let Some(h) = &self.householder {
            h.apply_qt(&mut out);
        }
        Ok(out)
    }

    /// Exact line-search (Cauchy) stepsize `gᵀg / gᵀA g`.
    pub fn sd_stepsize(&self, g: &[f64]) -> Result<f64> {
        let gg = dot(g, g);
        if gg == 0.0 {
            return Err(Error::ZeroGradient);
        }
        let ag = self.hessian_apply(g)?;
        Ok(gg / dot(g, &ag))
    }

    /// Minimal-gradient stepsize `gᵀA g / gᵀA² g`.
    pub fn mg_stepsize(&self, g: &[f64]) -> Result<f64> {
        if dot(g, g) == 0.0 {
            return Err(Error::ZeroGradient);
        }
        let ag = self.hessian_apply(g)?;
        Ok(dot(g, &ag) / dot(&ag, &ag))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_a(p: &QuadraticProblem) -> Vec<Vec<f64>> {
        // Q from explicit reflector matrices, independent of apply_q/apply_qt.
        let n = p.n();
        let eye = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
        let reflector = |w: &[f64]| -> Vec<Vec<f64>> {
            (0..n).map(|i| (0..n).map(|j| eye(i, j) - 2.0 * w[i] * w[j]).collect()).collect()
        };
        let mul = |a: &Vec<Vec<f64>>, b: &Vec<Vec<f64>>| -> Vec<Vec<f64>> {
            (0..n)
                .map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect())
                .collect()
        };
        let h = p.householder().unwrap();
        let q = mul(&mul(&reflector(&h.w[2]), &reflector(&h.w[1])), &reflector(&h.w[0]));
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).map(|k| q[i][k] * p.eigenvalues()[k] * q[j][k]).sum())
                    .collect()
            })
            .collect()
    }

    #[test]
    fn diagonal_products() {
        let p = QuadraticProblem::diagonal(vec![1.0, 2.0], vec![0.0, 0.0]).unwrap();
        assert_eq!(p.hessian_apply(&[1.0, 1.0]).unwrap(), vec![1.0, 2.0]);
        assert_eq!(p.hessian_apply(&[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
        assert!(matches!(p.hessian_apply(&[1.0]), Err(Error::DimensionMismatch { .. })));
        assert!((p.sd_stepsize(&[1.0, 1.0]).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((p.mg_stepsize(&[1.0, 1.0]).unwrap() - 0.6).abs() < 1e-15);
        assert_eq!(p.sd_stepsize(&[0.0, 0.0]), Err(Error::ZeroGradient));
        assert_eq!(p.mg_stepsize(&[0.0, 0.0]), Err(Error::ZeroGradient));
    }

    #[test]
    fn gradient_examples() {
        let id = QuadraticProblem::diagonal(vec![1.0; 3], vec![0.0; 3]).unwrap();
        assert_eq!(id.gradient(&[1.0, -2.0, 3.0]).unwrap(), vec![1.0, -2.0, 3.0]);
        assert_eq!(id.sd_stepsize(&[0.3, 1.0, -2.0]).unwrap(), 1.0);
        assert_eq!(id.mg_stepsize(&[0.3, 1.0, -2.0]).unwrap(), 1.0);

        let v = vec![1.0, 4.0, 9.0];
        let b = vec![3.0, -2.0, 1.0];
        let p = QuadraticProblem::diagonal(v.clone(), b.clone()).unwrap();
        let xstar: Vec<f64> = b.iter().zip(&v).map(|(b, v)| b / v).collect();
        assert!(norm(&p.gradient(&xstar).unwrap()) < 1e-12);

        let p = QuadraticProblem::diagonal(vec![1.0, 7.0], vec![0.0; 2]).unwrap();
        assert_eq!(p.gradient(&[1.0, 1.0]).unwrap(), vec![1.0, 7.0]);
    }

    #[test]
    fn orthogonality_of_q() {
        let p = QuadraticProblem::generate(SpectrumKind::Set1, 40, 1e3, 3).unwrap();
        let h = p.householder().unwrap();
        for w in &h.w {
            assert!((norm(w) - 1.0).abs() < 1e-12);
        }
        let mut rng = Stream::new(99);
        for _ in 0..20 {
            let d: Vec<f64> = (0..40).map(|_| rng.normal()).collect();
            let mut e = d.clone();
            h.apply_q(&mut e);
            h.apply_qt(&mut e);
            for (a, b) in d.iter().zip(&e) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rayleigh_bounds() {
        let p = QuadraticProblem::generate(SpectrumKind::Set2, 50, 1e4, 8).unwrap();
        let mut rng = Stream::new(1);
        for _ in 0..100 {
            let d: Vec<f64> = (0..50).map(|_| rng.uniform(-1.0, 1.0)).collect();
            let r = dot(&d, &p.hessian_apply(&d).unwrap()) / dot(&d, &d);
            assert!(r >= p.min_eigenvalue() * (1.0 - 1e-12));
            assert!(r <= p.max_eigenvalue() * (1.0 + 1e-12));
            let g = p.gradient(&d).unwrap();
            assert!(p.mg_stepsize(&g).unwrap() <= p.sd_stepsize(&g).unwrap());
        }
    }

    #[test]
    fn implicit_matches_dense() {
        for (n, seed) in [(6, 1), (11, 2), (16, 3)] {
            let p = QuadraticProblem::generate(SpectrumKind::Set1, n, 1e3, seed).unwrap();
            let a = dense_a(&p);
            let mut rng = Stream::new(seed + 100);
            for _ in 0..5 {
                let d: Vec<f64> = (0..n).map(|_| rng.normal()).collect();
                let implicit = p.hessian_apply(&d).unwrap();
                for i in 0..n {
                    let dense: f64 = (0..n).map(|j| a[i][j] * d[j]).sum();
                    assert!((dense - implicit[i]).abs() < 1e-12 * 1e3, "{dense} vs {}", implicit[i]);
                }
            }
        }
    }

    #[test]
    fn symmetric_probes() {
        let n = 8;
        let p = QuadraticProblem::generate(SpectrumKind::Set1, n, 50.0, 12).unwrap();
        let cols: Vec<Vec<f64>> = (0..n)
            .map(|j| {
                let mut e = vec![0.0; n];
                e[j] = 1.0;
                p.hessian_apply(&e).unwrap()
            })
            .collect();
        for i in 0..n {
            for j in 0..n {
                assert!((cols[j][i] - cols[i][j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let a = QuadraticProblem::generate(SpectrumKind::Set5, 30, 1e5, 17).unwrap();
        let b = QuadraticProblem::generate(SpectrumKind::Set5, 30, 1e5, 17).unwrap();
        assert_eq!(a, b);
        let c = QuadraticProblem::generate(SpectrumKind::Set5, 30, 1e5, 18).unwrap();
        assert_ne!(a, c);
        assert!(a.b().iter().all(|&x| (-10.0..=10.0).contains(&x)));
    }

    #[test]
    fn nonrandom_problem_is_diagonal_with_null_b() {
        let p = QuadraticProblem::generate(SpectrumKind::NonRandom, 4, 1e3, 0).unwrap();
        assert!(p.householder().is_none());
        assert_eq!(p.b(), &[0.0; 4]);
        assert_eq!(p.kappa(), 1e3);
    }
}
