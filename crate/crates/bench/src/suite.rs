//! Declarative experiment suites and their parallel execution.
//!
//! ```toml
//! [problem]
//! spectrum = "set1"        # set1..set7, even, nonrand
//! n = 1000
//! kappa = [1e4, 1e5]
//! start = "ones"           # or "uniform" (entries in [-10, 10]); default by spectrum
//!
//! [run]
//! epsilon = [1e-6, 1e-9]
//! instances = 10
//! seed = 0
//! max_iter = 20000
//! workers = 0              # 0 = one per core
//!
//! [[methods]]
//! id = "ATC1"
//! m = 30
//! label = "ATC1-m30"       # optional; also accepts gamma, tau, h
//! ```
//!
//! Instance `i` uses seed `seed + i`. Problem, start and gamma draws come
//! from that seed through the tagged streams of `spectral_core::rng`, so a
//! result row replays from its `(seed, suite entry)` alone.

use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Deserialize;
use spectral_core::rng::{tag, Stream};
use spectral_core::solver::DEFAULT_MAX_ITER;
use spectral_core::{run_gradient_method, MethodId, QuadraticProblem, RunConfig, SpectrumKind};

use crate::BenchError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StartRule {
    Ones,
    Uniform,
}

impl StartRule {
    /// All-ones for the random sets, uniform entries for the log-spaced one.
    pub fn default_for(kind: SpectrumKind) -> Self {
        if kind.is_random() {
            StartRule::Ones
        } else {
            StartRule::Uniform
        }
    }

    pub fn point(self, n: usize, seed: u64) -> Vec<f64> {
        match self {
            StartRule::Ones => vec![1.0; n],
            StartRule::Uniform => {
                let mut rng = Stream::derive(seed, tag::START);
                (0..n).map(|_| rng.uniform(-10.0, 10.0)).collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub spectrum: String,
    pub n: usize,
    pub kappa: Vec<f64>,
    pub start: Option<StartRule>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub epsilon: Vec<f64>,
    #[serde(default = "default_instances")]
    pub instances: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default)]
    pub workers: usize,
}

fn config(e: spectral_core::Error) -> BenchError {
    BenchError::Config(e.to_string())
}

fn default_instances() -> usize {
    10
}

fn default_max_iter() -> usize {
    DEFAULT_MAX_ITER
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodSpec {
    pub id: String,
    pub m: Option<usize>,
    pub gamma: Option<f64>,
    pub tau: Option<f64>,
    /// Exact steps per SDC cycle.
    pub h: Option<usize>,
    pub label: Option<String>,
}

impl MethodSpec {
    pub fn new(id: &str) -> Self {
        MethodSpec { id: id.to_string(), m: None, gamma: None, tau: None, h: None, label: None }
    }

    pub fn label(&self) -> String {
        match &self.label {
            Some(l) => l.clone(),
            None => {
                let mut s = self.id.to_ascii_uppercase();
                if let Some(g) = self.gamma {
                    s += &format!("-g{g}");
                }
                if let Some(m) = self.m {
                    s += &format!("-m{m}");
                }
                s
            }
        }
    }

    pub fn config(&self, epsilon: f64, max_iter: usize, seed: u64) -> Result<RunConfig, BenchError> {
        let id = MethodId::from_str(&self.id).map_err(config)?;
        let mut cfg = RunConfig::new(id, epsilon).with_max_iter(max_iter).with_seed(seed);
        cfg.m = self.m;
        cfg.gamma = self.gamma;
        cfg.tau = self.tau;
        cfg.sdc_h = self.h;
        if id == MethodId::FamilyFixed && cfg.gamma.is_none() {
            return Err(BenchError::Config(format!("method '{}' needs gamma", self.id)));
        }
        cfg.validate().map_err(config)?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSuite {
    pub problem: ProblemSpec,
    pub run: RunSpec,
    pub methods: Vec<MethodSpec>,
}

/// One solver run of a suite.
#[derive(Debug, Clone, PartialEq)]
pub struct Job {
    pub kappa: f64,
    pub seed: u64,
    pub method: usize,
    pub epsilon: f64,
}

impl ExperimentSuite {
    pub fn from_toml(text: &str) -> Result<Self, BenchError> {
        let suite: ExperimentSuite = toml::from_str(text).map_err(|e| BenchError::Config(e.to_string()))?;
        suite.validate()?;
        Ok(suite)
    }

    pub fn load(path: &Path) -> Result<Self, BenchError> {
        let text = std::fs::read_to_string(path).map_err(|e| BenchError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn kind(&self) -> Result<SpectrumKind, BenchError> {
        SpectrumKind::from_str(&self.problem.spectrum).map_err(config)
    }

    pub fn start(&self) -> Result<StartRule, BenchError> {
        Ok(self.problem.start.unwrap_or(StartRule::default_for(self.kind()?)))
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        let kind = self.kind()?;
        if self.run.instances == 0 {
            return Err(BenchError::Config("instances must be >= 1".into()));
        }
        if self.problem.kappa.is_empty() || self.run.epsilon.is_empty() || self.methods.is_empty() {
            return Err(BenchError::Config("kappa, epsilon and methods must be non-empty".into()));
        }
        if self.problem.n < kind.min_dimension() {
            return Err(BenchError::Config(format!(
                "{} needs n >= {}, got {}",
                kind.name(),
                kind.min_dimension(),
                self.problem.n
            )));
        }
        if let Some(k) = self.problem.kappa.iter().find(|k| !(**k >= 1.0 && k.is_finite())) {
            return Err(BenchError::Config(format!("kappa must be >= 1, got {k}")));
        }
        for m in &self.methods {
            m.config(self.run.epsilon[0], self.run.max_iter, 0)?;
        }
        let mut labels: Vec<String> = self.methods.iter().map(MethodSpec::label).collect();
        labels.sort();
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return Err(BenchError::Config("method labels must be distinct".into()));
        }
        Ok(())
    }

    /// All runs in output order: kappa, instance, method, epsilon.
    pub fn jobs(&self) -> Vec<Job> {
        let mut jobs = Vec::new();
        for &kappa in &self.problem.kappa {
            for i in 0..self.run.instances as u64 {
                for method in 0..self.methods.len() {
                    for &epsilon in &self.run.epsilon {
                        jobs.push(Job { kappa, seed: self.run.seed + i, method, epsilon });
                    }
                }
            }
        }
        jobs
    }

    pub fn execute(&self, job: &Job) -> Result<spectral_core::solver::ResultRow, BenchError> {
        let kind = self.kind()?;
        let n = self.problem.n;
        let prob = QuadraticProblem::generate(kind, n, job.kappa, job.seed)?;
        let x1 = self.start()?.point(n, job.seed);
        let spec = &self.methods[job.method];
        let cfg = spec.config(job.epsilon, self.run.max_iter, job.seed)?;
        let trace = run_gradient_method(&prob, &x1, &cfg)?;
        let id = format!("{}-s{}", kind.name(), job.seed);
        Ok(trace.to_row(&id, &spec.label(), job.epsilon, job.kappa, n, job.seed))
    }
}

/// Run every job on a pool of `workers` threads (0 = one per core). Rows come
/// back in job order whatever the thread count.
pub fn run_suite(suite: &ExperimentSuite, workers: usize) -> Result<Vec<spectral_core::solver::ResultRow>, BenchError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| BenchError::Config(e.to_string()))?;
    let jobs = suite.jobs();
    pool.install(|| jobs.par_iter().map(|j| suite.execute(j)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = r#"
[problem]
spectrum = "set2"
n = 30
kappa = [1e3]

[run]
epsilon = [1e-6, 1e-8]
instances = 2
seed = 40

[[methods]]
id = "BB1"

[[methods]]
id = "FAMILY_FIXED"
gamma = 0.5
"#;

    #[test]
    fn parses_with_defaults() {
        let s = ExperimentSuite::from_toml(SMALL).unwrap();
        assert_eq!(s.run.max_iter, DEFAULT_MAX_ITER);
        assert_eq!(s.start().unwrap(), StartRule::Ones);
        assert_eq!(s.methods[1].label(), "FAMILY_FIXED-g0.5");
        assert_eq!(s.jobs().len(), 2 * 2 * 2);
    }

    #[test]
    fn job_order_and_seeds() {
        let s = ExperimentSuite::from_toml(SMALL).unwrap();
        let j = s.jobs();
        assert_eq!((j[0].seed, j[0].method, j[0].epsilon), (40, 0, 1e-6));
        assert_eq!((j[1].seed, j[1].method, j[1].epsilon), (40, 0, 1e-8));
        assert_eq!((j[2].seed, j[2].method), (40, 1));
        assert_eq!(j[4].seed, 41);
    }

    #[test]
    fn rejects_bad_suites() {
        let bad = [
            SMALL.replace("instances = 2", "instances = 0"),
            SMALL.replace("\"BB1\"", "\"NOPE\""),
            SMALL.replace("gamma = 0.5", ""),
            SMALL.replace("set2", "set9"),
            SMALL.replace("n = 30", "n = 3"),
            SMALL.replace("seed = 40", "seed = 40\nbogus = 1"),
            SMALL.replace("kappa = [1e3]", "kappa = [0.5]"),
        ];
        for text in bad {
            assert!(matches!(ExperimentSuite::from_toml(&text), Err(BenchError::Config(_))), "{text}");
        }
    }

    #[test]
    fn worker_count_does_not_change_rows() {
        let s = ExperimentSuite::from_toml(SMALL).unwrap();
        assert_eq!(run_suite(&s, 1).unwrap(), run_suite(&s, 3).unwrap());
    }

    #[test]
    fn uniform_start_is_seeded() {
        let a = StartRule::Uniform.point(5, 9);
        assert_eq!(a, StartRule::Uniform.point(5, 9));
        assert_ne!(a, StartRule::Uniform.point(5, 10));
        assert!(a.iter().all(|x| (-10.0..=10.0).contains(x)));
    }
}
