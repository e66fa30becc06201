use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use spectral_bench::criteria::Harness;
use spectral_bench::suite::{ExperimentSuite, MethodSpec, ProblemSpec, RunSpec};
use spectral_bench::{cmd_gen, cmd_profile, cmd_run, cmd_table, cmd_verify, BenchError, Tier};
use spectral_core::SpectrumKind;

/// Benchmarks for spectral gradient methods on convex quadratics.
#[derive(Parser)]
#[command(name = "specbench", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a suite file, or a one-off suite built from the flags.
    Run {
        #[arg(long)]
        suite: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the suite's base seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads; 0 means one per core.
        #[arg(long)]
        workers: Option<usize>,
        #[command(flatten)]
        adhoc: Adhoc,
    },
    /// Mean iterations per (set, method, kappa, epsilon).
    Table {
        input: PathBuf,
        /// Also write the table as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Performance profile as CSV plus an SVG next to it.
    Profile {
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the acceptance checks.
    Verify {
        #[arg(value_enum, default_value_t = TierArg::Fast)]
        tier: TierArg,
    },
    /// Write a generated problem file.
    Gen {
        #[arg(long, default_value = "set1")]
        set: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        kappa: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(clap::Args)]
struct Adhoc {
    #[arg(long)]
    set: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    kappa: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    eps: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    method: Vec<String>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    gamma: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum TierArg {
    Fast,
    Full,
}

impl Adhoc {
    fn is_empty(&self) -> bool {
        self.set.is_none() && self.n.is_none() && self.kappa.is_empty() && self.eps.is_empty() && self.method.is_empty()
    }

    fn suite(&self) -> Result<ExperimentSuite, BenchError> {
        let (Some(set), Some(n)) = (&self.set, self.n) else {
            return Err(BenchError::Config("give --suite, or --set, --n, --kappa, --eps and --method".into()));
        };
        let methods = self
            .method
            .iter()
            .map(|id| MethodSpec { m: self.m, gamma: self.gamma, ..MethodSpec::new(id) })
            .collect();
        let suite = ExperimentSuite {
            problem: ProblemSpec { spectrum: set.clone(), n, kappa: self.kappa.clone(), start: None },
            run: RunSpec {
                epsilon: self.eps.clone(),
                instances: 10,
                seed: 0,
                max_iter: spectral_core::solver::DEFAULT_MAX_ITER,
                workers: 0,
            },
            methods,
        };
        suite.validate()?;
        Ok(suite)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.cmd) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cmd: Cmd) -> Result<ExitCode, BenchError> {
    match cmd {
        Cmd::Run { suite, out, seed, workers, adhoc } => {
            let mut suite = match suite {
                Some(path) if adhoc.is_empty() => ExperimentSuite::load(&path)?,
                Some(_) => return Err(BenchError::Config("--suite cannot be combined with problem flags".into())),
                None => adhoc.suite()?,
            };
            if let Some(seed) = seed {
                suite.run.seed = seed;
            }
            let workers = workers.unwrap_or(suite.run.workers);
            let rows = cmd_run(&suite, &out, workers)?;
            eprintln!("{} rows written to {}", rows.len(), out.display());
        }
        Cmd::Table { input, out } => print!("{}", cmd_table(&input, out.as_deref())?),
        Cmd::Profile { input, out } => {
            let (csv, svg) = cmd_profile(&input, &out)?;
            eprintln!("wrote {} and {}", csv.display(), svg.display());
        }
        Cmd::Verify { tier } => {
            let tier = match tier {
                TierArg::Fast => Tier::Fast,
                TierArg::Full => Tier::Full,
            };
            let outcomes = cmd_verify(tier, &mut Harness::default(), std::io::stdout());
            if outcomes.iter().any(|o| !o.passed) {
                return Ok(ExitCode::from(1));
            }
        }
        Cmd::Gen { set, n, kappa, seed, out } => {
            let kind = SpectrumKind::from_str(&set)?;
            cmd_gen(kind, n, kappa, seed, &out)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}
