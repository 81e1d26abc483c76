use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ncinterp_cli::{
    generate, run_compute, run_verify, save_tuple, threads_from_env, tuple_json, CliError, ComputeArgs, Method,
    Report, Suite, VerifyArgs,
};
use ncinterp_core::random::InstanceFamily;
use ncinterp_core::{Config, Exponent};

#[derive(Parser)]
#[command(name = "ncinterp", version, about = "Interpolation norms of column/row matrix tuples")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the norm of one tuple by the chosen method
    Compute {
        #[arg(long)]
        input: PathBuf,
        /// 1, 4/3, 2, 4, inf or any p in [1, inf]
        #[arg(long)]
        p: Option<Exponent>,
        #[arg(long, default_value_t = 0.5)]
        theta: f64,
        #[arg(long, value_enum, default_value_t = Method::Alpha)]
        method: Method,
        #[command(flatten)]
        common: Common,
    },
    /// Run a verification suite on seeded random instances
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long)]
        p: Option<Exponent>,
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long, default_value = "gaussian")]
        family: InstanceFamily,
        #[command(flatten)]
        common: Common,
    },
    /// Write a random tuple file
    Gen {
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "gaussian")]
        family: InstanceFamily,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Polynomial degree of analytic candidates
    #[arg(long)]
    degree: Option<usize>,
    /// Boundary samples of the candidate minimax
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    /// Record wall-clock timings in the report
    #[arg(long)]
    timings: bool,
}

impl Common {
    fn config(&self) -> Config {
        let mut cfg = Config {
            seed: self.seed,
            ..Config::default()
        };
        if let Some(v) = self.degree {
            cfg.degree = v;
        }
        if let Some(v) = self.samples {
            cfg.samples = v;
        }
        if let Some(v) = self.restarts {
            cfg.restarts = v;
        }
        if let Some(v) = self.tol {
            cfg.tol = v;
        }
        cfg
    }
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, format!("{text}\n")).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn finish(report: Report, out: Option<&PathBuf>) -> Result<ExitCode, CliError> {
    emit(&report.to_json(), out)?;
    Ok(if report.passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let pool = {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = threads_from_env()? {
            builder = builder.num_threads(n);
        }
        builder.build().map_err(|e| CliError::Io(e.to_string()))?
    };
    match cli.command {
        Command::Compute {
            input,
            p,
            theta,
            method,
            common,
        } => {
            let args = ComputeArgs {
                input,
                p,
                theta,
                method,
                cfg: common.config(),
                timings: common.timings,
            };
            let report = pool.install(|| run_compute(&args))?;
            finish(report, common.out.as_ref())
        }
        Command::Verify {
            suite,
            d,
            n,
            trials,
            p,
            theta,
            family,
            common,
        } => {
            let args = VerifyArgs {
                suite,
                d,
                n,
                trials,
                p,
                theta,
                family,
                cfg: common.config(),
                timings: common.timings,
            };
            let report = pool.install(|| run_verify(&args))?;
            finish(report, common.out.as_ref())
        }
        Command::Gen {
            d,
            n,
            seed,
            family,
            out,
        } => {
            let x = generate(d, n, seed, family)?;
            match out {
                Some(path) => save_tuple(&x, &path)?,
                None => println!("{}", tuple_json(&x)),
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("ncinterp: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
