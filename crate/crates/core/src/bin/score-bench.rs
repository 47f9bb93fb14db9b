use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use score_bo::bench::{
    emit_report, read_csv_file, run_and_persist, run_sweep, Method, ProblemKind, ReportKind,
    RunConfig,
};
use score_bo::problems::{Datasheet, SdmParams};
use score_bo::Error;

#[derive(Parser)]
#[command(name = "score-bench", about = "Run SCORE and baseline BO benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment.
    Run(RunArgs),
    /// Run one experiment per seed and write median and plot reports.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// Comma-separated seed list.
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
        /// Run seeds concurrently.
        #[arg(long)]
        parallel: bool,
    },
    /// Re-render plots from trace CSV files.
    Report {
        #[arg(long, value_enum, default_value = "convergence")]
        kind: ReportKind,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, default_value = "report")]
        stem: String,
        #[arg(required = true)]
        csv: Vec<PathBuf>,
    },
    /// Write the synthetic single-diode datasheet fixture.
    Datasheet {
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    method: Option<Method>,
    #[arg(long, value_enum)]
    problem: Option<ProblemKind>,
    #[arg(long)]
    dims: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_evals: Option<usize>,
    #[arg(long)]
    n_init: Option<usize>,
    #[arg(long)]
    batch: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn resolve(&self) -> Result<RunConfig, Error> {
        let mut c = match &self.config {
            Some(path) => RunConfig::read(path)?,
            None => RunConfig::default(),
        };
        if let Some(v) = self.method {
            c.method = v;
        }
        if let Some(v) = self.problem {
            c.problem = v;
        }
        if let Some(v) = self.dims {
            c.dims = v;
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if let Some(v) = self.max_evals {
            c.max_evals = v;
        }
        if let Some(v) = self.n_init {
            c.n_init = Some(v);
        }
        if let Some(v) = self.batch {
            c.batch_size = v;
        }
        if let Some(v) = &self.out {
            c.out = v.clone();
        }
        Ok(c)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("error")).init();
    match dispatch(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

fn dispatch(command: Command) -> Result<(), Error> {
    match command {
        Command::Run(args) => {
            let config = args.resolve()?;
            let run = run_and_persist(&config, config.seed)?;
            let s = &run.outcome.summary;
            println!(
                "{} seed {}: best {} after {} evals in {:.1} ms ({} surrogate fits)",
                s.method, s.seed, s.best_value, s.total_evals, s.total_time_ms, s.gp_fits
            );
            println!("trace: {}", run.csv.display());
        }
        Command::Sweep {
            run,
            seeds,
            parallel,
        } => {
            let mut config = run.resolve()?;
            if let Some(seeds) = seeds {
                config.seeds = seeds;
            }
            config.parallel |= parallel;
            for r in run_sweep(&config)? {
                let s = &r.outcome.summary;
                println!(
                    "{} seed {}: best {} after {} evals in {:.1} ms",
                    s.method, s.seed, s.best_value, s.total_evals, s.total_time_ms
                );
            }
            println!("reports in {}", config.out.display());
        }
        Command::Report {
            kind,
            out,
            stem,
            csv,
        } => {
            let mut traces = Vec::new();
            for path in &csv {
                traces.extend(read_csv_file(path)?);
            }
            let files = emit_report(&traces, kind, &out, &stem)?;
            println!("{}\n{}", files.csv.display(), files.svg.display());
        }
        Command::Datasheet { out } => {
            Datasheet::synthetic(SdmParams::REFERENCE)?.write(&out)?;
            println!("{}", out.display());
        }
    }
    Ok(())
}
