use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::config::{Method, ProblemKind, RunConfig};
use super::report::{emit_report, ReportKind};
use super::trace::{write_csv_file, write_median_csv, ConvergenceTrace, TraceRow};
use crate::baseline::BoOptimizer;
use crate::engine::ScoreOptimizer;
use crate::error::{Error, Result};
use crate::optimizer::{Objective, Optimizer, StepReport};
use crate::problems::{AckleySpec, Datasheet, SdmObjective, SdmParams};
use crate::space::SearchSpace;

/// A benchmark objective together with its search space.
pub struct Problem {
    pub space: SearchSpace,
    pub objective: Box<dyn Objective + Send + Sync>,
    /// Maps objective values to the numbers reported in traces.
    pub report_value: fn(f64) -> f64,
}

pub fn build_problem(config: &RunConfig) -> Result<Problem> {
    match config.problem {
        ProblemKind::Ackley => {
            let mut spec = AckleySpec::new(config.dims)?;
            spec.lo = config.grid_lo;
            spec.hi = config.grid_hi;
            let space = spec.search_space(config.grid_points)?;
            Ok(Problem {
                space,
                objective: Box::new(move |x: &[f64]| spec.evaluate(x)),
                report_value: |v| v,
            })
        }
        ProblemKind::Sdm => {
            let sheet = match &config.datasheet {
                Some(path) => Datasheet::read(path)?,
                None => Datasheet::synthetic(SdmParams::REFERENCE)?,
            };
            let space = crate::problems::sdm_search_space(&sheet.targets)?;
            Ok(Problem {
                space,
                objective: Box::new(SdmObjective {
                    targets: sheet.targets,
                }),
                report_value: SdmObjective::to_residual,
            })
        }
    }
}

pub fn build_optimizer(
    config: &RunConfig,
    space: SearchSpace,
    seed: u64,
) -> Result<Box<dyn Optimizer + Send>> {
    Ok(match config.method {
        Method::Score => Box::new(ScoreOptimizer::new(space, config.score_config(seed))?),
        Method::Bo => Box::new(BoOptimizer::new(space, config.bo_config(seed))?),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub method: String,
    pub problem: ProblemKind,
    pub seed: u64,
    pub best_value: f64,
    pub best_indices: Vec<usize>,
    pub best_point: Vec<f64>,
    pub total_evals: usize,
    pub dropped_evals: usize,
    pub iterations: usize,
    pub gp_fits: usize,
    pub total_time_ms: f64,
    pub gp_fit_time_ms: f64,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub trace: ConvergenceTrace,
    pub summary: RunSummary,
}

/// Runs one optimizer on one problem until the evaluation budget or the
/// search space is exhausted.
pub fn run_experiment(config: &RunConfig, seed: u64) -> Result<RunOutcome> {
    config.validate()?;
    let problem = build_problem(config)?;
    let mut optimizer = build_optimizer(config, problem.space.clone(), seed)?;
    let objective: &dyn Objective = problem.objective.as_ref();
    let report = problem.report_value;

    let mut trace = ConvergenceTrace::new(config.method.as_str(), seed);
    let mut cum_ms = 0.0;
    let mut push = |trace: &mut ConvergenceTrace,
                    iteration: usize,
                    evals: usize,
                    step: StepReport,
                    ms: f64| {
        cum_ms += ms;
        trace.rows.push(TraceRow {
            iteration,
            evals,
            best_value: step.best_value.map_or(f64::INFINITY, report),
            iter_time_ms: ms,
            cum_time_ms: cum_ms,
            gp_fit_ms: step.gp_fit_time.as_secs_f64() * 1e3,
            gp_fits: step.gp_fits,
            suggested: step.suggested,
        });
    };

    let start = Instant::now();
    let init = optimizer.initialize(objective, config.n_init());
    push(
        &mut trace,
        0,
        optimizer.evaluations(),
        init,
        ms_since(start),
    );

    let mut iteration = 0;
    while optimizer.evaluations() < config.max_evals {
        let start = Instant::now();
        let budget = config.max_evals - optimizer.evaluations();
        let Some(step) = optimizer.step(objective, budget) else {
            break;
        };
        iteration += 1;
        push(
            &mut trace,
            iteration,
            optimizer.evaluations(),
            step,
            ms_since(start),
        );
    }

    let history = optimizer.history();
    let best = history.best();
    let summary = RunSummary {
        method: config.method.as_str().into(),
        problem: config.problem,
        seed,
        best_value: trace.final_best(),
        best_indices: best.map(|r| r.indices.clone()).unwrap_or_default(),
        best_point: best.map(|r| r.point.clone()).unwrap_or_default(),
        total_evals: optimizer.evaluations(),
        dropped_evals: optimizer.dropped(),
        iterations: iteration,
        gp_fits: trace.total_gp_fits(),
        total_time_ms: trace.total_time_ms(),
        gp_fit_time_ms: trace.rows.iter().map(|r| r.gp_fit_ms).sum(),
    };
    Ok(RunOutcome { trace, summary })
}

fn ms_since(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn run_stem(config: &RunConfig, seed: u64) -> String {
    let problem = match config.problem {
        ProblemKind::Ackley => format!("ackley{}d", config.dims),
        ProblemKind::Sdm => "sdm".to_string(),
    };
    format!("{}_{problem}_seed{seed}", config.method.as_str())
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Files produced by [`run_and_persist`].
#[derive(Debug, Clone)]
pub struct PersistedRun {
    pub outcome: RunOutcome,
    pub csv: PathBuf,
    pub summary: PathBuf,
}

/// Runs one experiment and writes its trace CSV and JSON summary into
/// `config.out`.
pub fn run_and_persist(config: &RunConfig, seed: u64) -> Result<PersistedRun> {
    ensure_dir(&config.out)?;
    let outcome = run_experiment(config, seed)?;
    let stem = run_stem(config, seed);
    let csv = config.out.join(format!("{stem}.csv"));
    write_csv_file(std::slice::from_ref(&outcome.trace), &csv)?;
    let summary = config.out.join(format!("{stem}.json"));
    let json = serde_json::to_string_pretty(&outcome.summary)?;
    std::fs::write(&summary, json + "\n").map_err(|e| Error::io(&summary, e))?;
    Ok(PersistedRun {
        outcome,
        csv,
        summary,
    })
}

/// Runs `config.seeds` and writes per-seed files, a median CSV and both
/// report kinds.
pub fn run_sweep(config: &RunConfig) -> Result<Vec<PersistedRun>> {
    if config.seeds.is_empty() {
        return Err(Error::config("seeds", "sweep needs at least one seed"));
    }
    config.validate()?;
    ensure_dir(&config.out)?;
    let runs: Vec<PersistedRun> = if config.parallel {
        config
            .seeds
            .par_iter()
            .map(|&s| run_and_persist(config, s))
            .collect::<Result<_>>()?
    } else {
        config
            .seeds
            .iter()
            .map(|&s| run_and_persist(config, s))
            .collect::<Result<_>>()?
    };
    let traces: Vec<ConvergenceTrace> = runs.iter().map(|r| r.outcome.trace.clone()).collect();
    let stem = run_stem(config, 0).replace("_seed0", "_sweep");
    let median = config.out.join(format!("{stem}_median.csv"));
    let file = std::fs::File::create(&median).map_err(|e| Error::io(&median, e))?;
    write_median_csv(&traces, std::io::BufWriter::new(file))?;
    emit_report(&traces, ReportKind::Convergence, &config.out, &stem)?;
    emit_report(&traces, ReportKind::Timing, &config.out, &stem)?;
    Ok(runs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(method: Method) -> RunConfig {
        RunConfig {
            method,
            dims: 3,
            max_evals: 20,
            seed: 5,
            ..Default::default()
        }
    }

    #[test]
    fn budget_equal_to_initial_design_gives_one_row() {
        let config = RunConfig {
            max_evals: 6,
            ..small(Method::Score)
        };
        let out = run_experiment(&config, 1).unwrap();
        assert_eq!(out.trace.rows.len(), 1);
        assert_eq!(out.trace.rows[0].evals, 6);
        assert_eq!(out.summary.iterations, 0);
    }

    #[test]
    fn both_methods_spend_the_budget() {
        for method in [Method::Score, Method::Bo] {
            let out = run_experiment(&small(method), 3).unwrap();
            assert_eq!(out.summary.total_evals, 20);
            assert_eq!(out.trace.rows.len(), 1 + 14);
            out.trace.check_invariants().unwrap();
        }
    }

    #[test]
    fn sdm_run_reports_residuals() {
        let config = RunConfig {
            problem: ProblemKind::Sdm,
            max_evals: 15,
            ..Default::default()
        };
        let out = run_experiment(&config, 0).unwrap();
        assert_eq!(out.summary.best_point.len(), 5);
        assert!(out.summary.best_value > 0.0);
    }
}
