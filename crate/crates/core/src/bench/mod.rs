//! Experiment harness: run configuration, convergence traces, CSV/SVG
//! reports and the driver loop behind the `score-bench` binary.

pub mod config;
pub mod report;
pub mod runner;
pub mod trace;

pub use config::{Method, ProblemKind, RunConfig};
pub use report::{emit_report, render_svg, ReportFiles, ReportKind};
pub use runner::{
    build_optimizer, build_problem, run_and_persist, run_experiment, run_sweep, PersistedRun,
    Problem, RunOutcome, RunSummary,
};
pub use trace::{
    median, read_csv, read_csv_file, write_csv, write_csv_file, ConvergenceTrace, TraceRow,
};
