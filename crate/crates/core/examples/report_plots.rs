//! Renders convergence and timing plots for a few short runs of each
//! method into `out/example_report_*`.
//!
//! ```text
//! cargo run --release --example report_plots
//! ```

use score_bo::bench::{emit_report, run_experiment, Method, ReportKind, RunConfig};

fn main() -> score_bo::Result<()> {
    let mut traces = Vec::new();
    for method in [Method::Score, Method::Bo] {
        let config = RunConfig {
            method,
            dims: 6,
            max_evals: 120,
            ..Default::default()
        };
        for seed in 0..3 {
            traces.push(run_experiment(&config, seed)?.trace);
        }
    }
    for kind in [ReportKind::Convergence, ReportKind::Timing] {
        let files = emit_report(&traces, kind, "out", "example_report")?;
        println!("{} and {}", files.csv.display(), files.svg.display());
    }
    Ok(())
}
