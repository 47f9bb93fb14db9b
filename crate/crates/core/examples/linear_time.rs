//! Per-iteration cost of SCORE and the baseline on 5D Ackley over 300
//! iterations. SCORE's surrogates never see more points than a grid has
//! values, while the baseline refits on every evaluation so far.
//!
//! ```text
//! cargo run --release --example linear_time
//! ```

use score_bo::bench::{median, run_experiment, Method, RunConfig};

fn main() -> score_bo::Result<()> {
    for method in [Method::Score, Method::Bo] {
        let config = RunConfig {
            method,
            dims: 5,
            max_evals: 310,
            ..Default::default()
        };
        let runs: Vec<_> = (0..5)
            .map(|seed| run_experiment(&config, seed))
            .collect::<Result<_, _>>()?;
        println!("{}", method.as_str());
        for it in [20, 40, 100, 200, 300] {
            let iter_ms = median(runs.iter().map(|r| r.trace.rows[it].iter_time_ms));
            let fit_ms = median(runs.iter().map(|r| r.trace.rows[it].gp_fit_ms));
            println!("  iteration {it:3}: {iter_ms:8.3} ms per iteration, {fit_ms:8.3} ms fitting");
        }
    }
    Ok(())
}
