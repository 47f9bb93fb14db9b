//! SCORE against the standard GP baseline on 10D Ackley, 300 evaluations,
//! ten seeds each.
//!
//! ```text
//! cargo run --release --example ackley_10d
//! ```

use score_bo::bench::{median, run_experiment, Method, RunConfig};

fn main() -> score_bo::Result<()> {
    let seeds: Vec<u64> = (0..10).collect();
    for method in [Method::Score, Method::Bo] {
        let config = RunConfig {
            method,
            dims: 10,
            max_evals: 300,
            ..Default::default()
        };
        let mut finals = Vec::new();
        for &seed in &seeds {
            let run = run_experiment(&config, seed)?;
            let s = &run.summary;
            println!(
                "{:5} seed {seed}: best {:.4} after {} evals, {:.0} ms",
                s.method, s.best_value, s.total_evals, s.total_time_ms
            );
            finals.push(s.best_value);
        }
        println!("{} median best: {:.4}\n", method.as_str(), median(finals));
    }
    Ok(())
}
