//! SCORE on 200-dimensional Ackley with batches of ten and a 500-evaluation
//! budget.
//!
//! ```text
//! cargo run --release --example ackley_200d
//! ```

use score_bo::bench::{median, run_experiment, RunConfig};

fn main() -> score_bo::Result<()> {
    let config = RunConfig {
        dims: 200,
        n_init: Some(50),
        batch_size: 10,
        max_evals: 500,
        ..Default::default()
    };
    let mut finals = Vec::new();
    for seed in 0..5 {
        let s = run_experiment(&config, seed)?.summary;
        println!(
            "seed {seed}: best {:.3} after {} evals, {} surrogate fits, {:.1} s",
            s.best_value,
            s.total_evals,
            s.gp_fits,
            s.total_time_ms / 1e3
        );
        finals.push(s.best_value);
    }
    println!("median best: {:.3}", median(finals));
    Ok(())
}
