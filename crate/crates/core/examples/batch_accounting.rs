//! Same budget, different batch sizes: surrogate fits drop in proportion to
//! the batch size.
//!
//! ```text
//! cargo run --release --example batch_accounting
//! ```

use score_bo::bench::{run_experiment, RunConfig};

fn main() -> score_bo::Result<()> {
    for batch_size in [1, 5, 10, 20] {
        let config = RunConfig {
            dims: 10,
            n_init: Some(20),
            batch_size,
            max_evals: 300,
            ..Default::default()
        };
        let s = run_experiment(&config, 0)?.summary;
        println!(
            "B={batch_size:2}: {:3} iterations, {:4} fits, best {:.3}, {:.0} ms",
            s.iterations, s.gp_fits, s.best_value, s.total_time_ms
        );
    }
    Ok(())
}
