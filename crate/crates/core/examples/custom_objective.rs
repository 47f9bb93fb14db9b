//! Driving the optimizer directly on a user-defined objective over a mixed
//! linear and logarithmic grid.
//!
//! ```text
//! cargo run --release --example custom_objective
//! ```

use score_bo::engine::{ScoreConfig, ScoreOptimizer};
use score_bo::optimizer::Optimizer;
use score_bo::space::{make_grid, GridScale, SearchSpace};

fn main() -> score_bo::Result<()> {
    let space = SearchSpace::new(vec![
        make_grid("learning_rate", 1e-5, 1e-1, 41, GridScale::Log)?,
        make_grid("momentum", 0.0, 0.99, 34, GridScale::Linear)?,
        make_grid("width", 16.0, 512.0, 32, GridScale::Log)?,
    ])?;
    // A made-up validation loss with its optimum near (3e-3, 0.9, 128).
    let loss = |x: &[f64]| {
        let lr = (x[0].log10() + 2.5).powi(2);
        let m = 4.0 * (x[1] - 0.9).powi(2);
        let w = 0.3 * (x[2].log2() - 7.0).powi(2);
        lr + m + w
    };

    let mut opt = ScoreOptimizer::new(
        space,
        ScoreConfig {
            batch_size: 4,
            seed: 1,
            ..Default::default()
        },
    )?;
    opt.initialize(&loss, 8);
    while opt.evaluations() < 120 {
        let Some(step) = opt.step(&loss, 120 - opt.evaluations()) else {
            break;
        };
        if opt.iteration() % 5 == 0 {
            println!(
                "iteration {:2}: {} evals, best {:.4}",
                opt.iteration(),
                opt.evaluations(),
                step.best_value.unwrap()
            );
        }
    }
    let best = opt.history().best().unwrap();
    println!("best point {:?} with loss {:.4}", best.point, best.value);
    Ok(())
}
