//! A one-dimensional surrogate on grid indices and the expected-improvement
//! scores it produces, printed as a table.
//!
//! ```text
//! cargo run --example gp_surrogate
//! ```

use score_bo::acquisition::{score_grid, AcquisitionParams};
use score_bo::gp::{gp_fit, KernelConfig};

fn main() -> score_bo::Result<()> {
    let xs = [2.0, 5.0, 9.0, 14.0];
    let ys = [3.1, 1.2, 2.4, 4.0];
    let inputs: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x]).collect();
    let model = gp_fit(&inputs, &ys, &KernelConfig::for_targets(&ys, 1.5))?;

    let grid: Vec<Vec<f64>> = (0..=16).map(|i| vec![f64::from(i)]).collect();
    let post = model.predict_standardized(&grid);
    let best = model.standardize(1.2);
    let scores = score_grid(&post, AcquisitionParams::new(best, 0.01)?);

    println!(" x    mean    std      EI");
    for ((x, p), s) in grid.iter().zip(&post).zip(&scores) {
        let mean = p.mean * model.target_std() + model.target_mean();
        let std = p.std * model.target_std();
        println!("{:2}  {mean:6.3}  {std:5.3}  {s:.4}", x[0]);
    }
    Ok(())
}
