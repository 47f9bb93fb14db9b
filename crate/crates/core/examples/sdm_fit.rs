//! Fits the five single-diode parameters to a synthetic datasheet and
//! compares them with the parameters that generated it.
//!
//! ```text
//! cargo run --release --example sdm_fit
//! ```

use score_bo::bench::{run_experiment, ProblemKind, RunConfig};
use score_bo::problems::{Datasheet, SdmParams};

fn main() -> score_bo::Result<()> {
    let sheet = Datasheet::synthetic(SdmParams::REFERENCE)?;
    let t = sheet.targets;
    println!(
        "targets: isc {:.4} A, vmp {:.3} V, imp {:.4} A, voc {:.3} V",
        t.isc, t.vmp, t.imp, t.voc
    );
    let config = RunConfig {
        problem: ProblemKind::Sdm,
        n_init: Some(50),
        batch_size: 10,
        max_evals: 500,
        ..Default::default()
    };
    for seed in 0..3 {
        let run = run_experiment(&config, seed)?;
        let fit = SdmParams::from_point(&run.summary.best_point);
        let reached = match run.trace.evals_to_reach(0.02) {
            Some(n) => format!("below 0.02 after {n} evals"),
            None => "never below 0.02".into(),
        };
        println!(
            "seed {seed}: residual {:.4}, {reached}",
            run.summary.best_value
        );
        println!(
            "  i_l {:.3}  i_o {:.2e}  r_s {:.3}  r_sh {:.0}  a {:.2}",
            fit.i_l, fit.i_o, fit.r_s, fit.r_sh, fit.a
        );
    }
    let truth = SdmParams::REFERENCE;
    println!(
        "truth:  i_l {:.3}  i_o {:.2e}  r_s {:.3}  r_sh {:.0}  a {:.2}",
        truth.i_l, truth.i_o, truth.r_s, truth.r_sh, truth.a
    );
    Ok(())
}
