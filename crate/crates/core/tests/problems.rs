use proptest::prelude::*;

use score_bo::bench::{run_experiment, Method, ProblemKind, RunConfig};
use score_bo::problems::{
    make_synthetic_datasheet, sdm_current, sdm_residual, AckleySpec, Datasheet, SdmParams,
};

const FIXTURE: &str = concat!(
    env!("CARGO_MANIFEST_DIR"),
    "/fixtures/datasheet_default.txt"
);

fn reference() -> SdmParams {
    SdmParams::REFERENCE
}

proptest! {
    #[test]
    fn ackley_is_non_negative(x in prop::collection::vec(-32.768f64..32.768, 1..40)) {
        let spec = AckleySpec::new(x.len()).unwrap();
        prop_assert!(spec.evaluate(&x) >= 0.0);
    }

    #[test]
    fn ackley_ignores_coordinate_order(
        x in prop::collection::vec(-5.0f64..5.0, 2..20),
        seed in any::<u64>(),
    ) {
        use rand::{seq::SliceRandom, SeedableRng};
        let spec = AckleySpec::new(x.len()).unwrap();
        let mut y = x.clone();
        y.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        prop_assert!((spec.evaluate(&x) - spec.evaluate(&y)).abs() < 1e-12);
    }

    #[test]
    fn current_falls_as_voltage_rises(v in 0.0f64..45.0, dv in 0.01f64..5.0) {
        let p = reference();
        prop_assert!(sdm_current(&p, v + dv).unwrap() < sdm_current(&p, v).unwrap());
    }
}

#[test]
fn ackley_at_one_in_one_dimension() {
    let spec = AckleySpec::new(1).unwrap();
    assert!((spec.evaluate(&[1.0]) - 3.625_384_938).abs() < 1e-7);
}

/// Current at `v` by scanning a dense grid of candidate currents for the
/// smallest implicit-equation residual, then refining twice.
fn scan_current(p: &SdmParams, v: f64, lo: f64, hi: f64) -> f64 {
    let g = |i: f64| {
        let vd = v + i * p.r_s;
        (p.i_l - p.i_o * ((vd / p.a).exp() - 1.0) - vd / p.r_sh - i).abs()
    };
    let (mut a, mut b) = (lo, hi);
    for _ in 0..3 {
        let n = 100_000;
        let step = (b - a) / n as f64;
        let k = (0..=n)
            .min_by(|&x, &y| g(a + x as f64 * step).total_cmp(&g(a + y as f64 * step)))
            .unwrap();
        let centre = a + k as f64 * step;
        a = centre - step;
        b = centre + step;
    }
    0.5 * (a + b)
}

#[test]
fn solver_agrees_with_a_dense_scan() {
    let p = reference();
    let scanned = scan_current(&p, 0.0, 8.9, 9.0);
    assert!((sdm_current(&p, 0.0).unwrap() - scanned).abs() < 1e-6);
    let scanned = scan_current(&p, 37.0, 0.0, 9.0);
    assert!((sdm_current(&p, 37.0).unwrap() - scanned).abs() < 1e-6);
}

#[test]
fn fixture_matches_the_forward_simulation() {
    let sheet = Datasheet::read(FIXTURE).unwrap();
    assert_eq!(sheet.ground_truth, Some(reference()));
    let fixture = sheet.targets;
    let computed = make_synthetic_datasheet(&reference()).unwrap();
    assert!((computed.isc - fixture.isc).abs() < 1e-9);
    assert!((computed.voc - fixture.voc).abs() < 1e-9);
    // The power curve is flat at its peak, so the location of the maximum is
    // far less determined than the power itself.
    assert!((computed.vmp - fixture.vmp).abs() < 1e-4);
    assert!((computed.imp - fixture.imp).abs() < 1e-5);
    let (pc, pf) = (computed.vmp * computed.imp, fixture.vmp * fixture.imp);
    assert!(((pc - pf) / pf).abs() < 1e-8);
}

#[test]
fn true_parameters_fit_the_fixture() {
    let sheet = Datasheet::read(FIXTURE).unwrap();
    let r = sdm_residual(&reference(), &sheet.targets);
    assert!(!r.failed && r.value <= 1e-6, "{}", r.value);
}

#[test]
fn wrong_photocurrent_is_penalized() {
    let targets = make_synthetic_datasheet(&reference()).unwrap();
    let wrong = SdmParams {
        i_l: 18.0,
        ..reference()
    };
    assert!(sdm_residual(&wrong, &targets).value >= 0.5);
}

#[test]
fn shunt_resistance_barely_matters_when_large() {
    let targets = make_synthetic_datasheet(&reference()).unwrap();
    let wide = SdmParams {
        r_sh: 8000.0,
        ..reference()
    };
    let a = sdm_residual(&reference(), &targets).value;
    let b = sdm_residual(&wide, &targets).value;
    assert!((a - b).abs() < 0.01, "{a} vs {b}");
}

#[test]
fn open_circuit_voltage_falls_with_saturation_current() {
    let mut last = f64::INFINITY;
    for i_o in [1e-11, 1e-10, 3e-10, 1e-9, 1e-8] {
        let voc = make_synthetic_datasheet(&SdmParams { i_o, ..reference() })
            .unwrap()
            .voc;
        assert!(voc < last);
        last = voc;
    }
}

fn protocol(max_evals: usize, n_init: usize, batch: usize) -> RunConfig {
    RunConfig {
        method: Method::Score,
        problem: ProblemKind::Ackley,
        dims: 10,
        max_evals,
        n_init: Some(n_init),
        batch_size: batch,
        seed: 7,
        ..Default::default()
    }
}

#[test]
fn single_batches_use_one_iteration_per_evaluation() {
    let out = run_experiment(&protocol(300, 20, 1), 7).unwrap();
    assert_eq!(out.summary.iterations, 280);
    assert_eq!(out.trace.rows.len(), 281);
    assert_eq!(out.summary.total_evals, 300);
    out.trace.check_invariants().unwrap();
}

#[test]
fn budget_of_only_the_initial_design() {
    let out = run_experiment(&protocol(20, 20, 1), 7).unwrap();
    assert_eq!(out.trace.rows.len(), 1);
    assert_eq!(out.trace.rows[0].iteration, 0);
}

#[test]
fn batches_of_ten() {
    let out = run_experiment(&protocol(520, 20, 10), 7).unwrap();
    assert_eq!(out.summary.iterations, 50);
    assert_eq!(out.summary.total_evals, 520);
}
