mod common;

use lowsnr::analysis::{compare_methods, interference_error, linearity_error, linearity_sweep, sweep, SweepSpec};
use lowsnr::cli::two_transmitter_instance;
use lowsnr::formulation::Problem;
use lowsnr::model::{single_link, NodeId};
use lowsnr::par::Execution;
use lowsnr::pdsg::PdsgOptions;

/// `1 - ln(1+x)/x` from its alternating series, accurate for small `x`.
fn linear_excess_series(x: f64) -> f64 {
    (1..40).map(|k| (-1f64).powi(k + 1) * x.powi(k) / (k + 1) as f64).sum()
}

#[test]
fn linearity_error_follows_the_series() {
    for x in [1e-6, 1e-5, 1e-4, 1e-3, 1e-2] {
        let row = linearity_error(x, 1.0, 2.0, 1.0, 1.0);
        assert!((row.relative_error - linear_excess_series(x)).abs() < 1e-12, "x {x}");
    }
    let row = linearity_error(1e-3, 1.0, 2.0, 1.0, 1.0);
    assert!((row.relative_error - 4.9975e-4).abs() < 1e-7);
}

#[test]
fn physical_units_reduce_to_snr_per_dof() {
    // P / (W D^alpha N0) = 2e-3 / (4 * 8 * 0.5) with D = 2, alpha = 3
    let row = linearity_error(2e-3, 2.0, 3.0, 0.5, 4.0);
    let x = 2e-3 / (4.0 * 8.0 * 0.5);
    assert!(common::rel(row.snr_per_dof, x) < 1e-15);
    assert!(common::rel(row.linear_rate, 2e-3 / (8.0 * 0.5)) < 1e-15);
    assert!(common::rel(row.exact_rate, 4.0 * (1.0 + x).ln()) < 1e-12);
}

#[test]
fn regime_flag_marks_large_snr() {
    let report = linearity_sweep(&[1e-4, 1e-2, 0.02, 1.0]);
    let flags: Vec<bool> = report.rows.iter().map(|r| r.out_of_regime).collect();
    assert_eq!(flags, vec![false, false, true, true]);
    assert!((report.max_relative_error - (1.0 - 2f64.ln())).abs() < 1e-15);
}

#[test]
fn two_weak_transmitters_barely_interfere() {
    let inst = two_transmitter_instance(1e-6).unwrap();
    let rows = interference_error(&inst, &[NodeId(0), NodeId(1)], NodeId(2)).unwrap();
    // sinr = P / (1 + P), snr = P, by hand
    let p: f64 = 1e-6;
    let exact = (p / (1.0 + p)).ln_1p();
    let step_one = (p.ln_1p() - exact) / p.ln_1p();
    for r in &rows {
        assert!(common::rel(r.rate_exact, exact) < 1e-12);
        assert!(common::rel(r.step_one_error, step_one) < 1e-6);
        assert!((r.step_one_error - 1e-6).abs() < 1e-8);
        assert!(!r.out_of_regime);
    }
}

#[test]
fn strong_transmitters_are_flagged() {
    let inst = two_transmitter_instance(1.0).unwrap();
    let rows = interference_error(&inst, &[NodeId(0), NodeId(1)], NodeId(2)).unwrap();
    assert!(rows.iter().all(|r| r.out_of_regime && r.step_one_error > 0.1));
}

#[test]
fn comparison_on_small_instances() {
    for seed in [1, 2] {
        let row = compare_methods("x", &common::small_problem(seed), &PdsgOptions::default()).unwrap();
        assert!((-1e-9..=0.01).contains(&row.relative_gap), "{row:?}");
        assert!(row.converged);
    }
    let empty = single_link(1.0, 0.1, 1.0).unwrap().with_sessions(vec![]).unwrap();
    let row = compare_methods("empty", &Problem::build(empty).unwrap(), &PdsgOptions::default()).unwrap();
    assert_eq!((row.oracle_objective.abs() < 1e-9, row.pdsg_objective), (true, 0.0));
}

#[test]
fn sweeps_are_deterministic_and_ordered() {
    let spec = SweepSpec {
        base_seed: 4,
        seeds: 2,
        node_counts: vec![4, 5],
        sessions: 1,
        area: 10.0,
    };
    let opts = PdsgOptions {
        execution: Execution::Sequential,
        ..Default::default()
    };
    let a = sweep(&spec, &opts, Execution::Parallel).unwrap();
    let b = sweep(&spec, &opts, Execution::Sequential).unwrap();
    assert_eq!(a.len(), 4);
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.key, y.key);
        assert_eq!(x.pdsg_objective.to_bits(), y.pdsg_objective.to_bits());
        assert!((-1e-9..=0.01).contains(&x.relative_gap));
    }
}
