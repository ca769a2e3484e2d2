#![allow(dead_code)]

use lowsnr::formulation::Problem;
use lowsnr::model::{generate_instance, DemandPolicy, NetworkInstance};

/// The seeded comparison set: 4 to 12 nodes, 1 to 3 sessions, with the
/// area growing like `sqrt(n)` so node density stays roughly constant.
pub fn comparison_instance(i: usize) -> NetworkInstance {
    let n = 4 + i * 8 / 19;
    let sessions = 1 + i % 3;
    let area = 10.0 * (n as f64 / 4.0).sqrt();
    generate_instance(1000 + i as u64, n, area, sessions, DemandPolicy::default()).unwrap()
}

pub const COMPARISON_SET: usize = 20;

pub fn small_problem(seed: u64) -> Problem {
    Problem::build(generate_instance(seed, 4, 10.0, 1, DemandPolicy::default()).unwrap()).unwrap()
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}
