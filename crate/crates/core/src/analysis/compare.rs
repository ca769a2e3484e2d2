use std::io::Write;
use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::formulation::Problem;
use crate::model::{derive_seed, generate_instance, DemandPolicy};
use crate::oracle::{solve_exact, OracleStatus};
use crate::par::{self, Execution};
use crate::pdsg::{solve_pdsg, PdsgOptions};

/// One instance solved both ways.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonRow {
    /// Names the sweep cell (or the instance for single runs).
    pub key: String,
    pub seed: u64,
    pub node_count: usize,
    pub session_count: usize,
    pub oracle_objective: f64,
    pub pdsg_objective: f64,
    /// `(pdsg - oracle) / max(|oracle|, 1e-12)`, or zero when both vanish.
    pub relative_gap: f64,
    /// Gap between the decentralized primal and dual bounds.
    pub pdsg_gap: f64,
    pub iterations: usize,
    pub converged: bool,
    pub oracle_wallclock_ms: f64,
    pub pdsg_wallclock_ms: f64,
}

pub const COMPARISON_HEADER: [&str; 12] = [
    "key",
    "seed",
    "node_count",
    "session_count",
    "oracle_objective",
    "pdsg_objective",
    "relative_gap",
    "pdsg_gap",
    "iterations",
    "converged",
    "oracle_wallclock_ms",
    "pdsg_wallclock_ms",
];

/// Solves `problem` with the exact LP and with the decentralized method.
pub fn compare_methods(key: &str, problem: &Problem, options: &PdsgOptions) -> Result<ComparisonRow> {
    let t0 = Instant::now();
    let exact = solve_exact(&problem.program)?;
    let oracle_ms = t0.elapsed().as_secs_f64() * 1e3;
    match exact.status {
        OracleStatus::Optimal => {}
        OracleStatus::Infeasible => return Err(Error::Infeasible),
        OracleStatus::Unbounded => return Err(Error::Solver("oracle reports an unbounded program".into())),
    }
    let report = solve_pdsg(problem, options)?;
    let (oracle, pdsg) = (exact.objective, report.objective);
    let relative_gap = if oracle == 0.0 && pdsg == 0.0 {
        0.0
    } else {
        (pdsg - oracle) / oracle.abs().max(1e-12)
    };
    Ok(ComparisonRow {
        key: key.to_string(),
        seed: options.seed,
        node_count: problem.instance.nodes().len(),
        session_count: problem.instance.sessions().len(),
        oracle_objective: oracle,
        pdsg_objective: pdsg,
        relative_gap,
        pdsg_gap: report.gap,
        iterations: report.iterations,
        converged: report.converged(),
        oracle_wallclock_ms: oracle_ms,
        pdsg_wallclock_ms: report.elapsed.as_secs_f64() * 1e3,
    })
}

/// A grid of generated instances: `seeds` seeds for every node count.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub base_seed: u64,
    pub seeds: usize,
    pub node_counts: Vec<usize>,
    pub sessions: usize,
    pub area: f64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepCell {
    pub key: String,
    pub seed: u64,
    pub node_count: usize,
}

impl SweepSpec {
    /// Cells in row-major order, each with a seed split from `base_seed`.
    pub fn cells(&self) -> Result<Vec<SweepCell>> {
        if self.seeds == 0 || self.node_counts.is_empty() {
            return Err(Error::validation("sweep", "needs at least one seed and one node count"));
        }
        let mut cells = Vec::with_capacity(self.seeds * self.node_counts.len());
        for &n in &self.node_counts {
            for s in 0..self.seeds {
                let index = cells.len() as u64;
                cells.push(SweepCell {
                    key: format!("n{n}_s{s}"),
                    seed: derive_seed(self.base_seed, index),
                    node_count: n,
                });
            }
        }
        Ok(cells)
    }
}

/// Generates and compares every cell of `spec`. Cells run in parallel under
/// `exec`; rows come back in cell order.
pub fn sweep(spec: &SweepSpec, options: &PdsgOptions, exec: Execution) -> Result<Vec<ComparisonRow>> {
    let cells = spec.cells()?;
    par::map(exec, &cells, |cell| {
        let instance = generate_instance(cell.seed, cell.node_count, spec.area, spec.sessions, DemandPolicy::default())?;
        let problem = Problem::build(instance)?;
        let opts = PdsgOptions {
            seed: cell.seed,
            ..*options
        };
        compare_methods(&cell.key, &problem, &opts)
    })
    .into_iter()
    .collect()
}

pub fn write_comparison_csv<W: Write>(out: W, rows: &[ComparisonRow]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    let err = |e: csv::Error| Error::Solver(format!("writing csv: {e}"));
    w.write_record(COMPARISON_HEADER).map_err(err)?;
    for r in rows {
        w.serialize(r).map_err(err)?;
    }
    w.flush().map_err(|e| Error::Solver(format!("writing csv: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cells_are_counted_and_keyed() {
        let spec = SweepSpec {
            base_seed: 7,
            seeds: 5,
            node_counts: vec![4, 8, 12],
            sessions: 1,
            area: 10.0,
        };
        let cells = spec.cells().unwrap();
        assert_eq!(cells.len(), 15);
        assert_eq!(cells[5].key, "n8_s0");
        let mut seeds: Vec<_> = cells.iter().map(|c| c.seed).collect();
        seeds.dedup();
        assert_eq!(seeds.len(), 15);
        let empty = SweepSpec { seeds: 0, ..spec };
        assert!(empty.cells().is_err());
    }
}
