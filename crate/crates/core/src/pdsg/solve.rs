use std::io::Write;
use std::path::Path;
use std::time::{Duration, Instant};

use super::dual::DualPoint;
use super::iterate::{iterate, IterationState, StepRule, TraceRow};
use super::layout::Layout;
use crate::error::{Error, Result};
use crate::formulation::{check_feasibility, Problem, Residuals};
use crate::par::Execution;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PdsgOptions {
    pub max_iter: usize,
    /// Stop once `(best primal - best dual) / best dual <= gap_tol`.
    pub gap_tol: f64,
    pub seed: u64,
    pub execution: Execution,
    pub step: StepRule,
    /// Wall-clock budget; the run ends as if `max_iter` was hit.
    pub time_limit: Option<Duration>,
    /// Run the phase-1 check first and fail with [`Error::Infeasible`].
    pub screen: bool,
}

impl Default for PdsgOptions {
    fn default() -> Self {
        PdsgOptions {
            max_iter: 200_000,
            gap_tol: 1e-2,
            seed: 0,
            execution: Execution::default(),
            step: StepRule::default(),
            time_limit: None,
            screen: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PdsgStatus {
    Converged,
    MaxIterations,
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub status: PdsgStatus,
    /// Objective of the best feasible point (infinite if none was found).
    pub objective: f64,
    pub dual_bound: f64,
    pub gap: f64,
    pub iterations: usize,
    pub restarts: usize,
    /// Best feasible point in program variable order.
    pub primal: Option<Vec<f64>>,
    pub dual: DualPoint,
    /// Per hyperarc.
    pub powers: Vec<f64>,
    /// Per hyperarc, `gamma * P`.
    pub rates: Vec<f64>,
    pub residuals: Residuals,
    pub trace: Vec<TraceRow>,
    pub elapsed: Duration,
}

impl SolveReport {
    pub fn converged(&self) -> bool {
        self.status == PdsgStatus::Converged
    }
}

pub fn solve_pdsg(problem: &Problem, options: &PdsgOptions) -> Result<SolveReport> {
    let started = Instant::now();
    if options.screen && !check_feasibility(&problem.program)?.is_feasible() {
        return Err(Error::Infeasible);
    }
    let layout = Layout::new(problem)?;
    let exec = options.execution;
    let mut state = IterationState::new(&layout, options.seed, options.step, exec);

    let mut status = PdsgStatus::MaxIterations;
    while state.k < options.max_iter.max(1) {
        iterate(&mut state, &layout, options.step, exec);
        if state.best_gap <= options.gap_tol {
            status = PdsgStatus::Converged;
            break;
        }
        if options.time_limit.is_some_and(|t| started.elapsed() >= t) {
            break;
        }
    }

    let program = &problem.program;
    let primal = state.incumbents.best.as_ref().map(|r| r.point.clone());
    let (powers, residuals) = match &primal {
        Some(u) => (program.powers(u), program.residuals(u)),
        None => (vec![0.0; program.index.hyperarcs], Residuals::default()),
    };
    let rates = powers.iter().zip(&layout.hyperarcs).map(|(p, h)| p * h.gamma).collect();
    Ok(SolveReport {
        status,
        objective: state.best_primal_value(),
        dual_bound: state.best_dual,
        gap: state.best_gap,
        iterations: state.k,
        restarts: state.restarts,
        primal,
        dual: state.best_dual_point,
        powers,
        rates,
        residuals,
        trace: state.trace,
        elapsed: started.elapsed(),
    })
}

pub const TRACE_HEADER: [&str; 6] = ["iter", "dual_value", "primal_value", "gap", "max_residual", "wallclock_ns"];

/// Writes the trace as CSV. Missing primal values are written as `inf`.
pub fn write_trace<W: Write>(out: W, trace: &[TraceRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Solver(format!("writing trace: {e}"));
    w.write_record(TRACE_HEADER).map_err(io)?;
    for r in trace {
        w.write_record([
            r.iter.to_string(),
            r.dual_value.to_string(),
            r.primal_value.to_string(),
            r.gap.to_string(),
            r.max_residual.to_string(),
            r.wallclock_ns.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Error::Solver(format!("writing trace: {e}")))
}

pub fn write_trace_file(path: impl AsRef<Path>, trace: &[TraceRow]) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    write_trace(std::io::BufWriter::new(file), trace)
}
