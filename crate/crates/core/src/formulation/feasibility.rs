use super::program::{FlowProgram, RowKind, RowOwner, VarKind};
use crate::error::{Error, Result};
use crate::oracle::{solve_lp, LinearProgram, OracleStatus};

/// Phase-1 optimum at or below which a program counts as feasible.
pub const PHASE1_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub enum Feasibility {
    Feasible {
        /// Phase-1 optimum (total slack), at most [`PHASE1_TOL`].
        violation: f64,
    },
    Infeasible {
        /// Session ids whose flow crosses a slacked capacity or budget row.
        sessions: Vec<usize>,
        violation: f64,
    },
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible { .. })
    }

    pub fn violation(&self) -> f64 {
        match self {
            Feasibility::Feasible { violation } | Feasibility::Infeasible { violation, .. } => *violation,
        }
    }
}

/// Phase-1 test: adds a nonnegative slack to every capacity and budget row
/// and minimizes their sum. Every other row family can always be satisfied
/// once sinks are reachable, so a zero optimum means the program is feasible.
pub fn check_feasibility(program: &FlowProgram) -> Result<Feasibility> {
    let n = program.var_count();
    let mut lp = LinearProgram::from(program);
    lp.objective.iter_mut().for_each(|c| *c = 0.0);
    let mut slack_rows = Vec::new();
    for (r, row) in program.rows.iter().enumerate() {
        if matches!(row.kind, RowKind::Capacity | RowKind::Budget) {
            let s = n + slack_rows.len();
            lp.rows[r].coeffs.push((s, 1.0));
            slack_rows.push(r);
        }
    }
    lp.objective.resize(n + slack_rows.len(), 0.0);
    for s in n..lp.objective.len() {
        lp.objective[s] = 1.0;
    }

    let sol = solve_lp(&lp)?;
    if sol.status != OracleStatus::Optimal {
        return Err(Error::Solver(format!("phase-1 program reported {:?}", sol.status)));
    }
    let violation = sol.objective.max(0.0);
    if violation <= PHASE1_TOL {
        return Ok(Feasibility::Feasible { violation });
    }

    let u = &sol.primal;
    let idx = program.index;
    let mut sessions = Vec::new();
    let tol = PHASE1_TOL;
    for (k, &r) in slack_rows.iter().enumerate() {
        if u[n + k] <= tol {
            continue;
        }
        let hyperarcs: Vec<usize> = match program.rows[r].owner {
            RowOwner::Capacity { hyperarc } => vec![hyperarc],
            RowOwner::Budget { node } => (0..idx.hyperarcs)
                .filter(|&h| program.structure.hyperarc_sender[h] == node)
                .collect(),
            _ => unreachable!("only capacity and budget rows carry slacks"),
        };
        for (j, &uj) in u.iter().enumerate().take(idx.len()) {
            if let VarKind::Coded { hyperarc, session } = idx.kind(j) {
                if hyperarcs.contains(&hyperarc) && uj > tol && !sessions.contains(&session) {
                    sessions.push(session);
                }
            }
        }
    }
    let mut ids: Vec<usize> = sessions
        .into_iter()
        .map(|m| program.structure.commodities.iter().find(|c| c.session == m).map_or(m, |c| c.session_id))
        .collect();
    ids.sort_unstable();
    Ok(Feasibility::Infeasible {
        sessions: ids,
        violation,
    })
}
