//! Exact reference solver.
//!
//! The interior-point solve is delegated to clarabel; this module only maps
//! the program into clarabel's cone form, maps the multipliers back to row
//! duals, and certifies the answer independently (primal residuals, reduced
//! cost signs, duality gap, complementary slackness).

use clarabel::algebra::CscMatrix;
use clarabel::solver::{
    DefaultSettings, DefaultSolver, IPSolver, NonnegativeConeT, SolverStatus, SupportedConeT, ZeroConeT,
};

use crate::error::{Error, Result};
use crate::formulation::{FlowProgram, Sense};

/// Primal residual bound on normalized rows.
pub const RESIDUAL_TOL: f64 = 1e-8;
/// Relative primal/dual objective agreement.
pub const GAP_TOL: f64 = 1e-7;
/// Bound on `slack * dual` per row.
pub const COMPLEMENTARITY_TOL: f64 = 1e-7;

/// `min c·u` over `u >= 0` subject to rows `a·u >= b` or `a·u = b`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub rows: Vec<LinearRow>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearRow {
    pub sense: Sense,
    pub coeffs: Vec<(usize, f64)>,
    pub rhs: f64,
}

impl LinearRow {
    pub fn activity(&self, u: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(j, a)| a * u[j]).sum()
    }
}

impl From<&FlowProgram> for LinearProgram {
    fn from(p: &FlowProgram) -> Self {
        LinearProgram {
            objective: p.objective.clone(),
            rows: p
                .rows
                .iter()
                .map(|r| LinearRow {
                    sense: r.sense,
                    coeffs: r.coeffs.clone(),
                    rhs: r.rhs,
                })
                .collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Worst-case certification measures of a solution.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Certification {
    /// Largest row violation or negative variable.
    pub primal: f64,
    /// Largest negative reduced cost or wrong-signed inequality dual.
    pub dual: f64,
    /// `|primal - dual objective| / max(1, |primal objective|)`.
    pub relative_gap: f64,
    /// Largest `slack * dual` over inequality rows.
    pub complementarity: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleSolution {
    pub status: OracleStatus,
    pub primal: Vec<f64>,
    /// One multiplier per row: `>= 0` on inequality rows, free on equalities,
    /// with reduced costs `c - A^T duals >= 0`.
    pub duals: Vec<f64>,
    pub objective: f64,
    pub dual_objective: f64,
    pub residuals: Certification,
    /// For infeasible programs: row weights `v` (nonnegative on inequality
    /// rows) with `A^T v <= 0` and `b·v > 0`, normalized to `b·v = 1`.
    pub certificate: Option<Vec<f64>>,
}

impl OracleSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == OracleStatus::Optimal
    }
}

/// Solves the assembled program to certified optimality.
pub fn solve_exact(program: &FlowProgram) -> Result<OracleSolution> {
    solve_lp(&LinearProgram::from(program))
}

pub fn solve_lp(lp: &LinearProgram) -> Result<OracleSolution> {
    let n = lp.objective.len();
    let m = lp.rows.len();
    if n == 0 {
        return trivial(lp);
    }

    // clarabel wants `A u + s = b`, `s` in a product cone. Equalities come
    // first (zero cone), then `>=` rows negated, then the `u >= 0` bounds.
    let eq: Vec<usize> = (0..m).filter(|&r| lp.rows[r].sense == Sense::Eq).collect();
    let ge: Vec<usize> = (0..m).filter(|&r| lp.rows[r].sense == Sense::Ge).collect();
    let mut ti = Vec::new();
    let mut tj = Vec::new();
    let mut tv = Vec::new();
    let mut b = Vec::with_capacity(m + n);
    for (k, &r) in eq.iter().chain(ge.iter()).enumerate() {
        let row = &lp.rows[r];
        let sign = if row.sense == Sense::Eq { 1.0 } else { -1.0 };
        for &(j, a) in &row.coeffs {
            if a != 0.0 {
                ti.push(k);
                tj.push(j);
                tv.push(sign * a);
            }
        }
        b.push(sign * row.rhs);
    }
    for j in 0..n {
        ti.push(m + j);
        tj.push(j);
        tv.push(-1.0);
        b.push(0.0);
    }
    let a = CscMatrix::new_from_triplets(m + n, n, ti, tj, tv);
    let p = CscMatrix::<f64>::zeros((n, n));
    let mut cones: Vec<SupportedConeT<f64>> = Vec::new();
    if !eq.is_empty() {
        cones.push(ZeroConeT(eq.len()));
    }
    cones.push(NonnegativeConeT(ge.len() + n));

    let settings = DefaultSettings {
        verbose: false,
        max_iter: 400,
        tol_gap_abs: 1e-10,
        tol_gap_rel: 1e-10,
        tol_feas: 1e-10,
        tol_ktratio: 1e-8,
        max_threads: 1,
        ..DefaultSettings::default()
    };
    let mut solver = DefaultSolver::new(&p, &lp.objective, &a, &b, &cones, settings)
        .map_err(|e| Error::Solver(format!("{e:?}")))?;
    solver.solve();
    let sol = &solver.solution;

    // back to row order
    let mut v = vec![0.0; m];
    for (k, &r) in eq.iter().enumerate() {
        v[r] = -sol.z[k];
    }
    for (k, &r) in ge.iter().enumerate() {
        v[r] = sol.z[eq.len() + k];
    }

    match sol.status {
        SolverStatus::Solved | SolverStatus::AlmostSolved => {
            let primal: Vec<f64> = sol.x.iter().map(|&x| x.max(0.0)).collect();
            let duals: Vec<f64> = v
                .iter()
                .zip(&lp.rows)
                .map(|(&y, r)| if r.sense == Sense::Ge { y.max(0.0) } else { y })
                .collect();
            let out = certify(lp, primal, duals);
            let c = out.residuals;
            if c.primal > RESIDUAL_TOL || c.relative_gap > GAP_TOL || c.complementarity > COMPLEMENTARITY_TOL {
                return Err(Error::Solver(format!(
                    "solution failed certification ({:?}): primal {:.2e}, gap {:.2e}, complementarity {:.2e}",
                    sol.status, c.primal, c.relative_gap, c.complementarity
                )));
            }
            Ok(out)
        }
        SolverStatus::PrimalInfeasible | SolverStatus::AlmostPrimalInfeasible => {
            let bv: f64 = lp.rows.iter().zip(&v).map(|(r, y)| r.rhs * y).sum();
            let certificate = (bv > 0.0).then(|| v.iter().map(|y| y / bv).collect());
            Ok(OracleSolution {
                status: OracleStatus::Infeasible,
                primal: vec![0.0; n],
                duals: vec![0.0; m],
                objective: f64::INFINITY,
                dual_objective: f64::INFINITY,
                residuals: Certification::default(),
                certificate,
            })
        }
        SolverStatus::DualInfeasible | SolverStatus::AlmostDualInfeasible => {
            Err(Error::Solver("program is unbounded below".into()))
        }
        other => Err(Error::Solver(format!("interior-point solve ended with {other:?}"))),
    }
}

fn trivial(lp: &LinearProgram) -> Result<OracleSolution> {
    let feasible = lp.rows.iter().all(|r| match r.sense {
        Sense::Ge => r.rhs <= RESIDUAL_TOL,
        Sense::Eq => r.rhs.abs() <= RESIDUAL_TOL,
    });
    Ok(OracleSolution {
        status: if feasible { OracleStatus::Optimal } else { OracleStatus::Infeasible },
        primal: Vec::new(),
        duals: vec![0.0; lp.rows.len()],
        objective: if feasible { 0.0 } else { f64::INFINITY },
        dual_objective: if feasible { 0.0 } else { f64::INFINITY },
        residuals: Certification::default(),
        certificate: None,
    })
}

/// Computes the certification measures of a primal/dual pair.
pub fn certify(lp: &LinearProgram, primal: Vec<f64>, duals: Vec<f64>) -> OracleSolution {
    let objective: f64 = lp.objective.iter().zip(&primal).map(|(c, x)| c * x).sum();
    let dual_objective: f64 = lp.rows.iter().zip(&duals).map(|(r, y)| r.rhs * y).sum();

    let mut reduced = lp.objective.clone();
    let mut res = Certification::default();
    for (row, &y) in lp.rows.iter().zip(&duals) {
        let slack = row.activity(&primal) - row.rhs;
        match row.sense {
            Sense::Ge => {
                res.primal = res.primal.max(-slack);
                res.dual = res.dual.max(-y);
                res.complementarity = res.complementarity.max((slack * y).abs());
            }
            Sense::Eq => res.primal = res.primal.max(slack.abs()),
        }
        for &(j, a) in &row.coeffs {
            reduced[j] -= a * y;
        }
    }
    for (&d, &x) in reduced.iter().zip(&primal) {
        res.primal = res.primal.max(-x);
        res.dual = res.dual.max(-d);
        res.complementarity = res.complementarity.max((d * x).abs());
    }
    res.relative_gap = (objective - dual_objective).abs() / objective.abs().max(1.0);

    OracleSolution {
        status: OracleStatus::Optimal,
        primal,
        duals,
        objective,
        dual_objective,
        residuals: res,
        certificate: None,
    }
}
