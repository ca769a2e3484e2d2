use crate::error::Result;
use crate::formulation::{FlowProgram, Sense};
use crate::oracle::{solve_lp, LinearProgram, LinearRow, OracleStatus};

/// Margin below which no strictly feasible point is taken to exist.
pub const SLATER_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub enum Slater {
    /// Every inequality row can hold with slack at least `margin` at once.
    Holds { margin: f64 },
    /// Rows whose multipliers block a strictly feasible point.
    Fails { rows: Vec<usize> },
}

impl Slater {
    pub fn holds(&self) -> bool {
        matches!(self, Slater::Holds { .. })
    }
}

/// Maximizes `t <= 1` such that every inequality row holds with slack `t`
/// while equalities hold exactly. Slater's condition holds iff `t > 0`.
pub fn slater_check(program: &FlowProgram) -> Result<Slater> {
    let n = program.var_count();
    let t = n;
    let mut lp = LinearProgram::from(program);
    lp.objective = vec![0.0; n + 1];
    lp.objective[t] = -1.0;
    let ge: Vec<usize> = (0..lp.rows.len()).filter(|&r| lp.rows[r].sense == Sense::Ge).collect();
    for &r in &ge {
        lp.rows[r].coeffs.push((t, -1.0));
    }
    lp.rows.push(LinearRow {
        sense: Sense::Ge,
        coeffs: vec![(t, -1.0)],
        rhs: -1.0,
    });

    let sol = solve_lp(&lp)?;
    match sol.status {
        OracleStatus::Optimal => {
            let margin = sol.primal[t];
            if margin > SLATER_TOL {
                Ok(Slater::Holds { margin })
            } else {
                let rows = ge.into_iter().filter(|&r| sol.duals[r] > SLATER_TOL).collect();
                Ok(Slater::Fails { rows })
            }
        }
        _ => {
            let rows = sol.certificate.map_or_else(Vec::new, |v| {
                (0..program.row_count()).filter(|&r| v[r].abs() > SLATER_TOL).collect()
            });
            Ok(Slater::Fails { rows })
        }
    }
}
