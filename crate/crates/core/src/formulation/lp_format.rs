//! CPLEX LP text export, readable by most third-party LP solvers.
//!
//! ```text
//! \ <comment>
//! Minimize
//!  obj: P_0_1 + P_0_2 + ...
//! Subject To
//!  coding_0: y_0_0_1 - x_0_1_0_1 >= 0
//!  ...
//! End
//! ```
//!
//! Variables are nonnegative, which is the format's default, so no `Bounds`
//! section is written. Rows are named `<kind>_<row index>`; variables follow
//! the program's names (`P_i_k`, `x_m_t_i_k`, `f_m_t_i_l`, `y_m_i_k`, `z_i_k`
//! with node ids `i`, `t`, `l`, session id `m` and chain rank `k` from 1).
//! Numbers use shortest round-trip formatting.

use std::fmt::Write as _;

use super::program::{FlowProgram, Sense};

const MAX_LINE: usize = 200;

pub fn to_lp_format(program: &FlowProgram) -> String {
    let mut out = String::from("\\ minimum total transmit power\nMinimize\n");
    let obj: Vec<(usize, f64)> = program
        .objective
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0.0)
        .map(|(j, &c)| (j, c))
        .collect();
    write_expr(&mut out, " obj:", &obj, program);
    out.push('\n');

    out.push_str("Subject To\n");
    for (r, row) in program.rows.iter().enumerate() {
        let head = format!(" {}_{}:", row.kind.label(), r);
        write_expr(&mut out, &head, &row.coeffs, program);
        let op = match row.sense {
            Sense::Ge => ">=",
            Sense::Eq => "=",
        };
        // `-0` would read oddly
        let rhs = if row.rhs == 0.0 { 0.0 } else { row.rhs };
        let _ = writeln!(out, " {op} {rhs}");
    }
    out.push_str("End\n");
    out
}

fn write_expr(out: &mut String, head: &str, terms: &[(usize, f64)], program: &FlowProgram) {
    let mut line = head.to_string();
    if terms.is_empty() {
        line.push_str(" 0 ");
        line.push_str(&program.names.first().cloned().unwrap_or_default());
    }
    for (k, &(j, a)) in terms.iter().enumerate() {
        let sign = if a < 0.0 { '-' } else { '+' };
        let mag = a.abs();
        let term = if mag == 1.0 {
            format!("{} {}", sign, program.names[j])
        } else {
            format!("{} {} {}", sign, mag, program.names[j])
        };
        let term = if k == 0 && sign == '+' { term[2..].to_string() } else { term };
        if line.len() + term.len() + 1 > MAX_LINE {
            out.push_str(&line);
            out.push('\n');
            line = String::from("   ");
        }
        line.push(' ');
        line.push_str(&term);
    }
    out.push_str(&line);
}
