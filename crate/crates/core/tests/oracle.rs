use lowsnr::formulation::Sense;
use lowsnr::oracle::{solve_lp, LinearProgram, LinearRow, OracleStatus};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Minimum over all vertices of `{u >= 0, rows}` found by trying every
/// choice of `n` tight constraints. Exponential, fine for tiny programs.
fn by_vertices(lp: &LinearProgram, n: usize) -> Option<f64> {
    // constraint k < rows is a row, otherwise u_{k - rows} >= 0
    let m = lp.rows.len();
    let total = m + n;
    let mut best: Option<f64> = None;
    for mask in 0u32..(1 << total) {
        if mask.count_ones() as usize != n {
            continue;
        }
        let picked: Vec<usize> = (0..total).filter(|k| mask >> k & 1 == 1).collect();
        if lp.rows.iter().enumerate().any(|(r, row)| row.sense == Sense::Eq && !picked.contains(&r)) {
            continue;
        }
        let mut a = DMatrix::zeros(n, n);
        let mut b = DVector::zeros(n);
        for (i, &k) in picked.iter().enumerate() {
            if k < m {
                for &(j, v) in &lp.rows[k].coeffs {
                    a[(i, j)] = v;
                }
                b[i] = lp.rows[k].rhs;
            } else {
                a[(i, k - m)] = 1.0;
            }
        }
        let Some(u) = a.lu().solve(&b) else { continue };
        let ok = u.iter().all(|&x| x >= -1e-9)
            && lp.rows.iter().all(|row| {
                let act = row.activity(u.as_slice());
                match row.sense {
                    Sense::Ge => act >= row.rhs - 1e-9,
                    Sense::Eq => (act - row.rhs).abs() <= 1e-9,
                }
            });
        if ok {
            let v: f64 = lp.objective.iter().zip(u.iter()).map(|(c, x)| c * x).sum();
            best = Some(best.map_or(v, |b: f64| b.min(v)));
        }
    }
    best
}

fn random_lp(rng: &mut ChaCha8Rng, n: usize, m: usize) -> LinearProgram {
    let mut rows: Vec<LinearRow> = (0..m)
        .map(|_| LinearRow {
            sense: Sense::Ge,
            coeffs: (0..n).map(|j| (j, rng.random_range(-1.0..2.0))).collect(),
            rhs: rng.random_range(-1.0..1.5),
        })
        .collect();
    // keep it bounded
    for j in 0..n {
        rows.push(LinearRow {
            sense: Sense::Ge,
            coeffs: vec![(j, -1.0)],
            rhs: -5.0,
        });
    }
    LinearProgram {
        objective: (0..n).map(|_| rng.random_range(-1.0..1.0)).collect(),
        rows,
    }
}

#[test]
fn matches_vertex_enumeration_on_random_programs() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let (mut optimal, mut infeasible) = (0, 0);
    for _ in 0..60 {
        let lp = random_lp(&mut rng, 3, 3);
        let brute = by_vertices(&lp, 3);
        let sol = solve_lp(&lp).unwrap();
        match brute {
            Some(v) => {
                assert_eq!(sol.status, OracleStatus::Optimal);
                assert!((sol.objective - v).abs() < 1e-6 * v.abs().max(1.0), "{} vs {v}", sol.objective);
                optimal += 1;
            }
            None => {
                assert_eq!(sol.status, OracleStatus::Infeasible);
                infeasible += 1;
            }
        }
    }
    assert!(optimal > 10 && infeasible > 0, "{optimal} {infeasible}");
}

#[test]
fn infeasibility_certificates_are_valid_farkas_rays() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut seen = 0;
    for _ in 0..80 {
        let lp = random_lp(&mut rng, 3, 3);
        let sol = solve_lp(&lp).unwrap();
        if sol.status != OracleStatus::Infeasible {
            continue;
        }
        seen += 1;
        let v = sol.certificate.expect("certificate");
        // A^T v <= 0 and b.v > 0 rule out any u >= 0
        for j in 0..3 {
            let col: f64 = lp
                .rows
                .iter()
                .zip(&v)
                .map(|(r, w)| r.coeffs.iter().filter(|c| c.0 == j).map(|c| c.1 * w).sum::<f64>())
                .sum();
            assert!(col <= 1e-7, "column {j}: {col}");
        }
        let bv: f64 = lp.rows.iter().zip(&v).map(|(r, w)| r.rhs * w).sum();
        assert!(bv > 0.0);
        assert!(v.iter().all(|&w| w >= -1e-9));
    }
    assert!(seen > 0);
}

#[test]
fn strong_duality_holds_at_the_optimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..30 {
        let lp = random_lp(&mut rng, 4, 3);
        let sol = solve_lp(&lp).unwrap();
        if sol.is_optimal() {
            assert!((sol.objective - sol.dual_objective).abs() < 1e-6);
            assert!(sol.residuals.primal < 1e-8 && sol.residuals.dual < 1e-8);
        }
    }
}
