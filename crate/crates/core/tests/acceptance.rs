//! End-to-end acceptance suite. Runs without the libtest harness so every
//! criterion prints exactly one PASS or FAIL line, then exits nonzero if any
//! of them failed.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use lowsnr::analysis::{interference_error, linearity_sweep};
use lowsnr::cli::two_transmitter_instance;
use lowsnr::formulation::{check_feasibility, CodingSemantics, Problem, RowKind, PHASE1_TOL};
use lowsnr::model::{butterfly, generate_instance, single_link, DemandPolicy, NodeId, write_instance};
use lowsnr::oracle::solve_exact;
use lowsnr::par::Execution;
use lowsnr::pdsg::{dual_value, dual_value_direct, solve_pdsg, write_trace, DualPoint, Layout, PdsgOptions, SolveReport};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Coded over sum-semantics optimum on the butterfly, from the path
/// enumeration in the formulation tests (5 / 8).
const BUTTERFLY_RATIO: f64 = 0.625;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// One finished PDSG run on the comparison set.
struct Run {
    key: String,
    problem: Problem,
    oracle: f64,
    report: SolveReport,
    seconds: f64,
}

fn comparison_runs() -> Vec<Run> {
    (0..common::COMPARISON_SET)
        .map(|i| {
            let started = Instant::now();
            let problem = Problem::build(common::comparison_instance(i)).unwrap();
            let oracle = solve_exact(&problem.program).unwrap().objective;
            let options = PdsgOptions {
                seed: i as u64,
                time_limit: Some(Duration::from_secs(60)),
                ..Default::default()
            };
            let report = solve_pdsg(&problem, &options).unwrap();
            Run {
                key: format!("#{i}"),
                problem,
                oracle,
                report,
                seconds: started.elapsed().as_secs_f64(),
            }
        })
        .collect()
}

fn oracle_equivalence(runs: &[Run]) -> Outcome {
    let mut worst = (0.0f64, String::new());
    let mut slowest = (0.0f64, String::new());
    let mut bad = Vec::new();
    for r in runs {
        let rel = (r.report.objective - r.oracle) / r.oracle;
        if rel.abs() > worst.0 {
            worst = (rel.abs(), r.key.clone());
        }
        if r.seconds > slowest.0 {
            slowest = (r.seconds, r.key.clone());
        }
        if !(rel.abs() <= 0.01 && r.seconds < 60.0) {
            bad.push(format!("{} rel {rel:.2e} in {:.1}s", r.key, r.seconds));
        }
    }
    outcome(
        bad.is_empty(),
        format!(
            "{} instances ({} converged), worst rel {:.2e} ({}), slowest {:.1}s ({}){}",
            runs.len(),
            runs.iter().filter(|r| r.report.converged()).count(),
            worst.0,
            worst.1,
            slowest.0,
            slowest.1,
            if bad.is_empty() { String::new() } else { format!("; failing: {}", bad.join(", ")) }
        ),
    )
}

fn analytic_single_link() -> Outcome {
    let mut worst_oracle = 0.0f64;
    let mut worst_pdsg = 0.0f64;
    for (d, r) in [(1.0, 0.3), (2.0, 0.2), (0.5, 0.9)] {
        let inst = single_link(d, r, 1.0).unwrap();
        let expected = r * d.powf(inst.alpha()) * inst.noise_density();
        let p = Problem::build(inst).unwrap();
        worst_oracle = worst_oracle.max(common::rel(solve_exact(&p.program).unwrap().objective, expected));
        let report = solve_pdsg(&p, &PdsgOptions { gap_tol: 1e-3, ..Default::default() }).unwrap();
        worst_pdsg = worst_pdsg.max(common::rel(report.objective, expected));
    }
    outcome(
        worst_oracle <= 1e-6 && worst_pdsg <= 1e-3,
        format!("oracle rel {worst_oracle:.2e}, pdsg rel {worst_pdsg:.2e}"),
    )
}

fn coding_beats_sum() -> Outcome {
    let (inst, hs) = butterfly().unwrap();
    let solve = |semantics| {
        let p = Problem::from_hyperarcs(inst.clone(), hs.clone(), semantics).unwrap();
        solve_exact(&p.program).unwrap().objective
    };
    let (coded, sum) = (solve(CodingSemantics::Max), solve(CodingSemantics::Sum));
    let ratio = coded / sum;
    outcome(
        coded < sum && (ratio - BUTTERFLY_RATIO).abs() <= 1e-6,
        format!("coded {coded:.6}, sum {sum:.6}, ratio {ratio:.6} (pinned {BUTTERFLY_RATIO})"),
    )
}

fn weak_duality(runs: &[Run]) -> Outcome {
    let mut rows = 0;
    let mut worst_excess = f64::NEG_INFINITY;
    let mut bad = Vec::new();
    for r in runs {
        let mut last_gap = f64::INFINITY;
        for t in &r.report.trace {
            rows += 1;
            if t.primal_value.is_finite() {
                worst_excess = worst_excess.max(t.dual_value - t.primal_value);
                if t.dual_value > t.primal_value + 1e-9 {
                    bad.push(format!("{} iter {} dual above primal", r.key, t.iter));
                }
            }
            if t.gap > last_gap {
                bad.push(format!("{} iter {} gap rose", r.key, t.iter));
            }
            last_gap = t.gap;
        }
    }
    outcome(
        bad.is_empty(),
        format!(
            "{rows} trace rows, max dual - primal {worst_excess:.2e}{}",
            if bad.is_empty() { String::new() } else { format!("; {}", bad.join(", ")) }
        ),
    )
}

fn feasibility(runs: &[Run]) -> Outcome {
    let (mut conservation, mut budget, mut capacity) = (0.0f64, 0.0f64, 0.0f64);
    let mut trace_residual = 0.0f64;
    for r in runs {
        for t in r.report.trace.iter().filter(|t| t.primal_value.is_finite()) {
            trace_residual = trace_residual.max(t.max_residual);
        }
        let Some(u) = &r.report.primal else {
            return outcome(false, format!("{} reported no primal point", r.key));
        };
        let prog = &r.problem.program;
        conservation = conservation.max(r.report.residuals.conservation);
        let powers = prog.powers(u);
        let mut spent = vec![0.0; prog.structure.node_count];
        for (h, &p) in powers.iter().enumerate() {
            spent[prog.structure.hyperarc_sender[h]] += p;
        }
        for (i, s) in spent.iter().enumerate() {
            budget = budget.max(s - prog.structure.budgets[i]);
        }
        for row in prog.rows.iter().filter(|row| row.kind == RowKind::Capacity) {
            capacity = capacity.max(row.violation(u));
        }
    }
    outcome(
        trace_residual <= 1e-8 && conservation <= 1e-8 && budget <= 1e-9 && capacity <= 1e-9,
        format!(
            "trace residual {trace_residual:.1e}, conservation {conservation:.1e}, \
             budget excess {budget:.1e}, capacity violation {capacity:.1e}"
        ),
    )
}

fn random_dual(layout: &Layout, rng: &mut ChaCha8Rng) -> DualPoint {
    let mut d = DualPoint::zeros_like(&layout.dual_caps);
    let floor = layout.dual_floor();
    for ((db, cb), fb) in d.blocks_mut().into_iter().zip(layout.dual_caps.blocks()).zip(floor.blocks()) {
        for ((x, &hi), &lo) in db.iter_mut().zip(cb).zip(fb) {
            *x = rng.random_range(lo..=hi);
        }
    }
    d
}

fn decomposition(runs: &[Run]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    let mut points = 0;
    for r in runs {
        let layout = Layout::new(&r.problem).unwrap();
        for _ in 0..100 {
            let d = random_dual(&layout, &mut rng);
            let split = dual_value(&layout, &d, Execution::Sequential).value;
            worst = worst.max((split - dual_value_direct(&r.problem.program, &layout, &d)).abs());
            points += 1;
        }
    }
    outcome(worst <= 1e-9, format!("{points} dual points, max |split - direct| {worst:.2e}"))
}

fn linearity() -> Outcome {
    let xs = [1e-5, 1e-4, 1e-3];
    let report = linearity_sweep(&xs);
    let mut worst = 0.0f64;
    for (row, &x) in report.rows.iter().zip(&xs) {
        let expected = 1.0 - (1.0 + x).ln() / x;
        worst = worst.max((row.relative_error - expected).abs());
    }
    let monotone = report.rows.windows(2).all(|w| w[1].relative_error > w[0].relative_error);
    let errors: Vec<String> = report.rows.iter().map(|r| format!("{:.3e}", r.relative_error)).collect();
    outcome(
        worst <= 1e-9 && monotone,
        format!("errors [{}], max deviation {worst:.1e}, monotone {monotone}", errors.join(", ")),
    )
}

fn interference() -> Outcome {
    let inst = two_transmitter_instance(1e-6).unwrap();
    let rows = interference_error(&inst, &[NodeId(0), NodeId(1)], NodeId(2)).unwrap();
    let worst = rows.iter().map(|r| r.step_one_error).fold(0.0, f64::max);
    let x = rows.iter().map(|r| r.snr_per_dof).fold(0.0, f64::max);
    outcome(worst <= 2e-6, format!("x {x:.1e}, step-one error {worst:.3e}"))
}

fn trace_without_wallclock(report: &SolveReport) -> String {
    let mut buf = Vec::new();
    write_trace(&mut buf, &report.trace).unwrap();
    String::from_utf8(buf)
        .unwrap()
        .lines()
        .map(|l| l.rsplit_once(',').map_or(l, |(head, _)| head))
        .collect::<Vec<_>>()
        .join("\n")
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut checked = 0;
    for seed in [3u64, 17, 101] {
        let make = || generate_instance(seed, 6, 10.0, 2, DemandPolicy::default()).unwrap();
        let files: Vec<Vec<u8>> = ["a.json", "b.json"]
            .iter()
            .map(|name| {
                let path = dir.path().join(name);
                write_instance(&make(), &path).unwrap();
                std::fs::read(path).unwrap()
            })
            .collect();
        if files[0] != files[1] {
            return outcome(false, format!("instance bytes differ for seed {seed}"));
        }
        let p = Problem::build(make()).unwrap();
        let options = PdsgOptions {
            seed,
            max_iter: 2000,
            ..Default::default()
        };
        let runs: Vec<String> = [Execution::Sequential, Execution::Parallel, Execution::Sequential]
            .into_iter()
            .map(|execution| trace_without_wallclock(&solve_pdsg(&p, &PdsgOptions { execution, ..options }).unwrap()))
            .collect();
        if runs.iter().any(|t| t != &runs[0]) {
            return outcome(false, format!("trace differs for seed {seed}"));
        }
        checked += 1;
    }
    outcome(true, format!("{checked} seeds, instance JSON and traces byte-identical"))
}

fn screening() -> Outcome {
    let mut total = 0;
    let mut worst = 0.0f64;
    let mut failed = Vec::new();
    for seed in 0..100u64 {
        let n = 2 + (seed as usize) % 11;
        let sessions = 1 + (seed as usize) % 3;
        let area = 5.0 + (seed % 7) as f64 * 5.0;
        let inst = generate_instance(seed, n, area, sessions, DemandPolicy::default()).unwrap();
        let phase1 = check_feasibility(&Problem::build(inst).unwrap().program).unwrap();
        total += 1;
        worst = worst.max(phase1.violation());
        if !phase1.is_feasible() {
            failed.push(seed);
        }
    }
    outcome(
        failed.is_empty() && worst <= PHASE1_TOL,
        format!("{total} generated instances, max phase-1 optimum {worst:.1e} (tolerance {PHASE1_TOL:.0e}), infeasible {failed:?}"),
    )
}

fn main() -> ExitCode {
    let runs = comparison_runs();
    let results = [
        ("oracle equivalence", oracle_equivalence(&runs)),
        ("single-link analytic optimum", analytic_single_link()),
        ("butterfly coding gain", coding_beats_sum()),
        ("weak duality and monotone gap", weak_duality(&runs)),
        ("primal feasibility", feasibility(&runs)),
        ("decomposition consistency", decomposition(&runs)),
        ("linearity regime", linearity()),
        ("interference negligibility", interference()),
        ("determinism", determinism()),
        ("feasibility screening", screening()),
    ];
    let mut failures = 0;
    for (k, (name, o)) in results.iter().enumerate() {
        println!("{} {:>2} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, k + 1, o.detail);
        failures += usize::from(!o.pass);
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} criteria failed");
        ExitCode::FAILURE
    }
}
