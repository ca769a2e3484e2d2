//! Command-line front end: generate instances, solve them, compare the two
//! solvers and write reports.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 infeasible instance, 3 no
//! convergence within the iteration budget, 64 bad usage.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::analysis::{
    compare_methods, interference_error, linearity_sweep, sweep, write_approximation_csv, write_comparison_csv,
    write_interference_csv, ComparisonRow, LineChart, SweepSpec,
};
use crate::error::{Error, Result};
use crate::formulation::{check_feasibility, Feasibility, Problem, Residuals};
use crate::model::{generate_instance, read_instance, write_instance, Channel, DemandPolicy, NetworkInstance, NodeId, NodeSpec, Point};
use crate::oracle::{solve_exact, OracleStatus};
use crate::par::Execution;
use crate::pdsg::{solve_pdsg, write_trace_file, PdsgOptions, TraceRow};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_NOT_CONVERGED: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

/// Overrides the default output directory when `--out-dir` is not given.
pub const OUT_DIR_ENV: &str = "LOWSNR_OUT_DIR";
const DEFAULT_OUT_DIR: &str = "out";

#[derive(Debug, Parser)]
#[command(name = "lowsnr", version, about = "Minimum-power network-coded multicast in the low-SNR regime")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a random feasible instance.
    Gen(GenArgs),
    /// Solve one instance.
    Solve(SolveArgs),
    /// Solve with both methods and tabulate the difference.
    Compare(CompareArgs),
    /// Comparison plus approximation tables and charts.
    Report(CompareArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
    pub nodes: u64,
    /// Side of the square deployment area in meters.
    #[arg(long, default_value_t = 10.0)]
    pub area: f64,
    #[arg(long, default_value_t = 1)]
    pub sessions: usize,
    /// Where to write the instance; defaults to `<out dir>/instance.json`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Pdsg,
    Oracle,
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 200_000)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 0.01)]
    pub gap_tol: f64,
    /// Run the decentralized solver on one thread.
    #[arg(long)]
    pub sequential: bool,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub instance: PathBuf,
    #[arg(long, value_enum, default_value_t = Method::Pdsg)]
    pub method: Method,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Instance file; omit to run a generated sweep.
    pub instance: Option<PathBuf>,
    /// Seeds per node count in a sweep.
    #[arg(long, conflicts_with = "instance")]
    pub sweep_seeds: Option<usize>,
    /// Comma-separated node counts of a sweep.
    #[arg(long, value_delimiter = ',', conflicts_with = "instance")]
    pub nodes: Vec<usize>,
    #[arg(long, default_value_t = 1)]
    pub sessions: usize,
    #[arg(long, default_value_t = 10.0)]
    pub area: f64,
    #[command(flatten)]
    pub solver: SolverArgs,
}

/// A failure with the exit code it maps to.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Infeasible => EXIT_INFEASIBLE,
            Error::Validation { .. } => EXIT_USAGE,
            _ => EXIT_FAILURE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code. JSON summaries go to `stdout`, diagnostics to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let outcome = match cli.command {
        Command::Gen(a) => cmd_gen(&a),
        Command::Solve(a) => cmd_solve(&a),
        Command::Compare(a) => cmd_compare(&a, false),
        Command::Report(a) => cmd_compare(&a, true),
    };
    match outcome {
        Ok((code, summary)) => {
            let _ = writeln!(stdout, "{}", serde_json::to_string_pretty(&summary).unwrap_or_default());
            code
        }
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn out_dir(flag: &Option<PathBuf>) -> PathBuf {
    flag.clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.to_path_buf(),
        source: e,
    })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn create_file(path: &Path) -> Result<std::io::BufWriter<fs::File>> {
    let file = fs::File::create(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    Ok(std::io::BufWriter::new(file))
}

fn feasibility_json(f: &Feasibility) -> Value {
    match f {
        Feasibility::Feasible { violation } => json!({ "feasible": true, "violation": violation }),
        Feasibility::Infeasible { sessions, violation } => {
            json!({ "feasible": false, "violation": violation, "sessions": sessions })
        }
    }
}

fn residuals_json(r: &Residuals) -> Value {
    json!({
        "conservation": r.conservation,
        "capacity": r.capacity,
        "budget": r.budget,
        "other": r.other,
        "negativity": r.negativity,
    })
}

fn cmd_gen(a: &GenArgs) -> std::result::Result<(i32, Value), Failure> {
    if !(a.area > 0.0 && a.area.is_finite()) {
        return Err(usage(format!("--area must be positive, got {}", a.area)));
    }
    let instance = generate_instance(a.seed, a.nodes as usize, a.area, a.sessions, DemandPolicy::default())?;
    let path = match &a.out {
        Some(p) => p.clone(),
        None => {
            let dir = out_dir(&a.out_dir);
            ensure_dir(&dir)?;
            dir.join("instance.json")
        }
    };
    write_instance(&instance, &path)?;
    let feasibility = check_feasibility(&Problem::build(instance.clone())?.program)?;
    Ok((
        EXIT_OK,
        json!({
            "instance": path,
            "seed": a.seed,
            "nodes": instance.nodes().len(),
            "sessions": instance.sessions().len(),
            "total_demand": instance.total_demand(),
            "certificate": feasibility_json(&feasibility),
        }),
    ))
}

fn pdsg_options(s: &SolverArgs) -> std::result::Result<PdsgOptions, Failure> {
    if !(s.gap_tol > 0.0 && s.gap_tol.is_finite()) {
        return Err(usage(format!("--gap-tol must be positive, got {}", s.gap_tol)));
    }
    if s.max_iter == 0 {
        return Err(usage("--max-iter must be at least 1"));
    }
    Ok(PdsgOptions {
        max_iter: s.max_iter,
        gap_tol: s.gap_tol,
        seed: s.seed,
        execution: if s.sequential { Execution::Sequential } else { Execution::Parallel },
        // screened here so the certificate can be reported
        screen: false,
        ..Default::default()
    })
}

fn cmd_solve(a: &SolveArgs) -> std::result::Result<(i32, Value), Failure> {
    let options = pdsg_options(&a.solver)?;
    let problem = Problem::build(read_instance(&a.instance)?)?;
    let dir = out_dir(&a.solver.out_dir);
    ensure_dir(&dir)?;
    let method = match a.method {
        Method::Pdsg => "pdsg",
        Method::Oracle => "oracle",
    };

    let feasibility = check_feasibility(&problem.program)?;
    if !feasibility.is_feasible() {
        let summary = json!({
            "method": method,
            "status": "infeasible",
            "certificate": feasibility_json(&feasibility),
        });
        write_file(&dir.join("summary.json"), summary.to_string().as_bytes())?;
        return Ok((EXIT_INFEASIBLE, summary));
    }

    let (code, summary) = match a.method {
        Method::Oracle => {
            let sol = solve_exact(&problem.program)?;
            match sol.status {
                OracleStatus::Optimal => {}
                OracleStatus::Infeasible => return Err(Error::Infeasible.into()),
                OracleStatus::Unbounded => return Err(Error::Solver("unbounded program".into()).into()),
            }
            let residuals = problem.program.residuals(&sol.primal);
            let summary = json!({
                "method": method,
                "status": "optimal",
                "objective": sol.objective,
                "dual_bound": sol.dual_objective,
                "gap": sol.residuals.relative_gap,
                "residuals": residuals_json(&residuals),
                "powers": problem.program.powers(&sol.primal),
            });
            (EXIT_OK, summary)
        }
        Method::Pdsg => {
            let report = solve_pdsg(&problem, &options)?;
            let trace = dir.join("trace.csv");
            write_trace_file(&trace, &report.trace)?;
            write_file(&dir.join("gap.svg"), gap_chart(&[("pdsg", &report.trace)]).as_bytes())?;
            let status = if report.converged() { "converged" } else { "max_iterations" };
            let summary = json!({
                "method": method,
                "status": status,
                "objective": finite_or_null(report.objective),
                "dual_bound": report.dual_bound,
                "gap": finite_or_null(report.gap),
                "iterations": report.iterations,
                "restarts": report.restarts,
                "residuals": residuals_json(&report.residuals),
                "powers": report.powers,
                "trace": trace,
                "wallclock_ms": report.elapsed.as_secs_f64() * 1e3,
            });
            let code = if report.converged() { EXIT_OK } else { EXIT_NOT_CONVERGED };
            (code, summary)
        }
    };
    write_file(&dir.join("summary.json"), summary.to_string().as_bytes())?;
    Ok((code, summary))
}

fn finite_or_null(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

fn gap_chart(runs: &[(&str, &[TraceRow])]) -> String {
    let mut chart = LineChart::new("Duality gap", "iteration", "relative gap").log_y();
    for (name, trace) in runs {
        // every row would make large files; a few hundred points are plenty
        let stride = (trace.len() / 500).max(1);
        let points = trace.iter().step_by(stride).map(|r| (r.iter as f64, r.gap)).collect();
        chart = chart.with_series(name, points);
    }
    chart.render()
}

fn cmd_compare(a: &CompareArgs, report: bool) -> std::result::Result<(i32, Value), Failure> {
    let options = pdsg_options(&a.solver)?;
    let exec = options.execution;
    let dir = out_dir(&a.solver.out_dir);

    let (rows, instance) = match &a.instance {
        Some(path) => {
            let instance = read_instance(path)?;
            let problem = Problem::build(instance.clone())?;
            let key = path.file_stem().map_or("instance".into(), |s| s.to_string_lossy().into_owned());
            (vec![compare_methods(&key, &problem, &options)?], Some(instance))
        }
        None => {
            let seeds = a.sweep_seeds.ok_or_else(|| usage("give an instance file or --sweep-seeds with --nodes"))?;
            let spec = SweepSpec {
                base_seed: a.solver.seed,
                seeds,
                node_counts: a.nodes.clone(),
                sessions: a.sessions,
                area: a.area,
            };
            spec.cells()?;
            let cell_options = PdsgOptions {
                execution: Execution::Sequential,
                ..options
            };
            (sweep(&spec, &cell_options, exec)?, None)
        }
    };

    ensure_dir(&dir)?;
    let csv_path = dir.join("comparison.csv");
    write_comparison_csv(create_file(&csv_path)?, &rows)?;
    write_file(&dir.join("comparison.svg"), comparison_chart(&rows).as_bytes())?;
    let mut files = vec![csv_path.clone(), dir.join("comparison.svg")];

    if report {
        files.extend(write_approximations(&dir, instance.as_ref())?);
    }

    let worst = rows.iter().map(|r| r.relative_gap).fold(f64::NEG_INFINITY, f64::max);
    let all_converged = rows.iter().all(|r| r.converged);
    let summary = json!({
        "rows": rows.len(),
        "all_converged": all_converged,
        "max_relative_gap": worst,
        "files": files,
    });
    Ok((if all_converged { EXIT_OK } else { EXIT_NOT_CONVERGED }, summary))
}

fn comparison_chart(rows: &[ComparisonRow]) -> String {
    let oracle = rows.iter().enumerate().map(|(k, r)| (k as f64, r.oracle_objective)).collect();
    let pdsg = rows.iter().enumerate().map(|(k, r)| (k as f64, r.pdsg_objective)).collect();
    LineChart::new("Minimum total power", "instance", "power")
        .with_series("oracle", oracle)
        .with_series("pdsg", pdsg)
        .render()
}

/// Two transmitters one meter either side of a receiver, far below the
/// low-SNR threshold.
pub fn two_transmitter_instance(power: f64) -> Result<NetworkInstance> {
    let node = |id, x| NodeSpec {
        id: NodeId(id),
        location: Point::new(x, 0.0),
        power_budget: power,
    };
    NetworkInstance::new(vec![node(0, -1.0), node(1, 1.0), node(2, 0.0)], Channel::default(), vec![], None)
}

fn write_approximations(dir: &Path, instance: Option<&NetworkInstance>) -> Result<Vec<PathBuf>> {
    let grid: Vec<f64> = (0..=30).map(|k| 10f64.powf(-6.0 + k as f64 * 0.2)).collect();
    let lin = linearity_sweep(&grid);
    let lin_path = dir.join("linearity.csv");
    write_approximation_csv(create_file(&lin_path)?, &lin)?;

    // every other node interferes at the last node
    let fallback;
    let inst = match instance {
        Some(i) if i.nodes().len() >= 2 => i,
        _ => {
            fallback = two_transmitter_instance(1e-6)?;
            &fallback
        }
    };
    let ids: Vec<NodeId> = inst.nodes().iter().map(|n| n.id).collect();
    let (receiver, transmitters) = ids.split_last().expect("at least two nodes");
    let rows = interference_error(inst, transmitters, *receiver)?;
    let int_path = dir.join("interference.csv");
    write_interference_csv(create_file(&int_path)?, &rows)?;

    let chart = LineChart::new("Linear capacity error", "SNR per degree of freedom", "relative error")
        .log_x()
        .log_y()
        .with_series("1 - ln(1+x)/x", lin.rows.iter().map(|r| (r.snr_per_dof, r.relative_error)).collect())
        .render();
    let svg_path = dir.join("linearity.svg");
    write_file(&svg_path, chart.as_bytes())?;
    Ok(vec![lin_path, int_path, svg_path])
}
