//! Command-line front end: graph ingestion, dispatch to the library
//! drivers, JSON/CSV artifact output.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qcut::cheeger;
use qcut::enumerate::EnumerationCaps;
use qcut::graph::MetricGraph;
use qcut::io;
use qcut::par::{self, Exec};
use qcut::robinopt::{self, Direction, OptimizerOptions};
use qcut::spectral::{self, Method, RobinProblem};
use qcut::subgraph::{BoundaryMode, Subgraph};
use qcut::suites;
use qcut::{Error, Result};

#[derive(Parser)]
#[command(
    name = "qcut",
    version,
    about = "Cheeger cuts, Robin ground states and spectral minimal partitions of compact metric graphs"
)]
struct Cli {
    /// Worker threads for bulk phases; 0 uses one per core. The QC_JOBS
    /// environment variable supplies the default when the flag is absent.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Artifact prefix: writes <prefix>.json plus command-specific CSV
    /// files alongside the stdout report.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Secular,
    Mesh,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Secular => Method::Secular,
            MethodArg::Mesh => Method::Mesh,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Effdeg,
    Count,
}

impl From<ModeArg> for BoundaryMode {
    fn from(m: ModeArg) -> BoundaryMode {
        match m {
            ModeArg::Effdeg => BoundaryMode::EffectiveDegree,
            ModeArg::Count => BoundaryMode::Count,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum DirectionArg {
    Zero,
    Infinity,
}

#[derive(Args, Clone, Copy)]
struct CapsArgs {
    /// Cut cap per edge during class enumeration.
    #[arg(long, default_value_t = 2)]
    max_cuts: usize,
    /// Ceiling on the number of enumerated classes.
    #[arg(long)]
    max_classes: Option<usize>,
}

impl CapsArgs {
    fn caps(&self) -> EnumerationCaps {
        EnumerationCaps {
            max_cuts_per_edge: self.max_cuts,
            max_classes: self.max_classes,
        }
    }

    fn raised(&self) -> CapsArgs {
        CapsArgs {
            max_cuts: self.max_cuts + 1,
            max_classes: self.max_classes,
        }
    }
}

#[derive(Args, Clone, Copy)]
struct OptArgs {
    /// Starts per class; the first is the LP warm start.
    #[arg(long, default_value_t = 4)]
    restarts: usize,
    /// Iteration cap per start.
    #[arg(long, default_value_t = 500)]
    max_iters: usize,
    /// Relative convergence tolerance of the optimizer.
    #[arg(long, default_value_t = 1e-8)]
    rel_tol: f64,
    /// Seed for the restart draws; fixed by default so reruns match.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Eigenvalue solver used inside the objective.
    #[arg(long, value_enum, default_value_t = MethodArg::Secular)]
    method: MethodArg,
    /// Eigenvalue solver tolerance.
    #[arg(long, default_value_t = 1e-10)]
    eig_tol: f64,
}

impl OptArgs {
    fn opts(&self) -> OptimizerOptions {
        OptimizerOptions {
            restarts: self.restarts,
            max_iters: self.max_iters,
            rel_tol: self.rel_tol,
            seed: self.seed,
            method: self.method.into(),
            eig_tol: self.eig_tol,
            ..OptimizerOptions::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// First eigenvalue of a subgraph under Robin or Dirichlet conditions.
    Eig {
        graph: PathBuf,
        /// Subgraph spec file; the whole graph when omitted.
        #[arg(long)]
        subgraph: Option<PathBuf>,
        /// Robin coupling constant.
        #[arg(long, default_value_t = 0.0, conflicts_with = "dirichlet")]
        alpha: f64,
        /// Pin the boundary to zero instead of Robin coupling.
        #[arg(long)]
        dirichlet: bool,
        #[arg(long, value_enum, default_value_t = MethodArg::Secular)]
        method: MethodArg,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Write ground-state samples as CSV (edge,offset,value).
        #[arg(long)]
        eigenfunction: Option<PathBuf>,
    },
    /// k-Cheeger constant and an optimal cut.
    Cheeger {
        graph: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Effdeg)]
        mode: ModeArg,
        /// Require the parts to cover the whole graph.
        #[arg(long)]
        exhaustive: bool,
        /// Also report the p-norm energy of the argmin.
        #[arg(long)]
        p: Option<f64>,
        #[command(flatten)]
        caps: CapsArgs,
        /// Re-run with the cut cap raised by one and report whether the
        /// optimum moved.
        #[arg(long)]
        cap_check: bool,
    },
    /// Minimum isoperimetric ratio over closed subsets of a subgraph.
    H1 {
        graph: PathBuf,
        /// Subgraph spec file; the whole graph when omitted.
        #[arg(long)]
        subgraph: Option<PathBuf>,
        #[command(flatten)]
        caps: CapsArgs,
    },
    /// Robin spectral minimal k-partition at a fixed coupling.
    RobinPartition {
        graph: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        alpha: f64,
        /// Require the parts to cover the whole graph.
        #[arg(long)]
        exhaustive: bool,
        #[command(flatten)]
        caps: CapsArgs,
        #[command(flatten)]
        opt: OptArgs,
        /// Re-run with the cut cap raised by one and report whether the
        /// optimum moved.
        #[arg(long)]
        cap_check: bool,
    },
    /// Dirichlet spectral minimal k-partition.
    DirichletPartition {
        graph: PathBuf,
        #[arg(long)]
        k: usize,
        /// Require the parts to cover the whole graph.
        #[arg(long)]
        exhaustive: bool,
        #[command(flatten)]
        caps: CapsArgs,
        #[command(flatten)]
        opt: OptArgs,
        /// Re-run with the cut cap raised by one and report whether the
        /// optimum moved.
        #[arg(long)]
        cap_check: bool,
    },
    /// Optimal energy along a log grid of couplings, compared against the
    /// limit reference (Cheeger cut toward zero, Dirichlet partition
    /// toward infinity).
    LimitStudy {
        graph: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum)]
        direction: DirectionArg,
        /// Geometric grid `first:last:count`, e.g. `1e-1:1e-4:4`.
        #[arg(long)]
        grid: String,
        #[command(flatten)]
        caps: CapsArgs,
        #[command(flatten)]
        opt: OptArgs,
    },
    /// Run the self-check property suites.
    Check,
}

/// Writes a stdout line, ignoring a closed pipe instead of panicking.
fn print_line(line: &str) {
    use std::io::Write;
    let _ = writeln!(std::io::stdout(), "{line}");
}

fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = |msg: &str| Error::InvalidParameter(format!("grid {spec:?}: {msg}"));
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(bad("expected first:last:count"));
    }
    let a: f64 = parts[0].parse().map_err(|_| bad("first is not a number"))?;
    let b: f64 = parts[1].parse().map_err(|_| bad("last is not a number"))?;
    let n: usize = parts[2].parse().map_err(|_| bad("count is not an integer"))?;
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
        return Err(bad("endpoints must be positive and finite"));
    }
    if n == 0 {
        return Err(bad("count must be at least 1"));
    }
    if n == 1 {
        return Ok(vec![a]);
    }
    let (la, lb) = (a.ln(), b.ln());
    Ok((0..n)
        .map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp())
        .collect())
}

fn load_graph(path: &Path) -> Result<Arc<MetricGraph>> {
    Ok(Arc::new(io::parse_graph_file(path)?))
}

fn load_domain(graph: &Arc<MetricGraph>, spec: &Option<PathBuf>) -> Result<Subgraph> {
    match spec {
        Some(path) => io::parse_subgraph_file(graph, path),
        None => Ok(Subgraph::whole(Arc::clone(graph))),
    }
}

/// Prints the JSON report and writes the artifacts under the prefix.
fn emit(out: &Option<PathBuf>, value: &Value, csvs: &[(&str, String)]) -> Result<()> {
    print_line(&serde_json::to_string_pretty(value)?);
    if let Some(prefix) = out {
        if let Some(dir) = prefix.parent() {
            if !dir.as_os_str().is_empty() {
                std::fs::create_dir_all(dir)?;
            }
        }
        std::fs::write(
            prefix.with_extension("json"),
            format!("{}\n", serde_json::to_string_pretty(value)?),
        )?;
        for (suffix, text) in csvs {
            std::fs::write(prefix.with_extension(suffix), text)?;
        }
    }
    Ok(())
}

fn cap_check_value(base: f64, base_class: &str, recheck: (f64, String, usize)) -> Value {
    let (value, class, cap) = recheck;
    let moved = (value - base).abs() > 1e-9 * (1.0 + base.abs()) || class != base_class;
    json!({
        "raised_cap": cap,
        "value": value,
        "value_delta": value - base,
        "optimum_moved": moved,
    })
}

fn run(cli: Cli, exec: Exec) -> Result<ExitCode> {
    match cli.command {
        Command::Eig {
            graph,
            subgraph,
            alpha,
            dirichlet,
            method,
            tol,
            eigenfunction,
        } => {
            let g = load_graph(&graph)?;
            let domain = load_domain(&g, &subgraph)?;
            let res = if dirichlet {
                spectral::dirichlet_lambda1(&domain, method.into(), tol)?
            } else {
                let problem = RobinProblem::from_alpha(domain, alpha)?;
                spectral::robin_lambda1(&problem, method.into(), tol)?
            };
            let tag = match res.method {
                Method::Secular => "secular",
                Method::Mesh => "mesh",
            };
            print_line(&format!(
                "{},{tag},{}",
                io::fmt_float(res.lambda1),
                io::fmt_float(res.error_estimate)
            ));
            if let Some(path) = eigenfunction {
                std::fs::write(path, io::eigenfunction_csv(&res.eigenfunction))?;
            }
            if let Some(prefix) = &cli.out {
                let value = json!({
                    "lambda1": res.lambda1,
                    "method": tag,
                    "error_estimate": res.error_estimate,
                });
                std::fs::write(
                    prefix.with_extension("json"),
                    format!("{}\n", serde_json::to_string_pretty(&value)?),
                )?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Cheeger {
            graph,
            k,
            mode,
            exhaustive,
            p,
            caps,
            cap_check,
        } => {
            let g = load_graph(&graph)?;
            let res = cheeger::cheeger_constant(&g, k, mode.into(), &caps.caps(), exhaustive, exec)?;
            let mut value = io::cheeger_value(&res);
            if let Some(p) = p {
                let energy = cheeger::cheeger_energy_p(&res.argmin, p, mode.into())?;
                value["p"] = json!(p);
                value["p_energy"] = json!(energy);
            }
            if cap_check {
                let re = cheeger::cheeger_constant(
                    &g,
                    k,
                    mode.into(),
                    &caps.raised().caps(),
                    exhaustive,
                    exec,
                )?;
                value["cap_check"] = cap_check_value(
                    res.value,
                    &res.argmin.class().id().to_hex(),
                    (
                        re.value,
                        re.argmin.class().id().to_hex(),
                        caps.max_cuts + 1,
                    ),
                );
            }
            emit(&cli.out, &value, &[("classes.csv", io::per_class_csv(&res.per_class))])?;
            Ok(ExitCode::SUCCESS)
        }
        Command::H1 {
            graph,
            subgraph,
            caps,
        } => {
            let g = load_graph(&graph)?;
            let domain = load_domain(&g, &subgraph)?;
            let res = cheeger::h1(&domain, &caps.caps(), exec)?;
            emit(&cli.out, &io::h1_value(&res), &[])?;
            Ok(ExitCode::SUCCESS)
        }
        Command::RobinPartition {
            graph,
            k,
            alpha,
            exhaustive,
            caps,
            opt,
            cap_check,
        } => {
            let g = load_graph(&graph)?;
            let opts = opt.opts();
            let res =
                robinopt::robin_minimal_partition(&g, k, alpha, &caps.caps(), exhaustive, &opts, exec)?;
            let mut value = io::partition_result_value(&res);
            if cap_check {
                let re = robinopt::robin_minimal_partition(
                    &g,
                    k,
                    alpha,
                    &caps.raised().caps(),
                    exhaustive,
                    &opts,
                    exec,
                )?;
                value["cap_check"] = cap_check_value(
                    res.value,
                    &res.argmin.class().id().to_hex(),
                    (
                        re.value,
                        re.argmin.class().id().to_hex(),
                        caps.max_cuts + 1,
                    ),
                );
            }
            emit(&cli.out, &value, &[("classes.csv", io::per_class_csv(&res.per_class))])?;
            Ok(ExitCode::SUCCESS)
        }
        Command::DirichletPartition {
            graph,
            k,
            exhaustive,
            caps,
            opt,
            cap_check,
        } => {
            let g = load_graph(&graph)?;
            let opts = opt.opts();
            let res =
                robinopt::dirichlet_minimal_partition(&g, k, &caps.caps(), exhaustive, &opts, exec)?;
            let mut value = io::partition_result_value(&res);
            if cap_check {
                let re = robinopt::dirichlet_minimal_partition(
                    &g,
                    k,
                    &caps.raised().caps(),
                    exhaustive,
                    &opts,
                    exec,
                )?;
                value["cap_check"] = cap_check_value(
                    res.value,
                    &res.argmin.class().id().to_hex(),
                    (
                        re.value,
                        re.argmin.class().id().to_hex(),
                        caps.max_cuts + 1,
                    ),
                );
            }
            emit(&cli.out, &value, &[("classes.csv", io::per_class_csv(&res.per_class))])?;
            Ok(ExitCode::SUCCESS)
        }
        Command::LimitStudy {
            graph,
            k,
            direction,
            grid,
            caps,
            opt,
        } => {
            let g = load_graph(&graph)?;
            let grid = parse_grid(&grid)?;
            let direction = match direction {
                DirectionArg::Zero => Direction::ToZero,
                DirectionArg::Infinity => Direction::ToInfinity,
            };
            let study =
                robinopt::limit_study(&g, k, direction, &grid, &caps.caps(), &opt.opts(), exec)?;
            emit(
                &cli.out,
                &io::limit_study_value(&study),
                &[("rows.csv", io::study_csv(&study))],
            )?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Check => {
            let reports = suites::run_all();
            let mut all_ok = true;
            for r in &reports {
                let status = if r.passed() { "pass" } else { "FAIL" };
                print_line(&format!("{}: {} checks, {status} ({} ms)", r.name, r.checks, r.millis));
                for f in &r.failures {
                    print_line(&format!("  {f}"));
                }
                all_ok &= r.passed();
            }
            if let Some(prefix) = &cli.out {
                let value: Vec<Value> = reports
                    .iter()
                    .map(|r| {
                        json!({
                            "name": r.name,
                            "checks": r.checks,
                            "failures": r.failures,
                            "millis": r.millis,
                        })
                    })
                    .collect();
                std::fs::write(
                    prefix.with_extension("json"),
                    format!("{}\n", serde_json::to_string_pretty(&value)?),
                )?;
            }
            Ok(if all_ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let jobs = cli
        .jobs
        .or_else(|| std::env::var("QC_JOBS").ok().and_then(|s| s.parse().ok()))
        .unwrap_or(0);
    par::configure_jobs(jobs);
    let exec = if jobs == 1 { Exec::Seq } else { Exec::Par };
    match run(cli, exec) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{}", json!({ "error": e.to_string() }));
            ExitCode::from(1)
        }
    }
}
