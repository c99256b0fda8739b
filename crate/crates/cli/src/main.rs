//! `bernoulli`: command line front end.
//!
//! Exit codes: 0 success, 1 bad input, 2 no solution, 3 iteration cap
//! reached, 4 bisection bracket failure.

use std::io::IsTerminal;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use bernoulli_core::config::{OmegaSpec, ProblemConfig};
use bernoulli_core::envelope::{self, GridFunction, RingSampler};
use bernoulli_core::experiments::{self, CombinationSummary, Problem};
use bernoulli_core::freeboundary::{self, SolverError};
use bernoulli_core::io;
use bernoulli_core::oracles::{self, BernoulliRadii};
use bernoulli_core::SolveStatus;

#[derive(Parser)]
#[command(name = "bernoulli", version, about = "Interior Bernoulli free boundary solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the problem described by a configuration file.
    Solve {
        config: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Print the Bernoulli constant of the configured domain.
    Lambda {
        config: PathBuf,
        #[command(flatten)]
        method: LambdaMethod,
    },
    /// Radii of the radial solutions on the ball of radius R for g ≡ tau.
    Radii { p: f64, n: u32, r: f64, tau: f64 },
    /// Solve two problems and their combination of ratio λ.
    Combine {
        config0: PathBuf,
        config1: PathBuf,
        #[arg(long)]
        lambda: f64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Solve on disks of several radii.
    #[command(name = "sweep-R")]
    SweepR {
        config: PathBuf,
        /// Comma separated radii.
        #[arg(long, value_delimiter = ',', required = true)]
        radii: Vec<f64>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Quasi-concave envelope of a grid CSV (or of a field CSV, resampled).
    Envelope {
        input: PathBuf,
        #[arg(long, default_value_t = 64)]
        levels: usize,
        /// Grid size used when the input is a ring field.
        #[arg(long, default_value_t = 101)]
        grid: usize,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Check a configuration file.
    Validate { config: PathBuf },
    /// Check CSV files against the known layouts.
    CheckSchema {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
}

#[derive(Args)]
#[group(multiple = false)]
struct LambdaMethod {
    /// Closed form for disks.
    #[arg(long)]
    ball: bool,
    /// Bisection with the free boundary solver.
    #[arg(long)]
    numeric: bool,
}

/// Failure carrying its exit code.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Self { code: 1, error: e.into() }
    }
}

fn status_code(status: SolveStatus) -> u8 {
    match status {
        SolveStatus::Converged => 0,
        SolveStatus::NoSolution => 2,
        SolveStatus::MaxIterations => 3,
    }
}

fn output_dir(flag: Option<PathBuf>, config: &ProblemConfig) -> PathBuf {
    flag.or_else(|| config.output_dir.as_ref().map(PathBuf::from)).unwrap_or_else(|| PathBuf::from("out"))
}

fn load(path: &Path) -> Result<ProblemConfig> {
    ProblemConfig::load(path).with_context(|| format!("invalid configuration {}", path.display()))
}

fn print_json(value: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("json value"));
}

fn solve(config: PathBuf, output: Option<PathBuf>) -> Result<u8, Failure> {
    let cfg = load(&config)?;
    let problem = Problem::from_config(&cfg)?;
    let report = freeboundary::solve_interior_bernoulli(&problem.omega, &problem.g, cfg.p, &cfg.solver)?;
    let dir = output_dir(output, &cfg);
    io::write_solve_outputs(&dir, &report)?;
    print_json(&json!({
        "status": report.status,
        "iterations": report.iterations,
        "sup_residual": report.sup_residual(),
        "inradius": report.inradius(),
        "output": dir.display().to_string(),
    }));
    Ok(status_code(report.status))
}

fn lambda(config: PathBuf, method: LambdaMethod) -> Result<u8, Failure> {
    let cfg = load(&config)?;
    let disk_radius = match cfg.omega {
        OmegaSpec::Disk { radius, .. } => Some(radius),
        _ => None,
    };
    let ball = method.ball || (!method.numeric && disk_radius.is_some());
    if ball {
        let Some(radius) = disk_radius else { return Err(anyhow::anyhow!("--ball needs a disk domain").into()) };
        let value = oracles::bernoulli_constant_ball(cfg.p, 2, radius)?;
        print_json(&json!({ "lambda": value, "method": "ball", "bracket": null }));
        return Ok(0);
    }
    let omega = cfg.omega_body()?;
    match freeboundary::bernoulli_constant_numeric(&omega, cfg.p, &cfg.solver) {
        Ok(found) => {
            print_json(&json!({ "lambda": found.lambda, "method": "numeric", "bracket": [found.bracket.0, found.bracket.1] }));
            Ok(0)
        }
        Err(e @ SolverError::BracketError { .. }) => Err(Failure { code: 4, error: e.into() }),
        Err(e) => Err(e.into()),
    }
}

fn radii(p: f64, n: u32, r: f64, tau: f64) -> Result<u8, Failure> {
    let value = match oracles::bernoulli_radii(p, n, r, tau)? {
        BernoulliRadii::Empty => json!({ "kind": "empty", "roots": [] }),
        BernoulliRadii::Tangent(x) => json!({ "kind": "tangent", "roots": [x], "maximal": x }),
        BernoulliRadii::Pair { small, large } => json!({ "kind": "pair", "roots": [small, large], "maximal": large }),
    };
    print_json(&value);
    Ok(0)
}

fn combine(config0: PathBuf, config1: PathBuf, lambda: f64, output: Option<PathBuf>) -> Result<u8, Failure> {
    let c0 = load(&config0)?;
    let c1 = load(&config1)?;
    let dir = output_dir(output, &c0);
    let result = experiments::combine_problems(&c0, &c1, lambda)?;
    for (name, report) in [("leg0", Some(&result.legs[0])), ("leg1", Some(&result.legs[1])), ("combined", result.combined.as_ref())] {
        if let Some(report) = report {
            io::write_solve_outputs(&dir.join(name), report)?;
        }
    }
    let summary = CombinationSummary::new(&result);
    io::write_json(&dir.join("combined.json"), &summary)?;
    print_json(
        &json!({ "inclusion_margin": summary.inclusion_margin, "mesh_tolerance": summary.mesh_tolerance, "failed_leg": summary.failed_leg }),
    );
    if let Some(leg) = result.failed_leg() {
        return Err(Failure { code: 2, error: anyhow::anyhow!("{leg} did not converge") });
    }
    Ok(0)
}

fn sweep(config: PathBuf, radii: Vec<f64>, output: Option<PathBuf>) -> Result<u8, Failure> {
    let cfg = load(&config)?;
    let dir = output_dir(output, &cfg);
    let rows = experiments::sweep_radii(&cfg, &radii)?;
    io::ensure_dir(&dir)?;
    for (row, report) in &rows {
        if let Some(report) = report {
            io::write_solve_outputs(&dir.join(format!("R_{}", row.radius)), report)?;
        }
    }
    let rows: Vec<io::SweepRow> = rows.into_iter().map(|(row, _)| row).collect();
    io::write_sweep_csv(&dir.join("sweep.csv"), &rows)?;
    for row in &rows {
        println!("R = {:<8} inradius = {:<12.6} ratio = {:<10.6} {}", row.radius, row.inradius, row.ratio, row.status);
    }
    Ok(0)
}

fn read_grid_or_field(input: &Path, grid: usize) -> Result<GridFunction> {
    let check = io::check_csv_schema(input)?;
    match check.schema.as_deref() {
        Some("grid") => Ok(io::read_grid_csv(input)?),
        Some("field") => {
            let dump = io::read_field_csv(input)?;
            let sampler = RingSampler::new(&dump.nodes, &dump.values, dump.angular_nodes, dump.radial_layers)?;
            let outer = &dump.nodes[(dump.radial_layers - 1) * dump.angular_nodes..];
            let (lo, hi) = outer.iter().fold(((f64::MAX, f64::MAX), (f64::MIN, f64::MIN)), |(lo, hi), p| {
                ((lo.0.min(p.x), lo.1.min(p.y)), (hi.0.max(p.x), hi.1.max(p.y)))
            });
            let n = grid.max(8);
            let spacing = (hi.0 - lo.0).max(hi.1 - lo.1) / (n - 5) as f64;
            let origin = bernoulli_core::Point::new(lo.0 - 2.0 * spacing, lo.1 - 2.0 * spacing);
            Ok(GridFunction::from_fn(origin, spacing, n, n, |x| sampler.eval(x))?)
        }
        _ => bail!("{}: expected a grid or field CSV", input.display()),
    }
}

fn envelope_cmd(input: PathBuf, levels: usize, grid: usize, output: PathBuf) -> Result<u8, Failure> {
    let f = read_grid_or_field(&input, grid)?;
    let (env, report) = envelope::verify_envelope(&f, levels)?;
    io::ensure_dir(&output)?;
    io::write_grid_csv(&output.join("envelope.csv"), &env)?;
    io::write_json(&output.join("envelope_report.json"), &report)?;
    print_json(&serde_json::to_value(&report).expect("report"));
    Ok(0)
}

fn validate(config: PathBuf) -> Result<u8, Failure> {
    let cfg = load(&config)?;
    let omega = cfg.omega_body()?;
    print_json(&json!({
        "valid": true,
        "p": cfg.p,
        "angular_nodes": cfg.solver.angular_nodes,
        "omega_inradius": omega.inradius(),
        "omega_circumradius": omega.circumradius(),
    }));
    Ok(0)
}

fn check_schema(files: Vec<PathBuf>) -> Result<u8, Failure> {
    let mut all_ok = true;
    let mut out = Vec::new();
    for file in files {
        let check = io::check_csv_schema(&file)?;
        all_ok &= check.ok();
        out.push(serde_json::to_value(&check).expect("check"));
    }
    print_json(&serde_json::Value::Array(out));
    Ok(if all_ok { 0 } else { 1 })
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Solve { config, output } => solve(config, output),
        Command::Lambda { config, method } => lambda(config, method),
        Command::Radii { p, n, r, tau } => radii(p, n, r, tau),
        Command::Combine { config0, config1, lambda, output } => combine(config0, config1, lambda, output),
        Command::SweepR { config, radii, output } => sweep(config, radii, output),
        Command::Envelope { input, levels, grid, output } => envelope_cmd(input, levels, grid, output),
        Command::Validate { config } => validate(config),
        Command::CheckSchema { files } => check_schema(files),
    }
}

fn main() -> ExitCode {
    // usage errors share the bad-input code rather than clap's default 2,
    // which here means "no solution"
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure { code, error }) => {
            let color = std::env::var_os("NO_COLOR").is_none() && std::io::stderr().is_terminal();
            let label = if color { "\x1b[31merror\x1b[0m" } else { "error" };
            eprintln!("{label}: {error:#}");
            ExitCode::from(code)
        }
    }
}
