//! `fce`: run benchmark cases and convergence sweeps.
//!
//! Exit status: 0 on success, 1 on usage or configuration errors, 2 when a
//! solve fails.

use std::fs::File;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fce_bench::cases::catalog;
use fce_bench::config::{
    merge, parse_axis, parse_colloc, parse_elements, parse_kind, parse_relative, parse_scaling, parse_values,
    parse_weights,
    ConfigFile,
};
use fce_bench::report::{write_csv, CsvRow};
use fce_bench::runner::{run_case, Overrides};
use fce_bench::sweep::sweep;
use fce_core::Error;

#[derive(Parser)]
#[command(name = "fce", version, about = "Functionally connected elements benchmark driver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the available cases with their default settings.
    List,
    /// Solve one case and report its errors.
    Run(Common),
    /// Solve one case over a range of element counts or orders.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Swept quantity: h (element count per direction) or p (order).
        #[arg(long)]
        axis: Option<String>,
        /// Comma-separated, strictly increasing values.
        #[arg(long)]
        values: Option<String>,
    },
}

#[derive(Args)]
struct Common {
    /// Case id (see `fce list`); may come from the config file instead.
    case: Option<String>,
    /// TOML file with default settings.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Element counts, `N` or `NxM`.
    #[arg(long)]
    elements: Option<String>,
    /// Polynomial order p.
    #[arg(long)]
    order: Option<usize>,
    /// Edge order m (2D only).
    #[arg(long)]
    edge_order: Option<usize>,
    /// Collocation points per element and direction.
    #[arg(long)]
    points: Option<usize>,
    /// Collocation family: gll or uniform.
    #[arg(long)]
    colloc: Option<String>,
    /// Continuity kind: c1, c0, mixed-x, mixed-y or nc.
    #[arg(long)]
    fce: Option<String>,
    /// Row scaling: auto, none or `sigma,sigma0,sigma1`.
    #[arg(long)]
    scaling: Option<String>,
    /// Enforcement of relative edge constraints: exact or approx.
    #[arg(long)]
    relative: Option<String>,
    /// PDE row weighting: unit, quadrature or quadrature-jacobian.
    #[arg(long)]
    weights: Option<String>,
    /// Write CSV here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Solve(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) => Failure::Usage(e.to_string()),
            _ => Failure::Solve(e.to_string()),
        }
    }
}

struct Resolved {
    case: String,
    overrides: Overrides,
    out: Option<PathBuf>,
    file: ConfigFile,
}

fn resolve(c: &Common) -> Result<Resolved, Failure> {
    let file = match &c.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let mut o = Overrides::default();
    if let Some(s) = &c.fce {
        o.kind = Some(parse_kind(s)?);
    }
    if let Some(s) = &c.elements {
        let (nx, ny) = parse_elements(s)?;
        o.nx = Some(nx);
        o.ny = ny;
    }
    o.p = c.order;
    o.m = c.edge_order;
    o.q = c.points;
    if let Some(s) = &c.colloc {
        o.colloc = Some(parse_colloc(s)?);
    }
    if let Some(s) = &c.scaling {
        o.scaling = Some(parse_scaling(s)?);
    }
    if let Some(s) = &c.relative {
        o.relative = Some(parse_relative(s)?);
    }
    if let Some(s) = &c.weights {
        o.weights = Some(parse_weights(s)?);
    }
    let overrides = merge(o, file.overrides()?);
    let case = c
        .case
        .clone()
        .or_else(|| file.case.clone())
        .ok_or_else(|| Failure::Usage("no case given (see `fce list`)".into()))?;
    let out = c.out.clone().or_else(|| file.out.clone().map(PathBuf::from));
    Ok(Resolved { case, overrides, out, file })
}

fn emit(rows: &[CsvRow], out: &Option<PathBuf>) -> Result<(), Failure> {
    match out {
        Some(path) => {
            let f = File::create(path).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?;
            write_csv(f, rows)?;
        }
        None => write_csv(std::io::stdout().lock(), rows)?,
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::List => {
            let mut w = std::io::stdout().lock();
            for c in catalog() {
                let d = c.defaults;
                let q = d.q.map_or(format!("p+{}", c.q_offset), |q| q.to_string());
                let mesh = if c.dim == 1 { d.nx.to_string() } else { format!("{}x{}", d.nx, d.ny) };
                let _ = writeln!(
                    w,
                    "{:<18} {}D  {:<3} N={:<4} p={:<3} q={:<4} {:<8} {}",
                    c.id,
                    c.dim,
                    d.kind.name(),
                    mesh,
                    d.p,
                    q,
                    d.colloc.name(),
                    c.summary
                );
            }
            Ok(())
        }
        Command::Run(common) => {
            let r = resolve(&common)?;
            let rec = run_case(&r.case, &r.overrides)?;
            emit(&[CsvRow::from(&rec)], &r.out)?;
            if r.out.is_some() {
                println!(
                    "{}: linf = {:.3e}, l2 = {:.3e}, residual = {:.3e}, cond = {:.3e}",
                    rec.case, rec.linf, rec.l2, rec.residual, rec.cond_est
                );
            }
            Ok(())
        }
        Command::Sweep { common, axis, values } => {
            let r = resolve(&common)?;
            let axis = match axis.or(r.file.axis.clone()) {
                Some(a) => parse_axis(&a)?,
                None => return Err(Failure::Usage("sweep needs --axis".into())),
            };
            let values = match (values, &r.file.values) {
                (Some(v), _) => parse_values(&v)?,
                (None, Some(v)) => v.clone(),
                (None, None) => return Err(Failure::Usage("sweep needs --values".into())),
            };
            let report = sweep(&r.case, axis, &values, &r.overrides)?;
            let rows: Vec<CsvRow> = report.points.iter().map(|p| p.row.clone()).collect();
            emit(&rows, &r.out)?;
            let fmt = |v: Option<f64>| v.map_or("n/a".to_string(), |s| format!("{s:.3}"));
            eprintln!("fitted slope: linf {}, l2 {}", fmt(report.rate_linf), fmt(report.rate_l2));
            let failed: Vec<String> = report
                .points
                .iter()
                .filter_map(|p| p.error.as_ref().map(|e| format!("{} = {}: {e}", if axis == fce_bench::SweepAxis::H { "N" } else { "p" }, p.value)))
                .collect();
            if failed.is_empty() {
                Ok(())
            } else {
                Err(Failure::Solve(failed.join("\n")))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Solve(m)) => {
            eprintln!("solver failure: {m}");
            ExitCode::from(2)
        }
    }
}
