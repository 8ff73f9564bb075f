//! Command-line front end: single solves, table sweeps and curve export.

use crate::error::{Error, Result};
use crate::integrator::IntegratorConfig;
use crate::models::FamilyKind;
use crate::reference::entropy_cylinder_closed_form;
use crate::shooting::{
    default_config, solve_angenent, solve_cheng_wei, solve_mcgrath, solve_sphere, SolveReport,
    CHENG_WEI_OUTER_TOL,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

pub const EXIT_SUCCESS: i32 = 0;
pub const EXIT_SOLVER_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Dimensions of the published tables that are practical on a desktop.
pub const PUBLISHED_GRID: [u64; 14] = [2, 3, 4, 5, 10, 30, 60, 100, 300, 500, 1000, 3000, 5000, 10000];

pub const CSV_HEADER: &str = "dimension,r0,a0,perimeter,entropy,closure_residual,iterations,wall_time_s";
pub const CURVE_HEADER: &str = "s,x,r,theta,entropy_acc";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Angenent,
    Mcgrath,
    ChengWei,
    Sphere,
    Cylinder,
}

impl Family {
    fn kind(self, dim: u64) -> Option<FamilyKind> {
        match self {
            Family::Angenent | Family::Sphere => Some(FamilyKind::Rotational(dim)),
            Family::Mcgrath => Some(FamilyKind::DoublyRotational(dim)),
            Family::ChengWei => Some(FamilyKind::ChengWei(dim)),
            Family::Cylinder => None,
        }
    }

    fn min_dim(self) -> u64 {
        match self {
            Family::Cylinder => 1,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Grid {
    /// The published table dimensions up to 10^4.
    Paper,
}

#[derive(Debug, Parser)]
#[command(name = "shrinkshoot", version, about = "Profiles, perimeters and entropies of self-shrinkers by ODE shooting")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one dimension and print one row.
    Solve(RunArgs),
    /// Solve a list of dimensions, one row each, in input order.
    Table(RunArgs),
    /// Export the converged profile as a uniformly resampled polyline.
    Curve(RunArgs),
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    /// Comma list and inclusive ranges, e.g. `2,3,10..12`. For McGrath
    /// shrinkers this is m; for cylinders the sphere factor's dimension.
    #[arg(long, required_unless_present = "grid", conflicts_with = "grid")]
    pub dims: Option<String>,
    #[arg(long, value_enum)]
    pub grid: Option<Grid>,
    #[arg(long, default_value_t = 1e-10)]
    pub rel_tol: f64,
    #[arg(long, default_value_t = 1e-12)]
    pub abs_tol: f64,
    /// Radius bracket tolerance (the inner one for Cheng–Wei).
    #[arg(long, default_value_t = 1e-10)]
    pub bracket_tol: f64,
    /// Angle bracket tolerance for Cheng–Wei.
    #[arg(long, default_value_t = CHENG_WEI_OUTER_TOL)]
    pub outer_tol: f64,
    /// Arc-length budget; 6 by default, 10 for Cheng–Wei.
    #[arg(long)]
    pub l_max: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Rows of curve output.
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    /// Worker threads for table sweeps; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// Record wall-clock times. Off by default so output is reproducible.
    #[arg(long)]
    pub timing: bool,
}

/// Validated settings for one command.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub family: Family,
    pub dims: Vec<u64>,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub bracket_tol: f64,
    pub outer_tol: f64,
    pub l_max: Option<f64>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub samples: usize,
    pub jobs: usize,
    pub timing: bool,
}

/// Parse `2,3,10..12` into `[2, 3, 10, 11, 12]`.
pub fn parse_dims(spec: &str) -> Result<Vec<u64>> {
    let bad = |part: &str| Error::InvalidConfig(format!("cannot parse dimension `{part}`"));
    let mut dims = Vec::new();
    for part in spec.split(',').map(str::trim) {
        if part.is_empty() {
            return Err(bad(part));
        }
        if let Some((a, b)) = part.split_once("..") {
            let a: u64 = a.trim().parse().map_err(|_| bad(part))?;
            let b: u64 = b.trim().parse().map_err(|_| bad(part))?;
            if a > b {
                return Err(Error::InvalidConfig(format!("empty range `{part}`")));
            }
            dims.extend(a..=b);
        } else {
            dims.push(part.parse().map_err(|_| bad(part))?);
        }
    }
    Ok(dims)
}

impl RunConfig {
    pub fn from_args(args: &RunArgs) -> Result<Self> {
        let dims = match (&args.dims, args.grid) {
            (Some(spec), _) => parse_dims(spec)?,
            (None, Some(Grid::Paper)) => PUBLISHED_GRID.to_vec(),
            (None, None) => return Err(Error::InvalidConfig("either --dims or --grid is required".into())),
        };
        if dims.is_empty() {
            return Err(Error::InvalidConfig("no dimensions given".into()));
        }
        let min = args.family.min_dim();
        if let Some(&d) = dims.iter().find(|&&d| d < min) {
            return Err(Error::InvalidConfig(format!("dimension {d} is below the minimum {min}")));
        }
        for (value, name) in [
            (args.rel_tol, "--rel-tol"),
            (args.abs_tol, "--abs-tol"),
            (args.bracket_tol, "--bracket-tol"),
            (args.outer_tol, "--outer-tol"),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidConfig(format!("{name} must be positive, got {value}")));
            }
        }
        if let Some(l) = args.l_max {
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::InvalidConfig(format!("--l-max must be positive, got {l}")));
            }
        }
        Ok(Self {
            family: args.family,
            dims,
            rel_tol: args.rel_tol,
            abs_tol: args.abs_tol,
            bracket_tol: args.bracket_tol,
            outer_tol: args.outer_tol,
            l_max: args.l_max,
            format: args.format,
            out: args.out.clone(),
            samples: args.samples,
            jobs: args.jobs,
            timing: args.timing,
        })
    }

    fn integrator(&self, kind: FamilyKind) -> IntegratorConfig {
        let mut config = default_config(kind);
        config.rel_tol = self.rel_tol;
        config.abs_tol = self.abs_tol;
        if let Some(l) = self.l_max {
            config.max_arc_length = l;
        }
        config
    }

    fn single_dim(&self) -> Result<u64> {
        match self.dims.as_slice() {
            [d] => Ok(*d),
            _ => Err(Error::InvalidConfig(format!("expected one dimension, got {}", self.dims.len()))),
        }
    }
}

/// One output row. `None` fields are absent for the family.
#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub dimension: u64,
    pub r0: f64,
    pub a0: Option<f64>,
    pub perimeter: Option<f64>,
    pub entropy: f64,
    pub closure_residual: Option<f64>,
    pub iterations: u32,
    pub wall_time_s: f64,
}

impl TableRow {
    fn from_report(dimension: u64, report: &SolveReport, wall_time_s: f64) -> Self {
        Self {
            dimension,
            r0: report.params.r0,
            a0: report.params.a0,
            perimeter: Some(report.perimeter),
            entropy: report.entropy,
            closure_residual: Some(report.closure_residual()),
            iterations: report.iterations.outer,
            wall_time_s,
        }
    }

    fn failed(dimension: u64, family: Family, wall_time_s: f64) -> Self {
        Self {
            dimension,
            r0: f64::NAN,
            a0: (family == Family::ChengWei).then_some(f64::NAN),
            perimeter: Some(f64::NAN),
            entropy: f64::NAN,
            closure_residual: Some(f64::NAN),
            iterations: 0,
            wall_time_s,
        }
    }

    pub fn to_csv(&self) -> String {
        let real = |v: f64| format!("{v:.8}");
        let opt = |v: Option<f64>| v.map(real).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{}",
            self.dimension,
            real(self.r0),
            opt(self.a0),
            opt(self.perimeter),
            real(self.entropy),
            opt(self.closure_residual),
            self.iterations,
            real(self.wall_time_s),
        )
    }

    pub fn to_json(&self) -> String {
        format!(
            "{{\"dimension\":{},\"r0\":{},\"a0\":{},\"perimeter\":{},\"entropy\":{},\"closure_residual\":{},\"iterations\":{},\"wall_time_s\":{}}}",
            self.dimension,
            json_real(Some(self.r0)),
            json_real(self.a0),
            json_real(self.perimeter),
            json_real(Some(self.entropy)),
            json_real(self.closure_residual),
            self.iterations,
            json_real(Some(self.wall_time_s)),
        )
    }
}

/// 17 significant digits, which round-trips every `f64`; `null` for absent
/// or non-finite values.
fn json_real(v: Option<f64>) -> String {
    match v {
        Some(v) if v.is_finite() => format!("{v:.16e}"),
        _ => "null".into(),
    }
}

pub fn render_rows(rows: &[TableRow], format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Csv => {
            out.push_str(CSV_HEADER);
            out.push('\n');
            for row in rows {
                out.push_str(&row.to_csv());
                out.push('\n');
            }
        }
        Format::Json => {
            out.push('[');
            for (i, row) in rows.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str("\n  ");
                out.push_str(&row.to_json());
            }
            out.push_str("\n]\n");
        }
    }
    out
}

/// Run the family's driver for one dimension.
pub fn solve(config: &RunConfig, dim: u64) -> Result<SolveReport> {
    let kind = config
        .family
        .kind(dim)
        .ok_or_else(|| Error::InvalidConfig("cylinders have a closed form and no profile to shoot".into()))?;
    let integrator = config.integrator(kind);
    match config.family {
        Family::Angenent => solve_angenent(dim, &integrator, config.bracket_tol),
        Family::Mcgrath => solve_mcgrath(dim, &integrator, config.bracket_tol),
        Family::ChengWei => solve_cheng_wei(dim, &integrator, config.outer_tol, config.bracket_tol),
        Family::Sphere => solve_sphere(dim, &integrator),
        Family::Cylinder => unreachable!("handled above"),
    }
}

/// Compute one row.
pub fn solve_row(config: &RunConfig, dim: u64) -> Result<TableRow> {
    let start = Instant::now();
    let elapsed = |start: Instant| if config.timing { start.elapsed().as_secs_f64() } else { 0.0 };
    if config.family == Family::Cylinder {
        let entropy = entropy_cylinder_closed_form(dim, dim + 1)?;
        return Ok(TableRow {
            dimension: dim,
            r0: (dim as f64).sqrt(),
            a0: None,
            perimeter: None,
            entropy,
            closure_residual: None,
            iterations: 0,
            wall_time_s: elapsed(start),
        });
    }
    let report = solve(config, dim)?;
    Ok(TableRow::from_report(dim, &report, elapsed(start)))
}

/// A dimension whose solve failed, with the reason.
pub type RowFailure = (u64, Error);

/// Rows for every dimension in input order, computed on `config.jobs`
/// threads. Failed rows hold NaN and are reported in the second value.
pub fn sweep(config: &RunConfig) -> Result<(Vec<TableRow>, Vec<RowFailure>)> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("cannot start worker pool: {e}")))?;
    let results: Vec<(u64, Result<TableRow>, f64)> = pool.install(|| {
        config
            .dims
            .par_iter()
            .map(|&dim| {
                let start = Instant::now();
                let row = solve_row(config, dim);
                let t = if config.timing { start.elapsed().as_secs_f64() } else { 0.0 };
                (dim, row, t)
            })
            .collect()
    });
    let mut rows = Vec::with_capacity(results.len());
    let mut failures = Vec::new();
    for (dim, result, t) in results {
        match result {
            Ok(row) => rows.push(row),
            Err(e) => {
                rows.push(TableRow::failed(dim, config.family, t));
                failures.push((dim, e));
            }
        }
    }
    Ok((rows, failures))
}

/// Curve samples `(s, x, r, θ, Λ)` of a converged profile.
pub fn curve(config: &RunConfig) -> Result<Vec<[f64; 5]>> {
    let dim = config.single_dim()?;
    if config.samples < 2 {
        return Err(Error::InvalidConfig("--samples must be at least 2".into()));
    }
    let report = solve(config, dim)?;
    Ok(report
        .trajectory
        .resample(config.samples)
        .into_iter()
        .map(|(s, y)| [s, y[0], y[1], y[2], y[3]])
        .collect())
}

pub fn render_curve(points: &[[f64; 5]], format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Csv => {
            out.push_str(CURVE_HEADER);
            out.push('\n');
            for p in points {
                let _ = writeln!(out, "{:.12},{:.12},{:.12},{:.12},{:.12}", p[0], p[1], p[2], p[3], p[4]);
            }
        }
        Format::Json => {
            out.push('[');
            for (i, p) in points.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                let _ = write!(
                    out,
                    "\n  {{\"s\":{},\"x\":{},\"r\":{},\"theta\":{},\"entropy_acc\":{}}}",
                    json_real(Some(p[0])),
                    json_real(Some(p[1])),
                    json_real(Some(p[2])),
                    json_real(Some(p[3])),
                    json_real(Some(p[4])),
                );
            }
            out.push_str("\n]\n");
        }
    }
    out
}

fn emit(config: &RunConfig, text: &str, stdout: &mut dyn Write) -> std::io::Result<()> {
    match &config.out {
        Some(path) => std::fs::write(path, text),
        None => stdout.write_all(text.as_bytes()),
    }
}

fn is_usage(e: &Error) -> bool {
    matches!(e, Error::InvalidConfig(_) | Error::Domain(_))
}

/// Parse `args` and run; returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_SUCCESS };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return code;
        }
    };
    let (command, args) = match &cli.command {
        Command::Solve(a) => ("solve", a),
        Command::Table(a) => ("table", a),
        Command::Curve(a) => ("curve", a),
    };
    let config = match RunConfig::from_args(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_USAGE;
        }
    };

    let outcome: std::result::Result<(String, i32), Error> = match command {
        "solve" => config.single_dim().and_then(|dim| solve_row(&config, dim)).map(|row| (render_rows(&[row], config.format), EXIT_SUCCESS)),
        "table" => sweep(&config).map(|(rows, failures)| {
            for (dim, e) in &failures {
                let _ = writeln!(stderr, "error: dimension {dim}: {e}");
            }
            let code = if failures.is_empty() { EXIT_SUCCESS } else { EXIT_SOLVER_FAILURE };
            (render_rows(&rows, config.format), code)
        }),
        _ => curve(&config).map(|points| (render_curve(&points, config.format), EXIT_SUCCESS)),
    };

    match outcome {
        Ok((text, code)) => {
            if let Err(e) = emit(&config, &text, stdout) {
                let _ = writeln!(stderr, "error: cannot write output: {e}");
                return EXIT_SOLVER_FAILURE;
            }
            code
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if is_usage(&e) {
                EXIT_USAGE
            } else {
                EXIT_SOLVER_FAILURE
            }
        }
    }
}
