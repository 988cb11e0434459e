//! `ttc-stress` command line.
//!
//! Exit codes: 0 pass, 1 warn (spurious dynamics flagged), 2 fail (no TTC
//! portfolio: pattern not primitive or iteration did not settle), 3 input
//! error.

use std::fs;
use std::io::{self, IsTerminal, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::diagnostics::{
    detect_spurious_dynamics, run_validation_with, SpuriousReport, ValidationOptions,
    ValidationReport, Verdict, DEFAULT_BAND, DEFAULT_HORIZON,
};
use crate::error::{Error, Result};
use crate::io::{
    emit_matrix_csv, emit_path_csv, emit_svg_chart, fmt_num, fmt_pct, parse_matrix_csv,
    parse_origination_csv, parse_path_csv, parse_portfolio_csv, parse_scenario_csv,
};
use crate::macro_link::{economy_path, estimate_p_rho, fit_macro_model, MacroModel};
use crate::propagation::{project_path, project_zero_stress, Portfolio, ProjectionPath};
use crate::transition::{
    AssetCorrelation, EconomyState, RowSums, TransitionMatrix, DEFAULT_ROW_TOL,
};
use crate::ttc::{solve_ttc_iterative_from, IterationOptions, DEFAULT_MAX_ITER, DEFAULT_TOL};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_WARN: i32 = 1;
pub const EXIT_FAIL: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "ttc-stress",
    version,
    about = "Rating-migration stress testing and TTC portfolio checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a parameterisation against a current portfolio.
    Validate(ValidateArgs),
    /// Solve for the TTC portfolio.
    Ttc(TtcArgs),
    /// Project a portfolio over a scenario.
    Propagate(PropagateArgs),
    /// Print the PIT matrix for one economy state.
    StressMatrix(StressArgs),
    /// Calibrate p, rho and the macro regression from a scenario file.
    FitMacro(FitArgs),
    /// Classify an existing path CSV.
    Diagnose(DiagnoseArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RowSumsArg {
    Renormalize,
    Preserve,
}

#[derive(Debug, Args)]
struct MatrixArgs {
    /// Transition matrix CSV (n×n, last grade is default).
    #[arg(long)]
    matrix: PathBuf,
    /// Row-sum tolerance for the matrix.
    #[arg(long, default_value_t = DEFAULT_ROW_TOL)]
    row_tol: f64,
    /// Rescale rows to sum to one, or keep entries as given.
    #[arg(long, value_enum, default_value_t = RowSumsArg::Renormalize)]
    row_sums: RowSumsArg,
}

#[derive(Debug, Args)]
struct SolverArgs {
    /// L1 stopping tolerance for the TTC iteration.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
    max_iter: usize,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[command(flatten)]
    matrix: MatrixArgs,
    #[arg(long)]
    portfolio: PathBuf,
    #[arg(long)]
    origination: PathBuf,
    #[arg(long, default_value_t = DEFAULT_HORIZON)]
    horizon: usize,
    /// Relative band around the terminal PD for spurious-dynamics checks.
    #[arg(long, default_value_t = DEFAULT_BAND)]
    band: f64,
    #[command(flatten)]
    solver: SolverArgs,
    /// Write report.json, path.csv and path.svg here.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Args)]
struct TtcArgs {
    #[command(flatten)]
    matrix: MatrixArgs,
    #[arg(long)]
    origination: PathBuf,
    /// Starting portfolio (uniform over performing grades if omitted).
    #[arg(long)]
    portfolio: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Args)]
struct PropagateArgs {
    #[command(flatten)]
    matrix: MatrixArgs,
    #[arg(long)]
    portfolio: PathBuf,
    #[arg(long)]
    origination: PathBuf,
    /// Asset correlation; taken from the calibration when a macro scenario is used.
    #[arg(long)]
    rho: Option<f64>,
    /// Constant economy state for every period.
    #[arg(long, conflicts_with = "scenario", allow_hyphen_values = true)]
    z: Option<f64>,
    /// Scenario CSV with a `z` column, or with `credit_index` and macro columns.
    #[arg(long)]
    scenario: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    lag: usize,
    /// Number of periods; defaults to 50, or the scenario length.
    #[arg(long)]
    horizon: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_BAND)]
    band: f64,
    #[arg(long, default_value = "Average PD of the projected portfolio")]
    title: String,
    /// Write path.csv, path.svg and report.json here.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Args)]
struct StressArgs {
    #[command(flatten)]
    matrix: MatrixArgs,
    #[arg(long)]
    rho: f64,
    #[arg(long, allow_hyphen_values = true)]
    z: f64,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Args)]
struct FitArgs {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long, default_value_t = 0)]
    lag: usize,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Args)]
struct DiagnoseArgs {
    /// Path CSV as written by `propagate`.
    #[arg(long)]
    path: PathBuf,
    #[arg(long, default_value_t = DEFAULT_BAND)]
    band: f64,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

struct Ctx<'a> {
    out: &'a mut dyn Write,
    color: bool,
}

/// Runs the CLI against real stdout and stderr; returns the exit code.
pub fn cli_dispatch<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = io::stdout();
    let color = stdout.is_terminal() && std::env::var_os("NO_COLOR").is_none_or(|v| v.is_empty());
    let mut out = stdout.lock();
    let mut err = io::stderr().lock();
    run_with(args, &mut out, &mut err, color)
}

/// Runs the CLI with plain output into the given writers.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run_with(args, out, err, false)
}

fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write, color: bool) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    EXIT_PASS
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    EXIT_INPUT
                }
            };
        }
    };
    let mut ctx = Ctx { out, color };
    let result = match cli.command {
        Command::Validate(a) => cmd_validate(&mut ctx, a),
        Command::Ttc(a) => cmd_ttc(&mut ctx, a),
        Command::Propagate(a) => cmd_propagate(&mut ctx, a),
        Command::StressMatrix(a) => cmd_stress(&mut ctx, a),
        Command::FitMacro(a) => cmd_fit(&mut ctx, a),
        Command::Diagnose(a) => cmd_diagnose(&mut ctx, a),
    };
    match result {
        Ok(code) => code,
        Err(CliError::Write(e)) if e.kind() == io::ErrorKind::BrokenPipe => EXIT_PASS,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

#[derive(Debug)]
enum CliError {
    Engine(Error),
    Write(io::Error),
    Usage(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Engine(e) => e.fmt(f),
            CliError::Write(e) => e.fmt(f),
            CliError::Usage(s) => f.write_str(s),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Engine(Error::NotPrimitive { .. } | Error::MaxIterations { .. }) => EXIT_FAIL,
            _ => EXIT_INPUT,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Engine(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Write(e)
    }
}

type CliResult = std::result::Result<i32, CliError>;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let p = dir.join(name);
    fs::write(&p, contents).map_err(|e| Error::Io(format!("{}: {e}", p.display())))
}

fn load_matrix(a: &MatrixArgs) -> Result<TransitionMatrix> {
    let policy = match a.row_sums {
        RowSumsArg::Renormalize => RowSums::Renormalize,
        RowSumsArg::Preserve => RowSums::Preserve,
    };
    parse_matrix_csv(&read(&a.matrix)?, a.row_tol, policy)
}

fn pick(
    format: Option<Format>,
    default: Format,
    allowed: &[Format],
) -> std::result::Result<Format, CliError> {
    let f = format.unwrap_or(default);
    if allowed.contains(&f) {
        Ok(f)
    } else {
        let names: Vec<_> = allowed
            .iter()
            .map(|f| format!("{f:?}").to_lowercase())
            .collect();
        Err(CliError::Usage(format!(
            "--format must be one of: {}",
            names.join(", ")
        )))
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

fn paint(ctx: &Ctx, verdict: &Verdict) -> String {
    let text = verdict.to_string();
    if !ctx.color {
        return text;
    }
    let code = match verdict {
        Verdict::Pass => 32,
        Verdict::Warn(_) => 33,
        Verdict::Fail(_) => 31,
    };
    format!("\x1b[{code}m{text}\x1b[0m")
}

fn weights_line(w: &[f64]) -> String {
    w.iter()
        .map(|v| format!("{v:.6}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn spurious_text(s: &SpuriousReport) -> String {
    format!(
        "{}  start {}  min {} (t={})  max {} (t={})  terminal {}",
        s.classification,
        fmt_pct(s.pds[0]),
        fmt_pct(s.min_pd),
        s.min_period,
        fmt_pct(s.max_pd),
        s.max_period,
        fmt_pct(s.terminal_pd)
    )
}

fn cmd_validate(ctx: &mut Ctx, a: ValidateArgs) -> CliResult {
    let format = pick(
        a.format,
        Format::Text,
        &[Format::Text, Format::Json, Format::Csv, Format::Svg],
    )?;
    let t = load_matrix(&a.matrix)?;
    let w = parse_portfolio_csv(&read(&a.portfolio)?)?;
    let o = parse_origination_csv(&read(&a.origination)?)?;
    let opts = ValidationOptions {
        horizon: a.horizon,
        band: a.band,
        tol: a.solver.tol,
        max_iter: a.solver.max_iter,
    };
    let report = run_validation_with(&w, &t, &o, opts)?;
    if let Some(dir) = &a.out_dir {
        write_file(dir, "report.json", &to_json(&report))?;
        write_file(dir, "path.csv", &emit_path_csv(&report.path))?;
        write_file(
            dir,
            "path.svg",
            &emit_svg_chart(&report.path, "Average PD of the current portfolio"),
        )?;
    }
    match format {
        Format::Json => write!(ctx.out, "{}", to_json(&report))?,
        Format::Csv => write!(ctx.out, "{}", emit_path_csv(&report.path))?,
        Format::Svg => write!(
            ctx.out,
            "{}",
            emit_svg_chart(&report.path, "Average PD of the current portfolio")
        )?,
        Format::Text => write_validation_text(ctx, &report)?,
    }
    Ok(report.verdict.exit_code())
}

fn write_validation_text(ctx: &mut Ctx, r: &ValidationReport) -> io::Result<()> {
    let out = &mut *ctx.out;
    match r.primitivity.first_zero {
        None => writeln!(
            out,
            "primitive      yes (checked power {})",
            r.primitivity.exponent
        )?,
        Some((i, j)) => writeln!(
            out,
            "primitive      no (entry {i},{j} of power {} is zero)",
            r.primitivity.exponent
        )?,
    }
    if let (Some(ttc), Some(div)) = (&r.ttc, &r.divergence) {
        writeln!(
            out,
            "W_ttc          {}",
            weights_line(ttc.portfolio.weights())
        )?;
        writeln!(out, "TTC PD         {}", fmt_pct(div.ttc_pd))?;
        writeln!(out, "current PD     {}", fmt_pct(div.current_pd))?;
        writeln!(out, "divergence     L1 {:.6}  Linf {:.6}", div.l1, div.linf)?;
        writeln!(
            out,
            "iterations     {}  contraction {:.6}",
            ttc.iterations, ttc.contraction_ratio
        )?;
    }
    let p = &r.perron;
    let opt = |v: Option<f64>, prec: usize| v.map_or("n/a".to_owned(), |v| format!("{v:.prec$}"));
    writeln!(
        out,
        "perron         root {}  |lambda2| {:.6}  residual {}  column sums {}",
        opt(p.perron_root, 7),
        p.second_eigenvalue_modulus,
        p.residual.map_or("n/a".to_owned(), |v| format!("{v:.2e}")),
        if p.column_sums_ok { "ok" } else { "off" }
    )?;
    writeln!(out, "projection     {}", spurious_text(&r.spurious))?;
    let v = paint(ctx, &r.verdict);
    writeln!(ctx.out, "verdict        {v}")
}

fn cmd_ttc(ctx: &mut Ctx, a: TtcArgs) -> CliResult {
    let format = pick(
        a.format,
        Format::Text,
        &[Format::Text, Format::Json, Format::Csv],
    )?;
    let t = load_matrix(&a.matrix)?;
    let o = parse_origination_csv(&read(&a.origination)?)?;
    let start = match &a.portfolio {
        Some(p) => parse_portfolio_csv(&read(p)?)?,
        None => Portfolio::uniform_performing(t.n()),
    };
    let opts = IterationOptions {
        tol: a.solver.tol,
        max_iter: a.solver.max_iter,
        check_conditions: true,
    };
    let r = solve_ttc_iterative_from(&t, &o, &start, opts)?;
    match format {
        Format::Json => write!(ctx.out, "{}", to_json(&r))?,
        Format::Csv => {
            writeln!(ctx.out, "grade,weight")?;
            for (i, w) in r.portfolio.weights().iter().enumerate() {
                writeln!(ctx.out, "{},{}", i + 1, fmt_num(*w))?;
            }
        }
        _ => {
            writeln!(ctx.out, "W_ttc {}", weights_line(r.portfolio.weights()))?;
            writeln!(ctx.out, "TTC PD {}", fmt_pct(r.ttc_pd.value()))?;
            writeln!(
                ctx.out,
                "iterations {}  final step {:.2e}  contraction {:.6}",
                r.iterations, r.final_step_delta, r.contraction_ratio
            )?;
        }
    }
    Ok(EXIT_PASS)
}

#[derive(Serialize)]
struct PropagateReport<'a> {
    rho: f64,
    model: Option<&'a MacroModel>,
    /// Classification of the unstressed projection from the same start.
    baseline: &'a SpuriousReport,
    path: &'a ProjectionPath,
}

fn cmd_propagate(ctx: &mut Ctx, a: PropagateArgs) -> CliResult {
    let format = pick(
        a.format,
        Format::Csv,
        &[Format::Csv, Format::Json, Format::Svg, Format::Text],
    )?;
    let t = load_matrix(&a.matrix)?;
    let w = parse_portfolio_csv(&read(&a.portfolio)?)?;
    let o = parse_origination_csv(&read(&a.origination)?)?;

    let mut model = None;
    let mut zs: Vec<f64> = if let Some(z) = a.z {
        vec![z; a.horizon.unwrap_or(DEFAULT_HORIZON)]
    } else if let Some(path) = &a.scenario {
        let sc = parse_scenario_csv(&read(path)?)?;
        if let Some(z) = sc.z {
            z
        } else {
            let (series, macros) = match (sc.credit_index, sc.macro_scenario) {
                (Some(s), Some(m)) => (s, m),
                _ => {
                    return Err(CliError::Usage(
                        "scenario needs a z column, or credit_index plus macro columns".into(),
                    ))
                }
            };
            let m = fit_macro_model(&series, &macros, a.lag)?;
            let z = economy_path(&m, &macros)?
                .into_iter()
                .map(EconomyState::value)
                .collect();
            model = Some(m);
            z
        }
    } else {
        vec![0.0; a.horizon.unwrap_or(DEFAULT_HORIZON)]
    };
    if let Some(h) = a.horizon {
        if a.z.is_none() && a.scenario.is_some() {
            if h > zs.len() {
                return Err(CliError::Usage(format!(
                    "scenario has {} periods, horizon is {h}",
                    zs.len()
                )));
            }
            zs.truncate(h);
        }
    }
    let rho = match (a.rho, &model) {
        (Some(r), _) => r,
        (None, Some(m)) => m.rho.value(),
        (None, None) if zs.iter().all(|z| *z == 0.0) => 0.0,
        (None, None) => {
            return Err(CliError::Usage(
                "--rho is required for a stressed projection".into(),
            ))
        }
    };
    let rho = AssetCorrelation::new(rho)?;
    let states = zs
        .iter()
        .map(|&z| EconomyState::new(z))
        .collect::<Result<Vec<_>>>()?;
    let path = project_path(&w, &t, &o, rho, &states)?;
    let baseline_path = if zs.iter().all(|z| *z == 0.0) {
        path.clone()
    } else {
        project_zero_stress(&w, &t, &o, zs.len())?
    };
    let baseline = detect_spurious_dynamics(&baseline_path, a.band)?;
    let report = PropagateReport {
        rho: rho.value(),
        model: model.as_ref(),
        baseline: &baseline,
        path: &path,
    };

    let csv = emit_path_csv(&path);
    let svg = emit_svg_chart(&path, &a.title);
    if let Some(dir) = &a.out_dir {
        write_file(dir, "path.csv", &csv)?;
        write_file(dir, "path.svg", &svg)?;
        write_file(dir, "report.json", &to_json(&report))?;
    }
    match format {
        Format::Csv => write!(ctx.out, "{csv}")?,
        Format::Svg => write!(ctx.out, "{svg}")?,
        Format::Json => write!(ctx.out, "{}", to_json(&report))?,
        Format::Text => {
            let pds = path.avg_pds();
            writeln!(ctx.out, "periods   {}", path.periods())?;
            writeln!(
                ctx.out,
                "avg PD    start {}  end {}",
                fmt_pct(pds[0]),
                fmt_pct(pds[pds.len() - 1])
            )?;
            writeln!(ctx.out, "baseline  {}", spurious_text(&baseline))?;
        }
    }
    Ok(if baseline.classification.is_spurious() {
        EXIT_WARN
    } else {
        EXIT_PASS
    })
}

fn cmd_stress(ctx: &mut Ctx, a: StressArgs) -> CliResult {
    let format = pick(a.format, Format::Csv, &[Format::Csv, Format::Json])?;
    let t = load_matrix(&a.matrix)?;
    let s = t.stressed(AssetCorrelation::new(a.rho)?, EconomyState::new(a.z)?);
    match format {
        Format::Json => write!(ctx.out, "{}", to_json(&s.to_rows()))?,
        _ => write!(ctx.out, "{}", emit_matrix_csv(&s))?,
    }
    Ok(EXIT_PASS)
}

#[derive(Serialize)]
struct FitReport {
    p: f64,
    rho: f64,
    observations: usize,
    variables: Vec<String>,
    model: Option<MacroModel>,
    /// In-sample economy states, one per scenario row.
    z: Option<Vec<f64>>,
}

fn cmd_fit(ctx: &mut Ctx, a: FitArgs) -> CliResult {
    let format = pick(a.format, Format::Text, &[Format::Text, Format::Json])?;
    let sc = parse_scenario_csv(&read(&a.scenario)?)?;
    let series = sc
        .credit_index
        .ok_or_else(|| CliError::Usage("scenario has no credit_index column".into()))?;
    let (p, rho) = estimate_p_rho(&series)?;
    let (variables, model, z) = match &sc.macro_scenario {
        Some(m) => {
            let fit = fit_macro_model(&series, m, a.lag)?;
            let z = match economy_path(&fit, m) {
                Ok(z) => Some(z.into_iter().map(EconomyState::value).collect()),
                Err(Error::NoSystematicRisk) => None,
                Err(e) => return Err(e.into()),
            };
            (m.variables.clone(), Some(fit), z)
        }
        None => (Vec::new(), None, None),
    };
    let report = FitReport {
        p: p.value(),
        rho: rho.value(),
        observations: series.len(),
        variables,
        model,
        z,
    };
    if format == Format::Json {
        write!(ctx.out, "{}", to_json(&report))?;
        return Ok(EXIT_PASS);
    }
    writeln!(ctx.out, "p         {}", fmt_pct(report.p))?;
    writeln!(ctx.out, "rho       {:.6}", report.rho)?;
    writeln!(ctx.out, "periods   {}", report.observations)?;
    if let Some(m) = &report.model {
        writeln!(ctx.out, "lag       {}", m.lag)?;
        writeln!(ctx.out, "beta_0    {:.6}", m.betas[0])?;
        for (name, b) in report.variables.iter().zip(&m.betas[1..]) {
            writeln!(ctx.out, "{:<9} {:.6}", name, b)?;
        }
        writeln!(ctx.out, "r2        {:.6}", m.r_squared)?;
    }
    Ok(EXIT_PASS)
}

fn cmd_diagnose(ctx: &mut Ctx, a: DiagnoseArgs) -> CliResult {
    let format = pick(a.format, Format::Text, &[Format::Text, Format::Json])?;
    let path = parse_path_csv(&read(&a.path)?)?;
    let r = detect_spurious_dynamics(&path, a.band)?;
    match format {
        Format::Json => write!(ctx.out, "{}", to_json(&r))?,
        _ => {
            writeln!(ctx.out, "{}", spurious_text(&r))?;
            match r.first_within_band {
                Some(t) => writeln!(ctx.out, "within band of terminal from t={t}")?,
                None => writeln!(ctx.out, "never within band of terminal")?,
            }
        }
    }
    Ok(if r.classification.is_spurious() {
        EXIT_WARN
    } else {
        EXIT_PASS
    })
}
