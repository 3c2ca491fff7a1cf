//! Command-line benchmark runner: builds a solver configuration from the
//! example defaults plus overrides, runs it and writes CSV artifacts.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Parser, ValueEnum};
use specshock::filtering::SensorConfig;
use specshock::integrate::{run_simulation, Diagnostic, FilterDomain, SimulationConfig, SimulationOutput};
use specshock::kernels::FilterSpec;
use specshock::physics::{Fields, Metrics, ProblemSpec, TimeStep};
use specshock::reference::{problem_errors, ErrorReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ABORT: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DomainArg {
    Fourier,
    Physical,
}

#[derive(Debug, Clone, Parser, PartialEq)]
#[command(
    name = "specshock",
    version,
    about = "Run the filtered pseudospectral shock-capturing benchmarks",
    arg_required_else_help = true
)]
pub struct Cli {
    /// Benchmark number, 1 to 12.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=12), required_unless_present = "suite")]
    pub example: Option<u8>,

    /// Variant of the example: `sod`/`lax` (6), `kappa=13|26|39` (7),
    /// `eta=1|0.5` (11), `gaussian|composite|wshape` (1, 2).
    /// [default: first variant listed in the benchmark definition]
    #[arg(long)]
    pub case: Option<String>,

    /// Grid points along x; the y count follows the example's aspect ratio.
    /// [default: resolution of the benchmark definition]
    #[arg(long)]
    pub n: Option<usize>,

    /// RSK filter ratio r. [default: the per-example optimal-ratio table,
    /// row chosen by example, case and N]
    #[arg(long)]
    pub r: Option<f64>,

    /// Fixed time step. [default: the step given in the benchmark definition]
    #[arg(long, conflicts_with = "cfl")]
    pub dt: Option<f64>,

    /// CFL number instead of a fixed step. [default: CFL of the benchmark when
    /// it specifies one]
    #[arg(long)]
    pub cfl: Option<f64>,

    /// Final time. [default: output time of the benchmark]
    #[arg(long)]
    pub t_final: Option<f64>,

    /// Kernel half width W. [default: 32, the width used for every example]
    #[arg(long)]
    pub w: Option<usize>,

    /// Where the filter is applied. [default: physical with walls or a
    /// Mach 3 shock, Fourier otherwise]
    #[arg(long, value_enum)]
    pub filter_domain: Option<DomainArg>,

    /// Filter when TV grows by more than this factor in one step.
    /// [default: 1.0001]
    #[arg(long)]
    pub threshold: Option<f64>,

    /// Turn the lowpass filter off.
    #[arg(long)]
    pub no_filter: bool,

    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,

    /// Also write matplotlib scripts that plot the CSV files.
    #[arg(long)]
    pub emit_plots: bool,

    /// Reproduce an error table instead of a single run: 1 is the vortex
    /// convergence table (N = 32, 64, 128), 2 the long-time table at N = 64.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2), conflicts_with = "suite")]
    pub table: Option<u8>,

    /// Run several examples and print a summary: `all` or a comma list.
    #[arg(long)]
    pub suite: Option<String>,
}

/// A fully resolved run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRequest {
    pub config: SimulationConfig,
    pub out: PathBuf,
    pub emit_plots: bool,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(io::Error),
    Abort(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Io(e) => write!(f, "io error: {e}"),
            CliError::Abort(m) => write!(f, "run aborted: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io(_) => EXIT_IO,
            CliError::Abort(_) => EXIT_ABORT,
        }
    }
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

/// Parse `argv` (program name first).
pub fn parse_args<I, T>(argv: I) -> Result<Cli, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    Cli::try_parse_from(argv)
}

/// Configuration for `example` with the overrides of `cli` applied.
pub fn build_config(cli: &Cli, example: u8) -> Result<SimulationConfig, CliError> {
    let problem = ProblemSpec::benchmark(example, cli.case.as_deref(), cli.n).map_err(usage)?;
    let mut cfg = SimulationConfig::from_problem(problem).map_err(usage)?;
    let spacing = cfg.problem.grid.axis(0).spacing();
    let ratio = cli.r.unwrap_or(cfg.filter.ratio());
    let width = cli.w.unwrap_or(cfg.filter.half_width());
    cfg.filter = FilterSpec::rsk(width, ratio, spacing).map_err(usage)?;
    if let Some(dt) = cli.dt {
        cfg.time_step = TimeStep::Fixed(dt);
    }
    if let Some(c) = cli.cfl {
        cfg.time_step = TimeStep::Cfl(c);
    }
    if let Some(t) = cli.t_final {
        cfg.t_final = t;
    }
    if let Some(d) = cli.filter_domain {
        cfg.filter_domain = match d {
            DomainArg::Fourier => FilterDomain::Fourier,
            DomainArg::Physical => FilterDomain::Physical,
        };
    }
    if let Some(th) = cli.threshold {
        cfg.sensor = SensorConfig::new(th, cfg.sensor.monitored()).map_err(usage)?;
    }
    cfg.filter_enabled = !cli.no_filter;
    cfg.validate().map_err(usage)?;
    Ok(cfg)
}

pub fn build_request(cli: &Cli) -> Result<RunRequest, CliError> {
    let example = cli.example.ok_or_else(|| usage("--example is required"))?;
    Ok(RunRequest {
        config: build_config(cli, example)?,
        out: cli.out.clone(),
        emit_plots: cli.emit_plots,
    })
}

/// 17 significant digits: enough to read back the same `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// `x[,y]` then one column per conserved variable.
pub fn fields_csv(problem: &ProblemSpec, fields: &Fields) -> Result<String, CliError> {
    let grid = &problem.grid;
    let (nx, ny) = grid.shape();
    let names = problem.system.names();
    let coords = match problem.mapping() {
        Some(m) => {
            let met = Metrics::new(m, grid).map_err(|e| CliError::Abort(e.to_string()))?;
            Some((met.x, met.y))
        }
        None => None,
    };
    let mut s = String::new();
    let mut header = vec!["x"];
    if grid.dim() == 2 {
        header.push("y");
    }
    header.extend(names.iter());
    s.push_str(&header.join(","));
    s.push('\n');
    for i in 0..nx {
        for j in 0..ny {
            let mut row = Vec::with_capacity(header.len());
            match &coords {
                Some((x, y)) => {
                    row.push(fmt_f64(x[[i, j]]));
                    row.push(fmt_f64(y[[i, j]]));
                }
                None => {
                    row.push(fmt_f64(grid.axis(0).coord(i)));
                    if grid.dim() == 2 {
                        row.push(fmt_f64(grid.axis(1).coord(j)));
                    }
                }
            }
            row.extend(fields.iter().map(|f| fmt_f64(f[[i, j]])));
            s.push_str(&row.join(","));
            s.push('\n');
        }
    }
    Ok(s)
}

/// Parse a CSV written by [`fields_csv`]: header plus rows of numbers.
pub fn read_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>), String> {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<String> = lines
        .next()
        .ok_or("empty file")?
        .split(',')
        .map(str::to_string)
        .collect();
    let rows = lines
        .map(|l| {
            l.split(',')
                .map(|v| {
                    if v.is_empty() {
                        Ok(f64::NAN)
                    } else {
                        v.parse::<f64>().map_err(|e| e.to_string())
                    }
                })
                .collect::<Result<Vec<f64>, String>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok((header, rows))
}

pub fn diagnostics_csv(diag: &[Diagnostic]) -> String {
    let mut s = String::from("step,t,tv,filtered,mass,min_p\n");
    for d in diag {
        let min_p = d.min_pressure.map(fmt_f64).unwrap_or_default();
        let _ = writeln!(
            s,
            "{},{},{},{},{},{min_p}",
            d.step,
            fmt_f64(d.t),
            fmt_f64(d.tv),
            d.filtered as u8,
            fmt_f64(d.mass)
        );
    }
    s
}

pub fn errors_csv(reports: &[ErrorReport]) -> String {
    let mut s = String::from("field,t,n,l1,l2\n");
    for r in reports {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            r.field,
            fmt_f64(r.time),
            r.n,
            fmt_f64(r.l1),
            fmt_f64(r.l2)
        );
    }
    s
}

const PLOT_1D: &str = r#"import sys
import pandas as pd
import matplotlib.pyplot as plt

d = pd.read_csv(sys.argv[1] if len(sys.argv) > 1 else "fields.csv")
cols = [c for c in d.columns if c != "x"]
fig, axes = plt.subplots(len(cols), 1, sharex=True, figsize=(6, 2.5 * len(cols)), squeeze=False)
for ax, c in zip(axes[:, 0], cols):
    ax.plot(d["x"], d[c], "k.-", ms=3, lw=0.8)
    ax.set_ylabel(c)
axes[-1, 0].set_xlabel("x")
fig.tight_layout()
fig.savefig("fields.png", dpi=150)
"#;

const PLOT_2D: &str = r#"import sys
import pandas as pd
import matplotlib.pyplot as plt

d = pd.read_csv(sys.argv[1] if len(sys.argv) > 1 else "fields.csv")
rho, e = d["rho"], d["E"]
p = 0.4 * (e - 0.5 * (d["rho_u"] ** 2 + d["rho_v"] ** 2) / rho)
fig, axes = plt.subplots(1, 2, figsize=(11, 4.5))
for ax, (name, v) in zip(axes, [("density", rho), ("pressure", p)]):
    ax.tricontour(d["x"], d["y"], v, levels=30, colors="k", linewidths=0.6)
    ax.set_aspect("equal")
    ax.set_title(name)
fig.tight_layout()
fig.savefig("fields.png", dpi=150)
"#;

const PLOT_DIAG: &str = r#"import pandas as pd
import matplotlib.pyplot as plt

d = pd.read_csv("diagnostics.csv")
fig, (a, b) = plt.subplots(2, 1, sharex=True, figsize=(6, 5))
a.plot(d["t"], d["tv"], "k-", lw=0.8)
f = d[d["filtered"] == 1]
a.plot(f["t"], f["tv"], "r|", ms=6)
a.set_ylabel("total variation")
b.plot(d["t"], d["mass"], "k-", lw=0.8)
b.set_ylabel("mass")
b.set_xlabel("t")
fig.tight_layout()
fig.savefig("diagnostics.png", dpi=150)
"#;

/// Result of [`run_benchmark`]; the artifacts are on disk.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub output: SimulationOutput,
    pub errors: Option<ErrorReport>,
    pub seconds: f64,
}

fn write(dir: &Path, name: &str, text: &str) -> Result<(), CliError> {
    fs::write(dir.join(name), text).map_err(CliError::Io)
}

/// Run one request and write its artifacts.
pub fn run_benchmark(req: &RunRequest) -> Result<RunResult, CliError> {
    fs::create_dir_all(&req.out)?;
    let clock = Instant::now();
    let output = match run_simulation(&req.config) {
        Ok(o) => o,
        Err(abort) => {
            write(&req.out, "diagnostics.csv", &diagnostics_csv(&abort.diagnostics))?;
            return Err(CliError::Abort(format!(
                "{} (step {}, t = {})",
                abort.error, abort.step, abort.t
            )));
        }
    };
    let seconds = clock.elapsed().as_secs_f64();
    let problem = &req.config.problem;
    write(&req.out, "fields.csv", &fields_csv(problem, &output.fields)?)?;
    write(&req.out, "diagnostics.csv", &diagnostics_csv(&output.diagnostics))?;
    let errors = problem_errors(problem, &output.fields[0], output.t).map_err(|e| CliError::Abort(e.to_string()))?;
    if let Some(r) = &errors {
        write(&req.out, "errors.csv", &errors_csv(std::slice::from_ref(r)))?;
    }
    if req.emit_plots {
        let fields_script = if problem.grid.dim() == 1 { PLOT_1D } else { PLOT_2D };
        write(&req.out, "plot_fields.py", fields_script)?;
        write(&req.out, "plot_diagnostics.py", PLOT_DIAG)?;
    }
    Ok(RunResult {
        output,
        errors,
        seconds,
    })
}

/// One row of an error table.
#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub label: String,
    pub l1: f64,
    pub l2: f64,
}

pub fn format_table(title: &str, rows: &[TableRow]) -> String {
    let mut s = format!("{title}\n{:<12} {:>12} {:>12}\n", "", "L1", "L2");
    for r in rows {
        let _ = writeln!(s, "{:<12} {:>12.2E} {:>12.2E}", r.label, r.l1, r.l2);
    }
    s
}

fn density_errors(cfg: &SimulationConfig) -> Result<ErrorReport, CliError> {
    let out = run_simulation(cfg).map_err(|a| CliError::Abort(a.error.to_string()))?;
    problem_errors(&cfg.problem, &out.fields[0], out.t)
        .map_err(|e| CliError::Abort(e.to_string()))?
        .ok_or_else(|| CliError::Abort("no reference solution".into()))
}

/// Vortex error tables. Table 1 varies N at t = 2; table 2 varies t at N = 64
/// up to `--t-final` (default 1000).
pub fn run_table(cli: &Cli, which: u8) -> Result<String, CliError> {
    let mut rows = Vec::new();
    if which == 1 {
        for n in [32, 64, 128] {
            let c = Cli {
                n: Some(n),
                case: Some("eta=1".into()),
                ..cli.clone()
            };
            let r = density_errors(&build_config(&c, 11)?)?;
            rows.push(TableRow {
                label: format!("N={n}"),
                l1: r.l1,
                l2: r.l2,
            });
        }
        return Ok(format_table(
            "isentropic vortex, density error at t = 2 (CFL 0.01)",
            &rows,
        ));
    }
    let last = cli.t_final.unwrap_or(1000.0);
    for t in [100.0, 200.0, 400.0, 600.0, 800.0, 1000.0]
        .into_iter()
        .filter(|&t| t <= last)
    {
        let c = Cli {
            n: Some(cli.n.unwrap_or(64)),
            case: Some("eta=0.5".into()),
            t_final: Some(t),
            ..cli.clone()
        };
        let r = density_errors(&build_config(&c, 11)?)?;
        rows.push(TableRow {
            label: format!("t={t}"),
            l1: r.l1,
            l2: r.l2,
        });
    }
    Ok(format_table(
        "isentropic vortex, density error at N = 64 (CFL 0.5, eta = 0.5)",
        &rows,
    ))
}

/// L1 gate on the first variable for examples that have one.
pub fn l1_gate(cfg: &SimulationConfig) -> Option<f64> {
    let p = &cfg.problem;
    match (p.example, p.case.as_str()) {
        (4, _) => Some(5e-3),
        (6, "sod") => Some(2e-2),
        (6, "lax") => Some(4e-2),
        (11, _) if p.grid.axis(0).points() == 32 => Some(5e-4),
        (11, "eta=1") if p.grid.axis(0).points() == 64 => Some(5e-7),
        (11, _) if p.grid.axis(0).points() == 64 => Some(1e-5),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteRow {
    pub label: String,
    pub steps: usize,
    pub l1: Option<f64>,
    pub gate: Option<f64>,
    pub passed: bool,
    pub note: String,
}

/// Run each configuration in turn. A run that aborts fails its row only.
pub fn run_suite(runs: &[SimulationConfig]) -> Vec<SuiteRow> {
    runs.iter()
        .map(|cfg| {
            let p = &cfg.problem;
            let label = if p.case.is_empty() {
                format!("ex{}", p.example)
            } else {
                format!("ex{} {}", p.example, p.case)
            };
            let gate = l1_gate(cfg);
            match run_simulation(cfg) {
                Ok(out) => {
                    let l1 = problem_errors(p, &out.fields[0], out.t).ok().flatten().map(|r| r.l1);
                    let passed = match (gate, l1) {
                        (Some(g), Some(v)) => v <= g,
                        _ => true,
                    };
                    SuiteRow {
                        label,
                        steps: out.steps,
                        l1,
                        gate,
                        passed,
                        note: format!("t = {}", out.t),
                    }
                }
                Err(a) => SuiteRow {
                    label,
                    steps: a.step,
                    l1: None,
                    gate,
                    passed: false,
                    note: a.error.to_string(),
                },
            }
        })
        .collect()
}

pub fn format_suite(rows: &[SuiteRow]) -> String {
    let mut s = format!(
        "{:<16} {:>7} {:>11} {:>9} {:>6}  note\n",
        "example", "steps", "L1", "gate", "status"
    );
    let opt = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.3e}"));
    for r in rows {
        let _ = writeln!(
            s,
            "{:<16} {:>7} {:>11} {:>9} {:>6}  {}",
            r.label,
            r.steps,
            opt(r.l1),
            opt(r.gate),
            if r.passed { "pass" } else { "FAIL" },
            r.note
        );
    }
    s
}

/// Examples named by `--suite`: `all` or a comma list of numbers, where 6
/// expands to both shock tubes.
pub fn suite_configs(cli: &Cli, list: &str) -> Result<Vec<SimulationConfig>, CliError> {
    let ids: Vec<u8> = if list.trim() == "all" {
        (1..=12).collect()
    } else {
        list.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<u8>()
                    .map_err(|_| usage(format!("bad example `{s}` in suite")))
            })
            .collect::<Result<_, _>>()?
    };
    let mut out = Vec::new();
    for id in ids {
        if id == 6 && cli.case.is_none() {
            for case in ["sod", "lax"] {
                out.push(build_config(
                    &Cli {
                        case: Some(case.into()),
                        ..cli.clone()
                    },
                    6,
                )?);
            }
        } else {
            out.push(build_config(cli, id)?);
        }
    }
    Ok(out)
}

/// Entry point shared by the binary and the tests; returns the exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match parse_args(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("specshock: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> Result<i32, CliError> {
    if let Some(list) = &cli.suite {
        let rows = run_suite(&suite_configs(cli, list)?);
        print!("{}", format_suite(&rows));
        return Ok(if rows.iter().all(|r| r.passed) {
            EXIT_OK
        } else {
            EXIT_ABORT
        });
    }
    if let Some(which) = cli.table {
        let table = run_table(cli, which)?;
        fs::create_dir_all(&cli.out)?;
        fs::write(cli.out.join(format!("table{which}.txt")), &table)?;
        print!("{table}");
        return Ok(EXIT_OK);
    }
    let req = build_request(cli)?;
    let res = run_benchmark(&req)?;
    println!(
        "example {} finished: t = {}, {} steps, {} filtered, {:.1}s",
        req.config.problem.example, res.output.t, res.output.steps, res.output.filter_count, res.seconds
    );
    if let Some(e) = res.errors {
        println!("{} error: L1 = {:.3e}, L2 = {:.3e}", e.field, e.l1, e.l2);
    }
    Ok(EXIT_OK)
}
