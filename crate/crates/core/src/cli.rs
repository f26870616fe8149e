//! Command-line front end.
//!
//! ```text
//! sisi validate     [PARAMS]
//! sisi step         [PARAMS] --start x,u,y,v
//! sisi simulate     [PARAMS] --start x,u,y,v [--max-iters N] [--tol T]
//! sisi fixed-points [PARAMS]
//! sisi classify     [PARAMS] [--start x,u,y,v] [--tol T]
//! sisi evidence     --scenario S [PARAMS] [--trials N] [--seed N] [--max-iters N] [--tol T]
//! sisi sweep        --grid FILE [--task T] [--seed N] [--max-iters N] [--tol T]
//!
//! PARAMS: --b --alpha --beta1 --beta2 --k1 --k2, or --params b,alpha,beta1,beta2,k1,k2
//! every subcommand: [--config FILE] [--format human|csv|json] [--out FILE]
//! ```
//!
//! Exit status is 0 on success, 1 on domain errors and 2 on usage errors.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::dynamics::{apply, force_of_infection, iterate_trajectory, TrajectoryStatus, TOL_CONV};
use crate::error::Error;
use crate::fixed_points::{enumerate_fixed_points, FixedPointLabel, RootOutcome};
use crate::harness::{
    run_sweep, run_trials, EvidenceConfig, EvidenceReport, Scenario, SweepGrid, SweepRow, SweepTask, TrialRecord,
};
use crate::params::{validate_params, Condition, Params};
use crate::report::{fmt_f64, fmt_opt_f64, write_json, Document, Table};
use crate::simplex::SimplexPoint;
use crate::stability::{classify_fixed_point, Classification, UNIT_CIRCLE_TOL};

pub const DEFAULT_TRIALS: u64 = 200;
pub const DEFAULT_SEED: u64 = 0;

#[derive(Debug, Parser)]
#[command(name = "sisi", version, about = "Discrete-time SISI epidemic operator on the 3-simplex")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the admissibility inequalities
    Validate(Common),
    /// Apply the operator once
    Step {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        start: Option<String>,
    },
    /// Iterate a trajectory until convergence
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        start: Option<String>,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        max_iters: Option<u64>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Enumerate the fixed points
    FixedPoints(Common),
    /// Classify fixed points by their Jacobian spectrum
    Classify {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        start: Option<String>,
        /// Guard band around the unit circle
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Monte-Carlo evidence for a convergence scenario
    Evidence {
        #[command(flatten)]
        common: Common,
        /// conjecture1, conjecture2, theorem3 or theorem2-local
        #[arg(long)]
        scenario: Option<String>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        max_iters: Option<u64>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Evaluate a task over a parameter grid
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        grid: Option<PathBuf>,
        /// fixed_points, classify or limit
        #[arg(long)]
        task: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        max_iters: Option<u64>,
        #[arg(long)]
        tol: Option<f64>,
    },
}

#[derive(Debug, Clone, Default, Args)]
struct Common {
    #[arg(long)]
    b: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta1: Option<f64>,
    #[arg(long)]
    beta2: Option<f64>,
    #[arg(long)]
    k1: Option<f64>,
    #[arg(long)]
    k2: Option<f64>,
    /// b,alpha,beta1,beta2,k1,k2
    #[arg(long)]
    params: Option<String>,
    /// JSON file supplying any of the flags; flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Human,
    Csv,
    Json,
}

/// A comma-separated list or a JSON array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum NumList {
    Text(String),
    Values(Vec<f64>),
}

impl NumList {
    fn values(&self, what: &str, n: usize) -> Result<Vec<f64>, CliError> {
        let v = match self {
            NumList::Values(v) => v.clone(),
            NumList::Text(s) => s
                .split(',')
                .map(|t| t.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| CliError::Usage(format!("--{what}: {e}")))?,
        };
        if v.len() != n {
            return Err(CliError::Usage(format!("--{what} expects {n} comma-separated numbers, got {}", v.len())));
        }
        Ok(v)
    }
}

/// Every flag, as read from the command line or a config file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct Settings {
    b: Option<f64>,
    alpha: Option<f64>,
    beta1: Option<f64>,
    beta2: Option<f64>,
    k1: Option<f64>,
    k2: Option<f64>,
    params: Option<NumList>,
    start: Option<NumList>,
    #[serde(alias = "max_iters")]
    max_iters: Option<u64>,
    tol: Option<f64>,
    seed: Option<u64>,
    trials: Option<u64>,
    scenario: Option<String>,
    grid: Option<PathBuf>,
    task: Option<String>,
    out: Option<PathBuf>,
    format: Option<Format>,
}

impl Settings {
    /// Fills every unset field from `base`.
    fn or(self, base: Settings) -> Settings {
        Settings {
            b: self.b.or(base.b),
            alpha: self.alpha.or(base.alpha),
            beta1: self.beta1.or(base.beta1),
            beta2: self.beta2.or(base.beta2),
            k1: self.k1.or(base.k1),
            k2: self.k2.or(base.k2),
            params: self.params.or(base.params),
            start: self.start.or(base.start),
            max_iters: self.max_iters.or(base.max_iters),
            tol: self.tol.or(base.tol),
            seed: self.seed.or(base.seed),
            trials: self.trials.or(base.trials),
            scenario: self.scenario.or(base.scenario),
            grid: self.grid.or(base.grid),
            task: self.task.or(base.task),
            out: self.out.or(base.out),
            format: self.format.or(base.format),
        }
    }

    fn individual_params(&self) -> [Option<f64>; 6] {
        [self.b, self.alpha, self.beta1, self.beta2, self.k1, self.k2]
    }

    fn has_params(&self) -> bool {
        self.params.is_some() || self.individual_params().iter().any(Option::is_some)
    }

    /// `--params` first, individual flags override single entries.
    fn params(&self) -> Result<Params, CliError> {
        let mut values: [Option<f64>; 6] = [None; 6];
        if let Some(list) = &self.params {
            for (slot, v) in values.iter_mut().zip(list.values("params", 6)?) {
                *slot = Some(v);
            }
        }
        for (slot, v) in values.iter_mut().zip(self.individual_params()) {
            if v.is_some() {
                *slot = v;
            }
        }
        let names = crate::params::PARAM_NAMES;
        let mut out = [0.0; 6];
        for (i, v) in values.iter().enumerate() {
            out[i] = v.ok_or_else(|| CliError::Usage(format!("missing parameter --{}", names[i])))?;
        }
        Params::from_array(out).map_err(|e| CliError::Usage(e.to_string()))
    }

    fn start(&self) -> Result<Option<SimplexPoint>, CliError> {
        match &self.start {
            None => Ok(None),
            Some(list) => {
                let v = list.values("start", 4)?;
                Ok(Some(SimplexPoint::new(v[0], v[1], v[2], v[3])?))
            }
        }
    }

    fn required_start(&self) -> Result<SimplexPoint, CliError> {
        self.start()?.ok_or_else(|| CliError::Usage("missing --start x,u,y,v".into()))
    }

    fn max_iters(&self, default: u64) -> Result<u64, CliError> {
        match self.max_iters {
            Some(0) => Err(CliError::Usage("--max-iters must be at least 1".into())),
            Some(n) => Ok(n),
            None => Ok(default),
        }
    }

    fn tol(&self, default: f64) -> Result<f64, CliError> {
        match self.tol {
            Some(t) if !(t > 0.0 && t.is_finite()) => Err(CliError::Usage("--tol must be a positive number".into())),
            Some(t) => Ok(t),
            None => Ok(default),
        }
    }
}

impl From<&Common> for Settings {
    fn from(c: &Common) -> Self {
        Settings {
            b: c.b,
            alpha: c.alpha,
            beta1: c.beta1,
            beta2: c.beta2,
            k1: c.k1,
            k2: c.k2,
            params: c.params.clone().map(NumList::Text),
            out: c.out.clone(),
            format: c.format,
            ..Settings::default()
        }
    }
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Domain(Error),
    Io(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Domain(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

/// Output of one command: a summary for people plus machine forms.
struct Output {
    human: String,
    table: Table,
    json: Vec<u8>,
}

fn json_bytes<T: Serialize>(doc: &Document<T>) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    write_json(&mut buf, doc)?;
    Ok(buf)
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{text}");
                    0
                }
                _ => {
                    let _ = write!(stderr, "{text}");
                    2
                }
            };
        }
    };
    match execute(cli.command, stdout) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}\n");
            let _ = write!(stderr, "{}", usage());
            2
        }
        Err(CliError::Domain(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            1
        }
        Err(CliError::Io(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            1
        }
    }
}

fn usage() -> String {
    use clap::CommandFactory;
    Cli::command().render_usage().to_string() + "\n"
}

fn load_config(path: &Option<PathBuf>) -> Result<Settings, CliError> {
    let Some(path) = path else { return Ok(Settings::default()) };
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn execute(command: Command, stdout: &mut dyn Write) -> Result<(), CliError> {
    let (common, cli_settings, kind): (&Common, Settings, &str) = match &command {
        Command::Validate(c) => (c, c.into(), "validate"),
        Command::Step { common, start } => {
            (common, Settings { start: start.clone().map(NumList::Text), ..common.into() }, "step")
        }
        Command::Simulate { common, start, max_iters, tol } => (
            common,
            Settings { start: start.clone().map(NumList::Text), max_iters: *max_iters, tol: *tol, ..common.into() },
            "simulate",
        ),
        Command::FixedPoints(c) => (c, c.into(), "fixed-points"),
        Command::Classify { common, start, tol } => {
            (common, Settings { start: start.clone().map(NumList::Text), tol: *tol, ..common.into() }, "classify")
        }
        Command::Evidence { common, scenario, trials, seed, max_iters, tol } => (
            common,
            Settings {
                scenario: scenario.clone(),
                trials: *trials,
                seed: *seed,
                max_iters: *max_iters,
                tol: *tol,
                ..common.into()
            },
            "evidence",
        ),
        Command::Sweep { common, grid, task, seed, max_iters, tol } => (
            common,
            Settings {
                grid: grid.clone(),
                task: task.clone(),
                seed: *seed,
                max_iters: *max_iters,
                tol: *tol,
                ..common.into()
            },
            "sweep",
        ),
    };
    let settings = cli_settings.or(load_config(&common.config)?);

    let output = match kind {
        "validate" => cmd_validate(&settings)?,
        "step" => cmd_step(&settings)?,
        "simulate" => cmd_simulate(&settings)?,
        "fixed-points" => cmd_fixed_points(&settings)?,
        "classify" => cmd_classify(&settings)?,
        "evidence" => cmd_evidence(&settings)?,
        _ => cmd_sweep(&settings)?,
    };
    emit(&settings, &output, stdout)
}

fn emit(settings: &Settings, output: &Output, stdout: &mut dyn Write) -> Result<(), CliError> {
    let format = settings.format.unwrap_or(Format::Human);
    let write_machine = |w: &mut dyn Write, fmt: Format| -> std::io::Result<()> {
        match fmt {
            Format::Csv => output.table.write(w),
            _ => w.write_all(&output.json),
        }
    };
    match &settings.out {
        Some(path) => {
            let mut file = std::fs::File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            write_machine(&mut file, if format == Format::Csv { Format::Csv } else { Format::Json })?;
            stdout.write_all(output.human.as_bytes())?;
        }
        None if format == Format::Human => stdout.write_all(output.human.as_bytes())?,
        None => write_machine(stdout, format)?,
    }
    Ok(())
}

fn point_cells(s: &SimplexPoint) -> Vec<String> {
    s.as_array().iter().map(|&v| fmt_f64(v)).collect()
}

fn param_cells(p: &Params) -> Vec<String> {
    p.to_array().iter().map(|&v| fmt_f64(v)).collect()
}

#[derive(Serialize, Deserialize)]
pub struct ValidateData {
    pub params: Params,
    pub report: crate::params::ValidationReport,
}

fn cmd_validate(s: &Settings) -> Result<Output, CliError> {
    let params = s.params()?;
    let report = validate_params(&params);
    let mut human = String::new();
    writeln!(human, "QSO: {}", if report.is_qso { "yes" } else { "no" }).unwrap();
    for v in &report.violations {
        writeln!(human, "  violated: {} (value {})", v.condition.describe(), v.value).unwrap();
    }
    if report.is_identity {
        writeln!(human, "identity operator: yes").unwrap();
    }
    let mut table = Table::new("validate", None, &["condition", "value", "bound", "satisfied"]);
    for c in Condition::ALL {
        let (value, bound) = c.evaluate(&params);
        table.push(vec![c.describe().into(), fmt_f64(value), fmt_f64(bound), (value <= bound).to_string()]);
    }
    let json = json_bytes(&Document::new("validate", None, ValidateData { params, report }))?;
    Ok(Output { human, table, json })
}

#[derive(Serialize, Deserialize)]
pub struct StepData {
    pub params: Params,
    pub input: SimplexPoint,
    pub output: SimplexPoint,
}

fn cmd_step(s: &Settings) -> Result<Output, CliError> {
    let params = s.params()?;
    let input = s.required_start()?;
    let output = apply(&params, &input)?;
    let human = format!("{input} -> {output}\n");
    let mut table = Table::new("step", None, &["which", "x", "u", "y", "v"]);
    table.push([vec!["input".to_string()], point_cells(&input)].concat());
    table.push([vec!["output".to_string()], point_cells(&output)].concat());
    let json = json_bytes(&Document::new("step", None, StepData { params, input, output }))?;
    Ok(Output { human, table, json })
}

fn status_code(status: &TrajectoryStatus) -> &'static str {
    match status {
        TrajectoryStatus::Converged { .. } => "converged",
        TrajectoryStatus::MaxItersReached => "max_iters",
        TrajectoryStatus::LeftSimplex { .. } => "left_simplex",
    }
}

fn cmd_simulate(s: &Settings) -> Result<Output, CliError> {
    let params = s.params()?;
    let start = s.required_start()?;
    let max_iters = s.max_iters(1_000_000)?;
    let tol = s.tol(TOL_CONV)?;
    let t = iterate_trajectory(&params, &start, max_iters, tol)?;
    let mut human = String::new();
    match t.status {
        TrajectoryStatus::Converged { limit, at_step } => {
            writeln!(human, "converged after {at_step} steps to {limit}").unwrap();
            let set = enumerate_fixed_points(&params);
            let verdict = crate::harness::detect_limit(&t, &crate::harness::candidates(&set), 1e-6);
            if let Some(m) = verdict.matched {
                writeln!(human, "limit: {} (distance {:e})", m.label, m.distance).unwrap();
            }
        }
        TrajectoryStatus::MaxItersReached => {
            writeln!(human, "no convergence within {max_iters} steps; last state {}", t.last()).unwrap()
        }
        TrajectoryStatus::LeftSimplex { at_step } => {
            writeln!(human, "left the simplex at step {at_step}; last state {}", t.last()).unwrap()
        }
    }
    let mut table = Table::new("simulate", None, &["step", "x", "u", "y", "v", "status"]);
    let n = t.iterates.len();
    for (i, (step, point)) in t.steps.iter().zip(&t.iterates).enumerate() {
        let status = if i + 1 == n { status_code(&t.status).to_string() } else { String::new() };
        table.push([vec![step.to_string()], point_cells(point), vec![status]].concat());
    }
    let json = json_bytes(&Document::new("simulate", None, &t))?;
    Ok(Output { human, table, json })
}

#[derive(Serialize, Deserialize)]
pub struct FixedPointsData {
    pub params: Params,
    pub set: crate::fixed_points::FixedPointSet,
}

fn cmd_fixed_points(s: &Settings) -> Result<Output, CliError> {
    let params = s.params()?;
    let set = enumerate_fixed_points(&params);
    let mut human = format!("case: {}\n", set.case);
    for r in &set.isolated {
        writeln!(human, "{:<5} {}  residual {:.1e}", r.label.to_string(), r.point, r.fixedness_residual).unwrap();
    }
    for f in &set.faces {
        let pinned: Vec<_> = f.pinned().iter().map(|c| format!("{}=0", c.name())).collect();
        writeln!(human, "{:<5} face {}", FixedPointLabel::Face(*f).to_string(), pinned.join(", ")).unwrap();
    }
    if let Some(root) = &set.root {
        match root.outcome {
            RootOutcome::UniquePositive { force, method } => {
                writeln!(human, "A = {force:.10} ({method:?}, residual {:.1e})", root.residual.unwrap_or(0.0)).unwrap()
            }
            RootOutcome::TwoPositive { lower, upper } => writeln!(
                human,
                "A = {lower:.10} and {upper:.10} below threshold (residual {:.1e})",
                root.residual.unwrap_or(0.0)
            )
            .unwrap(),
            RootOutcome::NoPositiveRoot { reason } => writeln!(human, "no positive force root ({reason:?})").unwrap(),
        }
    }
    let interior = |l: FixedPointLabel| {
        matches!(l, FixedPointLabel::Lambda17 | FixedPointLabel::EndemicLower | FixedPointLabel::EndemicUpper)
    };
    let mut table =
        Table::new("fixed-points", None, &["label", "kind", "x", "u", "y", "v", "fixedness_residual", "pinned", "A"]);
    for r in &set.isolated {
        table.push(
            [
                vec![r.label.code().to_string(), "point".into()],
                point_cells(&r.point),
                vec![
                    fmt_f64(r.fixedness_residual),
                    String::new(),
                    fmt_opt_f64(interior(r.label).then(|| force_of_infection(&params, &r.point))),
                ],
            ]
            .concat(),
        );
    }
    for f in &set.faces {
        let pinned = f.pinned().iter().map(|c| c.name()).collect::<Vec<_>>().join(";");
        let mut row = vec![f.code().to_string(), "face".into()];
        row.extend(std::iter::repeat_n(String::new(), 5));
        row.extend([pinned, String::new()]);
        table.push(row);
    }
    let json = json_bytes(&Document::new("fixed-points", None, FixedPointsData { params, set }))?;
    Ok(Output { human, table, json })
}

#[derive(Serialize, Deserialize)]
pub struct ClassifiedPoint {
    pub label: Option<FixedPointLabel>,
    pub point: SimplexPoint,
    pub classification: Classification,
}

fn cmd_classify(s: &Settings) -> Result<Output, CliError> {
    let params = s.params()?;
    let tol = s.tol(UNIT_CIRCLE_TOL)?;
    let targets: Vec<(Option<FixedPointLabel>, SimplexPoint)> = match s.start()? {
        Some(point) => vec![(None, point)],
        None => enumerate_fixed_points(&params).isolated.iter().map(|r| (Some(r.label), r.point)).collect(),
    };
    let mut results = Vec::new();
    for (label, point) in targets {
        let classification = classify_fixed_point(&params, &point, tol)?;
        results.push(ClassifiedPoint { label, point, classification });
    }
    let mut human = String::new();
    let mut header = vec!["label", "x", "u", "y", "v", "kind"];
    let eig_cols = ["re1", "im1", "re2", "im2", "re3", "im3", "re4", "im4"];
    header.extend(eig_cols);
    let mut table = Table::new("classify", None, &header);
    for r in &results {
        let name = r.label.map_or_else(|| "point".to_string(), |l| l.to_string());
        let moduli: Vec<String> = r.classification.spectrum.moduli.iter().map(|m| format!("{m:.6}")).collect();
        writeln!(human, "{name:<5} {}  {:?}  |mu| = [{}]", r.point, r.classification.kind, moduli.join(", ")).unwrap();
        let mut row = vec![r.label.map_or_else(String::new, |l| l.code().to_string())];
        row.extend(point_cells(&r.point));
        row.push(r.classification.kind.code().into());
        for e in &r.classification.spectrum.eigenvalues {
            row.extend([fmt_f64(e.re), fmt_f64(e.im)]);
        }
        table.push(row);
    }
    let json = json_bytes(&Document::new("classify", None, &results))?;
    Ok(Output { human, table, json })
}

fn cmd_evidence(s: &Settings) -> Result<Output, CliError> {
    let name = s.scenario.as_deref().ok_or_else(|| CliError::Usage("missing --scenario".into()))?;
    let scenario = Scenario::parse(name).ok_or_else(|| CliError::Usage(format!("unknown scenario `{name}`")))?;
    let seed = s.seed.unwrap_or(DEFAULT_SEED);
    let mut config = EvidenceConfig::new(scenario, s.trials.unwrap_or(DEFAULT_TRIALS), seed);
    if s.has_params() {
        config = config.with_params(s.params()?);
    }
    config.budgets.max_iters = s.max_iters(config.budgets.max_iters)?;
    config.budgets.tol_conv = s.tol(config.budgets.tol_conv)?;

    let records = run_trials(&config)?;
    let report = EvidenceReport::from_records(&config, &records);
    let mut human = String::new();
    writeln!(human, "scenario {} seed {seed}", scenario.code()).unwrap();
    writeln!(
        human,
        "trials {}  confirmed {}  refuted {}  inconclusive {}",
        report.trials,
        report.confirmed,
        report.refuted.len(),
        report.inconclusive
    )
    .unwrap();
    for r in report.refuted.iter().take(10) {
        writeln!(human, "  refuted: trial {} seed {} params {:?}", r.index, r.seed, r.params.to_array()).unwrap();
    }
    let table = evidence_table(seed, &records);
    let json = json_bytes(&Document::new("evidence", Some(seed), &report))?;
    Ok(Output { human, table, json })
}

pub fn evidence_table(seed: u64, records: &[TrialRecord]) -> Table {
    let header = [
        "index",
        "seed",
        "b",
        "alpha",
        "beta1",
        "beta2",
        "k1",
        "k2",
        "x0",
        "u0",
        "y0",
        "v0",
        "x",
        "u",
        "y",
        "v",
        "status",
        "steps",
        "predicted",
        "matched",
        "distance",
        "outcome",
    ];
    let mut table = Table::new("evidence", Some(seed), &header);
    for r in records {
        let mut row = vec![r.index.to_string(), r.seed.to_string()];
        row.extend(param_cells(&r.params));
        row.extend(point_cells(&r.initial));
        row.extend(point_cells(&r.final_state));
        row.push(status_code(&r.status).into());
        row.push(r.verdict.steps_used.to_string());
        row.push(r.predicted.map_or_else(String::new, |l| l.code().into()));
        row.push(r.verdict.matched.map_or_else(String::new, |m| m.label.code().into()));
        row.push(fmt_opt_f64(r.verdict.matched.map(|m| m.distance)));
        row.push(format!("{:?}", r.outcome).to_lowercase());
        table.push(row);
    }
    table
}

#[derive(Serialize, Deserialize)]
pub struct SweepData {
    pub task: SweepTask,
    pub grid: SweepGrid,
    pub rows: Vec<SweepRow>,
}

fn read_grid(path: &Path) -> Result<SweepGrid, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn cmd_sweep(s: &Settings) -> Result<Output, CliError> {
    let path = s.grid.as_ref().ok_or_else(|| CliError::Usage("missing --grid FILE".into()))?;
    let mut grid = read_grid(path)?;
    let task = match &s.task {
        Some(t) => SweepTask::parse(t).ok_or_else(|| CliError::Usage(format!("unknown task `{t}`")))?,
        None => grid.task.ok_or_else(|| CliError::Usage("missing --task (or `task` in the grid file)".into()))?,
    };
    grid.task = Some(task);
    if let (Some(seed), Some(spec)) = (s.seed, grid.initial_points.as_mut()) {
        spec.seed = seed;
    }
    if s.max_iters.is_some() {
        grid.max_iters = Some(s.max_iters(1)?);
    }
    if s.tol.is_some() {
        grid.tol_conv = Some(s.tol(TOL_CONV)?);
    }
    let seed = grid.initial_points.map(|p| p.seed);
    let rows = run_sweep(&grid, task)?;

    let errors = rows.iter().filter(|r| !r.error.is_empty()).count();
    let human = format!("{} rows over {} cells ({errors} with errors)\n", rows.len(), grid.cells()?.len());
    let header = [
        "cell",
        "sample",
        "b",
        "alpha",
        "beta1",
        "beta2",
        "k1",
        "k2",
        "labels",
        "A",
        "residual",
        "classification",
        "limit_label",
        "steps",
        "error",
    ];
    let mut table = Table::new("sweep", seed, &header);
    for r in &rows {
        let mut row = vec![r.cell.to_string(), r.sample.map_or_else(String::new, |s| s.to_string())];
        row.extend(r.params.iter().map(|&v| fmt_f64(v)));
        row.extend([
            r.labels.clone(),
            r.forces.iter().map(|&a| fmt_f64(a)).collect::<Vec<_>>().join(";"),
            fmt_opt_f64(r.residual),
            r.classification.clone(),
            r.limit_label.clone(),
            r.steps.map_or_else(String::new, |s| s.to_string()),
            r.error.clone(),
        ]);
        table.push(row);
    }
    let json = json_bytes(&Document::new("sweep", seed, SweepData { task, grid, rows }))?;
    Ok(Output { human, table, json })
}
