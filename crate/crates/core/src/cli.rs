//! Command-line interface: `peri-richards run|converge|operator-check`.
//!
//! Exit codes: 0 success, 2 config error, 3 numerical instability,
//! 4 I/O error.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::analysis::{self, StudyAxis};
use crate::config::{self, presets, AxisSpec, ConfigFile};
use crate::error::Error;
use crate::output;
use crate::stepper::{run, RunFailure, Scenario};

#[derive(Debug, Parser)]
#[command(
    name = "peri-richards",
    about = "Chebyshev-collocation solver for a nonlocal (peridynamic) formulation of Richards' equation",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a scenario and export profile CSV (and optionally SVG).
    Run(RunArgs),
    /// Measure self-convergence orders over a refinement sweep.
    Converge(ConvergeArgs),
    /// Tabulate the spectral-vs-quadrature operator gap.
    OperatorCheck(OperatorCheckArgs),
}

/// Scenario selection and overrides, shared by run and converge.
#[derive(Debug, Args)]
pub struct ScenarioArgs {
    /// Bundled scenario preset: example1 | example2.
    #[arg(long, value_name = "NAME")]
    pub preset: Option<String>,
    /// Scenario config file (TOML).
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Override the spectral degree N.
    #[arg(long = "N", value_name = "N")]
    pub degree: Option<usize>,
    /// Override the time step (s).
    #[arg(long, value_name = "DT")]
    pub dt: Option<f64>,
    /// Override the kernel horizon.
    #[arg(long, value_name = "DELTA")]
    pub delta: Option<f64>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    /// Profile CSV output path (default: profiles.csv).
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// SVG plot output path.
    #[arg(long, value_name = "PATH")]
    pub svg: Option<PathBuf>,
    /// Comma-separated snapshot times in seconds.
    #[arg(long, value_delimiter = ',', value_name = "T1,T2,...")]
    pub times: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct ConvergeArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    /// Refinement axis: time | space.
    #[arg(long, value_name = "AXIS")]
    pub axis: Option<String>,
    /// Comma-separated refinement levels (dt values, or degrees).
    #[arg(long, value_delimiter = ',', value_name = "L1,L2,...")]
    pub levels: Option<Vec<f64>>,
    /// Study table CSV path (default: converge.csv); the text report goes
    /// next to it with a .report.txt suffix.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OperatorCheckArgs {
    /// Kernel horizon.
    #[arg(long, default_value_t = 0.15, value_name = "DELTA")]
    pub delta: f64,
    /// Comma-separated spectral degrees.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "32,64,128,256",
        value_name = "N1,N2,..."
    )]
    pub levels: Vec<usize>,
    /// Gap table CSV path (default: operator_gap.csv).
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

/// CLI failure carrying the process exit code.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Instability(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Instability(_) => 3,
            Self::Io(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Config(m) => write!(f, "config error: {m}"),
            Self::Instability(m) => write!(f, "numerical instability: {m}"),
            Self::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

/// Classify a core error: range/instability failures exit 3, everything
/// else is a configuration problem.
fn numerical(e: Error) -> CliError {
    match e {
        Error::Unstable { .. } | Error::WaterContentRange { .. } => {
            CliError::Instability(e.to_string())
        }
        other => CliError::Config(other.to_string()),
    }
}

fn resolve_scenario(args: &ScenarioArgs) -> Result<(Scenario, Option<ConfigFile>), CliError> {
    let (mut scenario, config) = match (&args.preset, &args.config) {
        (Some(_), Some(_)) => {
            return Err(CliError::Config(
                "give either --preset or --config, not both".into(),
            ))
        }
        (Some(name), None) => {
            let scenario = presets::by_name(name).ok_or_else(|| {
                CliError::Config(format!(
                    "unknown preset \"{name}\" (known: {})",
                    presets::NAMES.join(", ")
                ))
            })?;
            (scenario, None)
        }
        (None, Some(path)) => {
            let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
            let cfg = config::parse_config(&text).map_err(|e| CliError::Config(e.to_string()))?;
            let scenario = cfg
                .scenario()
                .map_err(|e| CliError::Config(e.to_string()))?;
            (scenario, Some(cfg))
        }
        (None, None) => {
            return Err(CliError::Config(
                "one of --preset or --config is required".into(),
            ))
        }
    };

    // Flag overrides beat config values.
    if let Some(n) = args.degree {
        scenario.degree = n;
    }
    if let Some(dt) = args.dt {
        scenario.dt = dt;
    }
    if let Some(delta) = args.delta {
        scenario.delta = delta;
    }
    scenario
        .validate()
        .map_err(|e| CliError::Config(e.to_string()))?;
    Ok((scenario, config))
}

/// Execute a parsed command.
pub fn run_command(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Converge(args) => cmd_converge(args),
        Command::OperatorCheck(args) => cmd_operator_check(args),
    }
}

fn cmd_run(args: RunArgs) -> Result<(), CliError> {
    let (scenario, config) = resolve_scenario(&args.scenario)?;
    let output_cfg = config.as_ref().and_then(|c| c.output.clone());

    let times: Vec<f64> = args
        .times
        .or_else(|| {
            output_cfg
                .as_ref()
                .map(|o| o.times.clone())
                .filter(|t| !t.is_empty())
        })
        .unwrap_or_else(|| vec![0.0, scenario.t_final]);

    let record = run(&scenario, &times).map_err(|failure| match failure {
        RunFailure::Setup(e) => CliError::Config(e.to_string()),
        RunFailure::Aborted { partial, cause } => CliError::Instability(format!(
            "{cause} after {} of {} steps",
            partial.steps_completed, partial.total_steps
        )),
    })?;

    let csv_path = args
        .out
        .or_else(|| {
            output_cfg
                .as_ref()
                .and_then(|o| o.csv.clone().map(PathBuf::from))
        })
        .unwrap_or_else(|| PathBuf::from("profiles.csv"));
    output::write_profiles_csv(&record, &csv_path).map_err(|e| io_err(&csv_path, e))?;
    println!(
        "wrote {} ({} snapshots, {} nodes, {} steps)",
        csv_path.display(),
        record.snapshots.len(),
        record.depths.len(),
        record.steps_completed
    );

    let svg_path = args.svg.or_else(|| {
        output_cfg
            .as_ref()
            .and_then(|o| o.svg.clone().map(PathBuf::from))
    });
    if let Some(path) = svg_path {
        output::write_profiles_svg(&record, &path).map_err(|e| io_err(&path, e))?;
        println!("wrote {}", path.display());
    }

    if record.violations.is_empty() {
        println!("max-principle monitor: no violations");
    } else {
        println!(
            "max-principle monitor: bound exceeded at steps {:?}",
            record.violations
        );
    }
    if let Some(last) = record.stability_series.last() {
        println!("stability functional at T: {last:.6e}");
    }
    Ok(())
}

fn cmd_converge(args: ConvergeArgs) -> Result<(), CliError> {
    let (scenario, config) = resolve_scenario(&args.scenario)?;
    let study_cfg = config.as_ref().and_then(|c| c.study.clone());

    let axis = match (&args.axis, &study_cfg) {
        (Some(a), _) => match a.as_str() {
            "time" => StudyAxis::Time,
            "space" => StudyAxis::Space,
            other => {
                return Err(CliError::Config(format!(
                    "axis must be \"time\" or \"space\", got \"{other}\""
                )))
            }
        },
        (None, Some(s)) => match s.axis {
            AxisSpec::Time => StudyAxis::Time,
            AxisSpec::Space => StudyAxis::Space,
        },
        (None, None) => {
            return Err(CliError::Config(
                "--axis is required (or a [study] section in the config)".into(),
            ))
        }
    };
    let levels: Vec<f64> = match (&args.levels, &study_cfg) {
        (Some(l), _) => l.clone(),
        (None, Some(s)) => s.levels.clone(),
        (None, None) => {
            return Err(CliError::Config(
                "--levels is required (or a [study] section in the config)".into(),
            ))
        }
    };

    let study = match axis {
        StudyAxis::Time => analysis::temporal_order(&scenario, &levels).map_err(numerical)?,
        StudyAxis::Space => {
            let degrees: Vec<usize> = levels
                .iter()
                .map(|&l| {
                    if l.fract() == 0.0 && l >= 2.0 {
                        Ok(l as usize)
                    } else {
                        Err(CliError::Config(format!(
                            "space levels must be integer degrees >= 2, got {l}"
                        )))
                    }
                })
                .collect::<Result<_, _>>()?;
            analysis::spatial_order(&scenario, &degrees).map_err(numerical)?
        }
    };

    let out_path = args.out.unwrap_or_else(|| PathBuf::from("converge.csv"));
    fs::write(&out_path, output::study_csv(&study)).map_err(|e| io_err(&out_path, e))?;
    let report = output::study_report(&study, &format!("{axis} refinement"));
    let report_path = out_path.with_extension("report.txt");
    fs::write(&report_path, &report).map_err(|e| io_err(&report_path, e))?;
    print!("{report}");
    println!("wrote {} and {}", out_path.display(), report_path.display());
    Ok(())
}

fn cmd_operator_check(args: OperatorCheckArgs) -> Result<(), CliError> {
    let table =
        analysis::operator_gap_study(args.delta, &[analysis::default_gap_pair()], &args.levels)
            .map_err(numerical)?;
    let out_path = args
        .out
        .unwrap_or_else(|| PathBuf::from("operator_gap.csv"));
    fs::write(&out_path, output::gap_csv(&table)).map_err(|e| io_err(&out_path, e))?;
    print!("{}", output::gap_report(&table));
    println!("wrote {}", out_path.display());
    Ok(())
}
