use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qstate_core::oracles::{run_all, CheckConfig};
use qstate_core::tolerance::EPS_CMP;
use qstate_core::{
    relative_state_direct, relative_state_via_pair, run_mach_zehnder, run_one_slit, Device, Error,
    MachZehnderModel, OneSlitModel, StateRef, SubjectEntity,
};

mod input;
mod render;

use input::LoadedState;
use render::RelativeReport;

#[derive(Parser)]
#[command(
    name = "qstate",
    version,
    about = "Collapse versus relative-state calculations"
)]
struct Cli {
    /// Base seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Comparison tolerance (max absolute element deviation).
    #[arg(long, global = true, env = "QSTATE_TOLERANCE", value_parser = positive)]
    tolerance: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Machine,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    WhichWay,
    Interference,
}

impl From<Mode> for Device {
    fn from(mode: Mode) -> Self {
        match mode {
            Mode::WhichWay => Device::WhichWay,
            Mode::Interference => Device::Interference,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the five randomized equivalence checks.
    Check {
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
    },
    /// Quanton passing a slit in a screen.
    OneSlit {
        /// Number of transverse cells (uniform amplitudes unless --input is given).
        #[arg(long)]
        cells: Option<usize>,
        /// Comma-separated 0-based cells forming the slit.
        #[arg(long, value_delimiter = ',', required = true)]
        slit: Vec<usize>,
        /// State file with `amp` records on a single subsystem.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Photon in a Mach-Zehnder interferometer.
    MachZehnder {
        /// First beam-splitter angle in degrees, 0 to 180.
        #[arg(long, allow_negative_numbers = true)]
        theta: f64,
        #[arg(long, value_enum)]
        mode: Mode,
        /// Reconfigure the device after the photon is prepared.
        #[arg(long, value_enum)]
        delayed_to: Option<Mode>,
    },
    /// Relative state of one subsystem given an event on another.
    RelativeState {
        /// Composite state file (`amp` or `rho` records).
        #[arg(long)]
        input: PathBuf,
        /// `<subsystem>:<projector-file>`, subsystem 1-based.
        #[arg(long)]
        subject: String,
        /// Object subsystem, 1-based.
        #[arg(long)]
        object: usize,
    },
}

fn positive(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(format!("tolerance must be positive and finite, got {s}"))
    }
}

pub enum Failure {
    /// Bad flags or unreadable input: exit 2.
    Usage(String),
    /// A well-formed request with no valid answer: exit 1.
    Domain(String),
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        match error {
            Error::ZeroProbabilityEvent { .. }
            | Error::DegenerateSlit(_)
            | Error::DegenerateTrace { .. }
            | Error::NotAPartition(_) => Failure::Domain(error.to_string()),
            _ => Failure::Usage(error.to_string()),
        }
    }
}

/// A rendered report and whether it counts as success.
struct Outcome {
    report: String,
    success: bool,
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let tolerance = cli.tolerance.unwrap_or(EPS_CMP);
    let machine = matches!(cli.format, Format::Machine);
    match &cli.command {
        Command::Check { trials } => {
            let trials = usize::try_from(*trials)
                .map_err(|_| Failure::Usage(format!("too many trials: {trials}")))?;
            let config = CheckConfig::new(trials, cli.seed).with_tolerance(tolerance);
            let reports = run_all(&config)?;
            let success = reports.iter().all(|r| r.pass);
            let report = if machine {
                render::check_machine(&reports)
            } else {
                render::check_text(&reports)
            };
            Ok(Outcome { report, success })
        }
        Command::OneSlit { cells, slit, input } => {
            let model = match (input, cells) {
                (Some(path), _) => {
                    let amplitudes = input::load_amplitudes(path)?;
                    if let Some(n) = cells.filter(|&n| n != amplitudes.len()) {
                        return Err(Failure::Usage(format!(
                            "--cells {n} disagrees with {} amplitudes in {}",
                            amplitudes.len(),
                            path.display()
                        )));
                    }
                    OneSlitModel::new(amplitudes, slit.iter().copied())?
                }
                (None, Some(n)) => OneSlitModel::uniform(*n, slit.iter().copied())?,
                (None, None) => {
                    return Err(Failure::Usage(
                        "one of --cells or --input is required".into(),
                    ))
                }
            };
            let report = run_one_slit(&model)?.with_tolerance(tolerance);
            Ok(scenario_outcome(&report, machine))
        }
        Command::MachZehnder {
            theta,
            mode,
            delayed_to,
        } => {
            let mut model = MachZehnderModel::new(*theta, (*mode).into())?;
            if let Some(late) = delayed_to {
                model = model.with_delayed_choice((*late).into());
            }
            let report = run_mach_zehnder(&model)?.with_tolerance(tolerance);
            Ok(scenario_outcome(&report, machine))
        }
        Command::RelativeState {
            input,
            subject,
            object,
        } => {
            let state = input::load_state(input)?;
            let n = state.structure().len();
            let (subject_index, projector_path) = subject.split_once(':').ok_or_else(|| {
                Failure::Usage(format!(
                    "--subject expects <subsystem>:<projector-file>, got '{subject}'"
                ))
            })?;
            let subject_index = one_based(subject_index.parse().ok(), n, "--subject")?;
            let object = one_based(Some(*object), n, "--object")?;
            let event = input::load_projector(projector_path.as_ref(), subject_index)?;
            let subject = SubjectEntity::new(event);
            let state_ref = match &state {
                LoadedState::Pure(psi) => StateRef::from(psi),
                LoadedState::Mixed(rho) => StateRef::from(rho),
            };
            let probability = qstate_core::event_probability(state_ref, subject.event())?;
            let direct = relative_state_direct(state_ref, &subject, object)?;
            let via_pair = relative_state_via_pair(state_ref, &subject, object)?;
            let max_deviation =
                qstate_core::tensor::max_abs_deviation(direct.matrix(), via_pair.matrix());
            let report = RelativeReport {
                subject: subject_index,
                object,
                probability,
                direct,
                via_pair,
                max_deviation,
            };
            Ok(Outcome {
                report: if machine {
                    render::relative_machine(&report)
                } else {
                    render::relative_text(&report)
                },
                success: max_deviation <= tolerance,
            })
        }
    }
}

/// Converts a 1-based subsystem flag to a 0-based index below `n`.
fn one_based(value: Option<usize>, n: usize, flag: &str) -> Result<usize, Failure> {
    match value {
        Some(k) if (1..=n).contains(&k) => Ok(k - 1),
        _ => Err(Failure::Usage(format!(
            "{flag} must name a subsystem between 1 and {n}"
        ))),
    }
}

fn scenario_outcome(report: &qstate_core::ScenarioReport, machine: bool) -> Outcome {
    Outcome {
        report: if machine {
            render::scenario_machine(report)
        } else {
            render::scenario_text(report)
        },
        success: report.equivalence_verdict,
    }
}

fn emit(cli: &Cli, report: &str) -> Result<(), Failure> {
    match &cli.output {
        Some(path) => fs::write(path, report)
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(report.as_bytes())
            .map_err(|e| Failure::Domain(format!("cannot write to stdout: {e}"))),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|outcome| {
        emit(&cli, &outcome.report)?;
        Ok(outcome.success)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Domain(message)) => {
            eprintln!("qstate: error: {message}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(message)) => {
            eprintln!("qstate: error: {message}");
            ExitCode::from(2)
        }
    }
}
