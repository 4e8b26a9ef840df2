//! Command-line front end.
//!
//! Exit codes: 0 success, 1 input error, 2 degenerate area, 3 internal
//! numeric failure.

use std::fs::{self, File};
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::generate::{self, GenParams, Topology};
use crate::model::{load_area_spec, load_case, AreaSpec, Network};
use crate::outage::ScanOptions;
use crate::report::{self, Metadata, ScanReport};

#[derive(Debug, Parser)]
#[command(
    name = "area-angle",
    version,
    about = "Area angle monitoring and outage scans for DC networks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Switch {
    On,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenTopology {
    Ladder,
    Mesh,
    Random,
}

impl From<GenTopology> for Topology {
    fn from(t: GenTopology) -> Self {
        match t {
            GenTopology::Ladder => Topology::Ladder,
            GenTopology::Mesh => Topology::Mesh,
            GenTopology::Random => Topology::Random,
        }
    }
}

#[derive(Debug, clap::Args)]
pub struct Inputs {
    #[arg(long)]
    pub case: PathBuf,
    #[arg(long)]
    pub area: PathBuf,
    #[arg(long, value_enum, default_value = "table")]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Base-case weights, area susceptance, angle and power.
    Baseline {
        #[command(flatten)]
        inputs: Inputs,
    },
    /// Scan every single line outage inside the area.
    Scan {
        #[command(flatten)]
        inputs: Inputs,
        /// Worker threads; defaults to all cores.
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long, value_enum, default_value = "off")]
        fast_path: Switch,
    },
    /// Write a seeded synthetic case and area.
    Gen {
        #[arg(long, default_value_t = 30)]
        buses: usize,
        #[arg(long, default_value_t = 3)]
        paths: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum, default_value = "mesh")]
        topology: GenTopology,
        /// Target line count.
        #[arg(long)]
        lines: Option<usize>,
        /// Bypass susceptance as a fraction of the area susceptance.
        #[arg(long)]
        bypass: Option<f64>,
        /// Case file path; stdout if absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Area file path; required with --out.
        #[arg(long)]
        area_out: Option<PathBuf>,
    },
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Parse(_)
        | Error::Io(_)
        | Error::InvalidNetwork(_)
        | Error::InvalidArea(_)
        | Error::UnknownBus(_)
        | Error::UnknownLine(_)
        | Error::LineOutOfService(_)
        | Error::NotAreaLine(_)
        | Error::Generator(_) => 1,
        Error::DegenerateArea(_) | Error::UndefinedDirection(_) => 2,
        Error::Singular(_)
        | Error::Islanding(_)
        | Error::DimensionMismatch { .. }
        | Error::EmptyResults => 3,
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })
}

pub fn load_inputs(case: &Path, area: &Path) -> Result<(Network, AreaSpec)> {
    let net = load_case(open(case)?)?;
    let spec = load_area_spec(open(area)?, &net)?;
    Ok((net, spec))
}

pub fn cmd_baseline(case: &Path, area: &Path) -> Result<ScanReport> {
    let (net, spec) = load_inputs(case, area)?;
    report::baseline_report(
        &net,
        &spec,
        Metadata::new(case.display().to_string(), area.display().to_string()),
    )
}

pub fn cmd_scan(case: &Path, area: &Path, options: &ScanOptions) -> Result<ScanReport> {
    let start = Instant::now();
    let (net, spec) = load_inputs(case, area)?;
    let mut report = report::scan_report(
        &net,
        &spec,
        options,
        Metadata::new(case.display().to_string(), area.display().to_string()),
    )?;
    report.metadata.wall_time_s = Some(start.elapsed().as_secs_f64());
    Ok(report)
}

pub fn render(report: &ScanReport, format: Format) -> String {
    match format {
        Format::Table => report.to_table(),
        Format::Csv => report.to_csv(),
        Format::Json => report.to_json(),
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

/// Runs a parsed command, writing output; returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Baseline { inputs } => {
            let report = cmd_baseline(&inputs.case, &inputs.area)?;
            emit(&render(&report, inputs.format), inputs.out.as_deref())
        }
        Command::Scan {
            inputs,
            jobs,
            fast_path,
        } => {
            if jobs == Some(0) {
                return Err(Error::InvalidNetwork("--jobs must be at least 1".into()));
            }
            let options = ScanOptions {
                fast_path: fast_path == Switch::On,
                jobs,
            };
            let report = cmd_scan(&inputs.case, &inputs.area, &options)?;
            emit(&render(&report, inputs.format), inputs.out.as_deref())
        }
        Command::Gen {
            buses,
            paths,
            seed,
            topology,
            lines,
            bypass,
            out,
            area_out,
        } => {
            let mut params = GenParams::new(buses, paths, seed, topology.into());
            params.lines = lines;
            params.bypass = bypass;
            let case = generate::generate(&params)?;
            match (out, area_out) {
                (Some(case_path), Some(area_path)) => {
                    fs::write(case_path, case.network.to_json())?;
                    fs::write(area_path, case.area.to_json())?;
                    Ok(())
                }
                (None, None) => {
                    println!("{}", case.network.to_json());
                    println!("{}", case.area.to_json());
                    Ok(())
                }
                _ => Err(Error::Generator(
                    "--out and --area-out must be given together".into(),
                )),
            }
        }
    }
}
