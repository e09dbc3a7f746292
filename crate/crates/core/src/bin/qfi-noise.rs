use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qfi_noise::channels::ChannelMode;
use qfi_noise::commands::{run, Command, Format, RunConfig};
use qfi_noise::hamiltonians::{BasisKind, EnsembleKind, Restriction};
use qfi_noise::Error;

/// Mean quantum Fisher information and fidelity under random local Hamiltonian noise.
#[derive(Parser)]
#[command(name = "qfi-noise", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Mean QFI for every stored table row, checked against the exact values.
    Table1(Flags),
    /// Fidelity curves with the averaged bound.
    Curve(Flags),
    /// Five-qubit GHZ populations under collective noise, plus the Haar twirl.
    Ghz5(Flags),
    /// Property and invariant checks with a JSON verdict per group.
    Validate(Flags),
    /// JSON dump of sampled Hamiltonians.
    SampleHam(Flags),
}

#[derive(Args)]
struct Flags {
    /// State id (ghz-N-D, dicke-N-E, q4-K, ame-6-2, ame-4-3, haar-N-D-SEED); repeatable.
    #[arg(long = "state")]
    states: Vec<String>,
    #[arg(long, value_parser = parse::<BasisKind>)]
    basis: Option<BasisKind>,
    #[arg(long, value_parser = parse::<EnsembleKind>)]
    ensemble: Option<EnsembleKind>,
    /// traceless, full or real-symmetric
    #[arg(long, value_parser = parse::<Restriction>)]
    restriction: Option<Restriction>,
    #[arg(long, value_parser = parse::<ChannelMode>)]
    mode: Option<ChannelMode>,
    #[arg(long)]
    t_start: Option<f64>,
    #[arg(long)]
    t_stop: Option<f64>,
    #[arg(long)]
    t_points: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Number of sites for sample-ham embeddings.
    #[arg(long)]
    sites: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_parser = parse::<Format>)]
    format: Option<Format>,
    /// JSON config file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
}

fn parse<T: std::str::FromStr<Err = Error>>(s: &str) -> Result<T, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn to_config(command: Command, f: Flags) -> Result<RunConfig, Error> {
    let file = match &f.config {
        Some(path) => RunConfig::load(path).map_err(|e| match e {
            Error::Io(io) => Error::Config(format!("{}: {io}", path.display())),
            other => other,
        })?,
        None => RunConfig::default(),
    };
    let flags = RunConfig {
        command: Some(command),
        states: f.states,
        basis: f.basis,
        ensemble: f.ensemble,
        restriction: f.restriction,
        mode: f.mode,
        t_start: f.t_start,
        t_stop: f.t_stop,
        t_points: f.t_points,
        samples: f.samples,
        seed: f.seed,
        sites: f.sites,
        out: f.out,
        format: f.format,
    };
    Ok(file.merged_with(flags))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let (command, flags) = match cli.command {
        Sub::Table1(f) => (Command::Table1, f),
        Sub::Curve(f) => (Command::Curve, f),
        Sub::Ghz5(f) => (Command::Ghz5, f),
        Sub::Validate(f) => (Command::Validate, f),
        Sub::SampleHam(f) => (Command::SampleHam, f),
    };
    let result = to_config(command, flags).and_then(|config| {
        // A config file may name a different command; the subcommand wins.
        let config = RunConfig {
            command: Some(command),
            ..config
        };
        let report = run(&config)?;
        report.emit(config.out.as_deref())?;
        Ok(report.passed)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("qfi-noise: numeric check failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("qfi-noise: {e}");
            match e {
                Error::Argument(_) | Error::Config(_) | Error::Unsupported(_) | Error::Json(_) | Error::Io(_) => {
                    ExitCode::from(2)
                }
                _ => ExitCode::from(1),
            }
        }
    }
}
