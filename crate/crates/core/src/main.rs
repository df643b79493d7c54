use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use antires::scenario::{run, Command, ScenarioConfig};
use antires::{Error, Result};

#[derive(Parser)]
#[command(name = "antires", version, about = "Resonance and antiresonance spectroscopy of coupled-mode networks")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Spectrum of the configured network with its poles and zeros.
    Spectrum(Args),
    /// Phase surface over probe and emitter detuning.
    Scan2d(Args),
    /// Phase at fixed probe while the emitter is Stark-tuned, with arctangent fit.
    StarkScan(Args),
    /// Drive every node in turn and identify the lossiest component.
    Characterize(Args),
    /// Compare the quantum steady state with the linear model.
    OracleCheck(Args),
    /// Simulated heterodyne phase histograms.
    HeterodyneDemo(Args),
}

#[derive(clap::Args)]
struct Args {
    /// Scenario file (JSON).
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Output directory; overrides `output_dir` in the scenario.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Seed for the motion ensemble and detector noise; overrides the scenario.
    #[arg(long)]
    seed: Option<u64>,
}

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var("ANTIRES_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| Error::Config(format!("ANTIRES_THREADS must be a positive integer, got `{value}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::Config(e.to_string()))
}

fn execute(command: Command, args: Args) -> Result<()> {
    configure_threads()?;
    let mut config = ScenarioConfig::load(&args.config)?;
    if args.seed.is_some() {
        config.seed = args.seed;
    }
    let out = match (args.out, &config.output_dir) {
        (Some(dir), _) => dir,
        (None, Some(dir)) => config.resolve(dir),
        (None, None) => PathBuf::from("antires-out"),
    };
    let report = run(command, &config, &out)?;
    print!("{}", report.summary);
    for file in &report.files {
        println!("wrote {}", file.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Cmd::Spectrum(a) => (Command::Spectrum, a),
        Cmd::Scan2d(a) => (Command::Scan2d, a),
        Cmd::StarkScan(a) => (Command::StarkScan, a),
        Cmd::Characterize(a) => (Command::Characterize, a),
        Cmd::OracleCheck(a) => (Command::OracleCheck, a),
        Cmd::HeterodyneDemo(a) => (Command::HeterodyneDemo, a),
    };
    match execute(command, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
