use std::path::{Path, PathBuf};
use std::process::ExitCode;

use atomcount::propagation::PropagationMode;
use atomcount::scenario::{figure, run, verify, RunError, Scenario};
use clap::{Parser, Subcommand};

/// Atom-counting statistics for bosons released from an optical lattice.
#[derive(Parser)]
#[command(name = "atomcount", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output directory (default: $ATOMCOUNT_OUT, then ./out). Each
    /// scenario writes into a subdirectory named after it.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Override the propagation mode of the scenario.
    #[arg(long, global = true, value_parser = parse_mode)]
    mode: Option<PropagationMode>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file.
    Run { config: PathBuf },
    /// Run a built-in figure preset.
    Fig {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=7))]
        number: u8,
    },
    /// Check a small scenario (at most 8 sites) against the Fock-space oracle.
    Verify { config: PathBuf },
}

fn parse_mode(s: &str) -> Result<PropagationMode, String> {
    s.parse().map_err(|e: atomcount::Error| e.to_string())
}

fn load(path: &Path, mode: Option<PropagationMode>) -> Result<Scenario, RunError> {
    let mut scenario = Scenario::from_file(path)?;
    if let Some(mode) = mode {
        scenario.mode = mode;
    }
    Ok(scenario)
}

fn execute(cli: Cli) -> Result<(), RunError> {
    let out_root = cli
        .out_dir
        .or_else(|| std::env::var_os("ATOMCOUNT_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    let scenario = match &cli.command {
        Command::Run { config } | Command::Verify { config } => load(config, cli.mode)?,
        Command::Fig { number } => {
            let mut s = figure(*number as usize)?;
            s.mode = cli.mode.unwrap_or(s.mode);
            s
        }
    };
    if let Command::Verify { .. } = cli.command {
        let report = verify(&scenario)?;
        for c in &report.checks {
            let at = c.axis_value.map(|v| format!(" at {v}")).unwrap_or_default();
            println!("{} {}{at}: max |Δ| = {:.3e}", c.label, c.quantity, c.max_abs_error);
        }
        println!("verified {}: max |Δ| = {:.3e}", report.name, report.max_abs_error());
        return Ok(());
    }
    let dir = out_root.join(&scenario.name);
    let result = run(&scenario, &dir);
    if let Err(RunError::Invariant { .. }) = &result {
        eprintln!("correlation matrices dumped to {}", dir.display());
    }
    let (report, files) = result?;
    for point in &report.points {
        let at = point.axis_value.map(|v| format!("{} = {v}: ", report.axis.unwrap().label())).unwrap_or_default();
        let states: Vec<String> = point
            .states
            .iter()
            .map(|s| format!("{} mean {:.6} var {:.6}", s.label, s.distribution.mean, s.distribution.variance))
            .collect();
        if !states.is_empty() {
            println!("{at}{}", states.join(", "));
        }
    }
    println!("wrote {} files to {}", files.paths.len(), dir.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
