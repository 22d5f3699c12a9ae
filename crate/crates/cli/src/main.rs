use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use elr::{run, CliError, Command, RunConfig, Status};

#[derive(Debug, Parser)]
#[command(name = "elr", version, about = "Bounds for 3-convex functions, f-divergences and Stolarsky-type means")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Inline JSON or a path to a JSON file (or a two-column p,q CSV file).
    #[arg(long, global = true)]
    input: Option<String>,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Seed for `verify`.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Number of fuzz instances for `verify`.
    #[arg(long, global = true, default_value_t = 1000)]
    instances: usize,

    /// Tolerance override, `name=value`; repeatable. Known: bracket.
    #[arg(long, global = true, value_parser = parse_tolerance)]
    tolerance: Vec<(String, f64)>,

    /// Function to use when the input names none, e.g. `kl` or `renyi:2`.
    #[arg(long, global = true)]
    phi: Option<String>,

    /// Theorem to use when the input names none.
    #[arg(long, global = true)]
    theorem: Option<String>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Cmd {
    /// ELR and Jensen-gap bounds for a discrete functional.
    Bounds,
    /// Divergence bounds for two probability vectors.
    Divergence,
    /// Divergence bounds between two Zipf-Mandelbrot laws.
    Zipf,
    /// Mean-value points and the two Stolarsky-type means.
    Means,
    /// Randomized bracketing check.
    Verify,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
}

fn parse_tolerance(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or("expected name=value")?;
    let v: f64 = v.trim().parse().map_err(|e| format!("{v:?}: {e}"))?;
    Ok((k.trim().to_string(), v))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let command = match cli.command {
        Cmd::Bounds => Command::Bounds,
        Cmd::Divergence => Command::Divergence,
        Cmd::Zipf => Command::Zipf,
        Cmd::Means => Command::Means,
        Cmd::Verify => Command::Verify,
    };
    let Format::Json = cli.format;
    let config = RunConfig {
        command,
        input: cli.input,
        seed: cli.seed,
        instances: cli.instances,
        tolerances: cli.tolerance.into_iter().collect::<BTreeMap<_, _>>(),
        phi: cli.phi,
        theorem: cli.theorem,
    };
    let report = match run(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let text = report.to_json();
    let written = match &cli.output {
        Some(path) => std::fs::write(path, &text).map_err(CliError::from),
        None => {
            print!("{text}");
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    match report.status {
        Status::Ok => ExitCode::SUCCESS,
        Status::Falsified => ExitCode::from(2),
    }
}
