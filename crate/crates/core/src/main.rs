use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use collision_nm::experiment::{
    self, fmt_num, ConfigError, Format, Mode, Overrides, SweepConfig, ORACLE_TOL,
};

#[derive(Parser)]
#[command(name = "collision-nm", version, about = "Correlated collision model: non-Markovianity sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify Λ21 over a grid of collision strengths.
    Sweep(CommonArgs),
    /// Full report for one collision strength.
    Single(CommonArgs),
    /// Sweep with simulated tomography and Monte Carlo error bars.
    Tomo(CommonArgs),
    /// Compare the pipeline with the closed forms on a fixed grid.
    Selftest(SelftestArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// key=value file; command-line flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    epsilon: Option<f64>,
    /// start:stop:step or a comma-separated list.
    #[arg(long, value_name = "GRID")]
    epsilon_grid: Option<String>,
    #[arg(long, value_name = "F", allow_negative_numbers = true)]
    fidelity: Option<f64>,
    /// Werner visibility of the initial state.
    #[arg(long, value_name = "V", allow_negative_numbers = true)]
    visibility: Option<f64>,
    /// Detections per measurement setting.
    #[arg(long, value_name = "N")]
    counts: Option<u64>,
    #[arg(long, value_name = "R")]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_parser = ["analytic", "tomographic"])]
    mode: Option<String>,
    #[arg(long, value_parser = ["csv", "json"])]
    format: Option<String>,
    /// Output file (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SelftestArgs {
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Config(ConfigError),
    Oracle(String),
    Runtime(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

impl From<collision_nm::Error> for Failure {
    fn from(e: collision_nm::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

fn resolve(args: &CommonArgs, forced_mode: Option<Mode>) -> Result<SweepConfig, ConfigError> {
    let mut cfg = SweepConfig::default();
    if let Some(path) = &args.config {
        Overrides::from_file(path)?.apply(&mut cfg)?;
    }
    let cli = Overrides {
        epsilon: args.epsilon,
        epsilon_grid: args.epsilon_grid.clone(),
        fidelity: args.fidelity,
        visibility: args.visibility,
        counts: args.counts,
        repetitions: args.reps,
        seed: args.seed,
        mode: args.mode.as_deref().map(str::parse).transpose()?,
        format: args.format.as_deref().map(str::parse).transpose()?,
    };
    cli.apply(&mut cfg)?;
    if let Some(mode) = forced_mode {
        cfg.mode = mode;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn open_out(path: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn sweep(args: &CommonArgs, forced_mode: Option<Mode>) -> Result<(), Failure> {
    let cfg = resolve(args, forced_mode)?;
    let rows = experiment::run_sweep(&cfg)?;
    let mut out = open_out(&args.out)?;
    match cfg.format {
        Format::Csv => experiment::write_csv(&mut out, &cfg, &rows)?,
        Format::Json => experiment::write_json(&mut out, &cfg, &rows)?,
    }
    out.flush()?;
    Ok(())
}

fn single(args: &CommonArgs) -> Result<(), Failure> {
    let mut cfg = resolve(args, None)?;
    if cfg.epsilon_grid.len() != 1 {
        return Err(ConfigError::field("epsilon", "single needs exactly one value").into());
    }
    if args.format.is_none() {
        cfg.format = Format::Json;
    }
    let report = experiment::run_single(&cfg)?;
    let mut out = open_out(&args.out)?;
    match cfg.format {
        Format::Json => experiment::write_json_value(&mut out, &report)?,
        Format::Csv => {
            let c = &report.classification;
            writeln!(out, "# {}", cfg.header_line())?;
            writeln!(out, "epsilon,lambda_min,block_positive,verdict,C1,C2,C_diff")?;
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                fmt_num(report.epsilon),
                fmt_num(c.lambda_min),
                c.block_positive,
                c.verdict,
                fmt_num(report.concurrence[1]),
                fmt_num(report.concurrence[2]),
                fmt_num(report.concurrence[2] - report.concurrence[1]),
            )?;
        }
    }
    out.flush()?;
    if let Some(check) = &report.oracle {
        if !check.passed() {
            return Err(Failure::Oracle(format!(
                "closed-form residual {} exceeds {}",
                fmt_num(check.max_residual()),
                fmt_num(ORACLE_TOL)
            )));
        }
    }
    Ok(())
}

fn selftest(args: &SelftestArgs) -> Result<(), Failure> {
    let checks = experiment::run_selftest()?;
    let mut out = open_out(&args.out)?;
    writeln!(out, "epsilon,fidelity,max_residual,status")?;
    let mut failed = 0;
    for c in &checks {
        let status = if c.passed() { "ok" } else { "MISMATCH" };
        failed += usize::from(!c.passed());
        writeln!(
            out,
            "{},{},{},{}",
            fmt_num(c.epsilon),
            fmt_num(c.fidelity),
            fmt_num(c.max_residual()),
            status
        )?;
    }
    out.flush()?;
    if failed > 0 {
        return Err(Failure::Oracle(format!(
            "{failed} of {} points exceed {}",
            checks.len(),
            fmt_num(ORACLE_TOL)
        )));
    }
    Ok(())
}

fn run(cli: &Cli) -> u8 {
    let result = match &cli.command {
        Command::Sweep(a) => sweep(a, None),
        Command::Tomo(a) => sweep(a, Some(Mode::Tomographic)),
        Command::Single(a) => single(a),
        Command::Selftest(a) => selftest(a),
    };
    match result {
        Ok(()) => 0,
        Err(Failure::Config(e)) => {
            eprintln!("error: {e}");
            2
        }
        Err(Failure::Oracle(msg)) => {
            eprintln!("oracle mismatch: {msg}");
            3
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            1
        }
    }
}

fn main() -> ExitCode {
    ExitCode::from(run(&Cli::parse()))
}
