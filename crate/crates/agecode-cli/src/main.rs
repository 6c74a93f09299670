//! `agecode` command line: design prefix codes for timely streaming, run
//! one-off pipeline simulations, and emit the experiment sweeps as CSV.
//!
//! Exit codes: 0 on success, 1 on input errors (bad flags, unreadable or
//! malformed files), 2 when no stable code exists at the requested operating
//! point.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use agecode::experiments::{
    self, design_report, fig3_rows, fig5a_rows, fig5b_rows, Fig3Config, Fig5aConfig, Fig5bConfig,
    TimingKind,
};
use agecode::{run_age_sim, ChannelConfig, CodeLengths, Error, SourceDistribution};

#[derive(Parser)]
#[command(
    name = "agecode",
    about = "Age-optimal prefix codes for streaming sources: design, bounds, simulation, and experiment sweeps",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Design codebooks (Huffman, min second moment, age-optimal, type) for
    /// one source at one (B, R) and report moments, stability, and bounds.
    Design(DesignArgs),
    /// Simulate one codebook through the FIFO pipeline and print a CSV row.
    Simulate(SimulateArgs),
    /// Sweep the fixed two-length code over the source skew at B=2, R=3/2;
    /// emits simulated ages and both analytic age bounds per point.
    Fig3(Fig3Args),
    /// Sweep age-optimal codes over a rate grid for several blocklengths.
    Fig5a(Fig5aArgs),
    /// Compare age-optimal, Huffman, and type codes over a rate grid.
    Fig5b(Fig5bArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum TimingArg {
    Fluid,
    Bitslot,
}

impl From<TimingArg> for TimingKind {
    fn from(t: TimingArg) -> Self {
        match t {
            TimingArg::Fluid => TimingKind::Fluid,
            TimingArg::Bitslot => TimingKind::BitSlot,
        }
    }
}

#[derive(Args)]
struct DesignArgs {
    /// Source distribution JSON: {"probs": [...]}
    #[arg(long)]
    dist: PathBuf,
    /// Blocklength B (symbols per block)
    #[arg(long, short = 'b', default_value_t = 1)]
    blocklength: u32,
    /// Channel rate R in bits per symbol-time
    #[arg(long, short = 'r')]
    rate: f64,
    /// Maximum codeword length (default: one less than the number of
    /// positive-probability blocks)
    #[arg(long)]
    lmax: Option<u32>,
    /// Also write the scheme table as CSV
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Codebook JSON: {"blocklength": B, "lengths": [...], "block_order": "lexicographic"}
    #[arg(long)]
    code: PathBuf,
    /// Source distribution JSON
    #[arg(long)]
    dist: PathBuf,
    /// Channel rate R in bits per symbol-time
    #[arg(long, short = 'r')]
    rate: f64,
    #[arg(long, value_enum, default_value = "fluid")]
    timing: TimingArg,
    #[arg(long, default_value_t = 100_000)]
    blocks: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output CSV path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Fig3Args {
    /// Grid start for the dominant-symbol probability a
    #[arg(long, default_value_t = 0.60)]
    a_min: f64,
    /// Grid end (inclusive)
    #[arg(long, default_value_t = 0.98)]
    a_max: f64,
    #[arg(long, default_value_t = 0.02)]
    a_step: f64,
    #[arg(long, default_value_t = 100_000)]
    blocks: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Fig5aArgs {
    /// Source distribution JSON (default: probs 0.6, 0.3, 0.1)
    #[arg(long)]
    dist: Option<PathBuf>,
    #[arg(long, default_value_t = 1.35)]
    r_min: f64,
    #[arg(long, default_value_t = 3.0)]
    r_max: f64,
    #[arg(long, default_value_t = 0.05)]
    r_step: f64,
    /// Comma-separated blocklengths to sweep
    #[arg(long, default_value = "1,2,3,4", value_delimiter = ',')]
    blocklengths: Vec<u32>,
    #[arg(long, value_enum, default_value = "fluid")]
    timing: TimingArg,
    #[arg(long, default_value_t = 100_000)]
    blocks: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Fig5bArgs {
    /// Source distribution JSON (default: probs 0.6, 0.3, 0.1)
    #[arg(long)]
    dist: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    blocklength: u32,
    #[arg(long, default_value_t = 1.35)]
    r_min: f64,
    #[arg(long, default_value_t = 3.0)]
    r_max: f64,
    #[arg(long, default_value_t = 0.05)]
    r_step: f64,
    #[arg(long, value_enum, default_value = "fluid")]
    timing: TimingArg,
    #[arg(long, default_value_t = 100_000)]
    blocks: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

const EXIT_INPUT: u8 = 1;
const EXIT_INFEASIBLE: u8 = 2;

enum CliError {
    Input(String),
    Infeasible(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::NoStableCode { .. } => CliError::Infeasible(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are not errors.
            if e.use_stderr() {
                let _ = e.print();
                return ExitCode::from(EXIT_INPUT);
            }
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    let result = match cli.command {
        Command::Design(args) => cmd_design(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Fig3(args) => cmd_fig3(args),
        Command::Fig5a(args) => cmd_fig5a(args),
        Command::Fig5b(args) => cmd_fig5b(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
        Err(CliError::Infeasible(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INFEASIBLE)
        }
    }
}

fn read_to_string(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

fn load_dist(path: &Path) -> Result<SourceDistribution, CliError> {
    Ok(SourceDistribution::from_json_str(&read_to_string(path)?)?)
}

fn load_dist_or_default(path: &Option<PathBuf>) -> Result<SourceDistribution, CliError> {
    match path {
        Some(p) => load_dist(p),
        None => Ok(experiments::default_dist()),
    }
}

fn write_output(path: &Option<PathBuf>, body: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, body)
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", p.display()))),
        None => {
            io::stdout().write_all(body)?;
            Ok(())
        }
    }
}

fn grid(min: f64, max: f64, step: f64) -> Result<Vec<f64>, CliError> {
    let valid = step > 0.0 && max >= min && min > 0.0;
    if !valid {
        return Err(CliError::Input(format!(
            "invalid grid: min={min}, max={max}, step={step}"
        )));
    }
    let count = ((max - min) / step + 1.5) as usize;
    Ok((0..count)
        .map(|i| min + step * i as f64)
        .filter(|&x| x <= max + 1e-12)
        .collect())
}

fn cmd_design(args: DesignArgs) -> Result<(), CliError> {
    let dist = load_dist(&args.dist)?;
    let report = design_report(&dist, args.blocklength, args.rate, args.lmax)?;

    let mut stdout = io::stdout().lock();
    writeln!(
        stdout,
        "B = {}, R = {}, B*R = {} bits/block, l_max = {}",
        report.blocklength,
        report.rate,
        report.blocklength as f64 * report.rate,
        report.l_max
    )?;
    writeln!(
        stdout,
        "{:<18} {:>12} {:>12} {:>8} {:>14}  lengths",
        "scheme", "E[L]", "E[L^2]", "stable", "age_bound"
    )?;
    for row in &report.schemes {
        let lengths = row
            .code
            .lengths()
            .iter()
            .map(|l| l.to_string())
            .collect::<Vec<_>>()
            .join(" ");
        writeln!(
            stdout,
            "{:<18} {:>12.6} {:>12.6} {:>8} {:>14.6}  {}",
            row.scheme,
            row.stats.mean_len,
            row.stats.second_moment,
            if row.stable { "yes" } else { "no" },
            row.age_bound,
            lengths
        )?;
    }
    writeln!(stdout, "moment-region boundary ({} points):", report.hull.len())?;
    for p in &report.hull {
        writeln!(
            stdout,
            "  E[L] = {:.6}, E[L^2] = {:.6}",
            p.stats.mean_len, p.stats.second_moment
        )?;
    }
    if let Some(path) = &args.out {
        let mut buf = Vec::new();
        experiments::write_design_csv(&report, &mut buf)?;
        write_output(&Some(path.clone()), &buf)?;
    }
    if let Some((min_mean_len, capacity)) = report.infeasible {
        return Err(CliError::Infeasible(format!(
            "no stable code at B = {}, R = {}: minimum achievable E[L] is {min_mean_len} \
             bits/block but the channel delivers only B*R = {capacity}",
            report.blocklength, report.rate
        )));
    }
    Ok(())
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let code = CodeLengths::from_json_str(&read_to_string(&args.code)?)?;
    let dist = load_dist(&args.dist)?;
    let blockdist = agecode::BlockDistribution::new(&dist, code.blocklength())?;
    let channel = ChannelConfig::new(code.blocklength(), args.rate)?;
    let timing = TimingKind::from(args.timing).model(args.rate)?;
    let result = run_age_sim(
        &code,
        &blockdist,
        &channel,
        &timing,
        args.blocks,
        args.seed,
    )?;
    let mut buf = Vec::new();
    experiments::write_sim_result_csv(&result, &mut buf)?;
    write_output(&args.out, &buf)
}

fn cmd_fig3(args: Fig3Args) -> Result<(), CliError> {
    let cfg = Fig3Config {
        a_grid: grid(args.a_min, args.a_max, args.a_step)?,
        n_blocks: args.blocks,
        seed: args.seed,
    };
    let rows = fig3_rows(&cfg)?;
    let mut buf = Vec::new();
    experiments::write_fig3_csv(&rows, &mut buf)?;
    write_output(&args.out, &buf)
}

fn cmd_fig5a(args: Fig5aArgs) -> Result<(), CliError> {
    if args.blocklengths.is_empty() {
        return Err(CliError::Input("blocklength list is empty".into()));
    }
    let cfg = Fig5aConfig {
        dist: load_dist_or_default(&args.dist)?,
        r_grid: grid(args.r_min, args.r_max, args.r_step)?,
        blocklengths: args.blocklengths,
        n_blocks: args.blocks,
        seed: args.seed,
        timing: args.timing.into(),
    };
    let rows = fig5a_rows(&cfg)?;
    let mut buf = Vec::new();
    experiments::write_fig5a_csv(&rows, &mut buf)?;
    write_output(&args.out, &buf)
}

fn cmd_fig5b(args: Fig5bArgs) -> Result<(), CliError> {
    let cfg = Fig5bConfig {
        dist: load_dist_or_default(&args.dist)?,
        blocklength: args.blocklength,
        r_grid: grid(args.r_min, args.r_max, args.r_step)?,
        n_blocks: args.blocks,
        seed: args.seed,
        timing: args.timing.into(),
    };
    let rows = fig5b_rows(&cfg)?;
    let mut buf = Vec::new();
    experiments::write_fig5b_csv(&rows, &mut buf)?;
    write_output(&args.out, &buf)
}
