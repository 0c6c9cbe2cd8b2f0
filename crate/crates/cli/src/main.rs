use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use num_traits::Zero;

use tdcount_core::counter::Branching;
use tdcount_core::driver::{format_result_block, run, ModeSelect, Report, RunConfig};
use tdcount_core::formula::{parse_input, ParseMode};
use tdcount_core::oracle::brute_force_count;
use tdcount_core::preprocess::PreprocessConfig;

#[derive(Parser, Debug)]
#[command(name = "tdcount", version, about = "Exact (weighted) model counter guided by a tree decomposition")]
#[command(args_conflicts_with_subcommands = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,

    /// DIMACS CNF file; standard input when omitted.
    input: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Mode::Auto)]
    mode: Mode,

    /// Seconds spent improving the tree decomposition (default 120).
    #[arg(long, value_name = "SECONDS")]
    td_time: Option<f64>,

    /// Use this PACE `.td` decomposition of the input's primal graph.
    #[arg(long, value_name = "FILE")]
    td_import: Option<PathBuf>,

    #[arg(long, value_name = "MB", default_value_t = 2000)]
    cache_mb: usize,

    /// Mantissa bits for weighted counting.
    #[arg(long, value_name = "BITS", default_value_t = 256, value_parser = clap::value_parser!(u32).range(8..))]
    prec: u32,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Skip preprocessing entirely.
    #[arg(long)]
    no_preproc: bool,
    #[arg(long)]
    no_vivify_propagation: bool,
    #[arg(long)]
    no_vivify_complete: bool,
    #[arg(long)]
    no_sparsify: bool,
    #[arg(long)]
    no_merge_equivalences: bool,
    #[arg(long)]
    no_eliminate_defined: bool,

    #[arg(long, value_enum, default_value_t = BranchingArg::Td)]
    branching: BranchingArg,

    /// Overall time limit in seconds.
    #[arg(long, value_name = "SECONDS")]
    timeout: Option<f64>,

    /// Write the preprocessed formula, with its multiplier and variable map.
    #[arg(long, value_name = "FILE")]
    preproc_out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Brute-force count of a small formula, in the same output format.
    #[command(hide = true)]
    Oracle {
        input: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Mode::Auto)]
        mode: Mode,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Mc,
    Wmc,
    Auto,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BranchingArg {
    Td,
    Base,
}

fn read_input(path: Option<&PathBuf>) -> Result<Vec<u8>> {
    match path {
        Some(p) => std::fs::read(p).with_context(|| format!("cannot read {}", p.display())),
        None => {
            let mut buf = Vec::new();
            std::io::stdin().read_to_end(&mut buf).context("cannot read standard input")?;
            Ok(buf)
        }
    }
}

fn seconds(value: Option<f64>, flag: &str) -> Result<Option<Duration>> {
    match value {
        Some(s) if !(s.is_finite() && s > 0.0) => bail!("{flag} must be a positive number of seconds"),
        Some(s) => Ok(Some(Duration::from_secs_f64(s))),
        None => Ok(None),
    }
}

fn parse_mode(mode: Mode) -> ParseMode {
    match mode {
        Mode::Mc => ParseMode::Mc,
        Mode::Wmc => ParseMode::Wmc,
        Mode::Auto => ParseMode::Auto,
    }
}

fn config(cli: &Cli) -> Result<RunConfig> {
    let preprocess = (!cli.no_preproc).then(|| PreprocessConfig {
        vivify_propagation: !cli.no_vivify_propagation,
        vivify_complete: !cli.no_vivify_complete,
        sparsify: !cli.no_sparsify,
        merge_equivalences: !cli.no_merge_equivalences,
        eliminate_defined: !cli.no_eliminate_defined,
        ..PreprocessConfig::default()
    });
    Ok(RunConfig {
        mode: match cli.mode {
            Mode::Mc => ModeSelect::Mc,
            Mode::Wmc => ModeSelect::Wmc,
            Mode::Auto => ModeSelect::Auto,
        },
        td_time: seconds(cli.td_time, "--td-time")?,
        cache_mb: cli.cache_mb,
        precision: cli.prec,
        seed: cli.seed,
        preprocess,
        branching: match cli.branching {
            BranchingArg::Td => Branching::Td,
            BranchingArg::Base => Branching::Base,
        },
        timeout: seconds(cli.timeout, "--timeout")?,
        keep_preprocessed: cli.preproc_out.is_some(),
    })
}

fn count(cli: &Cli) -> Result<Report> {
    let cfg = config(cli)?;
    let input = read_input(cli.input.as_ref())?;
    let td = cli.td_import.as_ref().map(|p| read_input(Some(p))).transpose()?;
    let report = run(&input, td.as_deref(), &cfg)?;
    if let (Some(path), Some(text)) = (&cli.preproc_out, &report.preprocessed) {
        std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(report)
}

fn oracle(input: Option<&PathBuf>, mode: Mode) -> Result<String> {
    let formula = parse_input(&read_input(input)?, parse_mode(mode))?;
    let r = brute_force_count(&formula)?;
    let status = if r.weighted_value.is_zero() {
        "UNSATISFIABLE"
    } else {
        "SATISFIABLE"
    };
    let value = if formula.is_weighted() {
        format!("c s exact arb rational {}", tdcount_core::formula::format_rational(&r.weighted_value))
    } else {
        format!("c s exact arb int {}", r.exact_count)
    };
    let kind = if formula.is_weighted() { "wmc" } else { "mc" };
    Ok(format!("c s type {kind}\ns {status}\n{value}\n"))
}

fn main() -> ExitCode {
    // Exit code 2 is reserved for timeouts, so usage errors exit with 1.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let mut out = std::io::stdout().lock();
    if let Some(Command::Oracle { input, mode }) = &cli.command {
        return match oracle(input.as_ref(), *mode) {
            Ok(block) => {
                let _ = out.write_all(block.as_bytes());
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("c o error: {e:#}");
                ExitCode::from(1)
            }
        };
    }
    match count(&cli) {
        Ok(report) => {
            for line in &report.log {
                let _ = writeln!(out, "{line}");
            }
            let _ = out.write_all(format_result_block(&report).as_bytes());
            let _ = out.flush();
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("c o error: {e:#}");
            ExitCode::from(1)
        }
    }
}
