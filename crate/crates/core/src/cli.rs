//! Command-line front end. `solve` and `oracle` exit 0 for YES, 1 for NO
//! and 2 on any error; the other commands exit 0 on success and 2 on error,
//! except `check`, which exits 1 when a suite reports failures.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::bench::{parse_grid, run_grid, to_csv};
use crate::format::{parse_problem, print_problem};
use crate::gen::{gen_random_instance, GenParams};
use crate::netlist::parse_circuit;
use crate::oracle::entails_query;
use crate::qbf::parse_qdimacs;
use crate::reduce::{reduce_qbf, reduce_qmcs, reduce_wamcs_complement, reduce_wmcs};
use crate::solver::{decide, render_trace, Instance, Options};
use crate::suites::{run_suite, SUITES};

pub const EXIT_YES: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "limbel", version, about = "Limited-belief reasoning over ground equality clauses")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide a problem file at its belief level.
    Solve {
        file: PathBuf,
        /// Override the file's level (objective queries only).
        #[arg(long)]
        level: Option<u32>,
        /// Print the split tree after the answer.
        #[arg(long)]
        trace: bool,
        /// Cache belief results per setup.
        #[arg(long)]
        memo: bool,
        /// Print search statistics to stderr.
        #[arg(long)]
        stats: bool,
    },
    /// Decide classical entailment by enumerating worlds.
    Oracle { file: PathBuf },
    /// Encode a QBF or circuit problem as a problem file.
    Reduce {
        #[command(subcommand)]
        source: ReduceSource,
    },
    /// Write a seeded random problem file.
    Gen {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        terms: usize,
        #[arg(long)]
        names: usize,
        #[arg(long)]
        clauses: usize,
        #[arg(long)]
        width: usize,
        #[arg(long, default_value_t = 0)]
        level: u32,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Time the solver over a grid of generated instances; writes CSV.
    Bench {
        #[arg(long)]
        grid: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run property suites.
    Check {
        #[command(subcommand)]
        what: CheckWhat,
    },
}

#[derive(Subcommand, Debug)]
enum ReduceSource {
    /// QDIMACS input.
    Qbf {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Circuit netlist input; weights come from its `weights` line.
    Circuit {
        file: PathBuf,
        #[arg(long, value_enum)]
        mode: CircuitMode,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CircuitMode {
    /// Alternating monotone satisfiability.
    Qmcs,
    /// Weighted monotone satisfiability (one block).
    Wmcs,
    /// Complement of weighted anti-monotone satisfiability (one block).
    Wamcs,
}

#[derive(Subcommand, Debug)]
enum CheckWhat {
    Lemmas {
        /// Suite name, or `all`.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: usize,
    },
}

/// Runs the CLI on the process arguments and standard streams.
pub fn run_cli(argv: impl IntoIterator<Item = String>) -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_cli_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// Runs the CLI with explicit output streams. `argv[0]` is the program name.
pub fn run_cli_with(argv: impl IntoIterator<Item = String>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_ERROR
                }
            };
        }
    };
    match run(cli.command, out, err) {
        Ok(code) => code,
        Err(message) => {
            let _ = writeln!(err, "error: {message}");
            EXIT_ERROR
        }
    }
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_problem(path: &Path) -> Result<Instance, String> {
    parse_problem(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn emit(text: &str, output: Option<&Path>, out: &mut dyn Write) -> Result<(), String> {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => out.write_all(text.as_bytes()).map_err(|e| e.to_string()),
    }
}

fn verdict_line(yes: bool, out: &mut dyn Write) -> Result<i32, String> {
    writeln!(out, "{}", if yes { "YES" } else { "NO" }).map_err(|e| e.to_string())?;
    Ok(if yes { EXIT_YES } else { EXIT_NO })
}

fn run(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, String> {
    match command {
        Command::Solve { file, level, trace, memo, stats } => {
            let mut inst = load_problem(&file)?;
            if let Some(k) = level {
                inst.level = k;
            }
            let v = decide(&inst, Options { memo, trace }).map_err(|e| e.to_string())?;
            let code = verdict_line(v.answer, out)?;
            if let Some(t) = &v.trace {
                write!(out, "{}", render_trace(t)).map_err(|e| e.to_string())?;
            }
            if stats {
                let s = v.stats;
                let _ = writeln!(
                    err,
                    "closures {} cache_hits {} peak_depth {}",
                    s.closures, s.cache_hits, s.peak_depth
                );
            }
            Ok(code)
        }
        Command::Oracle { file } => {
            let inst = load_problem(&file)?;
            let yes = entails_query(&inst.kb, &inst.query).map_err(|e| e.to_string())?;
            verdict_line(yes, out)
        }
        Command::Reduce { source } => {
            let (inst, output) = match source {
                ReduceSource::Qbf { file, output } => {
                    let q = parse_qdimacs(&read(&file)?).map_err(|e| format!("{}: {e}", file.display()))?;
                    (reduce_qbf(&q).map_err(|e| e.to_string())?, output)
                }
                ReduceSource::Circuit { file, mode, output } => {
                    let c = parse_circuit(&read(&file)?).map_err(|e| format!("{}: {e}", file.display()))?;
                    let single_weight = || match c.weights() {
                        [k] => Ok(*k),
                        ws => Err(format!("mode needs exactly one block, found {}", ws.len())),
                    };
                    let inst = match mode {
                        CircuitMode::Qmcs => reduce_qmcs(&c),
                        CircuitMode::Wmcs => reduce_wmcs(&c, single_weight()?),
                        CircuitMode::Wamcs => reduce_wamcs_complement(&c, single_weight()?),
                    };
                    (inst.map_err(|e| e.to_string())?, output)
                }
            };
            let text = print_problem(&inst).map_err(|e| e.to_string())?;
            emit(&text, output.as_deref(), out)?;
            Ok(0)
        }
        Command::Gen { seed, terms, names, clauses, width, level, output } => {
            let params = GenParams { terms, names, clauses, width, level };
            let inst = gen_random_instance(seed, params).map_err(|e| e.to_string())?;
            let text = print_problem(&inst).map_err(|e| e.to_string())?;
            emit(&text, output.as_deref(), out)?;
            Ok(0)
        }
        Command::Bench { grid, output } => {
            let grid = parse_grid(&grid).map_err(|e| e.to_string())?;
            let rows = run_grid(&grid).map_err(|e| e.to_string())?;
            emit(&to_csv(&rows), output.as_deref(), out)?;
            Ok(0)
        }
        Command::Check { what: CheckWhat::Lemmas { suite, seed, count } } => {
            let names: Vec<&str> = if suite == "all" { SUITES.to_vec() } else { vec![suite.as_str()] };
            let mut failed = false;
            for name in names {
                let report = run_suite(name, seed, count).ok_or_else(|| {
                    format!("unknown suite `{name}`; expected all or one of {}", SUITES.join(", "))
                })?;
                writeln!(out, "{report}").map_err(|e| e.to_string())?;
                for note in &report.notes {
                    let _ = writeln!(out, "  note: {note}");
                }
                for f in &report.failures {
                    let _ = writeln!(out, "  FAIL {f}");
                }
                failed |= !report.passed();
            }
            Ok(if failed { 1 } else { 0 })
        }
    }
}
