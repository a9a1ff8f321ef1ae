use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use lifo_dict::scoped::Fault;
use lifo_dict::{bench, fuzz, script};

const VIOLATION: u8 = 1;
const USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "lifo-dict", version, about = "Scoped bit-trie dictionary driver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute an operation script and print its output.
    Run { path: PathBuf },
    /// Execute an operation script and print the final trie.
    Dump { path: PathBuf },
    /// Differential test against the reference model.
    Fuzz {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 100_000)]
        ops: usize,
        #[arg(long, default_value_t = 32)]
        max_depth: usize,
        #[arg(long, default_value_t = 0)]
        min_bits: usize,
        #[arg(long, default_value_t = 512)]
        max_bits: usize,
        /// Operations between full entry-set comparisons.
        #[arg(long, default_value_t = 5_000)]
        check_every: usize,
        #[arg(long)]
        no_minimize: bool,
        #[arg(long, value_enum, hide = true)]
        inject_fault: Option<FaultArg>,
    },
    /// Measure step counters for random keys of fixed length.
    Bench {
        #[arg(long, value_delimiter = ',', default_values_t = [1_000, 10_000])]
        n: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = [8, 64, 512])]
        s: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Inserts performed inside the measured environment.
        #[arg(long, default_value_t = 1_000)]
        env_inserts: usize,
        /// Also report wall time (output is then not reproducible).
        #[arg(long)]
        timing: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    BranchPointerTest,
    SkipCopyOnWrite,
}

impl From<FaultArg> for Fault {
    fn from(f: FaultArg) -> Fault {
        match f {
            FaultArg::BranchPointerTest => Fault::BranchPointerTest,
            FaultArg::SkipCopyOnWrite => Fault::SkipCopyOnWrite,
        }
    }
}

fn run_file(path: &Path, dump_only: bool) -> ExitCode {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("cannot read {}: {e}", path.display());
            return ExitCode::from(USAGE);
        }
    };
    let run = script::run_script(&text);
    print!("{}", if dump_only { &run.dump } else { &run.output });
    match run.error {
        Some(e) => {
            eprintln!("error: {e}");
            ExitCode::from(USAGE)
        }
        None => ExitCode::SUCCESS,
    }
}

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(USAGE)
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run { path } => run_file(&path, false),
        Command::Dump { path } => run_file(&path, true),
        Command::Fuzz { seed, ops, max_depth, min_bits, max_bits, check_every, no_minimize, inject_fault } => {
            if min_bits > max_bits {
                return usage_error("--min-bits exceeds --max-bits");
            }
            if max_depth == 0 {
                return usage_error("--max-depth must be at least 1");
            }
            let config = fuzz::FuzzConfig {
                seed,
                ops,
                max_depth,
                key_bits: min_bits..=max_bits,
                check_every,
                fault: inject_fault.map(Fault::from),
                minimize: !no_minimize,
                ..fuzz::FuzzConfig::default()
            };
            let report = fuzz::run(&config);
            print!("{report}");
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(VIOLATION)
            }
        }
        Command::Bench { n, s, seed, env_inserts, timing } => {
            if n.is_empty() || s.is_empty() {
                return usage_error("--n and --s need at least one value");
            }
            let report = bench::run(&bench::BenchConfig { n_list: n, s_list: s, seed, env_inserts, timing });
            print!("{report}");
            if report.violations() == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(VIOLATION)
            }
        }
    }
}
