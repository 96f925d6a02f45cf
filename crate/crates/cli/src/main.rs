use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use logjet::corpus;
use logjet::logmodel::Semantics;
use logjet::report::{render_report, run_text, Command, Format, RunError, RunOptions};

/// Irreducibility of log jet and arc schemes of monoid log schemes.
#[derive(Parser)]
#[command(name = "logjet", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct Common {
    /// Description file, or `-` for standard input.
    file: PathBuf,
    /// Rank semantics: associated or image.
    #[arg(long)]
    semantics: Option<Semantics>,
    /// Characteristic of the base field (0 or a prime).
    #[arg(long = "char")]
    characteristic: Option<u64>,
    /// Enumeration budget in candidates.
    #[arg(long)]
    budget: Option<u64>,
    /// Output format: human or json.
    #[arg(long, default_value = "human")]
    format: Format,
}

#[derive(Subcommand)]
enum Cmd {
    /// Group completion, saturation, faces and p-power saturation.
    Analyze(Common),
    /// Stratification by log rank.
    Stratify(Common),
    /// Dimensional regularity and the irreducibility verdict.
    Verdict(Common),
    /// Hasse–Schmidt presentation of the jet algebra.
    Jets {
        #[command(flatten)]
        common: Common,
        /// Jet order.
        #[arg(long, default_value_t = 1)]
        order: u32,
        /// Include the log relations of the chart.
        #[arg(long)]
        log: bool,
    },
    /// Counts of log jets over a prime field.
    Count {
        #[command(flatten)]
        common: Common,
        /// Field size (a prime).
        #[arg(long)]
        q: u64,
        /// Jet order.
        #[arg(long)]
        m: u32,
        /// Also compare order-m jets truncated to this order with all jets of that order.
        #[arg(long)]
        truncate: Option<u32>,
    },
    /// Runs the bundled examples against their expected reports.
    Examples,
}

fn read_input(path: &PathBuf) -> Result<String, RunError> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| RunError::Usage(format!("cannot read standard input: {e}")))?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| RunError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn execute(command: Command, common: &Common, mut options: RunOptions) -> Result<String, RunError> {
    options.semantics = common.semantics;
    options.characteristic = common.characteristic;
    options.budget = common.budget;
    let text = read_input(&common.file)?;
    let doc = run_text(command, &text, &options)?;
    Ok(render_report(&doc, common.format))
}

fn examples() -> ExitCode {
    let outcomes = corpus::check_all();
    let mut failed = 0;
    for o in &outcomes {
        match &o.detail {
            None => println!("PASS {}", o.name),
            Some(d) => {
                failed += 1;
                println!("FAIL {}: {d}", o.name);
            }
        }
    }
    println!("{} of {} examples pass", outcomes.len() - failed, outcomes.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let none = RunOptions::default();
    let result = match &cli.command {
        Cmd::Analyze(c) => execute(Command::Analyze, c, none),
        Cmd::Stratify(c) => execute(Command::Stratify, c, none),
        Cmd::Verdict(c) => execute(Command::Verdict, c, none),
        Cmd::Jets { common, order, log } => {
            execute(Command::Jets, common, RunOptions { order: Some(*order), log: *log, ..none })
        }
        Cmd::Count { common, q, m, truncate } => {
            execute(Command::Count, common, RunOptions { q: Some(*q), m: Some(*m), truncate: *truncate, ..none })
        }
        Cmd::Examples => return examples(),
    };
    match result {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
