use std::fs;
use std::io::{self, BufRead, IsTerminal, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use fpi_cli::{CliError, Session};
use fpi_core::Mode;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Perfect,
    Level0,
}

/// Exact arithmetic in the perfect closure of F_p(x1, ..., xd).
#[derive(Debug, Parser)]
#[command(name = "fpi", version)]
struct Args {
    /// Characteristic (a prime below 2^31).
    #[arg(long, default_value_t = 2)]
    p: u64,
    /// Number of variables d.
    #[arg(long, default_value_t = 2)]
    vars: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Perfect)]
    mode: ModeArg,
    /// Run commands from a file instead of reading stdin.
    #[arg(long)]
    script: Option<PathBuf>,
    /// Emit one JSON object per result.
    #[arg(long)]
    json: bool,
    #[arg(long, default_value_t = fpi_core::perfclosure::DEFAULT_MAX_LEVEL)]
    max_level: u32,
    /// In script mode, continue after a failing line.
    #[arg(long)]
    keep_going: bool,
}

fn report(err: &CliError, line: &str, line_no: usize, json: bool) {
    if json {
        let mut j = err.to_json();
        j["line"] = line_no.into();
        println!("{j}");
        return;
    }
    eprintln!("error: line {line_no}: {err}");
    if let Some(span) = err.span() {
        let start = line
            .get(..span.start)
            .map_or(span.start, |s| s.chars().count());
        let width = line
            .get(span.start..span.end.min(line.len()))
            .map_or(1, |s| s.chars().count().max(1));
        eprintln!("  | {line}");
        eprintln!("  | {}{}", " ".repeat(start), "^".repeat(width));
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    let mode = match args.mode {
        ModeArg::Perfect => Mode::Perfect,
        ModeArg::Level0 => Mode::Level0,
    };
    let mut session = match Session::new(args.p, args.vars, mode, args.max_level) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    session.set_json(args.json);

    if let Some(path) = &args.script {
        let text = match fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(2);
            }
        };
        let mut status = 0u8;
        for (i, line) in text.lines().enumerate() {
            match session.run_command(line) {
                Ok(Some(out)) => println!("{out}"),
                Ok(None) => {}
                Err(e) => {
                    report(&e, line, i + 1, session.json());
                    if status == 0 {
                        status = e.exit_code() as u8;
                    }
                    if !args.keep_going {
                        break;
                    }
                }
            }
        }
        return ExitCode::from(status);
    }

    let stdin = io::stdin();
    let interactive = stdin.is_terminal();
    let mut status = 0u8;
    let mut lines = stdin.lock().lines();
    for line_no in 1.. {
        if interactive {
            print!("fpi> ");
            let _ = io::stdout().flush();
        }
        let Some(Ok(line)) = lines.next() else { break };
        match session.run_command(&line) {
            Ok(Some(out)) => println!("{out}"),
            Ok(None) => {}
            Err(e) => {
                report(&e, &line, line_no, session.json());
                if !interactive && status == 0 {
                    status = e.exit_code() as u8;
                }
            }
        }
    }
    ExitCode::from(status)
}
