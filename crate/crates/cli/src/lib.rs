//! Argument handling and file loading for the `stc` binary.

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use stc_core::driver::{run, Command, Input, Options};
use stc_core::nbe::DEFAULT_FUEL;
use stc_core::phase::DEFAULT_LAW_SIZE;
use stc_core::report::{Diagnostic, Item, Report, Status};

pub const EXIT_USAGE: u8 = 2;
pub const MAX_JOBS: u16 = 256;

#[derive(Debug, Parser)]
#[command(
    name = "stc",
    version,
    about = "Type checking, canonicity, gluing laws and cost extraction"
)]
pub struct Cli {
    #[command(flatten)]
    pub flags: Flags,
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Debug, Args)]
pub struct Flags {
    /// Emit the report as JSON on stdout.
    #[arg(long, global = true)]
    pub json: bool,
    /// Include reduction and witness traces.
    #[arg(long, global = true)]
    pub trace: bool,
    /// Object-size bound for `laws`.
    #[arg(long, global = true, default_value_t = DEFAULT_LAW_SIZE, value_name = "N")]
    pub size: usize,
    /// Evaluation step budget.
    #[arg(long, global = true, env = "STC_FUEL", default_value_t = DEFAULT_FUEL, value_name = "N")]
    pub fuel: u64,
    /// Worker threads for `corpus` and `laws` (0 = one per core).
    #[arg(long, global = true, default_value_t = 0, value_name = "N",
          value_parser = clap::value_parser!(u16).range(0..=MAX_JOBS as i64))]
    pub jobs: u16,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Type-check every form; `.calf` files use the CBPV checker.
    Check {
        #[arg(required = true, value_name = "FILE")]
        files: Vec<PathBuf>,
    },
    /// Extract canonical forms and audit tracking.
    Canon {
        #[arg(required = true, value_name = "FILE")]
        files: Vec<PathBuf>,
    },
    /// Check the gluing laws by exhaustive enumeration.
    Laws,
    /// Extract costs from closed `(F bool)` computations.
    Calf {
        #[arg(required = true, value_name = "FILE")]
        files: Vec<PathBuf>,
    },
    /// Run every `.stc` and `.calf` file under the given directories.
    Corpus {
        #[arg(required = true, value_name = "PATH")]
        paths: Vec<PathBuf>,
    },
}

/// Parses `args` (including the program name), runs the command and writes
/// the report. Returns the process exit code.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
                return EXIT_USAGE;
            }
            let _ = write!(out, "{text}");
            return 0;
        }
    };
    let report = execute(&cli);
    let written = if cli.flags.json {
        writeln!(out, "{}", report.to_json())
    } else {
        write!(out, "{}", report.render_human())
    };
    if written.is_err() {
        return EXIT_USAGE;
    }
    report.exit_code
}

pub fn execute(cli: &Cli) -> Report {
    let opts = Options {
        trace: cli.flags.trace,
        size: cli.flags.size,
        fuel: cli.flags.fuel,
        jobs: cli.flags.jobs.into(),
    };
    let (command, paths, walk) = match &cli.command {
        Cmd::Check { files } => (Command::Check, files.clone(), false),
        Cmd::Canon { files } => (Command::Canon, files.clone(), false),
        Cmd::Calf { files } => (Command::Calf, files.clone(), false),
        Cmd::Laws => (Command::Laws, Vec::new(), false),
        Cmd::Corpus { paths } => (Command::Corpus, paths.clone(), true),
    };
    let mut failures = Vec::new();
    let mut files = Vec::new();
    for path in &paths {
        if walk && path.is_dir() {
            if let Err(e) = collect(path, &mut files) {
                failures.push(io_item(path, &e));
            }
        } else {
            files.push(path.clone());
        }
    }
    let mut inputs = Vec::new();
    for file in &files {
        match load(file) {
            Ok(input) => inputs.push(input),
            Err(diag) => failures.push(Item {
                file: display(file),
                status: Status::Error,
                error: Some(diag),
                ..Item::default()
            }),
        }
    }
    let mut report = run(command, &opts, &inputs);
    if !failures.is_empty() {
        report.inputs = paths.iter().map(|p| display(p)).collect();
        report.items.extend(failures);
        report.finish();
    }
    report
}

fn display(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

fn io_item(path: &Path, e: &std::io::Error) -> Item {
    Item {
        file: display(path),
        status: Status::Error,
        error: Some(Diagnostic::new("io", e.to_string())),
        ..Item::default()
    }
}

/// `-` reads standard input as an object-theory file.
fn load(path: &Path) -> Result<Input, Diagnostic> {
    let mut bytes = Vec::new();
    let read = if path == Path::new("-") {
        std::io::stdin().read_to_end(&mut bytes).map(|_| ())
    } else {
        std::fs::File::open(path).and_then(|mut f| f.read_to_end(&mut bytes).map(|_| ()))
    };
    read.map_err(|e| Diagnostic::new("io", e.to_string()))?;
    let text = String::from_utf8(bytes).map_err(|e| Diagnostic::new("encoding", format!("input is not UTF-8: {e}")))?;
    let name = if path == Path::new("-") {
        "<stdin>".into()
    } else {
        display(path)
    };
    Ok(Input { name, text })
}

/// Collects `.stc` and `.calf` files below `dir` in sorted order.
fn collect(dir: &Path, out: &mut Vec<PathBuf>) -> std::io::Result<()> {
    let mut entries: Vec<PathBuf> = std::fs::read_dir(dir)?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<_, _>>()?;
    entries.sort();
    for path in entries {
        if path.is_dir() {
            collect(&path, out)?;
        } else if matches!(path.extension().and_then(|e| e.to_str()), Some("stc" | "calf")) {
            out.push(path);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cli(args: &[&str]) -> (u8, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_cli(std::iter::once("stc").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap())
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(cli(&[]).0, 2);
        assert_eq!(cli(&["frobnicate"]).0, 2);
        assert_eq!(cli(&["check"]).0, 2);
        assert_eq!(cli(&["laws", "--size", "x"]).0, 2);
        assert_eq!(cli(&["--help"]).0, 0);
    }

    #[test]
    fn missing_file_exits_two() {
        let (code, out) = cli(&["check", "/nonexistent/a.stc", "--json"]);
        assert_eq!(code, 2);
        assert!(out.contains("\"io\""));
    }

    #[test]
    fn laws_human() {
        let (code, out) = cli(&["laws", "--size", "1"]);
        assert_eq!(code, 0);
        assert!(out.contains("glue.formation"));
    }
}
