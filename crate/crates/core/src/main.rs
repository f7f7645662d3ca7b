use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use jumpgen::config::Config;
use jumpgen::golden::{verify_example, EXAMPLE_GOLDEN};
use jumpgen::jumpseq::JumpState;
use jumpgen::report::{ideal_rows, ReportDoc};
use jumpgen::values::Value;

const EXIT_MISMATCH: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

#[derive(Parser)]
#[command(name = "jumpgen", version, about = "Jumping polynomials and generating sequences of valuations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Emit JSON instead of text on standard output.
    #[arg(long, global = true)]
    json: bool,
    /// Print nothing on standard output.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Build the chains and write a report.
    Build {
        #[arg(long)]
        config: PathBuf,
        /// JSON report path; the text report goes next to it with a `.txt`
        /// extension.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        max_t_index: Option<usize>,
        #[arg(long)]
        max_value: Option<String>,
    },
    /// List the minimal monomial generators of the ideal of elements of
    /// value at least SIGMA.
    Ideal {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        sigma: String,
        #[arg(long)]
        max_t_index: Option<usize>,
        #[arg(long)]
        max_value: Option<String>,
    },
    /// Rebuild the built-in example and compare it with the reference data.
    VerifyExample {
        /// Alternative reference data.
        #[arg(long, hide = true)]
        golden: Option<PathBuf>,
    },
}

enum Failure {
    Config(String),
    Internal(String),
}

fn load(path: &Path, max_t_index: Option<usize>, max_value: Option<&str>) -> Result<Config, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    let mut config = Config::parse(&text).map_err(|diags| {
        Failure::Config(
            diags
                .iter()
                .map(|d| format!("{}:{d}", path.display()))
                .collect::<Vec<_>>()
                .join("\n"),
        )
    })?;
    if let Some(n) = max_t_index {
        config.bounds.max_global_index = n;
    }
    if let Some(s) = max_value {
        let v = Value::parse(config.model.basis(), s).map_err(|e| Failure::Config(format!("--max-value: {e}")))?;
        config.bounds.max_value = Some(v);
    }
    Ok(config)
}

fn build_state(config: &Config) -> Result<JumpState, Failure> {
    JumpState::build(config.model.clone(), config.bounds.clone()).map_err(|e| Failure::Internal(e.to_string()))
}

/// Writes through a temporary file in the target directory.
fn write_atomic(path: &Path, contents: &str) -> Result<(), Failure> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let io = |e: std::io::Error| Failure::Internal(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let say = |s: &str| {
        if !cli.quiet {
            print!("{s}");
        }
    };
    match &cli.command {
        Command::Build {
            config,
            out,
            max_t_index,
            max_value,
        } => {
            let config = load(config, *max_t_index, max_value.as_deref())?;
            let start = Instant::now();
            let state = build_state(&config)?;
            let report = ReportDoc::build(&config, &state).map_err(|e| Failure::Internal(e.to_string()))?;
            let json = report.to_json();
            let text = report.to_text(Some(start.elapsed()));
            if let Some(out) = out {
                write_atomic(out, &json)?;
                write_atomic(&out.with_extension("txt"), &text)?;
            }
            say(if cli.json { &json } else { &text });
            Ok(0)
        }
        Command::Ideal {
            config,
            sigma,
            max_t_index,
            max_value,
        } => {
            let config = load(config, *max_t_index, max_value.as_deref())?;
            let sigma = Value::parse(config.model.basis(), sigma).map_err(|e| Failure::Config(format!("--sigma: {e}")))?;
            if sigma.is_negative() {
                return Err(Failure::Config("--sigma must be nonnegative".into()));
            }
            let state = build_state(&config)?;
            let row = ideal_rows(&state, &config, &sigma).map_err(|e| Failure::Internal(e.to_string()))?;
            if cli.json {
                say(&(serde_json::to_string_pretty(&row).expect("serializes") + "\n"));
            } else {
                let mut s = String::new();
                for g in &row.generators {
                    s += &format!("{}  value {}\n", g.vec, g.value.expr);
                }
                if !row.complete {
                    s += "note: the chain is not certified complete\n";
                }
                say(&s);
            }
            Ok(0)
        }
        Command::VerifyExample { golden } => {
            let text = match golden {
                Some(p) => fs::read_to_string(p).map_err(|e| Failure::Config(format!("{}: {e}", p.display())))?,
                None => EXAMPLE_GOLDEN.to_string(),
            };
            let diffs = verify_example(&text).map_err(|e| Failure::Internal(e.to_string()))?;
            if diffs.is_empty() {
                say("example reproduced exactly\n");
                Ok(0)
            } else {
                for d in &diffs {
                    eprintln!("mismatch {d}");
                }
                Ok(EXIT_MISMATCH)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Config(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(EXIT_INTERNAL)
        }
    }
}
