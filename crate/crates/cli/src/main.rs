use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hocolim_cli::commands::{self, ReplaceArgs};
use hocolim_cli::{suites, CliError, Mode, Report, Workspace};

/// Exact homotopy colimits of enriched diagrams over chain complexes.
#[derive(Parser)]
#[command(name = "hocolim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Direct,
    Bar,
}

#[derive(Args)]
struct Common {
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Seed for the randomized suites.
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Homology of the named complex, or of every complex in the file.
    Homology {
        file: PathBuf,
        #[arg(long)]
        name: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Cofibrant replacement of a diagram.
    Replace {
        file: PathBuf,
        #[arg(long)]
        diagram: String,
        #[arg(long, value_enum, default_value = "direct")]
        mode: ModeArg,
        /// Simplicial truncation of the bar construction.
        #[arg(long)]
        truncation: Option<usize>,
        /// Objects of an initial part left untouched (comma separated).
        #[arg(long, value_delimiter = ',')]
        away_from: Vec<String>,
        /// Write the extended workspace here instead of into the report.
        #[arg(long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Weighted colimit of a diagram.
    Wcolim {
        file: PathBuf,
        #[arg(long)]
        weight: String,
        #[arg(long)]
        diagram: String,
        /// Transformation whose image under the weight must be a weak equivalence.
        #[arg(long)]
        check_quillen: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Run a property suite: axioms, reedy, bar, counterexample or all.
    Verify {
        /// Workspace file; may be omitted when only a suite is given.
        file: Option<String>,
        suite_arg: Option<String>,
        #[arg(long)]
        suite: Option<String>,
        #[command(flatten)]
        common: Common,
    },
}

fn load(path: &Path) -> Result<Workspace, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Workspace::parse(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn emit(rep: &Report, format: Format) {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&rep.to_json()).expect("report serializes")),
        Format::Text => print!("{}", rep.to_text()),
    }
}

fn run(cli: Cli) -> Result<(Report, Format), CliError> {
    match cli.command {
        Command::Homology { file, name, common } => {
            let ws = load(&file)?;
            Ok((commands::cmd_homology(&ws, name.as_deref())?, common.format))
        }
        Command::Replace { file, diagram, mode, truncation, away_from, output, common } => {
            let ws = load(&file)?;
            let mode = match mode {
                ModeArg::Direct => Mode::Direct,
                ModeArg::Bar => Mode::Bar,
            };
            let max_degree = commands::max_degree_from_env()?;
            let args = ReplaceArgs { diagram: &diagram, mode, truncation, away_from: &away_from, max_degree };
            let (mut rep, out) = commands::cmd_replace(&ws, &args)?;
            match output {
                Some(p) => {
                    std::fs::write(&p, out.to_canonical_string())
                        .map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?;
                    rep.result.insert("output".into(), serde_json::json!(p.display().to_string()));
                    eprintln!("wrote {}", p.display());
                }
                None => {
                    rep.result.insert("workspace".into(), out.to_json());
                }
            }
            Ok((rep, common.format))
        }
        Command::Wcolim { file, weight, diagram, check_quillen, common } => {
            let ws = load(&file)?;
            Ok((commands::cmd_wcolim(&ws, &weight, &diagram, check_quillen.as_deref())?, common.format))
        }
        Command::Verify { file, suite_arg, suite, common } => {
            let (file, suite) = match (file, suite_arg, suite) {
                (Some(f), None, None) if suites::SUITES.contains(&f.as_str()) && !Path::new(&f).exists() => (None, f),
                (f, Some(s), None) | (f, None, Some(s)) => (f, s),
                (f, None, None) => (f, "all".to_string()),
                (_, Some(_), Some(_)) => return Err(CliError::Input("suite given twice".into())),
            };
            let ws = match file {
                Some(f) => load(Path::new(&f))?,
                None => Workspace::default(),
            };
            eprintln!("running suite {suite} with seed {}", common.seed);
            Ok((commands::cmd_verify(&ws, &suite, common.seed)?, common.format))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((rep, format)) => {
            emit(&rep, format);
            if rep.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
