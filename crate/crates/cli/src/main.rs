use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use realpv::pipeline::{germ_csv, run_stages, Stages};
use realpv::{emit, parse_spec, Config, Format};
use realpv_core::pv::build_pv_candidates_with;

#[derive(Parser)]
#[command(name = "realpv", version, about = "Real Picard-Vessiot extensions of diagonal difference systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Exit with status 1 when a verdict stays undecided.
    #[arg(long, global = true)]
    strict: bool,
    /// TOML file with defaults for the run.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true)]
    window: Option<usize>,
    #[arg(long, global = true)]
    index_bound: Option<i64>,
}

#[derive(Args)]
struct Input {
    /// System description file, `-` for stdin.
    spec: Option<PathBuf>,
    /// Inline system description.
    #[arg(short = 'e', long, conflicts_with = "spec")]
    expr: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Candidates with their simplicity, realness and weak flags.
    Build(Input),
    /// The Galois group of a real candidate.
    Galois(Input),
    /// Pairwise isomorphism tests and the real classes.
    Compare(Input),
    /// Germ cross-checks of every candidate.
    Embed {
        #[command(flatten)]
        input: Input,
        /// Print the germ window of this candidate as CSV instead.
        #[arg(long)]
        csv: Option<usize>,
    },
    /// Galois correspondence table and real points.
    Correspond(Input),
    /// Everything.
    Report(Input),
}

fn read_input(input: &Input) -> Result<String, String> {
    if let Some(e) = &input.expr {
        return Ok(e.clone());
    }
    match &input.spec {
        None => Err("no system description: pass a file, '-' or --expr".into()),
        Some(p) if p.as_os_str() == "-" => {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| format!("cannot read stdin: {e}"))?;
            Ok(s)
        }
        Some(p) => std::fs::read_to_string(p).map_err(|e| format!("cannot read {}: {e}", p.display())),
    }
}

fn fail(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("realpv: {msg}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut config = match &cli.config {
        Some(p) => match Config::load(p) {
            Ok(c) => c,
            Err(e) => return fail(e),
        },
        None => Config::default(),
    };
    if let Some(t) = cli.threads.or(config.threads) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let (input, stages, name) = match &cli.command {
        Command::Build(i) => (i, Stages::NONE, "build"),
        Command::Galois(i) => (i, Stages { galois: true, ..Stages::NONE }, "galois"),
        Command::Compare(i) => (i, Stages { classes: true, ..Stages::NONE }, "compare"),
        Command::Embed { input, .. } => (input, Stages { germs: true, ..Stages::NONE }, "embed"),
        Command::Correspond(i) => (i, Stages { correspondence: true, ..Stages::NONE }, "correspond"),
        Command::Report(i) => (i, Stages::ALL, "report"),
    };
    let text = match read_input(input) {
        Ok(t) => t,
        Err(e) => return fail(e),
    };
    let spec = match parse_spec(&text) {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    config.apply(&spec.options);
    if let Some(w) = cli.window {
        config.window = w;
    }
    if let Some(b) = cli.index_bound {
        config.index_bound = b;
    }
    if let Command::Embed { csv: Some(k), .. } = &cli.command {
        let pvs = match build_pv_candidates_with(&spec.system(), config.harness()) {
            Ok(p) => p,
            Err(e) => return fail(e),
        };
        let Some(pv) = pvs.get(*k) else {
            return fail(format!("no candidate {k}; there are {}", pvs.len()));
        };
        return match germ_csv(pv, &config) {
            Ok(csv) => {
                print!("{csv}");
                ExitCode::SUCCESS
            }
            Err(e) => fail(e),
        };
    }
    let report = match run_stages(&spec, &config, stages, name) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    let bytes = emit(&report, cli.format);
    if std::io::stdout().write_all(&bytes).is_err() {
        return ExitCode::from(2);
    }
    if cli.strict && !report.unknowns.is_empty() {
        for u in &report.unknowns {
            eprintln!("realpv: undecided: {u}");
        }
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}
