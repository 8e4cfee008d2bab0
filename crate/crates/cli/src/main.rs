//! `meanderlink` command-line front end.
//!
//! Exit codes: 0 ok, 1 runtime failure, 2 usage error (unknown subcommand,
//! bad flags), 3 invalid configuration. Diagnostics go to stderr; stdout
//! carries only the manifest path.

use std::io::IsTerminal;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use meanderlink::commands::RunConfig;
use meanderlink::io::{apply_overrides, emit, load_json, parse_override};
use meanderlink::scenarios::{builtin_text, BUILTIN_SCENARIOS};
use meanderlink::Error;
use serde_json::Value;

const THREADS_ENV: &str = "MEANDER_LINK_THREADS";

#[derive(Parser, Debug)]
#[command(name = "meanderlink", version, about = "Meander-coil wireless power and passive telemetry simulator")]
struct Cli {
    /// More diagnostics on stderr (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build coils and export their paths.
    Geom(RunArgs),
    /// Field map over the body grid, optionally against a reference coil.
    Field(RunArgs),
    /// Two-port efficiency sweep.
    Link(RunArgs),
    /// Passive telemetry sweep and decode (`readout` or `pit` configs).
    Pit(RunArgs),
    /// Run a named scenario (confinement, charging, pit).
    Scenario(ScenarioArgs),
    /// Check a config without running it.
    Validate(ConfigArgs),
}

#[derive(Args, Debug)]
struct ConfigArgs {
    /// JSON config file.
    #[arg(short, long)]
    config: PathBuf,
    /// Override an existing key, e.g. `--set link.mutual=1e-6`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Output directory; created if missing.
    #[arg(short, long, default_value = "out")]
    out: PathBuf,
    /// Seed for stochastic parts; overrides any configured seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct ScenarioArgs {
    /// JSON scenario config.
    #[arg(short, long, required_unless_present = "name", conflicts_with = "name")]
    config: Option<PathBuf>,
    /// Built-in scenario instead of a file.
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(BUILTIN_SCENARIOS))]
    name: Option<String>,
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[arg(short, long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
}

/// Failure classes that map onto exit codes.
enum Failure {
    Config(String),
    Runtime(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Runtime(_) => 1,
            Failure::Config(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Runtime(m) => m,
        }
    }
}

fn classify(e: Error) -> Failure {
    match e {
        Error::Config { .. } => Failure::Config(e.to_string()),
        other => Failure::Runtime(other.to_string()),
    }
}

fn colour_enabled() -> bool {
    std::env::var_os("NO_COLOR").is_none_or(|v| v.is_empty()) && std::io::stderr().is_terminal()
}

fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let style = if colour_enabled() {
        env_logger::WriteStyle::Auto
    } else {
        env_logger::WriteStyle::Never
    };
    env_logger::Builder::new()
        .filter_level(level)
        .write_style(style)
        .format_timestamp(None)
        .target(env_logger::Target::Stderr)
        .init();
}

/// Caps the global rayon pool from the environment.
fn init_threads() -> Result<(), Failure> {
    let Some(raw) = std::env::var_os(THREADS_ENV) else { return Ok(()) };
    let text = raw.to_string_lossy();
    let n: usize = text
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Config(format!("{THREADS_ENV} must be a positive integer, got `{text}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Runtime(format!("cannot build thread pool: {e}")))?;
    log::debug!("using {n} worker threads");
    Ok(())
}

/// Loads a document, applies overrides and parses it.
fn load(doc: Value, overrides: &[String]) -> Result<(RunConfig, Value), Failure> {
    let mut doc = doc;
    let parsed = overrides
        .iter()
        .map(|o| parse_override(o))
        .collect::<Result<Vec<_>, _>>()
        .map_err(classify)?;
    apply_overrides(&mut doc, &parsed).map_err(classify)?;
    let cfg = RunConfig::from_json(doc.clone()).map_err(classify)?;
    Ok((cfg, doc))
}

fn load_file(path: &Path, overrides: &[String]) -> Result<(RunConfig, Value), Failure> {
    load(load_json(path).map_err(classify)?, overrides)
}

fn require_kind(cfg: &RunConfig, subcommand: &str, allowed: &[&str]) -> Result<(), Failure> {
    if allowed.contains(&cfg.kind()) {
        Ok(())
    } else {
        Err(Failure::Config(format!(
            "configuration error at `kind`: `{}` cannot be run by `{subcommand}` (expected {})",
            cfg.kind(),
            allowed.join(" or ")
        )))
    }
}

fn run_and_emit(cfg: &RunConfig, echo: Value, seed: Option<u64>, out: &Path) -> Result<PathBuf, Failure> {
    init_threads()?;
    let start = Instant::now();
    log::info!("running {}", cfg.kind());
    let output = cfg.run(echo, seed).map_err(classify)?;
    log::info!("{} finished in {:.2} s", cfg.kind(), start.elapsed().as_secs_f64());
    for (k, v) in &output.report.metrics {
        log::debug!("{k} = {v}");
    }
    std::fs::create_dir_all(out)
        .map_err(|e| Failure::Runtime(format!("cannot create output directory {}: {e}", out.display())))?;
    let (manifest, _) = emit(out, &output).map_err(classify)?;
    Ok(manifest)
}

fn dispatch(command: Command) -> Result<Option<PathBuf>, Failure> {
    let (args, name, allowed): (RunArgs, &str, &[&str]) = match command {
        Command::Geom(a) => (a, "geom", &["geom"]),
        Command::Field(a) => (a, "field", &["field"]),
        Command::Link(a) => (a, "link", &["link"]),
        Command::Pit(a) => (a, "pit", &["readout", "pit"]),
        Command::Scenario(a) => {
            let (cfg, echo) = match (&a.config, &a.name) {
                (Some(path), _) => load_file(path, &a.overrides)?,
                (None, Some(name)) => {
                    let text = builtin_text(name).expect("clap restricts names");
                    let doc = serde_json::from_str(text).map_err(|e| Failure::Config(e.to_string()))?;
                    load(doc, &a.overrides)?
                }
                (None, None) => unreachable!("clap requires one of --config/--name"),
            };
            require_kind(&cfg, "scenario", &BUILTIN_SCENARIOS)?;
            return run_and_emit(&cfg, echo, a.seed, &a.out).map(Some);
        }
        Command::Validate(a) => {
            let (cfg, _) = load_file(&a.config, &a.overrides)?;
            log::info!("{}: valid `{}` config", a.config.display(), cfg.kind());
            return Ok(None);
        }
    };
    let (cfg, echo) = load_file(&args.config.config, &args.config.overrides)?;
    require_kind(&cfg, name, allowed)?;
    run_and_emit(&cfg, echo, args.seed, &args.out).map(Some)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help and version are successful exits
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    init_logging(cli.verbose);
    match dispatch(cli.command) {
        Ok(Some(manifest)) => {
            println!("{}", manifest.display());
            ExitCode::SUCCESS
        }
        Ok(None) => ExitCode::SUCCESS,
        Err(f) => {
            if colour_enabled() {
                eprintln!("\x1b[31merror:\x1b[0m {}", f.message());
            } else {
                eprintln!("error: {}", f.message());
            }
            ExitCode::from(f.code())
        }
    }
}
