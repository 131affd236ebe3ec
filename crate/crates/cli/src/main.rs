//! `conflen`: runs the length experiments and writes result tables.
//!
//! Exit codes: 0 success, 1 bound violation, 2 configuration error,
//! 3 numeric failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use conflen::experiments::{run_and_write, Scenario, ScenarioConfig, EXIT_CONFIG, EXIT_NUMERIC};
use conflen::Error;

#[derive(Parser)]
#[command(name = "conflen", version, about = "Seeded conformal-geometry length experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Random convex hyperbolic polygons against the perimeter chain.
    BrownFlinn,
    /// The 1/2 level curve of harmonic measure against pi.
    LevelSet,
    /// Level curves for several alpha against 2 pi (1 - alpha) / sin(pi alpha).
    ConjectureSweep,
    /// Image of the 3/4 arc under two-slit maps against pi (b - a).
    SlitExtremal,
    /// Conformal reflection across the 1/2 level curve.
    ReflectionCheck,
    /// Preimage lengths of lines and circles against pi^2.
    HaymanWu,
    /// Every scenario.
    All,
}

impl Command {
    fn scenario(self) -> Scenario {
        match self {
            Command::BrownFlinn => Scenario::BrownFlinn,
            Command::LevelSet => Scenario::LevelSet,
            Command::ConjectureSweep => Scenario::ConjectureSweep,
            Command::SlitExtremal => Scenario::SlitExtremal,
            Command::ReflectionCheck => Scenario::ReflectionCheck,
            Command::HaymanWu => Scenario::HaymanWu,
            Command::All => Scenario::All,
        }
    }
}

#[derive(Args)]
struct Opts {
    /// TOML configuration; defaults apply to missing keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Cap on the instance count of each scenario.
    #[arg(long, global = true)]
    instances: Option<usize>,
    /// Also write SVG plots.
    #[arg(long, global = true)]
    svg: bool,
}

fn resolve(cli: &Cli) -> Result<ScenarioConfig, Error> {
    let mut cfg = match &cli.opts.config {
        Some(path) => ScenarioConfig::load(path)?,
        None => ScenarioConfig::default(),
    };
    cfg.scenario = cli.command.scenario();
    if let Some(seed) = cli.opts.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.opts.out {
        cfg.output_dir = out.clone();
    }
    if cli.opts.instances.is_some() {
        cfg.instances = cli.opts.instances;
    }
    cfg.svg |= cli.opts.svg;
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match resolve(&cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    };
    let out = match run_and_write(&cfg) {
        Ok(out) => out,
        Err(e @ Error::Config(_)) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG as u8);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_NUMERIC as u8);
        }
    };
    for s in cfg.scenario.expand() {
        let rows = out.rows.iter().filter(|r| r.scenario == s).count();
        let bad = out.violations().filter(|r| r.scenario == s).count();
        let failed = out.failures.iter().filter(|f| f.scenario == s).count();
        let min = out.min_margin(s).map_or("-".to_string(), |m| format!("{m:.3e}"));
        println!("{s:<17} rows {rows:>5}  violations {bad}  failures {failed}  min margin {min}");
    }
    for r in out.violations() {
        eprintln!("violation: {} {} measured {} bound {} margin {}", r.scenario, r.id, r.measured, r.bound, r.margin);
    }
    for f in &out.failures {
        eprintln!("failure: {} {} ({:?}): {}", f.scenario, f.instance, f.kind, f.message);
    }
    println!("results written to {}", cfg.output_dir.display());
    ExitCode::from(out.exit_code() as u8)
}
