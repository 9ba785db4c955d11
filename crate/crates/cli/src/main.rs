use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use explore_cli::commands::{self, MapSource};
use explore_cli::config::{resolve_seed, RunConfig};
use explore_cli::maps::MapFormat;
use explore_cli::CliError;

/// Information-seeking exploration planner on floor-plan maps.
#[derive(Parser)]
#[command(name = "explore", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON config; missing keys take defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed. Overrides EXPLORE_SEED and the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Dotted override such as planner.sigma_p=0.05. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[arg(long)]
    format: Option<MapFormat>,
    /// Multiplies map coordinates on load.
    #[arg(long)]
    scale: Option<f64>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Runs one episode.
    Run {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        map: Option<PathBuf>,
        /// Also write trajectory.svg.
        #[arg(long)]
        svg: bool,
    },
    /// Runs one episode per map of a directory, the config's map list, or
    /// the bundled suite.
    Batch {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        maps_dir: Option<PathBuf>,
        #[arg(long)]
        parallel: Option<usize>,
    },
    /// Renders a report JSON as SVG.
    Plot {
        #[arg(long)]
        report: PathBuf,
        /// Destination file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Runs built-in end-to-end checks.
    Selftest,
}

fn load(common: &Common, extra: &[String]) -> Result<RunConfig, CliError> {
    let mut overrides = extra.to_vec();
    if let Some(f) = common.format {
        overrides.push(format!("format={}", serde_json::to_string(&f).expect("enum serializes")));
    }
    if let Some(s) = common.scale {
        overrides.push(format!("scale={s}"));
    }
    overrides.extend(common.overrides.iter().cloned());
    let mut cfg = RunConfig::load(common.config.as_deref(), &overrides)?;
    let env = std::env::var("EXPLORE_SEED").ok();
    cfg.seed = resolve_seed(cfg.seed, common.seed, env.as_deref())?;
    Ok(cfg)
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run { common, map, svg } => {
            let mut cfg = load(&common, &[])?;
            if let Some(m) = map {
                cfg.maps = vec![m];
            }
            let r = commands::run(&cfg, &common.out, svg)?;
            eprintln!(
                "{}: {} steps, explored {:.3}, {} collisions, ended by {}",
                r.map_id,
                r.steps,
                r.explored_ratio,
                r.collisions,
                r.termination.as_str()
            );
        }
        Command::Batch { common, maps_dir, parallel } => {
            let extra: Vec<String> = parallel.map(|p| format!("parallel={p}")).into_iter().collect();
            let cfg = load(&common, &extra)?;
            let source = match maps_dir {
                Some(d) => MapSource::Dir(d),
                None if !cfg.maps.is_empty() => MapSource::Files(cfg.maps.clone()),
                None => MapSource::Bundled,
            };
            let out = commands::batch(&cfg, &source, &common.out)?;
            let s = &out.summary;
            eprintln!(
                "{} episodes ({} failed), mean explored {:.3}, {} collisions in {} steps",
                s.episodes,
                s.failed,
                s.mean_explored_ratio.unwrap_or(0.0),
                s.total_collisions,
                s.total_steps
            );
        }
        Command::Plot { report, out } => {
            let svg = commands::plot(&report)?;
            match out {
                Some(p) => std::fs::write(&p, svg).map_err(|e| CliError::Setup(format!("cannot write {}: {e}", p.display())))?,
                None => print!("{svg}"),
            }
        }
        Command::Selftest => {
            let (lines, ok) = commands::selftest();
            for l in lines {
                println!("{l}");
            }
            if !ok {
                return Err(CliError::Setup("selftest failed".into()));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
