use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use idiomforge::{run_stage, Config, ForgeError, Stage};

#[derive(Parser, Debug)]
#[command(name = "forge", version, about = "Build idiom triplet datasets and evaluate STS backends")]
struct Cli {
    /// ingest, bronze, silver, gold-merge, augment, enrich, evaluate, stats or sample
    #[arg(value_parser = parse_stage)]
    stage: Stage,
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; defaults to `out` in the config, else its directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Augmentation method: spelling, embed, tfidf-insert or tfidf-replace.
    #[arg(long)]
    aug: Option<String>,
    #[arg(long)]
    rate: Option<f64>,
    #[arg(long)]
    k: Option<usize>,
}

fn parse_stage(s: &str) -> Result<Stage, String> {
    s.parse().map_err(|e: ForgeError| e.to_string())
}

fn configure_threads() -> Result<(), ForgeError> {
    let Ok(value) = std::env::var("FORGE_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| ForgeError::Config(format!("FORGE_THREADS = {value:?} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| ForgeError::Config(e.to_string()))
}

fn run(cli: Cli) -> Result<(), ForgeError> {
    configure_threads()?;
    let mut config = Config::load(&cli.config)?;
    if let Some(seed) = cli.seed {
        config.set("seed", seed);
    }
    if let Some(out) = cli.out {
        let cwd = std::env::current_dir().map_err(|e| ForgeError::io(".", e))?;
        config.set("out", cwd.join(out).display());
    }
    if let Some(aug) = cli.aug {
        config.set("augment.method", aug);
    }
    if let Some(rate) = cli.rate {
        config.set("augment.rate", rate);
    }
    if let Some(k) = cli.k {
        config.set("augment.k", k);
    }
    for m in run_stage(cli.stage, &config)? {
        eprintln!(
            "{}: {} -> {} records, {} ({} ms)",
            m.stage,
            m.records_in,
            m.records_out,
            m.outputs.join(", "),
            m.duration_ms
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("forge: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
