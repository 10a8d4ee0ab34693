use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use covrelay_cli::{emit_csv, run_preset, run_sweep, write_csv, ExperimentConfig, Preset, Result};

/// Ergodic secrecy rate sweeps for covert two-hop relaying.
#[derive(Debug, Parser)]
#[command(name = "covrelay", version)]
struct Args {
    /// Figure preset (fig3..fig7); other flags override its settings.
    #[arg(long)]
    preset: Option<Preset>,

    /// Flat `key = value` configuration file, applied before flags.
    #[arg(long)]
    config: Option<PathBuf>,

    /// two_hop, two_hop_multi_relay or direct.
    #[arg(long)]
    scheme: Option<String>,

    /// Willie model: single, non_colluding or colluding.
    #[arg(long)]
    willies: Option<String>,

    /// Monte Carlo trials per sweep point.
    #[arg(long)]
    trials: Option<usize>,

    #[arg(long)]
    seed: Option<u64>,

    /// Sweep as `var=start:step:stop` or `var=v1,v2,...`.
    #[arg(long)]
    sweep: Option<String>,

    /// Extra `key=value` settings (repeatable), e.g. `--set W=5`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,

    /// Record wall-clock time per sweep point.
    #[arg(long)]
    timing: bool,

    /// Output CSV; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn overrides(args: &Args) -> Result<Vec<(String, String)>> {
    let mut ov = Vec::new();
    let mut push = |k: &str, v: Option<String>| {
        if let Some(v) = v {
            ov.push((k.to_string(), v));
        }
    };
    push("scheme", args.scheme.clone());
    push("willies", args.willies.clone());
    push("trials", args.trials.map(|t| t.to_string()));
    push("seed", args.seed.map(|s| s.to_string()));
    push("sweep", args.sweep.clone());
    if args.timing {
        push("timing", Some("true".into()));
    }
    for kv in &args.set {
        let (k, v) = kv.split_once('=').ok_or_else(|| {
            covrelay_cli::CliError::Config(format!("--set `{kv}`: expected KEY=VALUE"))
        })?;
        ov.push((k.to_string(), v.to_string()));
    }
    Ok(ov)
}

fn run(args: &Args) -> Result<()> {
    let mut base = ExperimentConfig::default();
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path).map_err(|source| covrelay_cli::CliError::Io {
            path: path.clone(),
            source,
        })?;
        base.apply_file_contents(&text)?;
    }
    let ov = overrides(args)?;
    let results = match args.preset {
        Some(p) => run_preset(p, &base, &ov)?,
        None => {
            for (k, v) in &ov {
                base.set(k, v)?;
            }
            run_sweep(&base)?
        }
    };
    match &args.out {
        Some(path) => emit_csv(&results, path),
        None => write_csv(&results, std::io::stdout().lock()),
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("covrelay: {e}");
            ExitCode::FAILURE
        }
    }
}
