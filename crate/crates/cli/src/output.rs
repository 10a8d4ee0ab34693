//! CSV output of sweep results.

use std::io::Write;
use std::path::Path;

use crate::error::{CliError, Result};
use crate::experiment::SweepResult;

pub const HEADER: [&str; 16] = [
    "sweep_var",
    "sweep_value",
    "scheme",
    "willie_model",
    "W",
    "J",
    "N_s",
    "epsilon",
    "ergodic_rate_bits",
    "std_err",
    "mean_rho",
    "mean_xi",
    "feasible_frac",
    "trials",
    "seed",
    "wall_ms",
];

/// Fixed-width scientific notation so reruns compare byte for byte.
fn float(x: f64) -> String {
    format!("{x:.16e}")
}

fn record(r: &SweepResult) -> [String; 16] {
    [
        r.sweep_var.clone(),
        float(r.sweep_value),
        r.scheme.to_string(),
        r.willie_model.to_string(),
        r.willies.to_string(),
        r.relays.to_string(),
        r.antennas.to_string(),
        float(r.epsilon),
        float(r.ergodic_rate),
        float(r.std_err),
        float(r.mean_rho),
        float(r.mean_xi),
        float(r.feasible_frac),
        r.trials.to_string(),
        r.seed.to_string(),
        r.wall_ms.to_string(),
    ]
}

/// Writes the header and one row per result.
pub fn write_csv<W: Write>(results: &[SweepResult], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for r in results {
        w.write_record(record(r))?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Writes `results` to `path`, creating parent directories.
pub fn emit_csv(results: &[SweepResult], path: &Path) -> Result<()> {
    let io = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io)?;
    }
    let file = std::fs::File::create(path).map_err(io)?;
    write_csv(results, std::io::BufWriter::new(file))
}
