//! Figure presets: each is a list of series sharing one sweep variable.

use std::fmt;
use std::str::FromStr;

use crate::config::{ExperimentConfig, Scheme, Selection, Sweep, SweepVar, WillieModel};
use crate::error::{config_err, CliError, Result};
use crate::experiment::{run_sweep, SweepResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Rate versus transmit power, two-hop against direct.
    Fig3,
    /// Rate versus antenna count at two covertness levels.
    Fig4,
    /// Rate versus relay position along the source-destination line.
    Fig5,
    /// Rate versus relay count, non-colluding Willies.
    Fig6,
    /// Rate versus relay count, colluding against non-colluding Willies.
    Fig7,
}

impl Preset {
    pub const ALL: [Preset; 5] = [Self::Fig3, Self::Fig4, Self::Fig5, Self::Fig6, Self::Fig7];

    pub fn label(self) -> &'static str {
        match self {
            Self::Fig3 => "fig3",
            Self::Fig4 => "fig4",
            Self::Fig5 => "fig5",
            Self::Fig6 => "fig6",
            Self::Fig7 => "fig7",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Preset {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.label() == s.trim())
            .ok_or_else(|| config_err(format!("unknown preset `{s}` (expected fig3..fig7)")))
    }
}

fn series(
    base: &ExperimentConfig,
    scheme: Scheme,
    model: WillieModel,
    var: SweepVar,
    values: &[f64],
) -> ExperimentConfig {
    ExperimentConfig {
        scheme,
        willie_model: model,
        selection: Selection::Suboptimal,
        willies: 1,
        relays: 1,
        sweep: Sweep {
            var,
            values: values.to_vec(),
        },
        ..base.clone()
    }
}

/// Series making up `preset`, before overrides. `base` supplies trials,
/// seed and any parameter not fixed by the preset.
pub fn preset_series(preset: Preset, base: &ExperimentConfig) -> Vec<ExperimentConfig> {
    use Scheme::*;
    use WillieModel::*;
    let relays = [1.0, 2.0, 4.0, 8.0];
    match preset {
        Preset::Fig3 => {
            let p = [0.0, 5.0, 10.0, 15.0, 20.0];
            let mut base = base.clone();
            base.params.antennas = 16;
            base.params.epsilon = 0.1;
            vec![
                series(&base, TwoHop, Single, SweepVar::PowerDbw, &p),
                series(&base, Direct, Single, SweepVar::PowerDbw, &p),
            ]
        }
        Preset::Fig4 => [0.01, 0.001]
            .into_iter()
            .map(|eps| {
                let mut s = series(base, TwoHop, Single, SweepVar::Antennas, &[4.0, 8.0, 16.0, 32.0, 64.0]);
                s.params.epsilon = eps;
                s
            })
            .collect(),
        Preset::Fig5 => [16, 64]
            .into_iter()
            .map(|n| {
                let d: Vec<f64> = (2..=9).map(f64::from).collect();
                let mut s = series(base, TwoHop, Single, SweepVar::Dsr, &d);
                s.params.antennas = n;
                s
            })
            .collect(),
        Preset::Fig6 => {
            let mut out: Vec<ExperimentConfig> = [1, 5, 10]
                .into_iter()
                .map(|w| {
                    let mut s = series(base, TwoHopMultiRelay, NonColluding, SweepVar::Relays, &relays);
                    s.willies = w;
                    s
                })
                .collect();
            // The direct covert bound does not depend on the Willies, so one
            // series covers every W.
            out.push(series(base, Direct, Single, SweepVar::Relays, &relays));
            out
        }
        Preset::Fig7 => [5, 10]
            .into_iter()
            .flat_map(|w| {
                [NonColluding, Colluding].into_iter().map(move |m| (w, m))
            })
            .map(|(w, m)| {
                let mut s = series(base, TwoHopMultiRelay, m, SweepVar::Relays, &relays);
                s.willies = w;
                s
            })
            .collect(),
    }
}

/// Runs every series of `preset`, applying `overrides` (`key = value`
/// settings) to each series after the preset's own choices.
pub fn run_preset(
    preset: Preset,
    base: &ExperimentConfig,
    overrides: &[(String, String)],
) -> Result<Vec<SweepResult>> {
    let mut out = Vec::new();
    for mut s in preset_series(preset, base) {
        for (k, v) in overrides {
            s.set(k, v)?;
        }
        out.extend(run_sweep(&s)?);
    }
    Ok(out)
}
