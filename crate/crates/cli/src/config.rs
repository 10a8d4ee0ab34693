//! Experiment configuration: schemes, Willie models, sweeps and the flat
//! `key = value` file format.

use std::fmt;
use std::str::FromStr;

use covrelay::channel::{dbw_to_watts, SystemParams};

use crate::error::{config_err, CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// One relay at a fixed position.
    TwoHop,
    /// `J` relays scattered around the relay site, one selected per slot.
    TwoHopMultiRelay,
    /// Single-phase transmission with null-space jamming; relays eavesdrop.
    Direct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WillieModel {
    Single,
    NonColluding,
    Colluding,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selection {
    /// Strongest relay-destination channel.
    Suboptimal,
    /// Solve for every relay, keep the best.
    Exhaustive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVar {
    /// Transmit power in dBW.
    PowerDbw,
    Antennas,
    /// Source-relay distance along the source-destination line.
    Dsr,
    Relays,
    Willies,
    Epsilon,
}

macro_rules! labelled {
    ($ty:ty { $($variant:ident => $label:literal),+ $(,)? }) => {
        impl $ty {
            pub fn label(self) -> &'static str {
                match self { $(Self::$variant => $label),+ }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.label())
            }
        }

        impl FromStr for $ty {
            type Err = CliError;
            fn from_str(s: &str) -> Result<Self> {
                match s.trim() {
                    $($label => Ok(Self::$variant),)+
                    other => Err(config_err(format!(
                        "unknown {} `{other}` (expected one of: {})",
                        stringify!($ty),
                        [$($label),+].join(", ")
                    ))),
                }
            }
        }
    };
}

labelled!(Scheme {
    TwoHop => "two_hop",
    TwoHopMultiRelay => "two_hop_multi_relay",
    Direct => "direct",
});

labelled!(WillieModel {
    Single => "single",
    NonColluding => "non_colluding",
    Colluding => "colluding",
});

labelled!(Selection {
    Suboptimal => "suboptimal",
    Exhaustive => "exhaustive",
});

labelled!(SweepVar {
    PowerDbw => "P",
    Antennas => "N_s",
    Dsr => "d_sr",
    Relays => "J",
    Willies => "W",
    Epsilon => "epsilon",
});

/// A swept variable and its values.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub var: SweepVar,
    pub values: Vec<f64>,
}

impl Sweep {
    pub fn new(var: SweepVar, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(config_err("sweep has no values"));
        }
        Ok(Self { var, values })
    }
}

impl FromStr for Sweep {
    type Err = CliError;

    /// `var=start:step:stop` (inclusive) or `var=v1,v2,...`.
    fn from_str(s: &str) -> Result<Self> {
        let (var, spec) = s
            .split_once('=')
            .ok_or_else(|| config_err(format!("sweep `{s}` is not `var=start:step:stop`")))?;
        let var: SweepVar = var.parse()?;
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| config_err(format!("sweep value `{t}` is not a number")))
        };
        let values = if spec.contains(':') {
            let parts: Vec<&str> = spec.split(':').collect();
            let [start, step, stop] = parts[..] else {
                return Err(config_err(format!("sweep range `{spec}` needs start:step:stop")));
            };
            let (start, step, stop) = (num(start)?, num(step)?, num(stop)?);
            if !(step > 0.0) || stop < start {
                return Err(config_err(format!("sweep range `{spec}` is empty or unbounded")));
            }
            // Counted rather than accumulated so 0:0.1:1 ends exactly at 1.
            let n = ((stop - start) / step + 1e-9).floor() as usize;
            (0..=n).map(|i| start + step * i as f64).collect()
        } else {
            spec.split(',').map(num).collect::<Result<Vec<_>>>()?
        };
        Sweep::new(var, values)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub scheme: Scheme,
    pub willie_model: WillieModel,
    pub selection: Selection,
    pub params: SystemParams,
    /// Number of Willies `W`.
    pub willies: usize,
    /// Number of relays `J`.
    pub relays: usize,
    /// Source-relay distance; the relay site sits on the source-destination
    /// line.
    pub d_sr: f64,
    pub sweep: Sweep,
    pub trials: usize,
    pub master_seed: u64,
    /// Record wall-clock time in the output (breaks byte-identical reruns).
    pub timing: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            scheme: Scheme::TwoHop,
            willie_model: WillieModel::Single,
            selection: Selection::Suboptimal,
            params: SystemParams::default(),
            willies: 1,
            relays: 1,
            d_sr: 5.0,
            sweep: Sweep {
                var: SweepVar::PowerDbw,
                values: vec![10.0],
            },
            trials: 2000,
            master_seed: 1,
            timing: false,
        }
    }
}

fn whole(var: SweepVar, v: f64) -> Result<usize> {
    if v >= 1.0 && v.fract() == 0.0 && v <= 1e6 {
        Ok(v as usize)
    } else {
        Err(config_err(format!("{var} = {v} must be a positive integer")))
    }
}

impl ExperimentConfig {
    /// Copy of the configuration at one sweep point.
    pub fn at(&self, value: f64) -> Result<Self> {
        let mut c = self.clone();
        match self.sweep.var {
            SweepVar::PowerDbw => c.params.power = dbw_to_watts(value),
            SweepVar::Antennas => c.params.antennas = whole(SweepVar::Antennas, value)?,
            SweepVar::Dsr => c.d_sr = value,
            SweepVar::Relays => c.relays = whole(SweepVar::Relays, value)?,
            SweepVar::Willies => c.willies = whole(SweepVar::Willies, value)?,
            SweepVar::Epsilon => c.params.epsilon = value,
        }
        c.sweep.values = vec![value];
        c.validate_point()?;
        Ok(c)
    }

    /// Checks every sweep point.
    pub fn validate(&self) -> Result<()> {
        if self.sweep.values.is_empty() {
            return Err(config_err("sweep has no values"));
        }
        if self.trials == 0 {
            return Err(config_err("trials must be at least 1"));
        }
        for &v in &self.sweep.values {
            self.at(v)?;
        }
        Ok(())
    }

    fn validate_point(&self) -> Result<()> {
        self.params.validate()?;
        if self.trials == 0 {
            return Err(config_err("trials must be at least 1"));
        }
        if self.willies == 0 || self.relays == 0 {
            return Err(config_err("W and J must be at least 1"));
        }
        if self.willie_model == WillieModel::Single && self.willies != 1 {
            return Err(config_err("the single Willie model needs W = 1"));
        }
        if self.scheme == Scheme::TwoHop && self.relays != 1 {
            return Err(config_err("two_hop uses one relay; use two_hop_multi_relay for J > 1"));
        }
        if self.scheme == Scheme::Direct && self.willie_model == WillieModel::Colluding {
            return Err(config_err(
                "direct transmission is not defined for colluding Willies",
            ));
        }
        if self.scheme == Scheme::Direct && self.params.antennas < 2 {
            return Err(config_err("direct transmission needs N_s >= 2 for null-space jamming"));
        }
        if !(self.d_sr > 0.0 && self.d_sr < 10.0) {
            return Err(config_err(format!(
                "d_sr = {} must lie strictly between source and destination",
                self.d_sr
            )));
        }
        Ok(())
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        let num = || {
            value
                .parse::<f64>()
                .map_err(|_| config_err(format!("`{key}`: `{value}` is not a number")))
        };
        let count = || {
            value
                .parse::<usize>()
                .map_err(|_| config_err(format!("`{key}`: `{value}` is not a count")))
        };
        match key.trim() {
            "scheme" => self.scheme = value.parse()?,
            "willies" | "willie_model" => self.willie_model = value.parse()?,
            "selection" => self.selection = value.parse()?,
            "W" => self.willies = count()?,
            "J" => self.relays = count()?,
            "N_s" | "antennas" => self.params.antennas = count()?,
            "epsilon" => self.params.epsilon = num()?,
            "P" | "power_dbw" => self.params.power = dbw_to_watts(num()?),
            "noise_dbw" => self.params.noise = dbw_to_watts(num()?),
            "willie_noise_dbw" => self.params.willie_noise = dbw_to_watts(num()?),
            "pr_t" => self.params.pr_t = num()?,
            "alpha" => self.params.path_loss_exp = num()?,
            "d_sr" => self.d_sr = num()?,
            "trials" => self.trials = count()?,
            "seed" => {
                self.master_seed = value
                    .parse()
                    .map_err(|_| config_err(format!("seed `{value}` is not a u64")))?
            }
            "sweep" => self.sweep = value.parse()?,
            "timing" => {
                self.timing = value
                    .parse()
                    .map_err(|_| config_err(format!("timing `{value}` is not true/false")))?
            }
            other => return Err(config_err(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Applies a flat `key = value` file; `#` starts a comment.
    pub fn apply_file_contents(&mut self, text: &str) -> Result<()> {
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| config_err(format!("line {}: expected key = value", n + 1)))?;
            // `sweep = P=0:5:20` keeps its inner `=`.
            self.set(k, v)
                .map_err(|e| config_err(format!("line {}: {e}", n + 1)))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_ranges_are_inclusive() {
        let s: Sweep = "P=0:5:20".parse().unwrap();
        assert_eq!(s.var, SweepVar::PowerDbw);
        assert_eq!(s.values, vec![0.0, 5.0, 10.0, 15.0, 20.0]);
        let s: Sweep = "epsilon=0.1:0.1:0.5".parse().unwrap();
        assert_eq!(s.values.len(), 5);
        let s: Sweep = "J=1,2,4,8".parse().unwrap();
        assert_eq!(s.values, vec![1.0, 2.0, 4.0, 8.0]);
        assert!("P=0:0:5".parse::<Sweep>().is_err());
        assert!("Q=1:1:2".parse::<Sweep>().is_err());
        assert!("P".parse::<Sweep>().is_err());
    }

    #[test]
    fn dbw_keys_convert() {
        let mut c = ExperimentConfig::default();
        c.set("noise_dbw", "-50").unwrap();
        assert!((c.params.noise - 1e-5).abs() < 1e-20);
        c.set("P", "10").unwrap();
        assert!((c.params.power - 10.0).abs() < 1e-12);
    }

    #[test]
    fn file_format() {
        let mut c = ExperimentConfig::default();
        c.apply_file_contents(
            "# fig 6\nscheme = two_hop_multi_relay\nwillies = non_colluding\nW = 5\n\
             sweep = J=1,2,4\ntrials = 10 # quick\nseed = 42\n",
        )
        .unwrap();
        assert_eq!(c.scheme, Scheme::TwoHopMultiRelay);
        assert_eq!(c.willie_model, WillieModel::NonColluding);
        assert_eq!((c.willies, c.trials, c.master_seed), (5, 10, 42));
        assert_eq!(c.sweep.var, SweepVar::Relays);
        c.validate().unwrap();
        assert!(c.apply_file_contents("bogus = 1").is_err());
        assert!(c.apply_file_contents("scheme").is_err());
    }

    #[test]
    fn unsupported_combinations_are_rejected() {
        let mut c = ExperimentConfig {
            scheme: Scheme::Direct,
            willie_model: WillieModel::Colluding,
            willies: 3,
            ..ExperimentConfig::default()
        };
        assert!(c.validate().is_err());
        c.scheme = Scheme::TwoHop;
        c.relays = 2;
        assert!(c.validate().is_err());
        c.relays = 1;
        c.willie_model = WillieModel::Single;
        assert!(c.validate().is_err());
        c.willies = 1;
        c.validate().unwrap();
        c.trials = 0;
        assert!(c.validate().is_err());
    }
}
