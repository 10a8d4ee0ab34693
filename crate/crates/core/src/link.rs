//! SINR algebra of the two-phase amplify-and-forward link.
//!
//! Phase 1: the source beams its data to the relay while the destination
//! jams. Phase 2: the relay forwards with gain `G_r` while the source jams
//! from one antenna; the destination cancels its own jamming.
//!
//! Rates are in bits per channel use (base-2 logarithms).

use crate::channel::SystemParams;
use crate::error::{invalid, Error, Result};

/// Fractions of `P` spent on information in each phase.
///
/// `rho` goes to the source data in phase 1 (the destination jams with
/// `1 - rho`); `xi` goes to source jamming in phase 2 (the relay forwards with
/// `1 - xi`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerSplit {
    pub rho: f64,
    pub xi: f64,
}

impl PowerSplit {
    pub fn new(rho: f64, xi: f64) -> Result<Self> {
        let s = Self { rho, xi };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.rho) {
            return Err(invalid("rho", format!("{} is not in [0, 1]", self.rho)));
        }
        if !(0.0..=1.0).contains(&self.xi) {
            return Err(invalid("xi", format!("{} is not in [0, 1]", self.xi)));
        }
        Ok(())
    }
}

/// Whether the source transmits in the current slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hypothesis {
    /// Source silent.
    Idle,
    /// Source transmitting.
    Active,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SinrMode {
    /// Full expressions including receiver noise.
    Exact,
    /// Noise terms dropped; the form the optimizer works with.
    HighSnr,
}

/// Instantaneous link SNRs of the selected relay.
///
/// `gamma_sr = P ||w^H h_sr||^2 / sigma^2` with MRT toward the relay and
/// `gamma_rd = P |h_rd|^2 / sigma^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGains {
    pub gamma_sr: f64,
    pub gamma_rd: f64,
}

impl LinkGains {
    pub fn new(gamma_sr: f64, gamma_rd: f64) -> Result<Self> {
        if !(gamma_sr >= 0.0) || !(gamma_rd >= 0.0) {
            return Err(invalid("gains", "SNRs must be non-negative"));
        }
        Ok(Self { gamma_sr, gamma_rd })
    }

    /// Builds the gains from raw squared channel magnitudes:
    /// `bf_gain = ||w^H h_sr||^2` and `rd_gain = |h_rd|^2`.
    pub fn from_channel_gains(params: &SystemParams, bf_gain: f64, rd_gain: f64) -> Self {
        Self {
            gamma_sr: params.power * bf_gain / params.noise,
            gamma_rd: params.power * rd_gain / params.noise,
        }
    }

    /// `varsigma = gamma_sr / gamma_rd`.
    pub fn varsigma(&self) -> f64 {
        self.gamma_sr / self.gamma_rd
    }
}

/// Raw quantities entering the relay's amplification factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelayInput {
    pub power: f64,
    pub noise: f64,
    /// `||w^H h_sr||^2`.
    pub bf_gain: f64,
    /// `|h_rd|^2`.
    pub rd_gain: f64,
}

/// Amplification factor `G_r` that normalizes the relay's received power to
/// `(1 - xi) P`.
pub fn amplification_factor(
    split: PowerSplit,
    input: &RelayInput,
    hypothesis: Hypothesis,
) -> Result<f64> {
    if split.xi > 1.0 {
        return Err(invalid("xi", "relay power would be negative"));
    }
    split.validate()?;
    let jam = (1.0 - split.rho) * input.power * input.rd_gain;
    let received = match hypothesis {
        Hypothesis::Idle => jam + input.noise,
        Hypothesis::Active => split.rho * input.power * input.bf_gain + jam + input.noise,
    };
    if !(received > 0.0) {
        return Err(invalid("noise", "relay received power must be positive"));
    }
    Ok(((1.0 - split.xi) * input.power / received).sqrt())
}

/// SINR at the destination under the active hypothesis.
pub fn sinr_destination(split: PowerSplit, gains: &LinkGains, mode: SinrMode) -> Result<f64> {
    split.validate()?;
    let PowerSplit { rho, xi } = split;
    let (num, den) = match mode {
        SinrMode::Exact => (
            rho * gains.gamma_sr * gains.gamma_rd * (1.0 - xi),
            rho * gains.gamma_sr + (2.0 - rho - xi) * gains.gamma_rd + 1.0,
        ),
        SinrMode::HighSnr => {
            let vs = gains.varsigma();
            (
                rho * vs * gains.gamma_rd * (1.0 - xi),
                rho * vs + 2.0 - rho - xi,
            )
        }
    };
    if num == 0.0 {
        return Ok(0.0);
    }
    if !(den > 0.0) {
        return Err(invalid("split", format!("destination SINR denominator {den} <= 0")));
    }
    Ok(num / den)
}

/// SINR at the untrusted relay under the active hypothesis.
///
/// In high-SNR mode `rho = 1` (no destination jamming) returns `+inf`.
pub fn sinr_relay(split: PowerSplit, gains: &LinkGains, mode: SinrMode) -> Result<f64> {
    split.validate()?;
    let rho = split.rho;
    if rho == 0.0 {
        return Ok(0.0);
    }
    Ok(match mode {
        SinrMode::Exact => rho * gains.gamma_sr / ((1.0 - rho) * gains.gamma_rd + 1.0),
        SinrMode::HighSnr => {
            if rho == 1.0 {
                f64::INFINITY
            } else {
                rho * gains.varsigma() / (1.0 - rho)
            }
        }
    })
}

/// `(gamma_D, gamma_R)` for either hypothesis; both vanish when idle.
pub fn sinrs(
    split: PowerSplit,
    gains: &LinkGains,
    mode: SinrMode,
    hypothesis: Hypothesis,
) -> Result<(f64, f64)> {
    match hypothesis {
        Hypothesis::Idle => {
            split.validate()?;
            Ok((0.0, 0.0))
        }
        Hypothesis::Active => Ok((
            sinr_destination(split, gains, mode)?,
            sinr_relay(split, gains, mode)?,
        )),
    }
}

/// `(pr_t / 2) [log2(1 + gamma_d) - log2(1 + gamma_e)]`, optionally clamped
/// at zero.
pub fn secrecy_rate_from_sinrs(gamma_d: f64, gamma_e: f64, pr_t: f64, clamp: bool) -> f64 {
    let raw = 0.5 * pr_t * ((1.0 + gamma_d).log2() - (1.0 + gamma_e).log2());
    if clamp {
        raw.max(0.0)
    } else {
        raw
    }
}

/// Two-hop secrecy rate. The unclamped high-SNR value is the optimizer's
/// objective; reported rates use [`SinrMode::Exact`] with `clamp = true`.
pub fn secrecy_rate(
    split: PowerSplit,
    gains: &LinkGains,
    pr_t: f64,
    mode: SinrMode,
    clamp: bool,
) -> Result<f64> {
    let gd = sinr_destination(split, gains, mode)?;
    let gr = sinr_relay(split, gains, mode)?;
    Ok(secrecy_rate_from_sinrs(gd, gr, pr_t, clamp))
}

// ---------------------------------------------------------------------------
// Multi-relay leakage
// ---------------------------------------------------------------------------

/// SNRs linking the selected relay `i` and a non-selected relay `j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelayPairGains {
    /// `P ||h_si||^2 / sigma^2` (MRT toward `i`).
    pub gamma_si: f64,
    /// `P |h_id|^2 / sigma^2`.
    pub gamma_id: f64,
    /// `P |w_i^H h_sj|^2 / sigma^2`: the beam aimed at `i` as heard by `j`.
    pub gamma_sj_bf: f64,
    /// `P |h_jd|^2 / sigma^2`.
    pub gamma_jd: f64,
    /// `P |h_ij|^2 / sigma^2`.
    pub gamma_ij: f64,
    /// `P |h_sj|^2 / sigma^2` on the single jamming antenna.
    pub gamma_sj: f64,
}

/// Leakage to a non-selected relay in both phases, `(phase 1, phase 2)`.
///
/// `mode` applies to phase 1; phase 2 is always the exact expression.
pub fn nonselected_relay_sinrs(
    split: PowerSplit,
    g: &RelayPairGains,
    mode: SinrMode,
) -> Result<(f64, f64)> {
    split.validate()?;
    let PowerSplit { rho, xi } = split;
    let phase1 = if rho == 0.0 {
        0.0
    } else {
        match mode {
            SinrMode::Exact => rho * g.gamma_sj_bf / ((1.0 - rho) * g.gamma_jd + 1.0),
            SinrMode::HighSnr => {
                if rho == 1.0 {
                    f64::INFINITY
                } else {
                    rho * (g.gamma_sj_bf / g.gamma_jd) / (1.0 - rho)
                }
            }
        }
    };
    let num = rho * g.gamma_si * g.gamma_ij * (1.0 - xi);
    let phase2 = if num == 0.0 {
        0.0
    } else {
        num / ((1.0 - xi) * g.gamma_ij * (1.0 + (1.0 - rho) * g.gamma_id)
            + (xi * g.gamma_sj + 1.0) * (rho * g.gamma_si + (1.0 - rho) * g.gamma_id + 1.0))
    };
    Ok((phase1, phase2))
}

/// Largest SINR among all eavesdropping relays in both phases.
pub fn leakage_max(sinrs: &[f64]) -> Result<f64> {
    sinrs
        .iter()
        .copied()
        .reduce(f64::max)
        .ok_or(Error::Empty("relay"))
}
