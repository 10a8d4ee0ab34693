//! Monte Carlo ergodic-rate evaluation.
//!
//! Every trial owns a seed derived from the master seed and its index.
//! Geometry and channels come from separate sub-streams, one per node, so
//! relay `j` sees the same position and channels whatever the relay count:
//! sweeps over `J` and `W` then compare common random numbers.

use std::time::Instant;

use covrelay::allocation::{
    colluding_allocation_worst, sca_optimize, select_relay_exhaustive, select_relay_suboptimal,
    AllocationResult, RelayCandidate, ScaConfig,
};
use covrelay::channel::{
    complex_gaussian, complex_gaussian_vector, derive_seed, inner, link_variances, mrt_weights,
    norm_sqr, seeded_rng, CVector, LinkVariances, Point, SystemParams, Topology, WillieLinks,
    MIN_NODE_DISTANCE,
};
use covrelay::direct::{direct_optimize, DirectChannels, DirectConfig};
use covrelay::link::{
    leakage_max, nonselected_relay_sinrs, secrecy_rate_from_sinrs, sinr_destination, sinr_relay,
    LinkGains, PowerSplit, RelayPairGains, SinrMode,
};
use covrelay::numeric::{mean_and_std_err, pairwise_sum};
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::config::{ExperimentConfig, Scheme, Selection, WillieModel};
use crate::error::Result;

/// Nodes scattered around a site are drawn uniformly in a disk this wide.
pub const SCATTER_RADIUS: f64 = 1.0;

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "COVRELAY_THREADS";

const STREAM_RELAY_POS: u64 = 1 << 20;
const STREAM_WILLIE_POS: u64 = 2 << 20;
const STREAM_RELAY_CH: u64 = 3 << 20;
const STREAM_PAIR_CH: u64 = 4 << 20;
const STREAM_SD: u64 = 5 << 20;

/// Outcome of one channel realization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    /// Exact, clamped secrecy rate; zero when the covert box is empty.
    pub rate: f64,
    pub rho: f64,
    /// Phase-2 jamming fraction; zero for the single-phase direct scheme.
    pub xi: f64,
    pub feasible: bool,
    /// Index of the relay carrying the data (two-hop schemes).
    pub relay: usize,
}

/// Aggregate over all trials at one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub sweep_var: String,
    pub sweep_value: f64,
    pub scheme: Scheme,
    pub willie_model: WillieModel,
    pub willies: usize,
    pub relays: usize,
    pub antennas: usize,
    pub epsilon: f64,
    pub ergodic_rate: f64,
    /// Standard error of `ergodic_rate`.
    pub std_err: f64,
    /// Mean split over feasible trials (NaN if none).
    pub mean_rho: f64,
    pub mean_xi: f64,
    pub feasible_frac: f64,
    pub trials: usize,
    pub seed: u64,
    pub wall_ms: u64,
}

// ---------------------------------------------------------------------------
// Geometry and channels
// ---------------------------------------------------------------------------

fn scatter(rng: &mut impl Rng, centre: Point, placed: &[Point]) -> Point {
    loop {
        let r = SCATTER_RADIUS * rng.random::<f64>().sqrt();
        let t = std::f64::consts::TAU * rng.random::<f64>();
        let p = Point::new(centre.x + r * t.cos(), centre.y + r * t.sin());
        if placed.iter().all(|q| q.distance(&p) >= MIN_NODE_DISTANCE) {
            return p;
        }
    }
}

/// Node layout for one trial.
pub fn trial_topology(config: &ExperimentConfig, trial_seed: u64) -> Topology {
    let mut t = Topology::reference();
    let site = Point::new(t.source.x + config.d_sr, 0.0);
    t.relays = match config.scheme {
        // A lone untrusted relay in the direct scheme sits where the two-hop
        // relay would, so the two schemes share a geometry.
        Scheme::TwoHop => vec![site],
        Scheme::Direct if config.relays == 1 => vec![site],
        _ => {
            let mut placed = Vec::with_capacity(config.relays);
            for j in 0..config.relays {
                let mut rng = seeded_rng(derive_seed(trial_seed, STREAM_RELAY_POS + j as u64));
                let p = scatter(&mut rng, site, &placed);
                placed.push(p);
            }
            placed
        }
    };
    let centre = t.willies[0];
    t.willies = match config.willie_model {
        WillieModel::Single => vec![centre],
        // Colluding Willies occupy the same positions as non-colluding ones;
        // the allocation pools copies of the worst of them.
        WillieModel::NonColluding | WillieModel::Colluding => {
            let mut placed = Vec::with_capacity(config.willies);
            for w in 0..config.willies {
                let mut rng = seeded_rng(derive_seed(trial_seed, STREAM_WILLIE_POS + w as u64));
                let p = scatter(&mut rng, centre, &placed);
                placed.push(p);
            }
            placed
        }
    };
    t
}

/// Link variances for one trial.
pub fn trial_variances(config: &ExperimentConfig, trial_seed: u64) -> Result<LinkVariances> {
    Ok(link_variances(
        &trial_topology(config, trial_seed),
        config.params.path_loss_exp,
    )?)
}

/// Instantaneous channels that the rates depend on. Willie channels never
/// enter a rate: covertness is set by the path-loss statistics alone.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialChannels {
    pub h_sd: CVector,
    pub h_sr: Vec<CVector>,
    pub h_rd: Vec<Complex64>,
    /// Reciprocal relay-relay channels, zero diagonal.
    pub h_rr: Vec<Vec<Complex64>>,
}

pub fn trial_channels(v: &LinkVariances, antennas: usize, trial_seed: u64) -> TrialChannels {
    let mut rng = seeded_rng(derive_seed(trial_seed, STREAM_SD));
    let h_sd = complex_gaussian_vector(&mut rng, antennas, v.sd);
    let mut h_sr = Vec::with_capacity(v.relays());
    let mut h_rd = Vec::with_capacity(v.relays());
    for j in 0..v.relays() {
        let mut rng = seeded_rng(derive_seed(trial_seed, STREAM_RELAY_CH + j as u64));
        h_sr.push(complex_gaussian_vector(&mut rng, antennas, v.sr[j]));
        h_rd.push(complex_gaussian(&mut rng, v.rd[j]));
    }
    let j = v.relays();
    let mut h_rr = vec![vec![Complex64::new(0.0, 0.0); j]; j];
    for a in 0..j {
        for b in a + 1..j {
            // Pair index independent of J keeps pairs stable across sweeps.
            let pair = (b * (b - 1) / 2 + a) as u64;
            let mut rng = seeded_rng(derive_seed(trial_seed, STREAM_PAIR_CH + pair));
            let h = complex_gaussian(&mut rng, v.rr[a][b]);
            h_rr[a][b] = h;
            h_rr[b][a] = h;
        }
    }
    TrialChannels { h_sd, h_sr, h_rd, h_rr }
}

// ---------------------------------------------------------------------------
// Schemes
// ---------------------------------------------------------------------------

fn relay_gains(p: &SystemParams, ch: &TrialChannels, i: usize) -> LinkGains {
    LinkGains::from_channel_gains(p, norm_sqr(&ch.h_sr[i]), ch.h_rd[i].norm_sqr())
}

fn allocate(
    config: &ExperimentConfig,
    links: &[WillieLinks],
    gains: &LinkGains,
) -> Result<AllocationResult> {
    let sca = ScaConfig::default();
    Ok(match config.willie_model {
        WillieModel::Colluding => colluding_allocation_worst(&config.params, links, gains, &sca)?,
        _ => sca_optimize(&config.params, links, gains, &sca)?,
    })
}

/// Largest eavesdropping SINR when relay `i` carries the data: `i` itself in
/// phase 1 and every other relay in both phases.
pub fn multi_relay_leakage(
    p: &SystemParams,
    ch: &TrialChannels,
    i: usize,
    split: PowerSplit,
) -> Result<f64> {
    let snr = |g: f64| p.power * g / p.noise;
    let gains_i = relay_gains(p, ch, i);
    let mut all = vec![sinr_relay(split, &gains_i, SinrMode::Exact)?];
    let w_i = mrt_weights(&ch.h_sr[i])?;
    for j in (0..ch.h_sr.len()).filter(|&j| j != i) {
        let pair = RelayPairGains {
            gamma_si: gains_i.gamma_sr,
            gamma_id: gains_i.gamma_rd,
            gamma_sj_bf: snr(inner(&w_i, &ch.h_sr[j]).norm_sqr()),
            gamma_jd: snr(ch.h_rd[j].norm_sqr()),
            gamma_ij: snr(ch.h_rr[i][j].norm_sqr()),
            // The source jams from its first antenna in phase 2.
            gamma_sj: snr(ch.h_sr[j][0].norm_sqr()),
        };
        let (p1, p2) = nonselected_relay_sinrs(split, &pair, SinrMode::Exact)?;
        all.push(p1);
        all.push(p2);
    }
    Ok(leakage_max(&all)?)
}

fn outcome(result: &AllocationResult, rate: f64, relay: usize) -> TrialOutcome {
    TrialOutcome {
        rate: if result.feasible { rate } else { 0.0 },
        rho: result.split.rho,
        xi: result.split.xi,
        feasible: result.feasible,
        relay,
    }
}

/// Runs the configured scheme on trial `index`.
pub fn simulate_trial(config: &ExperimentConfig, index: u64) -> Result<TrialOutcome> {
    let seed = derive_seed(config.master_seed, index);
    let v = trial_variances(config, seed)?;
    let ch = trial_channels(&v, config.params.antennas, seed);
    let p = &config.params;
    match config.scheme {
        Scheme::TwoHop => {
            let gains = relay_gains(p, &ch, 0);
            let r = allocate(config, &v.willie_links(0), &gains)?;
            Ok(outcome(&r, r.rate, 0))
        }
        Scheme::TwoHopMultiRelay => {
            let (i, r) = match config.selection {
                Selection::Suboptimal => {
                    let rd: Vec<f64> = ch.h_rd.iter().map(|h| h.norm_sqr()).collect();
                    let i = select_relay_suboptimal(&rd)?;
                    (i, allocate(config, &v.willie_links(i), &relay_gains(p, &ch, i))?)
                }
                Selection::Exhaustive if config.willie_model != WillieModel::Colluding => {
                    let candidates: Vec<RelayCandidate> = (0..v.relays())
                        .map(|i| RelayCandidate {
                            gains: relay_gains(p, &ch, i),
                            willies: v.willie_links(i),
                        })
                        .collect();
                    select_relay_exhaustive(&candidates, p, &ScaConfig::default())?
                }
                Selection::Exhaustive => {
                    let mut best: Option<(usize, AllocationResult)> = None;
                    for i in 0..v.relays() {
                        let r = allocate(config, &v.willie_links(i), &relay_gains(p, &ch, i))?;
                        if best.as_ref().map_or(true, |(_, b)| r.rate > b.rate) {
                            best = Some((i, r));
                        }
                    }
                    best.expect("at least one relay")
                }
            };
            if !r.feasible {
                return Ok(outcome(&r, 0.0, i));
            }
            let gains = relay_gains(p, &ch, i);
            let gd = sinr_destination(r.split, &gains, SinrMode::Exact)?;
            let leak = multi_relay_leakage(p, &ch, i, r.split)?;
            Ok(outcome(&r, secrecy_rate_from_sinrs(gd, leak, p.pr_t, true), i))
        }
        Scheme::Direct => {
            let channels = DirectChannels {
                h_sd: ch.h_sd.clone(),
                h_sj: ch.h_sr.clone(),
            };
            let r = direct_optimize(&channels, p, &DirectConfig::default())?;
            Ok(TrialOutcome {
                rate: r.rate,
                rho: r.rho,
                xi: 0.0,
                feasible: r.feasible,
                relay: 0,
            })
        }
    }
}

// ---------------------------------------------------------------------------
// Aggregation
// ---------------------------------------------------------------------------

/// Worker pool sized by `COVRELAY_THREADS` (rayon's default when unset).
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let threads = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .unwrap_or(0);
    Ok(rayon::ThreadPoolBuilder::new().num_threads(threads).build()?)
}

/// Runs every trial at one sweep point.
///
/// Outcomes are collected in trial order and summed pairwise, so the result
/// does not depend on the thread count.
pub fn run_trials(config: &ExperimentConfig, pool: &rayon::ThreadPool) -> Result<Vec<TrialOutcome>> {
    pool.install(|| {
        (0..config.trials as u64)
            .into_par_iter()
            .map(|i| simulate_trial(config, i))
            .collect()
    })
}

pub fn summarize(config: &ExperimentConfig, value: f64, outcomes: &[TrialOutcome], wall_ms: u64) -> SweepResult {
    let rates: Vec<f64> = outcomes.iter().map(|o| o.rate).collect();
    let (mean, se) = mean_and_std_err(&rates);
    let feasible: Vec<&TrialOutcome> = outcomes.iter().filter(|o| o.feasible).collect();
    let mean_of = |f: fn(&TrialOutcome) -> f64| {
        if feasible.is_empty() {
            f64::NAN
        } else {
            let xs: Vec<f64> = feasible.iter().map(|o| f(o)).collect();
            pairwise_sum(&xs) / xs.len() as f64
        }
    };
    SweepResult {
        sweep_var: config.sweep.var.label().to_string(),
        sweep_value: value,
        scheme: config.scheme,
        willie_model: config.willie_model,
        willies: config.willies,
        relays: config.relays,
        antennas: config.params.antennas,
        epsilon: config.params.epsilon,
        ergodic_rate: mean,
        std_err: se,
        mean_rho: mean_of(|o| o.rho),
        mean_xi: mean_of(|o| o.xi),
        feasible_frac: feasible.len() as f64 / outcomes.len().max(1) as f64,
        trials: outcomes.len(),
        seed: config.master_seed,
        wall_ms,
    }
}

/// Ergodic secrecy rate at one sweep value.
pub fn ergodic_rate(config: &ExperimentConfig, value: f64) -> Result<SweepResult> {
    let point = config.at(value)?;
    let pool = thread_pool()?;
    let start = Instant::now();
    let outcomes = run_trials(&point, &pool)?;
    let wall = if config.timing {
        start.elapsed().as_millis() as u64
    } else {
        0
    };
    Ok(summarize(&point, value, &outcomes, wall))
}

/// Ergodic rate at every sweep value, in order.
pub fn run_sweep(config: &ExperimentConfig) -> Result<Vec<SweepResult>> {
    config.validate()?;
    config
        .sweep
        .values
        .iter()
        .map(|&v| ergodic_rate(config, v))
        .collect()
}
