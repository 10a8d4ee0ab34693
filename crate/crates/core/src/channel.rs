//! Network geometry, path-loss variances and seeded Rayleigh channel draws.
//!
//! Every link is circularly-symmetric complex Gaussian with a per-branch
//! variance `mu = d^(-alpha)` (unit reference distance). The source carries
//! `N_s` antennas; relays, the destination and the Willies are single-antenna.
//!
//! Randomness comes from ChaCha20 (`rand_chacha`), which produces the same
//! stream on every platform. Per-trial seeds are derived from a master seed
//! with the SplitMix64 finalizer, so trial `i` of a sweep is reproducible on
//! its own.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::error::{invalid, Error, Result};

pub type CVector = Vec<Complex64>;

/// Nodes closer than this are rejected; `d^-alpha` blows up near zero.
pub const MIN_NODE_DISTANCE: f64 = 0.1;

// ---------------------------------------------------------------------------
// Parameters
// ---------------------------------------------------------------------------

/// Global scalars shared by every scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemParams {
    /// Maximum transmit power per node (W).
    pub power: f64,
    /// Receiver noise variance at relays and destination (W).
    pub noise: f64,
    /// Noise variance at each Willie (W).
    pub willie_noise: f64,
    /// Source antenna count `N_s`.
    pub antennas: usize,
    /// Probability that the source transmits in a slot.
    pub pr_t: f64,
    /// Covertness slack: Willie's error sum must stay above `1 - epsilon`.
    pub epsilon: f64,
    /// Path-loss exponent.
    pub path_loss_exp: f64,
    /// Symbols per slot, used only by the detection Monte Carlo.
    pub n_symbols: usize,
}

impl Default for SystemParams {
    /// P = 10 dBW, noise = -50 dBW at every receiver, pr_t = 0.5, alpha = 4,
    /// N_s = 16, epsilon = 0.1.
    fn default() -> Self {
        Self {
            power: dbw_to_watts(10.0),
            noise: dbw_to_watts(-50.0),
            willie_noise: dbw_to_watts(-50.0),
            antennas: 16,
            pr_t: 0.5,
            epsilon: 0.1,
            path_loss_exp: 4.0,
            n_symbols: 10_000,
        }
    }
}

impl SystemParams {
    pub fn validate(&self) -> Result<()> {
        positive("power", self.power)?;
        positive("noise", self.noise)?;
        positive("willie_noise", self.willie_noise)?;
        positive("path_loss_exp", self.path_loss_exp)?;
        if self.antennas == 0 {
            return Err(invalid("antennas", "need at least one antenna"));
        }
        if self.n_symbols == 0 {
            return Err(invalid("n_symbols", "need at least one symbol per slot"));
        }
        if !(0.0..=1.0).contains(&self.pr_t) {
            return Err(invalid("pr_t", format!("{} is not in [0, 1]", self.pr_t)));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(invalid(
                "epsilon",
                format!("{} is not in (0, 1)", self.epsilon),
            ));
        }
        Ok(())
    }
}

pub fn dbw_to_watts(dbw: f64) -> f64 {
    10f64.powf(dbw / 10.0)
}

pub fn watts_to_dbw(watts: f64) -> f64 {
    10.0 * watts.log10()
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(name, format!("{v} is not a positive finite number")))
    }
}

// ---------------------------------------------------------------------------
// Geometry
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Node positions in meters.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    pub source: Point,
    pub destination: Point,
    pub relays: Vec<Point>,
    pub willies: Vec<Point>,
}

impl Topology {
    /// Source (-5, 0), destination (5, 0), one relay at the origin and one
    /// Willie at (0, -5).
    pub fn reference() -> Self {
        Self {
            source: Point::new(-5.0, 0.0),
            destination: Point::new(5.0, 0.0),
            relays: vec![Point::new(0.0, 0.0)],
            willies: vec![Point::new(0.0, -5.0)],
        }
    }

    fn labelled(&self) -> Vec<(String, Point)> {
        let mut nodes = vec![
            ("source".to_string(), self.source),
            ("destination".to_string(), self.destination),
        ];
        nodes.extend(
            self.relays
                .iter()
                .enumerate()
                .map(|(i, p)| (format!("relay[{i}]"), *p)),
        );
        nodes.extend(
            self.willies
                .iter()
                .enumerate()
                .map(|(i, p)| (format!("willie[{i}]"), *p)),
        );
        nodes
    }

    /// Rejects any pair of nodes closer than [`MIN_NODE_DISTANCE`].
    pub fn validate(&self) -> Result<()> {
        let nodes = self.labelled();
        for (i, (name_a, a)) in nodes.iter().enumerate() {
            for (name_b, b) in &nodes[i + 1..] {
                let d = a.distance(b);
                if !(d >= MIN_NODE_DISTANCE) {
                    return Err(Error::CoincidentNodes {
                        first: name_a.clone(),
                        second: name_b.clone(),
                        distance: d,
                        minimum: MIN_NODE_DISTANCE,
                    });
                }
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Link variances
// ---------------------------------------------------------------------------

/// Variances seen by one Willie, paired with a given relay.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WillieLinks {
    /// Source to Willie (per antenna branch).
    pub sw: f64,
    /// Destination to Willie.
    pub dw: f64,
    /// Relay to Willie.
    pub rw: f64,
}

/// The five per-branch variances of the single relay, single Willie network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HopVariances {
    pub sr: f64,
    pub rd: f64,
    pub sw: f64,
    pub rw: f64,
    pub dw: f64,
}

impl HopVariances {
    pub fn willie(&self) -> WillieLinks {
        WillieLinks {
            sw: self.sw,
            dw: self.dw,
            rw: self.rw,
        }
    }

    pub fn validate(&self) -> Result<()> {
        positive("mu_sr", self.sr)?;
        positive("mu_rd", self.rd)?;
        positive("mu_sw", self.sw)?;
        positive("mu_rw", self.rw)?;
        positive("mu_dw", self.dw)
    }
}

/// Per-branch variances for every link of a topology.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkVariances {
    /// Source to destination (direct scheme).
    pub sd: f64,
    /// Source to relay `j`.
    pub sr: Vec<f64>,
    /// Relay `j` to destination.
    pub rd: Vec<f64>,
    /// Source to Willie `w`.
    pub sw: Vec<f64>,
    /// Destination to Willie `w`.
    pub dw: Vec<f64>,
    /// `rw[j][w]`: relay `j` to Willie `w`.
    pub rw: Vec<Vec<f64>>,
    /// `rr[i][j]`: relay to relay; the diagonal is zero and unused.
    pub rr: Vec<Vec<f64>>,
}

impl LinkVariances {
    /// One relay, one Willie; `sd` is set to `sd`.
    pub fn single(hop: HopVariances, sd: f64) -> Self {
        Self {
            sd,
            sr: vec![hop.sr],
            rd: vec![hop.rd],
            sw: vec![hop.sw],
            dw: vec![hop.dw],
            rw: vec![vec![hop.rw]],
            rr: vec![vec![0.0]],
        }
    }

    pub fn relays(&self) -> usize {
        self.sr.len()
    }

    pub fn willies(&self) -> usize {
        self.sw.len()
    }

    pub fn hop(&self, relay: usize, willie: usize) -> HopVariances {
        HopVariances {
            sr: self.sr[relay],
            rd: self.rd[relay],
            sw: self.sw[willie],
            rw: self.rw[relay][willie],
            dw: self.dw[willie],
        }
    }

    /// All Willies as seen together with `relay`.
    pub fn willie_links(&self, relay: usize) -> Vec<WillieLinks> {
        (0..self.willies())
            .map(|w| WillieLinks {
                sw: self.sw[w],
                dw: self.dw[w],
                rw: self.rw[relay][w],
            })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let j = self.relays();
        let w = self.willies();
        if self.rd.len() != j || self.rw.len() != j || self.rr.len() != j {
            return Err(invalid("variances", "per-relay lists differ in length"));
        }
        if self.dw.len() != w || self.rw.iter().any(|row| row.len() != w) {
            return Err(invalid("variances", "per-Willie lists differ in length"));
        }
        positive("mu_sd", self.sd)?;
        for v in self.sr.iter().chain(&self.rd).chain(&self.sw).chain(&self.dw) {
            positive("mu", *v)?;
        }
        for row in &self.rw {
            for v in row {
                positive("mu_rw", *v)?;
            }
        }
        for (a, row) in self.rr.iter().enumerate() {
            if row.len() != j {
                return Err(invalid("mu_rr", "relay-to-relay matrix is not square"));
            }
            for (b, v) in row.iter().enumerate() {
                if a != b {
                    positive("mu_rr", *v)?;
                }
            }
        }
        Ok(())
    }
}

/// Path-loss variances `mu_xy = d_xy^(-alpha)` for every link of `topology`.
pub fn link_variances(topology: &Topology, alpha: f64) -> Result<LinkVariances> {
    positive("alpha", alpha)?;
    topology.validate()?;
    let mu = |a: &Point, b: &Point| a.distance(b).powf(-alpha);
    let t = topology;
    Ok(LinkVariances {
        sd: mu(&t.source, &t.destination),
        sr: t.relays.iter().map(|r| mu(&t.source, r)).collect(),
        rd: t.relays.iter().map(|r| mu(r, &t.destination)).collect(),
        sw: t.willies.iter().map(|w| mu(&t.source, w)).collect(),
        dw: t.willies.iter().map(|w| mu(&t.destination, w)).collect(),
        rw: t
            .relays
            .iter()
            .map(|r| t.willies.iter().map(|w| mu(r, w)).collect())
            .collect(),
        rr: t
            .relays
            .iter()
            .enumerate()
            .map(|(i, a)| {
                t.relays
                    .iter()
                    .enumerate()
                    .map(|(j, b)| if i == j { 0.0 } else { mu(a, b) })
                    .collect()
            })
            .collect(),
    })
}

// ---------------------------------------------------------------------------
// Random draws
// ---------------------------------------------------------------------------

/// SplitMix64 finalizer applied to `master ^ mix(index)`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
    mix(master ^ mix(index))
}

pub fn seeded_rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// One draw of `CN(0, variance)`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let s = (0.5 * variance).sqrt();
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(s * re, s * im)
}

pub fn complex_gaussian_vector<R: Rng + ?Sized>(rng: &mut R, len: usize, variance: f64) -> CVector {
    (0..len).map(|_| complex_gaussian(rng, variance)).collect()
}

/// One realization of every channel in a topology.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    /// Source to destination, length `N_s`.
    pub h_sd: CVector,
    /// Source to relay `j`, length `N_s` each.
    pub h_sr: Vec<CVector>,
    /// Source to Willie `w`, length `N_s` each.
    pub h_sw: Vec<CVector>,
    pub h_rd: Vec<Complex64>,
    /// `h_rw[j][w]`.
    pub h_rw: Vec<Vec<Complex64>>,
    pub h_dw: Vec<Complex64>,
    /// `h_rr[i][j]`, reciprocal (`h_rr[i][j] == h_rr[j][i]`), zero diagonal.
    pub h_rr: Vec<Vec<Complex64>>,
    pub seed: u64,
}

/// Draws every channel of `variances` from ChaCha20 seeded with `seed`.
pub fn sample_channels(
    variances: &LinkVariances,
    params: &SystemParams,
    seed: u64,
) -> Result<ChannelRealization> {
    variances.validate()?;
    if params.antennas == 0 {
        return Err(invalid("antennas", "need at least one antenna"));
    }
    let mut rng = seeded_rng(seed);
    let mut real = sample_channels_with(variances, params.antennas, &mut rng);
    real.seed = seed;
    Ok(real)
}

/// Same as [`sample_channels`] but draws from a caller-owned generator.
/// Inputs are not validated; `seed` is left at zero.
pub fn sample_channels_with<R: Rng + ?Sized>(
    v: &LinkVariances,
    antennas: usize,
    rng: &mut R,
) -> ChannelRealization {
    let h_sd = complex_gaussian_vector(rng, antennas, v.sd);
    let h_sr = v
        .sr
        .iter()
        .map(|&mu| complex_gaussian_vector(rng, antennas, mu))
        .collect();
    let h_rd = v.rd.iter().map(|&mu| complex_gaussian(rng, mu)).collect();
    let h_sw = v
        .sw
        .iter()
        .map(|&mu| complex_gaussian_vector(rng, antennas, mu))
        .collect();
    let h_dw = v.dw.iter().map(|&mu| complex_gaussian(rng, mu)).collect();
    let h_rw = v
        .rw
        .iter()
        .map(|row| row.iter().map(|&mu| complex_gaussian(rng, mu)).collect())
        .collect();
    let j = v.relays();
    let mut h_rr = vec![vec![Complex64::new(0.0, 0.0); j]; j];
    for a in 0..j {
        for b in a + 1..j {
            let h = complex_gaussian(rng, v.rr[a][b]);
            h_rr[a][b] = h;
            h_rr[b][a] = h;
        }
    }
    ChannelRealization {
        h_sd,
        h_sr,
        h_sw,
        h_rd,
        h_rw,
        h_dw,
        h_rr,
        seed: 0,
    }
}

// ---------------------------------------------------------------------------
// Beamforming
// ---------------------------------------------------------------------------

pub fn norm_sqr(h: &[Complex64]) -> f64 {
    h.iter().map(|c| c.norm_sqr()).sum()
}

/// `a^H b`.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Maximum-ratio transmission weights `w = h / ||h||`.
pub fn mrt_weights(h: &[Complex64]) -> Result<CVector> {
    let n = norm_sqr(h).sqrt();
    if n == 0.0 || !n.is_finite() {
        return Err(Error::ZeroVector);
    }
    Ok(h.iter().map(|c| c / n).collect())
}

/// `|w^H h|^2`.
pub fn beamformed_gain(w: &[Complex64], h: &[Complex64]) -> f64 {
    inner(w, h).norm_sqr()
}

/// Exact leakage toward Willie of a beam matched to `h_sr`:
/// `|h_sr^H h_sw|^2 / ||h_sr||^2`.
pub fn beamformed_leakage(h_sr: &[Complex64], h_sw: &[Complex64]) -> Result<f64> {
    let n2 = norm_sqr(h_sr);
    if n2 == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(inner(h_sr, h_sw).norm_sqr() / n2)
}

/// Large-array proxy `|h_sr^H h_sw|^2 / (N_s mu_sr)`, which replaces the
/// beam norm by its mean.
pub fn lsma_leakage_proxy(h_sr: &[Complex64], h_sw: &[Complex64], mu_sr: f64) -> f64 {
    inner(h_sr, h_sw).norm_sqr() / (h_sr.len() as f64 * mu_sr)
}

/// Mean of the exponential law that approximates the beamformed leakage at a
/// Willie: it is `mu_sw` itself.
pub fn lsma_leakage_variance(mu_sw: f64) -> Result<f64> {
    positive("mu_sw", mu_sw)?;
    Ok(mu_sw)
}

/// Draw from the exponential leakage approximation, mean `mu_sw`.
pub fn sample_lsma_leakage<R: Rng + ?Sized>(mu_sw: f64, rng: &mut R) -> f64 {
    let e: f64 = Exp1.sample(rng);
    mu_sw * e
}

/// Large-array SNR of the source-to-relay beam, `N_s P mu_si / sigma^2`.
pub fn lsma_sinr_si(params: &SystemParams, mu_si: f64) -> Result<f64> {
    positive("mu_si", mu_si)?;
    positive("power", params.power)?;
    positive("noise", params.noise)?;
    Ok(params.antennas as f64 * params.power * mu_si / params.noise)
}
