//! Willie's radiometer.
//!
//! Willie averages `n` received symbols per slot and compares the energy to
//! a threshold. With `n` large the average collapses onto its conditional
//! mean, so the only randomness left is block fading: the jamming and signal
//! components arrive as independent exponentials with means `lambda_j` and
//! `lambda_s`. Everything here is stated in terms of those two scales.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Gamma};

use crate::channel::{seeded_rng, SystemParams, WillieLinks};
use crate::error::{invalid, Error, Result};
use crate::link::PowerSplit;
use crate::numeric::{bisect_boundary, q_function};

/// Tolerance of the covert box bisections.
pub const BOUND_TOL: f64 = 1e-9;

/// Relative gap below which two exponential rates count as repeated.
pub const RATE_GAP: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    /// Source to relay, destination jamming.
    One,
    /// Relay to destination, source jamming.
    Two,
}

impl Phase {
    pub fn index(self) -> u8 {
        match self {
            Phase::One => 1,
            Phase::Two => 2,
        }
    }
}

/// Mean received jamming and signal powers at one Willie in one phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseScales {
    pub lambda_j: f64,
    pub lambda_s: f64,
    pub sigma2_w: f64,
    pub phase: Phase,
}

impl PhaseScales {
    pub fn new(lambda_j: f64, lambda_s: f64, sigma2_w: f64, phase: Phase) -> Result<Self> {
        if !(lambda_j > 0.0) || !(lambda_s > 0.0) {
            return Err(Error::DegenerateDetector(format!(
                "phase {} scales must be positive (lambda_j = {lambda_j}, lambda_s = {lambda_s})",
                phase.index()
            )));
        }
        if !(sigma2_w >= 0.0) {
            return Err(invalid("sigma2_w", "noise power must be non-negative"));
        }
        Ok(Self {
            lambda_j,
            lambda_s,
            sigma2_w,
            phase,
        })
    }

    /// `lambda_s / lambda_j`; detection gets easier as this grows.
    pub fn ratio(&self) -> f64 {
        self.lambda_s / self.lambda_j
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionOutcome {
    pub threshold: f64,
    pub p_fa: f64,
    pub p_md: f64,
}

impl DetectionOutcome {
    pub fn error_sum(&self) -> f64 {
        self.p_fa + self.p_md
    }
}

/// Jamming and signal scales seen by a Willie with links `links`.
pub fn phase_scales(
    split: PowerSplit,
    params: &SystemParams,
    links: &WillieLinks,
    phase: Phase,
) -> Result<PhaseScales> {
    split.validate()?;
    let p = params.power;
    let (lj, ls) = match phase {
        Phase::One => ((1.0 - split.rho) * p * links.dw, split.rho * p * links.sw),
        Phase::Two => (split.xi * p * links.sw, (1.0 - split.xi) * p * links.rw),
    };
    PhaseScales::new(lj, ls, params.willie_noise, phase)
}

// ---------------------------------------------------------------------------
// Single Willie
// ---------------------------------------------------------------------------

/// `P(lambda_j E1 + lambda_s E2 > x)` for independent unit exponentials.
///
/// The textbook form `(a e^{-x/a} - b e^{-x/b}) / (a - b)` cancels when the
/// scales are close; there it is rewritten around `expm1`, which also gives
/// the Erlang limit `e^{-x/b}(1 + x/b)` at `a = b` without special casing.
fn two_exp_sf(b: f64, a: f64, x: f64) -> f64 {
    let d = a - b;
    let sf = if d.abs() <= 1e-3 * a.max(b) {
        let t = x / (a * b);
        let core = if d == 0.0 {
            x / b
        } else {
            a * (d * t).exp_m1() / d
        };
        (-x / b).exp() * (1.0 + core)
    } else {
        (a * (-x / a).exp() - b * (-x / b).exp()) / d
    };
    sf.clamp(0.0, 1.0)
}

/// False-alarm and miss-detection probabilities at `threshold`.
pub fn fa_md(scales: &PhaseScales, threshold: f64) -> DetectionOutcome {
    let x = threshold - scales.sigma2_w;
    if !(x > 0.0) {
        return DetectionOutcome {
            threshold,
            p_fa: 1.0,
            p_md: 0.0,
        };
    }
    DetectionOutcome {
        threshold,
        p_fa: (-x / scales.lambda_j).exp(),
        p_md: 1.0 - two_exp_sf(scales.lambda_j, scales.lambda_s, x),
    }
}

/// Threshold minimizing `P_FA + P_MD`.
///
/// `lambda_s ln(1 + d) / d` with `d = lambda_s/lambda_j - 1`; `ln_1p` keeps
/// it accurate as `d -> 0`, where it tends to `lambda`.
pub fn optimal_threshold(scales: &PhaseScales) -> f64 {
    let d = (scales.lambda_s - scales.lambda_j) / scales.lambda_j;
    let shape = if d == 0.0 { 1.0 } else { d.ln_1p() / d };
    scales.lambda_s * shape + scales.sigma2_w
}

/// Willie's best achievable error sum.
pub fn min_error_sum(scales: &PhaseScales) -> f64 {
    fa_md(scales, optimal_threshold(scales)).error_sum()
}

/// Closed-form `min_error_sum`: `1 - r^{-1/(r-1)}` with `r = lambda_s/lambda_j`.
///
/// This is the quantity the covertness constraint is written in. Agreement
/// with [`min_error_sum`] certifies the threshold.
pub fn certificate(scales: &PhaseScales) -> f64 {
    let d = scales.ratio() - 1.0;
    let expo = if d == 0.0 { -1.0 } else { -d.ln_1p() / d };
    -expo.exp_m1()
}

/// Detection without any jamming: noise alone under the null hypothesis.
///
/// Any threshold above `sigma2_w` gives `P_FA = 0`, and `P_MD` vanishes as
/// the threshold approaches `sigma2_w`, so the infimum is zero whenever a
/// signal is present.
pub fn fa_md_unjammed(lambda_s: f64, sigma2_w: f64, threshold: f64) -> DetectionOutcome {
    let x = threshold - sigma2_w;
    if !(x > 0.0) {
        return DetectionOutcome {
            threshold,
            p_fa: 1.0,
            p_md: 0.0,
        };
    }
    let p_md = if lambda_s > 0.0 {
        -(-x / lambda_s).exp_m1()
    } else {
        1.0
    };
    DetectionOutcome {
        threshold,
        p_fa: 0.0,
        p_md,
    }
}

/// Infimum over thresholds of the unjammed error sum.
pub fn no_jamming_error_sum(lambda_s: f64, _sigma2_w: f64) -> f64 {
    if lambda_s > 0.0 {
        0.0
    } else {
        1.0
    }
}

// ---------------------------------------------------------------------------
// Covert box
// ---------------------------------------------------------------------------

/// Box of power splits meeting the covertness constraint in both phases:
/// `rho <= rho_ub` and `xi >= xi_lb`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovertBox {
    pub rho_ub: f64,
    pub xi_lb: f64,
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0) || epsilon.is_nan() {
        return Err(invalid("epsilon", format!("{epsilon} must be positive")));
    }
    Ok(())
}

/// Largest `rho` keeping phase 1 covert against a Willie with links `links`.
///
/// `min_error_sum` falls monotonically in `rho`, so the boundary is found by
/// bisection on the exact certificate.
pub fn rho_upper_bound(params: &SystemParams, links: &WillieLinks, epsilon: f64) -> Result<f64> {
    check_epsilon(epsilon)?;
    if epsilon >= 1.0 {
        return Ok(1.0);
    }
    let target = 1.0 - epsilon;
    let covert = |rho: f64| {
        let split = PowerSplit { rho, xi: 0.5 };
        phase_scales(split, params, links, Phase::One)
            .map(|s| min_error_sum(&s) >= target)
            .unwrap_or(false)
    };
    let (good, _) = bisect_boundary(covert, 0.0, 1.0, BOUND_TOL);
    if good <= 0.0 {
        return Err(Error::Infeasible { phase: 1 });
    }
    Ok(good)
}

/// Smallest `xi` keeping phase 2 covert.
pub fn xi_lower_bound(params: &SystemParams, links: &WillieLinks, epsilon: f64) -> Result<f64> {
    check_epsilon(epsilon)?;
    if epsilon >= 1.0 {
        return Ok(0.0);
    }
    let target = 1.0 - epsilon;
    let covert = |xi: f64| {
        let split = PowerSplit { rho: 0.5, xi };
        phase_scales(split, params, links, Phase::Two)
            .map(|s| min_error_sum(&s) >= target)
            .unwrap_or(false)
    };
    let (good, _) = bisect_boundary(covert, 1.0, 0.0, BOUND_TOL);
    if good >= 1.0 {
        return Err(Error::Infeasible { phase: 2 });
    }
    Ok(good)
}

/// Covert box against a single Willie.
pub fn covert_box_bounds(
    params: &SystemParams,
    links: &WillieLinks,
    epsilon: f64,
) -> Result<CovertBox> {
    Ok(CovertBox {
        rho_ub: rho_upper_bound(params, links, epsilon)?,
        xi_lb: xi_lower_bound(params, links, epsilon)?,
    })
}

/// Indices of the most dangerous Willie in each phase.
///
/// Phase 1 is decided by `mu_sw / mu_dw` and phase 2 by `mu_rw / mu_sw`; the
/// lowest index wins ties.
pub fn worst_willie(links: &[WillieLinks]) -> Result<(usize, usize)> {
    if links.is_empty() {
        return Err(Error::Empty("Willie"));
    }
    let argmax = |key: &dyn Fn(&WillieLinks) -> f64| {
        let mut best = 0;
        for (i, l) in links.iter().enumerate().skip(1) {
            if key(l) > key(&links[best]) {
                best = i;
            }
        }
        best
    };
    Ok((argmax(&|l| l.sw / l.dw), argmax(&|l| l.rw / l.sw)))
}

/// Covert box against several non-colluding Willies: each phase is bounded by
/// its worst Willie.
pub fn covert_box_worst(
    params: &SystemParams,
    links: &[WillieLinks],
    epsilon: f64,
) -> Result<CovertBox> {
    let (w1, w2) = worst_willie(links)?;
    Ok(CovertBox {
        rho_ub: rho_upper_bound(params, &links[w1], epsilon)?,
        xi_lb: xi_lower_bound(params, &links[w2], epsilon)?,
    })
}

// ---------------------------------------------------------------------------
// Colluding Willies: exact
// ---------------------------------------------------------------------------

fn check_distinct(rates: &[f64]) -> Result<()> {
    for (i, &a) in rates.iter().enumerate() {
        if !(a > 0.0) || !a.is_finite() {
            return Err(invalid("rate", format!("{a} must be positive and finite")));
        }
        for &b in &rates[i + 1..] {
            if (a - b).abs() <= RATE_GAP * a.max(b) {
                return Err(Error::RepeatedRates(a, b));
            }
        }
    }
    Ok(())
}

/// Survival function of a sum of independent exponentials with the given
/// (pairwise distinct) rates.
///
/// Equal in value to `sum_j e^{-tau_j x} prod_{k != j} tau_k / (tau_k - tau_j)`,
/// but that alternating sum loses every digit once a few dozen rates are
/// involved. It is evaluated instead by uniformizing the phase-type chain:
/// a Poisson mixture of non-negative terms, accurate to a few ulp.
pub fn hypoexponential_sf(rates: &[f64], x: f64) -> Result<f64> {
    if rates.is_empty() {
        return Err(Error::Empty("rate"));
    }
    check_distinct(rates)?;
    if !(x > 0.0) {
        return Ok(1.0);
    }
    Ok(phase_type_sf(rates, x))
}

fn phase_type_sf(rates: &[f64], x: f64) -> f64 {
    let lam = rates.iter().copied().fold(0.0, f64::max);
    let stay: Vec<f64> = rates.iter().map(|r| 1.0 - r / lam).collect();
    let step: Vec<f64> = rates.iter().map(|r| r / lam).collect();
    let m = lam * x;
    let n = rates.len();

    // Occupation probabilities of the discrete chain after k jumps.
    let mut occ = vec![0.0; n];
    occ[0] = 1.0;
    let mut alive = 1.0;

    // Poisson weights in log space so large `m` cannot underflow the start.
    let mut log_w = -m;
    let mut total = 0.0;
    let mut k = 0usize;
    let k_max = (m + 40.0 * m.sqrt() + 100.0) as usize;
    while k <= k_max {
        total += (log_w).exp() * alive;
        if alive < 1e-300 {
            break;
        }
        for i in (0..n).rev() {
            let inflow = if i > 0 { occ[i - 1] * step[i - 1] } else { 0.0 };
            occ[i] = occ[i] * stay[i] + inflow;
        }
        alive = occ.iter().sum();
        k += 1;
        log_w += m.ln() - (k as f64).ln();
        if k as f64 > m && log_w.exp() * alive < 1e-18 * total {
            break;
        }
    }
    total.clamp(0.0, 1.0)
}

/// Exact fusion-center detection with per-Willie jamming scales `jam` and
/// signal scales `sig`.
///
/// The null-hypothesis energy is a sum of `W` exponentials and the
/// alternative a sum of `2W`; all their rates must be pairwise distinct.
pub fn colluding_exact_fa_md(
    jam: &[f64],
    sig: &[f64],
    threshold: f64,
    sigma2_w: f64,
) -> Result<DetectionOutcome> {
    if jam.is_empty() {
        return Err(Error::Empty("Willie"));
    }
    if jam.len() != sig.len() {
        return Err(invalid("scales", "one jamming and one signal scale per Willie"));
    }
    let fa_rates: Vec<f64> = jam.iter().map(|l| 1.0 / l).collect();
    let md_rates: Vec<f64> = fa_rates
        .iter()
        .copied()
        .chain(sig.iter().map(|l| 1.0 / l))
        .collect();
    check_distinct(&md_rates)?;
    let x = threshold - jam.len() as f64 * sigma2_w;
    if !(x > 0.0) {
        return Ok(DetectionOutcome {
            threshold,
            p_fa: 1.0,
            p_md: 0.0,
        });
    }
    Ok(DetectionOutcome {
        threshold,
        p_fa: phase_type_sf(&fa_rates, x),
        p_md: 1.0 - phase_type_sf(&md_rates, x),
    })
}

// ---------------------------------------------------------------------------
// Colluding Willies: Gaussian approximation
// ---------------------------------------------------------------------------

/// Mean and standard deviation of the fused energy under each hypothesis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CltMoments {
    pub mu_fa: f64,
    pub sigma_fa: f64,
    pub mu_md: f64,
    pub sigma_md: f64,
    pub willies: usize,
}

impl CltMoments {
    /// Moments for arbitrary per-Willie scales (sums of exponential means and
    /// variances).
    pub fn from_scales(jam: &[f64], sig: &[f64], sigma2_w: f64) -> Result<Self> {
        if jam.is_empty() {
            return Err(Error::Empty("Willie"));
        }
        if jam.len() != sig.len() {
            return Err(invalid("scales", "one jamming and one signal scale per Willie"));
        }
        let w = jam.len();
        let sj: f64 = jam.iter().sum();
        let ss: f64 = sig.iter().sum();
        let vj: f64 = jam.iter().map(|l| l * l).sum();
        let vs: f64 = sig.iter().map(|l| l * l).sum();
        let noise = w as f64 * sigma2_w;
        Ok(Self {
            mu_fa: sj + noise,
            sigma_fa: vj.sqrt(),
            mu_md: sj + ss + noise,
            sigma_md: (vj + vs).sqrt(),
            willies: w,
        })
    }
}

/// Gaussian moments for `links.len()` i.i.d. Willies.
pub fn clt_moments(
    split: PowerSplit,
    params: &SystemParams,
    links: &[WillieLinks],
    phase: Phase,
) -> Result<CltMoments> {
    let first = links.first().ok_or(Error::Empty("Willie"))?;
    if links.iter().any(|l| l != first) {
        return Err(Error::NonIdenticalWillies);
    }
    let s = phase_scales(split, params, first, phase)?;
    let w = links.len() as f64;
    Ok(CltMoments {
        mu_fa: w * (s.lambda_j + s.sigma2_w),
        sigma_fa: w.sqrt() * s.lambda_j,
        mu_md: w * (s.lambda_s + s.lambda_j + s.sigma2_w),
        sigma_md: w.sqrt() * s.lambda_s.hypot(s.lambda_j),
        willies: links.len(),
    })
}

pub fn clt_fa_md(m: &CltMoments, threshold: f64) -> DetectionOutcome {
    DetectionOutcome {
        threshold,
        p_fa: q_function((threshold - m.mu_fa) / m.sigma_fa),
        p_md: q_function((m.mu_md - threshold) / m.sigma_md),
    }
}

/// Crossing of the two Gaussian densities between the means.
///
/// The quadratic's relevant root is taken in the rationalized form
/// `c / (b - sqrt(D))`, which stays finite as `sigma_md -> sigma_fa` and
/// tends to the midpoint of the means there.
pub fn clt_optimal_threshold(m: &CltMoments) -> Result<f64> {
    if !(m.sigma_fa > 0.0) || !(m.sigma_md > 0.0) {
        return Err(Error::DegenerateDetector("zero CLT spread".into()));
    }
    if m.mu_md < m.mu_fa {
        return Err(invalid("moments", "mu_md must not be below mu_fa"));
    }
    let (sf2, sm2) = (m.sigma_fa * m.sigma_fa, m.sigma_md * m.sigma_md);
    let log_ratio = (m.sigma_md / m.sigma_fa).ln();
    let gap = m.mu_md - m.mu_fa;
    let b = sm2 * m.mu_fa - sf2 * m.mu_md;
    let disc = sf2 * sm2 * (gap * gap + 2.0 * (sm2 - sf2) * log_ratio);
    let c = sm2 * m.mu_fa * m.mu_fa - sf2 * m.mu_md * m.mu_md - 2.0 * sf2 * sm2 * log_ratio;
    let denom = b - disc.max(0.0).sqrt();
    if denom == 0.0 {
        return Ok(0.5 * (m.mu_fa + m.mu_md));
    }
    Ok(c / denom)
}

pub fn clt_min_error_sum(m: &CltMoments) -> Result<f64> {
    Ok(clt_fa_md(m, clt_optimal_threshold(m)?).error_sum())
}

// ---------------------------------------------------------------------------
// Monte Carlo
// ---------------------------------------------------------------------------

/// Stratified unit-exponential draws: one per stratum of `[0, 1)`, shuffled.
fn stratified_exponentials<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n)
        .map(|i| {
            let u = (i as f64 + rng.random::<f64>()) / n as f64;
            -(-u).ln_1p()
        })
        .collect();
    v.shuffle(rng);
    v
}

/// Empirical detection rates of the `n`-symbol radiometer.
///
/// Each trial draws a fresh block-fading gain per transmitter (stratified
/// across trials) and then the average of `n` per-symbol energies, which is
/// exactly `(mean power) * Gamma(n, 1) / n`.
pub fn monte_carlo_detection(
    scales: &PhaseScales,
    n: usize,
    trials: usize,
    threshold: f64,
    seed: u64,
) -> Result<DetectionOutcome> {
    if n == 0 {
        return Err(invalid("n", "at least one symbol"));
    }
    if trials == 0 {
        return Err(invalid("trials", "at least one trial"));
    }
    let mut rng = seeded_rng(seed);
    let avg = Gamma::new(n as f64, 1.0 / n as f64).map_err(|e| invalid("n", e.to_string()))?;
    let g0 = stratified_exponentials(&mut rng, trials);
    let g1 = stratified_exponentials(&mut rng, trials);
    let g2 = stratified_exponentials(&mut rng, trials);

    let mut false_alarms = 0usize;
    let mut misses = 0usize;
    for t in 0..trials {
        let idle = (scales.lambda_j * g0[t] + scales.sigma2_w) * avg.sample(&mut rng);
        if idle > threshold {
            false_alarms += 1;
        }
        let active = (scales.lambda_j * g1[t] + scales.lambda_s * g2[t] + scales.sigma2_w)
            * avg.sample(&mut rng);
        if active <= threshold {
            misses += 1;
        }
    }
    Ok(DetectionOutcome {
        threshold,
        p_fa: false_alarms as f64 / trials as f64,
        p_md: misses as f64 / trials as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::LN_2;

    fn sc(lj: f64, ls: f64, s2: f64) -> PhaseScales {
        PhaseScales::new(lj, ls, s2, Phase::One).unwrap()
    }

    fn grid_min(s: &PhaseScales, hi: f64, n: usize) -> (f64, f64) {
        (1..=n)
            .map(|i| {
                let t = s.sigma2_w + hi * i as f64 / n as f64;
                (t, fa_md(s, t).error_sum())
            })
            .fold((0.0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a })
    }

    #[test]
    fn phase_scale_examples() {
        let params = SystemParams {
            power: 10.0,
            ..SystemParams::default()
        };
        let links = WillieLinks {
            sw: 1.0,
            dw: 1.0,
            rw: 2.0,
        };
        let s = phase_scales(PowerSplit { rho: 0.5, xi: 0.2 }, &params, &links, Phase::One).unwrap();
        assert_eq!((s.lambda_j, s.lambda_s), (5.0, 5.0));
        let s = phase_scales(PowerSplit { rho: 0.5, xi: 0.2 }, &params, &links, Phase::Two).unwrap();
        assert_relative_eq!(s.lambda_j, 2.0, max_relative = 1e-15);
        assert_relative_eq!(s.lambda_s, 16.0, max_relative = 1e-15);

        let a = WillieLinks { sw: 3.0, dw: 7.0, rw: 1.0 };
        let b = WillieLinks { sw: 7.0, dw: 3.0, rw: 1.0 };
        let half = PowerSplit { rho: 0.5, xi: 0.5 };
        let sa = phase_scales(half, &params, &a, Phase::One).unwrap();
        let sb = phase_scales(half, &params, &b, Phase::One).unwrap();
        assert_eq!((sa.lambda_j, sa.lambda_s), (sb.lambda_s, sb.lambda_j));

        let r = phase_scales(PowerSplit { rho: 1.0, xi: 0.5 }, &params, &links, Phase::One);
        assert!(matches!(r, Err(Error::DegenerateDetector(_))));
    }

    #[test]
    fn fa_md_examples() {
        let s = sc(1.0, 2.0, 0.3);
        let o = fa_md(&s, 0.3);
        assert_eq!((o.p_fa, o.p_md), (1.0, 0.0));
        let s = sc(1.0, 2.0, 0.0);
        assert_relative_eq!(fa_md(&s, 2.0 * LN_2).p_fa, 0.25, max_relative = 1e-14);
        let far = fa_md(&s, 1e6);
        assert_eq!((far.p_fa, far.p_md), (0.0, 1.0));
    }

    #[test]
    fn stable_branch_agrees_with_direct_form() {
        for &(b, a, x) in &[(1.0f64, 1.0005f64, 0.7f64), (2.0, 1.999, 3.0), (1.0, 1.0 + 1e-12, 2.0)] {
            let direct = (a * (-x / a).exp() - b * (-x / b).exp()) / (a - b);
            let erlang = (-x / b).exp() * (1.0 + x / b);
            let got = two_exp_sf(b, a, x);
            if (a - b).abs() > 1e-6 {
                assert_relative_eq!(got, direct, max_relative = 1e-9);
            } else {
                assert_relative_eq!(got, erlang, max_relative = 1e-9);
            }
        }
        assert_relative_eq!(two_exp_sf(2.0, 2.0, 1.0), (-0.5f64).exp() * 1.5, max_relative = 1e-15);
    }

    #[test]
    fn threshold_examples() {
        let s = sc(1.0, 2.0, 0.0);
        assert_relative_eq!(optimal_threshold(&s), 2.0 * LN_2, max_relative = 1e-14);
        let (t, _) = grid_min(&s, 10.0, 100_000);
        assert!((t - 2.0 * LN_2).abs() < 1e-3);
        assert_relative_eq!(optimal_threshold(&sc(3.0, 3.0, 0.1)), 3.1, max_relative = 1e-15);
        assert_relative_eq!(
            optimal_threshold(&sc(2.0, 1.0, 0.0)),
            2.0 * LN_2,
            max_relative = 1e-14
        );
    }

    #[test]
    fn min_error_examples() {
        assert_relative_eq!(min_error_sum(&sc(1.0, 2.0, 0.0)), 0.5, max_relative = 1e-12);
        let lim = 1.0 - (-1.0f64).exp();
        assert_relative_eq!(min_error_sum(&sc(4.0, 4.0, 0.1)), lim, max_relative = 1e-12);
        assert_relative_eq!(certificate(&sc(4.0, 4.0, 0.1)), lim, max_relative = 1e-15);
        assert!(min_error_sum(&sc(1.0, 1e9, 0.0)) < 1e-7);
    }

    #[test]
    fn certificate_matches_evaluated_minimum() {
        for &(lj, ls) in &[(1.0, 2.0), (3.0, 0.5), (1e-3, 7.0), (5.0, 5.0 * (1.0 + 1e-11))] {
            let s = sc(lj, ls, 1e-5);
            let closed = ((lj / ls).ln() * lj / (ls - lj)).exp();
            let got = 1.0 - min_error_sum(&s);
            if (lj - ls).abs() > 1e-6 {
                assert!((got - closed).abs() < 1e-9, "{lj} {ls}: {got} vs {closed}");
            }
            assert!((min_error_sum(&s) - certificate(&s)).abs() < 1e-12);
        }
    }

    #[test]
    fn unjammed_detection_is_perfect() {
        assert_eq!(no_jamming_error_sum(3.0, 1e-5), 0.0);
        assert_eq!(no_jamming_error_sum(0.0, 1e-5), 1.0);
        let (ls, s2) = (1e-2, 1e-5);
        let best = (1..=10_000)
            .map(|i| fa_md_unjammed(ls, s2, s2 + 10.0 * ls * i as f64 / 1e4).error_sum())
            .fold(f64::INFINITY, f64::min);
        assert!(best < 0.01);
    }

    #[test]
    fn box_bound_example() {
        let params = SystemParams::default();
        let links = WillieLinks { sw: 1.0, dw: 1.0, rw: 1.0 };
        let b = covert_box_bounds(&params, &links, 0.5).unwrap();
        assert!((b.rho_ub - 2.0 / 3.0).abs() < 1e-8);
        assert!((b.xi_lb - 1.0 / 3.0).abs() < 1e-8);
        let open = covert_box_bounds(&params, &links, 1.0).unwrap();
        assert_eq!((open.rho_ub, open.xi_lb), (1.0, 0.0));
        let tight = covert_box_bounds(&params, &links, 1e-4).unwrap();
        assert!(tight.rho_ub < 1e-3 && tight.xi_lb > 0.999);
        assert!(covert_box_bounds(&params, &links, 0.0).is_err());
    }

    #[test]
    fn box_bound_is_covert() {
        let params = SystemParams::default();
        let links = WillieLinks { sw: 4e-4, dw: 4e-4, rw: 1.6e-3 };
        let b = covert_box_bounds(&params, &links, 0.1).unwrap();
        let split = PowerSplit { rho: b.rho_ub, xi: b.xi_lb };
        for phase in [Phase::One, Phase::Two] {
            let s = phase_scales(split, &params, &links, phase).unwrap();
            assert!(min_error_sum(&s) >= 0.9);
        }
    }

    #[test]
    fn worst_willie_examples() {
        let l = |sw, dw| WillieLinks { sw, dw, rw: 1.0 };
        let set = [l(1.0, 1.0), l(2.0, 1.0), l(1.0, 2.0)];
        assert_eq!(worst_willie(&set).unwrap().0, 1);
        assert_eq!(worst_willie(&set[..1]).unwrap(), (0, 0));
        assert_eq!(worst_willie(&[l(1.0, 1.0); 3]).unwrap(), (0, 0));
        assert!(worst_willie(&[]).is_err());
    }

    #[test]
    fn hypoexponential_examples() {
        let two = hypoexponential_sf(&[1.0, 2.0], 1.0).unwrap();
        let hand = 2.0 * (-1.0f64).exp() - (-2.0f64).exp();
        assert_relative_eq!(two, hand, max_relative = 1e-13);
        assert_relative_eq!(two, 0.6004, epsilon = 1e-4);
        assert_relative_eq!(
            hypoexponential_sf(&[0.5], 3.0).unwrap(),
            (-1.5f64).exp(),
            max_relative = 1e-13
        );
        assert!(matches!(
            hypoexponential_sf(&[1.0, 1.0], 1.0),
            Err(Error::RepeatedRates(..))
        ));
    }

    #[test]
    fn hypoexponential_matches_partial_fractions() {
        let rates = [0.3, 1.1, 2.5, 4.0];
        for &x in &[0.1, 1.0, 4.0, 12.0] {
            let pf: f64 = (0..rates.len())
                .map(|j| {
                    let prod: f64 = (0..rates.len())
                        .filter(|&k| k != j)
                        .map(|k| rates[k] / (rates[k] - rates[j]))
                        .product();
                    (-rates[j] * x).exp() * prod
                })
                .sum();
            assert_relative_eq!(hypoexponential_sf(&rates, x).unwrap(), pf, max_relative = 1e-11);
        }
    }

    #[test]
    fn colluding_single_willie_reduces() {
        let s = sc(1.3, 2.9, 0.2);
        for &t in &[0.1, 0.5, 2.0, 8.0] {
            let e = colluding_exact_fa_md(&[1.3], &[2.9], t, 0.2).unwrap();
            let f = fa_md(&s, t);
            assert!((e.p_fa - f.p_fa).abs() < 1e-12);
            assert!((e.p_md - f.p_md).abs() < 1e-12);
        }
    }

    #[test]
    fn clt_moment_examples() {
        let params = SystemParams {
            power: 10.0,
            willie_noise: 0.1,
            ..SystemParams::default()
        };
        let links = [WillieLinks { sw: 1.0, dw: 1.0, rw: 1.0 }; 4];
        let split = PowerSplit { rho: 0.5, xi: 0.5 };
        let m = clt_moments(split, &params, &links, Phase::One).unwrap();
        assert_relative_eq!(m.mu_fa, 20.4, max_relative = 1e-14);
        assert!(m.sigma_md >= m.sigma_fa);
        let one = clt_moments(split, &params, &links[..1], Phase::One).unwrap();
        assert_relative_eq!(one.mu_md - one.mu_fa, 5.0, max_relative = 1e-14);
        let mut mixed = links.to_vec();
        mixed[2].sw = 2.0;
        assert!(matches!(
            clt_moments(split, &params, &mixed, Phase::One),
            Err(Error::NonIdenticalWillies)
        ));
    }

    #[test]
    fn clt_threshold_examples() {
        let m = CltMoments { mu_fa: 0.0, sigma_fa: 1.0, mu_md: 2.0, sigma_md: 1.0, willies: 1 };
        assert_relative_eq!(clt_optimal_threshold(&m).unwrap(), 1.0, max_relative = 1e-14);
        let o = clt_fa_md(&m, 0.0);
        assert_eq!(o.p_fa, 0.5);
        assert_eq!(clt_fa_md(&m, 2.0).p_md, 0.5);

        let m = CltMoments { mu_fa: 20.4, sigma_fa: 10.0, mu_md: 40.4, sigma_md: 14.2, willies: 4 };
        let t = clt_optimal_threshold(&m).unwrap();
        assert!(t >= m.mu_fa && t <= m.mu_md);
        let f = |x: f64| clt_fa_md(&m, x).error_sum();
        let h = 1e-4;
        assert!(f(t) <= f(t - h) && f(t) <= f(t + h));
    }

    #[test]
    fn monte_carlo_matches_analysis() {
        let s = sc(1.0, 2.5, 0.1);
        let t = optimal_threshold(&s);
        let mc = monte_carlo_detection(&s, 10_000, 10_000, t, 7).unwrap();
        let an = fa_md(&s, t);
        assert!((mc.p_fa - an.p_fa).abs() < 0.01);
        assert!((mc.p_md - an.p_md).abs() < 0.01);
        let zero = monte_carlo_detection(&s, 100, 1000, 0.0, 7).unwrap();
        assert_eq!((zero.p_fa, zero.p_md), (1.0, 0.0));
    }

    #[test]
    fn monte_carlo_single_symbol_departs_from_asymptote() {
        let s = sc(1.0, 2.5, 0.1);
        let t = optimal_threshold(&s);
        let mc = monte_carlo_detection(&s, 1, 20_000, t, 3).unwrap();
        let an = fa_md(&s, t);
        assert!((mc.p_fa - an.p_fa).abs() > 0.01 || (mc.p_md - an.p_md).abs() > 0.01);
    }
}
