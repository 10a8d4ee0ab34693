//! Power allocation for the two-hop scheme.
//!
//! The covertness constraints are monotone in each coordinate, so they are
//! reduced once to a box `[delta, rho_ub] x [xi_lb, 1 - delta]`. Inside the
//! box the high-SNR objective is a difference of concave functions; the
//! solver linearizes the subtracted part at the current iterate and
//! maximizes the resulting separable concave minorizer, which makes every
//! iteration an ascent step.

use crate::channel::{SystemParams, WillieLinks};
use crate::detection::{
    clt_min_error_sum, clt_moments, covert_box_worst, min_error_sum, phase_scales, CovertBox,
    Phase, BOUND_TOL,
};
use crate::error::{invalid, Error, Result};
use crate::link::{secrecy_rate, secrecy_rate_from_sinrs, LinkGains, PowerSplit, SinrMode};
use crate::numeric::{bisect_boundary, golden_section_max};

/// Interiority margin keeping every logarithm finite.
pub const DELTA: f64 = 1e-6;

const LN2: f64 = std::f64::consts::LN_2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaConfig {
    /// Stop once both coordinates move by at most this much.
    pub theta: f64,
    pub max_iters: usize,
    /// Starting point; `None` picks the default interior point of the box.
    pub init: Option<PowerSplit>,
    /// Golden-section tolerance of the subproblem.
    pub inner_tol: f64,
}

impl Default for ScaConfig {
    fn default() -> Self {
        Self {
            theta: 1e-6,
            max_iters: 100,
            init: None,
            inner_tol: 1e-10,
        }
    }
}

impl ScaConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.theta > 0.0) {
            return Err(invalid("theta", "stopping threshold must be positive"));
        }
        if self.max_iters == 0 {
            return Err(invalid("max_iters", "at least one iteration"));
        }
        if !(self.inner_tol > 0.0) {
            return Err(invalid("inner_tol", "must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AllocationResult {
    pub split: PowerSplit,
    /// Exact, clamped secrecy rate at `split`.
    pub rate: f64,
    /// Optimizer objective at `split` (the high-SNR model).
    pub objective: f64,
    pub iterations: usize,
    /// Objective after each iteration, starting with the initial point.
    pub trajectory: Vec<f64>,
    pub feasible: bool,
    /// Phase-1 slack `rho mu_sw - (1 - rho) mu_dw` at its active value.
    pub t0: f64,
    /// Phase-2 slack `(1 - xi) mu_rw - xi mu_sw` at its active value.
    pub t1: f64,
    /// Phase-2 slacks per candidate relay, when several were considered.
    pub relay_slacks: Vec<f64>,
}

impl AllocationResult {
    /// No transmission: the covert box is empty.
    pub fn infeasible() -> Self {
        Self {
            split: PowerSplit { rho: 0.0, xi: 1.0 },
            rate: 0.0,
            objective: f64::NEG_INFINITY,
            iterations: 0,
            trajectory: Vec::new(),
            feasible: false,
            t0: 0.0,
            t1: 0.0,
            relay_slacks: Vec::new(),
        }
    }

    fn set_slacks(&mut self, links: &WillieLinks) {
        let PowerSplit { rho, xi } = self.split;
        self.t0 = rho * links.sw - (1.0 - rho) * links.dw;
        self.t1 = (1.0 - xi) * links.rw - xi * links.sw;
    }
}

// ---------------------------------------------------------------------------
// DC decomposition
// ---------------------------------------------------------------------------

/// `(Sigma, Omega)` in bits, with `Sigma - Omega` the high-SNR objective
/// without the `pr_t / 2` factor.
pub fn objective_terms(split: PowerSplit, varsigma: f64, gamma_rd: f64) -> Result<(f64, f64)> {
    let PowerSplit { rho, xi } = split;
    if !(rho > 0.0 && rho < 1.0 && xi >= 0.0 && xi < 1.0) {
        return Err(invalid(
            "split",
            format!("({rho}, {xi}) is not interior; the logarithms are undefined"),
        ));
    }
    let sigma = (rho * varsigma * gamma_rd * (1.0 - xi)).log2() + (1.0 - rho).log2();
    let omega = (rho * varsigma + 2.0 - rho - xi).log2() + (1.0 - rho + rho * varsigma).log2();
    Ok((sigma, omega))
}

fn dc_value(split: PowerSplit, varsigma: f64, gamma_rd: f64) -> f64 {
    objective_terms(split, varsigma, gamma_rd)
        .map(|(s, o)| s - o)
        .unwrap_or(f64::NEG_INFINITY)
}

/// First-order expansion of `Omega` at an anchor. Since `Omega` is concave
/// the plane lies above it everywhere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmegaSurrogate {
    pub anchor: PowerSplit,
    pub value: f64,
    pub grad: [f64; 2],
}

impl OmegaSurrogate {
    pub fn eval(&self, split: PowerSplit) -> f64 {
        self.value
            + self.grad[0] * (split.rho - self.anchor.rho)
            + self.grad[1] * (split.xi - self.anchor.xi)
    }
}

pub fn dc_linearize(anchor: PowerSplit, varsigma: f64) -> Result<OmegaSurrogate> {
    let PowerSplit { rho, xi } = anchor;
    if !(rho > 0.0 && rho < 1.0 && xi >= 0.0 && xi < 1.0) {
        return Err(invalid("anchor", "must be interior"));
    }
    let a = rho * varsigma + 2.0 - rho - xi;
    let b = 1.0 - rho + rho * varsigma;
    Ok(OmegaSurrogate {
        anchor,
        value: a.log2() + b.log2(),
        grad: [
            ((varsigma - 1.0) / a + (varsigma - 1.0) / b) / LN2,
            -1.0 / (a * LN2),
        ],
    })
}

/// Feasible rectangle for the solver, already shrunk by [`DELTA`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchBox {
    pub rho: (f64, f64),
    pub xi: (f64, f64),
}

impl SearchBox {
    pub fn from_covert(bx: CovertBox) -> Result<Self> {
        let s = Self {
            rho: (DELTA, bx.rho_ub.min(1.0 - DELTA)),
            xi: (bx.xi_lb.max(0.0), 1.0 - DELTA),
        };
        if s.rho.1 < s.rho.0 || s.xi.1 < s.xi.0 {
            return Err(Error::EmptyBox);
        }
        Ok(s)
    }

    fn clamp(&self, p: PowerSplit) -> PowerSplit {
        PowerSplit {
            rho: p.rho.clamp(self.rho.0, self.rho.1),
            xi: p.xi.clamp(self.xi.0, self.xi.1),
        }
    }
}

/// Maximizes `Sigma - Omega~` over the box.
///
/// The objective separates into `log rho + log(1 - rho) - g_rho rho` and
/// `log(1 - xi) - g_xi xi` plus constants, so one golden-section pass per
/// coordinate reaches the box optimum. A dense grid backs it up should the
/// search return something worse than the anchor.
pub fn solve_subproblem(
    surrogate: &OmegaSurrogate,
    varsigma: f64,
    gamma_rd: f64,
    bx: &SearchBox,
    inner_tol: f64,
) -> PowerSplit {
    let g = surrogate.grad;
    let f_rho = |r: f64| r.log2() + (1.0 - r).log2() - g[0] * r;
    let f_xi = |x: f64| (1.0 - x).log2() - g[1] * x;
    let (rho, _) = golden_section_max(f_rho, bx.rho.0, bx.rho.1, inner_tol);
    let (xi, _) = golden_section_max(f_xi, bx.xi.0, bx.xi.1, inner_tol);
    let cand = PowerSplit { rho, xi };

    let minorizer = |p: PowerSplit| -> f64 {
        objective_terms(p, varsigma, gamma_rd)
            .map(|(s, _)| s - surrogate.eval(p))
            .unwrap_or(f64::NEG_INFINITY)
    };
    let anchor = bx.clamp(surrogate.anchor);
    if minorizer(cand) >= minorizer(anchor) {
        return cand;
    }
    const GRID: usize = 10_000;
    let best_on = |lo: f64, hi: f64, f: &dyn Fn(f64) -> f64| {
        (0..=GRID)
            .map(|i| lo + (hi - lo) * i as f64 / GRID as f64)
            .map(|x| (x, f(x)))
            .fold((lo, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a })
            .0
    };
    let fallback = PowerSplit {
        rho: best_on(bx.rho.0, bx.rho.1, &f_rho),
        xi: best_on(bx.xi.0, bx.xi.1, &f_xi),
    };
    if minorizer(fallback) >= minorizer(anchor) {
        fallback
    } else {
        anchor
    }
}

fn default_init(bx: &SearchBox, covert: CovertBox) -> PowerSplit {
    bx.clamp(PowerSplit {
        rho: 0.5f64.min(covert.rho_ub / 2.0 + DELTA),
        xi: covert.xi_lb + 0.5 * (1.0 - covert.xi_lb),
    })
}

/// Runs the iterative DC scheme inside a given covert box.
///
/// Slacks are left at zero; callers that know the Willie geometry fill them.
pub fn sca_in_box(
    covert: CovertBox,
    gains: &LinkGains,
    params: &SystemParams,
    config: &ScaConfig,
) -> Result<AllocationResult> {
    config.validate()?;
    let bx = match SearchBox::from_covert(covert) {
        Ok(b) => b,
        Err(Error::EmptyBox) => return Ok(AllocationResult::infeasible()),
        Err(e) => return Err(e),
    };
    let vs = gains.varsigma();
    let grd = gains.gamma_rd;
    if !(vs > 0.0 && vs.is_finite() && grd > 0.0) {
        return Err(invalid("gains", "both link SNRs must be positive"));
    }
    let scale = 0.5 * params.pr_t;

    let mut x = bx.clamp(config.init.unwrap_or_else(|| default_init(&bx, covert)));
    let mut value = dc_value(x, vs, grd);
    let mut trajectory = vec![scale * value];
    let mut iterations = 0;
    while iterations < config.max_iters {
        iterations += 1;
        let surrogate = dc_linearize(x, vs)?;
        let next = solve_subproblem(&surrogate, vs, grd, &bx, config.inner_tol);
        let next_value = dc_value(next, vs, grd);
        if next_value < value - 1e-9 * value.abs().max(1.0) {
            return Err(Error::AscentViolation {
                iteration: iterations,
                before: value,
                after: next_value,
            });
        }
        let moved = (next.rho - x.rho).abs().max((next.xi - x.xi).abs());
        // Rounding can cost the last ulp; never step to a lower value.
        if next_value >= value {
            x = next;
            value = next_value;
        }
        trajectory.push(scale * value);
        if moved <= config.theta {
            break;
        }
    }
    Ok(AllocationResult {
        split: x,
        rate: secrecy_rate(x, gains, params.pr_t, SinrMode::Exact, true)?,
        objective: scale * value,
        iterations,
        trajectory,
        feasible: true,
        t0: 0.0,
        t1: 0.0,
        relay_slacks: Vec::new(),
    })
}

/// Covert power allocation against one or more non-colluding Willies.
pub fn sca_optimize(
    params: &SystemParams,
    willies: &[WillieLinks],
    gains: &LinkGains,
    config: &ScaConfig,
) -> Result<AllocationResult> {
    let covert = match covert_box_worst(params, willies, params.epsilon) {
        Ok(b) => b,
        Err(Error::Infeasible { .. }) => return Ok(AllocationResult::infeasible()),
        Err(e) => return Err(e),
    };
    let mut out = sca_in_box(covert, gains, params, config)?;
    if out.feasible {
        let (w1, w2) = crate::detection::worst_willie(willies)?;
        let PowerSplit { rho, xi } = out.split;
        out.t0 = rho * willies[w1].sw - (1.0 - rho) * willies[w1].dw;
        out.t1 = (1.0 - xi) * willies[w2].rw - xi * willies[w2].sw;
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Brute-force oracle
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleObjective {
    /// High-SNR secrecy rate with both `1 +` terms, unclamped.
    SecrecyRate,
    /// The solver's own model, `(pr_t / 2)(Sigma - Omega)`.
    ScaModel,
}

/// Value of `objective` at `split`.
pub fn model_objective(
    split: PowerSplit,
    gains: &LinkGains,
    pr_t: f64,
    objective: OracleObjective,
) -> f64 {
    match objective {
        OracleObjective::SecrecyRate => {
            secrecy_rate(split, gains, pr_t, SinrMode::HighSnr, false).unwrap_or(f64::NEG_INFINITY)
        }
        OracleObjective::ScaModel => 0.5 * pr_t * dc_value(split, gains.varsigma(), gains.gamma_rd),
    }
}

/// Exhaustive search over a `resolution x resolution` grid spanning the
/// covert box, endpoints included.
///
/// Every grid coordinate is re-checked against the exact detection
/// certificate and dropped if it fails, so the oracle does not trust the
/// box it was handed.
pub fn grid_oracle(
    params: &SystemParams,
    willies: &[WillieLinks],
    gains: &LinkGains,
    resolution: usize,
    objective: OracleObjective,
) -> Result<AllocationResult> {
    if resolution < 100 {
        return Err(invalid("resolution", "at least 100 points per axis"));
    }
    let covert = match covert_box_worst(params, willies, params.epsilon) {
        Ok(b) => b,
        Err(Error::Infeasible { .. }) => return Ok(AllocationResult::infeasible()),
        Err(e) => return Err(e),
    };
    let bx = match SearchBox::from_covert(covert) {
        Ok(b) => b,
        Err(_) => return Ok(AllocationResult::infeasible()),
    };
    let target = 1.0 - params.epsilon;
    let axis = |(lo, hi): (f64, f64)| -> Vec<f64> {
        (0..resolution)
            .map(|i| lo + (hi - lo) * i as f64 / (resolution - 1) as f64)
            .collect()
    };
    let covert_in = |split: PowerSplit, phase: Phase| {
        willies.iter().all(|w| {
            phase_scales(split, params, w, phase)
                .map(|s| min_error_sum(&s) >= target)
                .unwrap_or(false)
        })
    };
    let rhos: Vec<f64> = axis(bx.rho)
        .into_iter()
        .filter(|&r| covert_in(PowerSplit { rho: r, xi: 0.5 }, Phase::One))
        .collect();
    let xis: Vec<f64> = axis(bx.xi)
        .into_iter()
        .filter(|&x| covert_in(PowerSplit { rho: 0.5, xi: x }, Phase::Two))
        .collect();

    let mut best: Option<(PowerSplit, f64)> = None;
    for &rho in &rhos {
        for &xi in &xis {
            let p = PowerSplit { rho, xi };
            let v = model_objective(p, gains, params.pr_t, objective);
            if best.map_or(true, |(_, b)| v > b) {
                best = Some((p, v));
            }
        }
    }
    let Some((split, value)) = best else {
        return Ok(AllocationResult::infeasible());
    };
    Ok(AllocationResult {
        split,
        rate: secrecy_rate(split, gains, params.pr_t, SinrMode::Exact, true)?,
        objective: value,
        iterations: 0,
        trajectory: vec![value],
        feasible: true,
        t0: 0.0,
        t1: 0.0,
        relay_slacks: Vec::new(),
    })
}

// ---------------------------------------------------------------------------
// Relay selection
// ---------------------------------------------------------------------------

/// Picks the relay with the strongest relay-destination channel.
pub fn select_relay_suboptimal(rd_gains: &[f64]) -> Result<usize> {
    if rd_gains.is_empty() {
        return Err(Error::Empty("relay"));
    }
    let mut best = 0;
    for (i, &g) in rd_gains.iter().enumerate().skip(1) {
        if g > rd_gains[best] {
            best = i;
        }
    }
    Ok(best)
}

/// One candidate relay: its link SNRs and how every Willie sees it.
#[derive(Debug, Clone, PartialEq)]
pub struct RelayCandidate {
    pub gains: LinkGains,
    pub willies: Vec<WillieLinks>,
}

/// Solves the allocation for every candidate and keeps the best exact rate.
///
/// The phase-2 covert constraint binds only for the candidate's own
/// relay-Willie links. Ties go to the lowest index.
pub fn select_relay_exhaustive(
    candidates: &[RelayCandidate],
    params: &SystemParams,
    config: &ScaConfig,
) -> Result<(usize, AllocationResult)> {
    if candidates.is_empty() {
        return Err(Error::Empty("relay"));
    }
    let mut results = Vec::with_capacity(candidates.len());
    for c in candidates {
        results.push(sca_optimize(params, &c.willies, &c.gains, config)?);
    }
    let slacks: Vec<f64> = results.iter().map(|r| r.t1).collect();
    let mut best = 0;
    for (i, r) in results.iter().enumerate() {
        let b = &results[best];
        if (r.feasible && !b.feasible) || (r.feasible == b.feasible && r.rate > b.rate) {
            best = i;
        }
    }
    let mut out = results.swap_remove(best);
    out.relay_slacks = slacks;
    Ok((best, out))
}

// ---------------------------------------------------------------------------
// Colluding Willies
// ---------------------------------------------------------------------------

/// Covert box for `links.len()` colluding i.i.d. Willies, from the Gaussian
/// error sum at its optimal threshold.
pub fn colluding_box_bounds(
    params: &SystemParams,
    links: &[WillieLinks],
    epsilon: f64,
) -> Result<CovertBox> {
    if !(epsilon > 0.0) {
        return Err(invalid("epsilon", "must be positive"));
    }
    if epsilon >= 1.0 {
        return Ok(CovertBox {
            rho_ub: 1.0,
            xi_lb: 0.0,
        });
    }
    // Surfaces non-identical or empty Willie sets before bisecting.
    clt_moments(PowerSplit { rho: 0.5, xi: 0.5 }, params, links, Phase::One)?;
    let target = 1.0 - epsilon;
    let covert = |split: PowerSplit, phase: Phase| {
        clt_moments(split, params, links, phase)
            .and_then(|m| clt_min_error_sum(&m))
            .map(|e| e >= target)
            .unwrap_or(false)
    };
    let (rho_ub, _) = bisect_boundary(
        |rho| covert(PowerSplit { rho, xi: 0.5 }, Phase::One),
        0.0,
        1.0,
        BOUND_TOL,
    );
    if rho_ub <= 0.0 {
        return Err(Error::Infeasible { phase: 1 });
    }
    let (xi_lb, _) = bisect_boundary(
        |xi| covert(PowerSplit { rho: 0.5, xi }, Phase::Two),
        1.0,
        0.0,
        BOUND_TOL,
    );
    if xi_lb >= 1.0 {
        return Err(Error::Infeasible { phase: 2 });
    }
    Ok(CovertBox { rho_ub, xi_lb })
}

/// Allocation against colluding Willies pooling their energies.
pub fn colluding_allocation(
    params: &SystemParams,
    links: &[WillieLinks],
    gains: &LinkGains,
    config: &ScaConfig,
) -> Result<AllocationResult> {
    let covert = match colluding_box_bounds(params, links, params.epsilon) {
        Ok(b) => b,
        Err(Error::Infeasible { .. }) => return Ok(AllocationResult::infeasible()),
        Err(e) => return Err(e),
    };
    let mut out = sca_in_box(covert, gains, params, config)?;
    if out.feasible {
        out.set_slacks(&links[0]);
    }
    Ok(out)
}

/// Covert box against colluding observers at distinct positions.
///
/// The pooled detector needs i.i.d. observers, so each phase is bounded with
/// `willies.len()` copies of that phase's worst observer: a conservative
/// i.i.d. stand-in for the scattered group.
pub fn colluding_box_worst(
    params: &SystemParams,
    willies: &[WillieLinks],
    epsilon: f64,
) -> Result<CovertBox> {
    let (w1, w2) = crate::detection::worst_willie(willies)?;
    let n = willies.len();
    let rho_ub = colluding_box_bounds(params, &vec![willies[w1]; n], epsilon)?.rho_ub;
    let xi_lb = colluding_box_bounds(params, &vec![willies[w2]; n], epsilon)?.xi_lb;
    Ok(CovertBox { rho_ub, xi_lb })
}

/// Allocation against colluding observers at distinct positions, using
/// [`colluding_box_worst`].
pub fn colluding_allocation_worst(
    params: &SystemParams,
    willies: &[WillieLinks],
    gains: &LinkGains,
    config: &ScaConfig,
) -> Result<AllocationResult> {
    let covert = match colluding_box_worst(params, willies, params.epsilon) {
        Ok(b) => b,
        Err(Error::Infeasible { .. }) => return Ok(AllocationResult::infeasible()),
        Err(e) => return Err(e),
    };
    let mut out = sca_in_box(covert, gains, params, config)?;
    if out.feasible {
        let (w1, w2) = crate::detection::worst_willie(willies)?;
        let PowerSplit { rho, xi } = out.split;
        out.t0 = rho * willies[w1].sw - (1.0 - rho) * willies[w1].dw;
        out.t1 = (1.0 - xi) * willies[w2].rw - xi * willies[w2].sw;
    }
    Ok(out)
}

/// Exact rate at `split` with an explicit eavesdropping SINR, as used when
/// several relays leak.
pub fn rate_with_leakage(gamma_d: f64, leakage: f64, pr_t: f64) -> f64 {
    secrecy_rate_from_sinrs(gamma_d, leakage, pr_t, true)
}
