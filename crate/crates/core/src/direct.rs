//! Direct transmission with null-space artificial noise.
//!
//! The source beams data to the destination with MRT at power `rho P` and
//! spends the remaining `(1 - rho) P` on a jamming vector `z` confined to the
//! null space of the destination channel. The destination never hears the
//! noise; every relay, treated as an eavesdropper, does. Transmission takes a
//! single phase, so the rate carries no factor 1/2.

use num_complex::Complex64;

use crate::channel::{inner, mrt_weights, norm_sqr, CVector, SystemParams, WillieLinks};
use crate::detection::rho_upper_bound;
use crate::error::{invalid, Error, Result};
use crate::numeric::golden_section_max;

/// Smallest data fraction considered by the optimizer.
const RHO_MIN: f64 = 1e-6;

/// Orthonormal basis of the orthogonal complement of `h`, as `N_s - 1`
/// column vectors.
///
/// Built from the Householder reflector that maps `h` onto the first axis:
/// the reflector is unitary and Hermitian, so its remaining columns span
/// exactly the complement.
pub fn null_space_basis(h: &[Complex64]) -> Result<Vec<CVector>> {
    let n = h.len();
    if n < 2 {
        return Err(Error::NoNullSpace);
    }
    let norm = norm_sqr(h).sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::ZeroVector);
    }
    // Phase of the pivot chosen to avoid cancellation in v[0].
    let phase = if h[0].norm() > 0.0 {
        h[0] / h[0].norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    let mut v: CVector = h.to_vec();
    v[0] += phase * norm;
    let vv = norm_sqr(&v);
    // Column k of I - 2 v v^H / (v^H v).
    Ok((1..n)
        .map(|k| {
            let scale = 2.0 * v[k].conj() / vv;
            (0..n)
                .map(|i| {
                    let delta = if i == k { 1.0 } else { 0.0 };
                    Complex64::new(delta, 0.0) - v[i] * scale
                })
                .collect()
        })
        .collect())
}

/// Jamming vector `z = sqrt((1 - rho) P) B u` with `u` a unit vector in the
/// coordinates of the null-space basis `B`.
#[derive(Debug, Clone, PartialEq)]
pub struct JammingVector {
    pub z: CVector,
    pub basis: Vec<CVector>,
    pub u: CVector,
}

impl JammingVector {
    pub fn new(basis: Vec<CVector>, u: CVector, jam_power: f64) -> Result<Self> {
        if u.len() != basis.len() {
            return Err(invalid("u", "one coordinate per basis vector"));
        }
        let nu = norm_sqr(&u).sqrt();
        if nu == 0.0 {
            return Err(Error::ZeroVector);
        }
        let u: CVector = u.iter().map(|c| c / nu).collect();
        let amp = jam_power.max(0.0).sqrt();
        let dim = basis.first().map_or(0, |b| b.len());
        let mut z = vec![Complex64::new(0.0, 0.0); dim];
        for (b, c) in basis.iter().zip(&u) {
            for (zi, bi) in z.iter_mut().zip(b) {
                *zi += bi * c * amp;
            }
        }
        Ok(Self { z, basis, u })
    }
}

/// Channels seen by the direct scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectChannels {
    pub h_sd: CVector,
    /// Source-to-relay channels, one per eavesdropping relay.
    pub h_sj: Vec<CVector>,
}

/// `(gamma_D, [gamma_j])` for data fraction `rho` and jamming vector `z`.
pub fn direct_sinrs(
    rho: f64,
    z: &[Complex64],
    channels: &DirectChannels,
    params: &SystemParams,
) -> Result<(f64, Vec<f64>)> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(invalid("rho", format!("{rho} is not in [0, 1]")));
    }
    let w = mrt_weights(&channels.h_sd)?;
    let sinr = |h: &[Complex64]| {
        rho * params.power * inner(&w, h).norm_sqr() / (inner(z, h).norm_sqr() + params.noise)
    };
    Ok((sinr(&channels.h_sd), channels.h_sj.iter().map(|h| sinr(h)).collect()))
}

/// `pr_t [log2(1 + gamma_D) - log2(1 + max_j gamma_j)]^+`; no relays means
/// no leakage.
pub fn direct_rate_from_sinrs(gamma_d: f64, gammas: &[f64], pr_t: f64) -> f64 {
    let worst = gammas.iter().copied().fold(0.0, f64::max);
    (pr_t * ((1.0 + gamma_d).log2() - (1.0 + worst).log2())).max(0.0)
}

pub fn direct_secrecy_rate(
    rho: f64,
    z: &[Complex64],
    channels: &DirectChannels,
    params: &SystemParams,
) -> Result<f64> {
    let (gd, gj) = direct_sinrs(rho, z, channels, params)?;
    Ok(direct_rate_from_sinrs(gd, &gj, params.pr_t))
}

/// Largest `rho` meeting the covertness constraint.
///
/// Data and noise leave the same array, so both reach any Willie through the
/// same path loss and the bound depends only on `epsilon`.
pub fn direct_covert_bound(epsilon: f64, power: f64) -> Result<f64> {
    let params = SystemParams {
        power,
        ..SystemParams::default()
    };
    let same_path = WillieLinks {
        sw: 1.0,
        dw: 1.0,
        rw: 1.0,
    };
    rho_upper_bound(&params, &same_path, epsilon)
}

// ---------------------------------------------------------------------------
// Taylor relaxation
// ---------------------------------------------------------------------------

/// First-order expansion of `(|z^H h|^2 + sigma^2) / nu` at `(z~, nu~)`:
///
/// `T(z, nu) = 2 sigma^2/nu~ + 2 Re{z~^H H z}/nu~ - (q~ + sigma^2) nu/nu~^2`
///
/// with `H = h h^H` and `q~ = z~^H H z~`. The function is jointly convex, so
/// `T` never exceeds it.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorRelaxation {
    pub h: CVector,
    /// `z~^H h`.
    pub anchor_proj: Complex64,
    pub nu0: f64,
    pub noise: f64,
}

impl TaylorRelaxation {
    pub fn new(z0: &[Complex64], nu0: f64, h: &[Complex64], noise: f64) -> Result<Self> {
        if !(nu0 > 0.0) {
            return Err(invalid("nu", "anchor must be positive"));
        }
        Ok(Self {
            h: h.to_vec(),
            anchor_proj: inner(z0, h),
            nu0,
            noise,
        })
    }

    /// The quadratic-over-linear term itself.
    pub fn exact(&self, z: &[Complex64], nu: f64) -> f64 {
        (inner(z, &self.h).norm_sqr() + self.noise) / nu
    }

    pub fn eval(&self, z: &[Complex64], nu: f64) -> f64 {
        let q0 = self.anchor_proj.norm_sqr();
        // z~^H h h^H z = (z~^H h) conj(z^H h).
        let cross = (self.anchor_proj * inner(z, &self.h).conj()).re;
        2.0 * self.noise / self.nu0 + 2.0 * cross / self.nu0
            - (q0 + self.noise) * nu / (self.nu0 * self.nu0)
    }

    /// Real gradient with respect to `z` (as `d/d Re z + i d/d Im z`) and
    /// the derivative with respect to `nu`.
    pub fn gradients(&self) -> (CVector, f64) {
        let q0 = self.anchor_proj.norm_sqr();
        let gz = self
            .h
            .iter()
            .map(|hi| 2.0 * hi * self.anchor_proj.conj() / self.nu0)
            .collect();
        (gz, -(q0 + self.noise) / (self.nu0 * self.nu0))
    }
}

// ---------------------------------------------------------------------------
// Optimizer
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectConfig {
    pub max_iters: usize,
    /// Stop when an outer iteration gains less than this (bits).
    pub tol: f64,
    /// Projected-gradient steps on `u` per outer iteration.
    pub inner_steps: usize,
    /// Coarse `rho` grid before the golden refinement.
    pub rho_scan: usize,
}

impl Default for DirectConfig {
    fn default() -> Self {
        Self {
            max_iters: 200,
            tol: 1e-6,
            inner_steps: 50,
            rho_scan: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirectResult {
    pub rho: f64,
    pub jamming: JammingVector,
    pub rate: f64,
    /// `1 / (1 + max_j gamma_j)` at the result.
    pub nu: f64,
    pub iterations: usize,
    pub trajectory: Vec<f64>,
    pub feasible: bool,
    /// Covert slack `rho P - (1 - rho) P`.
    pub t0: f64,
}

/// Per-relay quantities in null-space coordinates.
struct Projected {
    /// `|w^H h_sj|^2`.
    data_gain: Vec<f64>,
    /// `B^H h_sj`.
    v: Vec<CVector>,
}

fn project(channels: &DirectChannels, basis: &[CVector]) -> Result<Projected> {
    let w = mrt_weights(&channels.h_sd)?;
    Ok(Projected {
        data_gain: channels.h_sj.iter().map(|h| inner(&w, h).norm_sqr()).collect(),
        v: channels
            .h_sj
            .iter()
            .map(|h| basis.iter().map(|b| inner(b, h)).collect())
            .collect(),
    })
}

/// Rate as a function of `(rho, u)` using the projected channels.
fn rate_at(rho: f64, u: &[Complex64], pj: &Projected, gd_unit: f64, p: &SystemParams) -> f64 {
    let jam = (1.0 - rho) * p.power;
    let worst = pj
        .data_gain
        .iter()
        .zip(&pj.v)
        .map(|(a, v)| rho * p.power * a / (jam * inner(u, v).norm_sqr() + p.noise))
        .fold(0.0, f64::max);
    (p.pr_t * ((1.0 + rho * gd_unit).log2() - (1.0 + worst).log2())).max(0.0)
}

fn normalize(u: &mut CVector) {
    let n = norm_sqr(u).sqrt();
    for c in u.iter_mut() {
        *c /= n;
    }
}

/// Taylor minorizers `nu_j(u)` at anchor `(u~, nu~)`, with `rho` fixed.
struct NuSurrogate<'a> {
    pj: &'a Projected,
    /// `z~^H h_sj` per relay.
    s0: Vec<Complex64>,
    /// `(q~_j + sigma^2) / nu~^2` per relay.
    b: Vec<f64>,
    nu0: f64,
    amp: f64,
    data: Vec<f64>,
    noise: f64,
}

impl<'a> NuSurrogate<'a> {
    fn new(pj: &'a Projected, u0: &[Complex64], nu0: f64, rho: f64, p: &SystemParams) -> Self {
        let amp = ((1.0 - rho) * p.power).sqrt();
        let s0: Vec<Complex64> = pj.v.iter().map(|v| inner(u0, v) * amp).collect();
        let b = s0
            .iter()
            .map(|s| (s.norm_sqr() + p.noise) / (nu0 * nu0))
            .collect();
        let data = pj.data_gain.iter().map(|a| rho * p.power * a).collect();
        Self {
            pj,
            s0,
            b,
            nu0,
            amp,
            data,
            noise: p.noise,
        }
    }

    /// Largest `nu` allowed by relay `j`'s relaxed constraint.
    fn nu_j(&self, j: usize, u: &[Complex64]) -> f64 {
        let proj = inner(u, &self.pj.v[j]) * self.amp;
        let cross = (self.s0[j] * proj.conj()).re;
        let t_free = (2.0 * self.noise + 2.0 * cross) / self.nu0;
        (t_free - self.data[j] - proj.norm_sqr() - self.noise) / self.b[j]
    }

    fn min_nu(&self, u: &[Complex64]) -> (usize, f64) {
        (0..self.s0.len())
            .map(|j| (j, self.nu_j(j, u)))
            .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a })
    }

    fn grad_j(&self, j: usize, u: &[Complex64]) -> CVector {
        let v = &self.pj.v[j];
        let vu = inner(v, u);
        v.iter()
            .map(|vi| {
                (2.0 * self.amp * self.s0[j].conj() * vi / self.nu0
                    - 2.0 * self.amp * self.amp * vi * vu)
                    / self.b[j]
            })
            .collect()
    }
}

/// Projected-gradient ascent of `min_j nu_j(u)` on the unit sphere, with
/// Armijo backtracking. Only improving steps are taken.
fn ascend_u(sur: &NuSurrogate, u0: &[Complex64], steps: usize) -> CVector {
    let mut u = u0.to_vec();
    let (mut active, mut value) = sur.min_nu(&u);
    let mut step = 1.0;
    for _ in 0..steps {
        let g = sur.grad_j(active, &u);
        let gn = norm_sqr(&g);
        if gn == 0.0 || !gn.is_finite() {
            break;
        }
        let mut moved = false;
        let mut t = step / gn.sqrt();
        for _ in 0..40 {
            let mut cand: CVector = u.iter().zip(&g).map(|(a, b)| a + b * t).collect();
            normalize(&mut cand);
            let (a, v) = sur.min_nu(&cand);
            if v > value + 1e-4 * t * gn.min(1.0) * value.abs().max(1e-300) {
                u = cand;
                active = a;
                value = v;
                moved = true;
                step = (t * gn.sqrt() * 2.0).min(4.0);
                break;
            }
            t *= 0.5;
        }
        if !moved {
            break;
        }
    }
    u
}

/// Maximizes the rate over `rho` with `u` fixed: coarse scan, then golden
/// refinement around the best cell.
fn best_rho(
    u: &[Complex64],
    pj: &Projected,
    gd_unit: f64,
    p: &SystemParams,
    rho_ub: f64,
    scan: usize,
) -> (f64, f64) {
    let f = |r: f64| rate_at(r, u, pj, gd_unit, p);
    let lo = RHO_MIN.min(rho_ub);
    let n = scan.max(2);
    let grid: Vec<f64> = (0..n)
        .map(|i| lo + (rho_ub - lo) * i as f64 / (n - 1) as f64)
        .collect();
    let (k, _) = grid
        .iter()
        .enumerate()
        .map(|(i, &r)| (i, f(r)))
        .fold((0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
    let a = grid[k.saturating_sub(1)];
    let b = grid[(k + 1).min(n - 1)];
    golden_section_max(f, a, b, 1e-12)
}

/// Alternating optimization of the jamming direction and the power split.
///
/// Each outer iteration anchors the Taylor relaxation at the current point,
/// improves the jamming direction against the relaxed worst relay, then
/// re-optimizes `rho` on the exact rate. Both steps only accept improvements,
/// so the rate trajectory is non-decreasing.
pub fn direct_optimize(
    channels: &DirectChannels,
    params: &SystemParams,
    config: &DirectConfig,
) -> Result<DirectResult> {
    let basis = null_space_basis(&channels.h_sd)?;
    let rho_ub = match direct_covert_bound(params.epsilon, params.power) {
        Ok(b) => b,
        Err(Error::Infeasible { .. }) => {
            let u = unit(basis.len());
            return Ok(DirectResult {
                rho: 0.0,
                jamming: JammingVector::new(basis, u, params.power)?,
                rate: 0.0,
                nu: 1.0,
                iterations: 0,
                trajectory: Vec::new(),
                feasible: false,
                t0: -params.power,
            });
        }
        Err(e) => return Err(e),
    };
    let pj = project(channels, &basis)?;
    let gd_unit = params.power * norm_sqr(&channels.h_sd) / params.noise;

    // Start by pointing the noise at the relay that hears the data best.
    let mut u = match (0..pj.v.len()).max_by(|&a, &b| {
        pj.data_gain[a]
            .partial_cmp(&pj.data_gain[b])
            .unwrap_or(std::cmp::Ordering::Equal)
    }) {
        Some(j) if norm_sqr(&pj.v[j]) > 0.0 => {
            let mut v = pj.v[j].clone();
            normalize(&mut v);
            v
        }
        _ => unit(basis.len()),
    };
    let (mut rho, mut rate) = best_rho(&u, &pj, gd_unit, params, rho_ub, config.rho_scan);
    let mut trajectory = vec![rate];
    let mut iterations = 0;

    while iterations < config.max_iters && !pj.v.is_empty() {
        iterations += 1;
        let before = rate;
        let nu0 = nu_at(rho, &u, &pj, params);
        let sur = NuSurrogate::new(&pj, &u, nu0, rho, params);
        let cand_u = ascend_u(&sur, &u, config.inner_steps);
        let cand_rate = rate_at(rho, &cand_u, &pj, gd_unit, params);
        if cand_rate >= rate {
            u = cand_u;
            rate = cand_rate;
        }
        let (r, v) = best_rho(&u, &pj, gd_unit, params, rho_ub, config.rho_scan);
        if v > rate {
            rho = r;
            rate = v;
        }
        trajectory.push(rate);
        if rate - before < config.tol {
            break;
        }
    }

    let jamming = JammingVector::new(basis, u, (1.0 - rho) * params.power)?;
    let (gd, gj) = direct_sinrs(rho, &jamming.z, channels, params)?;
    let worst = gj.iter().copied().fold(0.0, f64::max);
    Ok(DirectResult {
        rho,
        rate: direct_rate_from_sinrs(gd, &gj, params.pr_t),
        nu: 1.0 / (1.0 + worst),
        jamming,
        iterations,
        trajectory,
        feasible: true,
        t0: rho * params.power - (1.0 - rho) * params.power,
    })
}

fn unit(n: usize) -> CVector {
    let mut u = vec![Complex64::new(0.0, 0.0); n];
    if let Some(first) = u.first_mut() {
        *first = Complex64::new(1.0, 0.0);
    }
    u
}

fn nu_at(rho: f64, u: &[Complex64], pj: &Projected, p: &SystemParams) -> f64 {
    let jam = (1.0 - rho) * p.power;
    let worst = pj
        .data_gain
        .iter()
        .zip(&pj.v)
        .map(|(a, v)| rho * p.power * a / (jam * inner(u, v).norm_sqr() + p.noise))
        .fold(0.0, f64::max);
    1.0 / (1.0 + worst)
}
