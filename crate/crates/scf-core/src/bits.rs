//! Fronthaul quantization bit allocation for fixed user powers and
//! beamformers.
//!
//! With powers and receivers frozen, the SINR constraint of user k becomes a
//! sum of per-dimension terms `theta[n][l][k] * 2^(-2 D[n][l])` that must stay
//! below a target-dependent budget `rhs_k(gamma)`. The continuous relaxation
//! is a convex feasibility problem per SINR target, decided here by projected
//! gradient descent on a log-sum-exp smoothing of the worst normalized
//! constraint violation; the best target is found by bisection, and the real
//! solution is rounded to integers with a per-RRH threshold search.

use alloc::vec;
use alloc::vec::Vec;

use crate::maxmin::UplinkModel;
use crate::numerics::dot_h;
use crate::real;
use crate::scf::{PlanMode, QuantizationPlan};
use crate::Complex64;

const LN2: f64 = core::f64::consts::LN_2;

/// Effective quantization noise coefficients seen by every user, plus the
/// power-independent parts of each user's SINR constraint.
#[derive(Debug, Clone)]
pub struct ThetaTensor {
    /// theta[n][l][k]: noise power contributed to user k's decoder by one
    /// quantization-noise unit at dimension (n, l). Zero exactly where the
    /// beamformer weight is zero (e.g. pruned dimensions).
    pub theta: Vec<Vec<Vec<f64>>>,
    /// Received signal power per user, p_k |w_k^H h_k|^2.
    pub signal: Vec<f64>,
    /// Interference plus filtered receiver noise per user.
    pub base: Vec<f64>,
}

impl ThetaTensor {
    pub fn num_users(&self) -> usize {
        self.signal.len()
    }

    /// Quantization-noise budget per user at a common SINR target:
    /// `signal_k / gamma - base_k`.
    pub fn rhs(&self, gamma: f64) -> Vec<f64> {
        self.signal.iter().zip(&self.base).map(|(s, b)| s / gamma - b).collect()
    }

    /// SINR reached as quantization noise vanishes; no target above this is
    /// feasible for any allocation.
    pub fn no_quant_bound(&self) -> f64 {
        self.signal
            .iter()
            .zip(&self.base)
            .map(|(s, b)| if *b > 0.0 { s / b } else { f64::INFINITY })
            .fold(f64::INFINITY, f64::min)
    }

    /// Minimum user SINR for a bit matrix under the continuous noise model,
    /// holding powers and beamformers fixed.
    pub fn min_sinr(&self, bits: &[Vec<f64>]) -> f64 {
        (0..self.num_users())
            .map(|k| {
                let quant: f64 = self
                    .theta
                    .iter()
                    .zip(bits)
                    .flat_map(|(tn, bn)| tn.iter().zip(bn))
                    .map(|(tl, &b)| tl[k] * real::exp2(-2.0 * b))
                    .sum();
                let den = self.base[k] + quant;
                if self.signal[k] <= 0.0 || den <= 0.0 {
                    0.0
                } else {
                    self.signal[k] / den
                }
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// Effective per-dimension quantization noise coefficients at fixed powers
/// and beamformers: `theta = 3 |w_k[d]|^2 (sum_i p_i |h_d,i|^2 + sigma2
/// ||v_d||^2)`, laid out over the full (unpruned) dimension grid.
pub fn effective_theta(model: &UplinkModel, p: &[f64], w: &[Vec<Complex64>]) -> ThetaTensor {
    let k_users = model.num_users();
    let mut theta: Vec<Vec<Vec<f64>>> =
        model.dims_per_rrh.iter().map(|&l| vec![vec![0.0; k_users]; l]).collect();

    for (d, id) in model.dims.iter().enumerate() {
        let sig: f64 =
            (0..k_users).map(|i| p[i] * model.htilde[(d, i)].norm_sqr()).sum();
        let dim_power = 3.0 * (sig + model.sigma2 * model.noise_gram[(d, d)].re);
        for k in 0..k_users {
            theta[id.rrh][id.dim][k] = dim_power * w[k][d].norm_sqr();
        }
    }

    let mut signal = vec![0.0; k_users];
    let mut base = vec![0.0; k_users];
    for k in 0..k_users {
        let wk = &w[k];
        if wk.is_empty() {
            continue;
        }
        for j in 0..k_users {
            let gain = dot_h(wk, &model.htilde.col(j)).norm_sqr();
            if j == k {
                signal[k] = p[j] * gain;
            } else {
                base[k] += p[j] * gain;
            }
        }
        base[k] += model.sigma2 * dot_h(wk, &model.noise_gram.matvec(wk)).re;
    }

    ThetaTensor { theta, signal, base }
}

/// Tolerances for the projected-gradient feasibility solver.
#[derive(Debug, Clone)]
pub struct PgOptions {
    /// Accepted normalized constraint violation.
    pub solver_tol: f64,
    /// Total gradient-step budget across annealing stages.
    pub max_iters: usize,
}

impl Default for PgOptions {
    fn default() -> Self {
        Self { solver_tol: 1e-7, max_iters: 50_000 }
    }
}

#[derive(Debug, Clone)]
pub enum BitFeasibility {
    /// A real-valued allocation meeting every constraint (full layout).
    Feasible(Vec<Vec<f64>>),
    Infeasible,
    /// Solver budget exhausted in the undecided band.
    Indeterminate,
}

/// Projects one RRH group onto `{x >= 0, sum x <= beta}`.
fn project_budget(x: &mut [f64], beta: f64) {
    for v in x.iter_mut() {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    let sum: f64 = x.iter().sum();
    if sum <= beta {
        return;
    }
    // Euclidean projection onto the simplex {x >= 0, sum x = beta}.
    let mut sorted: Vec<f64> = x.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut acc = 0.0;
    let mut tau = 0.0;
    for (j, &u) in sorted.iter().enumerate() {
        acc += u;
        let t = (acc - beta) / (j + 1) as f64;
        if u - t > 0.0 {
            tau = t;
        } else {
            break;
        }
    }
    for v in x.iter_mut() {
        *v = (*v - tau).max(0.0);
    }
}

/// Decides whether a nonnegative real bit allocation exists that meets every
/// user's quantization-noise budget at the target `gamma` while respecting
/// per-RRH fronthaul budgets.
pub fn relaxed_feasible(
    theta: &ThetaTensor,
    gamma: f64,
    budgets_bps: &[f64],
    bandwidth_hz: f64,
    opts: &PgOptions,
) -> BitFeasibility {
    let k_users = theta.num_users();
    let rhs = theta.rhs(gamma);
    if rhs.iter().any(|&r| r <= 0.0) {
        return BitFeasibility::Infeasible;
    }
    let beta: Vec<f64> =
        budgets_bps.iter().map(|&t| (t / (2.0 * bandwidth_hz)).max(0.0)).collect();

    // Active dimensions: those with any noise coupling. Everything else
    // stays at zero bits.
    let mut active: Vec<(usize, usize)> = Vec::new();
    for (n, tn) in theta.theta.iter().enumerate() {
        for (l, tl) in tn.iter().enumerate() {
            if tl.iter().any(|&v| v > 0.0) {
                active.push((n, l));
            }
        }
    }
    let full_layout = |x: &[f64]| -> Vec<Vec<f64>> {
        let mut bits: Vec<Vec<f64>> =
            theta.theta.iter().map(|tn| vec![0.0; tn.len()]).collect();
        for (a, &(n, l)) in active.iter().enumerate() {
            bits[n][l] = x[a];
        }
        bits
    };
    if active.is_empty() {
        return BitFeasibility::Feasible(full_layout(&[]));
    }

    // Normalized constraint coefficients.
    let coeff: Vec<Vec<f64>> = active
        .iter()
        .map(|&(n, l)| (0..k_users).map(|k| theta.theta[n][l][k] / rhs[k]).collect())
        .collect();

    // Certificate of infeasibility: even granting every dimension its whole
    // RRH budget simultaneously leaves some constraint violated.
    for k in 0..k_users {
        let lower: f64 = active
            .iter()
            .zip(&coeff)
            .map(|(&(n, _), c)| c[k] * real::exp2(-2.0 * beta[n]))
            .sum();
        if lower > 1.0 + opts.solver_tol {
            return BitFeasibility::Infeasible;
        }
    }

    // Per-RRH groups of active indices.
    let groups: Vec<Vec<usize>> = (0..budgets_bps.len())
        .map(|n| {
            active
                .iter()
                .enumerate()
                .filter_map(|(a, &(rn, _))| (rn == n).then_some(a))
                .collect()
        })
        .collect();

    // Start from an even split of each budget over its active dimensions.
    let mut x = vec![0.0; active.len()];
    for (n, g) in groups.iter().enumerate() {
        if !g.is_empty() {
            let share = beta[n] / g.len() as f64;
            for &a in g {
                x[a] = share;
            }
        }
    }

    let violations = |x: &[f64]| -> Vec<f64> {
        let mut v = vec![0.0; k_users];
        for (a, c) in coeff.iter().enumerate() {
            let att = real::exp2(-2.0 * x[a]);
            for k in 0..k_users {
                v[k] += c[k] * att;
            }
        }
        v
    };
    let max_of = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    if max_of(&violations(&x)) <= 1.0 {
        return BitFeasibility::Feasible(full_layout(&x));
    }

    let temperatures = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6];
    let mut spent = 0usize;
    let mut converged = true;
    for &t in &temperatures {
        let lse = |v: &[f64]| -> (f64, Vec<f64>) {
            let m = max_of(v);
            let w: Vec<f64> = v.iter().map(|&vi| real::exp((vi - m) / t)).collect();
            let sum: f64 = w.iter().sum();
            (m + t * real::ln(sum), w.iter().map(|&wi| wi / sum).collect())
        };

        let mut v = violations(&x);
        let (mut fx, mut soft) = lse(&v);
        let mut eta = 1.0;
        let mut stage_done = false;
        while spent < opts.max_iters {
            spent += 1;
            // Gradient of the smoothed max in bit space.
            let grad: Vec<f64> = (0..x.len())
                .map(|a| {
                    let att = real::exp2(-2.0 * x[a]);
                    let mix: f64 = (0..k_users).map(|k| soft[k] * coeff[a][k]).sum();
                    -2.0 * LN2 * att * mix
                })
                .collect();

            // Backtracking projected step.
            let mut accepted = false;
            for _ in 0..40 {
                let mut cand = x.clone();
                for a in 0..cand.len() {
                    cand[a] -= eta * grad[a];
                }
                for (n, g) in groups.iter().enumerate() {
                    if g.is_empty() {
                        continue;
                    }
                    let mut slice: Vec<f64> = g.iter().map(|&a| cand[a]).collect();
                    project_budget(&mut slice, beta[n]);
                    for (i, &a) in g.iter().enumerate() {
                        cand[a] = slice[i];
                    }
                }
                let vc = violations(&cand);
                let (fc, sc) = lse(&vc);
                if fc < fx {
                    x = cand;
                    v = vc;
                    let improvement = fx - fc;
                    fx = fc;
                    soft = sc;
                    accepted = true;
                    eta *= 1.5;
                    if max_of(&v) <= 1.0 {
                        return BitFeasibility::Feasible(full_layout(&x));
                    }
                    if improvement <= 1e-13 * fx.abs().max(1.0) {
                        stage_done = true;
                    }
                    break;
                }
                eta *= 0.5;
            }
            if !accepted {
                stage_done = true; // flat to machine precision at this temperature
            }
            if stage_done {
                break;
            }
        }
        if !stage_done && spent >= opts.max_iters {
            converged = false;
            break;
        }
    }

    let worst = max_of(&violations(&x));
    if worst <= 1.0 + opts.solver_tol {
        BitFeasibility::Feasible(full_layout(&x))
    } else if !converged {
        BitFeasibility::Indeterminate
    } else {
        BitFeasibility::Infeasible
    }
}

/// Result of the relaxed max-min bit allocation.
#[derive(Debug, Clone)]
pub struct RelaxedAllocation {
    /// Real-valued bits over the full dimension layout.
    pub bits: Vec<Vec<f64>>,
    pub achieved_gamma: f64,
    /// Worst normalized constraint violation at the returned allocation.
    pub solver_residual: f64,
    /// Feasibility probes abandoned at the iteration cap.
    pub indeterminate_events: usize,
}

/// Maximizes the common SINR target over real-valued bit allocations by
/// bisection, each probe solved by [`relaxed_feasible`]. `gamma_cap` is an
/// optional external upper bound (e.g. the single-user bound); the
/// quantization-free SINR of the frozen powers and beamformers always caps
/// the search.
pub fn relaxed_maxmin(
    theta: &ThetaTensor,
    budgets_bps: &[f64],
    bandwidth_hz: f64,
    gamma_cap: f64,
    bisect_rel: f64,
    max_bisect: usize,
    opts: &PgOptions,
) -> RelaxedAllocation {
    let zero = RelaxedAllocation {
        bits: theta.theta.iter().map(|tn| vec![0.0; tn.len()]).collect(),
        achieved_gamma: 0.0,
        solver_residual: 0.0,
        indeterminate_events: 0,
    };
    let mut hi = theta.no_quant_bound() * (1.0 - 1e-12);
    if gamma_cap.is_finite() && gamma_cap > 0.0 {
        hi = hi.min(gamma_cap);
    }
    if !(hi > 0.0) || !hi.is_finite() {
        return zero;
    }

    let eps = bisect_rel * hi;
    let mut lo = 0.0f64;
    let mut best: Option<(f64, Vec<Vec<f64>>)> = None;
    let mut indeterminate = 0;
    let mut iters = 0;
    while hi - lo > eps && iters < max_bisect {
        iters += 1;
        let mid = 0.5 * (lo + hi);
        match relaxed_feasible(theta, mid, budgets_bps, bandwidth_hz, opts) {
            BitFeasibility::Feasible(bits) => {
                lo = mid;
                best = Some((mid, bits));
            }
            BitFeasibility::Infeasible => hi = mid,
            BitFeasibility::Indeterminate => {
                indeterminate += 1;
                hi = mid;
            }
        }
    }

    match best {
        None => RelaxedAllocation { indeterminate_events: indeterminate, ..zero },
        Some((gamma, bits)) => {
            let rhs = theta.rhs(gamma);
            let residual = (0..theta.num_users())
                .map(|k| {
                    let g: f64 = theta
                        .theta
                        .iter()
                        .zip(&bits)
                        .flat_map(|(tn, bn)| tn.iter().zip(bn))
                        .map(|(tl, &b)| tl[k] * real::exp2(-2.0 * b))
                        .sum();
                    (g - rhs[k]) / rhs[k]
                })
                .fold(f64::NEG_INFINITY, f64::max);
            RelaxedAllocation {
                bits,
                achieved_gamma: gamma,
                solver_residual: residual,
                indeterminate_events: indeterminate,
            }
        }
    }
}

fn round_at(b: f64, alpha: f64) -> f64 {
    let fl = real::floor(b);
    if b - fl <= alpha + 1e-12 {
        fl
    } else {
        real::ceil(b)
    }
}

/// Rounds a budget-feasible real allocation to integers. Per radio head, the
/// smallest threshold `alpha` (floor below, ceil above) whose rounded vector
/// still fits the fronthaul budget is found by bisection; `alpha = 1`
/// (floor everything) is always feasible.
pub fn round_bits(
    bits_real: &[Vec<f64>],
    budgets_bps: &[f64],
    bandwidth_hz: f64,
    rounding_eps: f64,
) -> QuantizationPlan {
    let bits = bits_real
        .iter()
        .zip(budgets_bps)
        .map(|(bn, &budget)| {
            let beta = budget / (2.0 * bandwidth_hz);
            let fits = |alpha: f64| -> bool {
                bn.iter().map(|&b| round_at(b, alpha)).sum::<f64>() <= beta + 1e-9
            };
            let (mut lo, mut hi) = (0.0f64, 1.0f64);
            if fits(lo) {
                hi = lo;
            } else {
                while hi - lo > rounding_eps {
                    let mid = 0.5 * (lo + hi);
                    if fits(mid) {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
            }
            bn.iter().map(|&b| round_at(b, hi)).collect()
        })
        .collect();
    QuantizationPlan { bits, mode: PlanMode::Integer }
}
