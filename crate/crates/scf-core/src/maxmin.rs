//! Max-min SINR power control with MMSE receive beamforming for a fixed
//! quantization plan.
//!
//! The decoding model stacks every retained filter-output dimension of every
//! radio head. For a power vector `p`, user k sees the Hermitian
//! positive-definite matrix
//!
//! ```text
//! A_k(p) = sum_{j != k} p_j h_j h_j^H + sigma2 G + Q(p)
//! ```
//!
//! where `h_j` are stacked effective channels, `G` is the block-diagonal
//! filter Gram matrix (identity for orthonormal filters), and `Q(p)` is the
//! diagonal quantization noise. The MMSE receiver is `A_k^{-1} h_k`, the
//! per-target power update `I_k(p) = gamma / (h_k^H A_k^{-1} h_k)` is a
//! standard interference function, and the optimal common SINR is found by
//! bisection over targets with a fixed-point feasibility check per target.

use alloc::vec;
use alloc::vec::Vec;

use crate::numerics::{dot_h, CholeskyFactor, ComplexMatrix};
use crate::real;
use crate::scenario::SystemConfig;
use crate::scf::{FilterBank, QuantizationPlan};
use crate::{Complex64, Result};

/// Identifies one filter-output dimension: (radio head, output row).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DimId {
    pub rrh: usize,
    pub dim: usize,
}

/// How quantization enters the decoding model.
#[derive(Debug, Clone, Copy)]
pub enum QuantSpec<'a> {
    /// No quantization noise at all (infinite fronthaul).
    Unquantized,
    /// Zero-bit dimensions are pruned from the model; the rest carry the
    /// power-dependent uniform-quantization noise.
    Exact(&'a QuantizationPlan),
    /// Continuous relaxation: every dimension is kept, zero bits giving a
    /// finite noise level.
    Continuous(&'a QuantizationPlan),
}

/// Stacked decoding model at the baseband unit over retained dimensions.
#[derive(Debug, Clone)]
pub struct UplinkModel {
    /// Stacked effective channels, retained dims x users.
    pub htilde: ComplexMatrix,
    /// Block-diagonal filter Gram matrix V V^H restricted to retained dims.
    pub noise_gram: ComplexMatrix,
    pub sigma2: f64,
    /// Per-retained-dimension bit counts; `None` disables quantization noise.
    bits: Option<Vec<f64>>,
    /// Identity of each retained dimension.
    pub dims: Vec<DimId>,
    /// Full per-RRH output dimension counts (before pruning).
    pub dims_per_rrh: Vec<usize>,
}

impl UplinkModel {
    /// Stacks a filter bank into the joint decoding model, pruning zero-bit
    /// dimensions in `Exact` mode.
    pub fn assemble(bank: &FilterBank, sigma2: f64, quant: QuantSpec<'_>) -> Self {
        let k = bank.effective.first().map_or(0, |e| e.cols());
        let dims_per_rrh = bank.output_dims();

        let mut dims = Vec::new();
        let mut bits: Option<Vec<f64>> = match quant {
            QuantSpec::Unquantized => None,
            _ => Some(Vec::new()),
        };
        for (n, &l_n) in dims_per_rrh.iter().enumerate() {
            for l in 0..l_n {
                let keep = match quant {
                    QuantSpec::Unquantized | QuantSpec::Continuous(_) => true,
                    QuantSpec::Exact(plan) => plan.bits[n][l] > 0.0,
                };
                if keep {
                    dims.push(DimId { rrh: n, dim: l });
                    if let (Some(b), QuantSpec::Exact(plan) | QuantSpec::Continuous(plan)) =
                        (bits.as_mut(), quant)
                    {
                        b.push(plan.bits[n][l]);
                    }
                }
            }
        }

        let m = dims.len();
        let mut htilde = ComplexMatrix::zeros(m, k);
        for (row, id) in dims.iter().enumerate() {
            for c in 0..k {
                htilde[(row, c)] = bank.effective[id.rrh][(id.dim, c)];
            }
        }

        // Per-RRH Gram blocks of the filter rows; quantization errors at
        // different radio heads are independent, so cross blocks stay zero.
        let grams: Vec<ComplexMatrix> = bank.filters.iter().map(|v| v.mul(&v.adjoint())).collect();
        let mut noise_gram = ComplexMatrix::zeros(m, m);
        for (i, a) in dims.iter().enumerate() {
            for (j, b) in dims.iter().enumerate() {
                if a.rrh == b.rrh {
                    noise_gram[(i, j)] = grams[a.rrh][(a.dim, b.dim)];
                }
            }
        }

        Self { htilde, noise_gram, sigma2, bits, dims, dims_per_rrh }
    }

    pub fn num_users(&self) -> usize {
        self.htilde.cols()
    }

    pub fn num_dims(&self) -> usize {
        self.htilde.rows()
    }

    pub fn is_quantized(&self) -> bool {
        self.bits.is_some()
    }

    /// Diagonal of the quantization noise covariance at power vector `p`.
    pub fn quant_diag(&self, p: &[f64]) -> Vec<f64> {
        match &self.bits {
            None => vec![0.0; self.num_dims()],
            Some(bits) => (0..self.num_dims())
                .map(|d| {
                    let sig: f64 = (0..self.num_users())
                        .map(|k| p[k] * self.htilde[(d, k)].norm_sqr())
                        .sum();
                    let row_pow = self.noise_gram[(d, d)].re;
                    3.0 * (sig + self.sigma2 * row_pow) * real::exp2(-2.0 * bits[d])
                })
                .collect(),
        }
    }

    /// sigma2 G + Q(p).
    fn base_matrix(&self, p: &[f64]) -> ComplexMatrix {
        let mut a = self.noise_gram.scaled(self.sigma2);
        a.add_diag(&self.quant_diag(p));
        a
    }

    /// sigma2 G + Q(p) + sum_j p_j h_j h_j^H.
    fn full_matrix(&self, p: &[f64]) -> ComplexMatrix {
        let mut a = self.base_matrix(p);
        for j in 0..self.num_users() {
            if p[j] > 0.0 {
                a.add_scaled_outer(&self.htilde.col(j), p[j]);
            }
        }
        a
    }
}

/// Solver tolerances and caps for the power subproblem.
#[derive(Debug, Clone)]
pub struct SolverOptions {
    pub fixed_point_tol: f64,
    pub max_fixed_point_iters: usize,
    /// Any iterate above this power (watts) is declared unbounded.
    pub divergence_cap_w: f64,
    /// Bisection stop width relative to the initial upper bound.
    pub bisect_rel_tol: f64,
    pub max_bisect_iters: usize,
}

impl SolverOptions {
    pub fn from_config(cfg: &SystemConfig) -> Self {
        let max_cap = cfg.power_caps_w().into_iter().fold(f64::MIN_POSITIVE, f64::max);
        Self {
            fixed_point_tol: cfg.tol.fixed_point_rel,
            max_fixed_point_iters: cfg.caps.fixed_point,
            divergence_cap_w: cfg.tol.divergence_factor * max_cap,
            bisect_rel_tol: cfg.tol.bisect_rel,
            max_bisect_iters: cfg.caps.bisect,
        }
    }
}

/// Shared per-power solve: one factorization of the full matrix, then one
/// rank-one downdate per user (Sherman-Morrison), giving
/// `t_k = h_k^H A_full(p)^{-1} h_k` and `x_k = A_full(p)^{-1} h_k`.
struct GramSolve {
    t: Vec<f64>,
    x: Vec<Vec<Complex64>>,
}

fn gram_solve(model: &UplinkModel, p: &[f64]) -> Result<GramSolve> {
    let a = model.full_matrix(p);
    let chol = CholeskyFactor::new(&a)?;
    let k = model.num_users();
    let mut t = Vec::with_capacity(k);
    let mut x = Vec::with_capacity(k);
    for j in 0..k {
        let col = model.htilde.col(j);
        let sol = chol.solve(&col);
        t.push(dot_h(&col, &sol).re);
        x.push(sol);
    }
    Ok(GramSolve { t, x })
}

/// Downdate denominator 1 - p_k t_k; falls back to an explicit solve without
/// user k when rounding makes the shortcut unusable.
fn downdate_den(model: &UplinkModel, p: &[f64], k: usize, t_k: f64) -> Result<f64> {
    let den = 1.0 - p[k] * t_k;
    if den > 1e-12 {
        return Ok(den);
    }
    let mut a = model.base_matrix(p);
    for j in 0..model.num_users() {
        if j != k && p[j] > 0.0 {
            a.add_scaled_outer(&model.htilde.col(j), p[j]);
        }
    }
    let col = model.htilde.col(k);
    let sol = CholeskyFactor::new(&a)?.solve(&col);
    let t_excl = dot_h(&col, &sol).re;
    Ok(1.0 / (1.0 + p[k] * t_excl))
}

/// MMSE receive beamformers `w_k = A_k(p)^{-1} h_k` for every user.
pub fn mmse_beamformers(model: &UplinkModel, p: &[f64]) -> Result<Vec<Vec<Complex64>>> {
    if model.num_dims() == 0 {
        return Ok(vec![Vec::new(); model.num_users()]);
    }
    let gs = gram_solve(model, p)?;
    let mut w = Vec::with_capacity(model.num_users());
    for k in 0..model.num_users() {
        let den = downdate_den(model, p, k, gs.t[k])?;
        w.push(gs.x[k].iter().map(|z| z / den).collect());
    }
    Ok(w)
}

/// Decoding SINR of every user for arbitrary beamformers: signal power over
/// interference plus filtered receiver noise plus quantization noise.
pub fn sinr(model: &UplinkModel, p: &[f64], w: &[Vec<Complex64>]) -> Vec<f64> {
    let k_users = model.num_users();
    let q = model.quant_diag(p);
    (0..k_users)
        .map(|k| {
            let wk = &w[k];
            if wk.is_empty() {
                return 0.0;
            }
            let mut signal = 0.0;
            let mut interference = 0.0;
            for j in 0..k_users {
                let gain = dot_h(wk, &model.htilde.col(j)).norm_sqr();
                if j == k {
                    signal = p[j] * gain;
                } else {
                    interference += p[j] * gain;
                }
            }
            let noise = model.sigma2 * dot_h(wk, &model.noise_gram.matvec(wk)).re;
            let quant: f64 = wk.iter().zip(&q).map(|(z, qi)| z.norm_sqr() * qi).sum();
            let den = interference + noise + quant;
            if signal <= 0.0 || den <= 0.0 {
                0.0
            } else {
                signal / den
            }
        })
        .collect()
}

/// Closed-form SINR under MMSE receivers:
/// `gamma_k = p_k h_k^H A_k(p)^{-1} h_k`.
pub fn sinr_mmse(model: &UplinkModel, p: &[f64]) -> Result<Vec<f64>> {
    if model.num_dims() == 0 {
        return Ok(vec![0.0; model.num_users()]);
    }
    let gs = gram_solve(model, p)?;
    (0..model.num_users())
        .map(|k| {
            let den = downdate_den(model, p, k, gs.t[k])?;
            Ok(p[k] * gs.t[k] / den)
        })
        .collect()
}

/// Power update map: `I_k(p) = gamma / (h_k^H A_k(p)^{-1} h_k)`. The
/// quantization noise inside `A_k` is re-evaluated at `p` on every call.
pub fn interference_map(model: &UplinkModel, p: &[f64], gamma: f64) -> Result<Vec<f64>> {
    if gamma == 0.0 {
        return Ok(vec![0.0; model.num_users()]);
    }
    if model.num_dims() == 0 {
        return Ok(vec![f64::INFINITY; model.num_users()]);
    }
    let gs = gram_solve(model, p)?;
    (0..model.num_users())
        .map(|k| {
            if gs.t[k] <= 0.0 {
                return Ok(f64::INFINITY);
            }
            let den = downdate_den(model, p, k, gs.t[k])?;
            Ok(gamma * den / gs.t[k])
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixedPointStatus {
    Converged,
    Unbounded,
    IterationCap,
}

#[derive(Debug, Clone)]
pub struct FixedPointResult {
    pub status: FixedPointStatus,
    pub p: Vec<f64>,
    pub iterations: usize,
    /// Every iterate including the starting point.
    pub trace: Vec<Vec<f64>>,
}

/// Iterates `p <- I(p)` from `p0` until the relative sup-norm step is below
/// tolerance, a component exceeds the divergence cap, or the iteration cap
/// is hit.
pub fn fixed_point_solve(
    model: &UplinkModel,
    gamma: f64,
    p0: &[f64],
    opts: &SolverOptions,
) -> Result<FixedPointResult> {
    let mut p = p0.to_vec();
    let mut trace = vec![p.clone()];
    for it in 1..=opts.max_fixed_point_iters {
        let next = interference_map(model, &p, gamma)?;
        trace.push(next.clone());
        let diverged = next.iter().any(|&v| !v.is_finite() || v > opts.divergence_cap_w);
        if diverged {
            return Ok(FixedPointResult {
                status: FixedPointStatus::Unbounded,
                p: next,
                iterations: it,
                trace,
            });
        }
        let step = next.iter().zip(&p).map(|(a, b)| real::abs(a - b)).fold(0.0f64, f64::max);
        let scale = next.iter().fold(1.0f64, |m, &v| m.max(v));
        p = next;
        if step <= opts.fixed_point_tol * scale {
            return Ok(FixedPointResult {
                status: FixedPointStatus::Converged,
                p,
                iterations: it,
                trace,
            });
        }
    }
    Ok(FixedPointResult {
        status: FixedPointStatus::IterationCap,
        p,
        iterations: opts.max_fixed_point_iters,
        trace,
    })
}

#[derive(Debug, Clone)]
pub enum Feasibility {
    Feasible(Vec<f64>),
    Infeasible,
    /// The fixed point hit its iteration cap before deciding.
    Indeterminate,
}

/// Checks whether the common target `gamma` is jointly achievable under the
/// per-user power caps. Runs the fixed point from zero; an unbounded iterate
/// is a certificate of infeasibility, and because the converged point is
/// component-wise minimal, so is any cap violation at the fixed point.
pub fn feasibility_check(
    model: &UplinkModel,
    gamma: f64,
    caps: &[f64],
    opts: &SolverOptions,
) -> Result<Feasibility> {
    let zero = vec![0.0; model.num_users()];
    let fp = fixed_point_solve(model, gamma, &zero, opts)?;
    Ok(match fp.status {
        FixedPointStatus::Unbounded => Feasibility::Infeasible,
        FixedPointStatus::IterationCap => Feasibility::Indeterminate,
        FixedPointStatus::Converged => {
            let within = fp.p.iter().zip(caps).all(|(&p, &cap)| p <= cap * (1.0 + 1e-9));
            if within {
                Feasibility::Feasible(fp.p)
            } else {
                Feasibility::Infeasible
            }
        }
    })
}

/// Largest single-user SINR when only one user transmits at its cap; a valid
/// upper bound on the common achievable target.
pub fn single_user_bound(model: &UplinkModel, caps: &[f64]) -> Result<f64> {
    let k_users = model.num_users();
    let mut best = 0.0f64;
    for k in 0..k_users {
        let mut p = vec![0.0; k_users];
        p[k] = caps[k];
        let s = sinr_mmse(model, &p)?;
        best = best.max(s[k]);
    }
    Ok(best)
}

#[derive(Debug, Clone)]
pub struct MaxMinSolution {
    /// Achieved common SINR, recomputed from the returned powers and
    /// beamformers.
    pub gamma: f64,
    pub p: Vec<f64>,
    pub w: Vec<Vec<Complex64>>,
    pub per_user_sinr: Vec<f64>,
    pub bisect_iters: usize,
    /// Feasibility probes that ran out of fixed-point iterations (counted as
    /// infeasible).
    pub indeterminate_events: usize,
}

/// Maximizes the minimum user SINR subject to per-user power caps by
/// bisection on the common target. Returns the last feasible power vector
/// with its MMSE beamformers.
pub fn maxmin_solve(
    model: &UplinkModel,
    caps: &[f64],
    opts: &SolverOptions,
) -> Result<MaxMinSolution> {
    let k_users = model.num_users();
    let zero_solution = |model: &UplinkModel| -> Result<MaxMinSolution> {
        let p = vec![0.0; k_users];
        let w = mmse_beamformers(model, &p).unwrap_or_else(|_| vec![Vec::new(); k_users]);
        Ok(MaxMinSolution {
            gamma: 0.0,
            per_user_sinr: vec![0.0; k_users],
            p,
            w,
            bisect_iters: 0,
            indeterminate_events: 0,
        })
    };

    if model.num_dims() == 0 {
        return zero_solution(model);
    }
    let hi0 = single_user_bound(model, caps)?;
    if !(hi0 > 0.0) {
        return zero_solution(model);
    }

    let eps = opts.bisect_rel_tol * hi0;
    let (mut lo, mut hi) = (0.0f64, hi0);
    let mut best_p: Option<Vec<f64>> = None;
    let mut iters = 0;
    let mut indeterminate = 0;
    while hi - lo > eps && iters < opts.max_bisect_iters {
        iters += 1;
        let mid = 0.5 * (lo + hi);
        match feasibility_check(model, mid, caps, opts)? {
            Feasibility::Feasible(p) => {
                lo = mid;
                best_p = Some(p);
            }
            Feasibility::Infeasible => hi = mid,
            Feasibility::Indeterminate => {
                indeterminate += 1;
                hi = mid;
            }
        }
    }

    match best_p {
        None => zero_solution(model),
        Some(p) => {
            let w = mmse_beamformers(model, &p)?;
            let s = sinr(model, &p, &w);
            let gamma = s.iter().copied().fold(f64::INFINITY, f64::min);
            Ok(MaxMinSolution {
                gamma,
                p,
                w,
                per_user_sinr: s,
                bisect_iters: iters,
                indeterminate_events: indeterminate,
            })
        }
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::scf::{FilterKind, PlanMode};

    /// Model over stacked channels with orthonormal filters (G = I) and the
    /// given bits per dimension.
    pub(crate) fn toy_model(
        htilde: ComplexMatrix,
        sigma2: f64,
        bits: Option<Vec<f64>>,
    ) -> UplinkModel {
        let m = htilde.rows();
        UplinkModel {
            htilde,
            noise_gram: ComplexMatrix::identity(m),
            sigma2,
            bits,
            dims: (0..m).map(|d| DimId { rrh: 0, dim: d }).collect(),
            dims_per_rrh: vec![m],
        }
    }

    pub(crate) fn test_opts() -> SolverOptions {
        SolverOptions {
            fixed_point_tol: 1e-9,
            max_fixed_point_iters: 10_000,
            divergence_cap_w: 1e9,
            bisect_rel_tol: 1e-3,
            max_bisect_iters: 60,
        }
    }

    #[test]
    fn mmse_without_interference_returns_scaled_channel() {
        let h = ComplexMatrix::from_real(2, 1, &[2.0, 0.0]);
        let model = toy_model(h, 1.0, None);
        let w = mmse_beamformers(&model, &[1.0]).unwrap();
        assert!((w[0][0] - Complex64::new(2.0, 0.0)).norm_sqr() < 1e-20);
        assert!(w[0][1].norm_sqr() < 1e-24);
    }

    #[test]
    fn single_user_sinr_matches_closed_form() {
        let h = ComplexMatrix::from_real(2, 1, &[2.0, 0.0]);
        let model = toy_model(h, 1.0, None);
        let w = mmse_beamformers(&model, &[1.0]).unwrap();
        let s = sinr(&model, &[1.0], &w);
        assert!((s[0] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn general_sinr_agrees_with_closed_form_at_mmse() {
        let mut rng = crate::rng::SimRng::seed_from(17);
        for _ in 0..20 {
            let h = ComplexMatrix::from_fn(4, 3, |_, _| rng.complex_normal());
            let bits = Some(alloc::vec![2.0, 3.0, 1.0, 4.0]);
            let model = toy_model(h, 0.5, bits);
            let p = [0.7, 1.3, 0.2];
            let w = mmse_beamformers(&model, &p).unwrap();
            let direct = sinr(&model, &p, &w);
            let closed = sinr_mmse(&model, &p).unwrap();
            for k in 0..3 {
                let rel = (direct[k] - closed[k]).abs() / closed[k].max(1e-300);
                assert!(rel <= 1e-9, "user {k}: {} vs {}", direct[k], closed[k]);
            }
        }
    }

    #[test]
    fn empty_model_yields_zero_sinr() {
        let bank = FilterBank {
            kind: FilterKind::Evd,
            filters: alloc::vec![ComplexMatrix::identity(2)],
            effective: alloc::vec![ComplexMatrix::from_fn(2, 2, |_, _| Complex64::new(1.0, 0.0))],
        };
        let plan = QuantizationPlan::zeros(&[2], PlanMode::Integer);
        let model = UplinkModel::assemble(&bank, 1.0, QuantSpec::Exact(&plan));
        assert_eq!(model.num_dims(), 0);
        let w = mmse_beamformers(&model, &[1.0, 1.0]).unwrap();
        let s = sinr(&model, &[1.0, 1.0], &w);
        assert_eq!(s, alloc::vec![0.0, 0.0]);
        let sol = maxmin_solve(&model, &[1.0, 1.0], &test_opts()).unwrap();
        assert_eq!(sol.gamma, 0.0);
    }

    #[test]
    fn interference_map_is_constant_for_single_user_without_quantization() {
        let h = ComplexMatrix::from_real(2, 1, &[2.0, 0.0]);
        let model = toy_model(h, 1.0, None);
        let gamma = 4.0;
        // gamma * sigma2 / ||h||^2 = 1 regardless of p.
        for p in [0.0, 0.3, 5.0] {
            let i = interference_map(&model, &[p], gamma).unwrap();
            assert!((i[0] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn fixed_point_converges_immediately_on_constant_map() {
        let h = ComplexMatrix::from_real(2, 1, &[2.0, 0.0]);
        let model = toy_model(h, 1.0, None);
        let fp = fixed_point_solve(&model, 4.0, &[0.0], &test_opts()).unwrap();
        assert_eq!(fp.status, FixedPointStatus::Converged);
        assert!((fp.p[0] - 1.0).abs() < 1e-12);
        assert!(fp.iterations <= 2);
    }

    #[test]
    fn colinear_users_above_unit_target_diverge() {
        // Two users sharing a channel direction cap the common SINR at 1.
        let h = ComplexMatrix::from_real(2, 2, &[1.0, 2.0, 0.0, 0.0]);
        let model = toy_model(h, 1.0, None);
        let up = fixed_point_solve(&model, 1.3, &[0.0, 0.0], &test_opts()).unwrap();
        assert_eq!(up.status, FixedPointStatus::Unbounded);
        let down = fixed_point_solve(&model, 0.7, &[0.0, 0.0], &test_opts()).unwrap();
        assert_eq!(down.status, FixedPointStatus::Converged);
    }

    #[test]
    fn trace_from_zero_is_componentwise_nondecreasing() {
        let mut rng = crate::rng::SimRng::seed_from(31);
        let h = ComplexMatrix::from_fn(3, 2, |_, _| rng.complex_normal());
        let model = toy_model(h, 0.3, Some(alloc::vec![2.0, 2.0, 3.0]));
        let fp = fixed_point_solve(&model, 0.8, &[0.0, 0.0], &test_opts()).unwrap();
        assert_eq!(fp.status, FixedPointStatus::Converged);
        for w in fp.trace.windows(2) {
            for k in 0..2 {
                assert!(w[1][k] >= w[0][k] - 1e-15);
            }
        }
    }

    #[test]
    fn feasibility_closed_form_cap_violation() {
        // Single user: the target requires exactly twice the cap.
        let h = ComplexMatrix::from_real(1, 1, &[2.0]);
        let model = toy_model(h, 1.0, None);
        let cap = 0.5;
        let gamma = 2.0 * cap * 4.0;
        match feasibility_check(&model, gamma, &[cap], &test_opts()).unwrap() {
            Feasibility::Infeasible => {}
            other => panic!("expected infeasible, got {other:?}"),
        }
        match feasibility_check(&model, gamma / 2.1, &[cap], &test_opts()).unwrap() {
            Feasibility::Feasible(p) => assert!(p[0] <= cap),
            other => panic!("expected feasible, got {other:?}"),
        }
    }

    #[test]
    fn vanishing_target_is_feasible_with_vanishing_power() {
        let mut rng = crate::rng::SimRng::seed_from(41);
        let h = ComplexMatrix::from_fn(3, 2, |_, _| rng.complex_normal());
        let model = toy_model(h, 0.5, None);
        match feasibility_check(&model, 1e-9, &[1.0, 1.0], &test_opts()).unwrap() {
            Feasibility::Feasible(p) => assert!(p.iter().all(|&v| v < 1e-6)),
            other => panic!("expected feasible, got {other:?}"),
        }
    }

    #[test]
    fn maxmin_single_user_saturates_cap() {
        let h = ComplexMatrix::from_real(2, 1, &[2.0, 0.0]);
        let model = toy_model(h, 1.0, None);
        let cap = 0.8;
        let sol = maxmin_solve(&model, &[cap], &test_opts()).unwrap();
        let expect = cap * 4.0;
        assert!((sol.gamma - expect).abs() <= 2.0 * 1e-3 * expect, "gamma={}", sol.gamma);
        assert!(sol.p[0] <= cap * (1.0 + 1e-9));
    }

    #[test]
    fn maxmin_respects_permutation_symmetry() {
        // User 2's channel is user 1's with the two dims swapped.
        let h = ComplexMatrix::from_real(2, 2, &[1.0, 0.4, 0.4, 1.0]);
        let model = toy_model(h, 0.5, Some(alloc::vec![3.0, 3.0]));
        let sol = maxmin_solve(&model, &[1.0, 1.0], &test_opts()).unwrap();
        assert!((sol.p[0] - sol.p[1]).abs() < 1e-6);
        for k in 0..2 {
            assert!((sol.per_user_sinr[k] - sol.gamma).abs() <= 1e-6 * sol.gamma.max(1e-300));
        }
    }
}
