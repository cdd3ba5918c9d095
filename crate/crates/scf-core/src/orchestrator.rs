//! Top-level resource allocation pipelines: alternating optimization of
//! powers/beamformers and quantization bits, the reduced benchmark schemes,
//! the co-located antenna (massive MIMO) baseline, and antenna deployment
//! sweeps.

use alloc::vec;
use alloc::vec::Vec;

use crate::bits::{effective_theta, relaxed_maxmin, round_bits, PgOptions};
use crate::maxmin::{
    maxmin_solve, mmse_beamformers, sinr, MaxMinSolution, QuantSpec, SolverOptions, UplinkModel,
};
use crate::real;
use crate::rng::derive_seed;
use crate::scenario::{draw_scenario, draw_scenario_centered, Scenario, SystemConfig};
use crate::scf::{FilterBank, FilterKind, PlanMode, QuantizationPlan};
use crate::{Complex64, Error, Result};

/// Why the alternating loop stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// SINR improvement fell below the threshold.
    Converged,
    /// Integer rounding decreased the SINR; the best earlier iterate is
    /// returned.
    Decreased,
    /// Iteration cap reached.
    Cap,
}

/// Result of one full resource allocation run on one scenario.
#[derive(Debug, Clone)]
pub struct SolveOutcome {
    /// Achieved minimum SINR (linear), recomputed from `p`, `w`, `plan`.
    pub gamma: f64,
    pub p: Vec<f64>,
    /// Beamformers over the retained dimensions of `plan`.
    pub w: Vec<Vec<Complex64>>,
    /// Integer bit allocation; `None` when fronthaul is unconstrained.
    pub plan: Option<QuantizationPlan>,
    /// Minimum SINR of each completed iterate.
    pub trace: Vec<f64>,
    pub termination: Termination,
    pub filter: FilterKind,
    /// Solver probes abandoned at an iteration cap (0 in a clean run).
    pub indeterminate_events: usize,
}

/// Reduced allocation schemes used as baselines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Benchmark {
    /// Full power, optimized bit allocation with iterated MMSE refresh.
    BitsOnly,
    /// Optimized power control with equal bit allocation.
    PowerOnly,
    /// Full power and equal bits, single MMSE computation.
    Static,
}

impl Benchmark {
    pub fn label(self) -> &'static str {
        match self {
            Benchmark::BitsOnly => "bits_only",
            Benchmark::PowerOnly => "power_only",
            Benchmark::Static => "static",
        }
    }
}

/// Equal split of each fronthaul budget over all filter output dimensions,
/// floored to integers. Budgets below one bit per dimension floor to zero.
pub fn equal_bits_plan(
    budgets_bps: &[f64],
    bandwidth_hz: f64,
    dims: &[usize],
) -> QuantizationPlan {
    let bits = budgets_bps
        .iter()
        .zip(dims)
        .map(|(&t, &l)| {
            let per_dim = real::floor(t / (2.0 * bandwidth_hz * l as f64));
            vec![per_dim; l]
        })
        .collect();
    QuantizationPlan { bits, mode: PlanMode::Integer }
}

/// Starting plan for the alternating loop: equal bits over all dimensions
/// when the budget affords at least one bit everywhere, otherwise equal bits
/// concentrated on the leading dimensions so the loop never starts from an
/// all-pruned (zero-rate) state.
pub fn initial_plan(budgets_bps: &[f64], bandwidth_hz: f64, dims: &[usize]) -> QuantizationPlan {
    let bits = budgets_bps
        .iter()
        .zip(dims)
        .map(|(&t, &l)| {
            let beta = t / (2.0 * bandwidth_hz); // total bits affordable
            let active = l.min(real::floor(beta) as usize);
            let mut row = vec![0.0; l];
            if active > 0 {
                let per_dim = real::floor(beta / active as f64);
                for slot in row.iter_mut().take(active) {
                    *slot = per_dim;
                }
            }
            row
        })
        .collect();
    QuantizationPlan { bits, mode: PlanMode::Integer }
}

struct PipelineSettings {
    solver: SolverOptions,
    pg: PgOptions,
    bandwidth_hz: f64,
    budgets: Vec<f64>,
    caps_w: Vec<f64>,
    bits_bisect_rel: f64,
    max_bisect: usize,
    alt_rel: f64,
    max_alt: usize,
    rounding_eps: f64,
}

impl PipelineSettings {
    fn new(cfg: &SystemConfig) -> Self {
        Self {
            solver: SolverOptions::from_config(cfg),
            pg: PgOptions {
                solver_tol: cfg.tol.solver_tol,
                max_iters: cfg.caps.projected_gradient,
            },
            bandwidth_hz: cfg.bandwidth_hz,
            budgets: cfg.fronthaul_budgets(),
            caps_w: cfg.power_caps_w(),
            bits_bisect_rel: cfg.tol.bits_bisect_rel,
            max_bisect: cfg.caps.bisect,
            alt_rel: cfg.tol.alt_rel,
            max_alt: cfg.caps.alternating,
            rounding_eps: cfg.tol.rounding_eps,
        }
    }
}

fn min_sinr(values: &[f64]) -> f64 {
    values.iter().copied().fold(f64::INFINITY, f64::min).max(0.0)
}

/// Unconstrained-fronthaul solve: one power/beamforming pass, no plan.
fn unquantized_outcome(
    bank: &FilterBank,
    sigma2: f64,
    s: &PipelineSettings,
) -> Result<SolveOutcome> {
    let model = UplinkModel::assemble(bank, sigma2, QuantSpec::Unquantized);
    let sol = maxmin_solve(&model, &s.caps_w, &s.solver)?;
    Ok(SolveOutcome {
        gamma: sol.gamma,
        trace: vec![sol.gamma],
        p: sol.p,
        w: sol.w,
        plan: None,
        termination: Termination::Converged,
        filter: bank.kind,
        indeterminate_events: sol.indeterminate_events,
    })
}

/// One bit-allocation pass at frozen powers and beamformers: continuous
/// relaxation maximized by bisection, then integer rounding. Returns the new
/// plan, the refreshed MMSE beamformers, and the achieved exact-model SINR.
#[allow(clippy::too_many_arguments)]
fn bits_stage(
    bank: &FilterBank,
    sigma2: f64,
    model: &UplinkModel,
    p: &[f64],
    w: &[Vec<Complex64>],
    s: &PipelineSettings,
    indeterminate: &mut usize,
) -> Result<(QuantizationPlan, UplinkModel, Vec<Vec<Complex64>>, f64)> {
    let theta = effective_theta(model, p, w);
    let relaxed = relaxed_maxmin(
        &theta,
        &s.budgets,
        s.bandwidth_hz,
        f64::INFINITY,
        s.bits_bisect_rel,
        s.max_bisect,
        &s.pg,
    );
    *indeterminate += relaxed.indeterminate_events;
    let plan = round_bits(&relaxed.bits, &s.budgets, s.bandwidth_hz, s.rounding_eps);
    let new_model = UplinkModel::assemble(bank, sigma2, QuantSpec::Exact(&plan));
    let w2 = mmse_beamformers(&new_model, p)?;
    let gamma = min_sinr(&sinr(&new_model, p, &w2));
    Ok((plan, new_model, w2, gamma))
}

struct BestIterate {
    gamma: f64,
    p: Vec<f64>,
    w: Vec<Vec<Complex64>>,
    plan: QuantizationPlan,
}

impl BestIterate {
    fn consider(&mut self, gamma: f64, p: &[f64], w: &[Vec<Complex64>], plan: &QuantizationPlan) {
        if gamma > self.gamma {
            self.gamma = gamma;
            self.p = p.to_vec();
            self.w = w.to_vec();
            self.plan = plan.clone();
        }
    }
}

/// Joint resource allocation by alternating between the power/beamforming
/// subproblem (fixed bits) and the bit-allocation subproblem (fixed powers
/// and beamformers).
///
/// The loop starts from an equal bit split, stops when the minimum SINR
/// improves by less than the threshold or decreases (integer rounding can
/// lose ground), and returns the best complete iterate seen.
pub fn alternating_optimize(
    cfg: &SystemConfig,
    scenario: &Scenario,
    kind: FilterKind,
) -> Result<SolveOutcome> {
    cfg.validate()?;
    let s = PipelineSettings::new(cfg);
    let sigma2 = scenario.noise_power_w;
    let bank = FilterBank::build(&scenario.channels, cfg.pilot_power_w(), sigma2, kind)?;
    if s.budgets.iter().all(|b| b.is_infinite()) {
        return unquantized_outcome(&bank, sigma2, &s);
    }

    let mut indeterminate = 0usize;
    let plan = initial_plan(&s.budgets, s.bandwidth_hz, &bank.output_dims());
    let mut model = UplinkModel::assemble(&bank, sigma2, QuantSpec::Exact(&plan));
    let mut sol = maxmin_solve(&model, &s.caps_w, &s.solver)?;
    indeterminate += sol.indeterminate_events;

    let mut trace = vec![sol.gamma];
    let mut best =
        BestIterate { gamma: sol.gamma, p: sol.p.clone(), w: sol.w.clone(), plan: plan.clone() };
    let mut termination = Termination::Cap;

    if sol.gamma > 0.0 {
        let mut prev = sol.gamma;
        for _ in 0..s.max_alt {
            let (new_plan, new_model, w2, gamma_i) =
                bits_stage(&bank, sigma2, &model, &sol.p, &sol.w, &s, &mut indeterminate)?;
            trace.push(gamma_i);
            best.consider(gamma_i, &sol.p, &w2, &new_plan);
            if gamma_i < prev {
                termination = Termination::Decreased;
                break;
            }
            if gamma_i - prev <= s.alt_rel * prev.max(f64::MIN_POSITIVE) {
                termination = Termination::Converged;
                break;
            }
            prev = gamma_i;
            model = new_model;
            sol = maxmin_solve(&model, &s.caps_w, &s.solver)?;
            indeterminate += sol.indeterminate_events;
        }
    } else {
        termination = Termination::Converged;
    }

    Ok(SolveOutcome {
        gamma: best.gamma,
        p: best.p,
        w: best.w,
        plan: Some(best.plan),
        trace,
        termination,
        filter: kind,
        indeterminate_events: indeterminate,
    })
}

/// Runs one of the reduced baseline schemes.
pub fn run_benchmark(
    cfg: &SystemConfig,
    scenario: &Scenario,
    kind: FilterKind,
    scheme: Benchmark,
) -> Result<SolveOutcome> {
    cfg.validate()?;
    let s = PipelineSettings::new(cfg);
    let sigma2 = scenario.noise_power_w;
    let bank = FilterBank::build(&scenario.channels, cfg.pilot_power_w(), sigma2, kind)?;
    let dims = bank.output_dims();
    let mut indeterminate = 0usize;

    match scheme {
        Benchmark::PowerOnly => {
            let plan = equal_bits_plan(&s.budgets, s.bandwidth_hz, &dims);
            let model = UplinkModel::assemble(&bank, sigma2, QuantSpec::Exact(&plan));
            let sol: MaxMinSolution = maxmin_solve(&model, &s.caps_w, &s.solver)?;
            Ok(SolveOutcome {
                gamma: sol.gamma,
                trace: vec![sol.gamma],
                p: sol.p,
                w: sol.w,
                plan: Some(plan),
                termination: Termination::Converged,
                filter: kind,
                indeterminate_events: sol.indeterminate_events,
            })
        }
        Benchmark::Static => {
            let plan = equal_bits_plan(&s.budgets, s.bandwidth_hz, &dims);
            let model = UplinkModel::assemble(&bank, sigma2, QuantSpec::Exact(&plan));
            let p = s.caps_w.clone();
            let w = mmse_beamformers(&model, &p)?;
            let gamma = min_sinr(&sinr(&model, &p, &w));
            Ok(SolveOutcome {
                gamma,
                trace: vec![gamma],
                p,
                w,
                plan: Some(plan),
                termination: Termination::Converged,
                filter: kind,
                indeterminate_events: 0,
            })
        }
        Benchmark::BitsOnly => {
            let p = s.caps_w.clone();
            let plan = initial_plan(&s.budgets, s.bandwidth_hz, &dims);
            let mut model = UplinkModel::assemble(&bank, sigma2, QuantSpec::Exact(&plan));
            let mut w = mmse_beamformers(&model, &p)?;
            let gamma0 = min_sinr(&sinr(&model, &p, &w));
            let mut trace = vec![gamma0];
            let mut best =
                BestIterate { gamma: gamma0, p: p.clone(), w: w.clone(), plan: plan.clone() };
            let mut termination = Termination::Cap;

            if gamma0 > 0.0 {
                let mut prev = gamma0;
                for _ in 0..s.max_alt {
                    let (new_plan, new_model, w2, gamma_i) =
                        bits_stage(&bank, sigma2, &model, &p, &w, &s, &mut indeterminate)?;
                    trace.push(gamma_i);
                    best.consider(gamma_i, &p, &w2, &new_plan);
                    if gamma_i < prev {
                        termination = Termination::Decreased;
                        break;
                    }
                    if gamma_i - prev <= s.alt_rel * prev.max(f64::MIN_POSITIVE) {
                        termination = Termination::Converged;
                        break;
                    }
                    prev = gamma_i;
                    model = new_model;
                    w = w2;
                }
            } else {
                termination = Termination::Converged;
            }

            Ok(SolveOutcome {
                gamma: best.gamma,
                p: best.p,
                w: best.w,
                plan: Some(best.plan),
                trace,
                termination,
                filter: kind,
                indeterminate_events: indeterminate,
            })
        }
    }
}

/// Baseline with all antennas co-located and no fronthaul constraint: plain
/// max-min power control and MMSE beamforming on the raw channels.
pub fn massive_mimo_solve(cfg: &SystemConfig, scenario: &Scenario) -> Result<SolveOutcome> {
    cfg.validate()?;
    let s = PipelineSettings::new(cfg);
    let sigma2 = scenario.noise_power_w;
    let bank =
        FilterBank::build(&scenario.channels, cfg.pilot_power_w(), sigma2, FilterKind::Identity)?;
    unquantized_outcome(&bank, sigma2, &s)
}

/// Splits a total antenna count over n radio heads as evenly as possible
/// (remainder heads get one extra antenna).
pub fn split_antennas(total: usize, n: usize) -> Result<Vec<usize>> {
    if n == 0 || total < n {
        return Err(Error::invalid(
            "num_rrh",
            alloc::format!("cannot split {total} antennas over {n} radio heads"),
        ));
    }
    let base = total / n;
    let extra = total % n;
    Ok((0..n).map(|i| if i < extra { base + 1 } else { base }).collect())
}

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

/// Linear-interpolation percentile of an unsorted sample, q in [0, 1].
pub fn percentile(values: &[f64], q: f64) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let pos = q.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let lo = real::floor(pos) as usize;
    let hi = real::ceil(pos) as usize;
    if lo == hi {
        v[lo]
    } else {
        v[lo] + (pos - lo as f64) * (v[hi] - v[lo])
    }
}

/// Allocation scheme evaluated at a sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepScheme {
    /// Alternating optimization with the eigenspace filter.
    Joint,
    Benchmark(Benchmark),
    /// All antennas co-located at the disk center, no fronthaul limit.
    MassiveMimo,
}

impl SweepScheme {
    pub fn label(self) -> &'static str {
        match self {
            SweepScheme::Joint => "joint",
            SweepScheme::Benchmark(b) => b.label(),
            SweepScheme::MassiveMimo => "massive_mimo",
        }
    }
}

/// Aggregated result of one (deployment, fronthaul, scheme) sweep point.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub num_rrh: usize,
    pub antennas: Vec<usize>,
    pub fronthaul_per_rrh_bps: f64,
    pub total_fronthaul_bps: f64,
    pub scheme: SweepScheme,
    pub gamma_mean: f64,
    pub gamma_p10: f64,
    /// Per-trial minimum SINRs, in trial order.
    pub gammas: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub indeterminate_events: usize,
}

/// Sweeps radio-head counts and total fronthaul budgets for a fixed total
/// antenna count. For every (N, T) point the total budget is split evenly
/// over radio heads and the antennas as evenly as possible; each trial draws
/// a fresh deployment from a per-trial seed shared across points so that
/// comparisons are paired.
pub fn deployment_sweep(
    base: &SystemConfig,
    n_list: &[usize],
    t_totals_bps: &[f64],
    schemes: &[SweepScheme],
    trials: usize,
) -> Result<Vec<SweepRow>> {
    let total_antennas: usize = base.antennas_per_rrh.iter().sum();
    let seed = base.rng_seed;
    let mut rows = Vec::new();

    for &t_total in t_totals_bps {
        for &scheme in schemes {
            match scheme {
                SweepScheme::MassiveMimo => {
                    let cfg = SystemConfig {
                        num_rrh: 1,
                        antennas_per_rrh: vec![total_antennas],
                        fronthaul_bps: f64::INFINITY,
                        ..base.clone()
                    };
                    let mut gammas = Vec::with_capacity(trials);
                    let mut indet = 0;
                    for t in 0..trials {
                        let sc = draw_scenario_centered(&cfg, derive_seed(seed, t as u64));
                        let out = massive_mimo_solve(&cfg, &sc)?;
                        indet += out.indeterminate_events;
                        gammas.push(out.gamma);
                    }
                    rows.push(SweepRow {
                        num_rrh: 1,
                        antennas: vec![total_antennas],
                        fronthaul_per_rrh_bps: f64::INFINITY,
                        total_fronthaul_bps: t_total,
                        scheme,
                        gamma_mean: mean(&gammas),
                        gamma_p10: percentile(&gammas, 0.1),
                        gammas,
                        trials,
                        seed,
                        indeterminate_events: indet,
                    });
                }
                _ => {
                    for &n in n_list {
                        let antennas = split_antennas(total_antennas, n)?;
                        let cfg = SystemConfig {
                            num_rrh: n,
                            antennas_per_rrh: antennas.clone(),
                            fronthaul_bps: t_total / n as f64,
                            ..base.clone()
                        };
                        let mut gammas = Vec::with_capacity(trials);
                        let mut indet = 0;
                        for t in 0..trials {
                            let sc = draw_scenario(&cfg, derive_seed(seed, t as u64));
                            let out = match scheme {
                                SweepScheme::Joint => {
                                    alternating_optimize(&cfg, &sc, FilterKind::Evd)?
                                }
                                SweepScheme::Benchmark(b) => {
                                    run_benchmark(&cfg, &sc, FilterKind::Evd, b)?
                                }
                                SweepScheme::MassiveMimo => unreachable!(),
                            };
                            indet += out.indeterminate_events;
                            gammas.push(out.gamma);
                        }
                        rows.push(SweepRow {
                            num_rrh: n,
                            antennas,
                            fronthaul_per_rrh_bps: t_total / n as f64,
                            total_fronthaul_bps: t_total,
                            scheme,
                            gamma_mean: mean(&gammas),
                            gamma_p10: percentile(&gammas, 0.1),
                            gammas,
                            trials,
                            seed,
                            indeterminate_events: indet,
                        });
                    }
                }
            }
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn desk_config() -> SystemConfig {
        SystemConfig {
            num_rrh: 2,
            antennas_per_rrh: vec![4, 4],
            num_users: 3,
            fronthaul_bps: 2.4e8,
            ..SystemConfig::default()
        }
    }

    #[test]
    fn equal_split_matches_reference_arithmetic() {
        // 0.5 Gbps over 8 dimensions at 10 MHz: floor(3.125) = 3 bits each.
        let plan = equal_bits_plan(&[5e8], 1e7, &[8]);
        assert_eq!(plan.bits[0], vec![3.0; 8]);
        let init = initial_plan(&[5e8], 1e7, &[8]);
        assert_eq!(init.bits, plan.bits);
    }

    #[test]
    fn tight_budgets_concentrate_initial_bits() {
        // 3 total bits over 4 dimensions: plain equal split floors to zero,
        // the initializer keeps three one-bit dimensions.
        let equal = equal_bits_plan(&[6e7], 1e7, &[4]);
        assert_eq!(equal.bits[0], vec![0.0; 4]);
        let init = initial_plan(&[6e7], 1e7, &[4]);
        assert_eq!(init.bits[0], vec![1.0, 1.0, 1.0, 0.0]);
        assert!(init.respects_budgets(&[6e7], 1e7));
    }

    #[test]
    fn antenna_split_reference_cases() {
        assert_eq!(split_antennas(50, 4).unwrap(), vec![13, 13, 12, 12]);
        assert_eq!(split_antennas(50, 50).unwrap(), vec![1; 50]);
        assert!(split_antennas(3, 4).is_err());
    }

    #[test]
    fn percentile_interpolates() {
        let v = [4.0, 1.0, 3.0, 2.0];
        assert_eq!(percentile(&v, 0.0), 1.0);
        assert_eq!(percentile(&v, 1.0), 4.0);
        assert!((percentile(&v, 0.5) - 2.5).abs() < 1e-12);
    }

    #[test]
    fn alternating_trace_is_nondecreasing_until_last() {
        let cfg = desk_config();
        let sc = draw_scenario(&cfg, 3);
        let out = alternating_optimize(&cfg, &sc, FilterKind::Evd).unwrap();
        assert!(out.gamma > 0.0);
        let t = &out.trace;
        for i in 1..t.len().saturating_sub(1) {
            assert!(t[i] >= t[i - 1] - 1e-12, "trace {t:?}");
        }
        let max = t.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        assert!((out.gamma - max).abs() <= 1e-12 * max.abs().max(1.0));
        assert!(out.gamma >= t[0] - 1e-12);
    }

    #[test]
    fn outcome_is_self_consistent() {
        let cfg = desk_config();
        let sc = draw_scenario(&cfg, 8);
        let out = alternating_optimize(&cfg, &sc, FilterKind::Evd).unwrap();
        let bank = FilterBank::build(
            &sc.channels,
            cfg.pilot_power_w(),
            sc.noise_power_w,
            FilterKind::Evd,
        )
        .unwrap();
        let plan = out.plan.as_ref().unwrap();
        let model = UplinkModel::assemble(&bank, sc.noise_power_w, QuantSpec::Exact(plan));
        let s = sinr(&model, &out.p, &out.w);
        let recomputed = s.iter().copied().fold(f64::INFINITY, f64::min);
        let rel = (recomputed - out.gamma).abs() / out.gamma.max(1e-300);
        assert!(rel <= 1e-9, "{recomputed} vs {}", out.gamma);
    }

    #[test]
    fn infinite_budget_reduces_to_single_solve() {
        let mut cfg = desk_config();
        cfg.fronthaul_bps = f64::INFINITY;
        let sc = draw_scenario(&cfg, 4);
        let out = alternating_optimize(&cfg, &sc, FilterKind::Identity).unwrap();
        assert!(out.plan.is_none());
        assert_eq!(out.trace.len(), 1);

        // Identical to the co-located baseline on the same channels.
        let mm = massive_mimo_solve(&cfg, &sc).unwrap();
        assert!((out.gamma - mm.gamma).abs() <= 1e-12 * out.gamma.max(1.0));
    }

    #[test]
    fn static_scheme_is_deterministic_and_dominated() {
        let cfg = desk_config();
        let sc = draw_scenario(&cfg, 12);
        let a = run_benchmark(&cfg, &sc, FilterKind::Evd, Benchmark::Static).unwrap();
        let b = run_benchmark(&cfg, &sc, FilterKind::Evd, Benchmark::Static).unwrap();
        assert_eq!(a.gamma, b.gamma);
        assert_eq!(a.trace.len(), 1);

        // Max-min power control over the same plan can only do better.
        let pow = run_benchmark(&cfg, &sc, FilterKind::Evd, Benchmark::PowerOnly).unwrap();
        assert!(pow.gamma >= a.gamma - 1e-9 * a.gamma.max(1.0));
    }

    #[test]
    fn power_only_single_user_matches_direct_solve() {
        let mut cfg = desk_config();
        cfg.num_users = 1;
        let sc = draw_scenario(&cfg, 21);
        let bench = run_benchmark(&cfg, &sc, FilterKind::Evd, Benchmark::PowerOnly).unwrap();

        let bank = FilterBank::build(
            &sc.channels,
            cfg.pilot_power_w(),
            sc.noise_power_w,
            FilterKind::Evd,
        )
        .unwrap();
        let plan = equal_bits_plan(&cfg.fronthaul_budgets(), cfg.bandwidth_hz, &bank.output_dims());
        let model = UplinkModel::assemble(&bank, sc.noise_power_w, QuantSpec::Exact(&plan));
        let sol = maxmin_solve(&model, &cfg.power_caps_w(), &SolverOptions::from_config(&cfg))
            .unwrap();
        assert!((bench.gamma - sol.gamma).abs() <= 1e-9 * sol.gamma.max(1e-300));
    }

    #[test]
    fn joint_beats_first_iterate_and_benchmarks_on_a_seed() {
        let cfg = desk_config();
        let sc = draw_scenario(&cfg, 33);
        let joint = alternating_optimize(&cfg, &sc, FilterKind::Evd).unwrap();
        assert!(joint.gamma >= joint.trace[0] - 1e-12);
        let pow = run_benchmark(&cfg, &sc, FilterKind::Evd, Benchmark::PowerOnly).unwrap();
        assert!(joint.gamma >= pow.gamma * (1.0 - 1e-9));
        let st = run_benchmark(&cfg, &sc, FilterKind::Evd, Benchmark::Static).unwrap();
        assert!(joint.gamma >= st.gamma * (1.0 - 1e-9));
    }

    #[test]
    fn massive_mimo_orthogonal_users_hit_their_caps() {
        // Two users on orthogonal channels decouple completely.
        let cfg = SystemConfig {
            num_rrh: 1,
            antennas_per_rrh: vec![2],
            num_users: 2,
            fronthaul_bps: f64::INFINITY,
            ..SystemConfig::default()
        };
        let mut sc = draw_scenario_centered(&cfg, 1);
        let g = 1e-10;
        sc.channels[0] = crate::numerics::ComplexMatrix::from_real(
            2,
            2,
            &[real::sqrt(g), 0.0, 0.0, real::sqrt(2.0 * g)],
        );
        let out = massive_mimo_solve(&cfg, &sc).unwrap();
        let cap = cfg.power_caps_w()[0];
        let expect = cap * g / sc.noise_power_w;
        assert!(
            (out.gamma - expect).abs() <= 2e-3 * expect,
            "gamma {} expect {expect}",
            out.gamma
        );
        // The weak user is the bottleneck and ends up at its cap; the strong
        // user needs only half as much for the common target (powers are
        // component-wise minimal).
        assert!((out.p[0] - cap).abs() < 1e-2 * cap);
        assert!((out.p[1] - cap / 2.0).abs() < 1e-2 * cap);
        assert!(out.p.iter().all(|&p| p <= cap * (1.0 + 1e-9)));
    }

    #[test]
    fn sweep_points_share_user_draws() {
        let base = SystemConfig {
            num_rrh: 1,
            antennas_per_rrh: vec![4],
            num_users: 2,
            area_radius_m: 300.0,
            ..SystemConfig::default()
        };
        let rows = deployment_sweep(
            &base,
            &[2, 4],
            &[4e8],
            &[SweepScheme::Joint, SweepScheme::MassiveMimo],
            2,
        )
        .unwrap();
        assert_eq!(rows.len(), 3);
        for row in &rows {
            assert_eq!(row.gammas.len(), 2);
            assert_eq!(row.antennas.iter().sum::<usize>(), 4);
        }
    }
}
