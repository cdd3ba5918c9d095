//! Experiment presets and CSV emission.
//!
//! Each preset expands to a deterministic list of sweep points; every point
//! aggregates per-trial minimum SINRs into one CSV row. Row order follows
//! the sweep key (fronthaul, antenna count, or radio-head count), then the
//! scheme and filter in their declared order.

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use scf_core::orchestrator::{
    alternating_optimize, deployment_sweep, massive_mimo_solve, mean, percentile, run_benchmark,
    Benchmark, SolveOutcome, SweepScheme,
};
use scf_core::rng::derive_seed;
use scf_core::scenario::{draw_scenario, draw_scenario_centered, Scenario, SystemConfig};
use scf_core::scf::FilterKind;

use crate::config::{ExperimentSpec, ParsedConfig, Preset};
use crate::CliError;

/// One output row. The column set is fixed:
/// `preset,seed,trials,N,M,K,T_bps,scheme,filter,gamma_mean,gamma_db_mean,
/// gamma_p10,runtime_s,status,detail`.
#[derive(Debug, Clone)]
pub struct CsvRow {
    pub preset: String,
    pub seed: u64,
    pub trials: usize,
    pub num_rrh: usize,
    /// Antennas per radio head; fractional when the split is uneven.
    pub antennas: f64,
    pub num_users: usize,
    pub t_bps: f64,
    pub scheme: String,
    pub filter: String,
    pub gamma_mean: f64,
    pub gamma_db_mean: f64,
    pub gamma_p10: f64,
    pub runtime_s: f64,
    pub status: String,
    pub detail: String,
}

impl CsvRow {
    pub const HEADER: &'static str = "preset,seed,trials,N,M,K,T_bps,scheme,filter,\
                                      gamma_mean,gamma_db_mean,gamma_p10,runtime_s,status,detail";

    pub fn to_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{:.3},{},{}",
            self.preset,
            self.seed,
            self.trials,
            self.num_rrh,
            self.antennas,
            self.num_users,
            self.t_bps,
            self.scheme,
            self.filter,
            self.gamma_mean,
            self.gamma_db_mean,
            self.gamma_p10,
            self.runtime_s,
            self.status,
            self.detail
        )
    }
}

fn gamma_db(x: f64) -> f64 {
    10.0 * x.log10()
}

fn status_label(indeterminate: usize) -> String {
    if indeterminate == 0 {
        "ok".to_string()
    } else {
        format!("indeterminate:{indeterminate}")
    }
}

struct RowBuilder<'a> {
    preset: &'a str,
    seed: u64,
    timing: bool,
}

impl RowBuilder<'_> {
    #[allow(clippy::too_many_arguments)]
    fn row(
        &self,
        cfg: &SystemConfig,
        t_bps: f64,
        scheme: &str,
        filter: &str,
        gammas: &[f64],
        indeterminate: usize,
        elapsed: f64,
        detail: String,
    ) -> CsvRow {
        let total: usize = cfg.antennas_per_rrh.iter().sum();
        let gm = mean(gammas);
        CsvRow {
            preset: self.preset.to_string(),
            seed: self.seed,
            trials: gammas.len(),
            num_rrh: cfg.num_rrh,
            antennas: total as f64 / cfg.num_rrh as f64,
            num_users: cfg.num_users,
            t_bps,
            scheme: scheme.to_string(),
            filter: filter.to_string(),
            gamma_mean: gm,
            gamma_db_mean: gamma_db(gm),
            gamma_p10: percentile(gammas, 0.1),
            runtime_s: if self.timing { elapsed } else { 0.0 },
            status: status_label(indeterminate),
            detail,
        }
    }
}

fn with_dims(
    base: &SystemConfig,
    num_rrh: usize,
    antennas: usize,
    num_users: usize,
    radius: f64,
    fronthaul_bps: f64,
) -> SystemConfig {
    SystemConfig {
        num_rrh,
        antennas_per_rrh: vec![antennas; num_rrh],
        num_users,
        area_radius_m: radius,
        fronthaul_bps,
        ..base.clone()
    }
}

/// Runs `trials` seeded scenarios through a solver and collects the minimum
/// SINRs.
fn run_trials<F>(
    cfg: &SystemConfig,
    trials: usize,
    seed: u64,
    solve: F,
) -> Result<(Vec<f64>, usize), CliError>
where
    F: Fn(&SystemConfig, &Scenario) -> Result<SolveOutcome, scf_core::Error>,
{
    let mut gammas = Vec::with_capacity(trials);
    let mut indeterminate = 0;
    for t in 0..trials {
        let scenario = draw_scenario(cfg, derive_seed(seed, t as u64));
        let out = solve(cfg, &scenario)?;
        indeterminate += out.indeterminate_events;
        gammas.push(out.gamma);
    }
    Ok((gammas, indeterminate))
}

struct FilterSweepPlan {
    num_rrh: usize,
    num_users: usize,
    radius: f64,
    t_grid: Vec<f64>,
    /// (antenna count, fronthaul) points; one of the two typically varies.
    points: Vec<(usize, f64)>,
}

fn fig4_plan(desk: bool, spec: &ExperimentSpec) -> FilterSweepPlan {
    let (num_rrh, antennas, num_users, t_grid) = if desk {
        (2, 4, 3, vec![6e7, 1.2e8, 2.4e8, 4.8e8, 1.2e9])
    } else {
        (4, 10, 8, vec![1e8, 3e8, 5e8, 1e9, 1.5e9])
    };
    let mut t_grid = spec.t_grid_bps.clone().unwrap_or(t_grid);
    t_grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let points = t_grid.iter().map(|&t| (antennas, t)).collect();
    FilterSweepPlan { num_rrh, num_users, radius: 500.0, t_grid, points }
}

fn fig9_plan(desk: bool, spec: &ExperimentSpec) -> FilterSweepPlan {
    let (num_rrh, num_users, t_fixed, m_list) = if desk {
        (2, 3, 4.8e8, vec![3, 4, 6, 8])
    } else {
        (4, 8, 5e8, vec![8, 10, 12, 16])
    };
    let mut m_list = spec.m_list.clone().unwrap_or(m_list);
    m_list.sort_unstable();
    let points = m_list.iter().map(|&m| (m, t_fixed)).collect();
    FilterSweepPlan { num_rrh, num_users, radius: 500.0, t_grid: vec![t_fixed], points }
}

fn filter_sweep(
    base: &SystemConfig,
    spec: &ExperimentSpec,
    preset: Preset,
    plan: &FilterSweepPlan,
) -> Result<Vec<CsvRow>, CliError> {
    let filters = spec.filters.clone().unwrap_or_else(|| FilterKind::ALL.to_vec());
    let rb = RowBuilder { preset: preset.label(), seed: spec.seed, timing: spec.timing };
    let mut rows = Vec::new();
    for &(antennas, t) in &plan.points {
        for &filter in &filters {
            let cfg = with_dims(base, plan.num_rrh, antennas, plan.num_users, plan.radius, t);
            let start = Instant::now();
            let (gammas, indet) = run_trials(&cfg, spec.trials, spec.seed, |c, s| {
                alternating_optimize(c, s, filter)
            })?;
            let elapsed = start.elapsed().as_secs_f64();
            rows.push(rb.row(&cfg, t, "joint", filter.label(), &gammas, indet, elapsed, String::new()));
        }
    }
    Ok(rows)
}

fn scheme_sweep(
    base: &SystemConfig,
    spec: &ExperimentSpec,
    preset: Preset,
    desk: bool,
) -> Result<Vec<CsvRow>, CliError> {
    let plan = fig4_plan(desk, spec);
    let num_users = match (preset, desk) {
        (Preset::Fig6, true) => 6,
        (Preset::Fig6, false) => 20,
        _ => plan.num_users,
    };
    let schemes = spec.schemes.clone().unwrap_or_else(|| {
        vec![
            SweepScheme::Joint,
            SweepScheme::Benchmark(Benchmark::BitsOnly),
            SweepScheme::Benchmark(Benchmark::PowerOnly),
            SweepScheme::Benchmark(Benchmark::Static),
        ]
    });
    let antennas = plan.points[0].0;
    let rb = RowBuilder { preset: preset.label(), seed: spec.seed, timing: spec.timing };
    let mut rows = Vec::new();
    for &t in &plan.t_grid {
        for &scheme in &schemes {
            let cfg = with_dims(base, plan.num_rrh, antennas, num_users, plan.radius, t);
            let start = Instant::now();
            let (gammas, indet) = match scheme {
                SweepScheme::Joint => run_trials(&cfg, spec.trials, spec.seed, |c, s| {
                    alternating_optimize(c, s, FilterKind::Evd)
                })?,
                SweepScheme::Benchmark(b) => run_trials(&cfg, spec.trials, spec.seed, |c, s| {
                    run_benchmark(c, s, FilterKind::Evd, b)
                })?,
                SweepScheme::MassiveMimo => {
                    let mm = with_dims(
                        base,
                        1,
                        plan.num_rrh * antennas,
                        num_users,
                        plan.radius,
                        f64::INFINITY,
                    );
                    let mut gammas = Vec::with_capacity(spec.trials);
                    let mut indet = 0;
                    for tr in 0..spec.trials {
                        let sc = draw_scenario_centered(&mm, derive_seed(spec.seed, tr as u64));
                        let out = massive_mimo_solve(&mm, &sc)?;
                        indet += out.indeterminate_events;
                        gammas.push(out.gamma);
                    }
                    (gammas, indet)
                }
            };
            let elapsed = start.elapsed().as_secs_f64();
            let filter = match scheme {
                SweepScheme::MassiveMimo => FilterKind::Identity.label(),
                _ => FilterKind::Evd.label(),
            };
            rows.push(rb.row(&cfg, t, scheme.label(), filter, &gammas, indet, elapsed, String::new()));
        }
    }
    Ok(rows)
}

fn fig7_rows(
    base: &SystemConfig,
    spec: &ExperimentSpec,
    desk: bool,
) -> Result<Vec<CsvRow>, CliError> {
    let (total_antennas, num_users, radius, n_list, t_totals) = if desk {
        (8usize, 4usize, 700.0, vec![2, 4, 8], vec![3e8, 1.2e9])
    } else {
        (50, 20, 700.0, vec![2, 5, 10, 25, 50], vec![1e9, 3e9, 5e9])
    };
    let mut n_list = spec.n_list.clone().unwrap_or(n_list);
    n_list.sort_unstable();
    let mut t_totals = spec.t_grid_bps.clone().unwrap_or(t_totals);
    t_totals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let schemes = spec
        .schemes
        .clone()
        .unwrap_or_else(|| vec![SweepScheme::Joint, SweepScheme::MassiveMimo]);

    let sweep_base = SystemConfig {
        num_rrh: 1,
        antennas_per_rrh: vec![total_antennas],
        num_users,
        area_radius_m: radius,
        rng_seed: spec.seed,
        ..base.clone()
    };
    let start = Instant::now();
    let sweep = deployment_sweep(&sweep_base, &n_list, &t_totals, &schemes, spec.trials)?;
    let elapsed = start.elapsed().as_secs_f64() / sweep.len().max(1) as f64;

    let rb = RowBuilder { preset: "fig7", seed: spec.seed, timing: spec.timing };
    Ok(sweep
        .into_iter()
        .map(|row| {
            let cfg = SystemConfig {
                num_rrh: row.num_rrh,
                antennas_per_rrh: row.antennas.clone(),
                num_users,
                ..sweep_base.clone()
            };
            let filter = match row.scheme {
                SweepScheme::MassiveMimo => FilterKind::Identity.label(),
                _ => FilterKind::Evd.label(),
            };
            rb.row(
                &cfg,
                row.total_fronthaul_bps,
                row.scheme.label(),
                filter,
                &row.gammas,
                row.indeterminate_events,
                elapsed,
                String::new(),
            )
        })
        .collect())
}

fn table5_rows(
    base: &SystemConfig,
    spec: &ExperimentSpec,
    desk: bool,
) -> Result<Vec<CsvRow>, CliError> {
    let (num_rrh, antennas, num_users, budgets) = if desk {
        (2, 4, 3, vec![4e7, 3e8, 9e8])
    } else {
        (4, 10, 8, vec![1e8, 5e8, 1e9])
    };
    let mut budgets = spec.t_grid_bps.clone().unwrap_or(budgets);
    budgets.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let rb = RowBuilder { preset: "table5", seed: spec.seed, timing: spec.timing };
    let mut rows = Vec::new();
    for &t in &budgets {
        let cfg = with_dims(base, num_rrh, antennas, num_users, 500.0, t);
        let start = Instant::now();
        let scenario = draw_scenario(&cfg, derive_seed(spec.seed, 0));
        let out = alternating_optimize(&cfg, &scenario, FilterKind::Evd)?;
        let elapsed = start.elapsed().as_secs_f64();
        let plan = out.plan.as_ref().expect("finite budgets yield a plan");
        let detail = (0..num_rrh)
            .map(|n| format!("rrh{n}={}of{}", plan.quantized_dims(n), plan.bits[n].len()))
            .collect::<Vec<_>>()
            .join(";");
        rows.push(rb.row(
            &cfg,
            t,
            "joint",
            FilterKind::Evd.label(),
            &[out.gamma],
            out.indeterminate_events,
            elapsed,
            detail,
        ));
    }
    Ok(rows)
}

fn custom_rows(base: &SystemConfig, spec: &ExperimentSpec) -> Result<Vec<CsvRow>, CliError> {
    let mut t_grid = spec.t_grid_bps.clone().unwrap_or_else(|| vec![base.fronthaul_bps]);
    t_grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let filters = spec.filters.clone().unwrap_or_else(|| vec![FilterKind::Evd]);
    let schemes = spec.schemes.clone().unwrap_or_else(|| vec![SweepScheme::Joint]);

    let rb = RowBuilder { preset: "custom", seed: spec.seed, timing: spec.timing };
    let mut rows = Vec::new();
    for &t in &t_grid {
        for &scheme in &schemes {
            for &filter in &filters {
                let cfg = SystemConfig { fronthaul_bps: t, ..base.clone() };
                let start = Instant::now();
                let (gammas, indet) = match scheme {
                    SweepScheme::Joint => run_trials(&cfg, spec.trials, spec.seed, |c, s| {
                        alternating_optimize(c, s, filter)
                    })?,
                    SweepScheme::Benchmark(b) => {
                        run_trials(&cfg, spec.trials, spec.seed, |c, s| {
                            run_benchmark(c, s, filter, b)
                        })?
                    }
                    SweepScheme::MassiveMimo => {
                        let total: usize = cfg.antennas_per_rrh.iter().sum();
                        let mm = SystemConfig {
                            num_rrh: 1,
                            antennas_per_rrh: vec![total],
                            fronthaul_bps: f64::INFINITY,
                            ..cfg.clone()
                        };
                        let mut gammas = Vec::with_capacity(spec.trials);
                        let mut indet = 0;
                        for tr in 0..spec.trials {
                            let sc =
                                draw_scenario_centered(&mm, derive_seed(spec.seed, tr as u64));
                            let out = massive_mimo_solve(&mm, &sc)?;
                            indet += out.indeterminate_events;
                            gammas.push(out.gamma);
                        }
                        (gammas, indet)
                    }
                };
                let elapsed = start.elapsed().as_secs_f64();
                rows.push(rb.row(
                    &cfg,
                    t,
                    scheme.label(),
                    filter.label(),
                    &gammas,
                    indet,
                    elapsed,
                    String::new(),
                ));
            }
        }
    }
    Ok(rows)
}

/// Expands the configured experiment into CSV rows. Deterministic for a
/// given configuration unless wall-clock timing is enabled.
pub fn run_experiment(cfg: &ParsedConfig) -> Result<Vec<CsvRow>, CliError> {
    let spec = &cfg.experiment;
    let base = &cfg.system;
    let desk = spec.desk_scale;
    match spec.preset {
        Preset::Fig4 => filter_sweep(base, spec, Preset::Fig4, &fig4_plan(desk, spec)),
        Preset::Fig9 => filter_sweep(base, spec, Preset::Fig9, &fig9_plan(desk, spec)),
        Preset::Fig5 => scheme_sweep(base, spec, Preset::Fig5, desk),
        Preset::Fig6 => scheme_sweep(base, spec, Preset::Fig6, desk),
        Preset::Fig7 => fig7_rows(base, spec, desk),
        Preset::Table5 => table5_rows(base, spec, desk),
        Preset::Custom => custom_rows(base, spec),
    }
}

/// Renders rows as a CSV document (header + one line per row).
pub fn csv_string(rows: &[CsvRow]) -> String {
    let mut out = String::from(CsvRow::HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.to_line());
        out.push('\n');
    }
    out
}

/// Writes rows to a CSV file.
pub fn write_csv(rows: &[CsvRow], path: &Path) -> std::io::Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(csv_string(rows).as_bytes())
}
