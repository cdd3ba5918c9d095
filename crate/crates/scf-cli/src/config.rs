//! Flat key/value configuration files with dotted sections.
//!
//! Three sections are recognized: `system.*` (physical parameters),
//! `algo.*` (tolerances and iteration caps), and `experiment.*` (preset,
//! trials, seed, output, sweep overrides). Lines are `key = value`, `#`
//! starts a comment, unknown or duplicated keys are rejected with the line
//! number.

use std::fmt;

use scf_core::orchestrator::{Benchmark, SweepScheme};
use scf_core::scf::FilterKind;
use scf_core::scenario::SystemConfig;

/// Named experiment preset; determines the swept variable and row layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Spatial filter comparison versus per-RRH fronthaul capacity.
    Fig4,
    /// Allocation scheme comparison versus fronthaul, few users.
    Fig5,
    /// Allocation scheme comparison versus fronthaul, many users.
    Fig6,
    /// Deployment sweep: radio-head count versus co-located baseline under a
    /// total fronthaul budget.
    Fig7,
    /// Spatial filter comparison versus per-RRH antenna count.
    Fig9,
    /// Quantized-dimension counts per radio head across budgets, one seed.
    Table5,
    /// Single sweep driven entirely by the config file.
    Custom,
}

impl Preset {
    pub fn label(self) -> &'static str {
        match self {
            Preset::Fig4 => "fig4",
            Preset::Fig5 => "fig5",
            Preset::Fig6 => "fig6",
            Preset::Fig7 => "fig7",
            Preset::Fig9 => "fig9",
            Preset::Table5 => "table5",
            Preset::Custom => "custom",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "fig4" => Some(Preset::Fig4),
            "fig5" => Some(Preset::Fig5),
            "fig6" => Some(Preset::Fig6),
            "fig7" => Some(Preset::Fig7),
            "fig9" => Some(Preset::Fig9),
            "table5" => Some(Preset::Table5),
            "custom" => Some(Preset::Custom),
            _ => None,
        }
    }
}

/// Experiment selection and sweep overrides.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub preset: Preset,
    pub trials: usize,
    pub seed: u64,
    pub output: Option<String>,
    /// Shrink the preset to quick desk-scale dimensions.
    pub desk_scale: bool,
    /// Record wall-clock runtimes in the CSV (off keeps output byte-stable).
    pub timing: bool,
    pub t_grid_bps: Option<Vec<f64>>,
    pub n_list: Option<Vec<usize>>,
    pub m_list: Option<Vec<usize>>,
    pub filters: Option<Vec<FilterKind>>,
    pub schemes: Option<Vec<SweepScheme>>,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            preset: Preset::Custom,
            trials: 10,
            seed: 1,
            output: None,
            desk_scale: false,
            timing: false,
            t_grid_bps: None,
            n_list: None,
            m_list: None,
            filters: None,
            schemes: None,
        }
    }
}

/// A fully parsed and validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedConfig {
    pub system: SystemConfig,
    pub experiment: ExperimentSpec,
}

impl Default for ParsedConfig {
    fn default() -> Self {
        Self { system: SystemConfig::default(), experiment: ExperimentSpec::default() }
    }
}

/// Parse or validation failure with its source line.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    /// 1-based line number; 0 for document-level problems.
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line > 0 {
            write!(f, "line {}: {}", self.line, self.message)
        } else {
            write!(f, "{}", self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

fn err(line: usize, message: impl Into<String>) -> ConfigError {
    ConfigError { line, message: message.into() }
}

fn parse_f64(line: usize, key: &str, v: &str) -> Result<f64, ConfigError> {
    let x = if v == "inf" || v == "infinity" {
        f64::INFINITY
    } else {
        v.parse::<f64>().map_err(|_| err(line, format!("key `{key}`: not a number: `{v}`")))?
    };
    Ok(x)
}

fn parse_usize(line: usize, key: &str, v: &str) -> Result<usize, ConfigError> {
    v.parse::<usize>().map_err(|_| err(line, format!("key `{key}`: not a count: `{v}`")))
}

fn parse_u64(line: usize, key: &str, v: &str) -> Result<u64, ConfigError> {
    v.parse::<u64>().map_err(|_| err(line, format!("key `{key}`: not an integer: `{v}`")))
}

fn parse_bool(line: usize, key: &str, v: &str) -> Result<bool, ConfigError> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(err(line, format!("key `{key}`: not a boolean: `{v}`"))),
    }
}

fn parse_f64_list(line: usize, key: &str, v: &str) -> Result<Vec<f64>, ConfigError> {
    v.split(',').map(|s| parse_f64(line, key, s.trim())).collect()
}

fn parse_usize_list(line: usize, key: &str, v: &str) -> Result<Vec<usize>, ConfigError> {
    v.split(',').map(|s| parse_usize(line, key, s.trim())).collect()
}

/// Parses a configuration document. Unknown keys, duplicate keys, malformed
/// values, and out-of-range parameters are all reported with their line.
pub fn parse_config(text: &str) -> Result<ParsedConfig, ConfigError> {
    let mut cfg = ParsedConfig::default();
    // Raw antenna spec: a single entry replicates over all radio heads.
    let mut antennas: Option<(usize, Vec<usize>)> = None;
    let mut seen: Vec<String> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(err(line, format!("expected `key = value`, got `{content}`")));
        };
        let key = key.trim();
        let v = value.trim();
        if v.is_empty() {
            return Err(err(line, format!("key `{key}`: empty value")));
        }
        if seen.iter().any(|k| k == key) {
            return Err(err(line, format!("duplicate key `{key}`")));
        }
        seen.push(key.to_string());

        let sys = &mut cfg.system;
        let exp = &mut cfg.experiment;
        match key {
            "system.bandwidth_hz" => sys.bandwidth_hz = parse_f64(line, key, v)?,
            "system.num_rrh" => sys.num_rrh = parse_usize(line, key, v)?,
            "system.antennas_per_rrh" => {
                antennas = Some((line, parse_usize_list(line, key, v)?));
            }
            "system.num_users" => sys.num_users = parse_usize(line, key, v)?,
            "system.user_power_cap_dbm" => sys.user_power_cap_dbm = parse_f64(line, key, v)?,
            "system.noise_psd_dbm_hz" => sys.noise_psd_dbm_hz = parse_f64(line, key, v)?,
            "system.noise_figure_db" => sys.noise_figure_db = parse_f64(line, key, v)?,
            "system.fronthaul_bps" => sys.fronthaul_bps = parse_f64(line, key, v)?,
            "system.area_radius_m" => sys.area_radius_m = parse_f64(line, key, v)?,
            "system.rng_seed" => sys.rng_seed = parse_u64(line, key, v)?,

            "algo.bisect_rel_tol" => sys.tol.bisect_rel = parse_f64(line, key, v)?,
            "algo.fixed_point_tol" => sys.tol.fixed_point_rel = parse_f64(line, key, v)?,
            "algo.rounding_eps" => sys.tol.rounding_eps = parse_f64(line, key, v)?,
            "algo.solver_tol" => sys.tol.solver_tol = parse_f64(line, key, v)?,
            "algo.bits_bisect_rel_tol" => sys.tol.bits_bisect_rel = parse_f64(line, key, v)?,
            "algo.alt_tol_rel" => sys.tol.alt_rel = parse_f64(line, key, v)?,
            "algo.divergence_factor" => sys.tol.divergence_factor = parse_f64(line, key, v)?,
            "algo.max_fixed_point_iters" => sys.caps.fixed_point = parse_usize(line, key, v)?,
            "algo.max_bisect_iters" => sys.caps.bisect = parse_usize(line, key, v)?,
            "algo.max_alt_iters" => sys.caps.alternating = parse_usize(line, key, v)?,
            "algo.max_pg_iters" => sys.caps.projected_gradient = parse_usize(line, key, v)?,

            "experiment.preset" => {
                exp.preset = Preset::parse(v)
                    .ok_or_else(|| err(line, format!("key `{key}`: unknown preset `{v}`")))?;
            }
            "experiment.trials" => exp.trials = parse_usize(line, key, v)?,
            "experiment.seed" => exp.seed = parse_u64(line, key, v)?,
            "experiment.output" => exp.output = Some(v.to_string()),
            "experiment.desk_scale" => exp.desk_scale = parse_bool(line, key, v)?,
            "experiment.timing" => exp.timing = parse_bool(line, key, v)?,
            "experiment.t_grid_bps" => exp.t_grid_bps = Some(parse_f64_list(line, key, v)?),
            "experiment.n_list" => exp.n_list = Some(parse_usize_list(line, key, v)?),
            "experiment.m_list" => exp.m_list = Some(parse_usize_list(line, key, v)?),
            "experiment.filters" => {
                let kinds = v
                    .split(',')
                    .map(|s| {
                        FilterKind::parse(s.trim())
                            .ok_or_else(|| err(line, format!("unknown filter `{}`", s.trim())))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                exp.filters = Some(kinds);
            }
            "experiment.schemes" => {
                let schemes = v
                    .split(',')
                    .map(|s| match s.trim() {
                        "joint" => Ok(SweepScheme::Joint),
                        "bits_only" => Ok(SweepScheme::Benchmark(Benchmark::BitsOnly)),
                        "power_only" => Ok(SweepScheme::Benchmark(Benchmark::PowerOnly)),
                        "static" => Ok(SweepScheme::Benchmark(Benchmark::Static)),
                        "massive_mimo" => Ok(SweepScheme::MassiveMimo),
                        other => Err(err(line, format!("unknown scheme `{other}`"))),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                exp.schemes = Some(schemes);
            }
            _ => return Err(err(line, format!("unknown key `{key}`"))),
        }
    }

    match antennas {
        Some((line, list)) if list.len() == 1 => {
            cfg.system.antennas_per_rrh = vec![list[0]; cfg.system.num_rrh];
            let _ = line;
        }
        Some((line, list)) => {
            if list.len() != cfg.system.num_rrh {
                return Err(err(
                    line,
                    format!(
                        "key `system.antennas_per_rrh`: {} entries for {} radio heads",
                        list.len(),
                        cfg.system.num_rrh
                    ),
                ));
            }
            cfg.system.antennas_per_rrh = list;
        }
        None => {
            let m = cfg.system.antennas_per_rrh.first().copied().unwrap_or(1);
            cfg.system.antennas_per_rrh = vec![m; cfg.system.num_rrh];
        }
    }

    cfg.system.validate().map_err(|e| err(0, e.to_string()))?;
    if cfg.experiment.trials == 0 {
        return Err(err(0, "key `experiment.trials`: must be >= 1"));
    }
    Ok(cfg)
}

fn fmt_usize_list(v: &[usize]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn fmt_f64_list(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// Serializes a configuration back to the canonical document form; parsing
/// the result reproduces the configuration exactly.
pub fn serialize_config(cfg: &ParsedConfig) -> String {
    let s = &cfg.system;
    let e = &cfg.experiment;
    let mut out = String::new();
    let mut push = |k: &str, v: String| {
        out.push_str(k);
        out.push_str(" = ");
        out.push_str(&v);
        out.push('\n');
    };

    push("system.bandwidth_hz", s.bandwidth_hz.to_string());
    push("system.num_rrh", s.num_rrh.to_string());
    push("system.antennas_per_rrh", fmt_usize_list(&s.antennas_per_rrh));
    push("system.num_users", s.num_users.to_string());
    push("system.user_power_cap_dbm", s.user_power_cap_dbm.to_string());
    push("system.noise_psd_dbm_hz", s.noise_psd_dbm_hz.to_string());
    push("system.noise_figure_db", s.noise_figure_db.to_string());
    push("system.fronthaul_bps", s.fronthaul_bps.to_string());
    push("system.area_radius_m", s.area_radius_m.to_string());
    push("system.rng_seed", s.rng_seed.to_string());

    push("algo.bisect_rel_tol", s.tol.bisect_rel.to_string());
    push("algo.fixed_point_tol", s.tol.fixed_point_rel.to_string());
    push("algo.rounding_eps", s.tol.rounding_eps.to_string());
    push("algo.solver_tol", s.tol.solver_tol.to_string());
    push("algo.bits_bisect_rel_tol", s.tol.bits_bisect_rel.to_string());
    push("algo.alt_tol_rel", s.tol.alt_rel.to_string());
    push("algo.divergence_factor", s.tol.divergence_factor.to_string());
    push("algo.max_fixed_point_iters", s.caps.fixed_point.to_string());
    push("algo.max_bisect_iters", s.caps.bisect.to_string());
    push("algo.max_alt_iters", s.caps.alternating.to_string());
    push("algo.max_pg_iters", s.caps.projected_gradient.to_string());

    push("experiment.preset", e.preset.label().to_string());
    push("experiment.trials", e.trials.to_string());
    push("experiment.seed", e.seed.to_string());
    if let Some(o) = &e.output {
        push("experiment.output", o.clone());
    }
    push("experiment.desk_scale", e.desk_scale.to_string());
    push("experiment.timing", e.timing.to_string());
    if let Some(t) = &e.t_grid_bps {
        push("experiment.t_grid_bps", fmt_f64_list(t));
    }
    if let Some(n) = &e.n_list {
        push("experiment.n_list", fmt_usize_list(n));
    }
    if let Some(m) = &e.m_list {
        push("experiment.m_list", fmt_usize_list(m));
    }
    if let Some(fs) = &e.filters {
        push(
            "experiment.filters",
            fs.iter().map(|f| f.label()).collect::<Vec<_>>().join(","),
        );
    }
    if let Some(sc) = &e.schemes {
        push(
            "experiment.schemes",
            sc.iter().map(|s| s.label()).collect::<Vec<_>>().join(","),
        );
    }
    out
}
