//! Deployment and channel generation. Users and radio heads are placed
//! uniformly at random in a disk; channels combine distance-dependent path
//! loss with i.i.d. Rayleigh small-scale fading. All dB/dBm quantities are
//! converted to linear units (watts, amplitude gains) here, at the
//! configuration boundary.

use alloc::vec::Vec;

use crate::numerics::ComplexMatrix;
use crate::real;
use crate::rng::SimRng;
use crate::{Error, Result};

/// Solver tolerances and iteration caps shared by the whole pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances {
    /// Bisection stop width for SINR targets, relative to the upper bound.
    pub bisect_rel: f64,
    /// Fixed-point convergence tolerance on the relative sup-norm step.
    pub fixed_point_rel: f64,
    /// Bisection stop width for rounding thresholds in bit allocation.
    pub rounding_eps: f64,
    /// Normalized constraint-violation tolerance of the feasibility solver.
    pub solver_tol: f64,
    /// Bisection stop width for the bit-allocation SINR target, relative.
    pub bits_bisect_rel: f64,
    /// Minimum relative SINR improvement to keep alternating.
    pub alt_rel: f64,
    /// Fixed-point iterates above `divergence_factor * max power cap` are
    /// declared unbounded.
    pub divergence_factor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            bisect_rel: 1e-3,
            fixed_point_rel: 1e-9,
            rounding_eps: 1e-3,
            solver_tol: 1e-7,
            bits_bisect_rel: 1e-4,
            alt_rel: 1e-3,
            divergence_factor: 1e6,
        }
    }
}

/// Iteration limits for the iterative solvers.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationCaps {
    pub fixed_point: usize,
    pub bisect: usize,
    pub alternating: usize,
    pub projected_gradient: usize,
}

impl Default for IterationCaps {
    fn default() -> Self {
        Self { fixed_point: 10_000, bisect: 60, alternating: 20, projected_gradient: 50_000 }
    }
}

/// Physical and algorithmic parameters of one simulated system.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    /// Wireless bandwidth B in Hz.
    pub bandwidth_hz: f64,
    /// Number of remote radio heads N.
    pub num_rrh: usize,
    /// Antennas per radio head (one entry per RRH).
    pub antennas_per_rrh: Vec<usize>,
    /// Number of single-antenna users K.
    pub num_users: usize,
    /// Per-user transmit power cap in dBm.
    pub user_power_cap_dbm: f64,
    /// Background noise power spectral density in dBm/Hz.
    pub noise_psd_dbm_hz: f64,
    /// Receiver noise figure in dB.
    pub noise_figure_db: f64,
    /// Per-RRH fronthaul capacity in bits per second; `f64::INFINITY`
    /// disables quantization.
    pub fronthaul_bps: f64,
    /// Radius of the deployment disk in meters.
    pub area_radius_m: f64,
    /// Base seed for scenario draws.
    pub rng_seed: u64,
    pub tol: Tolerances,
    pub caps: IterationCaps,
}

impl Default for SystemConfig {
    /// Reference parameter set: 10 MHz bandwidth, 23 dBm user power cap,
    /// -169 dBm/Hz noise density, 7 dB noise figure, four 10-antenna radio
    /// heads serving eight users in a 500 m disk with 0.5 Gbps fronthaul each.
    fn default() -> Self {
        Self {
            bandwidth_hz: 1e7,
            num_rrh: 4,
            antennas_per_rrh: alloc::vec![10; 4],
            num_users: 8,
            user_power_cap_dbm: 23.0,
            noise_psd_dbm_hz: -169.0,
            noise_figure_db: 7.0,
            fronthaul_bps: 5e8,
            area_radius_m: 500.0,
            rng_seed: 1,
            tol: Tolerances::default(),
            caps: IterationCaps::default(),
        }
    }
}

impl SystemConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.bandwidth_hz > 0.0) {
            return Err(Error::invalid("bandwidth_hz", "must be > 0"));
        }
        if self.num_rrh == 0 {
            return Err(Error::invalid("num_rrh", "must be >= 1"));
        }
        if self.antennas_per_rrh.len() != self.num_rrh {
            return Err(Error::invalid("antennas_per_rrh", "length must equal num_rrh"));
        }
        if self.antennas_per_rrh.iter().any(|&m| m == 0) {
            return Err(Error::invalid("antennas_per_rrh", "each entry must be >= 1"));
        }
        if self.num_users == 0 {
            return Err(Error::invalid("num_users", "must be >= 1"));
        }
        if !(self.fronthaul_bps > 0.0) {
            return Err(Error::invalid("fronthaul_bps", "must be > 0"));
        }
        if !(self.area_radius_m > 0.0) {
            return Err(Error::invalid("area_radius_m", "must be > 0"));
        }
        let t = &self.tol;
        for (name, v) in [
            ("tol.bisect_rel", t.bisect_rel),
            ("tol.fixed_point_rel", t.fixed_point_rel),
            ("tol.rounding_eps", t.rounding_eps),
            ("tol.solver_tol", t.solver_tol),
            ("tol.bits_bisect_rel", t.bits_bisect_rel),
            ("tol.alt_rel", t.alt_rel),
            ("tol.divergence_factor", t.divergence_factor),
        ] {
            if !(v > 0.0) {
                return Err(Error::invalid("tolerances", alloc::format!("{name} must be > 0")));
            }
        }
        Ok(())
    }

    /// Per-user power caps in watts.
    pub fn power_caps_w(&self) -> Vec<f64> {
        alloc::vec![dbm_to_watts(self.user_power_cap_dbm); self.num_users]
    }

    /// Pilot power used for covariance estimation: the smallest user cap.
    pub fn pilot_power_w(&self) -> f64 {
        dbm_to_watts(self.user_power_cap_dbm)
    }

    /// Per-RRH fronthaul budgets in bps.
    pub fn fronthaul_budgets(&self) -> Vec<f64> {
        alloc::vec![self.fronthaul_bps; self.num_rrh]
    }

    /// Total receiver noise power in watts over the configured bandwidth,
    /// including the noise figure.
    pub fn noise_power_w(&self) -> f64 {
        noise_power_w(self.noise_psd_dbm_hz, self.bandwidth_hz, self.noise_figure_db)
    }
}

/// One random deployment draw: node positions and per-RRH channel matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub rrh_positions: Vec<[f64; 2]>,
    pub user_positions: Vec<[f64; 2]>,
    /// Channel matrix per RRH, antennas x users, linear amplitude gain.
    pub channels: Vec<ComplexMatrix>,
    /// Receiver noise power in watts.
    pub noise_power_w: f64,
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    real::powf(10.0, (dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(w: f64) -> f64 {
    10.0 * real::log10(w) + 30.0
}

pub fn db_to_linear(db: f64) -> f64 {
    real::powf(10.0, db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * real::log10(x)
}

/// Distance-dependent path loss 30.6 + 36.7 log10(d) in dB. Distances below
/// one meter are clamped to one meter.
pub fn path_loss_db(distance_m: f64) -> Result<f64> {
    if !(distance_m > 0.0) {
        return Err(Error::invalid("distance_m", "must be > 0"));
    }
    let d = distance_m.max(1.0);
    Ok(30.6 + 36.7 * real::log10(d))
}

/// Noise power over bandwidth `b_hz` in watts from a PSD in dBm/Hz plus a
/// noise figure in dB.
pub fn noise_power_w(psd_dbm_hz: f64, b_hz: f64, noise_figure_db: f64) -> f64 {
    dbm_to_watts(psd_dbm_hz + 10.0 * real::log10(b_hz) + noise_figure_db)
}

fn distance(a: [f64; 2], b: [f64; 2]) -> f64 {
    real::hypot(a[0] - b[0], a[1] - b[1])
}

fn draw_with_placement(config: &SystemConfig, seed: u64, rrh_at_center: bool) -> Scenario {
    let mut rng = SimRng::seed_from(seed);
    // Users are drawn before radio heads so that two configs sharing a seed
    // see the same user layout regardless of how many RRHs they deploy.
    let user_positions: Vec<[f64; 2]> =
        (0..config.num_users).map(|_| rng.disk_point(config.area_radius_m)).collect();
    let rrh_positions: Vec<[f64; 2]> = if rrh_at_center {
        alloc::vec![[0.0, 0.0]; config.num_rrh]
    } else {
        (0..config.num_rrh).map(|_| rng.disk_point(config.area_radius_m)).collect()
    };

    let channels = rrh_positions
        .iter()
        .enumerate()
        .map(|(n, &pos)| {
            let m_n = config.antennas_per_rrh[n];
            let amp: Vec<f64> = user_positions
                .iter()
                .map(|&u| {
                    let loss_db = path_loss_db(distance(pos, u).max(f64::MIN_POSITIVE))
                        .expect("positive distance");
                    real::sqrt(db_to_linear(-loss_db))
                })
                .collect();
            let mut h = ComplexMatrix::zeros(m_n, config.num_users);
            for k in 0..config.num_users {
                for m in 0..m_n {
                    h[(m, k)] = rng.complex_normal() * amp[k];
                }
            }
            h
        })
        .collect();

    Scenario {
        rrh_positions,
        user_positions,
        channels,
        noise_power_w: config.noise_power_w(),
    }
}

/// Draws a deployment with radio heads placed uniformly in the disk.
/// Deterministic in (config, seed).
pub fn draw_scenario(config: &SystemConfig, seed: u64) -> Scenario {
    draw_with_placement(config, seed, false)
}

/// Draws a deployment with every radio head at the disk center, as used for
/// the co-located (massive MIMO) baseline. User draws match
/// [`draw_scenario`] for the same seed.
pub fn draw_scenario_centered(config: &SystemConfig, seed: u64) -> Scenario {
    draw_with_placement(config, seed, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_loss_reference_points() {
        assert!((path_loss_db(1.0).unwrap() - 30.6).abs() < 1e-12);
        assert!((path_loss_db(100.0).unwrap() - 104.0).abs() < 1e-12);
        let expected = 30.6 + 36.7 * real::log10(500.0);
        assert!((path_loss_db(500.0).unwrap() - expected).abs() < 1e-12);
        // Sub-meter distances clamp to the 1 m value.
        assert_eq!(path_loss_db(0.2).unwrap(), path_loss_db(1.0).unwrap());
        assert!(path_loss_db(0.0).is_err());
        assert!(path_loss_db(-3.0).is_err());
    }

    #[test]
    fn path_loss_is_increasing_beyond_one_meter() {
        let mut prev = path_loss_db(1.0).unwrap();
        for i in 1..200 {
            let d = 1.0 + i as f64;
            let v = path_loss_db(d).unwrap();
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn noise_power_reference() {
        // -169 dBm/Hz over 10 MHz plus 7 dB figure = -92 dBm total.
        let w = noise_power_w(-169.0, 1e7, 7.0);
        assert!((watts_to_dbm(w) + 92.0).abs() < 1e-9);
        assert!((w - 6.31e-13).abs() / 6.31e-13 < 1e-3);
        // Zero figure over 1 Hz leaves the density unchanged.
        let w1 = noise_power_w(-169.0, 1.0, 0.0);
        assert!((watts_to_dbm(w1) + 169.0).abs() < 1e-9);
    }

    #[test]
    fn scenarios_are_deterministic() {
        let cfg = SystemConfig {
            num_rrh: 2,
            antennas_per_rrh: alloc::vec![3, 3],
            num_users: 4,
            ..SystemConfig::default()
        };
        let a = draw_scenario(&cfg, 9);
        let b = draw_scenario(&cfg, 9);
        assert_eq!(a, b);
        let c = draw_scenario(&cfg, 10);
        assert_ne!(a.channels, c.channels);
    }

    #[test]
    fn user_layout_is_shared_across_rrh_counts() {
        let base = SystemConfig::default();
        let two = SystemConfig {
            num_rrh: 2,
            antennas_per_rrh: alloc::vec![2, 2],
            ..base.clone()
        };
        let eight = SystemConfig {
            num_rrh: 8,
            antennas_per_rrh: alloc::vec![1; 8],
            ..base
        };
        let a = draw_scenario(&two, 5);
        let b = draw_scenario(&eight, 5);
        assert_eq!(a.user_positions, b.user_positions);
    }

    #[test]
    fn channel_second_moment_tracks_path_gain() {
        // |h|^2 normalized by the per-draw linear path gain is unit-mean.
        let cfg = SystemConfig {
            num_rrh: 1,
            antennas_per_rrh: alloc::vec![200],
            num_users: 1,
            ..SystemConfig::default()
        };
        let mut acc = 0.0;
        let mut count = 0u64;
        for t in 0..500 {
            let s = draw_scenario(&cfg, 1000 + t);
            let d = real::hypot(
                s.rrh_positions[0][0] - s.user_positions[0][0],
                s.rrh_positions[0][1] - s.user_positions[0][1],
            )
            .max(1.0);
            let gain = db_to_linear(-path_loss_db(d).unwrap());
            for m in 0..200 {
                acc += s.channels[0][(m, 0)].norm_sqr() / gain;
                count += 1;
            }
        }
        let ratio = acc / count as f64;
        assert!(count >= 100_000);
        assert!((ratio - 1.0).abs() < 0.03, "ratio = {ratio}");
    }

    #[test]
    fn proximity_boosts_expected_gain() {
        // A user close to RRH a and far from RRH b sees a stronger channel at
        // a on average.
        let cfg = SystemConfig {
            num_rrh: 2,
            antennas_per_rrh: alloc::vec![1, 1],
            num_users: 1,
            ..SystemConfig::default()
        };
        let mut near = 0.0;
        let mut far = 0.0;
        for t in 0..2000 {
            let s = draw_scenario(&cfg, 77 + t);
            let d0 = real::hypot(
                s.rrh_positions[0][0] - s.user_positions[0][0],
                s.rrh_positions[0][1] - s.user_positions[0][1],
            );
            let d1 = real::hypot(
                s.rrh_positions[1][0] - s.user_positions[0][0],
                s.rrh_positions[1][1] - s.user_positions[0][1],
            );
            let (n, f) = if d0 < d1 { (0, 1) } else { (1, 0) };
            near += s.channels[n][(0, 0)].norm_sqr();
            far += s.channels[f][(0, 0)].norm_sqr();
        }
        assert!(near > far);
    }

    #[test]
    fn config_validation_names_offending_fields() {
        let mut cfg = SystemConfig::default();
        cfg.bandwidth_hz = -1.0;
        match cfg.validate() {
            Err(Error::InvalidParameter { name, .. }) => assert_eq!(name, "bandwidth_hz"),
            other => panic!("expected invalid parameter, got {other:?}"),
        }
    }
}
