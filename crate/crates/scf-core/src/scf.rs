//! Spatial-compression-and-forward processing at each radio head: spatial
//! filter designs, the per-dimension uniform quantization noise model, the
//! fronthaul rate they induce, and an empirical I/Q quantizer used to
//! validate the analytic model.

use alloc::vec;
use alloc::vec::Vec;

use crate::numerics::{hermitian_evd, CholeskyFactor, ComplexMatrix};
use crate::real;
use crate::{Complex64, Error, Result};

/// Spatial filter family applied at a radio head.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterKind {
    /// Rows are the leading eigenvectors of the received-signal covariance;
    /// keeps the user signal subspace and decorrelates the outputs.
    Evd,
    /// V = H^H.
    Matched,
    /// V = (H^H H)^{-1} H^H.
    ZeroForcing,
    /// No filtering, V = I.
    Identity,
}

impl FilterKind {
    pub fn label(self) -> &'static str {
        match self {
            FilterKind::Evd => "evd",
            FilterKind::Matched => "matched",
            FilterKind::ZeroForcing => "zero_forcing",
            FilterKind::Identity => "identity",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "evd" => Some(FilterKind::Evd),
            "matched" => Some(FilterKind::Matched),
            "zero_forcing" | "zf" => Some(FilterKind::ZeroForcing),
            "identity" | "none" => Some(FilterKind::Identity),
            _ => None,
        }
    }

    pub const ALL: [FilterKind; 4] =
        [FilterKind::Evd, FilterKind::Matched, FilterKind::ZeroForcing, FilterKind::Identity];
}

/// Covariance of the received pilot signal, `pilot_power * H H^H + sigma2 I`.
pub fn sample_covariance(h: &ComplexMatrix, pilot_power: f64, sigma2: f64) -> ComplexMatrix {
    assert!(pilot_power > 0.0 && sigma2 > 0.0);
    let m = h.rows();
    let mut s = h.mul(&h.adjoint()).scaled(pilot_power);
    for i in 0..m {
        s[(i, i)] += Complex64::new(sigma2, 0.0);
    }
    s
}

/// Designs the spatial filter V (output dims x antennas) for one radio head.
///
/// The eigenspace filter keeps `min(M, K)` dimensions; matched and
/// zero-forcing keep K; identity keeps all M antennas.
pub fn design_filter(
    h: &ComplexMatrix,
    s: &ComplexMatrix,
    kind: FilterKind,
) -> Result<ComplexMatrix> {
    let (m, k) = (h.rows(), h.cols());
    match kind {
        FilterKind::Evd => {
            let l = m.min(k);
            let evd = hermitian_evd(s)?;
            // Rows of V are the conjugate-transposed leading eigenvectors.
            Ok(ComplexMatrix::from_fn(l, m, |i, j| evd.eigenvectors[(j, i)].conj()))
        }
        FilterKind::Matched => Ok(h.adjoint()),
        FilterKind::ZeroForcing => {
            let gram = h.adjoint().mul(h);
            let chol = CholeskyFactor::new(&gram)
                .map_err(|_| Error::RankDeficient("zero-forcing filter needs full column rank"))?;
            let hh = h.adjoint();
            let mut v = ComplexMatrix::zeros(k, m);
            for j in 0..m {
                let col = chol.solve(&hh.col(j));
                for i in 0..k {
                    v[(i, j)] = col[i];
                }
            }
            Ok(v)
        }
        FilterKind::Identity => Ok(ComplexMatrix::identity(m)),
    }
}

/// Spatial filters and effective channels for every radio head.
#[derive(Debug, Clone)]
pub struct FilterBank {
    pub kind: FilterKind,
    /// V_n, one per RRH, each output-dims x antennas.
    pub filters: Vec<ComplexMatrix>,
    /// Effective channels V_n H_n, each output-dims x users.
    pub effective: Vec<ComplexMatrix>,
}

impl FilterBank {
    /// Designs one filter per radio head from its local channel. The pilot
    /// power and noise level enter only through the covariance used by the
    /// eigenspace design.
    pub fn build(
        channels: &[ComplexMatrix],
        pilot_power: f64,
        sigma2: f64,
        kind: FilterKind,
    ) -> Result<Self> {
        let mut filters = Vec::with_capacity(channels.len());
        let mut effective = Vec::with_capacity(channels.len());
        for h in channels {
            let v = match kind {
                FilterKind::Evd => {
                    let s = sample_covariance(h, pilot_power, sigma2);
                    design_filter(h, &s, kind)?
                }
                _ => design_filter(h, &ComplexMatrix::zeros(0, 0), kind)?,
            };
            effective.push(v.mul(h));
            filters.push(v);
        }
        Ok(Self { kind, filters, effective })
    }

    pub fn num_rrh(&self) -> usize {
        self.filters.len()
    }

    /// Output dimension count per radio head.
    pub fn output_dims(&self) -> Vec<usize> {
        self.filters.iter().map(|v| v.rows()).collect()
    }

    pub fn total_dims(&self) -> usize {
        self.filters.iter().map(|v| v.rows()).sum()
    }
}

/// Quantization-noise evaluation mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuantNoiseModel {
    /// Unquantized dimensions (zero bits) carry nothing: infinite noise.
    Exact,
    /// Continuous relaxation: finite value at zero bits.
    Continuous,
}

/// Per-dimension quantization noise power for one radio head:
/// `3 (sum_k p_k |v_l^T h_k|^2 + sigma2 ||v_l||^2) 2^(-2 D_l)`.
///
/// In [`QuantNoiseModel::Exact`] mode a zero-bit dimension returns
/// `f64::INFINITY` as a sentinel; callers prune such dimensions rather than
/// doing arithmetic with the sentinel.
pub fn quant_noise(
    p: &[f64],
    v: &ComplexMatrix,
    h: &ComplexMatrix,
    sigma2: f64,
    bits: &[f64],
    mode: QuantNoiseModel,
) -> Vec<f64> {
    let eff = v.mul(h);
    let l = v.rows();
    assert_eq!(bits.len(), l);
    assert_eq!(p.len(), h.cols());
    (0..l)
        .map(|i| {
            if mode == QuantNoiseModel::Exact && bits[i] <= 0.0 {
                return f64::INFINITY;
            }
            let sig: f64 =
                (0..h.cols()).map(|k| p[k] * eff[(i, k)].norm_sqr()).sum::<f64>();
            let row_pow: f64 = v.row(i).iter().map(|z| z.norm_sqr()).sum();
            3.0 * (sig + sigma2 * row_pow) * real::exp2(-2.0 * bits[i])
        })
        .collect()
}

/// Fronthaul rate consumed by a bit vector: `2 B sum_l D_l` bps.
pub fn fronthaul_rate(bits: &[f64], bandwidth_hz: f64) -> f64 {
    2.0 * bandwidth_hz * bits.iter().sum::<f64>()
}

/// Quantizer dynamic range in branch standard deviations for a given
/// resolution. Grows with the bit count so that clipping stays well below
/// the granular error of the analytic noise model.
fn loading_factor(bits: u32) -> f64 {
    match bits {
        0..=6 => 3.0,
        7 | 8 => 4.0,
        b => 4.0 + 0.5 * (b - 8) as f64,
    }
}

/// Uniform scalar quantization of the I and Q branches of a complex stream.
///
/// Each branch is quantized with `2^bits` uniform cells, clipped outside the
/// dynamic range, and reconstructed at cell midpoints. Returns the quantized
/// stream and the empirical mean squared error per complex sample.
pub fn uniform_quantize_iq(
    samples: &[Complex64],
    bits: u32,
    signal_power: f64,
) -> (Vec<Complex64>, f64) {
    assert!(bits >= 1, "at least one bit per branch");
    assert!(signal_power > 0.0);
    let half_range = loading_factor(bits) * real::sqrt(signal_power / 2.0);
    let cells = (1u64 << bits) as f64;
    let width = 2.0 * half_range / cells;

    let quantize_branch = |x: f64| -> f64 {
        let idx = real::floor((x + half_range) / width);
        let idx = idx.max(0.0).min(cells - 1.0);
        -half_range + (idx + 0.5) * width
    };

    let mut err = 0.0;
    let out: Vec<Complex64> = samples
        .iter()
        .map(|z| {
            let q = Complex64::new(quantize_branch(z.re), quantize_branch(z.im));
            err += (z - q).norm_sqr();
            q
        })
        .collect();
    let mse = if samples.is_empty() { 0.0 } else { err / samples.len() as f64 };
    (out, mse)
}

/// Quantization bit counts per radio head and filter-output dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizationPlan {
    /// bits[n][l] is the per-branch bit count of dimension l at RRH n.
    pub bits: Vec<Vec<f64>>,
    pub mode: PlanMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlanMode {
    Integer,
    Relaxed,
}

impl QuantizationPlan {
    pub fn zeros(dims: &[usize], mode: PlanMode) -> Self {
        Self { bits: dims.iter().map(|&l| vec![0.0; l]).collect(), mode }
    }

    pub fn num_rrh(&self) -> usize {
        self.bits.len()
    }

    /// Fronthaul rate consumed at RRH n, in bps.
    pub fn rate_bps(&self, n: usize, bandwidth_hz: f64) -> f64 {
        fronthaul_rate(&self.bits[n], bandwidth_hz)
    }

    /// True when every radio head stays within its budget (tiny slack for
    /// rounding in the relaxed mode).
    pub fn respects_budgets(&self, budgets_bps: &[f64], bandwidth_hz: f64) -> bool {
        self.bits.iter().enumerate().all(|(n, _)| {
            self.rate_bps(n, bandwidth_hz) <= budgets_bps[n] * (1.0 + 1e-12) + 1e-9
        })
    }

    /// Number of quantized (nonzero-bit) dimensions at RRH n.
    pub fn quantized_dims(&self, n: usize) -> usize {
        self.bits[n].iter().filter(|&&b| b > 0.0).count()
    }

    pub fn is_integral(&self) -> bool {
        self.bits
            .iter()
            .flatten()
            .all(|&b| (b - real::floor(b)).abs() < 1e-9 || (real::ceil(b) - b).abs() < 1e-9)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SimRng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_channel(rng: &mut SimRng, m: usize, k: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(m, k, |_, _| rng.complex_normal())
    }

    #[test]
    fn covariance_of_zero_channel_is_noise_only() {
        let h = ComplexMatrix::zeros(3, 2);
        let s = sample_covariance(&h, 1.0, 0.5);
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 0.5 } else { 0.0 };
                assert!((s[(i, j)] - c(expect, 0.0)).norm_sqr() < 1e-30);
            }
        }
    }

    #[test]
    fn covariance_rank_one_plus_identity() {
        let h = ComplexMatrix::from_real(2, 1, &[1.0, 0.0]);
        let s = sample_covariance(&h, 1.0, 1.0);
        assert!((s[(0, 0)].re - 2.0).abs() < 1e-15);
        assert!((s[(1, 1)].re - 1.0).abs() < 1e-15);
        assert!(s[(0, 1)].norm_sqr() < 1e-30);
    }

    #[test]
    fn covariance_eigenvalues_bounded_below_by_noise() {
        let mut rng = SimRng::seed_from(11);
        let h = random_channel(&mut rng, 4, 3);
        let s = sample_covariance(&h, 0.7, 0.3);
        let evd = hermitian_evd(&s).unwrap();
        assert!(*evd.eigenvalues.last().unwrap() >= 0.3 * (1.0 - 1e-9));
    }

    #[test]
    fn evd_filter_on_diagonal_covariance() {
        let h = ComplexMatrix::from_real(2, 1, &[1.0, 0.0]);
        let s = ComplexMatrix::from_real(2, 2, &[2.0, 0.0, 0.0, 1.0]);
        let v = design_filter(&h, &s, FilterKind::Evd).unwrap();
        assert_eq!((v.rows(), v.cols()), (1, 2));
        assert!((v[(0, 0)].norm_sqr() - 1.0).abs() < 1e-12);
        assert!(v[(0, 1)].norm_sqr() < 1e-24);
    }

    #[test]
    fn evd_filter_rows_are_orthonormal() {
        let mut rng = SimRng::seed_from(5);
        // M < K: keeps L = M rows.
        let h = random_channel(&mut rng, 2, 3);
        let s = sample_covariance(&h, 1.0, 0.1);
        let v = design_filter(&h, &s, FilterKind::Evd).unwrap();
        assert_eq!(v.rows(), 2);
        let gram = v.mul(&v.adjoint());
        let err = gram.sub(&ComplexMatrix::identity(2)).max_abs();
        assert!(err <= 1e-9, "||V V^H - I|| = {err}");
    }

    #[test]
    fn zero_forcing_reduces_to_matched_for_orthonormal_columns() {
        // Columns e1, e2 in C^3 are orthonormal, so the Gram matrix is I.
        let h = ComplexMatrix::from_real(3, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        let v = design_filter(&h, &ComplexMatrix::zeros(0, 0), FilterKind::ZeroForcing).unwrap();
        let mf = h.adjoint();
        assert!(v.sub(&mf).max_abs() < 1e-12);
    }

    #[test]
    fn zero_forcing_rejects_rank_deficient_channels() {
        // Two identical columns.
        let h = ComplexMatrix::from_real(2, 2, &[1.0, 1.0, 2.0, 2.0]);
        assert!(matches!(
            design_filter(&h, &ComplexMatrix::zeros(0, 0), FilterKind::ZeroForcing),
            Err(Error::RankDeficient(_))
        ));
    }

    #[test]
    fn quant_noise_reference_values() {
        // Single dimension with total per-dimension power 1/3 and one bit:
        // q = 3 * (1/3) * 2^-2 = 0.25.
        let v = ComplexMatrix::identity(1);
        let h = ComplexMatrix::from_real(1, 1, &[1.0]);
        let p = [1.0 / 3.0 - 0.1];
        let q = quant_noise(&p, &v, &h, 0.1, &[1.0], QuantNoiseModel::Exact);
        assert!((q[0] - 0.25).abs() < 1e-15);

        // Zero bits: exact mode flags the dimension as unusable, the
        // continuous relaxation keeps the finite value.
        let qe = quant_noise(&p, &v, &h, 0.1, &[0.0], QuantNoiseModel::Exact);
        assert!(qe[0].is_infinite());
        let qc = quant_noise(&p, &v, &h, 0.1, &[0.0], QuantNoiseModel::Continuous);
        assert!((qc[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn quant_noise_quarters_per_extra_bit() {
        let mut rng = SimRng::seed_from(21);
        let h = random_channel(&mut rng, 3, 2);
        let v = random_channel(&mut rng, 2, 3);
        let p = [0.3, 1.2];
        for d in 1..10 {
            let q0 = quant_noise(&p, &v, &h, 0.4, &[d as f64; 2], QuantNoiseModel::Exact);
            let q1 = quant_noise(&p, &v, &h, 0.4, &[(d + 1) as f64; 2], QuantNoiseModel::Exact);
            for l in 0..2 {
                assert!((q1[l] - q0[l] / 4.0).abs() < 1e-12 * q0[l].max(1.0));
                assert!(q1[l] < q0[l]);
            }
        }
    }

    #[test]
    fn continuous_model_matches_exact_for_positive_bits() {
        let mut rng = SimRng::seed_from(23);
        let h = random_channel(&mut rng, 2, 2);
        let v = random_channel(&mut rng, 2, 2);
        let p = [0.5, 0.5];
        let bits = [1.0, 3.0];
        let a = quant_noise(&p, &v, &h, 0.2, &bits, QuantNoiseModel::Exact);
        let b = quant_noise(&p, &v, &h, 0.2, &bits, QuantNoiseModel::Continuous);
        assert_eq!(a, b);
    }

    #[test]
    fn fronthaul_rate_examples() {
        assert!((fronthaul_rate(&[3.0, 3.0, 3.0], 1e7) - 1.8e8).abs() < 1e-6);
        assert_eq!(fronthaul_rate(&[0.0; 4], 1e7), 0.0);
        // Eight dimensions at three bits each fit a 0.5 Gbps budget.
        assert!(fronthaul_rate(&[3.0; 8], 1e7) <= 0.5e9);
    }

    #[test]
    fn quantizer_is_exact_on_cell_midpoints() {
        let bits = 3u32;
        let power = 2.0;
        let half = loading_factor(bits) * real::sqrt(power / 2.0);
        let width = 2.0 * half / 8.0;
        let mid = -half + 2.5 * width;
        let samples = vec![c(mid, mid); 100];
        let (q, mse) = uniform_quantize_iq(&samples, bits, power);
        assert_eq!(q[0], samples[0]);
        assert_eq!(mse, 0.0);
    }

    #[test]
    fn quantizer_error_vanishes_at_high_resolution() {
        let mut rng = SimRng::seed_from(9);
        let power = 3.0;
        let samples: Vec<Complex64> =
            (0..200_000).map(|_| rng.complex_normal() * real::sqrt(power)).collect();
        let (_, mse) = uniform_quantize_iq(&samples, 16, power);
        assert!(mse < 1e-7 * power, "mse = {mse:e}");
    }

    #[test]
    fn quantizer_tracks_analytic_noise_model() {
        let mut rng = SimRng::seed_from(13);
        let power = 1.7;
        let samples: Vec<Complex64> =
            (0..100_000).map(|_| rng.complex_normal() * real::sqrt(power)).collect();
        for bits in 2..=8u32 {
            let (_, mse) = uniform_quantize_iq(&samples, bits, power);
            let model = 3.0 * power * real::exp2(-2.0 * bits as f64);
            let ratio = mse / model;
            assert!(ratio < 2.0 && ratio > 0.5, "bits={bits} ratio={ratio}");
        }
    }

    #[test]
    fn plan_accounting() {
        let plan = QuantizationPlan {
            bits: vec![vec![3.0, 0.0, 2.0], vec![1.0, 1.0, 1.0]],
            mode: PlanMode::Integer,
        };
        assert_eq!(plan.quantized_dims(0), 2);
        assert_eq!(plan.quantized_dims(1), 3);
        assert!((plan.rate_bps(0, 1e7) - 1e8).abs() < 1e-6);
        assert!(plan.respects_budgets(&[1e8, 1e8], 1e7));
        assert!(!plan.respects_budgets(&[9e7, 1e8], 1e7));
        assert!(plan.is_integral());
    }
}
