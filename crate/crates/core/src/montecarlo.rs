//! Seeded, reproducible Monte Carlo sampling of the composite channel.
//!
//! Sampling is chunked: chunk j of stream `stream_id` draws from a
//! ChaCha8 generator on stream (stream_id << 32) | j, so the output is
//! bit-identical for a given (seed, stream_id, num_samples) regardless of
//! how many worker threads participate, and distinct stream ids yield
//! disjoint generators.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;

use crate::channel::{EggParams, LinkConfig, PointingGeometry};
use crate::metrics::ModulationSpec;

/// Samples drawn per RNG chunk; fixed so thread scheduling cannot affect
/// the sample stream.
const CHUNK: usize = 1 << 16;

/// Reproducibility contract for a simulation run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimOptions {
    pub seed: u64,
    pub num_samples: usize,
    /// Independent sub-stream selector for parallel experiment designs.
    pub stream_id: u32,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self { seed: 0xC0FFEE, num_samples: 1_000_000, stream_id: 0 }
    }
}

fn chunk_rng(seed: u64, stream_id: u32, chunk: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((stream_id as u64) << 32) | chunk as u64);
    rng
}

/// Fill a deterministic sample vector, chunk-parallel.
fn sample_vec<F>(opts: &SimOptions, per_sample: F) -> Vec<f64>
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    let n = opts.num_samples;
    let mut out = vec![0.0f64; n];
    out.par_chunks_mut(CHUNK).enumerate().for_each(|(j, slice)| {
        let mut rng = chunk_rng(opts.seed, opts.stream_id, j as u32);
        for v in slice.iter_mut() {
            *v = per_sample(&mut rng);
        }
    });
    out
}

fn draw_exponential(rng: &mut ChaCha8Rng, mean: f64) -> f64 {
    // 1 - u lies in (0, 1], keeping the logarithm finite.
    -mean * (1.0 - rng.gen::<f64>()).ln()
}

fn draw_rayleigh(rng: &mut ChaCha8Rng, sigma: f64) -> f64 {
    sigma * (-2.0 * (1.0 - rng.gen::<f64>()).ln()).sqrt()
}

/// One turbulence fade: exponential branch with probability α, otherwise
/// the generalized-gamma transform b·G^{1/c} of a Gamma(a, 1) variate.
fn draw_ht(rng: &mut ChaCha8Rng, t: &EggParams, gamma_dist: &Gamma<f64>) -> f64 {
    if rng.gen::<f64>() < t.mix_alpha {
        draw_exponential(rng, t.exp_beta)
    } else {
        t.gg_b * gamma_dist.sample(rng).powf(1.0 / t.gg_c)
    }
}

/// One pointing fade A0·exp(−2r²/ω_e²) with Rayleigh radial displacement;
/// the degenerate (clamped) geometry collapses to the constant A0.
fn draw_hp(rng: &mut ChaCha8Rng, g: &PointingGeometry) -> f64 {
    if g.is_degenerate() {
        return g.a0;
    }
    let r = draw_rayleigh(rng, g.jitter_sigma);
    g.a0 * (-2.0 * r * r / (g.omega_e * g.omega_e)).exp()
}

/// Turbulence fading samples h_t.
pub fn sample_ht(params: &EggParams, opts: &SimOptions) -> Vec<f64> {
    let gamma_dist = Gamma::new(params.gg_a, 1.0).expect("validated shape");
    sample_vec(opts, |rng| draw_ht(rng, params, &gamma_dist))
}

/// Pointing loss samples h_p in (0, A0].
pub fn sample_hp(geom: &PointingGeometry, opts: &SimOptions) -> Vec<f64> {
    sample_vec(opts, |rng| draw_hp(rng, geom))
}

/// Single-hop gain samples h1 = h_a · h_t · h_p.
pub fn sample_h1(cfg: &LinkConfig, opts: &SimOptions) -> Vec<f64> {
    let h_a = cfg.attenuation();
    let gamma_dist = Gamma::new(cfg.turbulence.gg_a, 1.0).expect("validated shape");
    sample_vec(opts, |rng| {
        h_a * draw_ht(rng, &cfg.turbulence, &gamma_dist) * draw_hp(rng, &cfg.pointing)
    })
}

/// End-to-end gain samples h = h1·h2 with independent identically
/// distributed hops (four independent fades per sample).
pub fn sample_h(cfg: &LinkConfig, opts: &SimOptions) -> Vec<f64> {
    let h_a = cfg.attenuation();
    let gamma_dist = Gamma::new(cfg.turbulence.gg_a, 1.0).expect("validated shape");
    sample_vec(opts, |rng| {
        let hop1 = h_a * draw_ht(rng, &cfg.turbulence, &gamma_dist) * draw_hp(rng, &cfg.pointing);
        let hop2 = h_a * draw_ht(rng, &cfg.turbulence, &gamma_dist) * draw_hp(rng, &cfg.pointing);
        hop1 * hop2
    })
}

/// Instantaneous return-link SNR samples γ = γ̄·h1·h2.
pub fn sample_gamma_u(cfg: &LinkConfig, mean_snr: f64, opts: &SimOptions) -> Vec<f64> {
    let h_a = cfg.attenuation();
    let gamma_dist = Gamma::new(cfg.turbulence.gg_a, 1.0).expect("validated shape");
    sample_vec(opts, |rng| {
        let hop1 = h_a * draw_ht(rng, &cfg.turbulence, &gamma_dist) * draw_hp(rng, &cfg.pointing);
        let hop2 = h_a * draw_ht(rng, &cfg.turbulence, &gamma_dist) * draw_hp(rng, &cfg.pointing);
        mean_snr * hop1 * hop2
    })
}

// ---------------------------------------------------------------------------
// Estimation
// ---------------------------------------------------------------------------

/// Metric estimated from the sample stream.
#[derive(Debug, Clone)]
pub enum EstimateMetric {
    /// Fraction of SNR samples below the threshold.
    Outage { snr_threshold: f64 },
    /// Mean conditional bit error rate δ_B Σ_k ½erfc(√(q_Bk γ)); equals the
    /// unified closed form for the p_B = 1/2 schemes of the table.
    Ber(ModulationSpec),
    /// Mean of ln(1 + γ), nats.
    Capacity,
    /// Mean harvested power (1−ρ)·η_r·P_t·h1, W.
    HarvestedMean,
}

/// Empirical estimate with spread diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalSummary {
    pub num_samples: usize,
    pub mean: f64,
    pub variance: f64,
    /// Standard error of the mean.
    pub stderr: f64,
    pub histogram: Histogram,
    /// 1001-point quantile table (probability, value); nondecreasing.
    pub ecdf_quantiles: Vec<(f64, f64)>,
}

/// Fixed-bin histogram; the outer bins absorb out-of-range samples so the
/// counts always total `num_samples`.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

/// Estimate a metric by Monte Carlo.
pub fn estimate(
    cfg: &LinkConfig,
    mean_snr: f64,
    metric: &EstimateMetric,
    opts: &SimOptions,
) -> EmpiricalSummary {
    let values: Vec<f64> = match metric {
        EstimateMetric::Outage { snr_threshold } => {
            let th = *snr_threshold;
            let gammas = sample_gamma_u(cfg, mean_snr, opts);
            gammas.into_iter().map(|g| if g < th { 1.0 } else { 0.0 }).collect()
        }
        EstimateMetric::Ber(modulation) => {
            let gammas = sample_gamma_u(cfg, mean_snr, opts);
            let m = modulation.clone();
            gammas
                .into_par_iter()
                .map(|g| {
                    let mut e = 0.0;
                    for &q in &m.q_list {
                        e += 0.5 * libm::erfc((q * g).sqrt());
                    }
                    m.delta_b * e
                })
                .collect()
        }
        EstimateMetric::Capacity => {
            let gammas = sample_gamma_u(cfg, mean_snr, opts);
            gammas.into_iter().map(|g| g.ln_1p()).collect()
        }
        EstimateMetric::HarvestedMean => {
            let k = (1.0 - cfg.split_rho) * cfg.eff_pv * cfg.tx_power;
            let h1 = sample_h1(cfg, opts);
            h1.into_iter().map(|h| k * h).collect()
        }
    };
    summarize(&values)
}

/// Reduce raw per-sample values to an [`EmpiricalSummary`]. Summation is
/// sequential in sample order, keeping the result byte-reproducible.
pub fn summarize(values: &[f64]) -> EmpiricalSummary {
    let n = values.len();
    assert!(n > 1, "summary requires at least two samples");
    let mean = values.iter().sum::<f64>() / n as f64;
    let variance = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n as f64 - 1.0);
    let stderr = (variance / n as f64).sqrt();

    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let quantile = |p: f64| sorted[((p * (n - 1) as f64).round() as usize).min(n - 1)];
    let ecdf_quantiles: Vec<(f64, f64)> =
        (0..=1000).map(|i| (i as f64 / 1000.0, quantile(i as f64 / 1000.0))).collect();

    let histogram = build_histogram(&sorted);
    EmpiricalSummary { num_samples: n, mean, variance, stderr, histogram, ecdf_quantiles }
}

/// 200 log-spaced bins between the 0.01% and 99.99% quantiles (composite
/// gains span decades); falls back to linear or single-bin layouts when
/// the sample range cannot support log spacing.
fn build_histogram(sorted: &[f64]) -> Histogram {
    const BINS: usize = 200;
    let n = sorted.len();
    let lo = sorted[((1e-4 * (n - 1) as f64).round() as usize).min(n - 1)];
    let hi = sorted[(((1.0 - 1e-4) * (n - 1) as f64).round() as usize).min(n - 1)];
    if !(hi > lo) {
        return Histogram {
            edges: vec![sorted[0], sorted[n - 1]],
            counts: vec![n as u64],
        };
    }
    let log_spaced = lo > 0.0;
    let edges: Vec<f64> = if log_spaced {
        let (ll, lh) = (lo.ln(), hi.ln());
        (0..=BINS).map(|i| (ll + (lh - ll) * i as f64 / BINS as f64).exp()).collect()
    } else {
        (0..=BINS).map(|i| lo + (hi - lo) * i as f64 / BINS as f64).collect()
    };
    let mut counts = vec![0u64; BINS];
    for &v in sorted {
        let idx = if log_spaced && v > 0.0 {
            ((v.ln() - edges[0].ln()) / (edges[BINS].ln() - edges[0].ln()) * BINS as f64).floor()
        } else if log_spaced {
            -1.0
        } else {
            ((v - edges[0]) / (edges[BINS] - edges[0]) * BINS as f64).floor()
        };
        let idx = (idx.max(0.0) as usize).min(BINS - 1);
        counts[idx] += 1;
    }
    Histogram { edges, counts }
}

// ---------------------------------------------------------------------------
// Goodness of fit
// ---------------------------------------------------------------------------

/// Kolmogorov–Smirnov statistic of sorted samples against a CDF.
pub fn ks_statistic<F: Fn(f64) -> f64>(sorted: &[f64], cdf: F) -> f64 {
    let n = sorted.len() as f64;
    let mut sup = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let fx = cdf(x);
        sup = sup.max((fx - i as f64 / n).abs());
        sup = sup.max(((i + 1) as f64 / n - fx).abs());
    }
    sup
}

/// Monotone (Fritsch–Carlson) cubic interpolant; used to evaluate an
/// analytic CDF, tabulated on a coarse grid, at every Monte Carlo sample.
#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    /// Build from strictly increasing xs and nondecreasing ys.
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Self {
        let n = xs.len();
        assert!(n >= 2 && ys.len() == n, "need at least two knots");
        let mut secants = vec![0.0; n - 1];
        for i in 0..n - 1 {
            secants[i] = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
        }
        let mut slopes = vec![0.0; n];
        slopes[0] = secants[0];
        slopes[n - 1] = secants[n - 2];
        for i in 1..n - 1 {
            slopes[i] = if secants[i - 1] * secants[i] <= 0.0 {
                0.0
            } else {
                0.5 * (secants[i - 1] + secants[i])
            };
        }
        // Fritsch–Carlson limiter keeps the interpolant monotone.
        for i in 0..n - 1 {
            if secants[i] == 0.0 {
                slopes[i] = 0.0;
                slopes[i + 1] = 0.0;
            } else {
                let a = slopes[i] / secants[i];
                let b = slopes[i + 1] / secants[i];
                let s = a * a + b * b;
                if s > 9.0 {
                    let t = 3.0 / s.sqrt();
                    slopes[i] = t * a * secants[i];
                    slopes[i + 1] = t * b * secants[i];
                }
            }
        }
        Self { xs, ys, slopes }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return self.ys[0];
        }
        if x >= self.xs[n - 1] {
            return self.ys[n - 1];
        }
        let mut lo = 0usize;
        let mut hi = n - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.xs[mid] <= x {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let h = self.xs[lo + 1] - self.xs[lo];
        let t = (x - self.xs[lo]) / h;
        let (y0, y1) = (self.ys[lo], self.ys[lo + 1]);
        let (m0, m1) = (self.slopes[lo] * h, self.slopes[lo + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        y0 * (2.0 * t3 - 3.0 * t2 + 1.0)
            + m0 * (t3 - 2.0 * t2 + t)
            + y1 * (-2.0 * t3 + 3.0 * t2)
            + m1 * (t3 - t2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::system_defaults;

    #[test]
    fn identical_options_reproduce_bitwise() {
        let cfg = system_defaults();
        let opts = SimOptions { seed: 42, num_samples: 200_000, stream_id: 3 };
        let a = sample_h1(&cfg, &opts);
        let b = sample_h1(&cfg, &opts);
        assert_eq!(a, b);
        let sa = summarize(&a);
        let sb = summarize(&b);
        assert_eq!(sa, sb);
    }

    #[test]
    fn streams_differ() {
        let cfg = system_defaults();
        let a = sample_h1(&cfg, &SimOptions { seed: 42, num_samples: 1000, stream_id: 0 });
        let b = sample_h1(&cfg, &SimOptions { seed: 42, num_samples: 1000, stream_id: 1 });
        assert_ne!(a, b);
    }

    #[test]
    fn degenerate_pointing_emits_constant() {
        let cfg = system_defaults();
        let geom = PointingGeometry::new(
            cfg.pointing.aperture_radius,
            cfg.pointing.beam_waist,
            0.0,
        )
        .unwrap();
        let samples = sample_hp(&geom, &SimOptions { num_samples: 1000, ..Default::default() });
        assert!(samples.iter().all(|&s| s == geom.a0));
    }

    #[test]
    fn histogram_counts_total_samples() {
        let cfg = system_defaults();
        let opts = SimOptions { num_samples: 50_000, ..Default::default() };
        let s = summarize(&sample_h1(&cfg, &opts));
        assert_eq!(s.histogram.counts.iter().sum::<u64>(), 50_000);
        assert!(s.ecdf_quantiles.windows(2).all(|w| w[1].1 >= w[0].1));
    }

    #[test]
    fn monotone_cubic_is_monotone_and_interpolates() {
        let xs: Vec<f64> = (0..20).map(|i| i as f64 * 0.5).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| 1.0 - (-x).exp()).collect();
        let interp = MonotoneCubic::new(xs.clone(), ys.clone());
        for (x, y) in xs.iter().zip(ys.iter()) {
            assert!((interp.eval(*x) - y).abs() < 1e-12);
        }
        let mut prev = -1.0;
        for i in 0..500 {
            let v = interp.eval(i as f64 * 0.019);
            assert!(v >= prev - 1e-12);
            prev = v;
        }
    }
}
