//! Monte Carlo sampler against the closed forms, and vice versa: each is
//! the other's oracle here, with fixed seeds making every check exact to
//! rerun.

use slipt_core::channel::{ChannelModel, EggParams, PointingGeometry};
use slipt_core::metrics::{
    average_ber, ergodic_capacity, harvested_power_mean, outage_probability, ModulationSpec,
};
use slipt_core::montecarlo::{
    estimate, ks_statistic, sample_gamma_u, sample_h, sample_h1, sample_hp, sample_ht, summarize,
    EstimateMetric, MonotoneCubic, SimOptions,
};
use slipt_core::presets::{egg_type, system_defaults};
use slipt_core::db_to_linear;
use slipt_core::specfun::EvalOptions;

fn opts(n: usize, seed: u64) -> SimOptions {
    SimOptions { seed, num_samples: n, stream_id: 0 }
}

/// Tabulate an analytic CDF on a log grid and interpolate monotonically;
/// evaluating the closed form at every sample would be needlessly slow.
fn cdf_interpolant<F: Fn(f64) -> f64>(cdf: F, lo: f64, hi: f64, points: usize) -> MonotoneCubic {
    let xs: Vec<f64> = (0..points)
        .map(|i| {
            let t = i as f64 / (points - 1) as f64;
            (lo.ln() + (hi.ln() - lo.ln()) * t).exp()
        })
        .collect();
    let mut ys: Vec<f64> = xs.iter().map(|&x| cdf(x)).collect();
    // Guard monotonicity against terminal rounding noise.
    for i in 1..ys.len() {
        ys[i] = ys[i].max(ys[i - 1]);
    }
    MonotoneCubic::new(xs, ys)
}

#[test]
fn turbulence_sampler_moments_and_distribution() {
    let exp_only = EggParams::new(1.0, 0.33, 1.4, 1.2, 17.0).unwrap();
    let samples = sample_ht(&exp_only, &opts(1_000_000, 11));
    let s = summarize(&samples);
    assert!(
        (s.mean - 0.33).abs() < 1e-3 * 0.33 + 4.0 * s.stderr,
        "pure exponential mean {} vs 0.33",
        s.mean
    );

    let type1 = egg_type(1).unwrap();
    let samples = sample_ht(&type1, &opts(1_000_000, 12));
    let s = summarize(&samples);
    assert!(
        (s.mean - type1.mean()).abs() < 4.0 * s.stderr,
        "type-1 mean {} vs closed form {}",
        s.mean,
        type1.mean()
    );

    // Empirical distribution against the analytic turbulence density.
    let mut sorted = samples;
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let cdf = cdf_interpolant(
        |x| slipt_core::quadrature::integrate(|u| type1.pdf(u), 0.0, x, &[0.3, 1.0], 1e-9).value,
        1e-6,
        sorted[sorted.len() - 1] * 1.01,
        600,
    );
    let ks = ks_statistic(&sorted, |x| cdf.eval(x).clamp(0.0, 1.0));
    assert!(ks < 2e-3, "turbulence KS distance {ks}");
}

#[test]
fn pointing_sampler_matches_power_law() {
    let geom = system_defaults().pointing;
    let samples = sample_hp(&geom, &opts(1_000_000, 13));
    let s = summarize(&samples);
    assert!(
        (s.mean - geom.mean()).abs() < 4.0 * s.stderr,
        "pointing mean {} vs {}",
        s.mean,
        geom.mean()
    );
    let mut sorted = samples;
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // F(h) = (h/A0)^{mu^2} on (0, A0].
    let m2 = geom.mu_s_sq;
    let a0 = geom.a0;
    let ks = ks_statistic(&sorted, |x| (x / a0).powf(m2).clamp(0.0, 1.0));
    assert!(ks < 2e-3, "pointing KS distance {ks}");
}

#[test]
fn single_hop_and_composite_ks_against_closed_forms() {
    let cfg = system_defaults();
    let model = ChannelModel::new(&cfg).unwrap();
    let o = EvalOptions::default();

    let mut h1 = sample_h1(&cfg, &opts(1_000_000, 14));
    h1.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let lo = h1[0].max(1e-12);
    let hi = h1[h1.len() - 1] * 1.01;
    let cdf1 = cdf_interpolant(|x| model.h1_cdf(x, &o).unwrap(), lo, hi, 800);
    let ks1 = ks_statistic(&h1, |x| cdf1.eval(x));
    assert!(ks1 < 5e-3, "single-hop KS {ks1}");

    let mut h = sample_h(&cfg, &opts(1_000_000, 15));
    h.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let lo = h[0].max(1e-14);
    let hi = h[h.len() - 1] * 1.01;
    let cdfh = cdf_interpolant(|x| model.h_cdf(x, &o).unwrap(), lo, hi, 800);
    let ksh = ks_statistic(&h, |x| cdfh.eval(x));
    assert!(ksh < 5e-3, "composite KS {ksh}");
}

#[test]
fn snr_samples_match_cdf_and_product_mean() {
    let cfg = system_defaults();
    let model = ChannelModel::new(&cfg).unwrap();
    let o = EvalOptions::default();
    let mean_snr = db_to_linear(30.0);

    let samples = sample_gamma_u(&cfg, mean_snr, &opts(1_000_000, 16));
    // Empirical CDF at the threshold vs the closed form.
    let th = cfg.snr_threshold;
    let below = samples.iter().filter(|&&g| g < th).count() as f64 / samples.len() as f64;
    let analytic = model.snr_cdf(th, mean_snr, &o).unwrap();
    let stderr = (analytic * (1.0 - analytic) / samples.len() as f64).sqrt();
    assert!(
        (below - analytic).abs() < 4.0 * stderr,
        "empirical {below} vs analytic {analytic}"
    );

    // Mean of γ/γ̄ equals (E[h1])² by hop independence.
    let s = summarize(&samples);
    let expect = mean_snr * model.h1_mean() * model.h1_mean();
    assert!(
        (s.mean - expect).abs() < 4.0 * s.stderr,
        "sample mean {} vs product mean {}",
        s.mean,
        expect
    );

    // Full-distribution agreement.
    let mut sorted = samples;
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let lo = sorted[0].max(1e-10);
    let hi = sorted[sorted.len() - 1] * 1.01;
    let cdf = cdf_interpolant(|x| model.snr_cdf(x, mean_snr, &o).unwrap(), lo, hi, 800);
    let ks = ks_statistic(&sorted, |x| cdf.eval(x));
    assert!(ks < 5e-3, "SNR KS {ks}");
}

#[test]
fn estimates_agree_with_closed_forms_on_grid() {
    // 3×3 grid of water type × mean SNR, all four estimators within
    // 4 standard errors of their closed forms.
    let base = system_defaults();
    let o = EvalOptions::default();
    let ook = ModulationSpec::ook();
    let mut seed = 1000u64;
    for &ty in &[1usize, 3, 5] {
        for &db in &[25.0, 30.0, 35.0] {
            let mut cfg = base.clone();
            cfg.turbulence = egg_type(ty).unwrap();
            let model = ChannelModel::new(&cfg).unwrap();
            let mean_snr = db_to_linear(db);
            let n = 300_000;
            seed += 1;
            let sim = SimOptions { seed, num_samples: n, stream_id: 0 };

            let op = estimate(&cfg, mean_snr, &EstimateMetric::Outage { snr_threshold: cfg.snr_threshold }, &sim);
            let op_true = outage_probability(&model, cfg.snr_threshold, mean_snr, &o).unwrap();
            assert!(
                (op.mean - op_true).abs() < 4.0 * op.stderr.max(1e-9),
                "OP type {ty} at {db} dB: MC {} vs {}",
                op.mean,
                op_true
            );

            let ber = estimate(&cfg, mean_snr, &EstimateMetric::Ber(ook.clone()), &sim);
            let ber_true = average_ber(&model, mean_snr, &ook, &o).unwrap();
            assert!(
                (ber.mean - ber_true).abs() < 4.0 * ber.stderr.max(1e-9),
                "BER type {ty} at {db} dB: MC {} vs {}",
                ber.mean,
                ber_true
            );

            let cap = estimate(&cfg, mean_snr, &EstimateMetric::Capacity, &sim);
            let cap_true = ergodic_capacity(&model, mean_snr, &o).unwrap();
            assert!(
                (cap.mean - cap_true).abs() < 4.0 * cap.stderr,
                "capacity type {ty} at {db} dB: MC {} vs {}",
                cap.mean,
                cap_true
            );

            let hv = estimate(&cfg, mean_snr, &EstimateMetric::HarvestedMean, &sim);
            let hv_true = harvested_power_mean(&cfg);
            assert!(
                (hv.mean - hv_true).abs() < 4.0 * hv.stderr,
                "harvested type {ty} at {db} dB: MC {} vs {}",
                hv.mean,
                hv_true
            );
        }
    }
}

#[test]
fn distinct_streams_are_uncorrelated() {
    let cfg = system_defaults();
    let n = 200_000;
    let a = sample_h1(&cfg, &SimOptions { seed: 77, num_samples: n, stream_id: 0 });
    let b = sample_h1(&cfg, &SimOptions { seed: 77, num_samples: n, stream_id: 1 });
    let ma = a.iter().sum::<f64>() / n as f64;
    let mb = b.iter().sum::<f64>() / n as f64;
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for i in 0..n {
        cov += (a[i] - ma) * (b[i] - mb);
        va += (a[i] - ma) * (a[i] - ma);
        vb += (b[i] - mb) * (b[i] - mb);
    }
    let rho = cov / (va.sqrt() * vb.sqrt());
    assert!(
        rho.abs() < 3.0 / (n as f64).sqrt(),
        "cross-stream correlation {rho}"
    );
}

#[test]
fn outage_estimator_monotone_under_common_random_numbers() {
    let cfg = system_defaults();
    let sim = SimOptions { seed: 2024, num_samples: 200_000, stream_id: 0 };
    let mut prev = f64::INFINITY;
    for i in 0..8 {
        let mean_snr = db_to_linear(20.0 + 3.0 * i as f64);
        let op = estimate(
            &cfg,
            mean_snr,
            &EstimateMetric::Outage { snr_threshold: cfg.snr_threshold },
            &sim,
        );
        assert!(op.mean <= prev, "OP must not increase with SNR under common randomness");
        prev = op.mean;
    }
}

#[test]
fn degenerate_split_gives_zero_snr_and_harvest() {
    let mut cfg = system_defaults();
    cfg.split_rho = 1.0;
    assert_eq!(cfg.mean_return_snr(), 0.0);
    let sim = SimOptions { num_samples: 10_000, ..Default::default() };
    let gammas = sample_gamma_u(&cfg, cfg.mean_return_snr(), &sim);
    assert!(gammas.iter().all(|&g| g == 0.0));
    let hv = estimate(&cfg, 1.0, &EstimateMetric::HarvestedMean, &sim);
    assert_eq!(hv.mean, 0.0);
}

#[test]
fn jitter_multiples_match_closed_form_outage() {
    // The pointing sampler and the G/H-function route agree across the
    // whole jitter range, including the mu^2 < 1 regime.
    let base = system_defaults();
    let o = EvalOptions::default();
    let mean_snr = db_to_linear(35.0);
    for (i, &mult) in [0.5f64, 1.0, 1.5, 2.0].iter().enumerate() {
        let mut cfg = base.clone();
        cfg.pointing = PointingGeometry::new(
            cfg.pointing.aperture_radius,
            cfg.pointing.beam_waist,
            mult * cfg.pointing.aperture_radius,
        )
        .unwrap();
        let model = ChannelModel::new(&cfg).unwrap();
        let sim = SimOptions { seed: 400 + i as u64, num_samples: 400_000, stream_id: 0 };
        let op = estimate(&cfg, mean_snr, &EstimateMetric::Outage { snr_threshold: cfg.snr_threshold }, &sim);
        let analytic = outage_probability(&model, cfg.snr_threshold, mean_snr, &o).unwrap();
        assert!(
            (op.mean - analytic).abs() < 4.0 * op.stderr,
            "jitter {mult}: MC {} vs analytic {}",
            op.mean,
            analytic
        );
    }
}
