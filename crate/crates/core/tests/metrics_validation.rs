//! Metric closed forms against quadrature oracles and reported values.

use slipt_core::channel::{eval_terms, ChannelModel, LinkConfig};
use slipt_core::metrics::{
    average_ber, ber_terms, capacity_terms, diversity_order, ergodic_capacity,
    harvested_power_mean, harvested_power_pdf, outage_probability, snr_moment, ModulationSpec,
};
use slipt_core::presets::system_defaults;
use slipt_core::quadrature::{integrate, integrate_to_inf};
use slipt_core::specfun::EvalOptions;
use slipt_core::db_to_linear;

fn setup() -> (LinkConfig, ChannelModel, EvalOptions) {
    let cfg = system_defaults();
    let model = ChannelModel::new(&cfg).unwrap();
    (cfg, model, EvalOptions::default())
}

#[test]
fn outage_equals_snr_cdf_pointwise() {
    let (cfg, model, o) = setup();
    for &db in &[10.0, 25.0, 40.0] {
        let mean = db_to_linear(db);
        let a = outage_probability(&model, cfg.snr_threshold, mean, &o).unwrap();
        let b = model.snr_cdf(cfg.snr_threshold, mean, &o).unwrap();
        assert_eq!(a, b, "shared code path must give identical values");
    }
}

#[test]
fn outage_reported_operating_points() {
    // 30 dB mean SNR at 10/30/50 m: about 3.5, 5.9 and 9.6 percent.
    let (cfg, _, o) = setup();
    let mean = db_to_linear(30.0);
    let expect = [(10.0, 3.5e-2), (30.0, 5.9e-2), (50.0, 9.6e-2)];
    for (d, target) in expect {
        let mut c = cfg.clone();
        c.distance = d;
        let model = ChannelModel::new(&c).unwrap();
        let op = outage_probability(&model, c.snr_threshold, mean, &o).unwrap();
        assert!(
            (op - target).abs() < 0.15 * target,
            "d = {d}: OP {op:.4e}, expected about {target:.2e}"
        );
    }
}

#[test]
fn diversity_order_branches() {
    let (cfg, model, _) = setup();
    assert_eq!(diversity_order(&model), 1.0);

    // Heavy jitter drives mu^2 below one.
    let mut c = cfg.clone();
    c.pointing = slipt_core::channel::PointingGeometry::new(
        c.pointing.aperture_radius,
        c.pointing.beam_waist,
        2.0 * c.pointing.aperture_radius,
    )
    .unwrap();
    let m = ChannelModel::new(&c).unwrap();
    assert!((diversity_order(&m) - c.pointing.mu_s_sq).abs() < 1e-12);

    // Small a*c surrogate activates the turbulence branch.
    let mut c2 = cfg.clone();
    c2.turbulence = slipt_core::channel::EggParams::new(0.2, 0.3, 0.3, 1.2, 2.0).unwrap();
    let m2 = ChannelModel::new(&c2).unwrap();
    assert!((diversity_order(&m2) - 0.6).abs() < 1e-12);
}

#[test]
fn high_snr_outage_slope_matches_diversity_order() {
    // Fitted log-log slope between 50 and 60 dB within 0.15 of
    // min{1, mu^2, ac} for a parameter set per branch of the min.
    let base = system_defaults();
    let o = EvalOptions::default();

    let mut heavy_jitter = base.clone();
    heavy_jitter.pointing = slipt_core::channel::PointingGeometry::new(
        heavy_jitter.pointing.aperture_radius,
        heavy_jitter.pointing.beam_waist,
        2.0 * heavy_jitter.pointing.aperture_radius,
    )
    .unwrap();

    let mut small_ac = base.clone();
    small_ac.turbulence = slipt_core::channel::EggParams::new(0.2, 0.3, 0.3, 1.2, 2.0).unwrap();

    for cfg in [base, heavy_jitter, small_ac] {
        let model = ChannelModel::new(&cfg).unwrap();
        let d = diversity_order(&model);
        let op50 = outage_probability(&model, cfg.snr_threshold, db_to_linear(50.0), &o).unwrap();
        let op60 = outage_probability(&model, cfg.snr_threshold, db_to_linear(60.0), &o).unwrap();
        let slope = (op50 / op60).log10();
        assert!(
            (slope - d).abs() <= 0.15,
            "diversity {d}: fitted slope {slope} (OP {op50:.3e} -> {op60:.3e})"
        );
    }
}

#[test]
fn moment_identities() {
    let (_, model, _) = setup();
    let mean = db_to_linear(27.0);
    let m0 = snr_moment(&model, mean, 0.0).unwrap();
    assert!((m0 - 1.0).abs() < 1e-12, "s=0 moment {m0}");

    // First moment factorizes over independent hops.
    let m1 = snr_moment(&model, mean, 1.0).unwrap();
    let h1_mean = model.h1_mean();
    assert!(
        (m1 - mean * h1_mean * h1_mean).abs() < 1e-6 * m1,
        "m1 {m1} vs product {}",
        mean * h1_mean * h1_mean
    );
}

#[test]
fn second_moment_matches_quadrature() {
    let (_, model, o) = setup();
    let mean = db_to_linear(20.0);
    let closed = snr_moment(&model, mean, 2.0).unwrap();
    let quad = integrate_to_inf(
        |g| g * g * model.snr_pdf(g, mean, &o).unwrap(),
        0.0,
        &[mean * 0.01, mean * 0.05, mean * 0.2, mean],
        1e-7,
    );
    assert!(
        (closed - quad.value).abs() < 1e-3 * closed,
        "closed {closed:.6e} vs quadrature {:.6e}",
        quad.value
    );
}

#[test]
fn moment_divergence_detected() {
    let (_, model, _) = setup();
    assert!(snr_moment(&model, 100.0, -2.0).is_err());
    assert!(snr_moment(&model, 100.0, f64::NAN).is_err());
}

#[test]
fn ber_closed_form_matches_cdf_quadrature() {
    // I(p, q) = q^p/(2Γ(p)) ∫ γ^{p−1} e^{−qγ} F(γ) dγ, evaluated with the
    // closed-form CDF under an independent quadrature.
    let (_, model, o) = setup();
    let mean = db_to_linear(30.0);
    let p = 0.5f64;
    for &q in &[0.5, 1.0, 3.0] {
        let closed = eval_terms(&ber_terms(&model, mean, p, q).unwrap(), &o).unwrap();
        let pref = q.powf(p) / (2.0 * libm::lgamma(p).exp());
        let quad = integrate_to_inf(
            |g| g.powf(p - 1.0) * (-q * g).exp() * model.snr_cdf(g, mean, &o).unwrap(),
            0.0,
            &[0.05 / q, 0.3 / q, 1.0 / q, 4.0 / q],
            1e-7,
        );
        let oracle = pref * quad.value;
        assert!(
            (closed - oracle).abs() < 1e-4 * oracle,
            "q = {q}: closed {closed:.6e} vs quadrature {oracle:.6e}"
        );
    }
}

#[test]
fn ber_conditional_erfc_equivalence() {
    // The same I(1/2, q) also equals E[erfc(√(qγ))/2] against the SNR
    // density, the form the Monte Carlo estimator uses.
    let (_, model, o) = setup();
    let mean = db_to_linear(25.0);
    let q = 0.5;
    let closed = eval_terms(&ber_terms(&model, mean, 0.5, q).unwrap(), &o).unwrap();
    let quad = integrate_to_inf(
        |g| 0.5 * libm::erfc((q * g).sqrt()) * model.snr_pdf(g, mean, &o).unwrap(),
        0.0,
        &[0.1, 1.0, 10.0, 100.0],
        1e-7,
    );
    assert!(
        (closed - quad.value).abs() < 1e-4 * closed,
        "closed {closed:.6e} vs erfc route {:.6e}",
        quad.value
    );
}

#[test]
fn ber_reported_values_and_monotonicity() {
    let (_, model, o) = setup();
    let mean35 = db_to_linear(35.0);

    let ook = average_ber(&model, mean35, &ModulationSpec::ook(), &o).unwrap();
    assert!((ook - 7.2e-3).abs() < 0.15 * 7.2e-3, "OOK at 35 dB: {ook:.4e}");

    let psk16 = average_ber(&model, mean35, &ModulationSpec::mpsk(16).unwrap(), &o).unwrap();
    assert!((psk16 - 1.2e-2).abs() < 0.15 * 1.2e-2, "16-PSK at 35 dB: {psk16:.4e}");

    // Monotone nonincreasing in the mean SNR, vanishing at high SNR.
    let mut prev = f64::INFINITY;
    for i in 0..10 {
        let mean = db_to_linear(15.0 + 5.0 * i as f64);
        let ber = average_ber(&model, mean, &ModulationSpec::ook(), &o).unwrap();
        assert!(ber <= prev * (1.0 + 1e-9), "BER not monotone at step {i}");
        prev = ber;
    }
    assert!(prev < 1e-4, "BER should vanish at 60 dB, got {prev}");
}

#[test]
fn ook_equals_single_term_of_the_unified_expression() {
    // The OOK table row is one I(1/2, 1/2) term with unit scale, so the
    // scheme-level average must match the direct term evaluation.
    let (_, model, o) = setup();
    let mean = db_to_linear(30.0);
    let direct = eval_terms(&ber_terms(&model, mean, 0.5, 0.5).unwrap(), &o).unwrap();
    let scheme = average_ber(&model, mean, &ModulationSpec::ook(), &o).unwrap();
    assert_eq!(scheme, direct, "shared evaluation path must agree exactly");
}

#[test]
fn ber_stays_within_the_scheme_bound() {
    let (_, model, o) = setup();
    for label in ["ook", "4-psk", "16-psk", "64-qam"] {
        let modulation = ModulationSpec::parse(label).unwrap();
        let bound = modulation.delta_b * modulation.q_list.len() as f64 / 2.0;
        for &db in &[0.0, 15.0, 35.0] {
            let ber = average_ber(&model, db_to_linear(db), &modulation, &o).unwrap();
            assert!(
                ber > 0.0 && ber <= bound,
                "{label} at {db} dB: {ber} outside (0, {bound}]"
            );
        }
    }
}

#[test]
fn capacity_matches_log_quadrature() {
    let (_, model, o) = setup();
    for &db in &[15.0, 30.0] {
        let mean = db_to_linear(db);
        let closed = ergodic_capacity(&model, mean, &o).unwrap();
        let quad = integrate_to_inf(
            |g| g.ln_1p() * model.snr_pdf(g, mean, &o).unwrap(),
            0.0,
            &[mean * 0.01, mean * 0.1, mean, 4.0 * mean],
            1e-7,
        );
        assert!(
            (closed - quad.value).abs() < 1e-4 * closed.abs(),
            "{db} dB: closed {closed:.8} vs quadrature {:.8}",
            quad.value
        );
    }
}

#[test]
fn capacity_reported_values() {
    // 40 dB: about 6.1/5.4/4.8/4.2 nats at 10/30/50/70 m.
    let (cfg, _, o) = setup();
    let mean = db_to_linear(40.0);
    for (d, target) in [(10.0, 6.1), (30.0, 5.4), (50.0, 4.8), (70.0, 4.2)] {
        let mut c = cfg.clone();
        c.distance = d;
        let model = ChannelModel::new(&c).unwrap();
        let cap = ergodic_capacity(&model, mean, &o).unwrap();
        assert!((cap - target).abs() < 0.15, "d = {d}: capacity {cap:.3}, expected ~{target}");
    }
}

#[test]
fn capacity_monotone_and_convex_in_db() {
    // E[ln(1+γ̄h)] is strictly increasing in γ̄ and convex along a dB
    // sweep (d²C/dt² = E[u(1−u)] > 0 for u = γ̄h/(1+γ̄h)), flattening to a
    // fixed slope at high SNR.
    let (_, model, o) = setup();
    let caps: Vec<f64> = (0..13)
        .map(|i| ergodic_capacity(&model, db_to_linear(5.0 * i as f64), &o).unwrap())
        .collect();
    for w in caps.windows(2) {
        assert!(w[1] > w[0], "capacity must increase with SNR");
    }
    for w in caps.windows(3) {
        assert!(w[2] - 2.0 * w[1] + w[0] >= -1e-6, "capacity must be convex along dB");
    }
    // The per-step increment approaches the channel's fixed dB slope.
    let last = caps[12] - caps[11];
    let limit = 5.0 / 10.0 * std::f64::consts::LN_10;
    assert!((last - limit).abs() < 0.05 * limit, "high-SNR slope {last} vs {limit}");
    assert!(caps[0] > 0.0);
}

#[test]
fn harvested_power_closed_form_vs_pdf_quadrature() {
    let (cfg, model, o) = setup();
    let closed = harvested_power_mean(&cfg);
    let k = (1.0 - cfg.split_rho) * cfg.eff_pv * cfg.tx_power;
    let quad = integrate(
        |p| p * harvested_power_pdf(&cfg, &model, p, &o).unwrap(),
        1e-9 * k,
        6.0 * k,
        &[0.05 * k, 0.2 * k, 0.5 * k],
        1e-7,
    );
    assert!(
        (closed - quad.value).abs() < 1e-4 * closed,
        "closed {closed:.8e} vs quadrature {:.8e}",
        quad.value
    );
}

#[test]
fn harvested_power_linear_in_tx_power() {
    let (cfg, _, _) = setup();
    let mut c1 = cfg.clone();
    c1.tx_power = 10.0;
    let mut c2 = cfg.clone();
    c2.tx_power = 1000.0;
    let slope1 = harvested_power_mean(&c1) / c1.tx_power;
    let slope2 = harvested_power_mean(&c2) / c2.tx_power;
    assert!(
        (slope1 - slope2).abs() <= 1e-10 * slope1,
        "harvested power must be exactly proportional to transmit power"
    );
}

#[test]
fn metric_integrands_series_vs_quadrature() {
    // Every BER and capacity Mellin term evaluated by both strategies in
    // the overlap regime stays within 1e-6 relative.
    use slipt_core::specfun::{mellin_eval, ContourAbscissa};
    let (_, model, _) = setup();
    let mean = db_to_linear(28.0);
    let mut terms = ber_terms(&model, mean, 0.5, 0.5).unwrap();
    terms.extend(capacity_terms(&model, mean).unwrap());
    for &h in &[0.02, 0.08] {
        terms.extend(model.h1_pdf_terms(h).unwrap());
        terms.extend(model.h1_cdf_terms(h).unwrap());
        terms.extend(model.h_pdf_terms(h).unwrap());
        terms.extend(model.h_cdf_terms(h).unwrap());
    }
    let strict = EvalOptions { relative_tolerance: 1e-10, ..Default::default() };
    let mut strategies_crossed = 0usize;
    for (i, t) in terms.iter().enumerate() {
        let auto = mellin_eval(&t.integrand, t.argument, &strict);
        let (left, right) = t.integrand.strip();
        let sigma = if left.is_finite() && right.is_finite() {
            0.35 * left + 0.65 * right
        } else {
            right - 0.37
        };
        let fixed = mellin_eval(
            &t.integrand,
            t.argument,
            &EvalOptions {
                relative_tolerance: 1e-9,
                contour_abscissa: ContourAbscissa::Fixed(sigma),
                ..Default::default()
            },
        );
        if let (Ok(a), Ok(b)) = (auto, fixed) {
            let scale = a.value.abs().max(1e-18);
            assert!(
                (a.value - b.value).abs() / scale < 1e-6,
                "term {i}: {} vs {}",
                a.value,
                b.value
            );
            if a.strategy != b.strategy {
                strategies_crossed += 1;
            }
        }
    }
    assert!(
        strategies_crossed >= 3,
        "expected the residue and quadrature routes to face off on several terms, got {strategies_crossed}"
    );
}
