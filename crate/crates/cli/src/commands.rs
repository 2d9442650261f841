//! Subcommand implementations.

use std::time::Instant;

use crate::config::{scenario_summary, Scenario};
use crate::output::RunRecord;
use slipt_core::channel::ChannelModel;
use slipt_core::metrics::{
    average_ber, diversity_order, ergodic_capacity, harvested_power_mean, outage_probability,
    snr_moment,
};
use slipt_core::montecarlo::{estimate, EstimateMetric, SimOptions};
use slipt_core::specfun::{EvalOptions, SpecFunError};
use slipt_core::channel::ChannelError;

/// Metric selectable on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Metric {
    Op,
    Ber,
    Capacity,
    HarvestedMean,
    Diversity,
    SnrMoment,
}

impl Metric {
    pub fn name(&self) -> &'static str {
        match self {
            Metric::Op => "op",
            Metric::Ber => "ber",
            Metric::Capacity => "capacity",
            Metric::HarvestedMean => "harvested-mean",
            Metric::Diversity => "diversity",
            Metric::SnrMoment => "snr-moment",
        }
    }
}

/// Failure modes that map onto distinct exit codes.
#[derive(Debug)]
pub enum RunError {
    /// Exit 2: configuration or usage problem.
    Config(String),
    /// Exit 3: a closed form did not converge numerically.
    Numeric(String),
    /// Exit 1: a validation check failed.
    ValidationFailed,
    /// Exit 1: I/O problem.
    Io(String),
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Config(m) => write!(f, "configuration error: {m}"),
            RunError::Numeric(m) => write!(f, "numerical error: {m}"),
            RunError::ValidationFailed => write!(f, "validation failed"),
            RunError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

fn classify(err: ChannelError) -> RunError {
    match err {
        ChannelError::SpecFun(SpecFunError::NonConvergence { achieved, requested }) => {
            RunError::Numeric(format!(
                "did not converge (achieved {achieved:.3e}, requested {requested:.3e})"
            ))
        }
        other => RunError::Config(other.to_string()),
    }
}

/// Compute one metric analytically and, optionally, by Monte Carlo.
pub fn evaluate_metric(
    scenario: &Scenario,
    metric: Metric,
    moment_order: f64,
    mc: Option<(usize, u64, u32)>,
    timing: bool,
) -> Result<RunRecord, RunError> {
    let start = Instant::now();
    let opts = EvalOptions::default();
    let model = ChannelModel::new(&scenario.cfg).map_err(classify)?;
    let mean_snr = scenario.mean_snr();
    let mut record = RunRecord::new(metric.name());

    let analytic = match metric {
        Metric::Op => {
            if !(mean_snr > 0.0) {
                return Err(RunError::Config(
                    "mean SNR is zero (rho = 1 or zero transmit power); set mean_snr_db".into(),
                ));
            }
            outage_probability(&model, scenario.cfg.snr_threshold, mean_snr, &opts)
                .map_err(|e| classify(match e {
                    slipt_core::metrics::MetricsError::Channel(c) => c,
                    other => ChannelError::SpecFun(SpecFunError::InvalidParameter(other.to_string())),
                }))?
        }
        Metric::Ber => metrics_err(average_ber(&model, mean_snr, &scenario.modulation, &opts))?,
        Metric::Capacity => metrics_err(ergodic_capacity(&model, mean_snr, &opts))?,
        Metric::HarvestedMean => harvested_power_mean(&scenario.cfg),
        Metric::Diversity => diversity_order(&model),
        Metric::SnrMoment => metrics_err(snr_moment(&model, mean_snr, moment_order))?,
    };
    record.analytic = Some(analytic);

    if let Some((samples, seed, stream_id)) = mc {
        let sim = SimOptions { seed, num_samples: samples, stream_id };
        let est = match metric {
            Metric::Op => Some(estimate(
                &scenario.cfg,
                mean_snr,
                &EstimateMetric::Outage { snr_threshold: scenario.cfg.snr_threshold },
                &sim,
            )),
            Metric::Ber => Some(estimate(
                &scenario.cfg,
                mean_snr,
                &EstimateMetric::Ber(scenario.modulation.clone()),
                &sim,
            )),
            Metric::Capacity => Some(estimate(&scenario.cfg, mean_snr, &EstimateMetric::Capacity, &sim)),
            Metric::HarvestedMean => {
                Some(estimate(&scenario.cfg, mean_snr, &EstimateMetric::HarvestedMean, &sim))
            }
            // No sample-path estimator exists for these.
            Metric::Diversity | Metric::SnrMoment => None,
        };
        if let Some(est) = est {
            record.mc_mean = Some(est.mean);
            record.mc_stderr = Some(est.stderr);
        }
    }
    if timing {
        record.runtime_s = Some(start.elapsed().as_secs_f64());
    }
    Ok(record)
}

fn metrics_err(r: Result<f64, slipt_core::metrics::MetricsError>) -> Result<f64, RunError> {
    r.map_err(|e| match e {
        slipt_core::metrics::MetricsError::Channel(c) => classify(c),
        slipt_core::metrics::MetricsError::SpecFun(s) => classify(ChannelError::SpecFun(s)),
        other => RunError::Config(other.to_string()),
    })
}

/// Header line carrying the reproducibility context.
pub fn header(command: &str, seed: u64, scenario: Option<&Scenario>) -> String {
    let mut h = format!("# slipt {command} seed={seed:#010x}");
    if let Some(s) = scenario {
        for (k, v) in scenario_summary(s) {
            h.push_str(&format!(" {k}={v}"));
        }
    }
    h
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

/// One line of the validation report.
pub struct CheckLine {
    pub name: String,
    pub outcome: Outcome,
    pub detail: String,
}

#[derive(PartialEq, Eq, Clone, Copy)]
pub enum Outcome {
    Pass,
    Fail,
    Skip,
}

impl CheckLine {
    fn pass(name: &str, detail: String) -> Self {
        Self { name: name.into(), outcome: Outcome::Pass, detail }
    }
    fn fail(name: &str, detail: String) -> Self {
        Self { name: name.into(), outcome: Outcome::Fail, detail }
    }
    fn skip(name: &str, detail: String) -> Self {
        Self { name: name.into(), outcome: Outcome::Skip, detail }
    }
    fn gate(name: &str, ok: bool, detail: String) -> Self {
        if ok {
            Self::pass(name, detail)
        } else {
            Self::fail(name, detail)
        }
    }
}

/// Analytic-versus-simulation agreement suite: density normalizations,
/// KS distances for h1, h and γ, moment identities and the four metric
/// estimators. Returns the report lines; any FAIL marks the run failed.
pub fn run_validation(scenario: &Scenario, samples: usize, seed: u64) -> Result<Vec<CheckLine>, RunError> {
    use slipt_core::montecarlo::{ks_statistic, sample_gamma_u, sample_h, sample_h1, MonotoneCubic};
    use slipt_core::quadrature::integrate;

    let cfg = &scenario.cfg;
    let model = ChannelModel::new(cfg).map_err(classify)?;
    let opts = EvalOptions::default();
    let mean_snr = if scenario.mean_snr.is_some() || cfg.mean_return_snr() > 0.0 {
        scenario.mean_snr()
    } else {
        slipt_core::db_to_linear(30.0)
    };
    let mut lines = Vec::new();

    // Density normalizations.
    let p_sing = 1f64.min(cfg.pointing.mu_s_sq).min(cfg.turbulence.gg_a * cfg.turbulence.gg_c);
    let norm = |f: &dyn Fn(f64) -> f64, upper: f64| -> f64 {
        integrate(
            |u| {
                let h = u.powf(1.0 / p_sing.min(1.0));
                f(h) * h / (p_sing.min(1.0) * u)
            },
            0.0,
            upper.powf(p_sing.min(1.0)),
            &[1e-6, 1e-3, 0.05, 0.3],
            1e-6,
        )
        .value
    };
    let egg = integrate(|x| cfg.turbulence.pdf(x), 0.0, 12.0, &[0.3, 1.0, 3.0], 1e-8).value;
    lines.push(CheckLine::gate(
        "normalization/turbulence",
        (egg - 1.0).abs() < 1e-5,
        format!("integral = {egg:.8}"),
    ));
    let h1n = norm(&|h| model.h1_pdf(h, &opts).unwrap_or(f64::NAN), 6.0);
    lines.push(CheckLine::gate(
        "normalization/single-hop",
        (h1n - 1.0).abs() < 1e-5,
        format!("integral = {h1n:.8}"),
    ));
    let hn = norm(&|h| model.h_pdf(h, &opts).unwrap_or(f64::NAN), 4.0);
    lines.push(CheckLine::gate(
        "normalization/composite",
        (hn - 1.0).abs() < 1e-5,
        format!("integral = {hn:.8}"),
    ));

    // Moment identities.
    let m0 = snr_moment(&model, mean_snr, 0.0).map_err(|e| RunError::Numeric(e.to_string()))?;
    lines.push(CheckLine::gate(
        "moments/zeroth",
        (m0 - 1.0).abs() < 1e-12,
        format!("s=0 moment = {m0:.14}"),
    ));
    let m1 = snr_moment(&model, mean_snr, 1.0).map_err(|e| RunError::Numeric(e.to_string()))?;
    let product = mean_snr * model.h1_mean() * model.h1_mean();
    lines.push(CheckLine::gate(
        "moments/first-factorizes",
        (m1 - product).abs() < 1e-6 * m1.abs().max(1e-300),
        format!("E[γ] = {m1:.8e}, γ̄(E[h1])² = {product:.8e}"),
    ));

    // KS agreement on the three distributions.
    let sim = SimOptions { seed, num_samples: samples, stream_id: 0 };
    let interp = |cdf: &dyn Fn(f64) -> f64, lo: f64, hi: f64| -> MonotoneCubic {
        let n = 700;
        let xs: Vec<f64> = (0..n)
            .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp())
            .collect();
        let mut ys: Vec<f64> = xs.iter().map(|&x| cdf(x).clamp(0.0, 1.0)).collect();
        for i in 1..n {
            ys[i] = ys[i].max(ys[i - 1]);
        }
        MonotoneCubic::new(xs, ys)
    };
    // The 5e-3 bound is the million-sample agreement figure; at smaller
    // sample counts the alpha = 0.01 Kolmogorov critical value governs.
    let ks_limit = 5e-3f64.max(1.63 / (samples as f64).sqrt());
    let mut ks_check = |name: &str, mut samples_vec: Vec<f64>, cdf: &dyn Fn(f64) -> f64| {
        samples_vec.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let lo = samples_vec[0].max(1e-14);
        let hi = samples_vec[samples_vec.len() - 1] * 1.01;
        let table = interp(cdf, lo, hi);
        let ks = ks_statistic(&samples_vec, |x| table.eval(x));
        lines.push(CheckLine::gate(
            name,
            ks < ks_limit,
            format!("KS distance = {ks:.5} (limit {ks_limit:.5})"),
        ));
    };
    let stream = |id: u32| SimOptions { seed, num_samples: samples, stream_id: id };
    ks_check("ks/single-hop", sample_h1(cfg, &stream(1)), &|x| {
        model.h1_cdf(x, &opts).unwrap_or(f64::NAN)
    });
    ks_check("ks/composite", sample_h(cfg, &stream(2)), &|x| {
        model.h_cdf(x, &opts).unwrap_or(f64::NAN)
    });
    if mean_snr > 0.0 {
        ks_check("ks/snr", sample_gamma_u(cfg, mean_snr, &stream(3)), &|x| {
            model.snr_cdf(x, mean_snr, &opts).unwrap_or(f64::NAN)
        });
    }

    // Metric estimators against closed forms.
    let four_sigma = |name: &str, analytic: f64, est: slipt_core::montecarlo::EmpiricalSummary| {
        CheckLine::gate(
            name,
            (est.mean - analytic).abs() < 4.0 * est.stderr.max(1e-9),
            format!("analytic = {analytic:.6e}, mc = {:.6e} ± {:.2e}", est.mean, est.stderr),
        )
    };
    let op_true = outage_probability(&model, cfg.snr_threshold, mean_snr, &opts)
        .map_err(|e| RunError::Numeric(e.to_string()))?;
    lines.push(four_sigma(
        "metric/op",
        op_true,
        estimate(cfg, mean_snr, &EstimateMetric::Outage { snr_threshold: cfg.snr_threshold }, &sim),
    ));
    let ber_true = average_ber(&model, mean_snr, &scenario.modulation, &opts)
        .map_err(|e| RunError::Numeric(e.to_string()))?;
    lines.push(four_sigma(
        "metric/ber",
        ber_true,
        estimate(cfg, mean_snr, &EstimateMetric::Ber(scenario.modulation.clone()), &sim),
    ));
    let cap_true = ergodic_capacity(&model, mean_snr, &opts)
        .map_err(|e| RunError::Numeric(e.to_string()))?;
    lines.push(four_sigma(
        "metric/capacity",
        cap_true,
        estimate(cfg, mean_snr, &EstimateMetric::Capacity, &sim),
    ));
    if cfg.split_rho < 1.0 {
        let hv_true = harvested_power_mean(cfg);
        lines.push(four_sigma(
            "metric/harvested-mean",
            hv_true,
            estimate(cfg, mean_snr, &EstimateMetric::HarvestedMean, &sim),
        ));
        // Harvested mean equals the first moment of its density.
        let k = (1.0 - cfg.split_rho) * cfg.eff_pv * cfg.tx_power;
        let quad = integrate(
            |p| {
                p * slipt_core::metrics::harvested_power_pdf(cfg, &model, p, &opts)
                    .unwrap_or(f64::NAN)
            },
            1e-9 * k,
            6.0 * k,
            &[0.05 * k, 0.3 * k],
            1e-6,
        )
        .value;
        lines.push(CheckLine::gate(
            "metric/harvested-mean-vs-pdf",
            (quad - hv_true).abs() < 1e-4 * hv_true,
            format!("closed form = {hv_true:.8e}, pdf quadrature = {quad:.8e}"),
        ));
    } else {
        lines.push(CheckLine::skip(
            "metric/harvested-mean",
            "degenerate split (rho = 1 routes no power to harvesting)".into(),
        ));
        lines.push(CheckLine::skip(
            "metric/harvested-mean-vs-pdf",
            "degenerate split (rho = 1 routes no power to harvesting)".into(),
        ));
    }

    Ok(lines)
}

pub fn render_report(lines: &[CheckLine], samples: usize, seed: u64) -> (String, bool) {
    let mut out = format!("# slipt validate seed={seed:#010x} samples={samples}\n");
    let mut failed = false;
    for line in lines {
        let tag = match line.outcome {
            Outcome::Pass => "PASS",
            Outcome::Fail => {
                failed = true;
                "FAIL"
            }
            Outcome::Skip => "SKIP",
        };
        out.push_str(&format!("{tag} {:<32} {}\n", line.name, line.detail));
    }
    let total = lines.iter().filter(|l| l.outcome != Outcome::Skip).count();
    let passed = lines.iter().filter(|l| l.outcome == Outcome::Pass).count();
    out.push_str(&format!("{passed}/{total} checks passed\n"));
    (out, failed)
}
