//! Closed-form performance metrics of the return link: outage, diversity
//! order, SNR moments, average BER, ergodic capacity and harvested power.
//!
//! BER and capacity reuse the channel's two-hop Mellin blocks: the inner
//! γ-integral of each metric closes into additional gamma factors, so every
//! metric is again a short sum of Mellin–Barnes terms.

use thiserror::Error;

use crate::channel::{eval_terms, ChannelError, ChannelModel, LinkConfig, MellinTerm};
use crate::specfun::{EvalOptions, GammaFactor, MellinIntegrand, SpecFunError};

#[derive(Debug, Clone, Error)]
pub enum MetricsError {
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
    #[error("invalid modulation: {0}")]
    Modulation(String),
    #[error("moment of order {order} diverges")]
    DivergentMoment { order: f64 },
    #[error("degenerate power split: rho = 1 routes no power to harvesting")]
    DegenerateSplit,
}

// ---------------------------------------------------------------------------
// Modulation
// ---------------------------------------------------------------------------

/// Modulation family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Ook,
    Mpsk,
    Mqam,
}

/// Modulation scheme with the unified-BER parameters (δ_B, p_B, q_Bk).
#[derive(Debug, Clone, PartialEq)]
pub struct ModulationSpec {
    pub scheme: Scheme,
    /// Constellation order M (1 for OOK).
    pub order: u32,
    pub delta_b: f64,
    pub p_b: f64,
    pub q_list: Vec<f64>,
}

impl ModulationSpec {
    /// On-off keying: δ = 1, p = 1/2, q = {1/2}.
    pub fn ook() -> Self {
        Self { scheme: Scheme::Ook, order: 1, delta_b: 1.0, p_b: 0.5, q_list: vec![0.5] }
    }

    /// M-ary PSK: δ = 2/max(log₂M, 2), q_k = sin²((2k−1)π/M)·log₂M,
    /// N = max(M/4, 1).
    pub fn mpsk(order: u32) -> Result<Self, MetricsError> {
        if order < 2 || !order.is_power_of_two() {
            return Err(MetricsError::Modulation(format!(
                "PSK order must be a power of two >= 2, got {order}"
            )));
        }
        let m = order as f64;
        let bits = m.log2();
        let delta_b = 2.0 / bits.max(2.0);
        let n = (order / 4).max(1);
        let q_list = (1..=n)
            .map(|k| {
                let s = ((2 * k - 1) as f64 * std::f64::consts::PI / m).sin();
                s * s * bits
            })
            .collect();
        Ok(Self { scheme: Scheme::Mpsk, order, delta_b, p_b: 0.5, q_list })
    }

    /// M-ary QAM (square constellations): δ = 4/log₂M·(1−1/√M),
    /// q_k = 3(2k−1)²/(2(M−1))·log₂M, N = √M/2.
    pub fn mqam(order: u32) -> Result<Self, MetricsError> {
        let sqrt_m = (order as f64).sqrt().round() as u32;
        if order < 4 || !order.is_power_of_two() || sqrt_m * sqrt_m != order {
            return Err(MetricsError::Modulation(format!(
                "QAM order must be an even power of two >= 4, got {order}"
            )));
        }
        let m = order as f64;
        let bits = m.log2();
        let delta_b = 4.0 / bits * (1.0 - 1.0 / m.sqrt());
        let n = sqrt_m / 2;
        let q_list = (1..=n)
            .map(|k| 3.0 * ((2 * k - 1) as f64).powi(2) / (2.0 * (m - 1.0)) * bits)
            .collect();
        Ok(Self { scheme: Scheme::Mqam, order, delta_b, p_b: 0.5, q_list })
    }

    /// Parse a label such as "ook", "16-psk" or "256-qam".
    pub fn parse(label: &str) -> Result<Self, MetricsError> {
        let lower = label.to_ascii_lowercase();
        if lower == "ook" {
            return Ok(Self::ook());
        }
        if let Some(m) = lower.strip_suffix("-psk") {
            let order: u32 = m
                .parse()
                .map_err(|_| MetricsError::Modulation(format!("bad PSK order in '{label}'")))?;
            return Self::mpsk(order);
        }
        if let Some(m) = lower.strip_suffix("-qam") {
            let order: u32 = m
                .parse()
                .map_err(|_| MetricsError::Modulation(format!("bad QAM order in '{label}'")))?;
            return Self::mqam(order);
        }
        Err(MetricsError::Modulation(format!(
            "unknown modulation '{label}' (expected ook, <M>-psk or <M>-qam)"
        )))
    }

    pub fn label(&self) -> String {
        match self.scheme {
            Scheme::Ook => "ook".to_string(),
            Scheme::Mpsk => format!("{}-psk", self.order),
            Scheme::Mqam => format!("{}-qam", self.order),
        }
    }
}

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

/// Outage probability: the SNR distribution function at the threshold.
pub fn outage_probability(
    model: &ChannelModel,
    snr_threshold: f64,
    mean_snr: f64,
    opts: &EvalOptions,
) -> Result<f64, MetricsError> {
    Ok(model.snr_cdf(snr_threshold, mean_snr, opts)?)
}

/// High-SNR slope of the outage curve: min{1, μ_s², a·c}.
pub fn diversity_order(model: &ChannelModel) -> f64 {
    let ac = model.turbulence.gg_a * model.turbulence.gg_c;
    1f64.min(model.mu_s_sq).min(ac)
}

/// s-th moment of the return SNR, E[γ^s] = γ̄^s (E[h1^s])² by hop
/// independence.
pub fn snr_moment(model: &ChannelModel, mean_snr: f64, s: f64) -> Result<f64, MetricsError> {
    if !(s >= 0.0) || !s.is_finite() {
        return Err(MetricsError::DivergentMoment { order: s });
    }
    let single = model
        .h1_moment(s)
        .map_err(|_| MetricsError::DivergentMoment { order: s })?;
    Ok(mean_snr.powf(s) * single * single)
}

/// Mellin terms of one I(p, q) integral of the unified BER expression.
pub fn ber_terms(
    model: &ChannelModel,
    mean_snr: f64,
    p_b: f64,
    q: f64,
) -> Result<Vec<MellinTerm>, MetricsError> {
    let half_inv_gamma_p = 0.5 * (-libm::lgamma(p_b)).exp();
    model
        .double_blocks()
        .into_iter()
        .map(|(mut factors, exponent, scale, prefactor)| {
            factors.push(GammaFactor::num(0.0, 1.0));
            factors.push(GammaFactor::den(1.0, 1.0));
            factors.push(GammaFactor::num(p_b, exponent));
            let integrand = MellinIntegrand::new(
                factors,
                exponent,
                prefactor / exponent * half_inv_gamma_p,
            )?;
            Ok(MellinTerm { integrand, argument: 1.0 / (q * mean_snr * scale) })
        })
        .collect()
}

/// Average BER δ_B Σ_k I(p_B, q_Bk), with the per-term sum truncated once
/// a term drops below 1e-4 of the running total.
pub fn average_ber(
    model: &ChannelModel,
    mean_snr: f64,
    modulation: &ModulationSpec,
    opts: &EvalOptions,
) -> Result<f64, MetricsError> {
    if !(mean_snr > 0.0) {
        return Err(MetricsError::Channel(ChannelError::SpecFun(
            SpecFunError::InvalidParameter("mean SNR must be positive".into()),
        )));
    }
    let mut sum = 0.0;
    for &q in &modulation.q_list {
        let terms = ber_terms(model, mean_snr, modulation.p_b, q)?;
        let term = eval_terms(&terms, opts)?;
        sum += term;
        if term < 1e-4 * sum {
            break;
        }
    }
    Ok(modulation.delta_b * sum)
}

/// Mellin terms of the ergodic capacity E[ln(1+γ)].
pub fn capacity_terms(model: &ChannelModel, mean_snr: f64) -> Result<Vec<MellinTerm>, MetricsError> {
    model
        .double_blocks()
        .into_iter()
        .map(|(mut factors, exponent, scale, prefactor)| {
            // Mellin transform of ln(1+γ): Γ(−et)² Γ(1+et) / Γ(1−et).
            factors.push(GammaFactor::num(0.0, -exponent));
            factors.push(GammaFactor::num(0.0, -exponent));
            factors.push(GammaFactor::num(1.0, exponent));
            factors.push(GammaFactor::den(1.0, -exponent));
            let integrand = MellinIntegrand::new(factors, exponent, prefactor)?;
            Ok(MellinTerm { integrand, argument: 1.0 / (mean_snr * scale) })
        })
        .collect()
}

/// Ergodic capacity of the end-to-end link in nats per channel use.
pub fn ergodic_capacity(
    model: &ChannelModel,
    mean_snr: f64,
    opts: &EvalOptions,
) -> Result<f64, MetricsError> {
    if !(mean_snr > 0.0) {
        return Err(MetricsError::Channel(ChannelError::SpecFun(
            SpecFunError::InvalidParameter("mean SNR must be positive".into()),
        )));
    }
    Ok(eval_terms(&capacity_terms(model, mean_snr)?, opts)?)
}

/// Average harvested power (W): A0·h_a·(1−ρ)·η_r·P_t·μ²/(1+μ²)·E[h_t].
pub fn harvested_power_mean(cfg: &LinkConfig) -> f64 {
    let harvest_gain = (1.0 - cfg.split_rho) * cfg.eff_pv * cfg.tx_power;
    harvest_gain
        * cfg.attenuation()
        * cfg.pointing.a0
        * cfg.pointing.mu_s_sq
        / (1.0 + cfg.pointing.mu_s_sq)
        * cfg.turbulence.mean()
}

/// Density of the instantaneous harvested power P_s = (1−ρ)·η_r·P_t·h1.
pub fn harvested_power_pdf(
    cfg: &LinkConfig,
    model: &ChannelModel,
    p: f64,
    opts: &EvalOptions,
) -> Result<f64, MetricsError> {
    let k = (1.0 - cfg.split_rho) * cfg.eff_pv * cfg.tx_power;
    if k <= 0.0 {
        return Err(MetricsError::DegenerateSplit);
    }
    Ok(model.h1_pdf(p / k, opts)? / k)
}
