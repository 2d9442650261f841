//! Composite channel statistics for the two-hop underwater optical link.
//!
//! A single hop gain is h = h_a · h_t · h_p with deterministic Beer–Lambert
//! attenuation h_a, mixture exponential/generalized-gamma turbulence fading
//! h_t, and Gaussian-jitter pointing loss h_p. The end-to-end gain is the
//! product of two i.i.d. hops and the return-link SNR is γ = γ̄·h.
//!
//! All densities and distribution functions are expressed as short sums of
//! Mellin–Barnes terms; the same per-branch blocks are reused by the
//! metrics module for BER and capacity integrands.

use thiserror::Error;

use crate::specfun::{EvalOptions, GammaFactor, MellinIntegrand, SpecFunError};

/// Pointing geometries steeper than this behave as perfect alignment; the
/// power-law exponent is clamped and samplers emit the constant A0.
pub const POINTING_DEGENERATE_LIMIT: f64 = 1e4;

/// Errors from channel-model construction and evaluation.
#[derive(Debug, Clone, Error)]
pub enum ChannelError {
    #[error("invalid {field}: {message}")]
    Domain { field: &'static str, message: String },
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
}

fn domain(field: &'static str, message: impl Into<String>) -> ChannelError {
    ChannelError::Domain { field, message: message.into() }
}

// ---------------------------------------------------------------------------
// Parameter types
// ---------------------------------------------------------------------------

/// Absorption and scattering coefficients defining the attenuation
/// exponent at a given wavelength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaterOptics {
    /// Absorption coefficient a(λ), 1/m.
    pub absorption: f64,
    /// Scattering coefficient b(λ), 1/m.
    pub scattering: f64,
    /// Wavelength in nm (metadata; the coefficients already embed it).
    pub wavelength_nm: f64,
}

impl WaterOptics {
    pub fn new(absorption: f64, scattering: f64, wavelength_nm: f64) -> Result<Self, ChannelError> {
        if !(absorption >= 0.0) || !absorption.is_finite() {
            return Err(domain("water.absorption_per_m", "must be finite and >= 0"));
        }
        if !(scattering >= 0.0) || !scattering.is_finite() {
            return Err(domain("water.scattering_per_m", "must be finite and >= 0"));
        }
        if absorption == 0.0 && scattering == 0.0 {
            return Err(domain("water.absorption_per_m", "absorption and scattering cannot both be zero"));
        }
        if !(wavelength_nm > 0.0) {
            return Err(domain("water.wavelength_nm", "must be positive"));
        }
        Ok(Self { absorption, scattering, wavelength_nm })
    }

    /// Total attenuation coefficient c(λ) = a(λ) + b(λ), 1/m.
    pub fn attenuation_coefficient(&self) -> f64 {
        self.absorption + self.scattering
    }
}

/// Beer–Lambert attenuation gain exp(−(a+b)·d) over a path of `distance` m.
pub fn attenuation_gain(water: &WaterOptics, distance: f64) -> f64 {
    (-water.attenuation_coefficient() * distance).exp()
}

/// Mixture exponential/generalized-gamma turbulence parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EggParams {
    /// Mixing weight α of the exponential component.
    pub mix_alpha: f64,
    /// Exponential decay parameter β.
    pub exp_beta: f64,
    /// Generalized-gamma shape a.
    pub gg_a: f64,
    /// Generalized-gamma scale b.
    pub gg_b: f64,
    /// Generalized-gamma exponent c.
    pub gg_c: f64,
}

impl EggParams {
    pub fn new(mix_alpha: f64, exp_beta: f64, gg_a: f64, gg_b: f64, gg_c: f64) -> Result<Self, ChannelError> {
        if !(0.0..=1.0).contains(&mix_alpha) {
            return Err(domain("turbulence.mix_alpha", "must lie in [0, 1]"));
        }
        let fields: [(&'static str, f64); 4] = [
            ("turbulence.exp_beta", exp_beta),
            ("turbulence.gg_a", gg_a),
            ("turbulence.gg_b", gg_b),
            ("turbulence.gg_c", gg_c),
        ];
        for (field, v) in fields {
            if !(v > 0.0) || !v.is_finite() {
                return Err(domain(field, "must be positive and finite"));
            }
        }
        Ok(Self { mix_alpha, exp_beta, gg_a, gg_b, gg_c })
    }

    /// Fading density α/β·e^{−x/β} + (1−α)·c x^{ac−1}/(b^{ac}Γ(a))·e^{−(x/b)^c}.
    pub fn pdf(&self, h_t: f64) -> f64 {
        if h_t <= 0.0 {
            return 0.0;
        }
        let exp_part = self.mix_alpha / self.exp_beta * (-h_t / self.exp_beta).exp();
        let ac = self.gg_a * self.gg_c;
        let ln_gg = (self.gg_c).ln() + (ac - 1.0) * h_t.ln() - ac * self.gg_b.ln()
            - libm::lgamma(self.gg_a)
            - (h_t / self.gg_b).powf(self.gg_c);
        exp_part + (1.0 - self.mix_alpha) * ln_gg.exp()
    }

    /// Closed-form mean αβ + (1−α)·b·Γ(a + 1/c)/Γ(a).
    pub fn mean(&self) -> f64 {
        self.mix_alpha * self.exp_beta
            + (1.0 - self.mix_alpha)
                * self.gg_b
                * (libm::lgamma(self.gg_a + 1.0 / self.gg_c) - libm::lgamma(self.gg_a)).exp()
    }
}

/// Receiver aperture / beam / jitter geometry with the derived coupling
/// constants of the Gaussian misalignment model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointingGeometry {
    /// Aperture radius r_a, m.
    pub aperture_radius: f64,
    /// Beam waist ω_b at the receiver plane, m.
    pub beam_waist: f64,
    /// Radial jitter standard deviation σ_s, m.
    pub jitter_sigma: f64,
    /// v = r_a √(π/2) / ω_b.
    pub v: f64,
    /// Maximum collected fraction A0 = erf²(v) at perfect alignment.
    pub a0: f64,
    /// Equivalent beam width ω_e, m.
    pub omega_e: f64,
    /// Power-law exponent μ_s² = (ω_e / 2σ_s)², clamped at the
    /// perfect-alignment limit.
    pub mu_s_sq: f64,
}

impl PointingGeometry {
    pub fn new(aperture_radius: f64, beam_waist: f64, jitter_sigma: f64) -> Result<Self, ChannelError> {
        if !(aperture_radius > 0.0) || !aperture_radius.is_finite() {
            return Err(domain("pointing.aperture_radius_m", "must be positive and finite"));
        }
        if !(beam_waist > 0.0) || !beam_waist.is_finite() {
            return Err(domain("pointing.beam_waist_m", "must be positive and finite"));
        }
        if !(jitter_sigma >= 0.0) || !jitter_sigma.is_finite() {
            return Err(domain("pointing.jitter_sigma_m", "must be finite and >= 0"));
        }
        let v = aperture_radius * (std::f64::consts::PI / 2.0).sqrt() / beam_waist;
        let erf_v = libm::erf(v);
        let a0 = erf_v * erf_v;
        let omega_e = beam_waist
            * ((std::f64::consts::PI).sqrt() * erf_v / (2.0 * v * (-v * v).exp())).sqrt();
        let mu_s_sq = if jitter_sigma == 0.0 {
            f64::INFINITY
        } else {
            let mu = omega_e / (2.0 * jitter_sigma);
            mu * mu
        };
        let mu_s_sq = mu_s_sq.min(POINTING_DEGENERATE_LIMIT);
        Ok(Self { aperture_radius, beam_waist, jitter_sigma, v, a0, omega_e, mu_s_sq })
    }

    /// True when jitter is so small that pointing loss is treated as the
    /// constant A0.
    pub fn is_degenerate(&self) -> bool {
        self.mu_s_sq >= POINTING_DEGENERATE_LIMIT
    }

    /// Pointing-loss density μ²/A0^{μ²}·h^{μ²−1} on (0, A0], zero outside.
    pub fn pdf(&self, h_p: f64) -> Result<f64, ChannelError> {
        if !(h_p > 0.0 && h_p <= self.a0) {
            return Err(domain("pointing loss", format!("density support is (0, {}]", self.a0)));
        }
        let m2 = self.mu_s_sq;
        Ok((m2.ln() - m2 * self.a0.ln() + (m2 - 1.0) * h_p.ln()).exp())
    }

    /// Mean collected fraction A0·μ²/(1+μ²).
    pub fn mean(&self) -> f64 {
        self.a0 * self.mu_s_sq / (1.0 + self.mu_s_sq)
    }
}

/// Full link budget: geometry, efficiencies, noise and the SNR threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkConfig {
    /// Submarine-to-sensor distance d, m.
    pub distance: f64,
    /// Forward optical transmit power P_t, W.
    pub tx_power: f64,
    /// Fraction ρ of received optical power routed to detection.
    pub split_rho: f64,
    /// Optical-to-electrical efficiency of the photovoltaic front end η_r.
    pub eff_pv: f64,
    /// Electrical-to-optical efficiency of the sensor transmitter η_t.
    pub eff_tx: f64,
    /// Receiver efficiency at the submarine η_s.
    pub eff_rx_sub: f64,
    /// Forward-link noise variance σ1² (carried for completeness; the
    /// return-link metrics do not use it).
    pub noise_var_fwd: f64,
    /// Return-link noise variance σ2².
    pub noise_var_ret: f64,
    /// SNR threshold γ_th, linear.
    pub snr_threshold: f64,
    pub water: WaterOptics,
    pub turbulence: EggParams,
    pub pointing: PointingGeometry,
}

impl LinkConfig {
    pub fn validate(&self) -> Result<(), ChannelError> {
        if !(self.distance >= 0.0) || !self.distance.is_finite() {
            return Err(domain("distance_m", "must be finite and >= 0"));
        }
        if !(self.tx_power >= 0.0) || !self.tx_power.is_finite() {
            return Err(domain("tx_power_dbw", "transmit power must be finite and >= 0"));
        }
        if !(0.0..=1.0).contains(&self.split_rho) {
            return Err(domain("split_rho", "must lie in [0, 1]"));
        }
        for (field, v) in [
            ("eff_pv", self.eff_pv),
            ("eff_tx", self.eff_tx),
            ("eff_rx_sub", self.eff_rx_sub),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(domain(
                    match field {
                        "eff_pv" => "eff_pv",
                        "eff_tx" => "eff_tx",
                        _ => "eff_rx_sub",
                    },
                    "efficiency must lie in (0, 1)",
                ));
            }
        }
        if !(self.noise_var_fwd > 0.0) {
            return Err(domain("noise_var_fwd", "must be positive"));
        }
        if !(self.noise_var_ret > 0.0) {
            return Err(domain("noise_var_ret", "must be positive"));
        }
        if !(self.snr_threshold > 0.0) || !self.snr_threshold.is_finite() {
            return Err(domain("gamma_th_db", "threshold must be positive and finite"));
        }
        Ok(())
    }

    /// Mean return-link SNR γ̄ = (1−ρ)·η_t·η_r·η_s·P_t / σ2², recomputed
    /// from the current fields.
    pub fn mean_return_snr(&self) -> f64 {
        (1.0 - self.split_rho) * self.eff_tx * self.eff_pv * self.eff_rx_sub * self.tx_power
            / self.noise_var_ret
    }

    /// Beer–Lambert gain over the configured distance.
    pub fn attenuation(&self) -> f64 {
        attenuation_gain(&self.water, self.distance)
    }
}

// ---------------------------------------------------------------------------
// Mellin term machinery
// ---------------------------------------------------------------------------

/// One Mellin–Barnes term together with the argument it is evaluated at.
#[derive(Debug, Clone)]
pub struct MellinTerm {
    pub integrand: MellinIntegrand,
    pub argument: f64,
}

/// Absolute error floor for sums of density/metric terms. Distribution
/// values, densities and metric integrals in this model are order-one
/// quantities compared at tolerances of 1e-5 and coarser, so a sum whose
/// absolute uncertainty sits under this floor is accepted even when its
/// own relative error misses the requested target.
const TERM_SUM_ABS_FLOOR: f64 = 1e-12;

/// Evaluate a sum of Mellin terms, skipping terms with zero prefactor.
/// The tolerance is applied to the summed absolute error against the
/// summed value, so a term that is negligible at the sum's scale cannot
/// fail the whole evaluation even when its own relative error is poor.
pub fn eval_terms(terms: &[MellinTerm], opts: &EvalOptions) -> Result<f64, ChannelError> {
    let mut sum = 0.0;
    let mut err = 0.0;
    for t in terms {
        if t.integrand.prefactor() == 0.0 {
            continue;
        }
        let e = crate::specfun::mellin_eval_best(&t.integrand, t.argument, opts)?;
        sum += e.value;
        err += e.error_estimate;
    }
    if err <= opts.relative_tolerance * sum.abs().max(f64::MIN_POSITIVE)
        || err <= TERM_SUM_ABS_FLOOR
    {
        Ok(sum)
    } else {
        Err(SpecFunError::NonConvergence {
            achieved: err / sum.abs().max(f64::MIN_POSITIVE),
            requested: opts.relative_tolerance,
        }
        .into())
    }
}

/// A density branch of the composite gain, written as the Γ-factor list of
/// its Mellin–Barnes form in the x^{e·t} orientation:
/// pdf contribution = prefactor / h · MB(h / scale).
#[derive(Debug, Clone)]
struct Block {
    factors: Vec<GammaFactor>,
    exponent: f64,
    scale: f64,
    prefactor: f64,
}

impl Block {
    fn pdf_term(&self, x: f64) -> Result<MellinTerm, ChannelError> {
        let integrand = MellinIntegrand::new(self.factors.clone(), self.exponent, self.prefactor)?;
        Ok(MellinTerm { integrand, argument: x / self.scale })
    }

    /// CDF term: the pdf factors times Γ(t)/Γ(1+t), scaled by 1/e from the
    /// inner ∫₀^x h^{et−1} dh = x^{et}/(e·t).
    fn cdf_term(&self, x: f64) -> Result<MellinTerm, ChannelError> {
        let mut factors = self.factors.clone();
        factors.push(GammaFactor::num(0.0, 1.0));
        factors.push(GammaFactor::den(1.0, 1.0));
        let integrand =
            MellinIntegrand::new(factors, self.exponent, self.prefactor / self.exponent)?;
        Ok(MellinTerm { integrand, argument: x / self.scale })
    }
}

// ---------------------------------------------------------------------------
// Channel model
// ---------------------------------------------------------------------------

/// Resolved constants and Mellin blocks of the composite channel.
#[derive(Debug, Clone)]
pub struct ChannelModel {
    pub a0: f64,
    pub mu_s_sq: f64,
    pub h_a: f64,
    pub turbulence: EggParams,
    single: Vec<Block>,
    double: Vec<Block>,
}

impl ChannelModel {
    pub fn new(cfg: &LinkConfig) -> Result<Self, ChannelError> {
        cfg.validate()?;
        let a0 = cfg.pointing.a0;
        let m2 = cfg.pointing.mu_s_sq;
        let h_a = cfg.attenuation();
        let t = cfg.turbulence;
        let (alpha, beta, a, b, c) = (t.mix_alpha, t.exp_beta, t.gg_a, t.gg_b, t.gg_c);
        let gamma_a = libm::lgamma(a).exp();

        // Single-hop branches.
        let exp_branch = Block {
            factors: vec![
                GammaFactor::num(1.0, -1.0),
                GammaFactor::num(m2, -1.0),
                GammaFactor::den(1.0 + m2, -1.0),
            ],
            exponent: 1.0,
            scale: a0 * h_a * beta,
            prefactor: alpha * m2,
        };
        let gg_branch = Block {
            factors: vec![
                GammaFactor::num(a, -1.0),
                GammaFactor::num(m2 / c, -1.0),
                GammaFactor::den(1.0 + m2 / c, -1.0),
            ],
            exponent: c,
            scale: a0 * h_a * b,
            prefactor: (1.0 - alpha) * m2 / gamma_a,
        };

        // Two-hop blocks: exp×exp, the exp×gg cross (twice by symmetry),
        // and gg×gg, from the Mellin product of two i.i.d. hops.
        let ee = Block {
            factors: vec![
                GammaFactor::num(1.0, -1.0),
                GammaFactor::num(1.0, -1.0),
                GammaFactor::num(m2, -1.0),
                GammaFactor::num(m2, -1.0),
                GammaFactor::den(1.0 + m2, -1.0),
                GammaFactor::den(1.0 + m2, -1.0),
            ],
            exponent: 1.0,
            scale: (a0 * h_a * beta) * (a0 * h_a * beta),
            prefactor: (alpha * m2) * (alpha * m2),
        };
        let eg = Block {
            factors: vec![
                GammaFactor::num(a, -1.0 / c),
                GammaFactor::num(m2 / c, -1.0 / c),
                GammaFactor::num(m2 / c, -1.0 / c),
                GammaFactor::num(1.0, -1.0),
                GammaFactor::den(1.0 + m2 / c, -1.0 / c),
                GammaFactor::den(1.0 + m2 / c, -1.0 / c),
            ],
            exponent: 1.0,
            scale: (a0 * h_a) * (a0 * h_a) * beta * b,
            prefactor: 2.0 * alpha * (1.0 - alpha) * m2 * m2 / (gamma_a * c * c),
        };
        let gg = Block {
            factors: vec![
                GammaFactor::num(a, -1.0),
                GammaFactor::num(a, -1.0),
                GammaFactor::num(m2 / c, -1.0),
                GammaFactor::num(m2 / c, -1.0),
                GammaFactor::den(1.0 + m2 / c, -1.0),
                GammaFactor::den(1.0 + m2 / c, -1.0),
            ],
            exponent: c,
            scale: (a0 * h_a * b) * (a0 * h_a * b),
            prefactor: (1.0 - alpha) * m2 / gamma_a * ((1.0 - alpha) * m2 / gamma_a) / c,
        };

        Ok(Self {
            a0,
            mu_s_sq: m2,
            h_a,
            turbulence: t,
            single: vec![exp_branch, gg_branch],
            double: vec![ee, eg, gg],
        })
    }

    // -- term builders -------------------------------------------------

    /// Mellin terms of the single-hop gain density at h (the 1/h pdf
    /// prefactor is applied by the caller through `pdf_from_terms`).
    pub fn h1_pdf_terms(&self, h: f64) -> Result<Vec<MellinTerm>, ChannelError> {
        self.single.iter().map(|b| b.pdf_term(h)).collect()
    }

    pub fn h1_cdf_terms(&self, h: f64) -> Result<Vec<MellinTerm>, ChannelError> {
        self.single.iter().map(|b| b.cdf_term(h)).collect()
    }

    pub fn h_pdf_terms(&self, h: f64) -> Result<Vec<MellinTerm>, ChannelError> {
        self.double.iter().map(|b| b.pdf_term(h)).collect()
    }

    pub fn h_cdf_terms(&self, h: f64) -> Result<Vec<MellinTerm>, ChannelError> {
        self.double.iter().map(|b| b.cdf_term(h)).collect()
    }

    /// The two-hop blocks as (factors, exponent, scale, prefactor) tuples;
    /// the metrics module builds its BER and capacity integrands on top.
    pub(crate) fn double_blocks(&self) -> Vec<(Vec<GammaFactor>, f64, f64, f64)> {
        self.double
            .iter()
            .map(|b| (b.factors.clone(), b.exponent, b.scale, b.prefactor))
            .collect()
    }

    // -- densities and distributions ------------------------------------

    /// Single-hop gain density.
    pub fn h1_pdf(&self, h: f64, opts: &EvalOptions) -> Result<f64, ChannelError> {
        if !(h > 0.0) {
            return Err(domain("h", "gain must be positive"));
        }
        Ok(eval_terms(&self.h1_pdf_terms(h)?, opts)? / h)
    }

    /// Single-hop gain distribution function.
    pub fn h1_cdf(&self, h: f64, opts: &EvalOptions) -> Result<f64, ChannelError> {
        if !(h > 0.0) {
            return Err(domain("h", "gain must be positive"));
        }
        Ok(eval_terms(&self.h1_cdf_terms(h)?, opts)?.clamp(0.0, 1.0))
    }

    /// End-to-end (two-hop) gain density.
    pub fn h_pdf(&self, h: f64, opts: &EvalOptions) -> Result<f64, ChannelError> {
        if !(h > 0.0) {
            return Err(domain("h", "gain must be positive"));
        }
        Ok(eval_terms(&self.h_pdf_terms(h)?, opts)? / h)
    }

    /// End-to-end gain distribution function.
    pub fn h_cdf(&self, h: f64, opts: &EvalOptions) -> Result<f64, ChannelError> {
        if !(h > 0.0) {
            return Err(domain("h", "gain must be positive"));
        }
        Ok(eval_terms(&self.h_cdf_terms(h)?, opts)?.clamp(0.0, 1.0))
    }

    /// Return-link SNR density at γ for the given mean SNR.
    pub fn snr_pdf(&self, gamma: f64, mean_snr: f64, opts: &EvalOptions) -> Result<f64, ChannelError> {
        if !(mean_snr > 0.0) {
            return Err(domain("mean_snr", "must be positive"));
        }
        Ok(self.h_pdf(gamma / mean_snr, opts)? / mean_snr)
    }

    /// Return-link SNR distribution function at γ.
    pub fn snr_cdf(&self, gamma: f64, mean_snr: f64, opts: &EvalOptions) -> Result<f64, ChannelError> {
        if !(mean_snr > 0.0) {
            return Err(domain("mean_snr", "must be positive"));
        }
        self.h_cdf(gamma / mean_snr, opts)
    }

    /// Mean single-hop gain E[h1] = A0·h_a·μ²/(1+μ²)·E[h_t].
    pub fn h1_mean(&self) -> f64 {
        self.a0 * self.h_a * self.mu_s_sq / (1.0 + self.mu_s_sq) * self.turbulence.mean()
    }

    /// s-th moment of a single hop E[h1^s], for s ≥ 0 with a + s/c > 0.
    pub fn h1_moment(&self, s: f64) -> Result<f64, ChannelError> {
        let t = &self.turbulence;
        if 1.0 + s <= 0.0 || t.gg_a + s / t.gg_c <= 0.0 {
            return Err(domain("s", "moment diverges: gamma argument not positive"));
        }
        let exp_part = t.mix_alpha * libm::lgamma(1.0 + s).exp() * t.exp_beta.powf(s);
        let gg_part = (1.0 - t.mix_alpha)
            * (libm::lgamma(t.gg_a + s / t.gg_c) - libm::lgamma(t.gg_a)).exp()
            * t.gg_b.powf(s);
        Ok((self.a0 * self.h_a).powf(s) * self.mu_s_sq / (self.mu_s_sq + s) * (exp_part + gg_part))
    }
}
