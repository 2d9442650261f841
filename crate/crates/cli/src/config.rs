//! Configuration file parsing and the runtime scenario.
//!
//! The on-disk format is flat `key = value` text with dotted keys that
//! mirror the link-configuration fields; units are explicit in the key
//! names and converted to linear/SI exactly once at this boundary.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use slipt_core::channel::{EggParams, LinkConfig, PointingGeometry, WaterOptics};
use slipt_core::metrics::ModulationSpec;
use slipt_core::presets::{egg_type, load_preset, system_defaults, Preset};
use slipt_core::db_to_linear;

/// A configuration error with enough context to point at the offending
/// line or field.
#[derive(Debug)]
pub struct ConfigError {
    pub message: String,
}

impl ConfigError {
    pub fn new(message: impl Into<String>) -> Self {
        Self { message: message.into() }
    }
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl std::error::Error for ConfigError {}

/// Key/value pairs in file order, each with its source line number.
pub struct KeyValues {
    pub pairs: Vec<(String, String, usize)>,
}

/// Parse `key = value` lines; `#` starts a comment, blank lines are
/// ignored. Unknown keys are the caller's concern so that sweep specs can
/// extend the config namespace.
pub fn parse_key_values(text: &str, origin: &str) -> Result<KeyValues, ConfigError> {
    let mut pairs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError::new(format!(
                "{origin}:{}: expected 'key = value', got '{raw}'",
                idx + 1
            )));
        };
        pairs.push((key.trim().to_string(), value.trim().to_string(), idx + 1));
    }
    Ok(KeyValues { pairs })
}

/// Runtime scenario: the physical link plus run-level parameters that are
/// not part of the channel itself.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub cfg: LinkConfig,
    /// Mean return-link SNR override (linear); derived from the link
    /// budget when absent.
    pub mean_snr: Option<f64>,
    pub modulation: ModulationSpec,
}

impl Scenario {
    pub fn defaults() -> Self {
        Self { cfg: system_defaults(), mean_snr: None, modulation: ModulationSpec::ook() }
    }

    pub fn mean_snr(&self) -> f64 {
        self.mean_snr.unwrap_or_else(|| self.cfg.mean_return_snr())
    }

    /// Apply one dotted-key assignment. Unknown keys error with the field
    /// name; out-of-domain values surface the core validation message.
    pub fn apply(&mut self, key: &str, value: &str, at: &str) -> Result<(), ConfigError> {
        let num = || -> Result<f64, ConfigError> {
            value
                .parse::<f64>()
                .map_err(|_| ConfigError::new(format!("{at}: field '{key}': '{value}' is not a number")))
        };
        match key {
            "distance_m" => self.cfg.distance = num()?,
            "tx_power_dbw" => self.cfg.tx_power = db_to_linear(num()?),
            "split_rho" => self.cfg.split_rho = num()?,
            "eff_pv" => self.cfg.eff_pv = num()?,
            "eff_tx" => self.cfg.eff_tx = num()?,
            "eff_rx_sub" => self.cfg.eff_rx_sub = num()?,
            "noise_var_fwd" => self.cfg.noise_var_fwd = num()?,
            "noise_var_ret" => self.cfg.noise_var_ret = num()?,
            "gamma_th_db" => self.cfg.snr_threshold = db_to_linear(num()?),
            "mean_snr_db" => self.mean_snr = Some(db_to_linear(num()?)),
            "modulation" => {
                self.modulation = ModulationSpec::parse(value)
                    .map_err(|e| ConfigError::new(format!("{at}: field '{key}': {e}")))?;
            }
            "water.absorption_per_m" => self.cfg.water.absorption = num()?,
            "water.scattering_per_m" => self.cfg.water.scattering = num()?,
            "water.wavelength_nm" => self.cfg.water.wavelength_nm = num()?,
            "turbulence.mix_alpha" => self.cfg.turbulence.mix_alpha = num()?,
            "turbulence.exp_beta" => self.cfg.turbulence.exp_beta = num()?,
            "turbulence.gg_a" => self.cfg.turbulence.gg_a = num()?,
            "turbulence.gg_b" => self.cfg.turbulence.gg_b = num()?,
            "turbulence.gg_c" => self.cfg.turbulence.gg_c = num()?,
            "pointing.aperture_radius_m" | "pointing.beam_waist_m" | "pointing.jitter_sigma_m" => {
                let v = num()?;
                let p = &self.cfg.pointing;
                let (mut r, mut w, mut s) = (p.aperture_radius, p.beam_waist, p.jitter_sigma);
                match key {
                    "pointing.aperture_radius_m" => r = v,
                    "pointing.beam_waist_m" => w = v,
                    _ => s = v,
                }
                self.cfg.pointing = PointingGeometry::new(r, w, s)
                    .map_err(|e| ConfigError::new(format!("{at}: {e}")))?;
            }
            _ => {
                return Err(ConfigError::new(format!("{at}: unknown field '{key}'")));
            }
        }
        Ok(())
    }

    /// Final validation after all assignments; rebuilds the derived
    /// pointing constants and checks every numeric domain.
    pub fn finish(mut self, at: &str) -> Result<Scenario, ConfigError> {
        self.cfg.pointing = PointingGeometry::new(
            self.cfg.pointing.aperture_radius,
            self.cfg.pointing.beam_waist,
            self.cfg.pointing.jitter_sigma,
        )
        .map_err(|e| ConfigError::new(format!("{at}: {e}")))?;
        self.cfg.water = WaterOptics::new(
            self.cfg.water.absorption,
            self.cfg.water.scattering,
            self.cfg.water.wavelength_nm,
        )
        .map_err(|e| ConfigError::new(format!("{at}: {e}")))?;
        self.cfg.turbulence = EggParams::new(
            self.cfg.turbulence.mix_alpha,
            self.cfg.turbulence.exp_beta,
            self.cfg.turbulence.gg_a,
            self.cfg.turbulence.gg_b,
            self.cfg.turbulence.gg_c,
        )
        .map_err(|e| ConfigError::new(format!("{at}: {e}")))?;
        self.cfg
            .validate()
            .map_err(|e| ConfigError::new(format!("{at}: {e}")))?;
        if let Some(m) = self.mean_snr {
            if !(m > 0.0) || !m.is_finite() {
                return Err(ConfigError::new(format!("{at}: mean_snr_db out of domain")));
            }
        }
        Ok(self)
    }
}

/// Build a scenario from an optional preset name, optional config file
/// text, and command-line overrides (key, value) applied last.
pub fn build_scenario(
    preset: Option<&str>,
    config_text: Option<(&str, &str)>,
    overrides: &[(String, String)],
) -> Result<Scenario, ConfigError> {
    let mut scenario = Scenario::defaults();
    if let Some(name) = preset {
        match load_preset(name).map_err(|e| ConfigError::new(e.to_string()))? {
            Preset::System(cfg) => scenario.cfg = *cfg,
            Preset::Water(w) => scenario.cfg.water = w,
            Preset::Egg(e) => scenario.cfg.turbulence = e,
        }
    }
    if let Some((origin, text)) = config_text {
        let kv = parse_key_values(text, origin)?;
        for (key, value, line) in &kv.pairs {
            scenario.apply(key, value, &format!("{origin}:{line}"))?;
        }
    }
    for (key, value) in overrides {
        scenario.apply(key, value, "command line")?;
    }
    scenario.finish("configuration")
}

/// Set the turbulence to a numbered laboratory water condition.
pub fn apply_water_type(scenario: &mut Scenario, ty: usize) -> Result<(), ConfigError> {
    scenario.cfg.turbulence = egg_type(ty)
        .ok_or_else(|| ConfigError::new(format!("water type must be 1..=6, got {ty}")))?;
    Ok(())
}

/// Serialize a scenario's link configuration in the config-file format;
/// the output round-trips through [`build_scenario`].
pub fn export_config(cfg: &LinkConfig) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "distance_m = {}", cfg.distance);
    let _ = writeln!(out, "tx_power_dbw = {}", 10.0 * cfg.tx_power.log10());
    let _ = writeln!(out, "split_rho = {}", cfg.split_rho);
    let _ = writeln!(out, "eff_pv = {}", cfg.eff_pv);
    let _ = writeln!(out, "eff_tx = {}", cfg.eff_tx);
    let _ = writeln!(out, "eff_rx_sub = {}", cfg.eff_rx_sub);
    let _ = writeln!(out, "noise_var_fwd = {}", cfg.noise_var_fwd);
    let _ = writeln!(out, "noise_var_ret = {}", cfg.noise_var_ret);
    let _ = writeln!(out, "gamma_th_db = {}", 10.0 * cfg.snr_threshold.log10());
    let _ = writeln!(out, "water.absorption_per_m = {}", cfg.water.absorption);
    let _ = writeln!(out, "water.scattering_per_m = {}", cfg.water.scattering);
    let _ = writeln!(out, "water.wavelength_nm = {}", cfg.water.wavelength_nm);
    let _ = writeln!(out, "turbulence.mix_alpha = {}", cfg.turbulence.mix_alpha);
    let _ = writeln!(out, "turbulence.exp_beta = {}", cfg.turbulence.exp_beta);
    let _ = writeln!(out, "turbulence.gg_a = {}", cfg.turbulence.gg_a);
    let _ = writeln!(out, "turbulence.gg_b = {}", cfg.turbulence.gg_b);
    let _ = writeln!(out, "turbulence.gg_c = {}", cfg.turbulence.gg_c);
    let _ = writeln!(out, "pointing.aperture_radius_m = {}", cfg.pointing.aperture_radius);
    let _ = writeln!(out, "pointing.beam_waist_m = {}", cfg.pointing.beam_waist);
    let _ = writeln!(out, "pointing.jitter_sigma_m = {}", cfg.pointing.jitter_sigma);
    out
}

/// Stable map view used by record headers.
pub fn scenario_summary(s: &Scenario) -> BTreeMap<&'static str, String> {
    let mut m = BTreeMap::new();
    m.insert("distance_m", format!("{}", s.cfg.distance));
    m.insert("split_rho", format!("{}", s.cfg.split_rho));
    m.insert("mean_snr_db", match s.mean_snr {
        Some(v) => format!("{:.6}", 10.0 * v.log10()),
        None => format!("{:.6}", 10.0 * s.cfg.mean_return_snr().log10()),
    });
    m
}
