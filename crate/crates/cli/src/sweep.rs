//! Sweep specifications and their deterministic parallel execution.

use rayon::prelude::*;

use crate::config::{apply_water_type, parse_key_values, ConfigError, Scenario};
use crate::output::RunRecord;
use slipt_core::channel::PointingGeometry;
use slipt_core::db_to_linear;
use slipt_core::metrics::ModulationSpec;

/// Variable swept across rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    MeanSnrDb,
    DistanceM,
    TxPowerDb,
    JitterMultiple,
    SplitRho,
    WaterType,
    Modulation,
}

impl SweepVariable {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "mean_snr_db" => Some(Self::MeanSnrDb),
            "distance_m" => Some(Self::DistanceM),
            "tx_power_db" | "tx_power_dbw" => Some(Self::TxPowerDb),
            "jitter_multiple" => Some(Self::JitterMultiple),
            "split_rho" => Some(Self::SplitRho),
            "water_type" => Some(Self::WaterType),
            "modulation" => Some(Self::Modulation),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::MeanSnrDb => "mean_snr_db",
            Self::DistanceM => "distance_m",
            Self::TxPowerDb => "tx_power_db",
            Self::JitterMultiple => "jitter_multiple",
            Self::SplitRho => "split_rho",
            Self::WaterType => "water_type",
            Self::Modulation => "modulation",
        }
    }
}

/// One sweep point: numeric or labelled (modulation schemes).
#[derive(Debug, Clone)]
pub enum SweepPoint {
    Num(f64),
    Label(String),
}

impl SweepPoint {
    pub fn display(&self) -> String {
        match self {
            Self::Num(v) => {
                if (v.fract() == 0.0) && v.abs() < 1e15 {
                    format!("{}", *v as i64)
                } else {
                    format!("{v}")
                }
            }
            Self::Label(s) => s.clone(),
        }
    }
}

/// Parsed sweep specification: variable, points, base scenario.
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub points: Vec<SweepPoint>,
    pub base: Scenario,
}

/// Parse a sweep-spec file. Sweep-control keys are `variable`,
/// `start`/`stop`/`steps` or `values`, and `preset`; every other key
/// (optionally prefixed `fixed.`) is a configuration override applied to
/// the base scenario.
pub fn parse_sweep_spec(text: &str, origin: &str) -> Result<SweepSpec, ConfigError> {
    let kv = parse_key_values(text, origin)?;
    let mut variable: Option<SweepVariable> = None;
    let mut range: (Option<f64>, Option<f64>, Option<usize>) = (None, None, None);
    let mut values: Option<Vec<String>> = None;
    let mut preset: Option<String> = None;
    let mut overrides: Vec<(String, String, usize)> = Vec::new();

    for (key, value, line) in kv.pairs {
        let at = format!("{origin}:{line}");
        match key.as_str() {
            "variable" => {
                variable = Some(SweepVariable::parse(&value).ok_or_else(|| {
                    ConfigError::new(format!("{at}: unknown sweep variable '{value}'"))
                })?);
            }
            "start" | "stop" => {
                let v: f64 = value
                    .parse()
                    .map_err(|_| ConfigError::new(format!("{at}: '{value}' is not a number")))?;
                if key == "start" {
                    range.0 = Some(v);
                } else {
                    range.1 = Some(v);
                }
            }
            "steps" => {
                range.2 = Some(value.parse().map_err(|_| {
                    ConfigError::new(format!("{at}: '{value}' is not an integer"))
                })?);
            }
            "values" => {
                values = Some(value.split(',').map(|s| s.trim().to_string()).collect());
            }
            "preset" => preset = Some(value),
            _ => {
                let key = key.strip_prefix("fixed.").unwrap_or(&key).to_string();
                overrides.push((key, value, line));
            }
        }
    }

    let variable = variable
        .ok_or_else(|| ConfigError::new(format!("{origin}: missing 'variable' key")))?;

    let points: Vec<SweepPoint> = if let Some(vals) = values {
        if vals.is_empty() {
            return Err(ConfigError::new(format!("{origin}: 'values' must be nonempty")));
        }
        vals.into_iter()
            .map(|v| match v.parse::<f64>() {
                Ok(x) => SweepPoint::Num(x),
                Err(_) => SweepPoint::Label(v),
            })
            .collect()
    } else {
        let (Some(start), Some(stop), Some(steps)) = range else {
            return Err(ConfigError::new(format!(
                "{origin}: need either 'values' or all of 'start', 'stop', 'steps'"
            )));
        };
        if steps < 2 {
            return Err(ConfigError::new(format!("{origin}: steps must be at least 2")));
        }
        (0..steps)
            .map(|i| {
                SweepPoint::Num(start + (stop - start) * i as f64 / (steps - 1) as f64)
            })
            .collect()
    };

    let mut base = Scenario::defaults();
    if let Some(name) = &preset {
        let built = crate::config::build_scenario(Some(name), None, &[])?;
        base = built;
    }
    for (key, value, line) in &overrides {
        base.apply(key, value, &format!("{origin}:{line}"))?;
    }
    let base = base.finish(origin)?;
    validate_points(variable, &points, origin)?;
    Ok(SweepSpec { variable, points, base })
}

fn validate_points(
    variable: SweepVariable,
    points: &[SweepPoint],
    origin: &str,
) -> Result<(), ConfigError> {
    for p in points {
        match (variable, p) {
            (SweepVariable::Modulation, SweepPoint::Label(s)) => {
                ModulationSpec::parse(s)
                    .map_err(|e| ConfigError::new(format!("{origin}: {e}")))?;
            }
            (SweepVariable::Modulation, SweepPoint::Num(_)) => {
                return Err(ConfigError::new(format!(
                    "{origin}: modulation sweep points must be labels such as 16-psk"
                )));
            }
            (SweepVariable::WaterType, SweepPoint::Num(v)) => {
                if *v < 1.0 || *v > 6.0 || v.fract() != 0.0 {
                    return Err(ConfigError::new(format!(
                        "{origin}: water_type points must be integers 1..=6"
                    )));
                }
            }
            (SweepVariable::SplitRho, SweepPoint::Num(v)) => {
                if !(0.0..=1.0).contains(v) {
                    return Err(ConfigError::new(format!(
                        "{origin}: split_rho points must lie in [0, 1]"
                    )));
                }
            }
            (SweepVariable::DistanceM, SweepPoint::Num(v)) => {
                if *v < 0.0 {
                    return Err(ConfigError::new(format!(
                        "{origin}: distance_m points must be nonnegative"
                    )));
                }
            }
            (SweepVariable::JitterMultiple, SweepPoint::Num(v)) => {
                if *v < 0.0 {
                    return Err(ConfigError::new(format!(
                        "{origin}: jitter_multiple points must be nonnegative"
                    )));
                }
            }
            (_, SweepPoint::Num(_)) => {}
            (_, SweepPoint::Label(s)) => {
                return Err(ConfigError::new(format!(
                    "{origin}: '{s}' is not a number"
                )));
            }
        }
    }
    Ok(())
}

/// Produce the scenario for one sweep point.
pub fn scenario_at(spec: &SweepSpec, point: &SweepPoint) -> Result<Scenario, ConfigError> {
    let mut s = spec.base.clone();
    match (spec.variable, point) {
        (SweepVariable::MeanSnrDb, SweepPoint::Num(v)) => s.mean_snr = Some(db_to_linear(*v)),
        (SweepVariable::DistanceM, SweepPoint::Num(v)) => s.cfg.distance = *v,
        (SweepVariable::TxPowerDb, SweepPoint::Num(v)) => s.cfg.tx_power = db_to_linear(*v),
        (SweepVariable::SplitRho, SweepPoint::Num(v)) => s.cfg.split_rho = *v,
        (SweepVariable::JitterMultiple, SweepPoint::Num(v)) => {
            s.cfg.pointing = PointingGeometry::new(
                s.cfg.pointing.aperture_radius,
                s.cfg.pointing.beam_waist,
                v * s.cfg.pointing.aperture_radius,
            )
            .map_err(|e| ConfigError::new(e.to_string()))?;
        }
        (SweepVariable::WaterType, SweepPoint::Num(v)) => {
            apply_water_type(&mut s, *v as usize)?;
        }
        (SweepVariable::Modulation, SweepPoint::Label(l)) => {
            s.modulation =
                ModulationSpec::parse(l).map_err(|e| ConfigError::new(e.to_string()))?;
        }
        _ => unreachable!("points validated at parse time"),
    }
    s.finish("sweep point")
}

/// Run every sweep point through `work`, in parallel, and return records
/// in sweep order regardless of completion order.
pub fn run_sweep<F>(spec: &SweepSpec, work: F) -> Vec<RunRecord>
where
    F: Fn(&Scenario, &SweepPoint) -> RunRecord + Sync,
{
    let mut indexed: Vec<(usize, RunRecord)> = spec
        .points
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let record = match scenario_at(spec, p) {
                Ok(s) => work(&s, p),
                Err(e) => {
                    let mut r = RunRecord::new("-");
                    r.error = Some(e.to_string());
                    r
                }
            };
            (i, record)
        })
        .collect();
    indexed.sort_by_key(|(i, _)| *i);
    indexed
        .into_iter()
        .map(|(_, mut r)| {
            r.sweep_variable = spec.variable.name().to_string();
            r
        })
        .collect()
}
