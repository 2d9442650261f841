//! Command-line front end: single evaluations, parameter sweeps,
//! analytic-versus-Monte-Carlo validation runs, and the preset catalog.

// Negated comparisons like !(x > 0.0) treat NaN as out of domain.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod output;
mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{evaluate_metric, header, render_report, run_validation, Metric, RunError};
use config::{build_scenario, export_config, ConfigError, Scenario};
use output::{render, Format, RunRecord};
use slipt_core::presets::{load_preset, Preset, EGG_TABLE, WATER_TABLE};

#[derive(Parser)]
#[command(
    name = "slipt",
    about = "Underwater optical SLIPT link analysis: closed-form channel statistics and metrics with a seeded Monte Carlo cross-check",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one metric for a single configuration.
    Eval(EvalArgs),
    /// Sweep a variable and write one record per point.
    Sweep(SweepArgs),
    /// Run the analytic-versus-simulation agreement suite.
    Validate(ValidateArgs),
    /// List or export the parameter catalog.
    Presets(PresetsArgs),
}

#[derive(Args, Clone)]
struct ScenarioArgs {
    /// Preset name, e.g. system/defaults, water/clear-ocean, egg/type-3.
    #[arg(long)]
    preset: Option<String>,
    /// Configuration file (key = value lines).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Mean return-link SNR in dB (overrides the link budget).
    #[arg(long = "mean-snr-db")]
    mean_snr_db: Option<f64>,
    /// Link distance in metres.
    #[arg(long = "distance-m", alias = "distance")]
    distance_m: Option<f64>,
    /// Transmit power in dB re 1 W.
    #[arg(long = "tx-power-dbw", alias = "tx-power-db")]
    tx_power_dbw: Option<f64>,
    /// Power-splitting factor routed to detection.
    #[arg(long)]
    rho: Option<f64>,
    /// Jitter standard deviation as a multiple of the aperture radius.
    #[arg(long = "jitter-multiple")]
    jitter_multiple: Option<f64>,
    /// Laboratory water condition 1..=6 (turbulence preset).
    #[arg(long = "water-type")]
    water_type: Option<usize>,
    /// SNR threshold in dB.
    #[arg(long = "gamma-th-db")]
    gamma_th_db: Option<f64>,
    /// Modulation scheme: ook, <M>-psk or <M>-qam.
    #[arg(long)]
    modulation: Option<String>,
}

impl ScenarioArgs {
    fn build(&self) -> Result<Scenario, ConfigError> {
        let text = match &self.config {
            Some(path) => Some(
                std::fs::read_to_string(path)
                    .map_err(|e| ConfigError::new(format!("{}: {e}", path.display())))?,
            ),
            None => None,
        };
        let mut overrides: Vec<(String, String)> = Vec::new();
        if let Some(v) = self.mean_snr_db {
            overrides.push(("mean_snr_db".into(), v.to_string()));
        }
        if let Some(v) = self.distance_m {
            overrides.push(("distance_m".into(), v.to_string()));
        }
        if let Some(v) = self.tx_power_dbw {
            overrides.push(("tx_power_dbw".into(), v.to_string()));
        }
        if let Some(v) = self.rho {
            overrides.push(("split_rho".into(), v.to_string()));
        }
        if let Some(v) = self.gamma_th_db {
            overrides.push(("gamma_th_db".into(), v.to_string()));
        }
        if let Some(m) = &self.modulation {
            overrides.push(("modulation".into(), m.clone()));
        }
        let origin = self
            .config
            .as_ref()
            .map(|p| p.display().to_string())
            .unwrap_or_else(|| "config".to_string());
        let mut scenario = build_scenario(
            self.preset.as_deref(),
            text.as_deref().map(|t| (origin.as_str(), t)),
            &overrides,
        )?;
        if let Some(ty) = self.water_type {
            config::apply_water_type(&mut scenario, ty)?;
        }
        if let Some(mult) = self.jitter_multiple {
            if !(mult >= 0.0) {
                return Err(ConfigError::new("jitter-multiple must be nonnegative"));
            }
            scenario.cfg.pointing = slipt_core::channel::PointingGeometry::new(
                scenario.cfg.pointing.aperture_radius,
                scenario.cfg.pointing.beam_waist,
                mult * scenario.cfg.pointing.aperture_radius,
            )
            .map_err(|e| ConfigError::new(e.to_string()))?;
        }
        scenario.finish("configuration")
    }
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Metric to evaluate.
    #[arg(long, value_enum)]
    metric: Metric,
    /// Moment order for --metric snr-moment.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    order: f64,
    /// Add a Monte Carlo comparison with this many samples.
    #[arg(long)]
    mc: Option<usize>,
    /// Random seed for the Monte Carlo comparison.
    #[arg(long, value_parser = parse_seed, default_value = "0xc0ffee")]
    seed: u64,
    /// Report wall time in the record.
    #[arg(long)]
    timing: bool,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Write the record here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Sweep specification file.
    #[arg(long)]
    spec: PathBuf,
    #[arg(long, value_enum)]
    metric: Metric,
    /// Moment order for --metric snr-moment.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    order: f64,
    /// Add a Monte Carlo comparison with this many samples per point.
    #[arg(long)]
    mc: Option<usize>,
    #[arg(long, value_parser = parse_seed, default_value = "0xc0ffee")]
    seed: u64,
    /// Report wall time per row (off by default so reruns are
    /// byte-identical).
    #[arg(long)]
    timing: bool,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Monte Carlo sample count (at least 10000).
    #[arg(long, default_value_t = 1_000_000)]
    samples: usize,
    #[arg(long, value_parser = parse_seed, default_value = "0xc0ffee")]
    seed: u64,
    /// Write the report here as well as to standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PresetsArgs {
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Export one preset in the config-file format.
    #[arg(long)]
    export: Option<String>,
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let normalized = s.trim();
    let parsed = if let Some(hex) =
        normalized.strip_prefix("0x").or_else(|| normalized.strip_prefix("0X"))
    {
        u64::from_str_radix(hex, 16)
    } else {
        normalized.parse()
    };
    parsed.map_err(|_| format!("'{s}' is not a valid seed"))
}

fn write_or_print(path: &Option<PathBuf>, content: &str) -> Result<(), RunError> {
    match path {
        Some(p) => {
            std::fs::write(p, content).map_err(|e| RunError::Io(format!("{}: {e}", p.display())))
        }
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    if let Ok(workers) = std::env::var("SLIPT_WORKERS") {
        if let Ok(n) = workers.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
        } else {
            eprintln!("warning: SLIPT_WORKERS='{workers}' is not a number; using default pool");
        }
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                RunError::Config(_) => ExitCode::from(2),
                RunError::Numeric(_) => ExitCode::from(3),
                RunError::ValidationFailed | RunError::Io(_) => ExitCode::from(1),
            }
        }
    }
}

fn run(cli: Cli) -> Result<(), RunError> {
    match cli.command {
        Command::Eval(args) => {
            let scenario = args.scenario.build().map_err(|e| RunError::Config(e.to_string()))?;
            let mc = args.mc.map(|n| (n, args.seed, 0));
            let record = evaluate_metric(&scenario, args.metric, args.order, mc, args.timing)?;
            let content = render(
                std::slice::from_ref(&record),
                args.format,
                &header("eval", args.seed, Some(&scenario)),
            );
            write_or_print(&args.out, &content)
        }
        Command::Sweep(args) => {
            let text = std::fs::read_to_string(&args.spec)
                .map_err(|e| RunError::Config(format!("{}: {e}", args.spec.display())))?;
            let spec = sweep::parse_sweep_spec(&text, &args.spec.display().to_string())
                .map_err(|e| RunError::Config(e.to_string()))?;
            let metric = args.metric;
            let records = sweep::run_sweep(&spec, |scenario, point| {
                let mc = args.mc.map(|n| (n, args.seed, 0));
                let mut r = match evaluate_metric(scenario, metric, args.order, mc, args.timing) {
                    Ok(r) => r,
                    Err(e) => {
                        let mut r = RunRecord::new(metric.name());
                        r.error = Some(e.to_string());
                        r
                    }
                };
                r.value = point.display();
                r
            });
            if records.iter().all(|r| r.error.is_some()) {
                return Err(RunError::Numeric("every sweep point failed".to_string()));
            }
            let head = format!(
                "{} metric={} variable={}",
                header("sweep", args.seed, None),
                metric.name(),
                spec.variable.name()
            );
            let content = render(&records, args.format, &head);
            write_or_print(&args.out, &content)
        }
        Command::Validate(args) => {
            if args.samples < 10_000 {
                return Err(RunError::Config(format!(
                    "validation needs at least 10000 samples, got {}",
                    args.samples
                )));
            }
            let scenario = args.scenario.build().map_err(|e| RunError::Config(e.to_string()))?;
            let lines = run_validation(&scenario, args.samples, args.seed)?;
            let (report, failed) = render_report(&lines, args.samples, args.seed);
            print!("{report}");
            if let Some(p) = &args.out {
                std::fs::write(p, &report)
                    .map_err(|e| RunError::Io(format!("{}: {e}", p.display())))?;
            }
            if failed {
                Err(RunError::ValidationFailed)
            } else {
                Ok(())
            }
        }
        Command::Presets(args) => {
            if let Some(name) = &args.export {
                let preset = load_preset(name).map_err(|e| RunError::Config(e.to_string()))?;
                let mut cfg = slipt_core::presets::system_defaults();
                match preset {
                    Preset::System(system) => cfg = *system,
                    Preset::Water(w) => cfg.water = w,
                    Preset::Egg(e) => cfg.turbulence = e,
                }
                print!("{}", export_config(&cfg));
                return Ok(());
            }
            print!("{}", render_presets(args.format));
            Ok(())
        }
    }
}

fn render_presets(format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Jsonl => {
            for (name, a, b) in WATER_TABLE {
                out.push_str(&format!(
                    "{{\"preset\":\"water/{name}\",\"absorption_per_m\":{a},\"scattering_per_m\":{b}}}\n"
                ));
            }
            for (name, grad, bubbles, alpha, beta, a, b, c) in EGG_TABLE {
                out.push_str(&format!(
                    "{{\"preset\":\"egg/{name}\",\"gradient_c_per_cm\":{grad},\"bubbles_l_per_min\":{bubbles},\"mix_alpha\":{alpha},\"exp_beta\":{beta},\"gg_a\":{a},\"gg_b\":{b},\"gg_c\":{c}}}\n"
                ));
            }
            out.push_str("{\"preset\":\"system/defaults\"}\n");
        }
        _ => {
            out.push_str("Water optics (Jerlov classification at 450 nm):\n");
            for (name, a, b) in WATER_TABLE {
                out.push_str(&format!("  water/{name:<22} a={a:.3} b={b:.3} (1/m)\n"));
            }
            out.push_str("Turbulence fits (laboratory thermal-gradient / bubble conditions):\n");
            for (name, grad, bubbles, alpha, beta, a, b, c) in EGG_TABLE {
                out.push_str(&format!(
                    "  egg/{name:<23} gradient={grad} C/cm bubbles={bubbles} L/min alpha={alpha} beta={beta} a={a} b={b} c={c}\n"
                ));
            }
            out.push_str(
                "System:\n  system/defaults           30 m clear-ocean link, 5 cm aperture, rho=0.8 (presets --export system/defaults)\n",
            );
        }
    }
    out
}
