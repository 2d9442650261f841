//! Run records and their CSV / JSON-lines / plain-text encodings.
//!
//! Formatting is fixed-width scientific notation throughout so reruns with
//! the same configuration and seed are byte-identical; wall time is only
//! filled in when explicitly requested.

/// One evaluated point.
#[derive(Debug, Clone)]
pub struct RunRecord {
    /// Swept variable name ("-" for single evaluations).
    pub sweep_variable: String,
    /// Value of the swept variable (numeric or label).
    pub value: String,
    pub metric: String,
    pub analytic: Option<f64>,
    pub mc_mean: Option<f64>,
    pub mc_stderr: Option<f64>,
    /// Seconds; only populated under --timing.
    pub runtime_s: Option<f64>,
    pub error: Option<String>,
}

impl RunRecord {
    pub fn new(metric: &str) -> Self {
        Self {
            sweep_variable: "-".to_string(),
            value: "-".to_string(),
            metric: metric.to_string(),
            analytic: None,
            mc_mean: None,
            mc_stderr: None,
            runtime_s: None,
            error: None,
        }
    }
}

pub const CSV_HEADER: &str = "sweep_variable,value,metric,analytic,mc_mean,mc_stderr,runtime_s,error";

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.12e}")).unwrap_or_default()
}

fn fmt_opt_short(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6e}")).unwrap_or_default()
}

pub fn to_csv_row(r: &RunRecord) -> String {
    format!(
        "{},{},{},{},{},{},{},{}",
        r.sweep_variable,
        r.value,
        r.metric,
        fmt_opt(r.analytic),
        fmt_opt_short(r.mc_mean),
        fmt_opt_short(r.mc_stderr),
        r.runtime_s.map(|t| format!("{t:.3}")).unwrap_or_default(),
        r.error.clone().unwrap_or_default()
    )
}

pub fn to_jsonl(r: &RunRecord) -> String {
    let mut fields = vec![
        format!("\"sweep_variable\":{}", json_str(&r.sweep_variable)),
        format!("\"value\":{}", json_str(&r.value)),
        format!("\"metric\":{}", json_str(&r.metric)),
    ];
    if let Some(a) = r.analytic {
        fields.push(format!("\"analytic\":{a:.12e}"));
    }
    if let Some(m) = r.mc_mean {
        fields.push(format!("\"mc_mean\":{m:.6e}"));
        fields.push(format!("\"mc_stderr\":{:.6e}", r.mc_stderr.unwrap_or(0.0)));
    }
    if let Some(t) = r.runtime_s {
        fields.push(format!("\"runtime_s\":{t:.3}"));
    }
    if let Some(e) = &r.error {
        fields.push(format!("\"error\":{}", json_str(e)));
    }
    format!("{{{}}}", fields.join(","))
}

pub fn to_text(r: &RunRecord) -> String {
    let mut s = format!("metric={}", r.metric);
    if r.sweep_variable != "-" {
        s.push_str(&format!(" {}={}", r.sweep_variable, r.value));
    }
    if let Some(a) = r.analytic {
        s.push_str(&format!(" analytic={a:.10e}"));
    }
    if let Some(m) = r.mc_mean {
        s.push_str(&format!(" mc_mean={m:.6e} mc_stderr={:.6e}", r.mc_stderr.unwrap_or(0.0)));
    }
    if let Some(t) = r.runtime_s {
        s.push_str(&format!(" runtime_s={t:.3}"));
    }
    if let Some(e) = &r.error {
        s.push_str(&format!(" error=\"{e}\""));
    }
    s
}

fn json_str(s: &str) -> String {
    let escaped: String = s
        .chars()
        .flat_map(|c| match c {
            '"' => "\\\"".chars().collect::<Vec<_>>(),
            '\\' => "\\\\".chars().collect(),
            '\n' => "\\n".chars().collect(),
            c => vec![c],
        })
        .collect();
    format!("\"{escaped}\"")
}

/// Output encoding selected by --format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Jsonl,
}

pub fn render(records: &[RunRecord], format: Format, header: &str) -> String {
    let mut out = String::new();
    out.push_str(header);
    out.push('\n');
    if format == Format::Csv {
        out.push_str(CSV_HEADER);
        out.push('\n');
    }
    for r in records {
        out.push_str(&match format {
            Format::Csv => to_csv_row(r),
            Format::Jsonl => to_jsonl(r),
            Format::Text => to_text(r),
        });
        out.push('\n');
    }
    out
}
