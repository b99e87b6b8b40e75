use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Result;
use crate::measure::{Coefficient, CompressionProfile, VariabilityCurve};
use crate::systems::SystemId;
use crate::taxonomy::{Classification, RankedEntry};

pub const PROFILE_HEADER: [&str; 8] = [
    "rule",
    "width",
    "boundary",
    "compressor",
    "input_index",
    "runtime",
    "serialized_len",
    "compressed_len",
];
pub const CURVE_HEADER: [&str; 2] = ["runtime", "f"];
pub const RANKING_HEADER: [&str; 5] = ["rank", "rule", "value", "normalized_value", "label"];

/// Provenance written ahead of every exported table or document.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportMeta {
    pub config: Value,
    pub compressor_tag: String,
    /// The only field that varies between identical runs.
    pub generated_at: Option<String>,
}

impl ReportMeta {
    fn comment_lines(&self) -> String {
        let mut s = format!(
            "# config: {}\n# compressor: {}\n",
            self.config, self.compressor_tag
        );
        if let Some(ts) = &self.generated_at {
            s.push_str(&format!("# generated: {ts}\n"));
        }
        s
    }

    fn attach(&self, doc: &mut Value) {
        if let Value::Object(map) = doc {
            map.insert("config".into(), self.config.clone());
            if let Some(ts) = &self.generated_at {
                map.insert("generated_at".into(), Value::String(ts.clone()));
            }
        }
    }
}

fn system_columns(id: &SystemId) -> (String, String, String) {
    match id {
        SystemId::Eca {
            rule,
            width,
            boundary,
        } => (rule.to_string(), width.to_string(), boundary.to_string()),
        SystemId::BlackBox { label, width } => {
            (format!("blackbox:{label}"), width.to_string(), String::new())
        }
    }
}

fn table<I, R>(meta: Option<&ReportMeta>, header: &[&str], rows: I) -> Result<String>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(row).map_err(csv_err)?;
    }
    let body = w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?;
    let mut out = meta.map(ReportMeta::comment_lines).unwrap_or_default();
    out.push_str(&String::from_utf8(body).expect("csv output is UTF-8"));
    Ok(out)
}

fn csv_err(e: csv::Error) -> std::io::Error {
    std::io::Error::other(e.to_string())
}

/// Strips `#` comment lines so exported tables can be fed to CSV readers.
pub fn strip_comments(text: &str) -> String {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect()
}

pub fn profile_csv(profile: &CompressionProfile, meta: Option<&ReportMeta>) -> Result<String> {
    let (rule, width, boundary) = system_columns(&profile.system);
    let rows = profile.runtimes.iter().enumerate().flat_map(|(k, &t)| {
        let (rule, width, boundary) = (rule.clone(), width.clone(), boundary.clone());
        (0..profile.n).map(move |j| {
            vec![
                rule.clone(),
                width.clone(),
                boundary.clone(),
                profile.compressor.clone(),
                j.to_string(),
                t.to_string(),
                profile.serialized_lens[k][j].to_string(),
                profile.lengths[k][j].to_string(),
            ]
        })
    });
    table(meta, &PROFILE_HEADER, rows)
}

pub fn curve_csv(curve: &VariabilityCurve, meta: Option<&ReportMeta>) -> Result<String> {
    let rows = curve
        .points
        .iter()
        .map(|(t, f)| vec![t.to_string(), f.to_string()]);
    table(meta, &CURVE_HEADER, rows)
}

pub fn coefficient_json(c: &Coefficient, meta: Option<&ReportMeta>) -> Value {
    let mut doc = json!({
        "system": c.system,
        "n": c.n,
        "t": c.t,
        "runtimes": c.conditions.params.runtimes,
        "scheme": c.conditions.params.scheme,
        "normalization": c.conditions.params.normalization,
        "slope": c.value,
        "intercept": c.intercept,
        "r_squared": c.r_squared,
        "normalized_value": c.normalized_value,
        "compressor_tag": c.conditions.compressor,
    });
    if let Some(m) = meta {
        m.attach(&mut doc);
    }
    doc
}

fn rule_column(id: &SystemId) -> String {
    system_columns(id).0
}

/// Ranking table; `labels` must come from the same ranking when present.
pub fn ranking_csv(
    ranked: &[RankedEntry],
    labels: Option<&[Classification]>,
    meta: Option<&ReportMeta>,
) -> Result<String> {
    let rows = ranked.iter().enumerate().map(|(i, r)| {
        vec![
            r.rank.to_string(),
            rule_column(&r.coefficient.system),
            r.coefficient.value.to_string(),
            r.normalized_value.to_string(),
            labels.map(|l| l[i].label.to_string()).unwrap_or_default(),
        ]
    });
    table(meta, &RANKING_HEADER, rows)
}

pub fn ranking_json(
    ranked: &[RankedEntry],
    labels: Option<&[Classification]>,
    delta: Option<f64>,
    meta: Option<&ReportMeta>,
) -> Value {
    let rows: Vec<Value> = ranked
        .iter()
        .enumerate()
        .map(|(i, r)| {
            json!({
                "rank": r.rank,
                "rule": rule_column(&r.coefficient.system),
                "value": r.coefficient.value,
                "normalized_value": r.normalized_value,
                "label": labels.map(|l| l[i].label.to_string()),
                "r_squared": r.coefficient.r_squared,
            })
        })
        .collect();
    let mut doc = json!({
        "delta": delta,
        "compressor_tag": ranked.first().map(|r| r.coefficient.conditions.compressor.clone()),
        "ranking": rows,
    });
    if let Some(m) = meta {
        m.attach(&mut doc);
    }
    doc
}
