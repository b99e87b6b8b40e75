//! Self-verifying experiment records (`*.pexp.json`).
//!
//! A record is one JSON document. Its `content_hash` is the SHA-256 of the
//! compact, key-sorted JSON of every other field, so any change to inputs,
//! parameters or payloads is detected on load.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use super::export::{coefficient_json, curve_csv, profile_csv};
use crate::compress::CompressorSpec;
use crate::error::{Error, Result};
use crate::measure::{measure, MeasureParams, Measurement, Normalization};
use crate::systems::{CommandBlackBox, EnumerationScheme, RuleSystem, SystemId};

pub const SCHEMA_VERSION: u32 = 2;
pub const RECORD_EXTENSION: &str = ".pexp.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Payloads {
    pub profile_csv: String,
    pub curve_csv: String,
    pub coefficient_json: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentRecord {
    pub schema_version: u32,
    pub system: SystemId,
    pub scheme: EnumerationScheme,
    pub n: usize,
    pub runtimes: Vec<usize>,
    pub normalization: Normalization,
    pub compressor: CompressorSpec,
    /// Resolved run configuration of whatever produced the record.
    pub config: Value,
    pub payloads: Payloads,
    pub content_hash: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadedExperiment {
    pub record: ExperimentRecord,
    /// Human-readable notes for every schema migration applied on load.
    pub migrations: Vec<String>,
}

fn canonical_hash(doc: &Value) -> String {
    let mut doc = doc.clone();
    if let Value::Object(map) = &mut doc {
        map.remove("content_hash");
    }
    // serde_json::Map is ordered by key, so this string is canonical.
    let text = serde_json::to_string(&doc).expect("JSON values always serialize");
    hex::encode(Sha256::digest(text.as_bytes()))
}

impl ExperimentRecord {
    pub fn from_measurement(
        system: &RuleSystem,
        params: &MeasureParams,
        compressor: &CompressorSpec,
        measurement: &Measurement,
        config: Value,
    ) -> Result<Self> {
        let mut record = ExperimentRecord {
            schema_version: SCHEMA_VERSION,
            system: system.id(),
            scheme: params.scheme,
            n: params.n,
            runtimes: params.runtimes.clone(),
            normalization: params.normalization,
            compressor: compressor.clone(),
            config,
            payloads: Payloads {
                profile_csv: profile_csv(&measurement.profile, None)?,
                curve_csv: curve_csv(&measurement.curve, None)?,
                coefficient_json: serde_json::to_string(&coefficient_json(&measurement.coefficient, None))?,
            },
            content_hash: String::new(),
        };
        record.seal()?;
        Ok(record)
    }

    pub fn compute_hash(&self) -> Result<String> {
        Ok(canonical_hash(&serde_json::to_value(self)?))
    }

    /// Recomputes and stores the content hash.
    pub fn seal(&mut self) -> Result<()> {
        self.content_hash = self.compute_hash()?;
        Ok(())
    }

    pub fn params(&self) -> Result<MeasureParams> {
        Ok(MeasureParams::new(self.n, self.runtimes.clone())?
            .with_scheme(self.scheme)
            .with_normalization(self.normalization))
    }

    pub fn system(&self) -> Result<RuleSystem> {
        match &self.system {
            SystemId::Eca {
                rule,
                width,
                boundary,
            } => RuleSystem::elementary(u32::from(*rule), *width, *boundary),
            SystemId::BlackBox { label, width } => {
                RuleSystem::black_box(Arc::new(CommandBlackBox::new(label.clone())), *width)
            }
        }
    }

    /// Slope stored in the coefficient payload.
    pub fn recorded_slope(&self) -> Result<f64> {
        let doc: Value = serde_json::from_str(&self.payloads.coefficient_json)?;
        doc.get("slope")
            .and_then(Value::as_f64)
            .ok_or_else(|| Error::MalformedRecord("coefficient payload has no slope".into()))
    }

    /// Runs the recorded experiment again.
    pub fn rerun(&self) -> Result<Measurement> {
        measure(&self.system()?, &self.params()?, &self.compressor)
    }
}

pub fn record_path(path: &Path) -> PathBuf {
    if path.to_string_lossy().ends_with(RECORD_EXTENSION) {
        path.to_path_buf()
    } else {
        let mut s = path.as_os_str().to_owned();
        s.push(RECORD_EXTENSION);
        PathBuf::from(s)
    }
}

/// Writes the record (appending `.pexp.json` if missing) and returns the path.
pub fn save_experiment(record: &ExperimentRecord, path: &Path) -> Result<PathBuf> {
    let computed = record.compute_hash()?;
    if computed != record.content_hash {
        return Err(Error::CorruptedRecord {
            stored: record.content_hash.clone(),
            computed,
        });
    }
    let path = record_path(path);
    let mut text = serde_json::to_string_pretty(record)?;
    text.push('\n');
    let tmp = path.with_extension("json.tmp");
    fs::write(&tmp, text)?;
    fs::rename(&tmp, &path)?;
    Ok(path)
}

fn migrate_v1(doc: &mut Value, notes: &mut Vec<String>) {
    if let Value::Object(map) = doc {
        map.entry("normalization")
            .or_insert_with(|| Value::String("horizon".into()));
        map.insert("schema_version".into(), Value::from(2u32));
    }
    notes.push("migrated schema 1 → 2: added normalization = horizon".into());
}

pub fn load_experiment(path: &Path) -> Result<LoadedExperiment> {
    let text = fs::read_to_string(path)?;
    parse_experiment(&text)
}

pub fn parse_experiment(text: &str) -> Result<LoadedExperiment> {
    let mut doc: Value = serde_json::from_str(text)?;
    let version = doc
        .get("schema_version")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::MalformedRecord("missing schema_version".into()))?;
    let version = u32::try_from(version).unwrap_or(u32::MAX);
    if version == 0 || version > SCHEMA_VERSION {
        return Err(Error::SchemaVersion {
            found: version,
            supported: SCHEMA_VERSION,
        });
    }
    let stored = doc
        .get("content_hash")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::MalformedRecord("missing content_hash".into()))?
        .to_owned();
    let computed = canonical_hash(&doc);
    if stored != computed {
        return Err(Error::CorruptedRecord { stored, computed });
    }

    let mut migrations = Vec::new();
    if version == 1 {
        migrate_v1(&mut doc, &mut migrations);
    }
    let mut record: ExperimentRecord = serde_json::from_value(doc)?;
    if !migrations.is_empty() {
        record.seal()?;
    }
    Ok(LoadedExperiment { record, migrations })
}

/// Rewrites a current record in the schema-1 layout; used to build fixtures.
#[doc(hidden)]
pub fn downgrade_to_v1(record: &ExperimentRecord) -> Result<String> {
    let mut doc = serde_json::to_value(record)?;
    if let Value::Object(map) = &mut doc {
        map.remove("normalization");
        map.insert("schema_version".into(), Value::from(1u32));
    }
    let hash = canonical_hash(&doc);
    if let Value::Object(map) = &mut doc {
        map.insert("content_hash".into(), Value::String(hash));
    }
    Ok(serde_json::to_string_pretty(&doc)? + "\n")
}
