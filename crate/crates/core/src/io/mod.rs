//! Serialisation of evolutions, profiles, curves, rankings and experiment records.

mod export;
mod record;

pub use export::{
    coefficient_json, curve_csv, profile_csv, ranking_csv, ranking_json, strip_comments, ReportMeta,
    CURVE_HEADER, PROFILE_HEADER, RANKING_HEADER,
};
pub use record::{
    downgrade_to_v1, load_experiment, parse_experiment, record_path, save_experiment, ExperimentRecord,
    LoadedExperiment, Payloads, RECORD_EXTENSION, SCHEMA_VERSION,
};
