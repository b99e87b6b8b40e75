use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use progcoef::compress::CompressorSpec;
use progcoef::io::{self, ReportMeta};
use progcoef::measure::{self, default_runtimes, MeasureParams, Normalization};
use progcoef::systems::{
    configuration_at, Boundary, CommandBlackBox, Configuration, EnumerationScheme, InitialConfiguration,
    RuleSystem,
};
use progcoef::taxonomy::{self, DeltaPolicy, Label};
use progcoef::{Error, ErrorCategory, Result};

#[derive(Debug, Parser)]
#[command(
    name = "progcoef",
    version,
    about = "Programmability coefficient of discrete dynamical systems"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Measure the coefficient of one system.
    Measure(MeasureArgs),
    /// Measure and rank a set of elementary rules (all 256 by default).
    Sweep(SweepArgs),
    /// Label systems or raw coefficient values against a threshold δ.
    Classify(ClassifyArgs),
    /// Write payloads of a saved record, or a single evolution, to files.
    #[command(subcommand)]
    Export(ExportCommand),
}

#[derive(Debug, Args, Clone)]
struct ExperimentArgs {
    /// Cells per row (default 2·t + 1).
    #[arg(long)]
    width: Option<usize>,
    #[arg(long, default_value = "cyclic", value_parser = parse_from_str::<Boundary>)]
    boundary: Boundary,
    /// Number of enumerated inputs.
    #[arg(long, default_value_t = 8)]
    n: usize,
    /// Horizon; runtimes default to [t/4, t/2, 3t/4, t].
    #[arg(long, conflicts_with = "runtimes")]
    t: Option<usize>,
    /// Explicit comma-separated runtimes.
    #[arg(long, value_delimiter = ',')]
    runtimes: Option<Vec<usize>>,
    /// `builtin[:dict=N,width=variable|fixed,full=reset|freeze]` or `cmd:"<command>"`.
    #[arg(long, default_value = "builtin", value_parser = parse_from_str::<CompressorSpec>)]
    compressor: CompressorSpec,
    #[arg(long, default_value = "binary", value_parser = parse_from_str::<EnumerationScheme>)]
    scheme: EnumerationScheme,
    /// Runtime dividing the summed differences: the horizon or each point's own runtime.
    #[arg(long, default_value = "horizon", value_parser = parse_from_str::<Normalization>)]
    normalize: Normalization,
    /// Omit the generation timestamp so identical runs give identical files.
    #[arg(long)]
    no_timestamp: bool,
}

#[derive(Debug, Args)]
struct MeasureArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(0..=255), required_unless_present = "blackbox", conflicts_with = "blackbox")]
    rule: Option<u32>,
    /// Shell command reading "<j> <t>" on stdin and printing t rows of 0/1.
    #[arg(long)]
    blackbox: Option<String>,
    #[command(flatten)]
    exp: ExperimentArgs,
    /// Coefficient JSON destination (stdout when omitted).
    #[arg(long)]
    json: Option<PathBuf>,
    /// Variability curve CSV destination.
    #[arg(long)]
    curve: Option<PathBuf>,
    /// Compression profile CSV destination.
    #[arg(long)]
    profile: Option<PathBuf>,
    /// Experiment record destination (`.pexp.json`).
    #[arg(long)]
    record: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Rules as a list and/or ranges, e.g. `0,4,30,110` or `0-255`.
    #[arg(long, default_value = "0-255", value_parser = parse_rules)]
    rules: RuleList,
    #[command(flatten)]
    exp: ExperimentArgs,
    /// Threshold for labels: a number or `cohort-median`. No labels when omitted.
    #[arg(long, value_parser = parse_from_str::<DeltaPolicy>)]
    delta: Option<DeltaPolicy>,
    /// Ranking CSV destination (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Ranking JSON destination.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    /// Classify a raw coefficient value instead of measuring.
    #[arg(long, allow_negative_numbers = true, conflicts_with_all = ["rules", "blackbox"])]
    value: Option<f64>,
    #[arg(long, value_parser = parse_rules)]
    rules: Option<RuleList>,
    #[arg(long, conflicts_with = "rules")]
    blackbox: Option<String>,
    /// A number or `cohort-median`.
    #[arg(long, value_parser = parse_from_str::<DeltaPolicy>)]
    delta: DeltaPolicy,
    /// Boundary band for `--value` (cohorts use 1% of their maximum).
    #[arg(long, default_value_t = 0.0)]
    band: f64,
    #[command(flatten)]
    exp: Option<ExperimentArgs>,
    /// CSV destination (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum ExportCommand {
    /// Verify a record and write its payloads into a directory.
    Record {
        #[arg(long)]
        record: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Write one evolution in the canonical text format.
    Evolution {
        #[arg(long, value_parser = clap::value_parser!(u32).range(0..=255))]
        rule: u32,
        #[arg(long)]
        t: usize,
        /// Cells per row (default 2·t + 1).
        #[arg(long)]
        width: Option<usize>,
        #[arg(long, default_value = "cyclic", value_parser = parse_from_str::<Boundary>)]
        boundary: Boundary,
        /// Enumeration index of the initial configuration; a single centred 1 when omitted.
        #[arg(long)]
        input_index: Option<u64>,
        #[arg(long, default_value = "binary", value_parser = parse_from_str::<EnumerationScheme>)]
        scheme: EnumerationScheme,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
struct RuleList(Vec<u32>);

fn parse_from_str<T: std::str::FromStr<Err = Error>>(s: &str) -> std::result::Result<T, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_rules(s: &str) -> std::result::Result<RuleList, String> {
    let mut rules = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (lo, hi) = match part.split_once('-') {
            Some((a, b)) => (a, b),
            None => (part, part),
        };
        let parse = |x: &str| -> std::result::Result<u32, String> {
            let v: u32 = x
                .trim()
                .parse()
                .map_err(|_| format!("`{x}` is not a rule number"))?;
            if v > 255 {
                return Err(format!("rule {v} is outside 0..=255"));
            }
            Ok(v)
        };
        let (lo, hi) = (parse(lo)?, parse(hi)?);
        if lo > hi {
            return Err(format!("empty rule range `{part}`"));
        }
        rules.extend(lo..=hi);
    }
    rules.sort_unstable();
    rules.dedup();
    if rules.is_empty() {
        return Err("no rules given".into());
    }
    Ok(RuleList(rules))
}

/// Fully resolved configuration, embedded in every output.
#[derive(Debug, Serialize)]
struct RunConfig {
    subcommand: &'static str,
    rules: Option<Vec<u32>>,
    blackbox: Option<String>,
    width: usize,
    boundary: Boundary,
    n: usize,
    runtimes: Vec<usize>,
    scheme: EnumerationScheme,
    normalization: Normalization,
    compressor: String,
    delta: Option<String>,
    version: &'static str,
}

struct Resolved {
    params: MeasureParams,
    width: usize,
    boundary: Boundary,
    compressor: CompressorSpec,
    no_timestamp: bool,
}

impl ExperimentArgs {
    fn resolve(&self) -> Result<Resolved> {
        let runtimes = match (&self.runtimes, self.t) {
            (Some(r), _) => r.clone(),
            (None, Some(t)) => default_runtimes(t)?,
            (None, None) => return Err(Error::invalid("either --t or --runtimes is required")),
        };
        let params = MeasureParams::new(self.n, runtimes)?
            .with_scheme(self.scheme)
            .with_normalization(self.normalize);
        let width = self.width.unwrap_or(2 * params.horizon() + 1);
        Ok(Resolved {
            params,
            width,
            boundary: self.boundary,
            compressor: self.compressor.clone(),
            no_timestamp: self.no_timestamp,
        })
    }
}

impl Resolved {
    fn config(
        &self,
        subcommand: &'static str,
        rules: Option<Vec<u32>>,
        blackbox: Option<String>,
        delta: Option<String>,
    ) -> RunConfig {
        RunConfig {
            subcommand,
            rules,
            blackbox,
            width: self.width,
            boundary: self.boundary,
            n: self.params.n,
            runtimes: self.params.runtimes.clone(),
            scheme: self.params.scheme,
            normalization: self.params.normalization,
            compressor: self.compressor.version_tag.clone(),
            delta,
            version: env!("CARGO_PKG_VERSION"),
        }
    }

    fn meta(&self, config: &RunConfig) -> Result<ReportMeta> {
        Ok(ReportMeta {
            config: serde_json::to_value(config)?,
            compressor_tag: self.compressor.version_tag.clone(),
            generated_at: timestamp(self.no_timestamp),
        })
    }

    fn system(&self, rule: Option<u32>, blackbox: Option<&str>) -> Result<RuleSystem> {
        match (rule, blackbox) {
            (Some(r), _) => RuleSystem::elementary(r, self.width, self.boundary),
            (None, Some(cmd)) => RuleSystem::black_box(Arc::new(CommandBlackBox::new(cmd)), self.width),
            (None, None) => Err(Error::invalid("one of --rule or --blackbox is required")),
        }
    }
}

fn timestamp(suppressed: bool) -> Option<String> {
    (!suppressed).then(|| chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true))
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| with_path(e, p))?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn with_path(e: std::io::Error, path: &Path) -> Error {
    Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

fn json_text(v: &Value) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

pub fn exit_code(e: &Error) -> u8 {
    match e.category() {
        ErrorCategory::Argument => 2,
        ErrorCategory::Simulation => 3,
        ErrorCategory::Compressor => 4,
        ErrorCategory::Io => 5,
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Measure(args) => cmd_measure(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Classify(args) => cmd_classify(args),
        Command::Export(cmd) => cmd_export(cmd),
    }
}

fn cmd_measure(args: MeasureArgs) -> Result<()> {
    let res = args.exp.resolve()?;
    let system = res.system(args.rule, args.blackbox.as_deref())?;
    let config = res.config("measure", args.rule.map(|r| vec![r]), args.blackbox.clone(), None);
    let meta = res.meta(&config)?;

    let m = measure::measure(&system, &res.params, &res.compressor)?;

    if let Some(p) = &args.profile {
        emit(Some(p), &io::profile_csv(&m.profile, Some(&meta))?)?;
    }
    if let Some(p) = &args.curve {
        emit(Some(p), &io::curve_csv(&m.curve, Some(&meta))?)?;
    }
    if let Some(p) = &args.record {
        let record_config = serde_json::to_value(&config)?;
        let record =
            io::ExperimentRecord::from_measurement(&system, &res.params, &res.compressor, &m, record_config)?;
        let path = io::save_experiment(&record, p)?;
        eprintln!("record written to {}", path.display());
    }
    emit(
        args.json.as_deref(),
        &json_text(&io::coefficient_json(&m.coefficient, Some(&meta)))?,
    )
}

fn run_cohort(rules: &[u32], res: &Resolved, jobs: Option<usize>) -> Result<Vec<measure::Coefficient>> {
    let work = || {
        rules
            .par_iter()
            .map(|&r| {
                let system = RuleSystem::elementary(r, res.width, res.boundary)?;
                measure::coefficient(&system, &res.params, &res.compressor)
            })
            .collect::<Result<Vec<_>>>()
    };
    match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::invalid(e.to_string()))?
            .install(work),
        None => work(),
    }
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    let res = args.exp.resolve()?;
    let config = res.config(
        "sweep",
        Some(args.rules.0.clone()),
        None,
        args.delta.map(|d| d.to_string()),
    );
    let meta = res.meta(&config)?;

    let cohort = run_cohort(&args.rules.0, &res, args.jobs)?;
    let ranked = taxonomy::rank_cohort(&cohort)?;
    let labelled = args
        .delta
        .map(|policy| taxonomy::classify_cohort(&ranked, policy))
        .transpose()?;
    let labels = labelled.as_ref().map(|(_, l)| l.as_slice());

    if let Some(p) = &args.json {
        let doc = io::ranking_json(&ranked, labels, labelled.as_ref().map(|l| l.0), Some(&meta));
        emit(Some(p), &json_text(&doc)?)?;
    }
    emit(
        args.out.as_deref(),
        &io::ranking_csv(&ranked, labels, Some(&meta))?,
    )
}

fn cmd_classify(args: ClassifyArgs) -> Result<()> {
    if let Some(value) = args.value {
        let delta = match args.delta {
            DeltaPolicy::Fixed(d) => d,
            DeltaPolicy::CohortMedian => {
                return Err(Error::invalid(
                    "`cohort-median` needs measured systems, not --value",
                ))
            }
        };
        let label = taxonomy::label_for(value, delta, args.band)?;
        let doc = serde_json::json!({
            "value": value,
            "delta": delta,
            "band": args.band,
            "label": label.to_string(),
            "computer": label == Label::Computer,
            "config": {
                "subcommand": "classify",
                "delta": args.delta.to_string(),
                "band": args.band,
                "version": env!("CARGO_PKG_VERSION"),
            },
        });
        return emit(args.out.as_deref(), &json_text(&doc)?);
    }

    let exp = args
        .exp
        .as_ref()
        .ok_or_else(|| Error::invalid("classifying systems needs --t or --runtimes"))?;
    let res = exp.resolve()?;
    let delta_text = Some(args.delta.to_string());
    let cohort = match (&args.rules, &args.blackbox) {
        (Some(rules), _) => run_cohort(&rules.0, &res, None)?,
        (None, Some(cmd)) => {
            let system = res.system(None, Some(cmd))?;
            vec![measure::coefficient(&system, &res.params, &res.compressor)?]
        }
        (None, None) => {
            return Err(Error::invalid(
                "one of --value, --rules or --blackbox is required",
            ))
        }
    };
    let config = res.config(
        "classify",
        args.rules.as_ref().map(|r| r.0.clone()),
        args.blackbox.clone(),
        delta_text,
    );
    let meta = res.meta(&config)?;
    let ranked = taxonomy::rank_cohort(&cohort)?;
    let (delta, labels) = taxonomy::classify_cohort(&ranked, args.delta)?;
    if let Some(p) = &args.json {
        let doc = io::ranking_json(&ranked, Some(&labels), Some(delta), Some(&meta));
        emit(Some(p), &json_text(&doc)?)?;
    }
    emit(
        args.out.as_deref(),
        &io::ranking_csv(&ranked, Some(&labels), Some(&meta))?,
    )
}

fn cmd_export(cmd: ExportCommand) -> Result<()> {
    match cmd {
        ExportCommand::Record { record, out_dir } => {
            let loaded = io::load_experiment(&record)?;
            for note in &loaded.migrations {
                eprintln!("note: {note}");
            }
            fs::create_dir_all(&out_dir).map_err(|e| with_path(e, &out_dir))?;
            let p = &loaded.record.payloads;
            for (name, body) in [
                ("profile.csv", &p.profile_csv),
                ("curve.csv", &p.curve_csv),
                ("coefficient.json", &p.coefficient_json),
            ] {
                let path = out_dir.join(name);
                fs::write(&path, body).map_err(|e| with_path(e, &path))?;
                println!("{}", path.display());
            }
            Ok(())
        }
        ExportCommand::Evolution {
            rule,
            t,
            width,
            boundary,
            input_index,
            scheme,
            out,
        } => {
            let width = width.unwrap_or(2 * t + 1);
            let system = RuleSystem::elementary(rule, width, boundary)?;
            let init = match input_index {
                Some(j) => InitialConfiguration::new(configuration_at(width, j, scheme)?, j),
                None => InitialConfiguration::new(Configuration::single_seed(width), 0),
            };
            let ev = system.evolve(&init, t)?;
            let text = String::from_utf8(ev.to_text()).expect("evolution text is ASCII");
            emit(out.as_deref(), &text)
        }
    }
}
