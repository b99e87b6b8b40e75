//! Lossless compression as a computable upper approximation of algorithmic
//! complexity.
//!
//! Compressed lengths are only comparable under one [`CompressorSpec`]; the
//! spec's `version_tag` travels with every number so that results from
//! different compressors are never mixed silently.

mod bits;
mod external;
pub mod lz78;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::systems::Evolution;

pub use lz78::{CodeWidth, DictionaryFull, Lz78Params};

/// Identifies how evolutions are turned into bytes before compression.
pub const SERIALIZATION_TAG: &str = "text01";

const BUILTIN_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CompressorKind {
    Builtin {
        params: Lz78Params,
    },
    /// Shell command reading raw bytes on stdin and writing the compressed
    /// stream on stdout.
    External {
        command: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CompressorSpec {
    pub kind: CompressorKind,
    pub version_tag: String,
}

impl Default for CompressorSpec {
    fn default() -> Self {
        CompressorSpec::builtin(Lz78Params::default()).expect("default parameters are valid")
    }
}

impl CompressorSpec {
    pub fn builtin(params: Lz78Params) -> Result<Self> {
        params.validate()?;
        let version_tag = format!(
            "lz78-v{BUILTIN_VERSION}/d{}/{}/{}+{SERIALIZATION_TAG}",
            params.dictionary_bits,
            match params.code_width {
                CodeWidth::Variable => "var",
                CodeWidth::Fixed => "fixed",
            },
            match params.on_full {
                DictionaryFull::Reset => "reset",
                DictionaryFull::Freeze => "freeze",
            }
        );
        Ok(CompressorSpec {
            kind: CompressorKind::Builtin { params },
            version_tag,
        })
    }

    pub fn external(command: impl Into<String>) -> Result<Self> {
        let command = command.into();
        if command.trim().is_empty() {
            return Err(Error::invalid("external compressor command is empty"));
        }
        let version_tag = format!("cmd:{command}+{SERIALIZATION_TAG}");
        Ok(CompressorSpec {
            kind: CompressorKind::External { command },
            version_tag,
        })
    }

    pub fn builtin_params(&self) -> Option<&Lz78Params> {
        match &self.kind {
            CompressorKind::Builtin { params } => Some(params),
            CompressorKind::External { .. } => None,
        }
    }

    /// Closed-form worst-case expansion; `None` for external commands, whose
    /// bound has to be measured with [`CompressorSpec::measured_overhead`].
    pub fn overhead_bound(&self, input_len: usize) -> Option<usize> {
        self.builtin_params().map(|_| lz78::overhead_bound(input_len))
    }

    /// Largest `output - input` seen over the probe inputs (0 if none expand).
    pub fn measured_overhead(&self, probes: &[&[u8]]) -> Result<usize> {
        probes.iter().try_fold(0usize, |acc, p| {
            let out = self.compressed_len(p)?;
            Ok(acc.max(out.saturating_sub(p.len())))
        })
    }

    pub fn encode(&self, data: &[u8]) -> Result<Vec<u8>> {
        match &self.kind {
            CompressorKind::Builtin { params } => lz78::encode(params, data),
            CompressorKind::External { command } => external::run_filter(command, data),
        }
    }

    pub fn decode(&self, stream: &[u8]) -> Result<Vec<u8>> {
        match &self.kind {
            CompressorKind::Builtin { params } => lz78::decode(params, stream),
            CompressorKind::External { .. } => Err(Error::Unsupported(
                "external compressors are measured, not decoded".into(),
            )),
        }
    }
}

impl fmt::Display for CompressorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.version_tag)
    }
}

/// Parses `builtin`, `builtin:dict=12,width=fixed,full=freeze` or `cmd:<command>`.
impl FromStr for CompressorSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Some(cmd) = s.strip_prefix("cmd:") {
            let cmd = cmd.trim();
            let cmd = cmd
                .strip_prefix('"')
                .and_then(|c| c.strip_suffix('"'))
                .unwrap_or(cmd);
            return CompressorSpec::external(cmd);
        }
        let rest = match s.strip_prefix("builtin") {
            Some(r) => r,
            None => return Err(Error::invalid(format!("unknown compressor `{s}`"))),
        };
        let mut params = Lz78Params::default();
        let opts = match rest {
            "" => "",
            r => r
                .strip_prefix(':')
                .ok_or_else(|| Error::invalid(format!("unknown compressor `{s}`")))?,
        };
        for opt in opts.split(',').filter(|o| !o.is_empty()) {
            let (key, value) = opt
                .split_once('=')
                .ok_or_else(|| Error::invalid(format!("compressor option `{opt}` needs key=value")))?;
            match (key, value) {
                ("dict", v) => {
                    params.dictionary_bits = v
                        .parse()
                        .map_err(|_| Error::invalid(format!("bad dictionary bits `{v}`")))?
                }
                ("width", "variable") => params.code_width = CodeWidth::Variable,
                ("width", "fixed") => params.code_width = CodeWidth::Fixed,
                ("full", "reset") => params.on_full = DictionaryFull::Reset,
                ("full", "freeze") => params.on_full = DictionaryFull::Freeze,
                _ => return Err(Error::invalid(format!("unknown compressor option `{opt}`"))),
            }
        }
        CompressorSpec::builtin(params)
    }
}

/// Anything that maps bytes to a compressed length.
///
/// [`CompressorSpec`] is the production implementation; tests inject mocks.
pub trait Compressor: Sync {
    fn tag(&self) -> String;

    fn compressed_len(&self, data: &[u8]) -> Result<usize>;
}

impl Compressor for CompressorSpec {
    fn tag(&self) -> String {
        self.version_tag.clone()
    }

    fn compressed_len(&self, data: &[u8]) -> Result<usize> {
        match &self.kind {
            CompressorKind::Builtin { params } => lz78::encoded_len(params, data),
            CompressorKind::External { command } => external::probed_len(command, data),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompressedLength {
    pub input_len: usize,
    pub output_len: usize,
    pub compressor: String,
}

impl CompressedLength {
    pub fn ratio(&self) -> f64 {
        self.output_len as f64 / self.input_len as f64
    }
}

pub fn compress_len<C: Compressor + ?Sized>(compressor: &C, data: &[u8]) -> Result<CompressedLength> {
    if data.is_empty() {
        return Err(Error::invalid(
            "cannot measure the compressed length of empty data",
        ));
    }
    Ok(CompressedLength {
        input_len: data.len(),
        output_len: compressor.compressed_len(data)?,
        compressor: compressor.tag(),
    })
}

/// Compressed length of the canonical text serialisation of `ev`.
pub fn approx_k<C: Compressor + ?Sized>(compressor: &C, ev: &Evolution) -> Result<CompressedLength> {
    compress_len(compressor, &ev.to_text())
}

pub fn decode(params: &Lz78Params, stream: &[u8]) -> Result<Vec<u8>> {
    lz78::decode(params, stream)
}

pub fn encode(params: &Lz78Params, data: &[u8]) -> Result<Vec<u8>> {
    lz78::encode(params, data)
}
