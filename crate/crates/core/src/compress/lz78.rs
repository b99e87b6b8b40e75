//! Incremental-dictionary (LZ78) codec with fully specified code widths.
//!
//! Stream layout:
//!
//! ```text
//! byte 0      mode: 0 = stored, 1 = lz78
//! LEB128      original length N
//! stored:     N raw bytes
//! lz78:       byte dictionary_bits, byte flags (bit 0 fixed width, bit 1 freeze),
//!             then MSB-first tokens, zero-padded to a byte boundary
//! ```
//!
//! The dictionary starts with the empty phrase at index 0. A token is a phrase
//! index followed by an 8-bit literal; the phrase plus literal becomes the next
//! entry. With variable width an index costs `ceil(log2(size))` bits where `size`
//! is the current entry count, with fixed width it costs `dictionary_bits`. When
//! an insertion finds the dictionary at its limit it either resets to the empty
//! phrase alone or freezes. If the input ends inside a phrase, a final index is
//! written without a literal.
//!
//! The encoder falls back to the stored mode whenever that is not larger, which
//! caps the output at `N + 1 + leb128_len(N)` bytes.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::bits::{BitReader, BitWriter};
use crate::error::{Error, Result};

const MODE_STORED: u8 = 0;
const MODE_LZ78: u8 = 1;
const FLAG_FIXED: u8 = 1;
const FLAG_FREEZE: u8 = 2;

pub const MIN_DICTIONARY_BITS: u8 = 1;
pub const MAX_DICTIONARY_BITS: u8 = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CodeWidth {
    #[default]
    Variable,
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DictionaryFull {
    #[default]
    Reset,
    Freeze,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Lz78Params {
    /// The dictionary holds at most `2^dictionary_bits` entries.
    pub dictionary_bits: u8,
    pub code_width: CodeWidth,
    pub on_full: DictionaryFull,
}

impl Default for Lz78Params {
    fn default() -> Self {
        Lz78Params {
            dictionary_bits: 16,
            code_width: CodeWidth::Variable,
            on_full: DictionaryFull::Reset,
        }
    }
}

impl Lz78Params {
    pub fn validate(&self) -> Result<()> {
        if !(MIN_DICTIONARY_BITS..=MAX_DICTIONARY_BITS).contains(&self.dictionary_bits) {
            return Err(Error::invalid(format!(
                "dictionary_bits {} outside {MIN_DICTIONARY_BITS}..={MAX_DICTIONARY_BITS}",
                self.dictionary_bits
            )));
        }
        Ok(())
    }

    fn limit(&self) -> u32 {
        1u32 << self.dictionary_bits
    }

    #[inline]
    fn index_width(&self, size: u32) -> u32 {
        match self.code_width {
            CodeWidth::Fixed => u32::from(self.dictionary_bits),
            CodeWidth::Variable => 32 - (size - 1).leading_zeros(),
        }
    }

    fn flags(&self) -> u8 {
        let mut f = 0;
        if self.code_width == CodeWidth::Fixed {
            f |= FLAG_FIXED;
        }
        if self.on_full == DictionaryFull::Freeze {
            f |= FLAG_FREEZE;
        }
        f
    }
}

pub(crate) fn leb128_len(mut n: u64) -> usize {
    let mut len = 1;
    while n >= 0x80 {
        n >>= 7;
        len += 1;
    }
    len
}

fn write_leb128(out: &mut Vec<u8>, mut n: u64) {
    while n >= 0x80 {
        out.push((n as u8 & 0x7f) | 0x80);
        n >>= 7;
    }
    out.push(n as u8);
}

fn read_leb128(data: &[u8]) -> Result<(u64, usize)> {
    let mut value = 0u64;
    for (i, &b) in data.iter().enumerate().take(10) {
        let chunk = u64::from(b & 0x7f);
        if i == 9 && chunk > 1 {
            return Err(Error::Decode("length field overflows 64 bits".into()));
        }
        value |= chunk << (7 * i);
        if b & 0x80 == 0 {
            return Ok((value, i + 1));
        }
    }
    Err(Error::Decode("unterminated length field".into()))
}

/// Worst-case expansion of [`encode`] for an input of `input_len` bytes.
pub fn overhead_bound(input_len: usize) -> usize {
    1 + leb128_len(input_len as u64)
}

fn stored(data: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(data.len() + overhead_bound(data.len()));
    out.push(MODE_STORED);
    write_leb128(&mut out, data.len() as u64);
    out.extend_from_slice(data);
    out
}

#[inline]
fn edge(node: u32, byte: u8) -> u64 {
    (u64::from(node) << 8) | u64::from(byte)
}

/// LZ78 token stream; `None` as soon as it would exceed `budget` bytes.
fn lz78_stream(params: &Lz78Params, data: &[u8], budget: usize) -> Option<Vec<u8>> {
    let mut header = vec![MODE_LZ78];
    write_leb128(&mut header, data.len() as u64);
    header.push(params.dictionary_bits);
    header.push(params.flags());
    let mut w = BitWriter::with_prefix(header);

    let limit = params.limit();
    let mut trie: HashMap<u64, u32> = HashMap::new();
    let mut size = 1u32;
    let mut node = 0u32;
    for &b in data {
        if let Some(&child) = trie.get(&edge(node, b)) {
            node = child;
            continue;
        }
        w.write(node, params.index_width(size));
        w.write(u32::from(b), 8);
        if size < limit {
            trie.insert(edge(node, b), size);
            size += 1;
        } else if params.on_full == DictionaryFull::Reset {
            trie.clear();
            size = 1;
        }
        node = 0;
        if w.bytes_so_far() > budget {
            return None;
        }
    }
    if node != 0 {
        w.write(node, params.index_width(size));
    }
    let out = w.finish();
    (out.len() <= budget).then_some(out)
}

pub fn encode(params: &Lz78Params, data: &[u8]) -> Result<Vec<u8>> {
    params.validate()?;
    let budget = 1 + leb128_len(data.len() as u64) + data.len();
    Ok(lz78_stream(params, data, budget).unwrap_or_else(|| stored(data)))
}

/// Exact length of [`encode`] without keeping the stream around longer than needed.
pub fn encoded_len(params: &Lz78Params, data: &[u8]) -> Result<usize> {
    encode(params, data).map(|v| v.len())
}

pub fn decode(params: &Lz78Params, stream: &[u8]) -> Result<Vec<u8>> {
    params.validate()?;
    let (&mode, rest) = stream
        .split_first()
        .ok_or_else(|| Error::Decode("empty stream".into()))?;
    let (len, used) = read_leb128(rest)?;
    let rest = &rest[used..];
    let len = usize::try_from(len).map_err(|_| Error::Decode("length too large".into()))?;
    match mode {
        MODE_STORED => {
            if rest.len() != len {
                return Err(Error::Decode(format!(
                    "stored block holds {} bytes, header says {len}",
                    rest.len()
                )));
            }
            Ok(rest.to_vec())
        }
        MODE_LZ78 => {
            let [bits, flags, body @ ..] = rest else {
                return Err(Error::Decode("stream truncated in header".into()));
            };
            if *bits != params.dictionary_bits || *flags != params.flags() {
                return Err(Error::Decode(format!(
                    "stream parameters (bits {bits}, flags {flags}) do not match the decoder"
                )));
            }
            decode_tokens(params, body, len)
        }
        other => Err(Error::Decode(format!("unknown mode byte {other}"))),
    }
}

fn decode_tokens(params: &Lz78Params, body: &[u8], len: usize) -> Result<Vec<u8>> {
    // Each entry: (parent index, last byte, phrase length).
    let mut dict: Vec<(u32, u8, usize)> = vec![(0, 0, 0)];
    let limit = params.limit();
    // A token needs at least 8 bits, so this caps the allocation for hostile headers.
    let mut out = Vec::with_capacity(len.min(body.len().saturating_mul(64)));
    let mut scratch = Vec::new();
    let mut r = BitReader::new(body);
    while out.len() < len {
        let size = dict.len() as u32;
        let idx = r.read(params.index_width(size))?;
        let &(_, _, plen) = dict
            .get(idx as usize)
            .ok_or_else(|| Error::Decode(format!("phrase index {idx} beyond dictionary size {size}")))?;
        if out.len() + plen > len {
            return Err(Error::Decode("phrase overruns the declared length".into()));
        }
        scratch.clear();
        let mut cur = idx;
        while cur != 0 {
            let (parent, byte, _) = dict[cur as usize];
            scratch.push(byte);
            cur = parent;
        }
        out.extend(scratch.iter().rev());
        if out.len() == len {
            if idx == 0 {
                return Err(Error::Decode("empty final phrase".into()));
            }
            break;
        }
        let literal = r.read(8)? as u8;
        out.push(literal);
        if size < limit {
            dict.push((idx, literal, plen + 1));
        } else if params.on_full == DictionaryFull::Reset {
            dict.truncate(1);
        }
    }
    r.expect_end()?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_params() -> Vec<Lz78Params> {
        let mut v = Vec::new();
        for bits in [1u8, 2, 4, 9, 16] {
            for code_width in [CodeWidth::Variable, CodeWidth::Fixed] {
                for on_full in [DictionaryFull::Reset, DictionaryFull::Freeze] {
                    v.push(Lz78Params {
                        dictionary_bits: bits,
                        code_width,
                        on_full,
                    });
                }
            }
        }
        v
    }

    #[test]
    fn small_round_trips_for_every_parameter_set() {
        let inputs: [&[u8]; 6] = [
            b"",
            b"0",
            b"0101010101",
            b"TOBEORNOTTOBEORTOBEORNOT",
            b"aaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaab",
            &[0u8, 255, 0, 255, 1, 2, 3, 0, 255, 0, 255, 1, 2, 3],
        ];
        for p in all_params() {
            for x in inputs {
                let enc = encode(&p, x).unwrap();
                assert_eq!(decode(&p, &enc).unwrap(), x, "{p:?} {x:?}");
                assert!(enc.len() <= x.len() + overhead_bound(x.len()));
            }
        }
    }

    #[test]
    fn repetitive_input_uses_dictionary_mode() {
        let data = vec![b'0'; 10_000];
        let enc = encode(&Lz78Params::default(), &data).unwrap();
        assert_eq!(enc[0], MODE_LZ78);
        assert!(enc.len() < 400, "{}", enc.len());
    }

    #[test]
    fn incompressible_input_is_stored() {
        let data: Vec<u8> = (0..=255u8).collect();
        let enc = encode(&Lz78Params::default(), &data).unwrap();
        assert_eq!(enc[0], MODE_STORED);
        assert_eq!(enc.len(), 256 + overhead_bound(256));
    }

    #[test]
    fn truncated_stream_fails() {
        let p = Lz78Params::default();
        let enc = encode(&p, b"0101010101010101010101").unwrap();
        for cut in 0..enc.len() {
            assert!(decode(&p, &enc[..cut]).is_err(), "cut {cut}");
        }
    }

    #[test]
    fn malformed_streams_fail() {
        let p = Lz78Params::default();
        assert!(decode(&p, &[9, 0]).is_err());
        assert!(decode(&p, &[MODE_STORED, 3, b'a']).is_err());
        let mut enc = encode(&p, b"abababababababababab").unwrap();
        enc.push(0);
        assert!(decode(&p, &enc).is_err());
        let other = Lz78Params {
            dictionary_bits: 12,
            ..p
        };
        let enc = encode(&p, b"abababababababababab").unwrap();
        assert!(decode(&other, &enc).is_err());
    }

    #[test]
    fn leb128_boundaries() {
        for n in [0u64, 1, 127, 128, 16_383, 16_384, u64::MAX] {
            let mut buf = Vec::new();
            write_leb128(&mut buf, n);
            assert_eq!(buf.len(), leb128_len(n));
            assert_eq!(read_leb128(&buf).unwrap(), (n, buf.len()));
        }
        assert!(read_leb128(&[0x80, 0x80]).is_err());
    }

    #[test]
    fn invalid_params_are_rejected() {
        let p = Lz78Params {
            dictionary_bits: 0,
            ..Lz78Params::default()
        };
        assert!(encode(&p, b"x").is_err());
        let p = Lz78Params {
            dictionary_bits: 25,
            ..Lz78Params::default()
        };
        assert!(encode(&p, b"x").is_err());
    }
}
