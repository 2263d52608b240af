//! On-disk formats: the `.scn1` strand record and FASTA import/export.
//!
//! A record carries everything the read path needs to invert a strand:
//! the constraint config, the payload bit length, and the provider identity
//! with its parameters. The layout is fixed big-endian so golden-file tests
//! hold across platforms:
//!
//! ```text
//! offset  size  field
//!      0     4  magic "SCN1"
//!      4     1  version (1)
//!      5     1  flags: bit0 gc_enabled, bit1 hp_enabled, bit2 eos_mode
//!      6     1  window W
//!      7     2  gamma_lo (per-mille)
//!      9     2  gamma_hi (per-mille)
//!     11     1  hp_max
//!     12     1  guard_bits
//!     13     1  provider id
//!     14     2  provider params length P
//!     16     P  provider params
//!   16+P     8  payload bit length
//!   24+P     4  strand length N
//!   28+P     N  strand, ASCII A/T/G/C
//! ```

use crate::base::Base;
use crate::error::{CodecError, Result};
use crate::fsm::ConstraintConfig;

pub const MAGIC: [u8; 4] = *b"SCN1";
pub const FORMAT_VERSION: u8 = 1;

/// Identifies how to reconstruct the probability provider on decode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum ProviderId {
    Uniform = 0,
    StaticPmf = 1,
    LatentAdapter = 2,
}

impl ProviderId {
    pub fn from_u8(value: u8) -> Result<ProviderId> {
        match value {
            0 => Ok(ProviderId::Uniform),
            1 => Ok(ProviderId::StaticPmf),
            2 => Ok(ProviderId::LatentAdapter),
            other => Err(CodecError::InvalidParams(format!(
                "unknown provider id {other}"
            ))),
        }
    }
}

/// One encoded strand plus the metadata needed to decode it.
#[derive(Debug, Clone, PartialEq)]
pub struct StrandRecord {
    pub version: u8,
    pub config: ConstraintConfig,
    pub payload_bit_length: u64,
    pub provider_id: ProviderId,
    pub provider_params: Vec<u8>,
    pub bases: Vec<Base>,
}

impl StrandRecord {
    pub fn new(
        config: ConstraintConfig,
        payload_bit_length: u64,
        provider_id: ProviderId,
        provider_params: Vec<u8>,
        bases: Vec<Base>,
    ) -> StrandRecord {
        StrandRecord {
            version: FORMAT_VERSION,
            config,
            payload_bit_length,
            provider_id,
            provider_params,
            bases,
        }
    }

    pub fn strand_length(&self) -> u32 {
        self.bases.len() as u32
    }
}

/// Serializes a record into the fixed big-endian layout.
pub fn write_record(record: &StrandRecord) -> Result<Vec<u8>> {
    if record.provider_params.len() > usize::from(u16::MAX) {
        return Err(CodecError::InvalidParams(format!(
            "provider params of {} bytes exceed the u16 length field",
            record.provider_params.len()
        )));
    }
    if record.bases.len() > u32::MAX as usize {
        return Err(CodecError::InvalidParams(format!(
            "strand of {} bases exceeds the u32 length field",
            record.bases.len()
        )));
    }
    let cfg = &record.config;
    let mut out = Vec::with_capacity(28 + record.provider_params.len() + record.bases.len());
    out.extend_from_slice(&MAGIC);
    out.push(record.version);
    let flags = u8::from(cfg.gc_enabled)
        | u8::from(cfg.hp_enabled) << 1
        | u8::from(cfg.eos_mode) << 2;
    out.push(flags);
    out.push(cfg.window);
    out.extend_from_slice(&cfg.gc_lo.to_be_bytes());
    out.extend_from_slice(&cfg.gc_hi.to_be_bytes());
    out.push(cfg.hp_max);
    out.push(cfg.guard_bits);
    out.push(record.provider_id as u8);
    out.extend_from_slice(&(record.provider_params.len() as u16).to_be_bytes());
    out.extend_from_slice(&record.provider_params);
    out.extend_from_slice(&record.payload_bit_length.to_be_bytes());
    out.extend_from_slice(&(record.bases.len() as u32).to_be_bytes());
    out.extend(record.bases.iter().map(|b| b.to_ascii()));
    Ok(out)
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).ok_or(CodecError::Truncated)?;
        if end > self.bytes.len() {
            return Err(CodecError::Truncated);
        }
        let slice = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(slice)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_be_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_be_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_be_bytes(self.take(8)?.try_into().unwrap()))
    }
}

/// Parses a record. Any deviation from the layout yields a distinct error;
/// no input panics.
pub fn read_record(bytes: &[u8]) -> Result<StrandRecord> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(4)? != MAGIC {
        return Err(CodecError::BadMagic);
    }
    let version = r.u8()?;
    if version != FORMAT_VERSION {
        return Err(CodecError::UnsupportedVersion(version));
    }
    let flags = r.u8()?;
    if flags & !0b111 != 0 {
        return Err(CodecError::InvalidParams(format!(
            "unknown flag bits {flags:#04x}"
        )));
    }
    let window = r.u8()?;
    let gc_lo = r.u16()?;
    let gc_hi = r.u16()?;
    let hp_max = r.u8()?;
    let guard_bits = r.u8()?;
    let provider_id = ProviderId::from_u8(r.u8()?)?;
    let params_len = usize::from(r.u16()?);
    let provider_params = r.take(params_len)?.to_vec();
    let payload_bit_length = r.u64()?;
    let strand_length = r.u32()? as usize;
    let strand_start = r.pos;
    let ascii = r.take(strand_length)?;
    if r.pos != bytes.len() {
        return Err(CodecError::InvalidParams(format!(
            "{} trailing bytes after record",
            bytes.len() - r.pos
        )));
    }
    let mut bases = Vec::with_capacity(strand_length);
    for (i, &byte) in ascii.iter().enumerate() {
        match Base::from_ascii(byte) {
            Some(base) if byte.is_ascii_uppercase() => bases.push(base),
            _ => {
                return Err(CodecError::InvalidBase {
                    byte,
                    offset: strand_start + i,
                })
            }
        }
    }
    let config = ConstraintConfig {
        gc_enabled: flags & 0b001 != 0,
        hp_enabled: flags & 0b010 != 0,
        window,
        gc_lo,
        gc_hi,
        hp_max,
        guard_bits,
        eos_mode: flags & 0b100 != 0,
    };
    Ok(StrandRecord {
        version,
        config,
        payload_bit_length,
        provider_id,
        provider_params,
        bases,
    })
}

/// A named strand, as carried by FASTA files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FastaEntry {
    pub id: String,
    pub bases: Vec<Base>,
}

const FASTA_WRAP: usize = 80;

/// Writes standard FASTA: `>id` header lines, sequences wrapped at 80
/// columns. Ids must be unique, non-empty, and whitespace-free.
pub fn write_fasta(entries: &[FastaEntry]) -> Result<String> {
    let mut seen = std::collections::HashSet::new();
    let mut out = String::new();
    for entry in entries {
        if entry.id.is_empty() || entry.id.chars().any(|c| c.is_whitespace() || c == '>') {
            return Err(CodecError::Fasta(format!(
                "id {:?} must be non-empty without whitespace or '>'",
                entry.id
            )));
        }
        if !seen.insert(entry.id.as_str()) {
            return Err(CodecError::DuplicateId(entry.id.clone()));
        }
        out.push('>');
        out.push_str(&entry.id);
        out.push('\n');
        for chunk in entry.bases.chunks(FASTA_WRAP) {
            out.extend(chunk.iter().map(|b| char::from(b.to_ascii())));
            out.push('\n');
        }
    }
    Ok(out)
}

/// Parses FASTA text. Lenient about wrapping, blank lines, CRLF, and
/// lowercase bases (upcased); strict about everything else: sequence data
/// before a header, characters outside ATGC, and duplicate ids are errors.
pub fn read_fasta(text: &str) -> Result<Vec<FastaEntry>> {
    let mut entries: Vec<FastaEntry> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (line_no, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        if let Some(header) = line.strip_prefix('>') {
            let id = header
                .trim()
                .split_whitespace()
                .next()
                .unwrap_or("")
                .to_string();
            if id.is_empty() {
                return Err(CodecError::Fasta(format!(
                    "line {}: header without an id",
                    line_no + 1
                )));
            }
            if !seen.insert(id.clone()) {
                return Err(CodecError::DuplicateId(id));
            }
            entries.push(FastaEntry {
                id,
                bases: Vec::new(),
            });
        } else {
            let current = entries.last_mut().ok_or_else(|| {
                CodecError::Fasta(format!(
                    "line {}: sequence data before any '>' header",
                    line_no + 1
                ))
            })?;
            for (col, byte) in line.bytes().enumerate() {
                match Base::from_ascii(byte) {
                    Some(base) => current.bases.push(base),
                    None => {
                        return Err(CodecError::Fasta(format!(
                            "line {}, column {}: invalid base {:?}",
                            line_no + 1,
                            col + 1,
                            char::from(byte)
                        )))
                    }
                }
            }
        }
    }
    Ok(entries)
}
