//! Loading, normalizing and packing DNA texts, and sampling benchmark patterns.
//!
//! Texts are folded to the alphabet `{a, c, g, t}` and stored two bits per
//! character (`a = 0`, `c = 1`, `g = 2`, `t = 3`). The terminating sentinel is
//! implicit: a [`PackedText`] of length `n` stores `n - 1` codes and the
//! logical character at `n - 1` is `$`.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lowercase character for each 2-bit code.
pub const ALPHABET: [u8; 4] = *b"acgt";

/// Number of characters stored in one packed word.
const CODES_PER_WORD: usize = 32;

/// Maps a byte to its 2-bit code, case-insensitively.
#[inline]
pub fn encode_base(byte: u8) -> Option<u8> {
    match byte {
        b'a' | b'A' => Some(0),
        b'c' | b'C' => Some(1),
        b'g' | b'G' => Some(2),
        b't' | b'T' => Some(3),
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceFormat {
    Plain,
    Fasta,
}

impl FromStr for SourceFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plain" => Ok(SourceFormat::Plain),
            "fasta" => Ok(SourceFormat::Fasta),
            other => Err(Error::InvalidArgument(format!("unknown format {other:?}"))),
        }
    }
}

/// Sequence bytes as read from disk, before normalization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawText {
    bytes: Vec<u8>,
    source_format: SourceFormat,
}

impl RawText {
    /// Parses an in-memory buffer. FASTA records are concatenated in file
    /// order with headers and line breaks removed.
    pub fn parse(data: &[u8], format: SourceFormat) -> Result<Self> {
        let bytes = match format {
            SourceFormat::Plain => {
                let mut end = data.len();
                while end > 0 && matches!(data[end - 1], b'\n' | b'\r') {
                    end -= 1;
                }
                data[..end].to_vec()
            }
            SourceFormat::Fasta => parse_fasta(data)?,
        };
        if bytes.is_empty() {
            return Err(Error::EmptyInput);
        }
        Ok(RawText {
            bytes,
            source_format: format,
        })
    }

    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn source_format(&self) -> SourceFormat {
        self.source_format
    }

    pub fn len(&self) -> usize {
        self.bytes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bytes.is_empty()
    }
}

fn parse_fasta(data: &[u8]) -> Result<Vec<u8>> {
    match data.iter().find(|b| !b.is_ascii_whitespace()) {
        None => return Err(Error::EmptyInput),
        Some(&b'>') => {}
        Some(&other) => {
            return Err(Error::MalformedFasta {
                found: other as char,
            })
        }
    }
    let mut seq = Vec::with_capacity(data.len());
    for line in data.split(|&b| b == b'\n') {
        if line.first() == Some(&b'>') {
            continue;
        }
        seq.extend(line.iter().copied().filter(|b| !b.is_ascii_whitespace()));
    }
    Ok(seq)
}

/// Reads a plain or FASTA file.
pub fn load_text(path: impl AsRef<Path>, format: SourceFormat) -> Result<RawText> {
    let path = path.as_ref();
    let data = fs::read(path).map_err(|source| Error::Read {
        path: path.to_path_buf(),
        source,
    })?;
    RawText::parse(&data, format)
}

/// A normalized, 2-bit packed text with an implicit trailing sentinel.
#[derive(Clone, PartialEq, Eq)]
pub struct PackedText {
    words: Vec<u64>,
    /// Number of characters including the sentinel.
    len: usize,
    seed: u64,
}

impl PackedText {
    /// Packs codes that are already in `0..4`. The sentinel is appended
    /// logically.
    pub fn from_codes(codes: &[u8], seed: u64) -> Result<Self> {
        if let Some(bad) = codes.iter().find(|&&c| c > 3) {
            return Err(Error::InvalidArgument(format!("code {bad} is not 2-bit")));
        }
        let mut words = vec![0u64; codes.len().div_ceil(CODES_PER_WORD)];
        for (i, &c) in codes.iter().enumerate() {
            words[i / CODES_PER_WORD] |= (c as u64) << (2 * (i % CODES_PER_WORD));
        }
        Ok(PackedText {
            words,
            len: codes.len() + 1,
            seed,
        })
    }

    /// Number of characters including the sentinel (`n`).
    pub fn len(&self) -> usize {
        self.len
    }

    /// Always false: the sentinel is always present.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of stored codes, `n - 1`.
    pub fn text_len(&self) -> usize {
        self.len - 1
    }

    pub fn sentinel_pos(&self) -> usize {
        self.len - 1
    }

    /// Seed used when randomizing non-ACGT bytes.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Code at position `i < n - 1`.
    #[inline]
    pub fn code(&self, i: usize) -> u8 {
        debug_assert!(i < self.text_len());
        ((self.words[i / CODES_PER_WORD] >> (2 * (i % CODES_PER_WORD))) & 3) as u8
    }

    pub fn codes(&self) -> impl Iterator<Item = u8> + '_ {
        (0..self.text_len()).map(move |i| self.code(i))
    }

    pub fn to_codes(&self) -> Vec<u8> {
        self.codes().collect()
    }

    /// Raw packed words; trailing slots past `n - 1` are zero.
    pub fn words(&self) -> &[u64] {
        &self.words
    }
}

impl fmt::Display for PackedText {
    /// Lowercase characters without the sentinel.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.codes().map(|c| ALPHABET[c as usize] as char).collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for PackedText {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len <= 64 {
            write!(f, "PackedText({self}$)")
        } else {
            write!(f, "PackedText(n={})", self.len)
        }
    }
}

/// Folds case and replaces every non-ACGT byte with a code drawn from a
/// ChaCha8 stream seeded with `seed`.
pub fn normalize(raw: &RawText, seed: u64) -> PackedText {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let codes: Vec<u8> = raw
        .bytes()
        .iter()
        .map(|&b| encode_base(b).unwrap_or_else(|| (rng.next_u32() >> 30) as u8))
        .collect();
    PackedText::from_codes(&codes, seed).expect("codes are 2-bit")
}

/// A non-empty query string over `{a, c, g, t}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pattern {
    codes: Vec<u8>,
}

impl Pattern {
    pub fn from_codes(codes: Vec<u8>) -> Result<Self> {
        if codes.is_empty() {
            return Err(Error::InvalidPattern("pattern is empty".into()));
        }
        if let Some(bad) = codes.iter().find(|&&c| c > 3) {
            return Err(Error::InvalidPattern(format!("code {bad} is not 2-bit")));
        }
        Ok(Pattern { codes })
    }

    pub fn codes(&self) -> &[u8] {
        &self.codes
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    /// Always false; patterns have at least one character.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn first(&self) -> u8 {
        self.codes[0]
    }
}

impl FromStr for Pattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let codes = s
            .bytes()
            .map(|b| {
                encode_base(b).ok_or_else(|| {
                    Error::InvalidPattern(format!("{s:?} contains non-ACGT byte {:?}", b as char))
                })
            })
            .collect::<Result<Vec<u8>>>()?;
        Pattern::from_codes(codes)
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self
            .codes
            .iter()
            .map(|&c| ALPHABET[c as usize] as char)
            .collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pattern({self})")
    }
}

/// Samples `count` substrings of `length` characters at uniform offsets in
/// `[0, n - 1 - length]`.
pub fn extract_patterns(
    text: &PackedText,
    count: usize,
    length: usize,
    seed: u64,
) -> Result<Vec<Pattern>> {
    if length == 0 {
        return Err(Error::InvalidArgument("pattern length must be >= 1".into()));
    }
    if count == 0 {
        return Err(Error::InvalidArgument("pattern count must be >= 1".into()));
    }
    if length > text.text_len() {
        return Err(Error::PatternTooLong {
            length,
            text_len: text.text_len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let last = text.text_len() - length;
    Ok((0..count)
        .map(|_| {
            let off = rng.random_range(0..=last);
            Pattern {
                codes: (off..off + length).map(|i| text.code(i)).collect(),
            }
        })
        .collect())
}
