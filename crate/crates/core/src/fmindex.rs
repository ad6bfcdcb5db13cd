//! The FM-index: BWT with rank support plus a sampled suffix array.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::positions::Positions;
use crate::rank::{BitRankIndex, BwtRankIndex};
use crate::suffix::{build_suffix_array, derive_bwt, SuffixArray};
use crate::textio::{PackedText, Pattern};

mod format;

pub use format::{FORMAT_VERSION, MAGIC};

/// How suffix array values are chosen for the sampled suffix array.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplingStrategy {
    /// Keep `SA[i]` when `SA[i] mod D == 0`; needs the bitmap `B`.
    Value,
    /// Keep `SA[i]` when `i mod D == 0`.
    Subscript,
}

impl fmt::Display for SamplingStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SamplingStrategy::Value => "value",
            SamplingStrategy::Subscript => "subscript",
        })
    }
}

impl FromStr for SamplingStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "value" => Ok(SamplingStrategy::Value),
            "subscript" => Ok(SamplingStrategy::Subscript),
            other => Err(Error::InvalidArgument(format!(
                "unknown sampling strategy {other:?}"
            ))),
        }
    }
}

/// Sampled suffix array values in suffix-array order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampledSuffixArray {
    strategy: SamplingStrategy,
    distance: usize,
    values: Positions,
    /// `B[i] = 1` iff row `i` is sampled. Present only for value sampling.
    marks: Option<BitRankIndex>,
}

impl SampledSuffixArray {
    pub fn from_suffix_array(
        sa: &SuffixArray,
        distance: usize,
        strategy: SamplingStrategy,
    ) -> Result<Self> {
        if distance < 2 {
            return Err(Error::SamplingDistance(distance));
        }
        let n = sa.len();
        let mut values = Positions::for_text_len(n, n / distance + 1);
        let marks = match strategy {
            SamplingStrategy::Value => {
                let mut words = vec![0u64; n / 64 + 1];
                for i in 0..n {
                    let v = sa.get(i);
                    if v.is_multiple_of(distance) {
                        values.push(v);
                        words[i / 64] |= 1 << (i % 64);
                    }
                }
                Some(BitRankIndex::from_words(words, n))
            }
            SamplingStrategy::Subscript => {
                for i in (0..n).step_by(distance) {
                    values.push(sa.get(i));
                }
                None
            }
        };
        Ok(SampledSuffixArray {
            strategy,
            distance,
            values,
            marks,
        })
    }

    pub fn strategy(&self) -> SamplingStrategy {
        self.strategy
    }

    /// The sampling distance `D`.
    pub fn distance(&self) -> usize {
        self.distance
    }

    pub fn values(&self) -> &Positions {
        &self.values
    }

    pub fn marks(&self) -> Option<&BitRankIndex> {
        self.marks.as_ref()
    }

    pub fn size_in_bytes(&self) -> usize {
        self.values.len() * self.values.entry_width()
            + self.marks.as_ref().map_or(0, BitRankIndex::size_in_bytes)
    }
}

/// Half-open range `start..end` of suffix array rows; `ep = end - 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct SaRange {
    pub start: usize,
    pub end: usize,
}

impl SaRange {
    pub const EMPTY: SaRange = SaRange { start: 0, end: 0 };

    pub fn new(start: usize, end: usize) -> Self {
        SaRange { start, end }
    }

    /// From inclusive bounds `[sp, ep]`.
    pub fn inclusive(sp: usize, ep: usize) -> Self {
        SaRange { start: sp, end: ep + 1 }
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    pub fn len(&self) -> usize {
        self.end.saturating_sub(self.start)
    }

    pub fn sp(&self) -> usize {
        self.start
    }

    /// Inclusive end, `None` when empty.
    pub fn ep(&self) -> Option<usize> {
        (!self.is_empty()).then(|| self.end - 1)
    }

    pub fn rows(&self) -> std::ops::Range<usize> {
        self.start..self.end.max(self.start)
    }
}

/// Result of a backward search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchResult {
    /// Rows prefixed by the whole pattern.
    pub range: SaRange,
    /// Rows prefixed by the pattern without its first character; the full
    /// row range for single-character patterns.
    pub penult: SaRange,
}

/// Provenance recorded in the index header.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct BuildMetadata {
    /// Seed used to randomize non-ACGT input bytes.
    pub seed: u64,
    /// SHA-256 of the packed text.
    pub source_digest: [u8; 32],
}

impl BuildMetadata {
    pub fn for_text(text: &PackedText) -> Self {
        let mut hasher = Sha256::new();
        hasher.update((text.len() as u64).to_le_bytes());
        for w in text.words() {
            hasher.update(w.to_le_bytes());
        }
        BuildMetadata {
            seed: text.seed(),
            source_digest: hasher.finalize().into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FmIndex {
    bwt: BwtRankIndex,
    samples: SampledSuffixArray,
    meta: BuildMetadata,
}

impl FmIndex {
    /// Builds an index for `text` sampled every `distance` with `strategy`.
    ///
    /// ```
    /// use fmtree::{FmIndex, PackedText, SamplingStrategy};
    ///
    /// let text = PackedText::from_codes(&[0, 1, 2, 3, 0, 0, 1, 1, 0], 0)?;
    /// let index = FmIndex::build(&text, 3, SamplingStrategy::Value)?;
    /// assert_eq!(index.count(&"ac".parse()?), 2);
    /// # Ok::<(), fmtree::Error>(())
    /// ```
    pub fn build(text: &PackedText, distance: usize, strategy: SamplingStrategy) -> Result<Self> {
        if distance < 2 {
            return Err(Error::SamplingDistance(distance));
        }
        let sa = build_suffix_array(text);
        Self::from_suffix_array(text, &sa, distance, strategy)
    }

    /// Builds several indexes of the same text, sorting its suffixes once.
    pub fn build_many(
        text: &PackedText,
        configs: &[(usize, SamplingStrategy)],
    ) -> Result<Vec<Self>> {
        if let Some(&(d, _)) = configs.iter().find(|(d, _)| *d < 2) {
            return Err(Error::SamplingDistance(d));
        }
        let builder = IndexBuilder::new(text);
        configs
            .iter()
            .map(|&(d, strategy)| builder.build(d, strategy))
            .collect()
    }

    pub fn from_suffix_array(
        text: &PackedText,
        sa: &SuffixArray,
        distance: usize,
        strategy: SamplingStrategy,
    ) -> Result<Self> {
        let samples = SampledSuffixArray::from_suffix_array(sa, distance, strategy)?;
        let bwt = BwtRankIndex::build(&derive_bwt(text, sa));
        Ok(FmIndex {
            bwt,
            samples,
            meta: BuildMetadata::for_text(text),
        })
    }

    pub(crate) fn from_parts(
        bwt: BwtRankIndex,
        samples: SampledSuffixArray,
        meta: BuildMetadata,
    ) -> Self {
        FmIndex { bwt, samples, meta }
    }

    /// Text length `n`, sentinel included.
    pub fn len(&self) -> usize {
        self.bwt.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bwt.is_empty()
    }

    pub fn bwt(&self) -> &BwtRankIndex {
        &self.bwt
    }

    pub fn samples(&self) -> &SampledSuffixArray {
        &self.samples
    }

    pub fn strategy(&self) -> SamplingStrategy {
        self.samples.strategy
    }

    pub fn distance(&self) -> usize {
        self.samples.distance
    }

    pub fn metadata(&self) -> &BuildMetadata {
        &self.meta
    }

    pub fn sentinel_row(&self) -> usize {
        self.bwt.sentinel_row
    }

    /// Row whose suffix starts one position earlier than row `l`'s.
    pub fn lf(&self, l: usize) -> Result<usize> {
        if l >= self.len() {
            return Err(Error::OutOfRange {
                index: l,
                bound: self.len(),
            });
        }
        Ok(self.bwt.lf(l).unwrap_or(0))
    }

    /// Extends a range of rows prefixed by `S` to the rows prefixed by `cS`.
    #[inline]
    pub fn extend(&self, range: SaRange, code: u8) -> SaRange {
        let c = self.bwt.c(code);
        SaRange {
            start: c + self.bwt.rank(code, range.start),
            end: c + self.bwt.rank(code, range.end),
        }
    }

    /// Computes the rows prefixed by `pattern` and by its suffix after the
    /// first character, stopping early once the range is empty.
    pub fn backward_search(&self, pattern: &Pattern) -> SearchResult {
        let codes = pattern.codes();
        let last = codes[codes.len() - 1];
        let mut range = SaRange::new(self.bwt.c(last), self.bwt.c_next(last));
        let mut penult = SaRange::new(0, self.len());
        for &code in codes[..codes.len() - 1].iter().rev() {
            // An empty range for some suffix implies P[1..] is absent too.
            if range.is_empty() {
                return SearchResult {
                    range: SaRange::EMPTY,
                    penult: SaRange::EMPTY,
                };
            }
            penult = range;
            range = self.extend(range, code);
        }
        SearchResult {
            range: if range.is_empty() { SaRange::EMPTY } else { range },
            penult,
        }
    }

    pub fn count(&self, pattern: &Pattern) -> usize {
        self.backward_search(pattern).range.len()
    }

    /// `SA[row]` when `row` is sampled.
    #[inline]
    pub fn sampled_value(&self, row: usize) -> Option<usize> {
        match &self.samples.marks {
            Some(marks) => marks
                .get(row)
                .then(|| self.samples.values.get(marks.rank1(row))),
            None => row.is_multiple_of(self.samples.distance)
                .then(|| self.samples.values.get(row / self.samples.distance)),
        }
    }

    /// Total size of the index in memory.
    pub fn size_in_bytes(&self) -> usize {
        self.bwt.size_in_bytes() + self.samples.size_in_bytes()
    }
}

/// Holds the suffix array and BWT of one text so indexes with different
/// sampling parameters can be cut from it.
pub struct IndexBuilder {
    sa: SuffixArray,
    bwt: BwtRankIndex,
    meta: BuildMetadata,
}

impl IndexBuilder {
    pub fn new(text: &PackedText) -> Self {
        let sa = build_suffix_array(text);
        let bwt = BwtRankIndex::build(&derive_bwt(text, &sa));
        IndexBuilder {
            sa,
            bwt,
            meta: BuildMetadata::for_text(text),
        }
    }

    pub fn suffix_array(&self) -> &SuffixArray {
        &self.sa
    }

    pub fn build(&self, distance: usize, strategy: SamplingStrategy) -> Result<FmIndex> {
        Ok(FmIndex {
            bwt: self.bwt.clone(),
            samples: SampledSuffixArray::from_suffix_array(&self.sa, distance, strategy)?,
            meta: self.meta,
        })
    }
}
