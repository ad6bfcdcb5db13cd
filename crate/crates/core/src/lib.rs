//! An FM-index for DNA texts with two ways to locate occurrences: classic
//! one-by-one LF walks over value- or subscript-sampled suffix arrays, and a
//! breadth-first quadtree traversal that resolves many positions per rank
//! query on value-sampled indexes.
//!
//! ```
//! use fmtree::{Engine, FmIndex, FmTreeConfig, RawText, SamplingStrategy, SourceFormat};
//!
//! let raw = RawText::parse(b">chr\nACGTAACCA\n", SourceFormat::Fasta)?;
//! let text = fmtree::normalize(&raw, 0);
//! let index = FmIndex::build(&text, 3, SamplingStrategy::Value)?;
//!
//! let pattern = "ac".parse()?;
//! assert_eq!(index.count(&pattern), 2);
//! let hits = index.locate(&pattern, Engine::FmTree(FmTreeConfig::default()))?;
//! assert_eq!(hits.sorted_positions(), vec![0, 5]);
//! # Ok::<(), fmtree::Error>(())
//! ```
//!
//! The guide under `book/` walks through each component; its code listings
//! are compiled and run as doc-tests of this crate.

pub mod bench;
pub mod error;
pub mod fmindex;
pub mod locate;
pub mod oracle;
pub mod positions;
pub mod rank;
pub mod selftest;
pub mod suffix;
pub mod textio;

pub use error::{Error, FormatError, Result};
pub use fmindex::{BuildMetadata, FmIndex, IndexBuilder, SaRange, SampledSuffixArray, SamplingStrategy, SearchResult};
pub use locate::{Engine, FmTree, FmTreeConfig, LocateResult, LocateStats, Mechanism};
pub use rank::{BitRankIndex, BwtRankIndex};
pub use suffix::{build_suffix_array, derive_bwt, BwtString, SuffixArray};
pub use textio::{extract_patterns, load_text, normalize, PackedText, Pattern, RawText, SourceFormat};

// mdbook cannot link against this crate when testing listings, so each
// chapter is compiled here as a doc-test instead.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/texts.md")]
    mod texts {}
    #[doc = include_str!("../../../book/src/bwt.md")]
    mod bwt {}
    #[doc = include_str!("../../../book/src/rank.md")]
    mod rank {}
    #[doc = include_str!("../../../book/src/sampling.md")]
    mod sampling {}
    #[doc = include_str!("../../../book/src/fmtree.md")]
    mod fmtree {}
    #[doc = include_str!("../../../book/src/format.md")]
    mod format {}
    #[doc = include_str!("../../../book/src/benchmarks.md")]
    mod benchmarks {}
}
