//! Time/space sweeps over sampling distances, pattern lengths and engines.
//!
//! For every `(D, engine, pattern length)` the harness runs one untimed
//! warm-up pass, then times the counting phase (backward search of every
//! pattern) and the locating phase (resolving every range) separately with a
//! monotonic clock.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fmindex::{FmIndex, IndexBuilder, SamplingStrategy, SearchResult};
use crate::locate::{locate_original, FmTree, FmTreeConfig};
use crate::textio::{extract_patterns, PackedText, Pattern};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BenchEngine {
    Fmtree,
    OriginalV,
    OriginalS,
}

impl BenchEngine {
    pub const ALL: [BenchEngine; 3] = [
        BenchEngine::Fmtree,
        BenchEngine::OriginalV,
        BenchEngine::OriginalS,
    ];

    pub fn strategy(self) -> SamplingStrategy {
        match self {
            BenchEngine::Fmtree | BenchEngine::OriginalV => SamplingStrategy::Value,
            BenchEngine::OriginalS => SamplingStrategy::Subscript,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BenchEngine::Fmtree => "fmtree",
            BenchEngine::OriginalV => "original_v",
            BenchEngine::OriginalS => "original_s",
        }
    }
}

impl fmt::Display for BenchEngine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BenchEngine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BenchEngine::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown engine {s:?}")))
    }
}

/// One CSV row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub engine: BenchEngine,
    #[serde(rename = "D")]
    pub distance: usize,
    pub pattern_length: usize,
    pub pattern_count: usize,
    pub total_occ: u64,
    pub count_time_ns: u64,
    pub locate_time_ns: u64,
    pub index_bytes: u64,
    pub bits_per_char: f64,
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub pattern_lengths: Vec<usize>,
    pub patterns_per_length: usize,
    pub distances: Vec<usize>,
    pub engines: Vec<BenchEngine>,
    pub seed: u64,
    pub threshold: usize,
    /// When above 1, each configuration is re-run on this many threads and
    /// compared with the single-threaded answers.
    pub threads: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            pattern_lengths: vec![5],
            patterns_per_length: 10,
            distances: (2..=8).collect(),
            engines: BenchEngine::ALL.to_vec(),
            seed: 0,
            threshold: crate::locate::DEFAULT_THRESHOLD,
            threads: 1,
        }
    }
}

/// Patterns for one length; identical for every engine and distance.
pub fn patterns_for(text: &PackedText, config: &BenchConfig, length: usize) -> Result<Vec<Pattern>> {
    extract_patterns(
        text,
        config.patterns_per_length,
        length,
        config.seed.wrapping_add(length as u64),
    )
}

/// Runs the whole sweep. Rows are ordered by `D`, then engine, then length.
pub fn run(text: &PackedText, config: &BenchConfig) -> Result<Vec<BenchRecord>> {
    if config.distances.iter().any(|&d| d < 2) {
        return Err(Error::SamplingDistance(
            *config.distances.iter().min().unwrap(),
        ));
    }
    let pattern_sets = config
        .pattern_lengths
        .iter()
        .map(|&len| Ok((len, patterns_for(text, config, len)?)))
        .collect::<Result<Vec<_>>>()?;

    let builder = IndexBuilder::new(text);
    let mut records = Vec::new();
    for &d in &config.distances {
        for strategy in [SamplingStrategy::Value, SamplingStrategy::Subscript] {
            let engines: Vec<_> = config
                .engines
                .iter()
                .copied()
                .filter(|e| e.strategy() == strategy)
                .collect();
            if engines.is_empty() {
                continue;
            }
            let index = builder.build(d, strategy)?;
            let index_bytes = index.serialized_size();
            for &engine in &engines {
                for (len, patterns) in &pattern_sets {
                    let timing = measure(&index, engine, patterns, config.threshold)?;
                    if config.threads > 1 {
                        check_concurrent(&index, engine, patterns, config)?;
                    }
                    records.push(BenchRecord {
                        engine,
                        distance: d,
                        pattern_length: *len,
                        pattern_count: patterns.len(),
                        total_occ: timing.total_occ,
                        count_time_ns: timing.count_ns,
                        locate_time_ns: timing.locate_ns,
                        index_bytes,
                        bits_per_char: 8.0 * index_bytes as f64 / text.len() as f64,
                    });
                }
            }
        }
    }
    Ok(records)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PhaseTiming {
    pub total_occ: u64,
    pub count_ns: u64,
    pub locate_ns: u64,
}

/// Warm-up pass, then timed count and locate phases for one engine.
pub fn measure(
    index: &FmIndex,
    engine: BenchEngine,
    patterns: &[Pattern],
    threshold: usize,
) -> Result<PhaseTiming> {
    if index.strategy() != engine.strategy() {
        return Err(Error::UnsupportedStrategy {
            engine: engine.name(),
            found: index.strategy(),
        });
    }
    let mut tree = match engine {
        BenchEngine::Fmtree => Some(FmTree::new(index, FmTreeConfig::with_threshold(threshold))?),
        _ => None,
    };

    let searches: Vec<SearchResult> = patterns.iter().map(|p| index.backward_search(p)).collect();
    locate_all(index, tree.as_mut(), patterns, &searches);

    let start = Instant::now();
    let searches: Vec<SearchResult> = patterns.iter().map(|p| index.backward_search(p)).collect();
    let count_ns = start.elapsed().as_nanos() as u64;
    let total_occ: u64 = searches.iter().map(|s| s.range.len() as u64).sum();

    let start = Instant::now();
    let located = locate_all(index, tree.as_mut(), patterns, &searches);
    let locate_ns = start.elapsed().as_nanos() as u64;

    if located != total_occ {
        return Err(Error::InvariantViolation(format!(
            "{engine} located {located} positions for {total_occ} occurrences"
        )));
    }
    Ok(PhaseTiming {
        total_occ,
        count_ns,
        locate_ns,
    })
}

fn locate_all(
    index: &FmIndex,
    mut tree: Option<&mut FmTree<'_>>,
    patterns: &[Pattern],
    searches: &[SearchResult],
) -> u64 {
    let mut located = 0u64;
    for (p, s) in patterns.iter().zip(searches) {
        let result = match tree.as_deref_mut() {
            Some(tree) => tree.locate_ranges(p.first(), s.range, s.penult),
            None => locate_original(index, s.range),
        };
        located += result.positions.len() as u64;
    }
    located
}

fn sorted_answers(
    index: &FmIndex,
    engine: BenchEngine,
    patterns: &[Pattern],
    threshold: usize,
) -> Result<Vec<Vec<usize>>> {
    let mut tree = match engine {
        BenchEngine::Fmtree => Some(FmTree::new(index, FmTreeConfig::with_threshold(threshold))?),
        _ => None,
    };
    Ok(patterns
        .iter()
        .map(|p| {
            let s = index.backward_search(p);
            match tree.as_mut() {
                Some(tree) => tree.locate_ranges(p.first(), s.range, s.penult),
                None => locate_original(index, s.range),
            }
            .sorted_positions()
        })
        .collect())
}

/// Answers the same patterns from several threads sharing one index and
/// checks they agree with a single-threaded run.
pub fn check_concurrent(
    index: &FmIndex,
    engine: BenchEngine,
    patterns: &[Pattern],
    config: &BenchConfig,
) -> Result<()> {
    let expected = sorted_answers(index, engine, patterns, config.threshold)?;
    let chunk = patterns.len().div_ceil(config.threads.max(1)).max(1);
    let parts: Vec<Result<Vec<Vec<usize>>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = patterns
            .chunks(chunk)
            .map(|part| scope.spawn(move || sorted_answers(index, engine, part, config.threshold)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("query thread panicked"))
            .collect()
    });
    let mut got = Vec::with_capacity(patterns.len());
    for part in parts {
        got.extend(part?);
    }
    if got != expected {
        return Err(Error::InvariantViolation(format!(
            "{engine}: concurrent answers differ from single-threaded answers"
        )));
    }
    Ok(())
}

/// Writes records as CSV with a header row.
pub fn write_csv<W: Write>(records: &[BenchRecord], sink: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
