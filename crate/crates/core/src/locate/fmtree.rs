//! Quadtree locating over a value-sampled index.
//!
//! With value sampling at distance `D`, every occurrence `x` of `P` falls in
//! exactly one residue class `x mod D`. Residue `i < D - 1` is harvested from
//! the sampled rows of the strings `*^i P` (any `i` characters followed by
//! `P`): their ranges form layer `i` of a quadtree rooted at the range of `P`,
//! and each sampled value `y` there yields `x = y + i`. Residue `D - 1` is
//! obtained without building the last layer: a sampled row `j` in the range
//! of `P[1..]` whose preceding character is `P[0]` yields `x = SA[j] - 1`.
//!
//! Nodes are visited breadth-first. A node whose range is smaller than the
//! branch-cut threshold is resolved by short LF walks instead of being
//! expanded, and the traversal stops as soon as `occ` positions are known.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::fmindex::{FmIndex, SaRange, SamplingStrategy};
use crate::rank::BitRankIndex;
use crate::textio::Pattern;

use super::{LocateResult, LocateStats, Mechanism};

/// Branch-cut threshold that never fires.
pub const UNBOUNDED: usize = usize::MAX;

pub const DEFAULT_THRESHOLD: usize = 16;

/// Deliberate defects for exercising the self-test harness.
#[doc(hidden)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InjectedFault {
    /// Use `sep = rank1(B, ep)` (inclusive) when retrieving sampled values.
    InclusiveSampleEnd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FmTreeConfig {
    /// Nodes with fewer rows than this are resolved by LF walks.
    /// `0` disables the branch cut, [`UNBOUNDED`] drains every node.
    pub threshold: usize,
    /// Stop once as many positions as the pattern has occurrences are found.
    pub early_termination: bool,
    /// Record the [`Mechanism`] behind each position.
    pub trace: bool,
    #[doc(hidden)]
    pub fault: Option<InjectedFault>,
}

impl Default for FmTreeConfig {
    fn default() -> Self {
        FmTreeConfig {
            threshold: DEFAULT_THRESHOLD,
            early_termination: true,
            trace: false,
            fault: None,
        }
    }
}

impl FmTreeConfig {
    pub fn with_threshold(threshold: usize) -> Self {
        FmTreeConfig {
            threshold,
            ..Self::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TreeNode {
    pub range: SaRange,
    pub layer: usize,
}

struct Sink<'a> {
    positions: &'a mut Vec<usize>,
    provenance: Option<&'a mut Vec<Mechanism>>,
}

impl Sink<'_> {
    #[inline]
    fn push(&mut self, position: usize, mechanism: Mechanism) {
        self.positions.push(position);
        if let Some(p) = self.provenance.as_deref_mut() {
            p.push(mechanism);
        }
    }
}

fn marks_of<'a>(index: &'a FmIndex, engine: &'static str) -> Result<&'a BitRankIndex> {
    index.samples().marks().ok_or(Error::UnsupportedStrategy {
        engine,
        found: index.strategy(),
    })
}

/// Quadtree locator bound to one value-sampled index. The node queue is kept
/// between queries.
pub struct FmTree<'a> {
    index: &'a FmIndex,
    marks: &'a BitRankIndex,
    config: FmTreeConfig,
    queue: VecDeque<TreeNode>,
}

impl<'a> FmTree<'a> {
    pub fn new(index: &'a FmIndex, config: FmTreeConfig) -> Result<Self> {
        let marks = marks_of(index, "fmtree")?;
        debug_assert_eq!(index.strategy(), SamplingStrategy::Value);
        Ok(FmTree {
            index,
            marks,
            config,
            queue: VecDeque::new(),
        })
    }

    pub fn config(&self) -> &FmTreeConfig {
        &self.config
    }

    /// Backward-searches `pattern`, then locates it.
    pub fn locate(&mut self, pattern: &Pattern) -> LocateResult {
        let search = self.index.backward_search(pattern);
        let mut result = self.locate_ranges(pattern.first(), search.range, search.penult);
        // The root range came from the penultimate one by two rank operations.
        if pattern.len() > 1 && !search.penult.is_empty() {
            result.stats.rank_ops_by_layer[0] = 2;
        }
        result
    }

    /// Locates a pattern given its row range, the row range of the pattern
    /// without its first character, and that first character.
    pub fn locate_ranges(&mut self, first: u8, range: SaRange, penult: SaRange) -> LocateResult {
        let index = self.index;
        let distance = index.distance();
        let tree_height = distance - 1;
        let config = self.config;

        let mut stats = LocateStats {
            rank_ops_by_layer: vec![0; tree_height],
            ..LocateStats::default()
        };
        let mut positions = Vec::with_capacity(range.len());
        let mut provenance = Vec::new();
        if range.is_empty() {
            return LocateResult {
                positions,
                provenance,
                stats,
            };
        }
        let mut sink = Sink {
            positions: &mut positions,
            provenance: config.trace.then_some(&mut provenance),
        };

        let total = range.len();
        leaf_scan(index, self.marks, penult, first, &mut sink, &mut stats);

        self.queue.clear();
        self.queue.push_back(TreeNode { range, layer: 0 });
        while let Some(node) = self.queue.pop_front() {
            if config.early_termination && sink.positions.len() >= total {
                break;
            }
            stats.nodes_visited += 1;
            if node.range.len() < config.threshold {
                stats.drains += 1;
                drain(index, self.marks, node, &mut sink, &mut stats);
                continue;
            }
            retrieve(index, self.marks, node, config.fault, &mut sink, &mut stats);
            if node.layer + 1 < tree_height {
                stats.nodes_expanded += 1;
                stats.grouped_probes += 2;
                stats.bwt_rank_ops += 8;
                stats.rank_ops_by_layer[node.layer + 1] += 8;
                for child in expand_node(index, node.range) {
                    if !child.is_empty() {
                        self.queue.push_back(TreeNode {
                            range: child,
                            layer: node.layer + 1,
                        });
                    }
                }
            }
        }
        self.queue.clear();

        LocateResult {
            positions,
            provenance,
            stats,
        }
    }
}

/// Locates with a fresh [`FmTree`]. Fails on subscript-sampled indexes.
pub fn locate_fmtree(
    index: &FmIndex,
    pattern: &Pattern,
    range: SaRange,
    penult: SaRange,
    config: FmTreeConfig,
) -> Result<LocateResult> {
    Ok(FmTree::new(index, config)?.locate_ranges(pattern.first(), range, penult))
}

/// Ranges of `a·S`, `c·S`, `g·S`, `t·S` given the range of `S`, from one
/// grouped probe at each boundary. Sentinel rows have no child.
#[inline]
pub fn expand_node(index: &FmIndex, range: SaRange) -> [SaRange; 4] {
    let bwt = index.bwt();
    let lo = bwt.rank_all(range.start);
    let hi = bwt.rank_all(range.end);
    std::array::from_fn(|s| {
        let c = bwt.c(s as u8);
        SaRange::new(c + lo[s], c + hi[s])
    })
}

/// Positions with residue `D - 1`, found from the range of `P[1..]`.
pub fn early_leaf(index: &FmIndex, penult: SaRange, first: u8) -> Result<Vec<usize>> {
    let marks = marks_of(index, "early leaf calculation")?;
    let mut positions = Vec::new();
    let mut sink = Sink {
        positions: &mut positions,
        provenance: None,
    };
    leaf_scan(index, marks, penult, first, &mut sink, &mut LocateStats::default());
    Ok(positions)
}

/// `SSA[k] + layer` for every sampled row of `range`.
pub fn retrieve_sampled(index: &FmIndex, range: SaRange, layer: usize) -> Result<Vec<usize>> {
    let marks = marks_of(index, "sampled retrieval")?;
    let mut positions = Vec::new();
    let mut sink = Sink {
        positions: &mut positions,
        provenance: None,
    };
    retrieve(
        index,
        marks,
        TreeNode { range, layer },
        None,
        &mut sink,
        &mut LocateStats::default(),
    );
    Ok(positions)
}

/// Resolves a node by LF walks of at most `D - layer - 2` steps per row.
/// Rows that stay unsampled within that budget have residue `D - 1` and are
/// left to the early-leaf scan.
pub fn drain_small_range(index: &FmIndex, node: TreeNode) -> Result<Vec<usize>> {
    let marks = marks_of(index, "branch cut")?;
    let mut positions = Vec::new();
    let mut sink = Sink {
        positions: &mut positions,
        provenance: None,
    };
    drain(index, marks, node, &mut sink, &mut LocateStats::default());
    Ok(positions)
}

fn leaf_scan(
    index: &FmIndex,
    marks: &BitRankIndex,
    penult: SaRange,
    first: u8,
    sink: &mut Sink<'_>,
    stats: &mut LocateStats,
) {
    if penult.is_empty() {
        return;
    }
    let bwt = index.bwt();
    let values = index.samples().values();
    stats.bit_rank_ops += 1;
    let rows = marks.ones_in(penult.start, penult.end);
    for (k, j) in (marks.rank1(penult.start)..).zip(rows) {
        if bwt.get(j) == Some(first) {
            sink.push(values.get(k) - 1, Mechanism::EarlyLeaf);
        }
    }
}

fn retrieve(
    index: &FmIndex,
    marks: &BitRankIndex,
    node: TreeNode,
    fault: Option<InjectedFault>,
    sink: &mut Sink<'_>,
    stats: &mut LocateStats,
) {
    let values = index.samples().values();
    stats.bit_rank_ops += 2;
    let first = marks.rank1(node.range.start);
    let end = match fault {
        None => marks.rank1(node.range.end),
        Some(InjectedFault::InclusiveSampleEnd) => {
            (marks.rank1(node.range.end - 1) + 1).min(values.len())
        }
    };
    for k in first..end {
        sink.push(values.get(k) + node.layer, Mechanism::Layer(node.layer));
    }
}

fn drain(
    index: &FmIndex,
    marks: &BitRankIndex,
    node: TreeNode,
    sink: &mut Sink<'_>,
    stats: &mut LocateStats,
) {
    let bwt = index.bwt();
    let values = index.samples().values();
    let budget = index.distance() - node.layer - 2;
    for row in node.range.rows() {
        let mut j = row;
        let mut steps = 0;
        loop {
            if marks.get(j) {
                stats.bit_rank_ops += 1;
                sink.push(
                    values.get(marks.rank1(j)) + steps + node.layer,
                    Mechanism::Drain {
                        layer: node.layer,
                        steps,
                    },
                );
                break;
            }
            if steps == budget {
                break;
            }
            // Unsampled rows are never the sentinel row, so LF is defined.
            j = bwt.lf(j).expect("sentinel row is always sampled");
            stats.bwt_rank_ops += 1;
            stats.lf_steps += 1;
            steps += 1;
        }
        stats.max_walk = stats.max_walk.max(steps);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fmindex::SamplingStrategy;
    use crate::oracle::naive_locate;
    use crate::textio::PackedText;
    use proptest::prelude::*;

    fn reference_text() -> PackedText {
        PackedText::from_codes(&[0, 1, 2, 3, 0, 0, 1, 1, 0], 0).unwrap()
    }

    fn reference() -> FmIndex {
        FmIndex::build(&reference_text(), 3, SamplingStrategy::Value).unwrap()
    }

    fn pat(s: &str) -> Pattern {
        s.parse().unwrap()
    }

    fn traced(threshold: usize) -> FmTreeConfig {
        FmTreeConfig {
            threshold,
            trace: true,
            ..FmTreeConfig::default()
        }
    }

    #[test]
    fn reference_ac() {
        let idx = reference();
        let mut tree = FmTree::new(&idx, traced(0)).unwrap();
        let r = tree.locate(&pat("ac"));
        assert_eq!(r.sorted_positions(), vec![0, 5]);
        let mut found: Vec<_> = r.positions.iter().copied().zip(r.provenance.iter().copied()).collect();
        found.sort_unstable_by_key(|p| p.0);
        assert_eq!(found, vec![(0, Mechanism::Layer(0)), (5, Mechanism::EarlyLeaf)]);
    }

    #[test]
    fn reference_a_matches_original() {
        let idx = reference();
        for threshold in [0, 4, 16, UNBOUNDED] {
            let mut tree = FmTree::new(&idx, FmTreeConfig::with_threshold(threshold)).unwrap();
            assert_eq!(tree.locate(&pat("a")).sorted_positions(), vec![0, 4, 5, 8]);
        }
    }

    #[test]
    fn early_leaf_reference() {
        let idx = reference();
        assert_eq!(early_leaf(&idx, SaRange::inclusive(5, 7), 0).unwrap(), vec![5]);
        assert!(early_leaf(&idx, SaRange::EMPTY, 0).unwrap().is_empty());
        // "ta": penult is range("a"); the only sampled row with a preceding t
        // would be row 4, whose value 0 has no predecessor.
        assert!(early_leaf(&idx, SaRange::inclusive(1, 4), 3).unwrap().is_empty());
        assert_eq!(FmTree::new(&idx, FmTreeConfig::default()).unwrap().locate(&pat("ta")).positions, vec![3]);
    }

    #[test]
    fn expand_reference() {
        let idx = reference();
        let children = expand_node(&idx, SaRange::inclusive(1, 4));
        assert_eq!(children[1], SaRange::inclusive(5, 5));
        assert_eq!(children[1], idx.backward_search(&pat("ca")).range);
        let total: usize = children.iter().map(SaRange::len).sum();
        // Row 4 is the sentinel row and has no child.
        assert_eq!(total, 3);
        assert!(expand_node(&idx, SaRange::EMPTY).iter().all(SaRange::is_empty));
    }

    #[test]
    fn retrieve_reference() {
        let idx = reference();
        assert_eq!(retrieve_sampled(&idx, SaRange::inclusive(3, 4), 0).unwrap(), vec![0]);
        assert!(retrieve_sampled(&idx, SaRange::inclusive(3, 3), 0).unwrap().is_empty());
        let mut all = retrieve_sampled(&idx, SaRange::new(0, 10), 0).unwrap();
        all.sort_unstable();
        assert_eq!(all, vec![0, 3, 6, 9]);
    }

    #[test]
    fn drain_budget_boundary() {
        let idx = reference();
        // Layer D - 2 = 1: budget zero, only directly sampled rows report.
        let got = drain_small_range(&idx, TreeNode { range: SaRange::new(0, 10), layer: 1 }).unwrap();
        let mut got = got;
        got.sort_unstable();
        assert_eq!(got, vec![1, 4, 7, 10]);
        // Layer 0: one step; residue-2 rows are dropped.
        let mut got = drain_small_range(&idx, TreeNode { range: SaRange::inclusive(1, 4), layer: 0 }).unwrap();
        got.sort_unstable();
        assert_eq!(got, vec![0, 4]);
    }

    #[test]
    fn forced_drain_plus_early_leaf_covers_all() {
        let idx = reference();
        let mut tree = FmTree::new(&idx, traced(UNBOUNDED)).unwrap();
        let r = tree.locate(&pat("a"));
        assert_eq!(r.sorted_positions(), vec![0, 4, 5, 8]);
        assert_eq!(r.stats.drains, 1);
        for (&x, m) in r.positions.iter().zip(&r.provenance) {
            assert_eq!(x % 3, m.residue(3));
        }
    }

    #[test]
    fn distance_two_has_only_root() {
        let text = PackedText::from_codes(&[0, 1, 0, 1, 1, 0, 0, 1, 0, 1, 0], 0).unwrap();
        let idx = FmIndex::build(&text, 2, SamplingStrategy::Value).unwrap();
        let mut tree = FmTree::new(&idx, traced(0)).unwrap();
        let r = tree.locate(&pat("a"));
        assert_eq!(r.sorted_positions(), naive_locate(&text, &pat("a")));
        assert_eq!(r.stats.nodes_expanded, 0);
        assert!(r.provenance.iter().all(|m| matches!(m, Mechanism::Layer(0) | Mechanism::EarlyLeaf)));
    }

    #[test]
    fn subscript_index_is_rejected() {
        let idx = FmIndex::build(&reference_text(), 3, SamplingStrategy::Subscript).unwrap();
        assert!(matches!(
            FmTree::new(&idx, FmTreeConfig::default()),
            Err(Error::UnsupportedStrategy { .. })
        ));
        assert!(early_leaf(&idx, SaRange::new(0, 10), 0).is_err());
    }

    #[test]
    fn injected_fault_is_observable() {
        let idx = reference();
        let config = FmTreeConfig {
            threshold: 0,
            fault: Some(InjectedFault::InclusiveSampleEnd),
            early_termination: false,
            ..FmTreeConfig::default()
        };
        // range("c") = [5, 7] and B[7] = 0, so the inclusive end over-reads.
        let r = FmTree::new(&idx, config).unwrap().locate(&pat("c"));
        assert_ne!(r.sorted_positions(), vec![1, 6, 7]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]
        #[test]
        fn matches_oracle_with_unique_residues(
            codes in prop::collection::vec(0u8..4, 1..500),
            pcodes in prop::collection::vec(0u8..4, 1..5),
            distance in 2usize..9,
            threshold in prop::sample::select(vec![0usize, 4, 16, UNBOUNDED]),
            early in any::<bool>(),
        ) {
            let text = PackedText::from_codes(&codes, 0).unwrap();
            let idx = FmIndex::build(&text, distance, SamplingStrategy::Value).unwrap();
            let p = Pattern::from_codes(pcodes).unwrap();
            let config = FmTreeConfig { threshold, early_termination: early, trace: true, fault: None };
            let r = FmTree::new(&idx, config).unwrap().locate(&p);
            prop_assert_eq!(r.sorted_positions(), naive_locate(&text, &p));
            prop_assert_eq!(r.positions.len(), r.provenance.len());
            for (&x, m) in r.positions.iter().zip(&r.provenance) {
                prop_assert_eq!(x % distance, m.residue(distance));
            }
        }
    }
}
