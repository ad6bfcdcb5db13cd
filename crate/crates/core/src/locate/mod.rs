//! Locating engines: one-by-one LF walks and the quadtree traversal.

mod fmtree;
mod original;

pub use fmtree::{
    drain_small_range, early_leaf, expand_node, locate_fmtree, retrieve_sampled, FmTree,
    FmTreeConfig, InjectedFault, TreeNode, DEFAULT_THRESHOLD, UNBOUNDED,
};
pub use original::locate_original;

use crate::error::Result;
use crate::fmindex::FmIndex;
use crate::textio::Pattern;

/// Which mechanism produced a position in an instrumented traversal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mechanism {
    /// Sampled value retrieved at tree layer `i`.
    Layer(usize),
    /// Found by scanning the range of the pattern minus its first character.
    EarlyLeaf,
    /// Found by an LF walk of `steps` from a node at `layer` below the
    /// branch-cut threshold.
    Drain { layer: usize, steps: usize },
}

impl Mechanism {
    /// Residue of `position mod D` this mechanism is responsible for.
    pub fn residue(&self, distance: usize) -> usize {
        match *self {
            Mechanism::Layer(layer) => layer,
            Mechanism::EarlyLeaf => distance - 1,
            Mechanism::Drain { layer, steps } => layer + steps,
        }
    }
}

/// Operation counters collected while locating.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LocateStats {
    pub lf_steps: u64,
    /// Longest LF walk for a single row.
    pub max_walk: usize,
    /// Single-character BWT rank evaluations.
    pub bwt_rank_ops: u64,
    /// Rank evaluations on the sampling bitmap.
    pub bit_rank_ops: u64,
    /// Grouped probes (all four characters at one row) issued by expansions.
    pub grouped_probes: u64,
    pub nodes_visited: u64,
    pub nodes_expanded: u64,
    pub drains: u64,
    /// BWT rank evaluations that computed the ranges of layer `i`.
    pub rank_ops_by_layer: Vec<u64>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LocateResult {
    /// Occurrence positions in discovery order.
    pub positions: Vec<usize>,
    /// Mechanism per position; filled only when tracing is enabled.
    pub provenance: Vec<Mechanism>,
    pub stats: LocateStats,
}

impl LocateResult {
    pub fn sorted_positions(&self) -> Vec<usize> {
        let mut p = self.positions.clone();
        p.sort_unstable();
        p
    }
}

/// Locating engine selection.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Engine {
    /// One-by-one LF walks under the index's own sampling strategy.
    Original,
    FmTree(FmTreeConfig),
}

impl FmIndex {
    /// Searches `pattern` and reports every occurrence position.
    ///
    /// ```
    /// use fmtree::{Engine, FmIndex, FmTreeConfig, PackedText, SamplingStrategy};
    ///
    /// let text = PackedText::from_codes(&[0, 1, 2, 3, 0, 0, 1, 1, 0], 0)?;
    /// let index = FmIndex::build(&text, 3, SamplingStrategy::Value)?;
    /// let hits = index.locate(&"a".parse()?, Engine::FmTree(FmTreeConfig::default()))?;
    /// assert_eq!(hits.sorted_positions(), vec![0, 4, 5, 8]);
    /// # Ok::<(), fmtree::Error>(())
    /// ```
    pub fn locate(&self, pattern: &Pattern, engine: Engine) -> Result<LocateResult> {
        match engine {
            Engine::Original => Ok(locate_original(self, self.backward_search(pattern).range)),
            Engine::FmTree(config) => Ok(FmTree::new(self, config)?.locate(pattern)),
        }
    }
}
