use crate::fmindex::{FmIndex, SaRange};

use super::{LocateResult, LocateStats};

/// Resolves every row of `range` by walking LF until a sampled row.
///
/// Under value sampling a walk is at most `D - 1` steps. Under subscript
/// sampling it is unbounded but ends at row 0 at the latest. A walk that
/// reaches the sentinel row stops there, since that row holds position 0.
pub fn locate_original(index: &FmIndex, range: SaRange) -> LocateResult {
    let bwt = index.bwt();
    let samples = index.samples();
    let values = samples.values();
    let distance = samples.distance();
    let mut stats = LocateStats::default();
    let mut positions = Vec::with_capacity(range.len());

    for row in range.rows() {
        let mut j = row;
        let mut steps = 0usize;
        let position = loop {
            let sampled = match samples.marks() {
                Some(marks) => marks.get(j).then(|| {
                    stats.bit_rank_ops += 1;
                    values.get(marks.rank1(j))
                }),
                None => (j % distance == 0).then(|| values.get(j / distance)),
            };
            if let Some(v) = sampled {
                break v + steps;
            }
            match bwt.lf(j) {
                Some(next) => {
                    stats.bwt_rank_ops += 1;
                    j = next;
                    steps += 1;
                }
                None => break steps,
            }
        };
        stats.lf_steps += steps as u64;
        stats.max_walk = stats.max_walk.max(steps);
        positions.push(position);
    }

    LocateResult {
        positions,
        provenance: Vec::new(),
        stats,
    }
}
