//! Brute-force reference answers, independent of the index.
//!
//! Two routes are provided and cross-checked against each other: a sliding
//! window scan over the text, and binary search over a comparison-sorted
//! suffix array.

use std::collections::HashMap;

use crate::textio::{PackedText, Pattern};

/// All `x` with `text[x .. x + |P|] = P`, ascending.
pub fn naive_locate(text: &PackedText, pattern: &Pattern) -> Vec<usize> {
    let codes = text.to_codes();
    let p = pattern.codes();
    if p.len() > codes.len() {
        return Vec::new();
    }
    codes
        .windows(p.len())
        .enumerate()
        .filter(|(_, w)| *w == p)
        .map(|(x, _)| x)
        .collect()
}

pub fn naive_count(text: &PackedText, pattern: &Pattern) -> usize {
    naive_locate(text, pattern).len()
}

/// Occurrence lists for every distinct substring of length `1..=max_len`,
/// gathered by one window scan per length.
pub fn all_substring_occurrences(
    text: &PackedText,
    max_len: usize,
) -> HashMap<Vec<u8>, Vec<usize>> {
    let codes = text.to_codes();
    let mut out: HashMap<Vec<u8>, Vec<usize>> = HashMap::new();
    for len in 1..=max_len.min(codes.len()) {
        for (x, w) in codes.windows(len).enumerate() {
            out.entry(w.to_vec()).or_default().push(x);
        }
    }
    out
}

/// Sorts all suffixes by direct comparison. The sentinel is the smallest
/// character, so a proper prefix sorts first.
pub fn naive_suffix_array(text: &PackedText) -> Vec<usize> {
    let codes = text.to_codes();
    let mut sa: Vec<usize> = (0..text.len()).collect();
    sa.sort_by(|&a, &b| codes[a..].cmp(&codes[b..]));
    sa
}

/// Second oracle: binary search for the block of suffixes prefixed by the
/// pattern in a comparison-sorted suffix array.
pub fn suffix_sort_locate(text: &PackedText, sa: &[usize], pattern: &Pattern) -> Vec<usize> {
    let codes = text.to_codes();
    let p = pattern.codes();
    let prefix = |pos: usize| &codes[pos..(pos + p.len()).min(codes.len())];
    let lo = sa.partition_point(|&pos| prefix(pos) < p);
    let hi = sa.partition_point(|&pos| prefix(pos) <= p);
    let mut out = sa[lo..hi].to_vec();
    out.sort_unstable();
    out
}
