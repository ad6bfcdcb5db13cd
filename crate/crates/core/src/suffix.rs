//! Suffix array construction by induced sorting, and BWT derivation.

use std::fmt;

use crate::positions::Positions;
use crate::textio::{PackedText, ALPHABET};

/// Positions of all suffixes of a text (sentinel included) in lexicographic
/// order. Only needed while an index is being built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuffixArray {
    entries: Positions,
}

impl SuffixArray {
    #[inline]
    pub fn get(&self, i: usize) -> usize {
        self.entries.get(i)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &Positions {
        &self.entries
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.entries.to_vec()
    }
}

/// Builds the suffix array of `text` with the sentinel as the unique smallest
/// character. Entries are 32-bit whenever `n < 2^32`.
pub fn build_suffix_array(text: &PackedText) -> SuffixArray {
    build_with_width(text, Positions::needs_wide(text.len()))
}

pub(crate) fn build_with_width(text: &PackedText, wide: bool) -> SuffixArray {
    let mut symbols: Vec<u8> = Vec::with_capacity(text.len());
    symbols.extend(text.codes().map(|c| c + 1));
    symbols.push(0);
    let entries = if wide {
        let mut sa = vec![u64::NONE; symbols.len()];
        sais(&symbols, &mut sa, 5);
        Positions::Wide(sa)
    } else {
        let mut sa = vec![u32::NONE; symbols.len()];
        sais(&symbols, &mut sa, 5);
        Positions::Narrow(sa)
    };
    SuffixArray { entries }
}

trait Index: Symbol {
    const NONE: Self;
    fn from_usize(v: usize) -> Self;
    fn to_usize(self) -> usize;
}

impl Index for u32 {
    const NONE: Self = u32::MAX;
    #[inline]
    fn from_usize(v: usize) -> Self {
        v as u32
    }
    #[inline]
    fn to_usize(self) -> usize {
        self as usize
    }
}

impl Index for u64 {
    const NONE: Self = u64::MAX;
    #[inline]
    fn from_usize(v: usize) -> Self {
        v as u64
    }
    #[inline]
    fn to_usize(self) -> usize {
        self as usize
    }
}

trait Symbol: Copy + Ord {
    fn rank(self) -> usize;
}

impl Symbol for u8 {
    #[inline]
    fn rank(self) -> usize {
        self as usize
    }
}

impl Symbol for u32 {
    #[inline]
    fn rank(self) -> usize {
        self as usize
    }
}

impl Symbol for u64 {
    #[inline]
    fn rank(self) -> usize {
        self as usize
    }
}

fn bucket_bounds<S: Symbol>(text: &[S], alphabet: usize, tails: bool) -> Vec<usize> {
    let mut counts = vec![0usize; alphabet];
    for &c in text {
        counts[c.rank()] += 1;
    }
    let mut sum = 0;
    for c in counts.iter_mut() {
        sum += *c;
        *c = if tails { sum } else { sum - *c };
    }
    counts
}

fn induce<S: Symbol, I: Index>(text: &[S], sa: &mut [I], stype: &[bool], alphabet: usize) {
    let n = text.len();
    let mut heads = bucket_bounds(text, alphabet, false);
    for i in 0..n {
        let j = sa[i];
        if j == I::NONE {
            continue;
        }
        let j = j.to_usize();
        if j > 0 && !stype[j - 1] {
            let b = text[j - 1].rank();
            sa[heads[b]] = I::from_usize(j - 1);
            heads[b] += 1;
        }
    }
    let mut tails = bucket_bounds(text, alphabet, true);
    for i in (0..n).rev() {
        let j = sa[i];
        if j == I::NONE {
            continue;
        }
        let j = j.to_usize();
        if j > 0 && stype[j - 1] {
            let b = text[j - 1].rank();
            tails[b] -= 1;
            sa[tails[b]] = I::from_usize(j - 1);
        }
    }
}

/// SA-IS over `text`, whose last symbol must be the unique minimum.
fn sais<S: Symbol, I: Index>(text: &[S], sa: &mut [I], alphabet: usize) {
    let n = text.len();
    debug_assert_eq!(sa.len(), n);
    if n == 1 {
        sa[0] = I::from_usize(0);
        return;
    }

    let mut stype = vec![false; n];
    stype[n - 1] = true;
    for i in (0..n - 1).rev() {
        stype[i] = text[i] < text[i + 1] || (text[i] == text[i + 1] && stype[i + 1]);
    }
    let is_lms = |i: usize| i > 0 && stype[i] && !stype[i - 1];

    // Stage 1: sort LMS substrings.
    sa.fill(I::NONE);
    let mut tails = bucket_bounds(text, alphabet, true);
    for i in (1..n).rev() {
        if is_lms(i) {
            let b = text[i].rank();
            tails[b] -= 1;
            sa[tails[b]] = I::from_usize(i);
        }
    }
    induce(text, sa, &stype, alphabet);

    let mut m = 0;
    for i in 0..n {
        let j = sa[i];
        if is_lms(j.to_usize()) {
            sa[m] = j;
            m += 1;
        }
    }

    // Name LMS substrings; names go to sa[m + pos / 2].
    sa[m..].fill(I::NONE);
    let mut name = 0usize;
    let mut prev: Option<usize> = None;
    for i in 0..m {
        let pos = sa[i].to_usize();
        let same = match prev {
            Some(p) => lms_substrings_equal(text, &stype, p, pos),
            None => false,
        };
        if !same {
            name += 1;
        }
        prev = Some(pos);
        sa[m + pos / 2] = I::from_usize(name - 1);
    }
    let mut j = n;
    for i in (m..n).rev() {
        if sa[i] != I::NONE {
            j -= 1;
            sa[j] = sa[i];
        }
    }

    // Stage 2: sort the reduced string.
    {
        let (head, reduced) = sa.split_at_mut(n - m);
        let sa1 = &mut head[..m];
        if name < m {
            let s1: Vec<I> = reduced.to_vec();
            sais(&s1, sa1, name);
        } else {
            for (i, &c) in reduced.iter().enumerate() {
                sa1[c.to_usize()] = I::from_usize(i);
            }
        }
        let mut k = 0;
        for i in 1..n {
            if is_lms(i) {
                reduced[k] = I::from_usize(i);
                k += 1;
            }
        }
        for v in sa1.iter_mut() {
            *v = reduced[v.to_usize()];
        }
    }

    // Stage 3: induce the full order from sorted LMS suffixes.
    let sorted_lms: Vec<I> = sa[..m].to_vec();
    sa.fill(I::NONE);
    let mut tails = bucket_bounds(text, alphabet, true);
    for &p in sorted_lms.iter().rev() {
        let b = text[p.to_usize()].rank();
        tails[b] -= 1;
        sa[tails[b]] = p;
    }
    induce(text, sa, &stype, alphabet);
}

fn lms_substrings_equal<S: Symbol>(text: &[S], stype: &[bool], p: usize, q: usize) -> bool {
    let n = text.len();
    if p == n - 1 || q == n - 1 {
        return p == q;
    }
    let is_lms = |i: usize| i > 0 && stype[i] && !stype[i - 1];
    let mut d = 0;
    loop {
        if text[p + d] != text[q + d] || stype[p + d] != stype[q + d] {
            return false;
        }
        if d > 0 {
            let (pl, ql) = (is_lms(p + d), is_lms(q + d));
            if pl || ql {
                return pl && ql;
            }
        }
        d += 1;
    }
}

/// The last column of the sorted rotation matrix.
///
/// `codes` has one slot per row; the slot at `sentinel_row` (the row whose
/// suffix starts at position 0) holds code 0 as a placeholder for `$`.
#[derive(Clone, PartialEq, Eq)]
pub struct BwtString {
    codes: Vec<u8>,
    sentinel_row: usize,
}

impl BwtString {
    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn sentinel_row(&self) -> usize {
        self.sentinel_row
    }

    /// Character at row `i`, `None` for the sentinel.
    pub fn get(&self, i: usize) -> Option<u8> {
        (i != self.sentinel_row).then(|| self.codes[i])
    }

    /// Raw row codes including the placeholder at `sentinel_row`.
    pub fn raw_codes(&self) -> &[u8] {
        &self.codes
    }
}

impl fmt::Display for BwtString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (0..self.len())
            .map(|i| self.get(i).map_or('$', |c| ALPHABET[c as usize] as char))
            .collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for BwtString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len() <= 64 {
            write!(f, "BwtString({self})")
        } else {
            write!(f, "BwtString(n={}, sentinel_row={})", self.len(), self.sentinel_row)
        }
    }
}

/// `BWT[i] = T[SA[i] - 1]`, with `$` where `SA[i] = 0`.
pub fn derive_bwt(text: &PackedText, sa: &SuffixArray) -> BwtString {
    assert_eq!(text.len(), sa.len(), "suffix array does not match text");
    let n = text.len();
    let mut codes = Vec::with_capacity(n);
    let mut sentinel_row = usize::MAX;
    for i in 0..n {
        match sa.get(i) {
            0 => {
                sentinel_row = i;
                codes.push(0);
            }
            p => codes.push(text.code(p - 1)),
        }
    }
    debug_assert!(sentinel_row < n);
    BwtString {
        codes,
        sentinel_row,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::naive_suffix_array;
    use proptest::prelude::*;

    fn text(s: &str) -> PackedText {
        let codes: Vec<u8> = s.bytes().map(|b| crate::textio::encode_base(b).unwrap()).collect();
        PackedText::from_codes(&codes, 0).unwrap()
    }

    #[test]
    fn reference_suffix_array() {
        let t = text("acgtaacca");
        assert_eq!(build_suffix_array(&t).to_vec(), vec![9, 8, 4, 5, 0, 7, 6, 1, 2, 3]);
        assert_eq!(naive_suffix_array(&t), vec![9, 8, 4, 5, 0, 7, 6, 1, 2, 3]);
    }

    #[test]
    fn tiny_texts() {
        assert_eq!(build_suffix_array(&text("a")).to_vec(), vec![1, 0]);
        assert_eq!(build_suffix_array(&text("")).to_vec(), vec![0]);
        assert_eq!(build_suffix_array(&text("aaaa")).to_vec(), vec![4, 3, 2, 1, 0]);
    }

    #[test]
    fn reference_bwt() {
        let t = text("acgtaacca");
        let bwt = derive_bwt(&t, &build_suffix_array(&t));
        assert_eq!(bwt.to_string(), "acta$caacg");
        assert_eq!(bwt.sentinel_row(), 4);

        let t = text("a");
        let bwt = derive_bwt(&t, &build_suffix_array(&t));
        assert_eq!(bwt.to_string(), "a$");
        assert_eq!(bwt.sentinel_row(), 1);
    }

    #[test]
    fn wide_entries_match_narrow() {
        let t = text("acgtaaccagattacagattaca");
        let narrow = build_with_width(&t, false);
        let wide = build_with_width(&t, true);
        assert!(wide.entries().is_wide());
        assert_eq!(narrow.to_vec(), wide.to_vec());
    }

    #[test]
    fn repetitive_texts_match_oracle() {
        for s in ["acacacacacacac", "aaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaac", "tttttttttttttttttt", "gatgatgatgatgatga"] {
            let t = text(s);
            assert_eq!(build_suffix_array(&t).to_vec(), naive_suffix_array(&t), "{s}");
        }
    }

    fn codes_strategy(max: usize) -> impl Strategy<Value = Vec<u8>> {
        prop_oneof![
            prop::collection::vec(0u8..4, 0..max),
            prop::collection::vec(0u8..2, 0..max),
        ]
    }

    proptest! {
        #[test]
        fn suffix_array_matches_comparison_sort(codes in codes_strategy(200)) {
            let t = PackedText::from_codes(&codes, 0).unwrap();
            let sa = build_suffix_array(&t);
            prop_assert_eq!(sa.get(0), t.len() - 1);
            prop_assert_eq!(sa.to_vec(), naive_suffix_array(&t));
        }

        #[test]
        fn bwt_is_a_permutation_of_text(codes in codes_strategy(200)) {
            let t = PackedText::from_codes(&codes, 0).unwrap();
            let bwt = derive_bwt(&t, &build_suffix_array(&t));
            let mut from_bwt: Vec<u8> = (0..bwt.len()).filter_map(|i| bwt.get(i)).collect();
            let mut from_text = codes.clone();
            from_bwt.sort_unstable();
            from_text.sort_unstable();
            prop_assert_eq!(from_bwt, from_text);
        }
    }

    #[test]
    fn larger_random_text_matches_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for n in [1000usize, 4096, 10_000] {
            let codes: Vec<u8> = (0..n).map(|_| rng.random_range(0..4)).collect();
            let t = PackedText::from_codes(&codes, 0).unwrap();
            assert_eq!(build_suffix_array(&t).to_vec(), naive_suffix_array(&t));
        }
    }
}
