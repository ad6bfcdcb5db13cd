//! Constant-time rank over the 2-bit packed BWT and over the sampling bitmap.
//!
//! The BWT is cut into blocks of 64 rows. Each block stores its 128-bit
//! payload next to four 32-bit counts of how often each character occurs
//! between the start of its superblock and the start of the block, so a rank
//! query touches one 32-byte block plus one superblock entry. Superblocks hold
//! 64-bit absolute counts every 2^16 rows. In-block counts come from
//! popcounts over masked 2-bit lanes.
//!
//! Ranks are exclusive: `rank(s, l)` counts occurrences in rows `0..l`.

use crate::error::{Error, Result};
use crate::suffix::BwtString;

pub const BLOCK_ROWS: usize = 64;
pub const BLOCKS_PER_SUPERBLOCK: usize = 1024;
pub const SUPERBLOCK_ROWS: usize = BLOCK_ROWS * BLOCKS_PER_SUPERBLOCK;

const LO_LANES: u64 = 0x5555_5555_5555_5555;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
#[repr(C, align(32))]
pub(crate) struct Block {
    pub(crate) counts: [u32; 4],
    pub(crate) bits: [u64; 2],
}

/// Counts of c, g, t among the first `chars` lanes of `word` (`chars <= 32`).
#[inline]
fn lane_counts(word: u64, chars: usize) -> [u32; 3] {
    let mask = if chars >= 32 {
        LO_LANES
    } else {
        LO_LANES & ((1u64 << (2 * chars)) - 1)
    };
    let lo = word & mask;
    let hi = (word >> 1) & mask;
    [
        (lo & !hi).count_ones(),
        (hi & !lo).count_ones(),
        (lo & hi).count_ones(),
    ]
}

impl Block {
    /// Occurrences of each code among the first `r` rows of this block,
    /// counting placeholder slots as `a`.
    #[inline]
    fn prefix_counts(&self, r: usize) -> [u32; 4] {
        let [c0, g0, t0] = lane_counts(self.bits[0], r.min(32));
        let [c1, g1, t1] = if r > 32 {
            lane_counts(self.bits[1], r - 32)
        } else {
            [0; 3]
        };
        let (c, g, t) = (c0 + c1, g0 + g1, t0 + t1);
        [r as u32 - c - g - t, c, g, t]
    }

    #[inline]
    fn code(&self, r: usize) -> u8 {
        ((self.bits[r / 32] >> (2 * (r % 32))) & 3) as u8
    }
}

/// Packed BWT with a C array and a blocked rank directory.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BwtRankIndex {
    pub(crate) blocks: Vec<Block>,
    pub(crate) superblocks: Vec<[u64; 4]>,
    pub(crate) sentinel_row: usize,
    pub(crate) len: usize,
    /// `c[0]` is for `$`, `c[1..5]` for a, c, g, t.
    pub(crate) c: [usize; 5],
}

impl BwtRankIndex {
    pub fn build(bwt: &BwtString) -> Self {
        let n = bwt.len();
        let codes = bwt.raw_codes();
        let num_blocks = n / BLOCK_ROWS + 1;
        let mut blocks = vec![Block::default(); num_blocks];
        let mut superblocks = Vec::with_capacity(num_blocks / BLOCKS_PER_SUPERBLOCK + 1);

        let mut total = [0u64; 4];
        let mut since_super = [0u32; 4];
        for (b, block) in blocks.iter_mut().enumerate() {
            if b % BLOCKS_PER_SUPERBLOCK == 0 {
                superblocks.push(total);
                since_super = [0; 4];
            }
            block.counts = since_super;
            let start = b * BLOCK_ROWS;
            let end = (start + BLOCK_ROWS).min(n);
            for (r, &code) in codes[start.min(n)..end].iter().enumerate() {
                block.bits[r / 32] |= (code as u64) << (2 * (r % 32));
                since_super[code as usize] += 1;
                total[code as usize] += 1;
            }
        }

        // The placeholder at the sentinel row was counted as an `a`.
        total[0] -= 1;
        let mut c = [0usize; 5];
        c[1] = 1;
        for s in 0..3 {
            c[s + 2] = c[s + 1] + total[s] as usize;
        }
        debug_assert_eq!(c[4] + total[3] as usize, n);

        BwtRankIndex {
            blocks,
            superblocks,
            sentinel_row: bwt.sentinel_row(),
            len: n,
            c,
        }
    }

    /// Number of rows, `n`.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn sentinel_row(&self) -> usize {
        self.sentinel_row
    }

    /// The C array: index 0 is `$`, 1..5 are a, c, g, t.
    pub fn c_array(&self) -> [usize; 5] {
        self.c
    }

    /// Number of text characters smaller than `code`.
    #[inline]
    pub fn c(&self, code: u8) -> usize {
        self.c[code as usize + 1]
    }

    /// One past the last row whose suffix starts with `code`.
    #[inline]
    pub fn c_next(&self, code: u8) -> usize {
        if code == 3 {
            self.len
        } else {
            self.c[code as usize + 2]
        }
    }

    /// Exclusive rank of every character at row `l`, `l <= n`.
    #[inline]
    pub fn rank_all(&self, l: usize) -> [usize; 4] {
        debug_assert!(l <= self.len);
        let block = &self.blocks[l / BLOCK_ROWS];
        let sup = &self.superblocks[l / SUPERBLOCK_ROWS];
        let inner = block.prefix_counts(l % BLOCK_ROWS);
        let mut out = [0usize; 4];
        for s in 0..4 {
            out[s] = (sup[s] + (block.counts[s] + inner[s]) as u64) as usize;
        }
        if l > self.sentinel_row {
            out[0] -= 1;
        }
        out
    }

    /// Exclusive rank of `code` at row `l`, `l <= n`.
    #[inline]
    pub fn rank(&self, code: u8, l: usize) -> usize {
        self.rank_all(l)[code as usize]
    }

    /// Checked form of [`rank`](Self::rank).
    pub fn rank_char(&self, code: u8, l: usize) -> Result<usize> {
        if l > self.len {
            return Err(Error::OutOfRange {
                index: l,
                bound: self.len + 1,
            });
        }
        if code > 3 {
            return Err(Error::InvalidArgument(format!("code {code} is not 2-bit")));
        }
        Ok(self.rank(code, l))
    }

    /// Character at row `l`, `None` for the sentinel row.
    #[inline]
    pub fn get(&self, l: usize) -> Option<u8> {
        debug_assert!(l < self.len);
        if l == self.sentinel_row {
            None
        } else {
            Some(self.blocks[l / BLOCK_ROWS].code(l % BLOCK_ROWS))
        }
    }

    /// Checked form of [`get`](Self::get); `Ok(None)` is the sentinel.
    pub fn access(&self, l: usize) -> Result<Option<u8>> {
        if l >= self.len {
            return Err(Error::OutOfRange {
                index: l,
                bound: self.len,
            });
        }
        Ok(self.get(l))
    }

    /// LF-mapping of row `l`; `None` at the sentinel row, whose image is row 0.
    #[inline]
    pub fn lf(&self, l: usize) -> Option<usize> {
        if l == self.sentinel_row {
            return None;
        }
        let block = &self.blocks[l / BLOCK_ROWS];
        let r = l % BLOCK_ROWS;
        let code = block.code(r) as usize;
        let inner = block.prefix_counts(r)[code];
        let sup = self.superblocks[l / SUPERBLOCK_ROWS][code];
        let mut rank = (sup + (block.counts[code] + inner) as u64) as usize;
        if code == 0 && l > self.sentinel_row {
            rank -= 1;
        }
        Some(self.c[code + 1] + rank)
    }

    /// Heap bytes used by the structure.
    pub fn size_in_bytes(&self) -> usize {
        self.blocks.len() * std::mem::size_of::<Block>() + self.superblocks.len() * 32
    }
}

const WORDS_PER_GROUP: usize = 8;

/// A bitmap with a cumulative ones count every 512 bits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitRankIndex {
    pub(crate) words: Vec<u64>,
    pub(crate) groups: Vec<u64>,
    pub(crate) len: usize,
}

impl BitRankIndex {
    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut words = Vec::new();
        let mut len = 0;
        for bit in bits {
            if len % 64 == 0 {
                words.push(0u64);
            }
            if bit {
                *words.last_mut().unwrap() |= 1 << (len % 64);
            }
            len += 1;
        }
        Self::from_words(words, len)
    }

    /// Builds from packed words (bit `i` at `words[i / 64] >> (i % 64)`).
    pub fn from_words(mut words: Vec<u64>, len: usize) -> Self {
        words.resize(len / 64 + 1, 0);
        if !len.is_multiple_of(64) {
            let last = len / 64;
            words[last] &= (1u64 << (len % 64)) - 1;
        }
        let mut groups = Vec::with_capacity(words.len() / WORDS_PER_GROUP + 1);
        let mut total = 0u64;
        for (i, w) in words.iter().enumerate() {
            if i % WORDS_PER_GROUP == 0 {
                groups.push(total);
            }
            total += w.count_ones() as u64;
        }
        BitRankIndex { words, groups, len }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    /// Number of ones in `0..l`, `l <= len`.
    #[inline]
    pub fn rank1(&self, l: usize) -> usize {
        debug_assert!(l <= self.len);
        let w = l / 64;
        let g = w / WORDS_PER_GROUP;
        let mut count = self.groups[g];
        for word in &self.words[g * WORDS_PER_GROUP..w] {
            count += word.count_ones() as u64;
        }
        let partial = self.words[w] & ((1u64 << (l % 64)) - 1);
        count as usize + partial.count_ones() as usize
    }

    /// Checked form of [`rank1`](Self::rank1).
    pub fn rank_one(&self, l: usize) -> Result<usize> {
        if l > self.len {
            return Err(Error::OutOfRange {
                index: l,
                bound: self.len + 1,
            });
        }
        Ok(self.rank1(l))
    }

    pub fn count_ones(&self) -> usize {
        self.rank1(self.len)
    }

    /// Positions of set bits in `start..end`, in increasing order.
    pub fn ones_in(&self, start: usize, end: usize) -> impl Iterator<Item = usize> + '_ {
        debug_assert!(start <= end && end <= self.len);
        let first = start / 64;
        let last = if end == 0 { 0 } else { (end - 1) / 64 + 1 };
        (first..last.max(first)).flat_map(move |w| {
            let mut word = self.words[w];
            let base = w * 64;
            if base < start {
                word &= !0u64 << (start - base);
            }
            if base + 64 > end {
                word &= (1u64 << (end - base)) - 1;
            }
            std::iter::from_fn(move || {
                if word == 0 {
                    return None;
                }
                let bit = word.trailing_zeros() as usize;
                word &= word - 1;
                Some(base + bit)
            })
        })
    }

    pub fn size_in_bytes(&self) -> usize {
        (self.words.len() + self.groups.len()) * 8
    }
}
