//! Binary index format.
//!
//! All integers are little-endian. Layout:
//!
//! ```text
//! header   magic "FMTI" | version u32 | n u64 | D u32 | strategy u8
//!          | sentinel_row u64 | seed u64 | C 5 x u64 | source digest 32 bytes
//! bwt      block count u64 | 2 x u64 payload per block
//!          | 4 x u32 counts per block | superblock count u64 | 4 x u64 per superblock
//! bitmap   (value sampling only) word count u64 | words | group count u64 | groups
//! ssa      entry count u64 | entries (u32 if n < 2^32, else u64)
//! trailer  CRC-32 u32 of every preceding byte
//! ```

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{FormatError, Result};
use crate::positions::Positions;
use crate::rank::{BitRankIndex, Block, BwtRankIndex, BLOCKS_PER_SUPERBLOCK, BLOCK_ROWS};

use super::{BuildMetadata, FmIndex, SampledSuffixArray, SamplingStrategy};

pub const MAGIC: [u8; 4] = *b"FMTI";
pub const FORMAT_VERSION: u32 = 1;

const CHUNK: usize = 1 << 16;

struct CrcWriter<W> {
    inner: W,
    crc: crc32fast::Hasher,
    written: u64,
}

impl<W: Write> CrcWriter<W> {
    fn put(&mut self, bytes: &[u8]) -> io::Result<()> {
        self.crc.update(bytes);
        self.written += bytes.len() as u64;
        self.inner.write_all(bytes)
    }

    fn u8(&mut self, v: u8) -> io::Result<()> {
        self.put(&[v])
    }

    fn u32(&mut self, v: u32) -> io::Result<()> {
        self.put(&v.to_le_bytes())
    }

    fn u64(&mut self, v: u64) -> io::Result<()> {
        self.put(&v.to_le_bytes())
    }

    fn u64s(&mut self, vals: impl IntoIterator<Item = u64>) -> io::Result<()> {
        let mut buf = Vec::with_capacity(CHUNK * 8);
        for v in vals {
            buf.extend_from_slice(&v.to_le_bytes());
            if buf.len() >= CHUNK * 8 {
                self.put(&buf)?;
                buf.clear();
            }
        }
        self.put(&buf)
    }

    fn u32s(&mut self, vals: impl IntoIterator<Item = u32>) -> io::Result<()> {
        let mut buf = Vec::with_capacity(CHUNK * 4);
        for v in vals {
            buf.extend_from_slice(&v.to_le_bytes());
            if buf.len() >= CHUNK * 4 {
                self.put(&buf)?;
                buf.clear();
            }
        }
        self.put(&buf)
    }
}

struct CrcReader<R> {
    inner: R,
    crc: crc32fast::Hasher,
}

impl<R: Read> CrcReader<R> {
    fn take(&mut self, buf: &mut [u8], what: &'static str) -> Result<(), FormatError> {
        self.inner.read_exact(buf).map_err(|e| match e.kind() {
            io::ErrorKind::UnexpectedEof => FormatError::Truncated(what),
            _ => FormatError::Io(e),
        })?;
        self.crc.update(buf);
        Ok(())
    }

    fn array<const N: usize>(&mut self, what: &'static str) -> Result<[u8; N], FormatError> {
        let mut buf = [0u8; N];
        self.take(&mut buf, what)?;
        Ok(buf)
    }

    fn u8(&mut self, what: &'static str) -> Result<u8, FormatError> {
        Ok(self.array::<1>(what)?[0])
    }

    fn u32(&mut self, what: &'static str) -> Result<u32, FormatError> {
        Ok(u32::from_le_bytes(self.array(what)?))
    }

    fn u64(&mut self, what: &'static str) -> Result<u64, FormatError> {
        Ok(u64::from_le_bytes(self.array(what)?))
    }

    /// Reads `count` fixed-width values in bounded chunks so a corrupt count
    /// fails on truncation instead of allocating.
    fn values<T, const W: usize>(
        &mut self,
        count: usize,
        what: &'static str,
        decode: fn([u8; W]) -> T,
    ) -> Result<Vec<T>, FormatError> {
        let mut out = Vec::with_capacity(count.min(CHUNK));
        let mut buf = vec![0u8; CHUNK * W];
        let mut left = count;
        while left > 0 {
            let take = left.min(CHUNK);
            let bytes = &mut buf[..take * W];
            self.take(bytes, what)?;
            out.extend(
                bytes
                    .chunks_exact(W)
                    .map(|c| decode(c.try_into().expect("chunk width"))),
            );
            left -= take;
        }
        Ok(out)
    }

    fn u64s(&mut self, count: usize, what: &'static str) -> Result<Vec<u64>, FormatError> {
        self.values(count, what, u64::from_le_bytes)
    }

    fn u32s(&mut self, count: usize, what: &'static str) -> Result<Vec<u32>, FormatError> {
        self.values(count, what, u32::from_le_bytes)
    }
}

fn inconsistent(msg: impl Into<String>) -> FormatError {
    FormatError::Inconsistent(msg.into())
}

fn expect_len(what: &str, found: u64, expected: usize) -> Result<usize, FormatError> {
    if found != expected as u64 {
        return Err(inconsistent(format!(
            "{what}: found {found} entries, expected {expected}"
        )));
    }
    Ok(expected)
}

impl FmIndex {
    /// Writes the index and returns the number of bytes written.
    pub fn write_to<W: Write>(&self, sink: W) -> Result<u64, FormatError> {
        let mut w = CrcWriter {
            inner: sink,
            crc: crc32fast::Hasher::new(),
            written: 0,
        };
        let bwt = &self.bwt;
        let samples = &self.samples;

        w.put(&MAGIC)?;
        w.u32(FORMAT_VERSION)?;
        w.u64(bwt.len as u64)?;
        w.u32(samples.distance as u32)?;
        w.u8(match samples.strategy {
            SamplingStrategy::Value => 0,
            SamplingStrategy::Subscript => 1,
        })?;
        w.u64(bwt.sentinel_row as u64)?;
        w.u64(self.meta.seed)?;
        w.u64s(bwt.c.iter().map(|&c| c as u64))?;
        w.put(&self.meta.source_digest)?;

        w.u64(bwt.blocks.len() as u64)?;
        w.u64s(bwt.blocks.iter().flat_map(|b| b.bits))?;
        w.u32s(bwt.blocks.iter().flat_map(|b| b.counts))?;
        w.u64(bwt.superblocks.len() as u64)?;
        w.u64s(bwt.superblocks.iter().flatten().copied())?;

        if let Some(marks) = &samples.marks {
            w.u64(marks.words.len() as u64)?;
            w.u64s(marks.words.iter().copied())?;
            w.u64(marks.groups.len() as u64)?;
            w.u64s(marks.groups.iter().copied())?;
        }

        w.u64(samples.values.len() as u64)?;
        match &samples.values {
            Positions::Narrow(v) => w.u32s(v.iter().copied())?,
            Positions::Wide(v) => w.u64s(v.iter().copied())?,
        }

        let crc = w.crc.clone().finalize();
        w.inner.write_all(&crc.to_le_bytes())?;
        w.inner.flush()?;
        Ok(w.written + 4)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to memory");
        buf
    }

    /// Size of the serialized form in bytes.
    pub fn serialized_size(&self) -> u64 {
        self.write_to(io::sink()).expect("writing to sink")
    }

    pub fn read_from<R: Read>(source: R) -> Result<Self, FormatError> {
        let mut r = CrcReader {
            inner: source,
            crc: crc32fast::Hasher::new(),
        };

        let magic: [u8; 4] = r.array("magic")?;
        if magic != MAGIC {
            return Err(FormatError::BadMagic(magic));
        }
        let version = r.u32("version")?;
        if version != FORMAT_VERSION {
            return Err(FormatError::UnsupportedVersion {
                found: version,
                expected: FORMAT_VERSION,
            });
        }
        let n = r.u64("text length")?;
        let distance = r.u32("sampling distance")? as usize;
        let strategy = match r.u8("strategy")? {
            0 => SamplingStrategy::Value,
            1 => SamplingStrategy::Subscript,
            other => return Err(inconsistent(format!("unknown strategy tag {other}"))),
        };
        let sentinel_row = r.u64("sentinel row")?;
        let seed = r.u64("seed")?;
        let mut c = [0usize; 5];
        for v in c.iter_mut() {
            *v = r.u64("C array")? as usize;
        }
        let source_digest: [u8; 32] = r.array("source digest")?;

        if n == 0 || n > usize::MAX as u64 / 2 {
            return Err(inconsistent(format!("text length {n}")));
        }
        let n = n as usize;
        if sentinel_row >= n as u64 {
            return Err(inconsistent("sentinel row out of range"));
        }
        if distance < 2 {
            return Err(inconsistent(format!("sampling distance {distance}")));
        }

        let num_blocks = n / BLOCK_ROWS + 1;
        let found = r.u64("block count")?;
        expect_len("blocks", found, num_blocks)?;
        let bits = r.u64s(num_blocks * 2, "bwt payload")?;
        let counts = r.u32s(num_blocks * 4, "block counts")?;
        let blocks: Vec<Block> = bits
            .chunks_exact(2)
            .zip(counts.chunks_exact(4))
            .map(|(b, c)| Block {
                bits: [b[0], b[1]],
                counts: [c[0], c[1], c[2], c[3]],
            })
            .collect();
        let num_super = (num_blocks - 1) / BLOCKS_PER_SUPERBLOCK + 1;
        let found = r.u64("superblock count")?;
        expect_len("superblocks", found, num_super)?;
        let superblocks: Vec<[u64; 4]> = r
            .u64s(num_super * 4, "superblocks")?
            .chunks_exact(4)
            .map(|s| [s[0], s[1], s[2], s[3]])
            .collect();

        let marks = match strategy {
            SamplingStrategy::Value => {
                let num_words = n / 64 + 1;
                let found = r.u64("bitmap word count")?;
                expect_len("bitmap words", found, num_words)?;
                let words = r.u64s(num_words, "bitmap")?;
                let num_groups = (num_words - 1) / 8 + 1;
                let found = r.u64("bitmap group count")?;
                expect_len("bitmap groups", found, num_groups)?;
                let groups = r.u64s(num_groups, "bitmap directory")?;
                Some(BitRankIndex {
                    words,
                    groups,
                    len: n,
                })
            }
            SamplingStrategy::Subscript => None,
        };

        let expected_samples = match &marks {
            Some(m) => m.count_ones(),
            None => n.div_ceil(distance),
        };
        let found = r.u64("sample count")?;
        let count = expect_len("samples", found, expected_samples)?;
        let values = if Positions::needs_wide(n) {
            Positions::Wide(r.u64s(count, "samples")?)
        } else {
            Positions::Narrow(r.u32s(count, "samples")?)
        };

        let computed = r.crc.clone().finalize();
        let mut trailer = [0u8; 4];
        r.inner.read_exact(&mut trailer).map_err(|e| match e.kind() {
            io::ErrorKind::UnexpectedEof => FormatError::Truncated("checksum"),
            _ => FormatError::Io(e),
        })?;
        let stored = u32::from_le_bytes(trailer);
        if stored != computed {
            return Err(FormatError::ChecksumMismatch { stored, computed });
        }

        if c[0] != 0 || c[1] != 1 || c.windows(2).any(|w| w[0] > w[1]) || c[4] > n {
            return Err(inconsistent(format!("C array {c:?}")));
        }

        let bwt = BwtRankIndex {
            blocks,
            superblocks,
            sentinel_row: sentinel_row as usize,
            len: n,
            c,
        };
        let samples = SampledSuffixArray {
            strategy,
            distance,
            values,
            marks,
        };
        Ok(FmIndex::from_parts(
            bwt,
            samples,
            BuildMetadata {
                seed,
                source_digest,
            },
        ))
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, FormatError> {
        Self::read_from(bytes)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<u64> {
        let file = File::create(path)?;
        Ok(self.write_to(BufWriter::new(file))?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let file = File::open(path)?;
        Ok(Self::read_from(BufReader::new(file))?)
    }
}
