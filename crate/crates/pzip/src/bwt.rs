//! Block-sorting compression pipeline.
//!
//! Forward path per block: Burrows-Wheeler transform, move-to-front, then
//! run-length coding, with canonical Huffman (see [`crate::huffman`]) over
//! the result. The BWT groups bytes that share a right-hand context, MTF
//! turns that local clustering into small rank values, and RLE collapses
//! the zero runs MTF produces, which is where the pipeline earns its keep
//! over plain Huffman.
//!
//! Rotation order comes from rank doubling over the cyclic string: ranks by
//! the first k characters are refined to 2k per round, so run-heavy and
//! periodic blocks sort in O(n log^2 n) instead of degenerating the way a
//! naive rotation comparison would. Equal rotations (fully periodic blocks)
//! fall back to source order, matching a stable sort of the rotations.

use crate::error::{Error, Result};
use crate::huffman;
use crate::wire::{self, Cursor};

/// Container magic for the block-sorting pipeline.
pub const BWT_MAGIC: [u8; 4] = *b"PZB1";

/// Default transform block: 1 MiB balances sort cost against context reach.
pub const DEFAULT_BLOCK_SIZE: usize = 1 << 20;

/// Run length that must be seen verbatim before a count byte follows.
const RLE_TRIGGER: usize = 4;

/// Output of the forward transform over one block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bwt {
    /// Last column of the sorted rotation matrix.
    pub last_column: Vec<u8>,
    /// Row at which the original block appears in the sorted matrix.
    pub primary_index: u32,
}

/// Burrows-Wheeler transform of one block (at most `u32::MAX` bytes).
pub fn forward_bwt(block: &[u8]) -> Result<Bwt> {
    if block.is_empty() {
        return Err(Error::EmptyBlock);
    }
    if block.len() > u32::MAX as usize {
        return Err(Error::InvalidConfig(format!(
            "block of {} bytes exceeds the u32 index space",
            block.len()
        )));
    }
    let n = block.len();
    let mut rank: Vec<u32> = block.iter().map(|&b| b as u32).collect();
    let mut idx: Vec<u32> = (0..n as u32).collect();
    let mut keys: Vec<u64> = vec![0; n];
    let mut next_rank: Vec<u32> = vec![0; n];
    let mut k = 1usize;
    let mut distinct = n == 1;
    while k < n {
        for i in 0..n {
            let j = if i + k >= n { i + k - n } else { i + k };
            keys[i] = (rank[i] as u64) << 32 | rank[j] as u64;
        }
        idx.sort_unstable_by_key(|&i| keys[i as usize]);
        let mut r = 0u32;
        next_rank[idx[0] as usize] = 0;
        for w in idx.windows(2) {
            if keys[w[1] as usize] != keys[w[0] as usize] {
                r += 1;
            }
            next_rank[w[1] as usize] = r;
        }
        std::mem::swap(&mut rank, &mut next_rank);
        if r as usize == n - 1 {
            distinct = true;
            break;
        }
        k <<= 1;
    }
    if !distinct {
        // Equal rotations remain (periodic block): keep source order.
        idx.sort_unstable_by_key(|&i| (rank[i as usize], i));
    }
    let mut last_column = Vec::with_capacity(n);
    let mut primary_index = 0u32;
    for (row, &i) in idx.iter().enumerate() {
        if i == 0 {
            primary_index = row as u32;
        }
        let prev = if i == 0 { n - 1 } else { i as usize - 1 };
        last_column.push(block[prev]);
    }
    Ok(Bwt {
        last_column,
        primary_index,
    })
}

/// Invert the transform in O(n) with the last-first mapping.
pub fn inverse_bwt(last_column: &[u8], primary_index: u32) -> Result<Vec<u8>> {
    let n = last_column.len();
    if n == 0 {
        return Err(Error::EmptyBlock);
    }
    if primary_index as usize >= n {
        return Err(Error::IndexOutOfRange {
            index: primary_index,
            len: n,
        });
    }
    let mut starts = [0u32; 256];
    for &b in last_column {
        starts[b as usize] += 1;
    }
    let mut acc = 0u32;
    for c in starts.iter_mut() {
        let count = *c;
        *c = acc;
        acc += count;
    }
    // lf[i]: row whose rotation is one step earlier in the text.
    let mut lf = vec![0u32; n];
    let mut seen = [0u32; 256];
    for (i, &b) in last_column.iter().enumerate() {
        lf[i] = starts[b as usize] + seen[b as usize];
        seen[b as usize] += 1;
    }
    let mut out = vec![0u8; n];
    let mut row = primary_index;
    for slot in out.iter_mut().rev() {
        *slot = last_column[row as usize];
        row = lf[row as usize];
    }
    Ok(out)
}

/// Move-to-front: emit each byte's position in a recency list initialized
/// to 0..=255, then move it to the front.
pub fn mtf_encode(data: &[u8]) -> Vec<u8> {
    let mut list: [u8; 256] = std::array::from_fn(|i| i as u8);
    let mut out = Vec::with_capacity(data.len());
    for &b in data {
        let pos = list.iter().position(|&x| x == b).unwrap();
        out.push(pos as u8);
        list.copy_within(..pos, 1);
        list[0] = b;
    }
    out
}

/// Invert [`mtf_encode`].
pub fn mtf_decode(ranks: &[u8]) -> Vec<u8> {
    let mut list: [u8; 256] = std::array::from_fn(|i| i as u8);
    let mut out = Vec::with_capacity(ranks.len());
    for &r in ranks {
        let b = list[r as usize];
        out.push(b);
        list.copy_within(..r as usize, 1);
        list[0] = b;
    }
    out
}

/// Run-length code: a run of four identical bytes is emitted verbatim and
/// followed by one byte counting up to 255 further repeats. Worst case
/// (runs of exactly four) expands by 25%.
pub fn rle_encode(data: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(data.len() + data.len() / 4 + 1);
    let mut i = 0;
    while i < data.len() {
        let b = data[i];
        let mut run = 1;
        while i + run < data.len() && data[i + run] == b {
            run += 1;
        }
        let mut left = run;
        while left >= RLE_TRIGGER {
            let extra = (left - RLE_TRIGGER).min(255);
            out.extend_from_slice(&[b; RLE_TRIGGER]);
            out.push(extra as u8);
            left -= RLE_TRIGGER + extra;
        }
        out.extend(std::iter::repeat_n(b, left));
        i += run;
    }
    out
}

/// Invert [`rle_encode`]. Fails when a count byte is missing.
pub fn rle_decode(data: &[u8]) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(data.len());
    let mut i = 0;
    let mut run = 0usize;
    while i < data.len() {
        let b = data[i];
        if run > 0 && b == data[i - 1] {
            run += 1;
        } else {
            run = 1;
        }
        out.push(b);
        i += 1;
        if run == RLE_TRIGGER {
            if i >= data.len() {
                return Err(Error::Truncated);
            }
            let extra = data[i] as usize;
            i += 1;
            out.extend(std::iter::repeat_n(b, extra));
            run = 0;
        }
    }
    Ok(out)
}

/// Compress `data` through the full pipeline, one block at a time:
/// magic, block size (4), block count (4), then per block the original
/// length (4), the primary index (4), and a Huffman container of the
/// BWT+MTF+RLE output.
pub fn compress(data: &[u8], block_size: usize) -> Result<Vec<u8>> {
    if block_size == 0 || block_size > u32::MAX as usize {
        return Err(Error::InvalidConfig(format!(
            "bwt block size {block_size} outside 1..=u32::MAX"
        )));
    }
    let blocks: Vec<&[u8]> = data.chunks(block_size).collect();
    let mut out = Vec::new();
    out.extend_from_slice(&BWT_MAGIC);
    wire::put_u32(&mut out, block_size as u32);
    wire::put_u32(&mut out, blocks.len() as u32);
    for block in blocks {
        let bwt = forward_bwt(block)?;
        let packed = rle_encode(&mtf_encode(&bwt.last_column));
        wire::put_u32(&mut out, block.len() as u32);
        wire::put_u32(&mut out, bwt.primary_index);
        out.extend_from_slice(&huffman::compress(&packed)?);
    }
    Ok(out)
}

/// Invert [`compress`].
pub fn decompress(bytes: &[u8]) -> Result<Vec<u8>> {
    let mut c = Cursor::new(bytes);
    c.expect_magic(&BWT_MAGIC)?;
    let block_size = c.u32()? as usize;
    let block_count = c.u32()? as usize;
    let mut out = Vec::new();
    for i in 0..block_count {
        let original_len = c.u32()? as usize;
        let primary_index = c.u32()?;
        if original_len == 0 || (i + 1 < block_count && original_len != block_size) {
            return Err(Error::Corrupt(format!(
                "block {i} length {original_len} does not fit the block grid"
            )));
        }
        let (packed, rest) = huffman::decompress_prefix(&bytes[c.position()..])?;
        let consumed = rest.position();
        c.take(consumed)?;
        let last_column = mtf_decode(&rle_decode(&packed)?);
        if last_column.len() != original_len {
            return Err(Error::Corrupt(format!(
                "block {i} expanded to {} bytes, expected {original_len}",
                last_column.len()
            )));
        }
        out.extend_from_slice(&inverse_bwt(&last_column, primary_index)?);
    }
    c.expect_end()?;
    Ok(out)
}
