//! Canonical Huffman coding over the byte alphabet.
//!
//! Code construction is the classic repeated merge of the two lightest
//! subtrees. Ties are broken deterministically by (weight, lowest contained
//! symbol) so every build of the same frequency table yields the same code
//! lengths. Only the lengths travel in the container — both sides derive
//! identical canonical codes from them (codes assigned in (length, symbol)
//! order), which keeps the wire format at a flat 256 bytes.

use crate::bitio::{BitReader, BitWriter};
use crate::error::{Error, Result};
use crate::wire::{self, Cursor};

/// Container magic for a Huffman-compressed stream.
pub const HUFFMAN_MAGIC: [u8; 4] = *b"PZH1";

/// Longest permitted codeword. Any codeword then fits one 64-bit read; a
/// byte alphabet only approaches this with astronomically skewed counts.
pub const MAX_CODE_LEN: u32 = 56;

/// Occurrence counts per byte value.
pub type FrequencyTable = [u64; 256];

/// Count byte occurrences.
pub fn count_frequencies(data: &[u8]) -> FrequencyTable {
    let mut freqs = [0u64; 256];
    for &b in data {
        freqs[b as usize] += 1;
    }
    freqs
}

/// Canonical code table: a length per symbol plus the codes derived from
/// those lengths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeTable {
    lengths: [u8; 256],
    codes: [u64; 256],
}

impl CodeTable {
    /// Code length in bits for `symbol`, zero if the symbol has no code.
    pub fn length(&self, symbol: u8) -> u8 {
        self.lengths[symbol as usize]
    }

    /// All 256 code lengths, indexed by symbol.
    pub fn lengths(&self) -> &[u8; 256] {
        &self.lengths
    }

    /// Canonical codeword for `symbol` (valid when its length is nonzero).
    pub fn code(&self, symbol: u8) -> u64 {
        self.codes[symbol as usize]
    }

    fn from_lengths(lengths: [u8; 256]) -> Result<CodeTable> {
        let mut kraft = 0u64; // in units of 2^-MAX_CODE_LEN
        let mut any = false;
        for &len in &lengths {
            if len == 0 {
                continue;
            }
            any = true;
            if len as u32 > MAX_CODE_LEN {
                return Err(Error::CodeTooLong(len as u32));
            }
            kraft = kraft
                .checked_add(1u64 << (MAX_CODE_LEN - len as u32))
                .ok_or(Error::KraftViolation)?;
            if kraft > 1u64 << MAX_CODE_LEN {
                return Err(Error::KraftViolation);
            }
        }
        if !any {
            return Err(Error::EmptyFrequencyTable);
        }

        // Canonical assignment: symbols ordered by (length, symbol value)
        // get consecutive codes, shifting left when the length grows.
        let mut order: Vec<u8> = (0u16..256).map(|s| s as u8).collect();
        order.retain(|&s| lengths[s as usize] != 0);
        order.sort_by_key(|&s| (lengths[s as usize], s));
        let mut codes = [0u64; 256];
        let mut next = 0u64;
        let mut prev_len = 0u8;
        for &s in &order {
            let len = lengths[s as usize];
            next <<= len - prev_len;
            codes[s as usize] = next;
            next += 1;
            prev_len = len;
        }
        Ok(CodeTable { lengths, codes })
    }
}

/// Build the optimal code table for `freqs`.
///
/// Merging always takes the two lightest live nodes, comparing by
/// (weight, lowest contained symbol), so the result is a pure function of
/// the counts. A table with a single used symbol gets a one-bit code.
pub fn build_code_table(freqs: &FrequencyTable) -> Result<CodeTable> {
    let mut lengths = [0u8; 256];
    // Live nodes as (weight, lowest symbol, member symbols). The alphabet
    // is at most 256 entries, so the quadratic "find two minima" scan is
    // cheaper than it looks and keeps the tie-break obvious.
    let mut nodes: Vec<(u64, u8, Vec<u8>)> = freqs
        .iter()
        .enumerate()
        .filter(|&(_, &w)| w > 0)
        .map(|(s, &w)| (w, s as u8, vec![s as u8]))
        .collect();
    match nodes.len() {
        0 => return Err(Error::EmptyFrequencyTable),
        1 => {
            lengths[nodes[0].1 as usize] = 1;
            return CodeTable::from_lengths(lengths);
        }
        _ => {}
    }
    let mut depth = [0u32; 256];
    while nodes.len() > 1 {
        nodes.sort_by_key(|n| (n.0, n.1));
        let (wa, sa, syms_a) = nodes.remove(0);
        let (wb, sb, syms_b) = nodes.remove(0);
        let mut merged = syms_a;
        merged.extend_from_slice(&syms_b);
        for &s in &merged {
            depth[s as usize] += 1;
        }
        nodes.push((wa + wb, sa.min(sb), merged));
    }
    for s in 0..256 {
        if depth[s] > MAX_CODE_LEN {
            return Err(Error::CodeTooLong(depth[s]));
        }
        lengths[s] = depth[s] as u8;
    }
    CodeTable::from_lengths(lengths)
}

/// Flatten a table to its wire form: one length byte per symbol.
pub fn serialize_table(table: &CodeTable) -> [u8; 256] {
    table.lengths
}

/// Rebuild a table from wire lengths, validating the Kraft inequality and
/// the length cap. All-zero tables are rejected.
pub fn deserialize_table(lengths: &[u8; 256]) -> Result<CodeTable> {
    CodeTable::from_lengths(*lengths)
}

/// Encode `data` against `table`, returning packed bits and the bit count.
pub fn encode(data: &[u8], table: &CodeTable) -> Result<(Vec<u8>, u64)> {
    let mut total: u64 = 0;
    for &b in data {
        let len = table.lengths[b as usize];
        if len == 0 {
            return Err(Error::SymbolWithoutCode(b));
        }
        total += len as u64;
    }
    let mut w = BitWriter::with_capacity_bits(total as usize);
    for &b in data {
        w.write_bits(table.codes[b as usize], table.lengths[b as usize] as u32)
            .expect("canonical code fits its length");
    }
    let (bytes, bits) = w.finish();
    Ok((bytes, bits as u64))
}

/// Canonical decoding state: per-length first code/first index tables over
/// the symbols in canonical order. Supports decoding one symbol at a time,
/// which lets callers interleave other fields with coded symbols.
pub struct StreamDecoder {
    count: [u32; MAX_CODE_LEN as usize + 1],
    first_code: [u64; MAX_CODE_LEN as usize + 2],
    first_index: [u32; MAX_CODE_LEN as usize + 2],
    order: Vec<u8>,
    max_len: u32,
}

impl StreamDecoder {
    pub fn new(table: &CodeTable) -> StreamDecoder {
        let mut count = [0u32; MAX_CODE_LEN as usize + 1];
        let mut order: Vec<u8> = (0u16..256).map(|s| s as u8).collect();
        order.retain(|&s| table.lengths[s as usize] != 0);
        order.sort_by_key(|&s| (table.lengths[s as usize], s));
        for &s in &order {
            count[table.lengths[s as usize] as usize] += 1;
        }
        let max_len = order
            .last()
            .map(|&s| table.lengths[s as usize] as u32)
            .unwrap_or(0);
        let mut first_code = [0u64; MAX_CODE_LEN as usize + 2];
        let mut first_index = [0u32; MAX_CODE_LEN as usize + 2];
        let mut code = 0u64;
        let mut index = 0u32;
        for len in 1..=max_len as usize {
            first_code[len] = code;
            first_index[len] = index;
            code = (code + count[len] as u64) << 1;
            index += count[len];
        }
        StreamDecoder {
            count,
            first_code,
            first_index,
            order,
            max_len,
        }
    }

    /// Read one codeword from `r` and return its symbol.
    pub fn decode_one(&self, r: &mut BitReader) -> Result<u8> {
        let mut code = 0u64;
        let mut len = 0usize;
        loop {
            code = (code << 1) | r.read_bit()? as u64;
            len += 1;
            let offset = code.wrapping_sub(self.first_code[len]);
            if self.count[len] != 0 && code >= self.first_code[len] && offset < self.count[len] as u64
            {
                return Ok(self.order[(self.first_index[len] as u64 + offset) as usize]);
            }
            if len >= self.max_len as usize {
                return Err(Error::InvalidPrefix);
            }
        }
    }
}

/// Decode exactly `symbol_count` symbols from `payload_bits` bits of
/// `payload`. Fails if the bits run out mid-codeword, if a prefix matches
/// no code, or if decoding does not consume exactly `payload_bits`.
pub fn decode(
    payload: &[u8],
    payload_bits: u64,
    table: &CodeTable,
    symbol_count: usize,
) -> Result<Vec<u8>> {
    if payload_bits > payload.len() as u64 * 8 {
        return Err(Error::Truncated);
    }
    let decoder = StreamDecoder::new(table);
    let mut r = BitReader::new(payload, payload_bits as usize)?;
    let mut out = Vec::with_capacity(symbol_count);
    for _ in 0..symbol_count {
        out.push(decoder.decode_one(&mut r)?);
    }
    if r.remaining() != 0 {
        return Err(Error::Corrupt(format!(
            "{} unconsumed payload bits",
            r.remaining()
        )));
    }
    Ok(out)
}

/// Compress `data` into a self-contained stream:
/// magic, original length (8), 256 length bytes, payload bit count (8),
/// zero-padded payload.
pub fn compress(data: &[u8]) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    out.extend_from_slice(&HUFFMAN_MAGIC);
    wire::put_u64(&mut out, data.len() as u64);
    if data.is_empty() {
        out.extend_from_slice(&[0u8; 256]);
        wire::put_u64(&mut out, 0);
        return Ok(out);
    }
    let table = build_code_table(&count_frequencies(data))?;
    let (payload, bits) = encode(data, &table)?;
    out.extend_from_slice(&serialize_table(&table));
    wire::put_u64(&mut out, bits);
    out.extend_from_slice(&payload);
    Ok(out)
}

/// Invert [`compress`].
pub fn decompress(bytes: &[u8]) -> Result<Vec<u8>> {
    let (data, cursor) = decompress_prefix(bytes)?;
    cursor.expect_end()?;
    Ok(data)
}

/// Decode one Huffman container sitting at the front of `bytes`, returning
/// the data and the cursor past the container (other formats embed these
/// containers back to back).
pub(crate) fn decompress_prefix(bytes: &[u8]) -> Result<(Vec<u8>, Cursor<'_>)> {
    let mut c = Cursor::new(bytes);
    c.expect_magic(&HUFFMAN_MAGIC)?;
    let original_len = c.u64()? as usize;
    let lengths: [u8; 256] = c.take(256)?.try_into().unwrap();
    let payload_bits = c.u64()?;
    let payload = c.take(wire::bytes_for_bits(payload_bits))?;
    if original_len == 0 {
        if payload_bits != 0 {
            return Err(Error::Corrupt("payload bits with zero length".into()));
        }
        return Ok((Vec::new(), c));
    }
    let table = deserialize_table(&lengths)?;
    let data = decode(payload, payload_bits, &table, original_len)?;
    Ok((data, c))
}
