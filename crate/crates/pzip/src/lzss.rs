//! LZSS over bit streams.
//!
//! Unlike byte-oriented LZSS, every quantity here is measured in bits: the
//! sliding window holds the last W bits, matches may start at any bit
//! offset, and literals carry a configurable number of raw bits. A token is
//! either
//!
//! * `1` + offset (log2(W) bits) + biased length, or
//! * `0` + a literal block of raw bits (short at end of stream).
//!
//! Offset 0 addresses the *oldest* bit in the window. A reference is taken
//! whenever any match of at least `min_match` bits exists — even at zero or
//! negative net gain — because skipping it can misalign later, better
//! matches. Ties go to the smallest offset, which is also what makes the
//! cooperative parallel search in [`crate::parallel`] bit-identical to the
//! serial scan.
//!
//! The window starts out primed by a dictionary: either a fixed counting
//! pattern (the bytes 0, 1, 2, ... truncated to W bits) or the first W bits
//! of the file itself, which are then emitted raw ahead of the tokens.
//! Both encoder and decoder maintain the same virtual stream
//! `dictionary ++ consumed bits`, so the window at any position is just a
//! W-bit slice of it; literal and matched bits alike slide through it.

use crate::bitio::{bit_at, load_bits, BitReader, BitWriter};
use crate::error::{Error, Result};
use crate::wire::{self, Cursor};

/// Container magic for an LZSS stream.
pub const LZSS_MAGIC: [u8; 4] = *b"PZL1";

/// Zero bytes appended to working buffers so the match scanner can always
/// load whole 64-bit words without bounds branches.
const SPARE_BYTES: usize = 16;

/// How the window is primed before any input is consumed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DictMode {
    /// Bytes 0, 1, 2, ..., 255, 0, 1, ... truncated to W bits.
    Counting,
    /// The first W bits of the file, emitted raw at stream start. Inputs
    /// shorter than W bits fall back to [`DictMode::Counting`], recorded by
    /// a container flag.
    FilePrefix,
}

/// Tunable shape of the token stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LzssConfig {
    /// Window size W in bits; must be a power of two.
    pub window_bits: u32,
    /// Longest reference, in bits.
    pub max_match: u32,
    /// Shortest reference, in bits.
    pub min_match: u32,
    /// Raw bits carried by one literal token.
    pub literal_bits: u32,
    /// Initial window contents.
    pub dict_mode: DictMode,
}

impl Default for LzssConfig {
    /// The workhorse configuration: 1 KiBit window, 12..=24 bit matches,
    /// 8-bit literals, counting dictionary.
    fn default() -> Self {
        LzssConfig {
            window_bits: 1024,
            max_match: 24,
            min_match: 12,
            literal_bits: 8,
            dict_mode: DictMode::Counting,
        }
    }
}

impl LzssConfig {
    pub fn validate(&self) -> Result<()> {
        let w = self.window_bits;
        if !w.is_power_of_two() || !(8..=1 << 30).contains(&w) {
            return Err(Error::InvalidConfig(format!(
                "window of {w} bits is not a power of two in 8..=2^30"
            )));
        }
        if self.min_match == 0 || self.min_match > self.max_match {
            return Err(Error::InvalidConfig(format!(
                "match bounds {}..={} are empty or zero",
                self.min_match, self.max_match
            )));
        }
        if self.max_match > w {
            return Err(Error::InvalidConfig(format!(
                "max match {} cannot exceed the {w} bit window",
                self.max_match
            )));
        }
        if self.max_match > u16::MAX as u32 {
            return Err(Error::InvalidConfig(format!(
                "max match {} exceeds the u16 container field",
                self.max_match
            )));
        }
        if !(1..=64).contains(&self.literal_bits) {
            return Err(Error::InvalidConfig(format!(
                "literal block of {} bits outside 1..=64",
                self.literal_bits
            )));
        }
        Ok(())
    }

    /// Bits in the offset field of a reference.
    pub fn offset_width(&self) -> u32 {
        self.window_bits.trailing_zeros()
    }

    /// Bits in the length field of a reference (length is stored biased by
    /// `min_match`).
    pub fn length_width(&self) -> u32 {
        let range = self.max_match - self.min_match + 1;
        if range <= 1 {
            0
        } else {
            32 - (range - 1).leading_zeros()
        }
    }

    /// Total bits one reference token occupies.
    pub fn reference_cost(&self) -> u32 {
        1 + self.offset_width() + self.length_width()
    }

    /// Dictionary actually in effect for an input of `data_bits`:
    /// [`DictMode::FilePrefix`] needs at least W bits of input.
    pub fn effective_dict_mode(&self, data_bits: u64) -> DictMode {
        match self.dict_mode {
            DictMode::FilePrefix if data_bits >= self.window_bits as u64 => DictMode::FilePrefix,
            _ => DictMode::Counting,
        }
    }
}

/// One match inside the window: `offset` is the bit distance from the
/// oldest window bit, `length` the number of matched bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Match {
    pub offset: u32,
    pub length: u32,
}

/// An initial window: exactly W bits of dictionary content.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Window {
    bytes: Vec<u8>,
    bits: usize,
}

impl Window {
    /// Window content as zero-padded bytes.
    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn bit_len(&self) -> usize {
        self.bits
    }
}

/// The counting dictionary: bytes 0, 1, ..., 255 repeating, cut to `bits`.
fn counting_bytes(bits: usize) -> Vec<u8> {
    let mut out: Vec<u8> = (0..bits.div_ceil(8)).map(|i| (i % 256) as u8).collect();
    if !bits.is_multiple_of(8) {
        let last = out.last_mut().unwrap();
        *last &= 0xFFu8 << (8 - bits % 8);
    }
    out
}

/// Prime a window per the dictionary mode. `file_prefix` supplies the data
/// bits for [`DictMode::FilePrefix`] and must hold at least W bits.
pub fn init_window(cfg: &LzssConfig, file_prefix: Option<(&[u8], usize)>) -> Result<Window> {
    cfg.validate()?;
    let w = cfg.window_bits as usize;
    let bytes = match cfg.dict_mode {
        DictMode::Counting => counting_bytes(w),
        DictMode::FilePrefix => {
            let (data, bits) = file_prefix.ok_or_else(|| {
                Error::InvalidConfig("file-prefix dictionary needs prefix data".into())
            })?;
            if bits < w || data.len() * 8 < bits {
                return Err(Error::InvalidConfig(format!(
                    "file prefix of {bits} bits is shorter than the {w} bit window"
                )));
            }
            let mut head = data[..w.div_ceil(8)].to_vec();
            if !w.is_multiple_of(8) {
                let last = head.last_mut().unwrap();
                *last &= 0xFFu8 << (8 - w % 8);
            }
            head
        }
    };
    Ok(Window { bytes, bits: w })
}

/// The encoder/decoder working buffer: dictionary bits followed by data
/// bits, padded so 64-bit loads never fall off the end.
pub(crate) struct Stream {
    pub bytes: Vec<u8>,
    /// Dictionary plus encodable data, in bits.
    pub total_bits: usize,
}

/// Assemble the virtual stream for `data`. Returns the stream and the
/// dictionary mode in effect.
pub(crate) fn build_stream(data: &[u8], data_bits: usize, cfg: &LzssConfig) -> (Stream, DictMode) {
    let w = cfg.window_bits as usize;
    let effective = cfg.effective_dict_mode(data_bits as u64);
    let mut writer = BitWriter::with_capacity_bits(w + data_bits + SPARE_BYTES * 8);
    match effective {
        DictMode::FilePrefix => {
            // the prefix *is* the first W bits of the data
            writer.copy_bits(data, 0, data_bits);
        }
        DictMode::Counting => {
            writer.write_bytes(&counting_bytes(w));
            // counting_bytes may carry pad bits when W % 8 != 0
            let extra = w.div_ceil(8) * 8 - w;
            let (mut bytes, mut bits) = writer.finish();
            bits -= extra;
            bytes.truncate(bits.div_ceil(8));
            writer = BitWriter::with_capacity_bits(w + data_bits + SPARE_BYTES * 8);
            let tmp = bytes;
            writer.copy_bits(&tmp, 0, bits);
            writer.copy_bits(data, 0, data_bits);
        }
    }
    let (mut bytes, total_bits) = writer.finish();
    bytes.resize(bytes.len() + SPARE_BYTES, 0);
    (Stream { bytes, total_bits }, effective)
}

/// Longest common prefix of the bit runs starting at `a` and `b`, capped at
/// `limit`. The buffer must have spare padding past both runs.
fn common_prefix(bytes: &[u8], a: usize, b: usize, limit: usize) -> usize {
    let mut got = 0;
    while got < limit {
        let x = load_bits(bytes, a + got, 64) ^ load_bits(bytes, b + got, 64);
        if x != 0 {
            return limit.min(got + x.leading_zeros() as usize);
        }
        got += 64;
    }
    limit
}

/// Scan window offsets `off_lo..off_hi` for the longest match against the
/// lookahead at `look_pos`. `win_start` is the absolute bit position of the
/// oldest window bit (`look_pos - W`), `look_avail` the usable lookahead
/// already clamped to `max_match`. Ties keep the smallest offset.
pub(crate) fn scan_range(
    bytes: &[u8],
    win_start: usize,
    look_pos: usize,
    look_avail: usize,
    cfg: &LzssConfig,
    off_lo: usize,
    off_hi: usize,
) -> Option<Match> {
    let w = cfg.window_bits as usize;
    let min_m = cfg.min_match as usize;
    if look_avail < min_m {
        return None;
    }
    let hi = off_hi.min(w - min_m + 1);
    if off_lo >= hi {
        return None;
    }
    let needle_len = look_avail.min(64) as u32;
    let needle = load_bits(bytes, look_pos, needle_len) << (64 - needle_len);
    let mut cur = load_bits(bytes, win_start + off_lo, 64);
    let mut best_len = 0usize;
    let mut best_off = 0usize;
    for o in off_lo..hi {
        let cap = look_avail.min(w - o);
        let x = cur ^ needle;
        let mut l = if x == 0 {
            64
        } else {
            x.leading_zeros() as usize
        };
        if l >= cap {
            l = cap;
        } else if l == 64 {
            l = 64 + common_prefix(bytes, win_start + o + 64, look_pos + 64, cap - 64);
        }
        if l > best_len {
            best_len = l;
            best_off = o;
            if best_len == look_avail {
                break; // nothing longer is possible; smaller offsets won ties
            }
        }
        cur = (cur << 1) | bit_at(bytes, win_start + o + 64);
    }
    if best_len >= min_m {
        Some(Match {
            offset: best_off as u32,
            length: best_len as u32,
        })
    } else {
        None
    }
}

/// Longest match of `lookahead` within `window`, or `None` when nothing
/// reaches `min_match` bits. The window must be exactly W bits.
pub fn find_longest_match(
    window: &Window,
    lookahead: &[u8],
    lookahead_bits: usize,
    cfg: &LzssConfig,
) -> Option<Match> {
    let w = cfg.window_bits as usize;
    assert_eq!(window.bits, w, "window must be exactly {w} bits");
    let mut writer = BitWriter::with_capacity_bits(w + lookahead_bits + SPARE_BYTES * 8);
    writer.copy_bits(&window.bytes, 0, w);
    writer.copy_bits(lookahead, 0, lookahead_bits);
    let (mut bytes, _) = writer.finish();
    bytes.resize(bytes.len() + SPARE_BYTES, 0);
    let look_avail = lookahead_bits.min(cfg.max_match as usize);
    scan_range(&bytes, 0, w, look_avail, cfg, 0, w)
}

/// Drive the token loop, delegating match search to `matcher` (the serial
/// scan here; sliced cooperative search in [`crate::parallel`]).
pub(crate) fn encode_core(
    stream: &Stream,
    cfg: &LzssConfig,
    out: &mut BitWriter,
    mut matcher: impl FnMut(&Stream, usize, usize) -> Option<Match>,
) -> Result<()> {
    let w = cfg.window_bits as usize;
    let ow = cfg.offset_width();
    let lw = cfg.length_width();
    let total = stream.total_bits;
    let mut p = w;
    while p < total {
        let look_avail = (total - p).min(cfg.max_match as usize);
        let found = if look_avail >= cfg.min_match as usize {
            matcher(stream, p, look_avail)
        } else {
            None
        };
        match found {
            Some(m) => {
                debug_assert!(m.length >= cfg.min_match && m.length as usize <= look_avail);
                out.write_bit(true);
                out.write_bits(m.offset as u64, ow)?;
                out.write_bits((m.length - cfg.min_match) as u64, lw)?;
                p += m.length as usize;
            }
            None => {
                let lit = (total - p).min(cfg.literal_bits as usize);
                out.write_bit(false);
                out.copy_bits(&stream.bytes, p, lit);
                p += lit;
            }
        }
    }
    Ok(())
}

pub(crate) fn serial_matcher(cfg: LzssConfig) -> impl FnMut(&Stream, usize, usize) -> Option<Match> {
    move |stream, p, look_avail| {
        let w = cfg.window_bits as usize;
        scan_range(&stream.bytes, p - w, p, look_avail, &cfg, 0, w)
    }
}

/// Encode `data_bits` bits of `data` into a token stream (preceded by the
/// raw W-bit prefix in file-prefix mode). Returns packed bytes and the
/// exact bit count.
pub fn encode_bits(data: &[u8], data_bits: usize, cfg: &LzssConfig) -> Result<(Vec<u8>, u64)> {
    cfg.validate()?;
    if data_bits > data.len() * 8 {
        return Err(Error::Truncated);
    }
    let (stream, effective) = build_stream(data, data_bits, cfg);
    let mut out = BitWriter::with_capacity_bits(data_bits + data_bits / 4 + 64);
    if effective == DictMode::FilePrefix {
        out.copy_bits(data, 0, cfg.window_bits as usize);
    }
    encode_core(&stream, cfg, &mut out, serial_matcher(*cfg))?;
    let (bytes, bits) = out.finish();
    Ok((bytes, bits as u64))
}

/// Byte-stream convenience over [`encode_bits`].
pub fn encode(data: &[u8], cfg: &LzssConfig) -> Result<(Vec<u8>, u64)> {
    encode_bits(data, data.len() * 8, cfg)
}

/// Decode a token stream back into `total_source_bits` bits (returned
/// zero-padded to bytes). `stream_bits` bounds the readable bits; up to 7
/// zero pad bits may remain afterwards.
pub fn decode_bits(
    stream: &[u8],
    stream_bits: u64,
    cfg: &LzssConfig,
    total_source_bits: u64,
) -> Result<Vec<u8>> {
    cfg.validate()?;
    let w = cfg.window_bits as usize;
    let ow = cfg.offset_width();
    let lw = cfg.length_width();
    let effective = cfg.effective_dict_mode(total_source_bits);
    let mut r = BitReader::new(stream, stream_bits as usize)?;

    // Rebuild the same virtual stream the encoder walked.
    let mut vb = BitWriter::with_capacity_bits(w + total_source_bits as usize + 64);
    match effective {
        DictMode::Counting => {
            let dict = counting_bytes(w);
            vb.copy_bits(&dict, 0, w);
        }
        DictMode::FilePrefix => {
            // raw prefix: part of the output as well as the dictionary
            let mut left = w;
            while left > 0 {
                let take = left.min(64) as u32;
                let v = r.read_bits(take)?;
                vb.write_bits(v, take).expect("in-range");
                left -= take as usize;
            }
        }
    }
    let virtual_end = w + (total_source_bits as usize
        - if effective == DictMode::FilePrefix { w } else { 0 });
    while vb.bit_len() < virtual_end {
        if r.read_bit()? {
            let offset = r.read_bits(ow)? as usize;
            let length = cfg.min_match as usize + r.read_bits(lw)? as usize;
            if length > cfg.max_match as usize {
                return Err(Error::Corrupt(format!(
                    "reference length {length} above max match {}",
                    cfg.max_match
                )));
            }
            if offset + length > w {
                return Err(Error::ReferenceOutOfWindow);
            }
            if vb.bit_len() + length > virtual_end {
                return Err(Error::Corrupt(
                    "reference runs past the declared source length".into(),
                ));
            }
            let src = vb.bit_len() - w + offset;
            vb.copy_bits_within(src, length);
        } else {
            let lit = (virtual_end - vb.bit_len()).min(cfg.literal_bits as usize) as u32;
            let v = r.read_bits(lit)?;
            vb.write_bits(v, lit).expect("in-range");
        }
    }
    if r.remaining() >= 8 || r.read_bits(r.remaining() as u32)? != 0 {
        return Err(Error::Corrupt("trailing bits after final token".into()));
    }

    // Carve the data bits back out of the virtual stream.
    let (vbytes, _) = vb.finish();
    let data_start = if effective == DictMode::FilePrefix { 0 } else { w };
    let mut out = BitWriter::with_capacity_bits(total_source_bits as usize);
    out.copy_bits(&vbytes, data_start, total_source_bits as usize);
    let (bytes, _) = out.finish();
    Ok(bytes)
}

/// Wrap an already-encoded payload in the container header: magic, window
/// (4), max match (2), min match (2), literal bits (1), dictionary flag
/// (1), source bit count (8), then prefix+tokens zero-padded to bytes.
pub(crate) fn wrap_container(data_bits: u64, cfg: &LzssConfig, payload: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(payload.len() + 22);
    out.extend_from_slice(&LZSS_MAGIC);
    wire::put_u32(&mut out, cfg.window_bits);
    wire::put_u16(&mut out, cfg.max_match as u16);
    wire::put_u16(&mut out, cfg.min_match as u16);
    out.push(cfg.literal_bits as u8);
    out.push(match (cfg.dict_mode, cfg.effective_dict_mode(data_bits)) {
        (DictMode::Counting, _) => 0,
        (DictMode::FilePrefix, DictMode::FilePrefix) => 1,
        (DictMode::FilePrefix, DictMode::Counting) => 2, // fell back: input < W bits
    });
    wire::put_u64(&mut out, data_bits);
    out.extend_from_slice(payload);
    out
}

/// Compress into a self-contained stream (see [`wrap_container`] for the
/// layout).
pub fn compress(data: &[u8], cfg: &LzssConfig) -> Result<Vec<u8>> {
    let (payload, _) = encode(data, cfg)?;
    Ok(wrap_container(data.len() as u64 * 8, cfg, &payload))
}

/// Invert [`compress`].
pub fn decompress(bytes: &[u8]) -> Result<Vec<u8>> {
    let mut c = Cursor::new(bytes);
    c.expect_magic(&LZSS_MAGIC)?;
    let window_bits = c.u32()?;
    let max_match = c.u16()? as u32;
    let min_match = c.u16()? as u32;
    let literal_bits = c.u8()? as u32;
    let mode_byte = c.u8()?;
    let total_source_bits = c.u64()?;
    let dict_mode = match mode_byte {
        0 => DictMode::Counting,
        1 | 2 => DictMode::FilePrefix,
        other => {
            return Err(Error::Corrupt(format!("unknown dictionary flag {other}")));
        }
    };
    let cfg = LzssConfig {
        window_bits,
        max_match,
        min_match,
        literal_bits,
        dict_mode,
    };
    cfg.validate()?;
    let fell_back = cfg.effective_dict_mode(total_source_bits) == DictMode::Counting;
    if mode_byte == 1 && fell_back {
        return Err(Error::Corrupt(
            "file-prefix flag on input shorter than the window".into(),
        ));
    }
    if mode_byte == 2 && !fell_back {
        return Err(Error::Corrupt(
            "fallback flag on input longer than the window".into(),
        ));
    }
    if total_source_bits % 8 != 0 {
        return Err(Error::Corrupt("source bit count not a whole byte".into()));
    }
    let payload = c.take(c.remaining())?;
    let data = decode_bits(payload, payload.len() as u64 * 8, &cfg, total_source_bits)?;
    Ok(data)
}
