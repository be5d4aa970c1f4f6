//! MSB-first bit packing and unpacking.
//!
//! All payloads in this crate are bit streams whose exact bit count is
//! carried by the enclosing container, so the writer pads the final byte
//! with zeros and readers stop at the recorded bit length instead of the
//! byte boundary. The first bit written becomes the most significant bit of
//! the first byte, which keeps hexdumps readable left to right.

use crate::error::{Error, Result};

/// Largest field width a single `write_bits`/`read_bits` call moves.
pub const MAX_FIELD_BITS: u32 = 64;

#[inline]
pub(crate) fn mask(bits: u32) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

/// Read one bit at an absolute position. The caller guarantees the position
/// is in range.
#[inline]
pub(crate) fn bit_at(bytes: &[u8], pos: usize) -> u64 {
    ((bytes[pos >> 3] >> (7 - (pos & 7))) & 1) as u64
}

/// Load `count` bits (`count <= 64`) starting at absolute bit position
/// `pos`, right-aligned in the returned word. The caller guarantees
/// `pos + count` is within the buffer.
#[inline]
pub(crate) fn load_bits(bytes: &[u8], pos: usize, count: u32) -> u64 {
    debug_assert!(count <= 64);
    debug_assert!(pos + count as usize <= bytes.len() * 8);
    if count == 0 {
        return 0;
    }
    let first = pos >> 3;
    let last = (pos + count as usize + 7) >> 3; // exclusive
    let mut acc: u128 = 0;
    for &b in &bytes[first..last] {
        acc = (acc << 8) | b as u128;
    }
    let spare = (last - first) * 8 - (pos & 7) - count as usize;
    ((acc >> spare) as u64) & mask(count)
}

/// Append-only bit sink.
#[derive(Debug, Default, Clone)]
pub struct BitWriter {
    buf: Vec<u8>,
    bit_len: usize,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity_bits(bits: usize) -> Self {
        BitWriter {
            buf: Vec::with_capacity(bits.div_ceil(8)),
            bit_len: 0,
        }
    }

    /// Number of bits written so far.
    pub fn bit_len(&self) -> usize {
        self.bit_len
    }

    pub fn write_bit(&mut self, bit: bool) {
        let off = self.bit_len & 7;
        if off == 0 {
            self.buf.push(0);
        }
        if bit {
            *self.buf.last_mut().unwrap() |= 0x80 >> off;
        }
        self.bit_len += 1;
    }

    /// Write the low `count` bits of `value`, most significant first.
    /// `value` must fit in `count` bits and `count` must be at most 64.
    pub fn write_bits(&mut self, value: u64, count: u32) -> Result<()> {
        if count > MAX_FIELD_BITS {
            return Err(Error::InvalidConfig(format!(
                "cannot write {count} bits in one field"
            )));
        }
        if count < 64 && value > mask(count) {
            return Err(Error::ValueOutOfRange { value, bits: count });
        }
        let mut left = count;
        while left > 0 {
            let off = (self.bit_len & 7) as u32;
            if off == 0 {
                self.buf.push(0);
            }
            let take = (8 - off).min(left);
            let chunk = (value >> (left - take)) & mask(take);
            *self.buf.last_mut().unwrap() |= (chunk as u8) << (8 - off - take);
            self.bit_len += take as usize;
            left -= take;
        }
        Ok(())
    }

    /// Append whole bytes (8 bits each, in order).
    pub fn write_bytes(&mut self, bytes: &[u8]) {
        if self.bit_len & 7 == 0 {
            self.buf.extend_from_slice(bytes);
            self.bit_len += bytes.len() * 8;
        } else {
            for &b in bytes {
                self.write_bits(b as u64, 8).expect("8-bit write");
            }
        }
    }

    /// Copy `count` bits out of `src` starting at bit `pos`.
    pub fn copy_bits(&mut self, src: &[u8], pos: usize, count: usize) {
        let mut done = 0;
        while done < count {
            let take = ((count - done) as u32).min(64);
            let v = load_bits(src, pos + done, take);
            self.write_bits(v, take).expect("in-range copy");
            done += take as usize;
        }
    }

    /// Copy `count` bits from earlier in this writer's own output, starting
    /// at bit `pos`. The source range must lie entirely before the current
    /// write position.
    pub fn copy_bits_within(&mut self, pos: usize, count: usize) {
        assert!(pos + count <= self.bit_len, "source must be already written");
        let mut done = 0;
        while done < count {
            let take = ((count - done) as u32).min(64);
            let v = load_bits(&self.buf, pos + done, take);
            self.write_bits(v, take).expect("in-range copy");
            done += take as usize;
        }
    }

    /// Zero-pad to a byte boundary and return the buffer plus its exact bit
    /// length. Bits past `bit_len` in the final byte are zero.
    pub fn finish(self) -> (Vec<u8>, usize) {
        (self.buf, self.bit_len)
    }
}

/// Bounded bit source over a byte slice.
#[derive(Debug, Clone)]
pub struct BitReader<'a> {
    data: &'a [u8],
    pos: usize,
    limit: usize,
}

impl<'a> BitReader<'a> {
    /// Read up to `bit_limit` bits out of `data`.
    pub fn new(data: &'a [u8], bit_limit: usize) -> Result<Self> {
        if bit_limit > data.len() * 8 {
            return Err(Error::Truncated);
        }
        Ok(BitReader {
            data,
            pos: 0,
            limit: bit_limit,
        })
    }

    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn remaining(&self) -> usize {
        self.limit - self.pos
    }

    pub fn read_bit(&mut self) -> Result<bool> {
        if self.pos >= self.limit {
            return Err(Error::Truncated);
        }
        let bit = bit_at(self.data, self.pos) != 0;
        self.pos += 1;
        Ok(bit)
    }

    /// Read `count` bits (`count <= 64`), returned right-aligned.
    pub fn read_bits(&mut self, count: u32) -> Result<u64> {
        if count > MAX_FIELD_BITS {
            return Err(Error::InvalidConfig(format!(
                "cannot read {count} bits in one field"
            )));
        }
        if count as usize > self.remaining() {
            return Err(Error::Truncated);
        }
        let v = load_bits(self.data, self.pos, count);
        self.pos += count as usize;
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_bits_pack_msb_first() {
        let mut w = BitWriter::new();
        for bit in [true, false, true, true, false, false, false, true, true] {
            w.write_bit(bit);
        }
        let (bytes, len) = w.finish();
        assert_eq!(len, 9);
        assert_eq!(bytes, vec![0b1011_0001, 0b1000_0000]);
    }

    #[test]
    fn multi_bit_fields_round_trip() {
        let mut w = BitWriter::new();
        w.write_bits(0b101, 3).unwrap();
        w.write_bits(0xDEAD_BEEF, 32).unwrap();
        w.write_bits(1, 1).unwrap();
        w.write_bits(u64::MAX, 64).unwrap();
        let (bytes, len) = w.finish();
        assert_eq!(len, 100);

        let mut r = BitReader::new(&bytes, len).unwrap();
        assert_eq!(r.read_bits(3).unwrap(), 0b101);
        assert_eq!(r.read_bits(32).unwrap(), 0xDEAD_BEEF);
        assert_eq!(r.read_bits(1).unwrap(), 1);
        assert_eq!(r.read_bits(64).unwrap(), u64::MAX);
        assert_eq!(r.remaining(), 0);
    }

    #[test]
    fn trailing_pad_bits_are_zero() {
        let mut w = BitWriter::new();
        w.write_bits(0b11, 2).unwrap();
        let (bytes, _) = w.finish();
        assert_eq!(bytes, vec![0b1100_0000]);
    }

    #[test]
    fn oversized_value_is_rejected() {
        let mut w = BitWriter::new();
        assert!(matches!(
            w.write_bits(0b100, 2),
            Err(Error::ValueOutOfRange { value: 4, bits: 2 })
        ));
        // and nothing was committed
        assert_eq!(w.bit_len(), 0);
    }

    #[test]
    fn reading_past_the_limit_fails() {
        let mut r = BitReader::new(&[0xFF], 3).unwrap();
        assert_eq!(r.read_bits(3).unwrap(), 0b111);
        assert!(matches!(r.read_bit(), Err(Error::Truncated)));
        assert!(BitReader::new(&[0xFF], 9).is_err());
    }

    #[test]
    fn zero_width_fields_are_noops() {
        let mut w = BitWriter::new();
        w.write_bits(0, 0).unwrap();
        let (bytes, len) = w.finish();
        assert!(bytes.is_empty());
        assert_eq!(len, 0);
        let mut r = BitReader::new(&[], 0).unwrap();
        assert_eq!(r.read_bits(0).unwrap(), 0);
    }

    #[test]
    fn load_bits_matches_reader() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let bytes: Vec<u8> = (0..64).map(|_| rng.gen()).collect();
        for _ in 0..2000 {
            let count = rng.gen_range(0..=64u32);
            let pos = rng.gen_range(0..=bytes.len() * 8 - count as usize);
            let mut r = BitReader::new(&bytes, bytes.len() * 8).unwrap();
            assert_eq!(r.read_bits(0).unwrap(), 0);
            let direct = load_bits(&bytes, pos, count);
            // reference: read bit by bit
            let mut acc = 0u64;
            for i in 0..count as usize {
                acc = (acc << 1) | bit_at(&bytes, pos + i);
            }
            assert_eq!(direct, acc, "pos={pos} count={count}");
        }
    }

    #[test]
    fn randomized_field_sequences_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5EED);
        for _ in 0..500 {
            let fields: Vec<(u64, u32)> = (0..rng.gen_range(1..=40))
                .map(|_| {
                    let count = rng.gen_range(0..=64u32);
                    (rng.gen::<u64>() & mask(count), count)
                })
                .collect();
            let mut w = BitWriter::new();
            for &(v, c) in &fields {
                w.write_bits(v, c).unwrap();
            }
            let (bytes, len) = w.finish();
            assert_eq!(len, fields.iter().map(|&(_, c)| c as usize).sum::<usize>());
            assert_eq!(bytes.len(), len.div_ceil(8));
            let mut r = BitReader::new(&bytes, len).unwrap();
            for &(v, c) in &fields {
                assert_eq!(r.read_bits(c).unwrap(), v);
            }
        }
    }

    #[test]
    fn copy_bits_preserves_unaligned_runs() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let src: Vec<u8> = (0..32).map(|_| rng.gen()).collect();
        for _ in 0..200 {
            let count = rng.gen_range(0..200usize);
            let pos = rng.gen_range(0..=src.len() * 8 - count);
            let mut w = BitWriter::new();
            w.write_bits(0b1, 1).unwrap(); // force misalignment
            w.copy_bits(&src, pos, count);
            let (bytes, len) = w.finish();
            assert_eq!(len, count + 1);
            let mut r = BitReader::new(&bytes, len).unwrap();
            r.read_bit().unwrap();
            for i in 0..count {
                assert_eq!(r.read_bit().unwrap() as u64, bit_at(&src, pos + i));
            }
        }
    }
}
