//! Fixed-size audio frames.
//!
//! Every frame is exactly `frame_len_bytes` long — constant bitrate by
//! construction — and lays out as:
//!
//! ```text
//! [0xA5 0x3C] [body, zero-padded] [CRC-16 big-endian]
//! body: frame index (32 bits), then per channel:
//!       step exponent (16 bits, two's complement)
//!       32 x 5-bit Huffman code lengths
//!       payload bit count (32 bits)
//!       payload (count + coded symbols)
//! ```
//!
//! The CRC (polynomial 0x8005, init 0xFFFF, MSB first, no final XOR)
//! covers everything between the sync bytes and the checksum itself.

use crate::bitio::{BitReader, BitWriter};
use crate::error::{Error, Result};
use crate::wire::bytes_for_bits;

use super::quant::{ChannelCoder, QuantizedChannel, SYMBOL_COUNT};

/// Frame sync bytes.
pub const FRAME_MAGIC: [u8; 2] = [0xA5, 0x3C];

/// Fixed per-channel header bits: exponent + table lengths + payload size.
const CHANNEL_OVERHEAD_BITS: u64 = 16 + SYMBOL_COUNT as u64 * 5 + 32;
/// Magic (16) + frame index (32) + CRC (16).
const FRAME_OVERHEAD_BITS: u64 = 64;

/// Bytes per frame at a given bitrate: the bits one frame's worth of
/// samples occupies at that rate, floored to whole bytes.
pub fn frame_len_bytes(bitrate: u32, sample_rate: u32) -> usize {
    ((bitrate as u64 * super::stream::FRAME_SAMPLES as u64 / sample_rate as u64) / 8) as usize
}

/// Payload bit budget for each channel of a frame, after all fixed fields.
pub fn channel_budget(frame_bytes: usize, channels: usize) -> Result<u64> {
    let total = frame_bytes as u64 * 8;
    let body = total
        .checked_sub(FRAME_OVERHEAD_BITS)
        .ok_or(Error::BudgetInfeasible {
            budget: total,
            fixed: FRAME_OVERHEAD_BITS,
        })?;
    let per_channel = body / channels.max(1) as u64;
    per_channel
        .checked_sub(CHANNEL_OVERHEAD_BITS)
        .filter(|&b| b >= 16)
        .ok_or(Error::BudgetInfeasible {
            budget: per_channel,
            fixed: CHANNEL_OVERHEAD_BITS + 16,
        })
}

/// CRC-16, polynomial 0x8005, init 0xFFFF, MSB first, no final XOR.
pub fn crc16(bytes: &[u8]) -> u16 {
    let mut crc: u16 = 0xFFFF;
    for &b in bytes {
        crc ^= (b as u16) << 8;
        for _ in 0..8 {
            crc = if crc & 0x8000 != 0 {
                (crc << 1) ^ 0x8005
            } else {
                crc << 1
            };
        }
    }
    crc
}

/// Pack one frame. Fails if the channel payloads overflow the fixed frame
/// size (the rate loop guarantees they do not).
pub fn encode_frame(
    frame_index: u32,
    channels: &[QuantizedChannel],
    frame_bytes: usize,
) -> Result<Vec<u8>> {
    let mut body = BitWriter::with_capacity_bits(frame_bytes * 8);
    body.write_bits(frame_index as u64, 32)?;
    for ch in channels {
        let coder = ChannelCoder::prepare(&ch.values)?;
        body.write_bits(ch.exponent as i16 as u16 as u64, 16)?;
        for len in coder.table_lengths() {
            body.write_bits(len as u64, 5)?;
        }
        body.write_bits(coder.bits(), 32)?;
        coder.write(&ch.values, &mut body)?;
    }
    let body_bytes = frame_bytes - 4; // minus magic and CRC
    if bytes_for_bits(body.bit_len() as u64) > body_bytes {
        return Err(Error::Corrupt(format!(
            "frame body of {} bits overflows {} byte frames",
            body.bit_len(),
            frame_bytes
        )));
    }
    let (mut packed, _) = body.finish();
    packed.resize(body_bytes, 0);
    let mut out = Vec::with_capacity(frame_bytes);
    out.extend_from_slice(&FRAME_MAGIC);
    out.extend_from_slice(&packed);
    out.extend_from_slice(&crc16(&packed).to_be_bytes());
    Ok(out)
}

/// One decoded frame: its index and each channel's quantized coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodedFrame {
    pub index: u32,
    pub channels: Vec<QuantizedChannel>,
}

/// Unpack one frame of `channels` channels, each carrying `spectrum_len`
/// coefficients. `bytes` must be exactly one frame.
pub fn decode_frame(bytes: &[u8], channels: usize, spectrum_len: usize) -> Result<DecodedFrame> {
    if bytes.len() < 5 {
        return Err(Error::Truncated);
    }
    if bytes[..2] != FRAME_MAGIC {
        return Err(Error::Corrupt("bad frame sync bytes".into()));
    }
    let body = &bytes[2..bytes.len() - 2];
    let stored = u16::from_be_bytes([bytes[bytes.len() - 2], bytes[bytes.len() - 1]]);
    let computed = crc16(body);
    if stored != computed {
        return Err(Error::CrcMismatch { stored, computed });
    }
    let mut r = BitReader::new(body, body.len() * 8)?;
    let index = r.read_bits(32)? as u32;
    let mut out = Vec::with_capacity(channels);
    for _ in 0..channels {
        let exponent = r.read_bits(16)? as u16 as i16 as i32;
        let mut table_lengths = [0u8; SYMBOL_COUNT];
        for len in table_lengths.iter_mut() {
            *len = r.read_bits(5)? as u8;
        }
        let declared_bits = r.read_bits(32)?;
        let before = r.position();
        let values = super::quant::read_payload(&mut r, &table_lengths, spectrum_len)?;
        let consumed = (r.position() - before) as u64;
        if consumed != declared_bits {
            return Err(Error::Corrupt(format!(
                "payload declared {declared_bits} bits but decoded {consumed}"
            )));
        }
        out.push(QuantizedChannel { exponent, values });
    }
    Ok(DecodedFrame {
        index,
        channels: out,
    })
}
