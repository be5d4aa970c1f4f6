//! Parallel compression toolkit.
//!
//! Four codecs behind one set of containers:
//!
//! * [`huffman`] — canonical Huffman coding of whole byte streams.
//! * [`bwt`] — block-sorting pipeline (Burrows-Wheeler transform, then
//!   move-to-front, run-length coding, and Huffman).
//! * [`lzss`] — LZSS operating on *bits* rather than bytes, with a sliding
//!   window, configurable field widths, and pluggable initial dictionaries.
//! * [`audio`] — a simplified MP3-style lossy codec: windowed MDCT,
//!   band-limiting, rate-controlled quantization, and CRC-protected frames.
//!
//! [`parallel`] runs the lossless codecs over independent segments or, for
//! LZSS, cooperatively across one shared window. [`metrics`] has the
//! measurement plumbing (compression reports, benchmark tables, file read
//! throughput). The `pzip` binary wires everything to a command line.
//!
//! Every container is deterministic: compressing the same bytes with the
//! same settings yields the same output regardless of worker count or
//! scheduling.

pub mod audio;
pub mod bitio;
pub mod bwt;
pub mod error;
pub mod huffman;
pub mod lzss;
pub mod metrics;
pub mod parallel;

pub(crate) mod wire;

pub use error::{Error, Result};

/// Decompress any container produced by this crate, routing on its magic.
///
/// `workers` only matters for segmented containers, whose chunks can be
/// decoded concurrently; the serial formats ignore it.
pub fn decompress_any(packed: &[u8], workers: usize) -> Result<Vec<u8>> {
    if packed.len() < 4 {
        return Err(Error::Truncated);
    }
    let magic: [u8; 4] = packed[..4].try_into().expect("four bytes");
    match &magic {
        m if *m == huffman::HUFFMAN_MAGIC => huffman::decompress(packed),
        m if *m == bwt::BWT_MAGIC => bwt::decompress(packed),
        m if *m == lzss::LZSS_MAGIC => lzss::decompress(packed),
        m if *m == parallel::SEGMENT_MAGIC => parallel::segment_decompress(packed, workers),
        _ => Err(Error::BadMagic {
            expected: huffman::HUFFMAN_MAGIC,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn routes_every_container_format_by_magic() {
        let data = b"the quick brown fox jumps over the lazy dog".repeat(40);
        let packed = [
            huffman::compress(&data).unwrap(),
            bwt::compress(&data, bwt::DEFAULT_BLOCK_SIZE).unwrap(),
            lzss::compress(&data, &lzss::LzssConfig::default()).unwrap(),
            parallel::segment_compress(&data, &parallel::SegmentCodec::Huffman, 3).unwrap(),
        ];
        for p in &packed {
            assert_eq!(decompress_any(p, 2).unwrap(), data);
        }
        assert!(matches!(
            decompress_any(b"nope-not-a-container", 1),
            Err(Error::BadMagic { .. })
        ));
        assert!(matches!(decompress_any(b"xy", 1), Err(Error::Truncated)));
    }
}
