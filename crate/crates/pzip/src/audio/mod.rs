//! Lossy audio codec: MDCT analysis, band-limiting, rate-controlled
//! quantization, and fixed-size Huffman-coded frames.
//!
//! The stream chops each channel into 1152-sample frames of two 576-sample
//! granules. Every granule is transformed by a windowed MDCT with 50%
//! overlap, stripped of bins above the cutoff frequency, and the frame's
//! coefficients are quantized to whatever precision fits the constant
//! per-frame bit budget. Frames carry their own Huffman tables and a CRC,
//! and are all exactly the same size, so the output bitrate is constant
//! and any frame can be found by arithmetic.
//!
//! Encoding supports three execution strategies (serial, frame ranges per
//! worker, and a shared (frame, channel) task queue) that produce
//! byte-identical streams.

pub mod frame;
pub mod mdct;
pub mod quant;
pub mod stream;
pub mod wav;

pub use mdct::{Mdct, GRANULE};
pub use quant::{band_strip, dequantize, quantize, quantize_loop, QuantizedChannel};
pub use stream::{
    decode, encode, profile_stages, EncoderConfig, StageProfile, Strategy, AUDIO_MAGIC,
    FRAME_SAMPLES,
};
pub use wav::{parse_wav, write_wav, WavAudio};
