//! The audio container and the three encode strategies.
//!
//! Layout: a 29-byte header (magic, sample rate, channel count, frame
//! count, true sample count, bitrate, cutoff), then `total_frames`
//! constant-size frames. The last frame is analysis padding: it completes
//! the final overlap-add so every real sample has both of its windowed
//! halves.
//!
//! Encoding is organized as three pure stages per (frame, channel) —
//! transform, quantize, pack — which makes the execution strategies
//! interchangeable: serial runs everything in order, segmented gives each
//! worker a contiguous frame range, and work-sharing feeds (frame,
//! channel) tasks to a shared queue. All three emit byte-identical
//! streams; they only differ in who computes what.

use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::parallel::{chunk_ranges, WorkerPool};
use crate::wire::{self, Cursor};

use super::frame::{channel_budget, decode_frame, encode_frame, frame_len_bytes};
use super::mdct::{Mdct, GRANULE};
use super::quant::{band_strip, dequantize, quantize_loop, QuantizedChannel};
use super::wav::WavAudio;

/// Container magic for an audio stream.
pub const AUDIO_MAGIC: [u8; 4] = *b"PZA1";

/// Samples per frame and channel: two granules.
pub const FRAME_SAMPLES: usize = 2 * GRANULE;

const HEADER_BYTES: usize = 29;

/// How encoding work is spread over threads. Every strategy produces the
/// same bytes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// One thread does everything in order.
    Serial,
    /// Each worker encodes a contiguous range of frames.
    Segmented,
    /// Workers pull (frame, channel) transform/quantize tasks from a
    /// shared queue; packing stays in frame order.
    WorkSharing,
}

#[derive(Debug, Clone, Copy)]
pub struct EncoderConfig {
    /// Output bits per second (default 128 kbit/s).
    pub bitrate: u32,
    /// Spectral cutoff; bins above it are discarded (default 17 kHz).
    pub cutoff_hz: u32,
    pub strategy: Strategy,
    pub workers: usize,
}

impl Default for EncoderConfig {
    fn default() -> Self {
        EncoderConfig {
            bitrate: 128_000,
            cutoff_hz: 17_000,
            strategy: Strategy::Serial,
            workers: 1,
        }
    }
}

/// Everything the per-frame stages need, planned once per stream.
struct Stages {
    mdct: Mdct,
    sample_rate: u32,
    cutoff_hz: u32,
    budget: u64,
    frame_bytes: usize,
}

impl Stages {
    fn new(sample_rate: u32, channels: usize, cfg: &EncoderConfig) -> Result<Stages> {
        let frame_bytes = frame_len_bytes(cfg.bitrate, sample_rate);
        let budget = channel_budget(frame_bytes, channels)?;
        Ok(Stages {
            mdct: Mdct::new(GRANULE),
            sample_rate,
            cutoff_hz: cfg.cutoff_hz,
            budget,
            frame_bytes,
        })
    }

    /// Transform stage: MDCT both granules of `frame` against the raw PCM
    /// (the look-back window reads the samples themselves, so frames don't
    /// depend on each other's processing) and strip bins above the cutoff.
    fn transform(&self, pcm: &[i16], frame: usize) -> Vec<f64> {
        let mut spectrum = Vec::with_capacity(FRAME_SAMPLES);
        for g in 0..2 {
            let t = 2 * frame + g;
            // analysis block: 576 samples of history, then the granule;
            // history before the stream and samples past its end are zero
            let block: Vec<f64> = (0..2 * GRANULE)
                .map(|i| {
                    (t * GRANULE + i)
                        .checked_sub(GRANULE)
                        .and_then(|j| pcm.get(j))
                        .map_or(0.0, |&s| s as f64)
                })
                .collect();
            let mut bins = self.mdct.forward(&block);
            band_strip(&mut bins, self.sample_rate, self.cutoff_hz);
            spectrum.extend_from_slice(&bins);
        }
        spectrum
    }

    /// Quantize stage: fit the frame's coefficients into the bit budget.
    fn quantize(&self, spectrum: &[f64]) -> Result<QuantizedChannel> {
        quantize_loop(spectrum, self.budget)
    }

    /// Pack stage: fixed-size frame bytes.
    fn pack(&self, frame: usize, channels: &[QuantizedChannel]) -> Result<Vec<u8>> {
        encode_frame(frame as u32, channels, self.frame_bytes)
    }

    fn encode_one(&self, audio: &WavAudio, frame: usize) -> Result<Vec<u8>> {
        let quantized: Result<Vec<QuantizedChannel>> = audio
            .channels
            .iter()
            .map(|pcm| self.quantize(&self.transform(pcm, frame)))
            .collect();
        self.pack(frame, &quantized?)
    }
}

/// Frames needed for `samples` per channel: enough to cover them, plus one
/// flush frame so the last real samples get their second overlap half.
fn frame_count(samples: usize) -> usize {
    samples.div_ceil(FRAME_SAMPLES) + 1
}

/// Encode PCM audio into a constant-bitrate stream.
pub fn encode(audio: &WavAudio, cfg: &EncoderConfig) -> Result<Vec<u8>> {
    let channels = audio.channel_count();
    if channels == 0 || channels > 8 {
        return Err(Error::UnsupportedWav(format!("{channels} channels")));
    }
    if audio.sample_rate == 0 {
        return Err(Error::UnsupportedWav("zero sample rate".into()));
    }
    let samples = audio.sample_count();
    if audio.channels.iter().any(|c| c.len() != samples) {
        return Err(Error::UnsupportedWav("channels differ in length".into()));
    }
    let stages = Stages::new(audio.sample_rate, channels, cfg)?;
    let frames = frame_count(samples);
    if frames > u32::MAX as usize {
        return Err(Error::UnsupportedWav("stream too long".into()));
    }

    let mut out = Vec::with_capacity(HEADER_BYTES + frames * stages.frame_bytes);
    out.extend_from_slice(&AUDIO_MAGIC);
    wire::put_u32(&mut out, audio.sample_rate);
    out.push(channels as u8);
    wire::put_u32(&mut out, frames as u32);
    wire::put_u64(&mut out, samples as u64);
    wire::put_u32(&mut out, cfg.bitrate);
    wire::put_u32(&mut out, cfg.cutoff_hz);

    match cfg.strategy {
        Strategy::Serial => {
            for f in 0..frames {
                let frame = stages.encode_one(audio, f).map_err(|e| e.in_frame(f as u32))?;
                out.extend_from_slice(&frame);
            }
        }
        Strategy::Segmented => {
            let pool = WorkerPool::new(cfg.workers.max(1))?;
            let ranges = chunk_ranges(frames, cfg.workers.max(1));
            let parts: Result<Vec<Vec<u8>>> = pool
                .run(ranges.len(), |i| {
                    let (lo, hi) = ranges[i];
                    let mut part = Vec::with_capacity((hi - lo) * stages.frame_bytes);
                    for f in lo..hi {
                        let frame =
                            stages.encode_one(audio, f).map_err(|e| e.in_frame(f as u32))?;
                        part.extend_from_slice(&frame);
                    }
                    Ok(part)
                })
                .into_iter()
                .collect();
            for part in parts? {
                out.extend_from_slice(&part);
            }
        }
        Strategy::WorkSharing => {
            let pool = WorkerPool::new(cfg.workers.max(1))?;
            let quantized: Result<Vec<QuantizedChannel>> = pool
                .run(frames * channels, |task| {
                    let (f, ch) = (task / channels, task % channels);
                    stages
                        .quantize(&stages.transform(&audio.channels[ch], f))
                        .map_err(|e| e.in_frame(f as u32))
                })
                .into_iter()
                .collect();
            let quantized = quantized?;
            for f in 0..frames {
                let slice = &quantized[f * channels..(f + 1) * channels];
                let frame = stages.pack(f, slice).map_err(|e| e.in_frame(f as u32))?;
                out.extend_from_slice(&frame);
            }
        }
    }
    Ok(out)
}

/// Decode a stream back to PCM. Output length equals the encoded true
/// sample count; values are clamped to the 16-bit range.
pub fn decode(bytes: &[u8]) -> Result<WavAudio> {
    let mut c = Cursor::new(bytes);
    c.expect_magic(&AUDIO_MAGIC)?;
    let sample_rate = c.u32()?;
    let channels = c.u8()? as usize;
    let frames = c.u32()? as usize;
    let samples = c.u64()? as usize;
    let bitrate = c.u32()?;
    let _cutoff_hz = c.u32()?;
    if channels == 0 || channels > 8 || sample_rate == 0 {
        return Err(Error::Corrupt("implausible stream header".into()));
    }
    let frame_bytes = frame_len_bytes(bitrate, sample_rate);
    channel_budget(frame_bytes, channels)?;
    if c.remaining() != frames * frame_bytes {
        return Err(Error::Corrupt(format!(
            "{} payload bytes for {frames} frames of {frame_bytes}",
            c.remaining()
        )));
    }
    if frames == 0 || samples > (frames - 1) * FRAME_SAMPLES {
        return Err(Error::Corrupt(
            "frame count cannot cover the sample count".into(),
        ));
    }

    let mdct = Mdct::new(GRANULE);
    // Overlap-add accumulators; block t of a channel lands at t*576.
    let total_blocks = 2 * frames;
    let mut ola = vec![vec![0.0f64; (total_blocks + 1) * GRANULE]; channels];
    for f in 0..frames {
        let raw = c.take(frame_bytes)?;
        let frame =
            decode_frame(raw, channels, FRAME_SAMPLES).map_err(|e| e.in_frame(f as u32))?;
        if frame.index != f as u32 {
            return Err(Error::Corrupt(format!(
                "frame {f} carries index {}",
                frame.index
            )));
        }
        for (ch, q) in frame.channels.iter().enumerate() {
            let coeffs = dequantize(&q.values, q.exponent);
            for g in 0..2 {
                let t = 2 * f + g;
                let synth = mdct.inverse(&coeffs[g * GRANULE..(g + 1) * GRANULE]);
                let at = t * GRANULE;
                for (i, v) in synth.iter().enumerate() {
                    ola[ch][at + i] += v;
                }
            }
        }
    }
    c.expect_end()?;

    // Sample s was analyzed with 576 samples of history, so it sits at
    // s + 576 in the overlap-add buffer.
    let channels_out: Vec<Vec<i16>> = ola
        .into_iter()
        .map(|buf| {
            buf[GRANULE..GRANULE + samples]
                .iter()
                .map(|&v| v.round().clamp(i16::MIN as f64, i16::MAX as f64) as i16)
                .collect()
        })
        .collect();
    Ok(WavAudio {
        sample_rate,
        channels: channels_out,
    })
}

/// Wall-clock seconds spent in each encode stage over a frame prefix.
#[derive(Debug, Clone, Serialize)]
pub struct StageProfile {
    pub frames: usize,
    pub transform_seconds: f64,
    pub quantize_seconds: f64,
    pub pack_seconds: f64,
}

impl StageProfile {
    /// Percentage split (transform, quantize, pack); sums to 100.
    pub fn percentages(&self) -> [f64; 3] {
        let sum = self.transform_seconds + self.quantize_seconds + self.pack_seconds;
        if sum <= 0.0 {
            return [0.0; 3];
        }
        [
            self.transform_seconds / sum * 100.0,
            self.quantize_seconds / sum * 100.0,
            self.pack_seconds / sum * 100.0,
        ]
    }
}

/// Time the three stages separately over up to `max_frames` frames.
pub fn profile_stages(
    audio: &WavAudio,
    cfg: &EncoderConfig,
    max_frames: usize,
) -> Result<StageProfile> {
    let channels = audio.channel_count();
    if channels == 0 {
        return Err(Error::UnsupportedWav("no channels".into()));
    }
    let stages = Stages::new(audio.sample_rate, channels, cfg)?;
    let frames = frame_count(audio.sample_count()).min(max_frames.max(1));
    let mut profile = StageProfile {
        frames,
        transform_seconds: 0.0,
        quantize_seconds: 0.0,
        pack_seconds: 0.0,
    };
    for f in 0..frames {
        let mut quantized = Vec::with_capacity(channels);
        for pcm in &audio.channels {
            let t0 = Instant::now();
            let spectrum = stages.transform(pcm, f);
            profile.transform_seconds += t0.elapsed().as_secs_f64();
            let t1 = Instant::now();
            quantized.push(stages.quantize(&spectrum)?);
            profile.quantize_seconds += t1.elapsed().as_secs_f64();
        }
        let t2 = Instant::now();
        stages.pack(f, &quantized)?;
        profile.pack_seconds += t2.elapsed().as_secs_f64();
    }
    Ok(profile)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// A few seconds of stereo: detuned sine stacks with an envelope.
    fn synth(seconds: f64) -> WavAudio {
        let rate = 44_100u32;
        let n = (seconds * rate as f64) as usize;
        let tone = |freqs: &[f64], phase: f64| -> Vec<i16> {
            (0..n)
                .map(|i| {
                    let t = i as f64 / rate as f64;
                    let env = 0.6 + 0.4 * (2.0 * std::f64::consts::PI * 0.37 * t).sin();
                    let s: f64 = freqs
                        .iter()
                        .map(|f| (2.0 * std::f64::consts::PI * (f * t + phase)).sin())
                        .sum();
                    (env * s / freqs.len() as f64 * 12000.0) as i16
                })
                .collect()
        };
        WavAudio {
            sample_rate: rate,
            channels: vec![
                tone(&[220.0, 440.0, 997.0], 0.0),
                tone(&[329.6, 659.3, 1320.0], 0.25),
            ],
        }
    }

    fn snr_db(reference: &[i16], decoded: &[i16]) -> f64 {
        let signal: f64 = reference.iter().map(|&x| (x as f64).powi(2)).sum();
        let noise: f64 = reference
            .iter()
            .zip(decoded)
            .map(|(&x, &y)| ((x - y) as f64).powi(2))
            .sum();
        10.0 * (signal / noise.max(1e-12)).log10()
    }

    #[test]
    fn streams_decode_to_the_original_shape_with_reasonable_fidelity() {
        let audio = synth(0.6);
        let packed = encode(&audio, &EncoderConfig::default()).unwrap();
        let frames = frame_count(audio.sample_count());
        assert_eq!(packed.len(), HEADER_BYTES + frames * 417, "constant bitrate");
        let decoded = decode(&packed).unwrap();
        assert_eq!(decoded.sample_rate, 44_100);
        assert_eq!(decoded.channel_count(), 2);
        assert_eq!(decoded.sample_count(), audio.sample_count());
        for ch in 0..2 {
            let snr = snr_db(&audio.channels[ch], &decoded.channels[ch]);
            assert!(snr > 25.0, "channel {ch}: {snr:.1} dB");
        }
    }

    #[test]
    fn all_strategies_emit_identical_bytes() {
        let audio = synth(0.35);
        let base = encode(&audio, &EncoderConfig::default()).unwrap();
        for (strategy, workers) in [
            (Strategy::Serial, 1),
            (Strategy::Segmented, 3),
            (Strategy::Segmented, 16),
            (Strategy::WorkSharing, 4),
            (Strategy::WorkSharing, 9),
        ] {
            let cfg = EncoderConfig {
                strategy,
                workers,
                ..EncoderConfig::default()
            };
            assert_eq!(
                encode(&audio, &cfg).unwrap(),
                base,
                "{strategy:?} x{workers}"
            );
        }
    }

    #[test]
    fn mono_short_and_empty_audio_round_trip() {
        for n in [0usize, 5, 1152, 3000] {
            let audio = WavAudio {
                sample_rate: 32_000,
                channels: vec![(0..n).map(|i| ((i * 83) % 9000) as i16 - 4500).collect()],
            };
            let packed = encode(&audio, &EncoderConfig::default()).unwrap();
            let decoded = decode(&packed).unwrap();
            assert_eq!(decoded.sample_count(), n);
            assert_eq!(decoded.channel_count(), 1);
        }
    }

    #[test]
    fn tampered_streams_name_the_bad_frame() {
        let audio = synth(0.2);
        let packed = encode(&audio, &EncoderConfig::default()).unwrap();
        let mut corrupt = packed.clone();
        let target = HEADER_BYTES + 3 * 417 + 100; // inside frame 3
        corrupt[target] ^= 0x10;
        match decode(&corrupt) {
            Err(Error::Frame { index: 3, source }) => {
                assert!(matches!(*source, Error::CrcMismatch { .. }));
            }
            other => panic!("expected frame 3 CRC failure, got {other:?}"),
        }

        let mut swapped = packed.clone();
        let (a, b) = (HEADER_BYTES, HEADER_BYTES + 417);
        let tmp: Vec<u8> = swapped[a..b].to_vec();
        swapped.copy_within(b..b + 417, a);
        swapped[b..b + 417].copy_from_slice(&tmp);
        assert!(matches!(decode(&swapped), Err(Error::Corrupt(_))));

        assert!(decode(&packed[..packed.len() - 10]).is_err());
        let mut bad_magic = packed;
        bad_magic[0] ^= 1;
        assert!(matches!(decode(&bad_magic), Err(Error::BadMagic { .. })));
    }

    #[test]
    fn profiling_accounts_for_every_stage() {
        let audio = synth(0.3);
        let profile = profile_stages(&audio, &EncoderConfig::default(), 8).unwrap();
        assert_eq!(profile.frames, 8);
        let pct = profile.percentages();
        assert!((pct.iter().sum::<f64>() - 100.0).abs() < 1e-9);
        assert!(pct.iter().all(|&p| p >= 0.0));
    }

    #[test]
    fn infeasible_bitrates_are_rejected_up_front() {
        let audio = synth(0.05);
        let cfg = EncoderConfig {
            bitrate: 2_000, // 6-byte frames cannot hold the headers
            ..EncoderConfig::default()
        };
        assert!(matches!(
            encode(&audio, &cfg),
            Err(Error::BudgetInfeasible { .. })
        ));
    }
}
