//! Minimal RIFF/WAVE reader and writer for 16-bit PCM.

use crate::error::{Error, Result};
use crate::wire::Cursor;

/// Decoded PCM audio, one sample vector per channel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WavAudio {
    pub sample_rate: u32,
    pub channels: Vec<Vec<i16>>,
}

impl WavAudio {
    /// Samples per channel.
    pub fn sample_count(&self) -> usize {
        self.channels.first().map_or(0, |c| c.len())
    }

    pub fn channel_count(&self) -> usize {
        self.channels.len()
    }

    /// Playing time in seconds.
    pub fn duration(&self) -> f64 {
        self.sample_count() as f64 / self.sample_rate as f64
    }
}

/// Parse a 16-bit PCM WAV file. Unknown chunks are skipped; float, ADPCM
/// and other encodings are refused rather than misread.
pub fn parse_wav(bytes: &[u8]) -> Result<WavAudio> {
    let mut c = Cursor::new(bytes);
    c.expect_magic(b"RIFF")?;
    let _riff_size = c.u32()?;
    if c.take(4)? != b"WAVE" {
        return Err(Error::UnsupportedWav("not a WAVE container".into()));
    }
    let mut format: Option<(u16, u16, u32, u16)> = None; // tag, channels, rate, bits
    let mut data: Option<&[u8]> = None;
    while c.remaining() >= 8 {
        let id: [u8; 4] = c.take(4)?.try_into().expect("four bytes");
        let size = c.u32()? as usize;
        let body = c.take(size.min(c.remaining()))?;
        if body.len() < size && &id != b"data" {
            return Err(Error::Truncated);
        }
        match &id {
            b"fmt " => {
                let mut f = Cursor::new(body);
                let tag = f.u16()?;
                let channels = f.u16()?;
                let rate = f.u32()?;
                let _byte_rate = f.u32()?;
                let _align = f.u16()?;
                let bits = f.u16()?;
                format = Some((tag, channels, rate, bits));
            }
            b"data" => {
                data = Some(body);
            }
            _ => {} // fact, LIST, cue, ... — irrelevant here
        }
        if size % 2 == 1 && c.remaining() > 0 {
            c.take(1)?; // chunk bodies are word-aligned
        }
    }
    let (tag, channels, rate, bits) =
        format.ok_or_else(|| Error::UnsupportedWav("missing fmt chunk".into()))?;
    if tag != 1 {
        return Err(Error::UnsupportedWav(format!(
            "format tag {tag} (only PCM is supported)"
        )));
    }
    if bits != 16 {
        return Err(Error::UnsupportedWav(format!(
            "{bits}-bit samples (only 16-bit is supported)"
        )));
    }
    if channels == 0 || channels > 8 {
        return Err(Error::UnsupportedWav(format!("{channels} channels")));
    }
    if rate == 0 {
        return Err(Error::UnsupportedWav("zero sample rate".into()));
    }
    let data = data.ok_or_else(|| Error::UnsupportedWav("missing data chunk".into()))?;
    let stride = channels as usize * 2;
    let frames = data.len() / stride; // trailing partial frame is dropped
    let mut out: Vec<Vec<i16>> = vec![Vec::with_capacity(frames); channels as usize];
    for f in 0..frames {
        for (ch, samples) in out.iter_mut().enumerate() {
            let at = f * stride + ch * 2;
            samples.push(i16::from_le_bytes([data[at], data[at + 1]]));
        }
    }
    Ok(WavAudio {
        sample_rate: rate,
        channels: out,
    })
}

/// Serialize to a 16-bit PCM WAV file. All channels must be equally long.
pub fn write_wav(audio: &WavAudio) -> Result<Vec<u8>> {
    let channels = audio.channel_count();
    if channels == 0 || channels > 8 {
        return Err(Error::UnsupportedWav(format!("{channels} channels")));
    }
    let n = audio.sample_count();
    if audio.channels.iter().any(|c| c.len() != n) {
        return Err(Error::UnsupportedWav("channels differ in length".into()));
    }
    let data_len = n * channels * 2;
    let mut out = Vec::with_capacity(44 + data_len);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(36 + data_len as u32).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes()); // PCM
    out.extend_from_slice(&(channels as u16).to_le_bytes());
    out.extend_from_slice(&audio.sample_rate.to_le_bytes());
    out.extend_from_slice(&(audio.sample_rate * channels as u32 * 2).to_le_bytes());
    out.extend_from_slice(&(channels as u16 * 2).to_le_bytes());
    out.extend_from_slice(&16u16.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&(data_len as u32).to_le_bytes());
    for f in 0..n {
        for ch in &audio.channels {
            out.extend_from_slice(&ch[f].to_le_bytes());
        }
    }
    Ok(out)
}
