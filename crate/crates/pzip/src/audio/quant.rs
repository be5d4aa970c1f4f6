//! Rate-controlled quantization of MDCT coefficients.
//!
//! Coefficients are quantized mid-tread with a step of `2^(e/4)`; the
//! exponent `e` is the one knob the rate loop turns. Quantized values in
//! `-15..=15` become the Huffman symbols 0..=30; anything larger is coded
//! as the escape symbol 31 followed by the raw 16-bit value. A channel's
//! payload is a 16-bit count of leading coefficients that include the last
//! nonzero one, then that many coded symbols.
//!
//! [`quantize_loop`] picks `e` by bisection between two analytic brackets:
//! the smallest exponent whose escapes still fit 16 bits, and the exponent
//! that flattens everything to zero (which always fits). Every candidate
//! is costed by actually building its Huffman table, so the chosen
//! exponent is verified to fit the budget, never assumed.

use crate::bitio::{BitReader, BitWriter};
use crate::error::{Error, Result};
use crate::huffman::{self, CodeTable, FrequencyTable, StreamDecoder};

/// Symbols 0..=30 carry values -15..=15; 31 escapes to a raw 16-bit value.
pub const SYMBOL_COUNT: usize = 32;
pub const ESCAPE_SYMBOL: u8 = 31;
const SYMBOL_BIAS: i64 = 15;
/// Largest magnitude an escape can carry (16-bit two's complement).
pub const ESCAPE_LIMIT: i64 = i16::MAX as i64;
/// A payload is never smaller than its 16-bit coefficient count.
const COUNT_BITS: u64 = 16;

/// One channel of one frame, quantized: the step exponent and the
/// coefficient values (zeros included).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantizedChannel {
    pub exponent: i32,
    pub values: Vec<i64>,
}

/// Quantization step for exponent `e`: 2^(e/4).
pub fn step_size(exponent: i32) -> f64 {
    (exponent as f64 * 0.25).exp2()
}

/// Zero every bin whose center frequency exceeds `cutoff_hz`. Bin `k` of a
/// granule spanning 0..Nyquist is centered at `(k + 1/2) * rate / (2 len)`.
pub fn band_strip(granule: &mut [f64], sample_rate: u32, cutoff_hz: u32) {
    let width = sample_rate as f64 / (2.0 * granule.len() as f64);
    for (k, x) in granule.iter_mut().enumerate() {
        if (k as f64 + 0.5) * width > cutoff_hz as f64 {
            *x = 0.0;
        }
    }
}

/// Mid-tread quantization: `round(x / step)`, halves away from zero.
pub fn quantize(spectrum: &[f64], exponent: i32) -> Vec<i64> {
    let inv = 1.0 / step_size(exponent);
    spectrum.iter().map(|x| (x * inv).round() as i64).collect()
}

/// Reconstruct coefficients: `q * step`.
pub fn dequantize(values: &[i64], exponent: i32) -> Vec<f64> {
    let step = step_size(exponent);
    values.iter().map(|&q| q as f64 * step).collect()
}

fn symbol_for(v: i64) -> u8 {
    if v.abs() <= SYMBOL_BIAS {
        (v + SYMBOL_BIAS) as u8
    } else {
        ESCAPE_SYMBOL
    }
}

/// A channel payload ready for the frame packer: its Huffman table and
/// exact bit cost.
pub struct ChannelCoder {
    table: Option<CodeTable>,
    count: usize,
    bits: u64,
}

impl ChannelCoder {
    /// Build the Huffman table for `values` and cost the payload. Fails if
    /// any value exceeds the escape range.
    pub fn prepare(values: &[i64]) -> Result<ChannelCoder> {
        let count = values
            .iter()
            .rposition(|&v| v != 0)
            .map_or(0, |last| last + 1);
        if count == 0 {
            return Ok(ChannelCoder {
                table: None,
                count: 0,
                bits: COUNT_BITS,
            });
        }
        let mut freq: FrequencyTable = [0; 256];
        let mut escape_bits = 0u64;
        for &v in &values[..count] {
            if v.abs() > ESCAPE_LIMIT {
                return Err(Error::ValueOutOfRange {
                    value: v.unsigned_abs(),
                    bits: 16,
                });
            }
            freq[symbol_for(v) as usize] += 1;
            if symbol_for(v) == ESCAPE_SYMBOL {
                escape_bits += 16;
            }
        }
        let table = huffman::build_code_table(&freq)?;
        let symbol_bits: u64 = values[..count]
            .iter()
            .map(|&v| table.length(symbol_for(v)) as u64)
            .sum();
        debug_assert!(
            (0..SYMBOL_COUNT).all(|s| table.length(s as u8) < 32),
            "a 32-symbol table always fits 5-bit lengths"
        );
        Ok(ChannelCoder {
            table: Some(table),
            count,
            bits: COUNT_BITS + symbol_bits + escape_bits,
        })
    }

    /// Payload size in bits, including the count field.
    pub fn bits(&self) -> u64 {
        self.bits
    }

    /// Wire form of the table: a 5-bit code length per symbol (all zero
    /// when the payload is empty).
    pub fn table_lengths(&self) -> [u8; SYMBOL_COUNT] {
        let mut out = [0u8; SYMBOL_COUNT];
        if let Some(t) = &self.table {
            for (s, slot) in out.iter_mut().enumerate() {
                *slot = t.length(s as u8);
            }
        }
        out
    }

    /// Append the payload: count, then coded symbols with inline escapes.
    pub fn write(&self, values: &[i64], out: &mut BitWriter) -> Result<()> {
        out.write_bits(self.count as u64, COUNT_BITS as u32)?;
        if let Some(table) = &self.table {
            for &v in &values[..self.count] {
                let s = symbol_for(v);
                out.write_bits(table.code(s), table.length(s) as u32)?;
                if s == ESCAPE_SYMBOL {
                    out.write_bits(v as i16 as u16 as u64, 16)?;
                }
            }
        }
        Ok(())
    }
}

/// Read one channel payload of `len` coefficients back out of `r`.
pub fn read_payload(
    r: &mut BitReader,
    table_lengths: &[u8; SYMBOL_COUNT],
    len: usize,
) -> Result<Vec<i64>> {
    let count = r.read_bits(COUNT_BITS as u32)? as usize;
    if count > len {
        return Err(Error::Corrupt(format!(
            "coefficient count {count} exceeds spectrum length {len}"
        )));
    }
    let mut values = vec![0i64; len];
    if count == 0 {
        return Ok(values);
    }
    let mut lengths = [0u8; 256];
    lengths[..SYMBOL_COUNT].copy_from_slice(table_lengths);
    let table = huffman::deserialize_table(&lengths)?;
    let decoder = StreamDecoder::new(&table);
    for slot in values.iter_mut().take(count) {
        let s = decoder.decode_one(r)?;
        *slot = if s == ESCAPE_SYMBOL {
            r.read_bits(16)? as u16 as i16 as i64
        } else {
            s as i64 - SYMBOL_BIAS
        };
    }
    Ok(values)
}

/// Smallest exponent whose quantized maximum still fits an escape.
fn lower_bracket(maxabs: f64) -> i32 {
    let mut e = (4.0 * (maxabs / (ESCAPE_LIMIT as f64 + 0.5)).log2()).ceil() as i32;
    while (maxabs / step_size(e)).round() > ESCAPE_LIMIT as f64 {
        e += 1;
    }
    while e > i32::MIN + 8 && (maxabs / step_size(e - 1)).round() <= ESCAPE_LIMIT as f64 {
        e -= 1;
    }
    e
}

/// Smallest exponent that quantizes everything to zero.
fn upper_bracket(maxabs: f64) -> i32 {
    let mut e = (4.0 * (2.0 * maxabs).log2()).ceil() as i32;
    while (maxabs / step_size(e)).round() != 0.0 {
        e += 1;
    }
    while e > i32::MIN + 8 && (maxabs / step_size(e - 1)).round() == 0.0 {
        e -= 1;
    }
    e
}

/// Find the finest quantization of `spectrum` whose payload fits
/// `bit_budget`, by bisecting the exponent between the escape-safety and
/// all-zero brackets. The returned channel's payload is verified to fit.
pub fn quantize_loop(spectrum: &[f64], bit_budget: u64) -> Result<QuantizedChannel> {
    if bit_budget < COUNT_BITS {
        return Err(Error::BudgetInfeasible {
            budget: bit_budget,
            fixed: COUNT_BITS,
        });
    }
    let maxabs = spectrum.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if maxabs == 0.0 {
        return Ok(QuantizedChannel {
            exponent: 0,
            values: vec![0; spectrum.len()],
        });
    }
    let fits = |e: i32| -> Result<bool> {
        Ok(ChannelCoder::prepare(&quantize(spectrum, e))?.bits() <= bit_budget)
    };
    let mut lo = lower_bracket(maxabs);
    let mut hi = upper_bracket(maxabs).max(lo);
    let chosen = if fits(lo)? {
        lo
    } else {
        // invariant: lo does not fit, hi does (all-zero costs 16 bits)
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if fits(mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    };
    if !(i16::MIN as i32..=i16::MAX as i32).contains(&chosen) {
        return Err(Error::Corrupt(format!(
            "step exponent {chosen} outside the 16-bit wire range"
        )));
    }
    Ok(QuantizedChannel {
        exponent: chosen,
        values: quantize(spectrum, chosen),
    })
}
