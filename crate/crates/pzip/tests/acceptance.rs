//! Acceptance gate: twelve end-to-end checks covering compression quality
//! bands, parallel-mode equivalence, audio codec behavior, and measured
//! I/O characteristics. Each check prints the values it measured (visible
//! with `--nocapture` or on failure).
//!
//! Several checks time real work, so every test serializes behind one
//! lock; a failing neighbor must not skew a timing measurement.
//!
//! The speedup checks (`c06`, the second half of `c09`) compare wall
//! clocks across worker counts and can only pass on a machine that
//! actually has multiple hardware threads.

use std::sync::{Mutex, MutexGuard, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pzip::audio::{self, quant, EncoderConfig, Strategy, WavAudio};
use pzip::bitio::{BitReader, BitWriter};
use pzip::lzss::{self, DictMode, LzssConfig, Match, Window};
use pzip::metrics::{self, compression_percent, IoBenchOptions};
use pzip::parallel::{self, SegmentCodec};
use pzip::{bwt, huffman};

/// All acceptance tests run one at a time.
fn gate() -> MutexGuard<'static, ()> {
    static GATE: Mutex<()> = Mutex::new(());
    // A failed timing assertion elsewhere shouldn't abort the rest.
    GATE.lock().unwrap_or_else(|e| e.into_inner())
}

// ---------------------------------------------------------------------
// Shared corpora, generated once from fixed seeds.
// ---------------------------------------------------------------------

/// Common English words in rough frequency order; sampled with a 1/rank
/// weight, they reproduce ordinary prose letter statistics.
const VOCABULARY: &[&str] = &[
    "the", "of", "and", "a", "to", "in", "is", "was", "he", "for", "it", "with", "as", "his",
    "on", "be", "at", "by", "had", "this", "not", "are", "but", "from", "or", "have", "an",
    "they", "which", "one", "you", "were", "her", "all", "she", "there", "would", "their", "we",
    "him", "been", "has", "when", "who", "will", "more", "no", "if", "out", "so", "said", "what",
    "up", "its", "about", "into", "than", "them", "can", "only", "other", "new", "some", "could",
    "time", "these", "two", "may", "then", "do", "first", "any", "my", "now", "such", "like",
    "our", "over", "man", "me", "even", "most", "made", "after", "also", "did", "many", "before",
    "must", "through", "years", "where", "much", "your", "way", "well", "down", "should",
    "because", "each", "just", "those", "people", "how", "too", "little", "state", "good",
    "very", "make", "world", "still", "own", "see", "men", "work", "long", "get", "here",
    "between", "both", "life", "being", "under", "never", "day", "same", "another", "know",
    "while", "last", "might", "great", "old", "year", "off", "come", "since", "against", "go",
    "came", "right", "used", "take", "three", "himself", "few", "house", "use", "during",
    "without", "again", "place", "american", "around", "however", "home", "small", "found",
    "thought", "went", "say", "part", "once", "general", "high", "upon", "school", "every",
];

/// Prose-shaped text: Zipf-weighted vocabulary, sentence casing, commas,
/// and wrapped lines. Byte statistics sit close to published English
/// letter-frequency tables, which is what the entropy-sensitive checks
/// need; the words themselves carry no meaning.
fn generate_text(target_bytes: usize, seed: u64) -> Vec<u8> {
    let weights: Vec<f64> = (0..VOCABULARY.len()).map(|i| 1.0 / (i + 1) as f64).collect();
    let total: f64 = weights.iter().sum();
    let mut cumulative = Vec::with_capacity(weights.len());
    let mut acc = 0.0;
    for w in &weights {
        acc += w / total;
        cumulative.push(acc);
    }
    let pick = |rng: &mut ChaCha8Rng| -> &'static str {
        let x: f64 = rng.gen();
        let idx = cumulative.partition_point(|&c| c < x);
        VOCABULARY[idx.min(VOCABULARY.len() - 1)]
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(target_bytes + 128);
    let mut line_len = 0usize;
    while out.len() < target_bytes {
        let words = rng.gen_range(6..=15);
        for i in 0..words {
            let mut word = pick(&mut rng).to_string();
            if i == 0 {
                let mut chars = word.chars();
                let head = chars.next().unwrap().to_ascii_uppercase();
                word = head.to_string() + chars.as_str();
            }
            out.extend_from_slice(word.as_bytes());
            line_len += word.len() + 1;
            if i + 1 == words {
                out.push(b'.');
            } else if rng.gen_bool(0.07) {
                out.push(b',');
            }
            if line_len > 72 {
                out.push(b'\n');
                line_len = 0;
            } else {
                out.push(b' ');
            }
        }
    }
    out.truncate(target_bytes);
    out
}

fn text_corpus() -> &'static [u8] {
    static TEXT: OnceLock<Vec<u8>> = OnceLock::new();
    TEXT.get_or_init(|| generate_text(8 * 1024 * 1024 + 512 * 1024, 0x5EED_7E57))
}

/// Sparse bitstream: mostly zero runs, recurring 24-bit motifs, a little
/// noise — and a deliberately incompressible opening so the two LZSS
/// dictionary policies start from different footing.
fn generate_sparse(target_bytes: usize, seed: u64) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = BitWriter::with_capacity_bits(target_bytes * 8 + 64);

    // 128 opening bytes of uniform noise: exactly one default window.
    for _ in 0..128 {
        w.write_bits(rng.gen::<u8>() as u64, 8).unwrap();
    }

    // Eight fixed motifs, each with 8 of 24 bits set.
    let mut motifs = [0u32; 8];
    for m in &mut motifs {
        for _ in 0..8 {
            *m |= 1 << rng.gen_range(0..24);
        }
    }

    while w.bit_len() < target_bytes * 8 {
        match rng.gen_range(0..100) {
            0..=59 => {
                let run = rng.gen_range(16..=64);
                w.write_bits(0, run).unwrap();
            }
            60..=84 => {
                let motif = motifs[rng.gen_range(0..motifs.len())] as u64;
                for _ in 0..rng.gen_range(2..=5) {
                    w.write_bits(motif, 24).unwrap();
                }
            }
            _ => {
                let width = rng.gen_range(8..=32);
                let noise = rng.gen::<u64>() & ((1u64 << width) - 1);
                w.write_bits(noise, width).unwrap();
            }
        }
    }
    let (mut bytes, _) = w.finish();
    bytes.truncate(target_bytes);
    bytes
}

fn sparse_corpus() -> &'static [u8] {
    static SPARSE: OnceLock<Vec<u8>> = OnceLock::new();
    SPARSE.get_or_init(|| generate_sparse(1024 * 1024, 0xB17_57AE))
}

fn random_corpus() -> &'static [u8] {
    static RANDOM: OnceLock<Vec<u8>> = OnceLock::new();
    RANDOM.get_or_init(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(0xD1CE);
        (0..1024 * 1024).map(|_| rng.gen()).collect()
    })
}

/// Sixty seconds of stereo content: a handful of slowly modulated
/// partials per channel, all well under the encoder cutoff.
fn test_audio() -> &'static WavAudio {
    static AUDIO: OnceLock<WavAudio> = OnceLock::new();
    AUDIO.get_or_init(|| {
        let sr = 44_100u32;
        let count = 60 * sr as usize;
        let tau = std::f64::consts::TAU;
        let mut left = Vec::with_capacity(count);
        let mut right = Vec::with_capacity(count);
        for t in 0..count {
            let ts = t as f64 / sr as f64;
            let env = 0.6 + 0.4 * (tau * 0.25 * ts).sin();
            let l = 6000.0 * (tau * 220.0 * ts).sin()
                + 4000.0 * env * (tau * 554.37 * ts).sin()
                + 2500.0 * (tau * 1661.2 * ts).sin()
                + 1200.0 * (tau * 3322.4 * ts).sin()
                + 600.0 * (tau * 6644.9 * ts).sin();
            let r = 5500.0 * (tau * 277.18 * ts + 0.5).sin()
                + 4200.0 * (1.0 - 0.5 * env) * (tau * 659.25 * ts).sin()
                + 2200.0 * (tau * 1975.5 * ts).sin()
                + 900.0 * (tau * 7902.1 * ts).sin();
            left.push(l.round().clamp(-32768.0, 32767.0) as i16);
            right.push(r.round().clamp(-32768.0, 32767.0) as i16);
        }
        WavAudio {
            sample_rate: sr,
            channels: vec![left, right],
        }
    })
}

fn percent_of(original: &[u8], compressed: &[u8]) -> f64 {
    compression_percent(original.len() as u64, compressed.len() as u64)
}

// ---------------------------------------------------------------------
// 1..=12: the acceptance checks.
// ---------------------------------------------------------------------

#[test]
fn c01_huffman_text_compression_sits_in_band() {
    let _g = gate();
    let text = text_corpus();
    assert!(text.len() >= 5 * 1024 * 1024, "corpus must be at least 5 MB");
    let packed = huffman::compress(text).unwrap();
    let percent = percent_of(text, &packed);
    println!("huffman on {} bytes of text: {percent:.2}% (band 44..=54)", text.len());
    assert!(
        (44.0..=54.0).contains(&percent),
        "huffman text compression {percent:.2}% outside 44..=54"
    );
}

#[test]
fn c02_segmented_huffman_tracks_serial_within_three_points() {
    let _g = gate();
    let text = text_corpus();
    let serial = huffman::compress(text).unwrap();
    let serial_percent = percent_of(text, &serial);
    for workers in [1usize, 2, 4, 8] {
        let packed = parallel::segment_compress(text, &SegmentCodec::Huffman, workers).unwrap();
        let back = parallel::segment_decompress(&packed, workers).unwrap();
        assert_eq!(back, text, "round trip must be exact at {workers} chunks");
        let percent = percent_of(text, &packed);
        println!("huffman {workers} chunk(s): {percent:.2}% vs serial {serial_percent:.2}%");
        assert!(
            (percent - serial_percent).abs() <= 3.0,
            "{workers} chunks drift {:.2} points from serial",
            (percent - serial_percent).abs()
        );
    }
}

#[test]
fn c03_lzss_expands_uniform_random_data() {
    let _g = gate();
    let mut rng = ChaCha8Rng::seed_from_u64(0xF00D);
    let data: Vec<u8> = (0..1000).map(|_| rng.gen()).collect();
    let cfg = LzssConfig::default();
    let packed = lzss::compress(&data, &cfg).unwrap();
    assert_eq!(lzss::decompress(&packed).unwrap(), data);
    let percent = percent_of(&data, &packed);
    println!("lzss on 1000 random bytes: {percent:.2}% (expected in -20..0)");
    assert!(
        (-20.0..0.0).contains(&percent),
        "random data should expand a little, got {percent:.2}%"
    );
}

#[test]
fn c04_file_prefix_dictionary_beats_counting_on_sparse_data() {
    let _g = gate();
    let data = sparse_corpus();
    assert!(data.len() >= 500 * 1024, "corpus must be at least 500 KB");
    let zero_bits: u64 = data.iter().map(|b| b.count_zeros() as u64).sum();
    let zero_fraction = zero_bits as f64 / (data.len() as f64 * 8.0);
    assert!(zero_fraction >= 0.70, "corpus is {zero_fraction:.2} zero bits, need >= 0.70");

    let counting = lzss::compress(
        data,
        &LzssConfig {
            dict_mode: DictMode::Counting,
            ..LzssConfig::default()
        },
    )
    .unwrap();
    let prefix = lzss::compress(
        data,
        &LzssConfig {
            dict_mode: DictMode::FilePrefix,
            ..LzssConfig::default()
        },
    )
    .unwrap();
    assert_eq!(lzss::decompress(&counting).unwrap(), data);
    assert_eq!(lzss::decompress(&prefix).unwrap(), data);

    let pc = percent_of(data, &counting);
    let pp = percent_of(data, &prefix);
    println!(
        "sparse corpus ({:.1}% zero bits): file-prefix {pp:.3}% vs counting {pc:.3}%",
        zero_fraction * 100.0
    );
    assert!(pp > pc, "file-prefix ({pp:.3}%) must beat counting ({pc:.3}%)");
}

#[test]
fn c05_cooperative_search_matches_serial_exactly() {
    let _g = gate();
    let cfg = LzssConfig::default();
    let corpora: [(&str, &[u8]); 3] = [
        ("random", random_corpus()),
        ("text", &text_corpus()[..1024 * 1024]),
        ("sparse", sparse_corpus()),
    ];
    for (name, data) in corpora {
        let serial = lzss::compress(data, &cfg).unwrap();
        for workers in [1usize, 2, 4, 8] {
            let coop = parallel::cdc_compress(data, &cfg, workers).unwrap();
            assert_eq!(
                coop, serial,
                "cooperative output differs from serial on {name} with {workers} workers"
            );
        }
        println!("cooperative == serial on {name} ({} bytes) for 1/2/4/8 workers", data.len());
    }
}

#[test]
fn c06_segmented_lzss_speeds_up_with_four_workers() {
    let _g = gate();
    let data = &text_corpus()[..8 * 1024 * 1024];
    let cfg = LzssConfig::default();
    let codec = SegmentCodec::Lzss(cfg);

    let (serial, t_serial) = metrics::time(|| lzss::compress(data, &cfg).unwrap());
    let (packed, t_four) = metrics::time(|| parallel::segment_compress(data, &codec, 4).unwrap());
    assert_eq!(parallel::segment_decompress(&packed, 4).unwrap(), data);
    drop(serial);

    let speedup = t_serial / t_four;
    println!(
        "lzss 8 MiB: serial {t_serial:.2}s, segmented x4 {t_four:.2}s, speedup {speedup:.2} \
         ({} hardware threads available)",
        parallel::available_threads()
    );
    assert!(
        speedup >= 1.5,
        "need speedup >= 1.5 with 4 workers, measured {speedup:.2} \
         (machine reports {} hardware threads)",
        parallel::available_threads()
    );
}

#[test]
fn c07_bwt_pipeline_beats_plain_huffman_by_ten_points() {
    let _g = gate();
    let text = text_corpus();
    let huff = huffman::compress(text).unwrap();
    let pipeline = bwt::compress(text, bwt::DEFAULT_BLOCK_SIZE).unwrap();
    assert_eq!(bwt::decompress(&pipeline).unwrap(), text, "round trip must be exact");
    let ph = percent_of(text, &huff);
    let pb = percent_of(text, &pipeline);
    println!("text corpus: bwt pipeline {pb:.2}% vs plain huffman {ph:.2}%");
    assert!(
        pb >= ph + 10.0,
        "pipeline {pb:.2}% must clear huffman {ph:.2}% by 10 points"
    );
}

#[test]
fn c08_audio_ratio_is_eleven_to_one_within_five_percent() {
    let _g = gate();
    let audio = test_audio();
    let wav = audio::write_wav(audio).unwrap();
    let packed = audio::encode(audio, &EncoderConfig::default()).unwrap();
    let decoded = audio::decode(&packed).unwrap();
    assert_eq!(decoded.sample_count(), audio.sample_count());

    let ratio = wav.len() as f64 / packed.len() as f64;
    println!(
        "audio: {} byte wav -> {} bytes at 128 kbit/s, ratio {ratio:.3}:1 (target 11 +/- 5%)",
        wav.len(),
        packed.len()
    );
    assert!(
        (10.45..=11.55).contains(&ratio),
        "ratio {ratio:.3} outside 11:1 +/- 5%"
    );
}

#[test]
fn c09_audio_strategies_are_identical_and_work_sharing_scales() {
    let _g = gate();
    let audio = test_audio();
    let serial_cfg = EncoderConfig::default();
    let reference = audio::encode(audio, &serial_cfg).unwrap();

    for workers in [1usize, 2, 4, 8] {
        for strategy in [Strategy::Segmented, Strategy::WorkSharing] {
            let cfg = EncoderConfig {
                strategy,
                workers,
                ..EncoderConfig::default()
            };
            let packed = audio::encode(audio, &cfg).unwrap();
            assert_eq!(
                packed, reference,
                "{strategy:?} with {workers} workers must match the serial stream"
            );
        }
    }
    println!("segmented and work-sharing streams identical to serial for 1/2/4/8 workers");

    let (_, t_serial) = metrics::time(|| audio::encode(audio, &serial_cfg).unwrap());
    let ws_cfg = EncoderConfig {
        strategy: Strategy::WorkSharing,
        workers: 4,
        ..EncoderConfig::default()
    };
    let (_, t_ws) = metrics::time(|| audio::encode(audio, &ws_cfg).unwrap());
    let speedup = t_serial / t_ws;
    println!(
        "audio encode: serial {t_serial:.2}s, work-sharing x4 {t_ws:.2}s, speedup {speedup:.2} \
         ({} hardware threads available)",
        parallel::available_threads()
    );
    assert!(
        speedup >= 1.5,
        "need work-sharing speedup >= 1.5 with 4 workers, measured {speedup:.2} \
         (machine reports {} hardware threads)",
        parallel::available_threads()
    );
}

#[test]
fn c10_quantization_is_the_dominant_encode_stage() {
    let _g = gate();
    let audio = test_audio();
    let profile = audio::profile_stages(audio, &EncoderConfig::default(), 200).unwrap();
    let pct = profile.percentages();
    println!(
        "stage split over {} frames: transform {:.1}%, quantize {:.1}%, pack {:.1}%",
        profile.frames, pct[0], pct[1], pct[2]
    );
    assert!(
        profile.quantize_seconds > profile.transform_seconds
            && profile.quantize_seconds > profile.pack_seconds,
        "quantization should dominate: transform {:.4}s, quantize {:.4}s, pack {:.4}s",
        profile.transform_seconds,
        profile.quantize_seconds,
        profile.pack_seconds
    );
}

#[test]
fn c11_property_suites() {
    let _g = gate();
    bit_io_round_trips(100_000);
    println!("bit i/o: 100000 value round trips");
    huffman_matches_brute_force_optimum(40);
    println!("huffman: optimal cost on alphabets of 2..=8 symbols, 40 tables each");
    bwt_stages_round_trip(10_000);
    println!("bwt/mtf/rle: 10000 round trips");
    lzss_round_trip_fuzz(10_000);
    println!("lzss: 10000 container round trips");
    match_search_agrees_with_oracle(10_000);
    println!("match search: 10000 agreements with the exhaustive oracle");
    mdct_overlap_add_reconstructs();
    println!("mdct: overlap-add reconstruction within 1e-9");
    rate_control_never_exceeds_budget(10_000);
    println!("rate control: 10000 frames within budget");
    crc_catches_every_single_bit_flip();
    println!("crc: every single-bit flip in a frame detected");
}

#[test]
fn c12_continuous_reads_beat_four_byte_block_reads() {
    let _g = gate();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("io_bench_corpus.bin");
    let mut rng = ChaCha8Rng::seed_from_u64(0x10B5);
    let block: Vec<u8> = (0..1024 * 1024).map(|_| rng.gen()).collect();
    {
        use std::io::Write;
        let mut f = std::fs::File::create(&path).unwrap();
        for _ in 0..64 {
            f.write_all(&block).unwrap();
        }
    }

    let opts = IoBenchOptions {
        block_sizes: vec![4],
        reader_counts: vec![1],
        runs: 3,
        ..IoBenchOptions::default()
    };
    let rows = metrics::io_bench(&path, &opts).unwrap();
    let continuous = rows.iter().find(|r| r.block_size == 0).unwrap();
    let tiny = rows.iter().find(|r| r.block_size == 4).unwrap();
    let factor = continuous.mb_per_s / tiny.mb_per_s;
    println!(
        "continuous {:.1} MB/s vs 4-byte blocks {:.2} MB/s: {factor:.1}x",
        continuous.mb_per_s, tiny.mb_per_s
    );
    assert!(
        factor >= 5.0,
        "continuous reads should be at least 5x faster, measured {factor:.1}x"
    );
}

// ---------------------------------------------------------------------
// Property suites behind check 11.
// ---------------------------------------------------------------------

fn bit_io_round_trips(cases: usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(11_01);
    let per_sequence = 100;
    for _ in 0..cases / per_sequence {
        let ops: Vec<(u64, u32)> = (0..per_sequence)
            .map(|_| {
                let width = rng.gen_range(1..=64u32);
                let value = rng.gen::<u64>() & mask(width);
                (value, width)
            })
            .collect();
        let mut w = BitWriter::new();
        for &(v, c) in &ops {
            w.write_bits(v, c).unwrap();
        }
        let (bytes, bits) = w.finish();
        assert_eq!(bits, ops.iter().map(|&(_, c)| c as usize).sum::<usize>());
        let mut r = BitReader::new(&bytes, bits).unwrap();
        for &(v, c) in &ops {
            assert_eq!(r.read_bits(c).unwrap(), v, "round trip of {v} in {c} bits");
        }
    }
}

fn mask(width: u32) -> u64 {
    if width == 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

/// Cheapest possible prefix code for `freqs`, found by enumerating every
/// non-decreasing code-length multiset that satisfies the Kraft
/// inequality and pairing shorter lengths with heavier symbols.
fn brute_force_optimal_cost(freqs: &[u64]) -> u64 {
    let mut sorted = freqs.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let mut best = u64::MAX;
    // Kraft budget scaled by 2^8: a length-l code consumes 256 >> l.
    fn descend(sorted: &[u64], lens: &mut Vec<u32>, kraft: u32, cost: u64, best: &mut u64) {
        if lens.len() == sorted.len() {
            *best = (*best).min(cost);
            return;
        }
        let i = lens.len();
        let floor = lens.last().copied().unwrap_or(1);
        for l in floor..=8 {
            let used = kraft + (256 >> l);
            if used > 256 {
                continue; // longer codes only shrink usage, keep scanning
            }
            lens.push(l);
            descend(sorted, lens, used, cost + sorted[i] * l as u64, best);
            lens.pop();
        }
    }
    descend(&sorted, &mut Vec::new(), 0, 0, &mut best);
    best
}

fn huffman_matches_brute_force_optimum(tables_per_size: usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(11_02);
    for symbols in 2..=8usize {
        for _ in 0..tables_per_size {
            // Distinct byte values with occasionally very skewed counts.
            let mut values: Vec<u8> = (0..=255u8).collect();
            for i in 0..symbols {
                let j = rng.gen_range(i..values.len());
                values.swap(i, j);
            }
            let mut freqs: huffman::FrequencyTable = [0; 256];
            let mut active = Vec::with_capacity(symbols);
            for &v in &values[..symbols] {
                let base: u64 = rng.gen_range(1..1000);
                let f = if rng.gen_bool(0.3) { base * base } else { base };
                freqs[v as usize] = f;
                active.push((v, f));
            }
            let table = huffman::build_code_table(&freqs).unwrap();
            let actual: u64 = active.iter().map(|&(v, f)| f * table.length(v) as u64).sum();
            let weights: Vec<u64> = active.iter().map(|&(_, f)| f).collect();
            let optimal = brute_force_optimal_cost(&weights);
            assert_eq!(
                actual, optimal,
                "huffman cost {actual} != optimal {optimal} for counts {weights:?}"
            );
        }
    }
}

fn bwt_stages_round_trip(cases: usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(11_03);
    for case in 0..cases {
        let len = rng.gen_range(1..=256usize);
        let data: Vec<u8> = match case % 4 {
            0 => (0..len).map(|_| rng.gen()).collect(),
            1 => (0..len).map(|_| rng.gen_range(b'a'..=b'f')).collect(),
            2 => {
                let b: u8 = rng.gen();
                vec![b; len]
            }
            _ => {
                let mut v: Vec<u8> = (0..len).map(|_| rng.gen()).collect();
                v.sort_unstable();
                v
            }
        };

        let fwd = bwt::forward_bwt(&data).unwrap();
        assert_eq!(
            bwt::inverse_bwt(&fwd.last_column, fwd.primary_index).unwrap(),
            data,
            "bwt round trip"
        );
        assert_eq!(bwt::mtf_decode(&bwt::mtf_encode(&data)), data, "mtf round trip");
        assert_eq!(
            bwt::rle_decode(&bwt::rle_encode(&data)).unwrap(),
            data,
            "rle round trip"
        );
    }
}

fn lzss_round_trip_fuzz(cases: usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(11_04);
    let windows = [64u32, 128, 256, 512, 1024];
    for case in 0..cases {
        let window_bits = windows[case % windows.len()];
        let max_match = [16u32, 24, 48][case % 3];
        let min_match = [6u32, 8, 12][(case / 3) % 3];
        let cfg = LzssConfig {
            window_bits,
            max_match,
            min_match,
            literal_bits: [4u32, 8, 12][(case / 9) % 3],
            dict_mode: if case % 2 == 0 {
                DictMode::Counting
            } else {
                DictMode::FilePrefix
            },
        };
        let len = rng.gen_range(0..=160usize);
        let data: Vec<u8> = match case % 3 {
            0 => (0..len).map(|_| rng.gen()).collect(),
            1 => (0..len)
                .map(|_| if rng.gen_bool(0.8) { 0 } else { rng.gen() })
                .collect(),
            _ => {
                let motif: u8 = rng.gen();
                (0..len)
                    .map(|i| if i % 7 < 5 { motif } else { rng.gen() })
                    .collect()
            }
        };
        let packed = lzss::compress(&data, &cfg)
            .unwrap_or_else(|e| panic!("compress failed on case {case}: {e}"));
        let back = lzss::decompress(&packed)
            .unwrap_or_else(|e| panic!("decompress failed on case {case}: {e}"));
        assert_eq!(back, data, "lzss round trip, case {case}, cfg {cfg:?}");
    }
}

fn stream_bit(bytes: &[u8], pos: usize) -> bool {
    bytes[pos / 8] >> (7 - pos % 8) & 1 == 1
}

/// Longest-match search compared bit by bit against a quadratic scan.
fn exhaustive_best_match(window: &Window, look: &[u8], look_bits: usize, cfg: &LzssConfig) -> Option<Match> {
    let w = cfg.window_bits as usize;
    let avail = look_bits.min(cfg.max_match as usize);
    let (mut best_len, mut best_off) = (0usize, 0usize);
    for off in 0..w {
        let cap = avail.min(w - off);
        let mut l = 0;
        while l < cap && stream_bit(window.as_bytes(), off + l) == stream_bit(look, l) {
            l += 1;
        }
        if l > best_len {
            best_len = l;
            best_off = off;
        }
    }
    (best_len >= cfg.min_match as usize).then_some(Match {
        offset: best_off as u32,
        length: best_len as u32,
    })
}

fn match_search_agrees_with_oracle(cases: usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(11_05);
    for case in 0..cases {
        let window_bits = [64u32, 128, 256][case % 3];
        let max_match = [16u32, 24, 40][(case / 3) % 3];
        let cfg = LzssConfig {
            window_bits,
            max_match,
            min_match: [6u32, 8, 12][(case / 9) % 3].min(max_match),
            literal_bits: 8,
            dict_mode: DictMode::FilePrefix,
        };
        let wb = (window_bits as usize) / 8;
        // Low-entropy bytes so matches actually occur.
        let window_bytes: Vec<u8> = (0..wb)
            .map(|_| [0x00u8, 0xFF, 0x0F, rng.gen()][rng.gen_range(0..4)])
            .collect();
        let window = lzss::init_window(&cfg, Some((&window_bytes, window_bits as usize))).unwrap();
        let look: Vec<u8> = (0..8)
            .map(|_| [0x00u8, 0xFF, 0x0F, rng.gen()][rng.gen_range(0..4)])
            .collect();
        let look_bits = rng.gen_range(0..=64usize);

        let got = lzss::find_longest_match(&window, &look, look_bits, &cfg);
        let expected = exhaustive_best_match(&window, &look, look_bits, &cfg);
        assert_eq!(got, expected, "case {case}: window {window_bits} bits, cfg {cfg:?}");
    }
}

fn mdct_overlap_add_reconstructs() {
    let mut rng = ChaCha8Rng::seed_from_u64(11_06);
    let n = audio::GRANULE;
    let m = audio::Mdct::new(n);
    for _ in 0..20 {
        let signal: Vec<f64> = (0..6 * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut rebuilt = vec![0.0; 6 * n];
        for t in 0..5 {
            let spectrum = m.forward(&signal[t * n..t * n + 2 * n]);
            let block = m.inverse(&spectrum);
            for (i, v) in block.iter().enumerate() {
                rebuilt[t * n + i] += v;
            }
        }
        // Interior samples have both overlap halves; edges do not.
        for i in n..5 * n {
            assert!(
                (rebuilt[i] - signal[i]).abs() <= 1e-9,
                "overlap-add error {} at {i}",
                (rebuilt[i] - signal[i]).abs()
            );
        }
    }
}

fn rate_control_never_exceeds_budget(frames: usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(11_07);
    for case in 0..frames {
        let scale = 10f64.powf(rng.gen_range(-6.0..5.0));
        let density = rng.gen_range(0.02..1.0f64);
        let spectrum: Vec<f64> = (0..audio::GRANULE)
            .map(|_| {
                if rng.gen_bool(density) {
                    scale * rng.gen_range(-1.0..1.0)
                } else {
                    0.0
                }
            })
            .collect();
        let budget = rng.gen_range(16..=4000u64);
        let coded = quant::quantize_loop(&spectrum, budget)
            .unwrap_or_else(|e| panic!("case {case} budget {budget}: {e}"));
        let bits = quant::ChannelCoder::prepare(&coded.values).unwrap().bits();
        assert!(
            bits <= budget,
            "case {case}: {bits} coded bits exceed budget {budget}"
        );
    }
    // Below the fixed per-channel overhead no budget can work.
    assert!(matches!(
        quant::quantize_loop(&[1.0; 576], 15),
        Err(pzip::Error::BudgetInfeasible { .. })
    ));
}

fn crc_catches_every_single_bit_flip() {
    let mut rng = ChaCha8Rng::seed_from_u64(11_08);
    let samples: Vec<i16> = (0..1152).map(|_| rng.gen_range(-12000..12000)).collect();
    let audio = WavAudio {
        sample_rate: 44_100,
        channels: vec![samples],
    };
    let cfg = EncoderConfig {
        bitrate: 32_000,
        ..EncoderConfig::default()
    };
    let packed = audio::encode(&audio, &cfg).unwrap();
    audio::decode(&packed).unwrap();

    // Stream header: magic 4 + rate 4 + channels 1 + frames 4 + samples 8
    // + bitrate 4 + cutoff 4 = 29 bytes; the first frame follows it.
    let header = 29;
    let frame_bytes = audio::frame::frame_len_bytes(32_000, 44_100);
    let mut tampered = packed.clone();
    for bit in 0..frame_bytes * 8 {
        let index = header + bit / 8;
        tampered[index] ^= 1 << (7 - bit % 8);
        assert!(
            audio::decode(&tampered).is_err(),
            "flip of frame bit {bit} went undetected"
        );
        tampered[index] ^= 1 << (7 - bit % 8);
    }
    assert_eq!(tampered, packed, "flips must have been undone");
}
