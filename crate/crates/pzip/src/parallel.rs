//! Parallel execution: a small worker pool, segmented (chunk-per-worker)
//! compression containers, and cooperative LZSS where workers share one
//! window.
//!
//! Segmented mode splits the input into contiguous chunks compressed
//! independently — embarrassingly parallel, but each chunk restarts with a
//! cold dictionary. Cooperative mode parallelizes *within* the LZSS match
//! search instead: the window is cut into equal slices, each worker scans
//! its slice for the current lookahead, and a reduction picks the longest
//! match (smallest offset on ties). That is exactly the choice the serial
//! encoder makes, so cooperative output is bit-identical to serial output
//! for every worker count.

use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::{Barrier, Mutex};

use crate::bitio::BitWriter;
use crate::bwt;
use crate::error::{Error, Result};
use crate::huffman;
use crate::lzss::{self, LzssConfig, Match};
use crate::metrics::{compression_percent, compression_ratio, time, BenchRow};
use crate::wire::{self, Cursor};

/// Container magic for a segmented stream.
pub const SEGMENT_MAGIC: [u8; 4] = *b"PZS1";

/// Threads the machine can actually run at once.
pub fn available_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Fixed-size pool that runs indexed tasks and returns results in task
/// order, whatever order threads finish in.
pub struct WorkerPool {
    workers: usize,
}

impl WorkerPool {
    pub fn new(workers: usize) -> Result<Self> {
        if workers == 0 {
            return Err(Error::InvalidConfig("worker count must be positive".into()));
        }
        Ok(WorkerPool { workers })
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    /// Run `task(0..task_count)` across the pool. Threads pull the next
    /// unclaimed index, so long tasks do not starve short ones; results
    /// land in a slot per index.
    pub fn run<T, F>(&self, task_count: usize, task: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync,
    {
        let threads = self.workers.min(task_count).min(available_threads() * 4);
        if threads <= 1 {
            return (0..task_count).map(task).collect();
        }
        let next = AtomicUsize::new(0);
        let slots: Vec<Mutex<Option<T>>> = (0..task_count).map(|_| Mutex::new(None)).collect();
        std::thread::scope(|scope| {
            for _ in 0..threads {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    if i >= task_count {
                        break;
                    }
                    let r = task(i);
                    *slots[i].lock().expect("result slot") = Some(r);
                });
            }
        });
        slots
            .into_iter()
            .map(|m| m.into_inner().expect("result slot").expect("task ran"))
            .collect()
    }
}

/// Which codec a segmented container applies to each chunk.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegmentCodec {
    Huffman,
    Bwt { block_size: usize },
    Lzss(LzssConfig),
}

impl SegmentCodec {
    fn id(&self) -> u8 {
        match self {
            SegmentCodec::Huffman => 1,
            SegmentCodec::Bwt { .. } => 2,
            SegmentCodec::Lzss(_) => 3,
        }
    }
}

/// Split `len` bytes into `workers` contiguous ranges: every chunk gets
/// `len / workers` bytes and the last also takes the remainder. Zero-byte
/// chunks are legal (inputs shorter than the worker count).
pub(crate) fn chunk_ranges(len: usize, workers: usize) -> Vec<(usize, usize)> {
    if len == 0 {
        return Vec::new();
    }
    let base = len / workers;
    (0..workers)
        .map(|i| {
            let start = i * base;
            let end = if i + 1 == workers { len } else { start + base };
            (start, end)
        })
        .collect()
}

/// Compress chunks independently across the pool and concatenate into one
/// container: magic, codec id (1), chunk count (4), per-chunk byte lengths
/// (8 each), then the chunks' own self-contained streams.
pub fn segment_compress(data: &[u8], codec: &SegmentCodec, workers: usize) -> Result<Vec<u8>> {
    if let SegmentCodec::Lzss(cfg) = codec {
        cfg.validate()?;
    }
    let pool = WorkerPool::new(workers)?;
    let ranges = chunk_ranges(data.len(), workers);
    let packed: Result<Vec<Vec<u8>>> = pool
        .run(ranges.len(), |i| {
            let (start, end) = ranges[i];
            let chunk = &data[start..end];
            match codec {
                SegmentCodec::Huffman => huffman::compress(chunk),
                SegmentCodec::Bwt { block_size } => bwt::compress(chunk, *block_size),
                SegmentCodec::Lzss(cfg) => lzss::compress(chunk, cfg),
            }
            .map_err(|e| e.in_chunk(i as u32))
        })
        .into_iter()
        .collect();
    let packed = packed?;
    let mut out = Vec::new();
    out.extend_from_slice(&SEGMENT_MAGIC);
    out.push(codec.id());
    wire::put_u32(&mut out, packed.len() as u32);
    for p in &packed {
        wire::put_u64(&mut out, p.len() as u64);
    }
    for p in &packed {
        out.extend_from_slice(p);
    }
    Ok(out)
}

/// Invert [`segment_compress`], decompressing chunks across up to
/// `workers` threads.
pub fn segment_decompress(bytes: &[u8], workers: usize) -> Result<Vec<u8>> {
    let mut c = Cursor::new(bytes);
    c.expect_magic(&SEGMENT_MAGIC)?;
    let codec_id = c.u8()?;
    if !(1..=3).contains(&codec_id) {
        return Err(Error::Corrupt(format!("unknown codec id {codec_id}")));
    }
    let count = c.u32()? as usize;
    let mut lens = Vec::with_capacity(count);
    for _ in 0..count {
        lens.push(c.u64()? as usize);
    }
    let mut chunks = Vec::with_capacity(count);
    for &l in &lens {
        chunks.push(c.take(l)?);
    }
    c.expect_end()?;
    let pool = WorkerPool::new(workers.max(1))?;
    let out: Result<Vec<Vec<u8>>> = pool
        .run(chunks.len(), |i| {
            match codec_id {
                1 => huffman::decompress(chunks[i]),
                2 => bwt::decompress(chunks[i]),
                _ => lzss::decompress(chunks[i]),
            }
            .map_err(|e| e.in_chunk(i as u32))
        })
        .into_iter()
        .collect();
    let mut joined = Vec::new();
    for chunk in out? {
        joined.extend_from_slice(&chunk);
    }
    Ok(joined)
}

/// Pack an optional match into one atomic word: present flag in the top
/// bit, then length, then offset.
fn pack_match(m: Option<Match>) -> u64 {
    match m {
        None => 0,
        Some(m) => (1 << 63) | ((m.length as u64) << 32) | m.offset as u64,
    }
}

fn unpack_match(v: u64) -> Option<Match> {
    if v >> 63 == 0 {
        None
    } else {
        Some(Match {
            length: (v >> 32) as u32 & 0x7FFF_FFFF,
            offset: v as u32,
        })
    }
}

/// Longest match across slice results, earliest slot on ties. Slots are
/// ordered by window offset, so this reproduces the serial smallest-offset
/// tie-break.
fn reduce_slots(slots: &[AtomicU64]) -> Option<Match> {
    let mut best: Option<Match> = None;
    for s in slots {
        if let Some(m) = unpack_match(s.load(Ordering::Acquire)) {
            if best.is_none_or(|b| m.length > b.length) {
                best = Some(m);
            }
        }
    }
    best
}

/// Cooperative LZSS encode: `workers` logical slices of the window are
/// scanned per token. Output is bit-identical to [`lzss::encode`] for any
/// worker count that divides the window. Scanning threads are capped by
/// the machine's parallelism; extra logical slices are merged into
/// contiguous runs, which leaves the reduction order — and therefore the
/// output — unchanged.
pub fn cdc_encode(data: &[u8], cfg: &LzssConfig, workers: usize) -> Result<(Vec<u8>, u64)> {
    cdc_encode_with_pool(data, cfg, workers, available_threads().min(workers.max(1)))
}

pub(crate) fn cdc_encode_with_pool(
    data: &[u8],
    cfg: &LzssConfig,
    workers: usize,
    pool_threads: usize,
) -> Result<(Vec<u8>, u64)> {
    cfg.validate()?;
    if workers == 0 || !(cfg.window_bits as usize).is_multiple_of(workers) {
        return Err(Error::InvalidConfig(format!(
            "{} window bits do not split into {workers} equal slices",
            cfg.window_bits
        )));
    }
    let w = cfg.window_bits as usize;
    let slice = w / workers;
    let data_bits = data.len() * 8;
    let (stream, effective) = lzss::build_stream(data, data_bits, cfg);
    let mut out = BitWriter::with_capacity_bits(data_bits + data_bits / 4 + 64);
    if effective == lzss::DictMode::FilePrefix {
        out.copy_bits(data, 0, w);
    }
    let threads = pool_threads.clamp(1, workers);
    if threads <= 1 {
        // Same slice decomposition, one thread: scan slices in offset order
        // and keep the first longest match.
        lzss::encode_core(&stream, cfg, &mut out, |s, p, look| {
            let mut best: Option<Match> = None;
            for k in 0..workers {
                if let Some(m) = lzss::scan_range(&s.bytes, p - w, p, look, cfg, k * slice, (k + 1) * slice)
                {
                    if best.is_none_or(|b| m.length > b.length) {
                        best = Some(m);
                        if m.length as usize == look {
                            break; // unbeatable; later slices only have larger offsets
                        }
                    }
                }
            }
            best
        })?;
    } else {
        cdc_encode_pooled(&stream, cfg, workers, threads, &mut out)?;
    }
    let (bytes, bits) = out.finish();
    Ok((bytes, bits as u64))
}

/// The threaded protocol: persistent scanners clocked by two barriers per
/// token. The coordinator publishes the position and lookahead, waits for
/// every slice result, reduces, and emits the token.
fn cdc_encode_pooled(
    stream: &lzss::Stream,
    cfg: &LzssConfig,
    workers: usize,
    threads: usize,
    out: &mut BitWriter,
) -> Result<()> {
    let w = cfg.window_bits as usize;
    let slice = w / workers;
    // Merge logical slices into one contiguous offset range per thread.
    let ranges: Vec<(usize, usize)> = (0..threads)
        .map(|t| (t * workers / threads * slice, (t + 1) * workers / threads * slice))
        .collect();
    let pos = AtomicUsize::new(0);
    let look = AtomicUsize::new(0);
    let done = AtomicBool::new(false);
    let slots: Vec<AtomicU64> = (0..threads).map(|_| AtomicU64::new(0)).collect();
    let round_start = Barrier::new(threads + 1);
    let round_end = Barrier::new(threads + 1);
    std::thread::scope(|scope| {
        for (t, (lo, hi)) in ranges.iter().copied().enumerate() {
            let (pos, look, done) = (&pos, &look, &done);
            let (slots, round_start, round_end) = (&slots, &round_start, &round_end);
            scope.spawn(move || loop {
                round_start.wait();
                if done.load(Ordering::Acquire) {
                    break;
                }
                let p = pos.load(Ordering::Acquire);
                let l = look.load(Ordering::Acquire);
                let m = lzss::scan_range(&stream.bytes, p - w, p, l, cfg, lo, hi);
                slots[t].store(pack_match(m), Ordering::Release);
                round_end.wait();
            });
        }
        let result = lzss::encode_core(stream, cfg, out, |_s, p, l| {
            pos.store(p, Ordering::Release);
            look.store(l, Ordering::Release);
            round_start.wait();
            round_end.wait();
            reduce_slots(&slots)
        });
        done.store(true, Ordering::Release);
        round_start.wait();
        result
    })
}

/// Cooperative compress into the standard LZSS container; byte-identical
/// to [`lzss::compress`] with the same configuration.
pub fn cdc_compress(data: &[u8], cfg: &LzssConfig, workers: usize) -> Result<Vec<u8>> {
    let (payload, _) = cdc_encode(data, cfg, workers)?;
    Ok(lzss::wrap_container(data.len() as u64 * 8, cfg, &payload))
}

/// Execution mode for the scaling benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchAlgo {
    Huffman,
    Bwt,
    Lzss,
}

impl BenchAlgo {
    pub fn name(&self) -> &'static str {
        match self {
            BenchAlgo::Huffman => "huffman",
            BenchAlgo::Bwt => "bwt",
            BenchAlgo::Lzss => "lzss",
        }
    }

    fn codec(&self) -> SegmentCodec {
        match self {
            BenchAlgo::Huffman => SegmentCodec::Huffman,
            BenchAlgo::Bwt => SegmentCodec::Bwt {
                block_size: bwt::DEFAULT_BLOCK_SIZE,
            },
            BenchAlgo::Lzss => SegmentCodec::Lzss(LzssConfig::default()),
        }
    }
}

/// Compress `data` under every algorithm serially and under segmented mode
/// (plus cooperative mode for LZSS) at each worker count. Every compressed
/// stream is decompressed and checked against the input before its row is
/// recorded. Speedups are relative to the same algorithm's serial run.
pub fn run_scaling_bench(
    data: &[u8],
    algos: &[BenchAlgo],
    worker_counts: &[usize],
) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::new();
    let original = data.len() as u64;
    for algo in algos {
        let codec = algo.codec();
        let (serial, serial_secs) = time(|| match &codec {
            SegmentCodec::Huffman => huffman::compress(data),
            SegmentCodec::Bwt { block_size } => bwt::compress(data, *block_size),
            SegmentCodec::Lzss(cfg) => lzss::compress(data, cfg),
        });
        let serial = serial?;
        let check = match &codec {
            SegmentCodec::Huffman => huffman::decompress(&serial)?,
            SegmentCodec::Bwt { .. } => bwt::decompress(&serial)?,
            SegmentCodec::Lzss(_) => lzss::decompress(&serial)?,
        };
        if check != data {
            return Err(Error::Corrupt(format!(
                "{} serial round trip mismatch",
                algo.name()
            )));
        }
        rows.push(BenchRow {
            algo: algo.name().into(),
            mode: "serial".into(),
            workers: 1,
            seconds: serial_secs,
            percent: compression_percent(original, serial.len() as u64),
            ratio: compression_ratio(original, serial.len() as u64),
            speedup: 1.0,
        });
        for &workers in worker_counts {
            let (packed, secs) = time(|| segment_compress(data, &codec, workers));
            let packed = packed?;
            if segment_decompress(&packed, workers)? != data {
                return Err(Error::Corrupt(format!(
                    "{} segmented round trip mismatch",
                    algo.name()
                )));
            }
            rows.push(BenchRow {
                algo: algo.name().into(),
                mode: "segmented".into(),
                workers,
                seconds: secs,
                percent: compression_percent(original, packed.len() as u64),
                ratio: compression_ratio(original, packed.len() as u64),
                speedup: serial_secs / secs.max(1e-12),
            });
        }
        if let SegmentCodec::Lzss(cfg) = &codec {
            for &workers in worker_counts {
                if !(cfg.window_bits as usize).is_multiple_of(workers) {
                    continue;
                }
                let (packed, secs) = time(|| cdc_compress(data, cfg, workers));
                let packed = packed?;
                if lzss::decompress(&packed)? != data {
                    return Err(Error::Corrupt("cooperative round trip mismatch".into()));
                }
                rows.push(BenchRow {
                    algo: algo.name().into(),
                    mode: "cdc".into(),
                    workers,
                    seconds: secs,
                    percent: compression_percent(original, packed.len() as u64),
                    ratio: compression_ratio(original, packed.len() as u64),
                    speedup: serial_secs / secs.max(1e-12),
                });
            }
        }
    }
    Ok(rows)
}
