//! Measurement plumbing: compression ratios, wall-clock timing, benchmark
//! row emission (CSV/JSON), and a small disk read-pattern benchmark.

use std::fs::File;
use std::hint::black_box;
use std::io::Read;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;

use crate::error::Result;

/// Space saved, as a percentage of the original size.
pub fn compression_percent(original: u64, compressed: u64) -> f64 {
    if original == 0 {
        return 0.0;
    }
    (1.0 - compressed as f64 / original as f64) * 100.0
}

/// Original size over compressed size ("N:1").
pub fn compression_ratio(original: u64, compressed: u64) -> f64 {
    if compressed == 0 {
        return if original == 0 { 1.0 } else { f64::INFINITY };
    }
    original as f64 / compressed as f64
}

/// Run `f` and return its result along with elapsed wall-clock seconds.
pub fn time<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_secs_f64())
}

/// Outcome of one compression run.
#[derive(Debug, Clone, Serialize)]
pub struct CompressionReport {
    pub original_bytes: u64,
    pub compressed_bytes: u64,
    pub seconds: f64,
    pub percent: f64,
    pub ratio: f64,
}

impl CompressionReport {
    pub fn new(original_bytes: u64, compressed_bytes: u64, seconds: f64) -> Self {
        CompressionReport {
            original_bytes,
            compressed_bytes,
            seconds,
            percent: compression_percent(original_bytes, compressed_bytes),
            ratio: compression_ratio(original_bytes, compressed_bytes),
        }
    }
}

/// One line of a scaling benchmark: an algorithm under a given execution
/// mode and worker count. `speedup` is relative to the serial run of the
/// same algorithm.
#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub algo: String,
    pub mode: String,
    pub workers: usize,
    pub seconds: f64,
    pub percent: f64,
    pub ratio: f64,
    pub speedup: f64,
}

/// Render rows as CSV with a header line. Fields contain no commas, so no
/// quoting is needed.
pub fn rows_to_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from("algo,mode,workers,seconds,percent,ratio,speedup\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{:.6},{:.2},{:.3},{:.2}\n",
            r.algo, r.mode, r.workers, r.seconds, r.percent, r.ratio, r.speedup
        ));
    }
    out
}

/// Render rows as pretty-printed JSON.
pub fn rows_to_json(rows: &[BenchRow]) -> Result<String> {
    Ok(serde_json::to_string_pretty(rows)?)
}

/// One line of the disk read-pattern benchmark.
#[derive(Debug, Clone, Serialize)]
pub struct IoBenchRow {
    /// "continuous" for whole-file streaming reads, "blocks" for one read
    /// call per block.
    pub mode: String,
    /// Bytes per read call; 0 for continuous mode.
    pub block_size: usize,
    pub readers: usize,
    pub seconds: f64,
    pub bytes_read: u64,
    pub mb_per_s: f64,
}

#[derive(Debug, Clone)]
pub struct IoBenchOptions {
    pub block_sizes: Vec<usize>,
    pub reader_counts: Vec<usize>,
    /// Timed repetitions; the reported seconds are the mean.
    pub runs: usize,
    /// Per-reader byte cap for blocks under 512 bytes, where touching the
    /// whole file would take minutes. `bytes_read` reports what was
    /// actually read, so throughput stays honest.
    pub small_block_budget: u64,
}

impl Default for IoBenchOptions {
    fn default() -> Self {
        IoBenchOptions {
            block_sizes: vec![4, 64, 4096, 65536],
            reader_counts: vec![1, 2, 4],
            runs: 3,
            small_block_budget: 8 << 20,
        }
    }
}

const STREAM_BUF: usize = 1 << 20;

/// Stream the whole file in large chunks; returns bytes read.
fn read_continuous(path: &Path) -> Result<u64> {
    let mut f = File::open(path)?;
    let mut buf = vec![0u8; STREAM_BUF];
    let mut total = 0u64;
    let mut sink = 0u64;
    loop {
        let n = f.read(&mut buf)?;
        if n == 0 {
            break;
        }
        sink = sink.wrapping_add(buf[0] as u64);
        total += n as u64;
    }
    black_box(sink);
    Ok(total)
}

/// Issue one read call per `block_size` bytes until `limit` bytes or EOF.
fn read_blocks(path: &Path, block_size: usize, limit: u64) -> Result<u64> {
    let mut f = File::open(path)?;
    let mut buf = vec![0u8; block_size];
    let mut total = 0u64;
    let mut sink = 0u64;
    while total < limit {
        let n = f.read(&mut buf)?;
        if n == 0 {
            break;
        }
        sink = sink.wrapping_add(buf[0] as u64);
        total += n as u64;
    }
    black_box(sink);
    Ok(total)
}

/// Time a read pattern across `readers` threads over `runs` repetitions.
/// Returns (mean seconds, bytes read in one run across all readers).
fn time_pattern(
    path: &Path,
    readers: usize,
    runs: usize,
    read_one: impl Fn(&Path) -> Result<u64> + Sync,
) -> Result<(f64, u64)> {
    let mut secs = 0.0;
    let mut bytes = 0u64;
    for _ in 0..runs.max(1) {
        let start = Instant::now();
        let counts: Result<Vec<u64>> = std::thread::scope(|scope| {
            let handles: Vec<_> = (0..readers)
                .map(|_| scope.spawn(|| read_one(path)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("reader thread"))
                .collect()
        });
        secs += start.elapsed().as_secs_f64();
        bytes = counts?.iter().sum();
    }
    Ok((secs / runs.max(1) as f64, bytes))
}

/// Compare continuous whole-file reads against block-at-a-time reads at
/// several block sizes and reader thread counts. The file is read once
/// untimed first so every pattern runs against a warm page cache.
pub fn io_bench(path: &Path, opts: &IoBenchOptions) -> Result<Vec<IoBenchRow>> {
    read_continuous(path)?;
    let mut rows = Vec::new();
    for &readers in &opts.reader_counts {
        let readers = readers.max(1);
        let (secs, bytes) = time_pattern(path, readers, opts.runs, read_continuous)?;
        rows.push(IoBenchRow {
            mode: "continuous".into(),
            block_size: 0,
            readers,
            seconds: secs,
            bytes_read: bytes,
            mb_per_s: bytes as f64 / secs.max(1e-12) / 1e6,
        });
        for &bs in &opts.block_sizes {
            let limit = if bs < 512 {
                opts.small_block_budget
            } else {
                u64::MAX
            };
            let (secs, bytes) =
                time_pattern(path, readers, opts.runs, |p| read_blocks(p, bs, limit))?;
            rows.push(IoBenchRow {
                mode: "blocks".into(),
                block_size: bs,
                readers,
                seconds: secs,
                bytes_read: bytes,
                mb_per_s: bytes as f64 / secs.max(1e-12) / 1e6,
            });
        }
    }
    Ok(rows)
}

/// Render I/O rows as CSV with a header line.
pub fn io_rows_to_csv(rows: &[IoBenchRow]) -> String {
    let mut out = String::from("mode,block_size,readers,seconds,bytes_read,mb_per_s\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{:.6},{},{:.2}\n",
            r.mode, r.block_size, r.readers, r.seconds, r.bytes_read, r.mb_per_s
        ));
    }
    out
}
