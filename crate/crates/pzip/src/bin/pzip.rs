//! Command-line front end: compress/decompress files, encode/decode audio,
//! and run the scaling and I/O benchmarks.
//!
//! Exit codes: 0 success, 1 usage error, 2 malformed or corrupt data,
//! 3 I/O failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use pzip::audio::{self, EncoderConfig, Strategy};
use pzip::lzss::{DictMode, LzssConfig};
use pzip::metrics::{self, IoBenchOptions};
use pzip::parallel::{self, BenchAlgo, SegmentCodec};
use pzip::{bwt, huffman, lzss, Error};

#[derive(Parser)]
#[command(name = "pzip", version, about = "Parallel compression toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compress a file with huffman, bwt, or lzss.
    Compress(CompressArgs),
    /// Decompress any pzip container (format is sniffed).
    Decompress(DecompressArgs),
    /// Lossy audio coding of WAV files.
    #[command(subcommand)]
    Audio(AudioCmd),
    /// Time every algorithm serially and in parallel; emit a table.
    Bench(BenchArgs),
    /// Compare continuous file reads against block-at-a-time reads.
    Iobench(IobenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Huffman,
    Bwt,
    Lzss,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    /// Single-threaded, one container.
    Serial,
    /// Independent chunks, one per worker.
    Segmented,
    /// Cooperative window search (lzss only); output matches serial.
    Cdc,
}

#[derive(Clone, Copy, ValueEnum)]
enum DictArg {
    Counting,
    FilePrefix,
}

#[derive(Args)]
struct CompressArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
    #[arg(long, value_enum, default_value = "lzss")]
    algo: AlgoArg,
    #[arg(long, value_enum, default_value = "serial")]
    mode: ModeArg,
    /// Worker count for parallel modes (default: PZIP_THREADS or all CPUs).
    #[arg(long)]
    workers: Option<usize>,
    /// Decompress the result in memory and compare against the input.
    #[arg(long)]
    verify: bool,
    /// LZSS window size in bits (power of two).
    #[arg(long, default_value_t = 1024)]
    window: u32,
    /// LZSS maximum match length in bits.
    #[arg(long, default_value_t = 24)]
    max_match: u32,
    /// LZSS minimum match length in bits.
    #[arg(long, default_value_t = 12)]
    min_match: u32,
    /// LZSS literal block size in bits.
    #[arg(long, default_value_t = 8)]
    block_size: u32,
    /// LZSS initial dictionary.
    #[arg(long, value_enum, default_value = "counting")]
    dict: DictArg,
    /// BWT block size in bytes.
    #[arg(long, default_value_t = bwt::DEFAULT_BLOCK_SIZE)]
    bwt_block: usize,
}

#[derive(Args)]
struct DecompressArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum AudioCmd {
    /// Encode a 16-bit PCM WAV file.
    Encode(AudioEncodeArgs),
    /// Decode back to WAV.
    Decode(AudioDecodeArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Serial,
    Segmented,
    Worksharing,
}

#[derive(Args)]
struct AudioEncodeArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
    /// Output bitrate in bits per second.
    #[arg(long, default_value_t = 128_000)]
    bitrate: u32,
    /// Discard spectral content above this frequency.
    #[arg(long, default_value_t = 17_000)]
    cutoff: u32,
    #[arg(long, value_enum, default_value = "serial")]
    strategy: StrategyArg,
    #[arg(long)]
    workers: Option<usize>,
    /// Also print how encode time splits across the pipeline stages.
    #[arg(long)]
    profile: bool,
}

#[derive(Args)]
struct AudioDecodeArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(short, long)]
    input: PathBuf,
    /// Worker counts to sweep, comma separated.
    #[arg(long, default_value = "1,2,4,8", value_delimiter = ',')]
    workers: Vec<usize>,
    /// Algorithms to include.
    #[arg(long, value_enum, default_value = "huffman,bwt,lzss", value_delimiter = ',')]
    algos: Vec<AlgoArg>,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    /// Write the table here instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct IobenchArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(long, default_value = "4,64,4096,65536", value_delimiter = ',')]
    block_sizes: Vec<usize>,
    #[arg(long, default_value = "1,2,4", value_delimiter = ',')]
    readers: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    runs: usize,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 }; // --help and --version succeed
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pzip: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

/// Usage problems exit 1, malformed data 2, I/O failures 3.
fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::InvalidConfig(_) => 1,
        Error::Io(_) => 3,
        Error::Chunk { source, .. } | Error::Frame { source, .. } => exit_code_for(source),
        _ => 2,
    }
}

/// Worker count: flag, then PZIP_THREADS, then the machine's parallelism.
fn resolve_workers(flag: Option<usize>) -> pzip::Result<usize> {
    let n = match flag {
        Some(n) => n,
        None => match std::env::var("PZIP_THREADS") {
            Ok(v) => v
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("PZIP_THREADS={v} is not a number")))?,
            Err(_) => parallel::available_threads(),
        },
    };
    if n == 0 {
        return Err(Error::InvalidConfig("worker count must be positive".into()));
    }
    Ok(n)
}

fn run(cli: Cli) -> pzip::Result<()> {
    match cli.cmd {
        Cmd::Compress(a) => compress(a),
        Cmd::Decompress(a) => decompress(a),
        Cmd::Audio(AudioCmd::Encode(a)) => audio_encode(a),
        Cmd::Audio(AudioCmd::Decode(a)) => audio_decode(a),
        Cmd::Bench(a) => bench(a),
        Cmd::Iobench(a) => iobench(a),
    }
}

fn lzss_config(a: &CompressArgs) -> LzssConfig {
    LzssConfig {
        window_bits: a.window,
        max_match: a.max_match,
        min_match: a.min_match,
        literal_bits: a.block_size,
        dict_mode: match a.dict {
            DictArg::Counting => DictMode::Counting,
            DictArg::FilePrefix => DictMode::FilePrefix,
        },
    }
}

fn compress(a: CompressArgs) -> pzip::Result<()> {
    let data = std::fs::read(&a.input)?;
    let workers = resolve_workers(a.workers)?;
    let (packed, seconds) = metrics::time(|| -> pzip::Result<Vec<u8>> {
        match (a.mode, a.algo) {
            (ModeArg::Serial, AlgoArg::Huffman) => huffman::compress(&data),
            (ModeArg::Serial, AlgoArg::Bwt) => bwt::compress(&data, a.bwt_block),
            (ModeArg::Serial, AlgoArg::Lzss) => lzss::compress(&data, &lzss_config(&a)),
            (ModeArg::Segmented, algo) => {
                let codec = match algo {
                    AlgoArg::Huffman => SegmentCodec::Huffman,
                    AlgoArg::Bwt => SegmentCodec::Bwt {
                        block_size: a.bwt_block,
                    },
                    AlgoArg::Lzss => SegmentCodec::Lzss(lzss_config(&a)),
                };
                parallel::segment_compress(&data, &codec, workers)
            }
            (ModeArg::Cdc, AlgoArg::Lzss) => {
                parallel::cdc_compress(&data, &lzss_config(&a), workers)
            }
            (ModeArg::Cdc, _) => Err(Error::InvalidConfig(
                "cooperative mode only applies to lzss".into(),
            )),
        }
    });
    let packed = packed?;
    if a.verify {
        let back = pzip::decompress_any(&packed, workers)?;
        if back != data {
            return Err(Error::Corrupt("verification mismatch".into()));
        }
    }
    std::fs::write(&a.output, &packed)?;
    let report = metrics::CompressionReport::new(data.len() as u64, packed.len() as u64, seconds);
    println!(
        "{} -> {} bytes ({:.2}% saved, {:.3}:1) in {:.3}s{}",
        report.original_bytes,
        report.compressed_bytes,
        report.percent,
        report.ratio,
        report.seconds,
        if a.verify { ", verified" } else { "" }
    );
    Ok(())
}

fn decompress(a: DecompressArgs) -> pzip::Result<()> {
    let packed = std::fs::read(&a.input)?;
    let workers = resolve_workers(a.workers)?;
    let (data, seconds) = metrics::time(|| pzip::decompress_any(&packed, workers));
    let data = data?;
    std::fs::write(&a.output, &data)?;
    println!("{} -> {} bytes in {seconds:.3}s", packed.len(), data.len());
    Ok(())
}

fn audio_encode(a: AudioEncodeArgs) -> pzip::Result<()> {
    let wav = std::fs::read(&a.input)?;
    let audio = audio::parse_wav(&wav)?;
    let cfg = EncoderConfig {
        bitrate: a.bitrate,
        cutoff_hz: a.cutoff,
        strategy: match a.strategy {
            StrategyArg::Serial => Strategy::Serial,
            StrategyArg::Segmented => Strategy::Segmented,
            StrategyArg::Worksharing => Strategy::WorkSharing,
        },
        workers: resolve_workers(a.workers)?,
    };
    let (packed, seconds) = metrics::time(|| audio::encode(&audio, &cfg));
    let packed = packed?;
    std::fs::write(&a.output, &packed)?;
    let report = metrics::CompressionReport::new(wav.len() as u64, packed.len() as u64, seconds);
    println!(
        "{} -> {} bytes ({:.2}:1) in {:.3}s, {:.1}s of audio at {} bit/s",
        report.original_bytes,
        report.compressed_bytes,
        report.ratio,
        report.seconds,
        audio.duration(),
        a.bitrate
    );
    if a.profile {
        let profile = audio::profile_stages(&audio, &cfg, 200)?;
        let pct = profile.percentages();
        println!(
            "stage split over {} frames: transform {:.1}%, quantize {:.1}%, pack {:.1}%",
            profile.frames, pct[0], pct[1], pct[2]
        );
    }
    Ok(())
}

fn audio_decode(a: AudioDecodeArgs) -> pzip::Result<()> {
    let packed = std::fs::read(&a.input)?;
    let (audio, seconds) = metrics::time(|| audio::decode(&packed));
    let audio = audio?;
    let wav = audio::write_wav(&audio)?;
    std::fs::write(&a.output, &wav)?;
    println!(
        "{} -> {} bytes ({:.1}s of audio) in {seconds:.3}s",
        packed.len(),
        wav.len(),
        audio.duration()
    );
    Ok(())
}

fn bench(a: BenchArgs) -> pzip::Result<()> {
    let data = std::fs::read(&a.input)?;
    let algos: Vec<BenchAlgo> = a
        .algos
        .iter()
        .map(|x| match x {
            AlgoArg::Huffman => BenchAlgo::Huffman,
            AlgoArg::Bwt => BenchAlgo::Bwt,
            AlgoArg::Lzss => BenchAlgo::Lzss,
        })
        .collect();
    let rows = parallel::run_scaling_bench(&data, &algos, &a.workers)?;
    let text = match a.format {
        FormatArg::Csv => metrics::rows_to_csv(&rows),
        FormatArg::Json => metrics::rows_to_json(&rows)?,
    };
    emit(a.output.as_deref(), &text)
}

fn iobench(a: IobenchArgs) -> pzip::Result<()> {
    let opts = IoBenchOptions {
        block_sizes: a.block_sizes,
        reader_counts: a.readers,
        runs: a.runs.max(1),
        ..IoBenchOptions::default()
    };
    let rows = metrics::io_bench(&a.input, &opts)?;
    let text = match a.format {
        FormatArg::Csv => metrics::io_rows_to_csv(&rows),
        FormatArg::Json => serde_json::to_string_pretty(&rows).map_err(Error::from)?,
    };
    emit(a.output.as_deref(), &text)
}

fn emit(path: Option<&std::path::Path>, text: &str) -> pzip::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}
