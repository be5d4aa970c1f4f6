//! C interface to the pzip compression toolkit.
//!
//! Compressed data moves across the boundary in opaque [`PzipBuffer`]
//! handles: the library owns the allocation, callers read it through
//! [`pzip_buffer_data`]/[`pzip_buffer_len`] and release it with
//! [`pzip_buffer_free`]. Every fallible call returns a [`PzipStatus`];
//! panics are caught at the boundary and reported as
//! [`PzipStatus::Panic`] instead of unwinding into C.
//!
//! The matching header is generated into `include/pzip.h` at build time.

use std::panic::{catch_unwind, AssertUnwindSafe};

use pzip::lzss::LzssConfig;
use pzip::parallel::SegmentCodec;
use pzip::{bwt, huffman, lzss, parallel, Error};

/// Result of every fallible call in this interface.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PzipStatus {
    /// The call succeeded.
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A parameter was out of range for the requested operation.
    InvalidConfig = 2,
    /// The input is not a valid container or failed an integrity check.
    CorruptData = 3,
    /// An operating-system I/O error occurred.
    IoError = 4,
    /// An internal invariant failed; the operation was aborted safely.
    Panic = 5,
}

/// Compression algorithm selector for [`pzip_compress`].
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PzipAlgo {
    /// Canonical Huffman coding of the whole input.
    Huffman = 0,
    /// Burrows-Wheeler pipeline (block sort, move-to-front, run-length,
    /// Huffman).
    Bwt = 1,
    /// Bit-oriented LZSS with the default window configuration.
    Lzss = 2,
}

/// Owned byte buffer. Opaque to C; use the accessor functions.
pub struct PzipBuffer {
    data: Vec<u8>,
}

fn status_of(e: &Error) -> PzipStatus {
    match e {
        Error::InvalidConfig(_) => PzipStatus::InvalidConfig,
        Error::Io(_) => PzipStatus::IoError,
        Error::Chunk { source, .. } | Error::Frame { source, .. } => status_of(source),
        _ => PzipStatus::CorruptData,
    }
}

/// Runs `f` with panics fenced off, storing its buffer through `out`.
fn guarded(out: *mut *mut PzipBuffer, f: impl FnOnce() -> pzip::Result<Vec<u8>>) -> PzipStatus {
    if out.is_null() {
        return PzipStatus::NullArgument;
    }
    unsafe { out.write(std::ptr::null_mut()) };
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(data)) => {
            let handle = Box::new(PzipBuffer { data });
            unsafe { out.write(Box::into_raw(handle)) };
            PzipStatus::Ok
        }
        Ok(Err(e)) => status_of(&e),
        Err(_) => PzipStatus::Panic,
    }
}

/// Borrows `(data, len)` as a byte slice, treating a null `data` with a
/// nonzero `len` as an error.
unsafe fn input_slice<'a>(data: *const u8, len: usize) -> Option<&'a [u8]> {
    if data.is_null() {
        if len == 0 {
            Some(&[])
        } else {
            None
        }
    } else {
        Some(unsafe { std::slice::from_raw_parts(data, len) })
    }
}

/// Compress `len` bytes at `data` with the chosen algorithm and store the
/// resulting container in `*out`.
///
/// `workers` selects execution: 0 or 1 compresses serially, anything
/// larger splits the input into that many independently compressed
/// segments. The output is a self-describing container either way and
/// decompresses with [`pzip_decompress`].
///
/// # Safety
///
/// `data` must point to `len` readable bytes (or be null with `len` 0),
/// and `out` must point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn pzip_compress(
    data: *const u8,
    len: usize,
    algo: PzipAlgo,
    workers: u32,
    out: *mut *mut PzipBuffer,
) -> PzipStatus {
    let Some(input) = (unsafe { input_slice(data, len) }) else {
        return PzipStatus::NullArgument;
    };
    guarded(out, || {
        if workers > 1 {
            let codec = match algo {
                PzipAlgo::Huffman => SegmentCodec::Huffman,
                PzipAlgo::Bwt => SegmentCodec::Bwt {
                    block_size: bwt::DEFAULT_BLOCK_SIZE,
                },
                PzipAlgo::Lzss => SegmentCodec::Lzss(LzssConfig::default()),
            };
            parallel::segment_compress(input, &codec, workers as usize)
        } else {
            match algo {
                PzipAlgo::Huffman => huffman::compress(input),
                PzipAlgo::Bwt => bwt::compress(input, bwt::DEFAULT_BLOCK_SIZE),
                PzipAlgo::Lzss => lzss::compress(input, &LzssConfig::default()),
            }
        }
    })
}

/// Decompress any container produced by this library into `*out`. The
/// format is detected from the container itself; `workers` (0 for the
/// machine default) only affects segmented containers.
///
/// # Safety
///
/// `data` must point to `len` readable bytes (or be null with `len` 0),
/// and `out` must point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn pzip_decompress(
    data: *const u8,
    len: usize,
    workers: u32,
    out: *mut *mut PzipBuffer,
) -> PzipStatus {
    let Some(input) = (unsafe { input_slice(data, len) }) else {
        return PzipStatus::NullArgument;
    };
    let workers = if workers == 0 {
        parallel::available_threads()
    } else {
        workers as usize
    };
    guarded(out, || pzip::decompress_any(input, workers))
}

/// Pointer to the buffer's bytes, or null for a null buffer. Valid until
/// the buffer is freed.
///
/// # Safety
///
/// `buf` must be a handle from this library (or null) that has not been
/// freed.
#[no_mangle]
pub unsafe extern "C" fn pzip_buffer_data(buf: *const PzipBuffer) -> *const u8 {
    match unsafe { buf.as_ref() } {
        Some(b) => b.data.as_ptr(),
        None => std::ptr::null(),
    }
}

/// Number of bytes in the buffer; 0 for a null buffer.
///
/// # Safety
///
/// `buf` must be a handle from this library (or null) that has not been
/// freed.
#[no_mangle]
pub unsafe extern "C" fn pzip_buffer_len(buf: *const PzipBuffer) -> usize {
    match unsafe { buf.as_ref() } {
        Some(b) => b.data.len(),
        None => 0,
    }
}

/// Release a buffer. Null is accepted and ignored; freeing the same
/// buffer twice is undefined.
///
/// # Safety
///
/// `buf` must be a handle from this library (or null) that has not
/// already been freed.
#[no_mangle]
pub unsafe extern "C" fn pzip_buffer_free(buf: *mut PzipBuffer) {
    if !buf.is_null() {
        drop(unsafe { Box::from_raw(buf) });
    }
}

/// Library version as a static null-terminated string.
#[no_mangle]
pub extern "C" fn pzip_version() -> *const std::os::raw::c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const std::os::raw::c_char
}
