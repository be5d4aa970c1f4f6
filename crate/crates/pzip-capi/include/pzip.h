/* C interface to the pzip compression toolkit. */

#ifndef PZIP_H
#define PZIP_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Compression algorithm selector for [`pzip_compress`].
 */
typedef enum PzipAlgo {
  /**
   * Canonical Huffman coding of the whole input.
   */
  PZIP_ALGO_HUFFMAN = 0,
  /**
   * Burrows-Wheeler pipeline (block sort, move-to-front, run-length,
   * Huffman).
   */
  PZIP_ALGO_BWT = 1,
  /**
   * Bit-oriented LZSS with the default window configuration.
   */
  PZIP_ALGO_LZSS = 2,
} PzipAlgo;

/**
 * Result of every fallible call in this interface.
 */
typedef enum PzipStatus {
  /**
   * The call succeeded.
   */
  PZIP_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  PZIP_STATUS_NULL_ARGUMENT = 1,
  /**
   * A parameter was out of range for the requested operation.
   */
  PZIP_STATUS_INVALID_CONFIG = 2,
  /**
   * The input is not a valid container or failed an integrity check.
   */
  PZIP_STATUS_CORRUPT_DATA = 3,
  /**
   * An operating-system I/O error occurred.
   */
  PZIP_STATUS_IO_ERROR = 4,
  /**
   * An internal invariant failed; the operation was aborted safely.
   */
  PZIP_STATUS_PANIC = 5,
} PzipStatus;

/**
 * Owned byte buffer. Opaque to C; use the accessor functions.
 */
typedef struct PzipBuffer PzipBuffer;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Compress `len` bytes at `data` with the chosen algorithm and store the
 * resulting container in `*out`.
 *
 * `workers` selects execution: 0 or 1 compresses serially, anything
 * larger splits the input into that many independently compressed
 * segments. The output is a self-describing container either way and
 * decompresses with [`pzip_decompress`].
 *
 * # Safety
 *
 * `data` must point to `len` readable bytes (or be null with `len` 0),
 * and `out` must point to writable storage for one pointer.
 */
enum PzipStatus pzip_compress(const uint8_t *data,
                              uintptr_t len,
                              enum PzipAlgo algo,
                              uint32_t workers,
                              struct PzipBuffer **out);

/**
 * Decompress any container produced by this library into `*out`. The
 * format is detected from the container itself; `workers` (0 for the
 * machine default) only affects segmented containers.
 *
 * # Safety
 *
 * `data` must point to `len` readable bytes (or be null with `len` 0),
 * and `out` must point to writable storage for one pointer.
 */
enum PzipStatus pzip_decompress(const uint8_t *data,
                                uintptr_t len,
                                uint32_t workers,
                                struct PzipBuffer **out);

/**
 * Pointer to the buffer's bytes, or null for a null buffer. Valid until
 * the buffer is freed.
 *
 * # Safety
 *
 * `buf` must be a handle from this library (or null) that has not been
 * freed.
 */
const uint8_t *pzip_buffer_data(const struct PzipBuffer *buf);

/**
 * Number of bytes in the buffer; 0 for a null buffer.
 *
 * # Safety
 *
 * `buf` must be a handle from this library (or null) that has not been
 * freed.
 */
uintptr_t pzip_buffer_len(const struct PzipBuffer *buf);

/**
 * Release a buffer. Null is accepted and ignored; freeing the same
 * buffer twice is undefined.
 *
 * # Safety
 *
 * `buf` must be a handle from this library (or null) that has not
 * already been freed.
 */
void pzip_buffer_free(struct PzipBuffer *buf);

/**
 * Library version as a static null-terminated string.
 */
const char *pzip_version(void);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* PZIP_H */
