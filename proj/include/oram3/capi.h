#pragma once

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Three-server oblivious store behind a flat C surface: opaque handles,
 * status codes, and JSON strings for structured results. Strings returned
 * through char** are heap-allocated; release them with o3_string_free. */

typedef enum o3_status {
  O3_OK = 0,
  O3_EINVAL = 1,      /* bad argument (size, address, null pointer) */
  O3_ESTATE = 2,      /* handle in the wrong state for the call */
  O3_EVIOLATION = 3,  /* a protocol invariant tripped or verification failed */
  O3_EIO = 4,         /* filesystem problem */
  O3_EINTERNAL = 5    /* unexpected failure; see o3_last_error */
} o3_status;

const char* o3_status_name(o3_status s);

/* Last error message for the calling thread; empty string when none. */
const char* o3_last_error(void);

void o3_string_free(char* s);

/* ---- store handle ------------------------------------------------------- */

typedef struct o3_oram o3_oram;

/* n must be a power of two >= 2. big_blocks widens payloads to ~log^2(n)
 * bits. Every address starts at 0. */
o3_status o3_oram_create(uint64_t n, uint64_t seed, int big_blocks, o3_oram** out);
void o3_oram_destroy(o3_oram* h);

o3_status o3_oram_read(o3_oram* h, uint64_t addr, uint64_t* value_out);
/* old_out may be NULL when the previous value is not wanted. */
o3_status o3_oram_write(o3_oram* h, uint64_t addr, uint64_t value, uint64_t* old_out);

/* Capacity, access count, and bandwidth counters as JSON. */
o3_status o3_oram_stats_json(o3_oram* h, char** json_out);

/* ---- harness entry points ------------------------------------------------ */

/* Oracle replay of three workload kinds, ops each. O3_EVIOLATION on any
 * mismatch; the JSON report is produced either way. */
o3_status o3_verify(uint64_t n, uint64_t ops, uint64_t seed, char** json_out);

/* Pattern-equality and index-uniformity audits; trials drives the
 * chi-square sample count. O3_EVIOLATION when an audit fails. */
o3_status o3_audit(uint64_t n, uint64_t ops, uint64_t trials, uint64_t seed, char** json_out);

/* Bandwidth sweep over `count` sizes with scaling fits. */
o3_status o3_bench(const uint64_t* sizes, size_t count, int big_blocks, uint64_t seed,
                   char** json_out);

/* JSONL trace of setup plus a uniform workload, written to path. */
o3_status o3_trace(uint64_t n, uint64_t ops, uint64_t seed, const char* path);

#ifdef __cplusplus
}
#endif
