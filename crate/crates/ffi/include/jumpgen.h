#ifndef JUMPGEN_H
#define JUMPGEN_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes. The first four agree with the command-line exit codes.
typedef enum JgStatus {
  JG_STATUS_OK = 0,
  JG_STATUS_MISMATCH = 1,
  JG_STATUS_CONFIG = 2,
  JG_STATUS_INTERNAL = 3,
  JG_STATUS_NULL_ARGUMENT = 4,
  JG_STATUS_INVALID_UTF8 = 5,
  JG_STATUS_PANIC = 6,
} JgStatus;

// Opaque handle to a built chain.
typedef struct JgSession JgSession;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Parses a JSON configuration and builds its chain.
//
// # Safety
// `config_json` must be a NUL-terminated string and `out` a valid pointer.
enum JgStatus jg_session_new(const char *config_json, struct JgSession **out);

// Releases a session. Null is accepted.
//
// # Safety
// `session` must come from `jg_session_new` and not be used afterwards.
void jg_session_free(struct JgSession *session);

// Number of T-chain elements built.
//
// # Safety
// `session` must be live and `out` valid.
enum JgStatus jg_session_t_len(const struct JgSession *session, size_t *out);

// Whether the chain was cut short by a bound.
//
// # Safety
// `session` must be live and `out` valid.
enum JgStatus jg_session_truncated(const struct JgSession *session, bool *out);

// The full JSON report, as written by `jumpgen build --json`.
//
// # Safety
// `session` must be live and `out` valid. Free the result with `jg_string_free`.
enum JgStatus jg_session_report_json(const struct JgSession *session, char **out);

// Generators of the ideal of monomials with value at least `sigma`, as JSON.
//
// # Safety
// `session` must be live, `sigma` NUL-terminated and `out` valid.
// Free the result with `jg_string_free`.
enum JgStatus jg_session_ideal_json(const struct JgSession *session, const char *sigma, char **out);

// Rebuilds the bundled example and compares it with its reference data.
// Returns `Mismatch` and a listing in `jg_last_error` when they differ.
enum JgStatus jg_verify_example(void);

// Message for the last failed call on this thread, or null.
// The pointer stays valid until the next library call on the thread.
const char *jg_last_error(void);

// Releases a string returned by the library. Null is accepted.
//
// # Safety
// `s` must come from this library and not be freed twice.
void jg_string_free(char *s);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* JUMPGEN_H */
