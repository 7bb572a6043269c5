#ifndef MORAVA_KOSZUL_H
#define MORAVA_KOSZUL_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MkStatus {
  MK_STATUS_OK = 0,
  MK_STATUS_NULL_POINTER = 1,
  MK_STATUS_INVALID_ARGUMENT = 2,
  MK_STATUS_VERIFY_FAILED = 3,
  MK_STATUS_PANIC = 4,
} MkStatus;

typedef enum MkCommand {
  MK_COMMAND_W_COEFFS = 0,
  MK_COMMAND_D_COEFFS = 1,
  MK_COMMAND_PRESENTATION = 2,
  MK_COMMAND_COHOMOLOGY = 3,
  MK_COMMAND_VERIFY = 4,
  MK_COMMAND_HEIGHT1 = 5,
} MkCommand;

// Opaque job handle.
typedef struct MkJob MkJob;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or NULL. Valid until the
// next call on the same thread.
const char *mk_last_error(void);

// Library version as a static NUL-terminated string.
const char *mk_version(void);

// Creates a job. Zero for `p_prec` or `a_prec` selects the default for `m`.
// The configuration is validated here.
//
// # Safety
// `out` must be a valid pointer to writable storage for one handle.
enum MkStatus mk_job_new(uint64_t p,
                         uint32_t m,
                         uint32_t p_prec,
                         uintptr_t a_prec,
                         struct MkJob **out);

// Releases a job. NULL is ignored.
//
// # Safety
// `job` must come from [`mk_job_new`] and not be freed twice.
void mk_job_free(struct MkJob *job);

// Runs `command` on the job and stores its JSON document in `out_json`.
// The document is produced even when a verification fails, in which case
// the status is `MK_STATUS_VERIFY_FAILED`.
//
// # Safety
// `job` must be a live handle and `out_json` valid for one write.
enum MkStatus mk_job_run(const struct MkJob *job,
                         enum MkCommand command,
                         bool pretty,
                         char **out_json);

// Runs the verification suite; `out_pass` receives the verdict.
//
// # Safety
// `job` must be a live handle and `out_pass` valid for one write.
enum MkStatus mk_job_verify(const struct MkJob *job, bool *out_pass);

// Runs a job-independent command (`w-coeffs`, `d-coeffs`, `height1`).
// `m` is the largest tau for `d-coeffs`; negative values mean unset.
//
// # Safety
// `out_json` must be valid for one write.
enum MkStatus mk_run_prime(enum MkCommand command, uint64_t p, int64_t m, char **out_json);

// Releases a string returned by this library. NULL is ignored.
//
// # Safety
// `s` must come from this library and not be freed twice.
void mk_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MORAVA_KOSZUL_H */
