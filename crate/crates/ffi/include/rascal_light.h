#ifndef RASCAL_LIGHT_H
#define RASCAL_LIGHT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Pass as `fuel` for evaluation without a fuel bound.
 */
#define RL_UNBOUNDED UINT64_MAX

/**
 * Result codes. The evaluation codes agree with the exit status of the
 * `rlight` command line tool.
 */
typedef enum RlStatus {
  /**
   * Normal value or `return`.
   */
  RL_STATUS_OK = 0,
  /**
   * The program threw a value.
   */
  RL_STATUS_THROW = 2,
  /**
   * Runtime error, or `break`, `continue` or `fail` escaping.
   */
  RL_STATUS_ERROR = 3,
  /**
   * The fuel ran out.
   */
  RL_STATUS_TIMEOUT = 4,
  /**
   * Source text did not parse or validate.
   */
  RL_STATUS_LOAD = 5,
  /**
   * Recursion depth of the host exceeded.
   */
  RL_STATUS_RESOURCE = 6,
  /**
   * A null pointer, invalid UTF-8 or an unknown function name.
   */
  RL_STATUS_INVALID_ARGUMENT = 64,
  /**
   * Internal failure inside the library.
   */
  RL_STATUS_PANIC = 70,
} RlStatus;

/**
 * A validated module together with the store its initializers built.
 */
typedef struct RlModule RlModule;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses and validates `source`, then runs its global initializers with
 * `fuel`. On success `*module` receives a handle. `*message` (when not
 * null) receives `"ok"` or a diagnostic.
 *
 * # Safety
 * `source` must be a valid nul-terminated string. `module` and `message`
 * must be null or valid for writes.
 */
enum RlStatus rl_module_parse(const char *source,
                              uint64_t fuel,
                              struct RlModule **module,
                              char **message);

/**
 * Evaluates the expression `expr` in the scope of the module's globals.
 * `*result` receives the rendered outcome, e.g. `3`, `throw nokey(3)` or
 * `timeout`.
 *
 * # Safety
 * `module` must come from [`rl_module_parse`] and not be freed. `expr`
 * must be a valid nul-terminated string, `result` null or writable.
 */
enum RlStatus rl_eval(const struct RlModule *module,
                      const char *expr,
                      uint64_t fuel,
                      char **result);

/**
 * Calls function `name` with `argc` arguments, each a value literal such
 * as `[1, 2]` or `succ(zero())`.
 *
 * # Safety
 * `module` must come from [`rl_module_parse`]. `name` and the `argc`
 * entries of `argv` must be valid nul-terminated strings; `argv` may be
 * null when `argc` is 0. `result` must be null or writable.
 */
enum RlStatus rl_call(const struct RlModule *module,
                      const char *name,
                      const char *const *argv,
                      size_t argc,
                      uint64_t fuel,
                      char **result);

/**
 * Releases a module handle. Null is ignored.
 *
 * # Safety
 * `module` must be null or come from [`rl_module_parse`], and must not be
 * used afterwards.
 */
void rl_module_free(struct RlModule *module);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must be null or a string handed out by this library, and must not be
 * used afterwards.
 */
void rl_string_free(char *s);

/**
 * Library version as a static string.
 */
const char *rl_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RASCAL_LIGHT_H */
