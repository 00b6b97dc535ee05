/* C interface for the octic search engine. */

#ifndef OCTIC_H
#define OCTIC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Number of supported primes (2 through 97).
 */
#define OCTIC_PRIME_COUNT 25

/**
 * Number of basis coefficients in an input vector.
 */
#define OCTIC_COEFF_COUNT 15

/**
 * Result code of every fallible call.
 */
typedef enum OcticStatus {
  /**
   * The call succeeded.
   */
  OCTIC_OK = 0,
  /**
   * A pointer was null or an argument value was out of range.
   */
  OCTIC_INVALID_ARGUMENT = 1,
  /**
   * An input file or table failed validation.
   */
  OCTIC_DATA_ERROR = 2,
  /**
   * The filesystem failed.
   */
  OCTIC_IO_ERROR = 3,
} OcticStatus;

/**
 * Aggregation scheme selector for table construction. Passed as a
 * plain `uint32_t` so that out-of-range values can be rejected instead
 * of being undefined behavior.
 */
typedef enum OcticScheme {
  /**
   * Group points by their exact monomial key.
   */
  OCTIC_SCHEME_EXACT_KEY = 0,
  /**
   * Group by the key up to eighth-power cofactors.
   */
  OCTIC_SCHEME_MOD_EIGHTH_POWERS = 1,
  /**
   * Group by the key up to square cofactors (smallest tables).
   */
  OCTIC_SCHEME_MOD_SQUARES = 2,
} OcticScheme;

/**
 * Opaque list of (label, twist, agreement) matches, best first.
 */
typedef struct OcticMatches OcticMatches;

/**
 * Opaque handle over the 25 per-prime aggregate count tables.
 */
typedef struct OcticTables OcticTables;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread. Never null;
 * empty before the first failure. The pointer is invalidated by the
 * next `octic_*` call on the same thread.
 */
const char *octic_last_error(void);

/**
 * Writes the 25 supported primes (ascending) to `out`.
 *
 * # Safety
 * `out` must point to 25 writable `uint32_t`.
 */
enum OcticStatus octic_primes(uint32_t *out);

/**
 * Builds all 25 tables in memory. `scheme` is an [`OcticScheme`]
 * value; `threads` 0 means one worker. The handle must be released
 * with [`octic_tables_free`].
 *
 * # Safety
 * `out` must point to a writable handle slot.
 */
enum OcticStatus octic_tables_build(uint32_t scheme, uint32_t threads, struct OcticTables **out);

/**
 * Loads the tables cached in `dir` (UTF-8 path), building and caching
 * them first if absent — the counterpart of the CLI `tables` command.
 *
 * # Safety
 * `dir` must be a NUL-terminated string and `out` a writable slot.
 */
enum OcticStatus octic_tables_open(const char *dir,
                                   uint32_t scheme,
                                   uint32_t threads,
                                   struct OcticTables **out);

/**
 * Releases a handle from [`octic_tables_build`] or
 * [`octic_tables_open`]. Null is a no-op.
 *
 * # Safety
 * `tables` must be unused after this call.
 */
void octic_tables_free(struct OcticTables *tables);

/**
 * Counts the points of `u² = f` over `F_prime` for the coefficient
 * vector `coeffs` (15 entries, basis order; not all zero).
 *
 * # Safety
 * `tables` must be a live handle, `coeffs` 15 readable entries,
 * `out_count` writable.
 */
enum OcticStatus octic_count(const struct OcticTables *tables,
                             const int64_t *coeffs,
                             uint32_t prime,
                             uint64_t *out_count);

/**
 * Counts over all 25 primes at once; `out_counts` receives 25 entries
 * in prime order.
 *
 * # Safety
 * As [`octic_count`], with `out_counts` pointing to 25 writable slots.
 */
enum OcticStatus octic_count_all(const struct OcticTables *tables,
                                 const int64_t *coeffs,
                                 uint64_t *out_counts);

/**
 * Matches one surface against a newform table file, scanning the
 * default twist set. Matches with at least `threshold` (1..=25)
 * agreeing primes are returned best-first through an [`OcticMatches`]
 * handle, which may be empty and must be released with
 * [`octic_matches_free`].
 *
 * # Safety
 * `tables` live handle, `coeffs` 15 readable entries, `forms_path`
 * NUL-terminated, `out` writable.
 */
enum OcticStatus octic_match_file(const struct OcticTables *tables,
                                  const int64_t *coeffs,
                                  const char *forms_path,
                                  uint32_t threshold,
                                  struct OcticMatches **out);

/**
 * Number of matches in the list. Null yields 0.
 *
 * # Safety
 * `matches` must be a live handle or null.
 */
size_t octic_matches_len(const struct OcticMatches *matches);

/**
 * Label of match `index` (owned by the list, NUL-terminated); null if
 * the index is out of range.
 *
 * # Safety
 * `matches` must be a live handle or null.
 */
const char *octic_matches_label(const struct OcticMatches *matches, size_t index);

/**
 * Twist discriminant of match `index`.
 *
 * # Safety
 * `matches` live handle or null, `out` writable.
 */
enum OcticStatus octic_matches_twist(const struct OcticMatches *matches,
                                     size_t index,
                                     int64_t *out);

/**
 * Agreement count of match `index`.
 *
 * # Safety
 * `matches` live handle or null, `out` writable.
 */
enum OcticStatus octic_matches_agree(const struct OcticMatches *matches,
                                     size_t index,
                                     uint32_t *out);

/**
 * Releases a match list. Null is a no-op.
 *
 * # Safety
 * `matches` must be unused after this call.
 */
void octic_matches_free(struct OcticMatches *matches);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OCTIC_H */
