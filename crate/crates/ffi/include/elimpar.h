#ifndef ELIMPAR_H
#define ELIMPAR_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/*
 Result codes.
 */
typedef enum ElimparStatus {
  ELIMPAR_STATUS_OK = 0,
  ELIMPAR_STATUS_NULL_ARGUMENT = 1,
  ELIMPAR_STATUS_INVALID_UTF8 = 2,
  ELIMPAR_STATUS_PARSE = 3,
  ELIMPAR_STATUS_INVALID = 4,
  ELIMPAR_STATUS_UNKNOWN_PARAMETER = 5,
  ELIMPAR_STATUS_CAP_EXCEEDED = 6,
  ELIMPAR_STATUS_IO = 7,
  ELIMPAR_STATUS_PANIC = 8,
} ElimparStatus;

/*
 A validated groupoid with its parameter indexing.
 */
typedef struct ElimparGroupoid ElimparGroupoid;

/*
 A parsed theory.
 */
typedef struct ElimparTheory ElimparTheory;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failed call on this thread, or null. Valid until the
 next call into the library on this thread.
 */
const char *elimpar_last_error(void);

/*
 Library version as a static string.
 */
const char *elimpar_version(void);

/*
 # Safety
 `s` must be null or a string returned by this library, not yet freed.
 */
void elimpar_string_free(char *s);

/*
 Loads a groupoid from its JSON document.

 # Safety
 `json` must be a nul-terminated string; `out` must be writable.
 */
enum ElimparStatus elimpar_groupoid_from_json(const char *json, struct ElimparGroupoid **out);

/*
 # Safety
 `g` must be null or a handle from this library, not yet freed.
 */
void elimpar_groupoid_free(struct ElimparGroupoid *g);

/*
 # Safety
 `g` must be a live handle; `out` must be writable.
 */
enum ElimparStatus elimpar_groupoid_object_count(const struct ElimparGroupoid *g, size_t *out);

/*
 # Safety
 `g` must be a live handle; `out` must be writable.
 */
enum ElimparStatus elimpar_groupoid_arrow_count(const struct ElimparGroupoid *g, size_t *out);

/*
 The same objects and indexing with every isomorphism between objects.

 # Safety
 `g` must be a live handle; `out` must be writable.
 */
enum ElimparStatus elimpar_groupoid_etale_completion(const struct ElimparGroupoid *g,
                                                     struct ElimparGroupoid **out);

/*
 Serializes the groupoid with every arrow listed.

 # Safety
 `g` must be a live handle; `out` must be writable.
 */
enum ElimparStatus elimpar_groupoid_to_json(const struct ElimparGroupoid *g, char **out);

/*
 Parses a geometric theory in the DSL.

 # Safety
 `text` must be a nul-terminated string; `out` must be writable.
 */
enum ElimparStatus elimpar_theory_parse(const char *text, struct ElimparTheory **out);

/*
 # Safety
 `t` must be null or a handle from this library, not yet freed.
 */
void elimpar_theory_free(struct ElimparTheory *t);

/*
 # Safety
 `t` must be a live handle; `out` must be writable.
 */
enum ElimparStatus elimpar_theory_axiom_count(const struct ElimparTheory *t, size_t *out);

/*
 Prints the theory in the DSL.

 # Safety
 `t` must be a live handle; `out` must be writable.
 */
enum ElimparStatus elimpar_theory_to_string(const struct ElimparTheory *t, char **out);

/*
 Whether every parameter tuple up to `max_tuple` has a parameter-free
 orbit.

 # Safety
 `g` must be a live handle; `out` must be writable.
 */
enum ElimparStatus elimpar_eliminates_parameters(const struct ElimparGroupoid *g,
                                                 size_t max_tuple,
                                                 bool *out);

/*
 Orbit of `x⃗ = m⃗` for the comma-separated parameter names in `tuple`.
 Writes the orbit size and, when the orbit is parameter-free definable,
 its formula (otherwise null).

 # Safety
 `g` must be a live handle, `tuple` a nul-terminated string and both
 outputs writable.
 */
enum ElimparStatus elimpar_orbit(const struct ElimparGroupoid *g,
                                 const char *tuple,
                                 size_t *orbit_size,
                                 char **formula);

/*
 Conservativity against all models with at most `size_bound` elements
 per sort, comparing atomic formulas in up to `pool_vars` variables.

 # Safety
 `g` and `t` must be live handles; `out` must be writable.
 */
enum ElimparStatus elimpar_is_conservative(const struct ElimparGroupoid *g,
                                           const struct ElimparTheory *t,
                                           size_t size_bound,
                                           size_t pool_vars,
                                           bool *out);

/*
 The theory of the groupoid over the signature extended by one relation
 per parameter tuple of length at most `tuple_bound`, with default
 sequent bounds.

 # Safety
 `g` must be a live handle; `out` must be writable.
 */
enum ElimparStatus elimpar_synthesize_theory(const struct ElimparGroupoid *g,
                                             size_t tuple_bound,
                                             struct ElimparTheory **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ELIMPAR_H */
