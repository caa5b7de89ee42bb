/* C interface to the polyprod polytope library. */

#ifndef POLYPROD_H
#define POLYPROD_H

/* Generated by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Join: glues nothing, ranks add plus one.
 */
#define POLYPROD_KIND_JOIN 0

/**
 * Cartesian product: identifies least faces, ranks add.
 */
#define POLYPROD_KIND_CART 1

/**
 * Direct sum: identifies greatest faces, ranks add.
 */
#define POLYPROD_KIND_DSUM 2

/**
 * Topological product: identifies both ends, ranks add minus one.
 * Operands must have rank at least 2.
 */
#define POLYPROD_KIND_TOPO 3

/**
 * Sentinel returned by `polyprod_rank` when the handle is null.
 */
#define POLYPROD_NO_RANK INT32_MIN

/**
 * Opaque polytope. Create with `polyprod_eval`, `polyprod_dual` or
 * `polyprod_product`; release with `polyprod_free`.
 */
typedef struct PolytopeHandle PolytopeHandle;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Evaluates an expression in the CLI grammar (`"prism(gon(5))"`,
 * `"edge ^ 3"`, `"gon(3) topo gon(4)"`, ...) to a new handle.
 * Returns null on a syntax, range or construction error.
 *
 * # Safety
 * `expr` must be null or point to a NUL-terminated string.
 */
struct PolytopeHandle *polyprod_eval(const char *expr);

/**
 * Releases a handle. Null is allowed.
 *
 * # Safety
 * `h` must be null or a handle returned by this library that has not
 * been freed already.
 */
void polyprod_free(struct PolytopeHandle *h);

/**
 * Message from the most recent failed call on this thread; the empty
 * string when that call succeeded. The pointer stays valid only until
 * the next call into the library from the same thread.
 */
const char *polyprod_last_error(void);

/**
 * Rank of the polytope, or `POLYPROD_NO_RANK` for a null handle.
 *
 * # Safety
 * `h` must be null or a live handle from this library.
 */
int32_t polyprod_rank(const struct PolytopeHandle *h);

/**
 * Total number of faces, the two improper ones included. 0 on a null
 * handle (a real polytope has at least two faces).
 *
 * # Safety
 * `h` must be null or a live handle from this library.
 */
uint64_t polyprod_face_count(const struct PolytopeHandle *h);

/**
 * Number of flags (maximal chains of proper faces). 0 on a null handle.
 *
 * # Safety
 * `h` must be null or a live handle from this library.
 */
uint64_t polyprod_flag_count(const struct PolytopeHandle *h);

/**
 * Whether the poset satisfies the polytope axioms. Handles built by
 * this library always do; the check is a diagnostic.
 *
 * # Safety
 * `h` must be null or a live handle from this library.
 */
bool polyprod_is_valid(const struct PolytopeHandle *h);

/**
 * F-vector: counts of faces of rank 0 through rank - 1. Writes up to
 * `cap` entries to `out` and returns the full length, so `cap` = 0
 * sizes the buffer. Returns -1 on a null handle.
 *
 * # Safety
 * `h` must be null or a live handle; `out` must point to at least `cap`
 * writable u64 slots whenever `cap` > 0.
 */
ptrdiff_t polyprod_f_vector(const struct PolytopeHandle *h, uint64_t *out, size_t cap);

/**
 * Order of the automorphism group. 0 on a null handle.
 *
 * # Safety
 * `h` must be null or a live handle from this library.
 */
uint64_t polyprod_aut_order(const struct PolytopeHandle *h);

/**
 * Order of the monodromy group. The group is closed over exchange-map
 * words, so the cost grows with the order itself; keep inputs modest.
 * 0 on a null handle.
 *
 * # Safety
 * `h` must be null or a live handle from this library.
 */
uint64_t polyprod_mono_order(const struct PolytopeHandle *h);

/**
 * Number of flag orbits under the automorphism group. 0 on a null
 * handle.
 *
 * # Safety
 * `h` must be null or a live handle from this library.
 */
uint64_t polyprod_orbit_count(const struct PolytopeHandle *h);

/**
 * New handle for the dual polytope (the face poset upside down).
 * Null on a null input.
 *
 * # Safety
 * `h` must be null or a live handle from this library.
 */
struct PolytopeHandle *polyprod_dual(const struct PolytopeHandle *h);

/**
 * Product of two handles under one of the `POLYPROD_KIND_` constants.
 * Null on a bad kind, a null operand, or an inadmissible operand (the
 * topological product needs rank at least 2 on both sides).
 *
 * # Safety
 * `a` and `b` must each be null or a live handle from this library.
 */
struct PolytopeHandle *polyprod_product(int kind,
                                        const struct PolytopeHandle *a,
                                        const struct PolytopeHandle *b);

/**
 * Catalog-style name of the polytope (`"cube(3)"`, `"gon(5)"`, ...),
 * falling back to a canonical hash for unnamed posets. Free the string
 * with `polyprod_string_free`. Null on a null handle.
 *
 * # Safety
 * `h` must be null or a live handle from this library.
 */
char *polyprod_describe(const struct PolytopeHandle *h);

/**
 * Prime factorization under `kind`, one `name ^ multiplicity` line per
 * prime, newline-terminated. Free with `polyprod_string_free`. Null on
 * error.
 *
 * # Safety
 * `h` must be null or a live handle from this library.
 */
char *polyprod_factor_summary(const struct PolytopeHandle *h, int kind);

/**
 * Face poset as JSON: every face with its rank, every cover relation as
 * an `[upper, lower]` pair. Free with `polyprod_string_free`. Null on a
 * null handle.
 *
 * # Safety
 * `h` must be null or a live handle from this library.
 */
char *polyprod_export_json(const struct PolytopeHandle *h);

/**
 * Face poset as a Graphviz digraph of the Hasse diagram. Free with
 * `polyprod_string_free`. Null on a null handle.
 *
 * # Safety
 * `h` must be null or a live handle from this library.
 */
char *polyprod_export_dot(const struct PolytopeHandle *h);

/**
 * Frees a string returned by this library. Null is allowed.
 *
 * # Safety
 * `s` must be null or a string returned by this library that has not
 * been freed already.
 */
void polyprod_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* POLYPROD_H */
