#ifndef LOOSE_HC_H
#define LOOSE_HC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LhcDecision {
  LHC_DECISION_NO = 0,
  LHC_DECISION_YES = 1,
  /**
   * Budget ran out before the search finished.
   */
  LHC_DECISION_UNKNOWN = 2,
} LhcDecision;

typedef enum LhcGadget {
  LHC_GADGET_A2 = 0,
  LHC_GADGET_A1 = 1,
  LHC_GADGET_BACKBONE1 = 2,
  LHC_GADGET_CONTRACTED_BACKBONE = 3,
} LhcGadget;

typedef enum LhcStatus {
  LHC_STATUS_OK = 0,
  LHC_STATUS_NULL_POINTER = 1,
  LHC_STATUS_INVALID_INPUT = 2,
  LHC_STATUS_TOO_LARGE = 3,
  LHC_STATUS_BUDGET_EXHAUSTED = 4,
  LHC_STATUS_BUFFER_TOO_SMALL = 5,
  LHC_STATUS_PANIC = 6,
} LhcStatus;

/**
 * Opaque 3-uniform hypergraph.
 */
typedef struct LhcGraph LhcGraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Static description of a status code. Never null.
 */
const char *lhc_status_message(enum LhcStatus status);

/**
 * Builds a graph on `n` vertices from `edge_count` triples stored flat in `edges`.
 *
 * # Safety
 * `edges` must point to `3 * edge_count` readable values (may be null when `edge_count == 0`);
 * `out` must be writable.
 */
enum LhcStatus lhc_graph_new(size_t n,
                             const size_t *edges,
                             size_t edge_count,
                             struct LhcGraph **out);

/**
 * Parses the text or JSON hypergraph format.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum LhcStatus lhc_graph_from_text(const char *text, struct LhcGraph **out);

/**
 * # Safety
 * `g` must come from this library and not be freed twice. Null is ignored.
 */
void lhc_graph_free(struct LhcGraph *g);

/**
 * # Safety
 * `g` must be a live handle or null (returns 0).
 */
size_t lhc_graph_vertex_count(const struct LhcGraph *g);

/**
 * # Safety
 * `g` must be a live handle or null (returns 0).
 */
size_t lhc_graph_edge_count(const struct LhcGraph *g);

/**
 * Minimum `d`-degree for `d` in {1, 2}.
 *
 * # Safety
 * `g` must be a live handle; `out` must be writable.
 */
enum LhcStatus lhc_min_degree(const struct LhcGraph *g, size_t d, size_t *out);

/**
 * Exhaustive loose Hamilton cycle search with a node budget (0 means the default).
 *
 * On `Yes`, the cyclic vertex order is written to `witness` when `witness_cap` allows it;
 * `witness_len` always receives the order length (0 otherwise). A short buffer yields
 * `BufferTooSmall` with `decision` still set. A spent budget gives `BudgetExhausted`
 * with decision `Unknown`.
 *
 * # Safety
 * `g` must be a live handle; `decision` writable; `witness` must hold `witness_cap`
 * values or be null with `witness_cap == 0`; `witness_len` writable or null.
 */
enum LhcStatus lhc_has_loose_hc(const struct LhcGraph *g,
                                uint64_t budget,
                                enum LhcDecision *decision,
                                size_t *witness,
                                size_t witness_cap,
                                size_t *witness_len);

/**
 * Number of loose Hamilton cycles (up to rotation and reflection), small graphs only.
 *
 * # Safety
 * `g` must be a live handle; `out` writable.
 */
enum LhcStatus lhc_count_loose_hc(const struct LhcGraph *g, uint64_t *out);

/**
 * Exact 3-density of `g` as a reduced fraction.
 *
 * # Safety
 * `g` must be a live handle; `num` and `den` writable.
 */
enum LhcStatus lhc_m3(const struct LhcGraph *g, int64_t *num, int64_t *den);

/**
 * Exact 3-density of a built-in gadget.
 *
 * # Safety
 * `num` and `den` must be writable.
 */
enum LhcStatus lhc_m3_gadget(enum LhcGadget kind, int64_t *num, int64_t *den);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LOOSE_HC_H */
