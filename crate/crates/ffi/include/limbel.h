#ifndef LIMBEL_H
#define LIMBEL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Cache belief results per setup while deciding.
 */
#define LB_FLAG_MEMO 1

typedef enum LbCircuitMode {
  LB_CIRCUIT_MODE_QMCS = 0,
  LB_CIRCUIT_MODE_WMCS = 1,
  LB_CIRCUIT_MODE_WAMCS = 2,
} LbCircuitMode;

typedef enum LbStatus {
  LB_STATUS_OK = 0,
  LB_STATUS_NULL_ARGUMENT = 1,
  LB_STATUS_INVALID_UTF8 = 2,
  LB_STATUS_PARSE = 3,
  LB_STATUS_SOLVE = 4,
  LB_STATUS_ORACLE = 5,
  LB_STATUS_REDUCE = 6,
  LB_STATUS_PRINT = 7,
  LB_STATUS_BAD_MODE = 8,
  LB_STATUS_PANIC = 9,
} LbStatus;

/**
 * Opaque problem handle.
 */
typedef struct LbInstance LbInstance;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *lb_version(void);

/**
 * Message of the last failing call on this thread, or NULL.
 */
const char *lb_last_error(void);

/**
 * Parses a problem file.
 *
 * # Safety
 * `problem` must be a NUL-terminated string and `out` a valid pointer.
 */
enum LbStatus lb_instance_parse(const char *problem, struct LbInstance **out);

/**
 * Releases an instance; NULL is ignored.
 *
 * # Safety
 * `inst` must come from this library and not be used afterwards.
 */
void lb_instance_free(struct LbInstance *inst);

/**
 * Belief level of the instance.
 *
 * # Safety
 * `inst` must be a live handle and `out` a valid pointer.
 */
enum LbStatus lb_instance_level(const struct LbInstance *inst, uint32_t *out);

/**
 * Overrides the belief level; rejected for queries with belief atoms.
 *
 * # Safety
 * `inst` must be a live handle.
 */
enum LbStatus lb_instance_set_level(struct LbInstance *inst, uint32_t level);

/**
 * Decides the instance; `flags` is a combination of `LB_FLAG_*`.
 *
 * # Safety
 * `inst` must be a live handle and `answer` a valid pointer.
 */
enum LbStatus lb_decide(const struct LbInstance *inst, uint32_t flags, bool *answer);

/**
 * Like `lb_decide`, also returning the rendered split tree.
 *
 * # Safety
 * `inst` must be a live handle; `answer` and `trace` valid pointers.
 */
enum LbStatus lb_decide_trace(const struct LbInstance *inst,
                              uint32_t flags,
                              bool *answer,
                              char **trace);

/**
 * Classical entailment of the query by the knowledge base.
 *
 * # Safety
 * `inst` must be a live handle and `answer` a valid pointer.
 */
enum LbStatus lb_oracle(const struct LbInstance *inst, bool *answer);

/**
 * Canonical problem-file text.
 *
 * # Safety
 * `inst` must be a live handle and `out` a valid pointer.
 */
enum LbStatus lb_instance_print(const struct LbInstance *inst, char **out);

/**
 * Encodes a QDIMACS formula as a problem instance.
 *
 * # Safety
 * `qdimacs` must be a NUL-terminated string and `out` a valid pointer.
 */
enum LbStatus lb_reduce_qbf(const char *qdimacs, struct LbInstance **out);

/**
 * Encodes a circuit netlist; weighted modes take `k` from its single weight.
 *
 * # Safety
 * `netlist` must be a NUL-terminated string and `out` a valid pointer.
 */
enum LbStatus lb_reduce_circuit(const char *netlist,
                                enum LbCircuitMode mode,
                                struct LbInstance **out);

/**
 * Releases a string returned by this library; NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void lb_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LIMBEL_H */
