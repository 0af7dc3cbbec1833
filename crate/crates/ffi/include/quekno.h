#ifndef QUEKNO_H
#define QUEKNO_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes of every fallible call.
 */
typedef enum QkStatus {
  QK_STATUS_OK = 0,
  QK_STATUS_NULL_POINTER = 1,
  QK_STATUS_INVALID_UTF8 = 2,
  QK_STATUS_INVALID_ARGUMENT = 3,
  QK_STATUS_PARSE_ERROR = 4,
  QK_STATUS_GENERATION_FAILED = 5,
  QK_STATUS_VALIDATION_FAILED = 6,
  QK_STATUS_PANIC = 7,
} QkStatus;

/**
 * A device coupling graph.
 */
typedef struct QkArchitecture QkArchitecture;

/**
 * A generated circuit with its planted solution.
 */
typedef struct QkBenchmark QkBenchmark;

/**
 * A gate list over `num_qubits` qubits.
 */
typedef struct QkCircuit QkCircuit;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next `qk_*` call on the same thread.
 */
const char *qk_last_error(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void qk_string_free(char *s);

/**
 * Looks up a builtin device (`grid2x3`, `tokyo`, `rochester`,
 * `sycamore53`, `sycamore54`).
 *
 * # Safety
 * `name` must be a nul-terminated string; `out` must be writable.
 */
enum QkStatus qk_architecture_builtin(const char *name, struct QkArchitecture **out);

/**
 * Parses a device from the `n <count>` / `e <p> <q>` text format.
 *
 * # Safety
 * `name` and `text` must be nul-terminated strings; `out` must be writable.
 */
enum QkStatus qk_architecture_from_text(const char *name,
                                        const char *text,
                                        struct QkArchitecture **out);

/**
 * Number of physical qubits; 0 for null.
 *
 * # Safety
 * `ag` must be null or a live handle.
 */
size_t qk_architecture_vertex_count(const struct QkArchitecture *ag);

/**
 * Number of couplers; 0 for null.
 *
 * # Safety
 * `ag` must be null or a live handle.
 */
size_t qk_architecture_edge_count(const struct QkArchitecture *ag);

/**
 * # Safety
 * `ag` must be null or a handle not yet freed.
 */
void qk_architecture_free(struct QkArchitecture *ag);

/**
 * Parses an OpenQASM 2.0 circuit.
 *
 * # Safety
 * `qasm` must be a nul-terminated string; `out` must be writable.
 */
enum QkStatus qk_circuit_from_qasm(const char *qasm, struct QkCircuit **out);

/**
 * Emits a circuit as OpenQASM 2.0.
 *
 * # Safety
 * `c` must be a live handle; `out` must be writable.
 */
enum QkStatus qk_circuit_to_qasm(const struct QkCircuit *c, char **out);

/**
 * Gate counts and depth of a circuit. Any output pointer may be null.
 *
 * # Safety
 * `c` must be a live handle; non-null outputs must be writable.
 */
enum QkStatus qk_circuit_summary(const struct QkCircuit *c,
                                 size_t *num_qubits,
                                 size_t *one_qubit,
                                 size_t *two_qubit,
                                 size_t *depth);

/**
 * # Safety
 * `c` must be null or a handle not yet freed.
 */
void qk_circuit_free(struct QkCircuit *c);

/**
 * Generates a benchmark from a JSON spec, e.g.
 * `{"ag_name":"tokyo","objective":"gate","target_cost":5,"perm_type":"opt1",
 * "graph_size":"tokyo","qbg_ratio":1.5,"seed":7}`.
 *
 * # Safety
 * `spec_json` must be a nul-terminated string; `out` must be writable.
 */
enum QkStatus qk_benchmark_generate(const char *spec_json, struct QkBenchmark **out);

/**
 * Copies the benchmark circuit into a new circuit handle.
 *
 * # Safety
 * `b` must be a live handle; `out` must be writable.
 */
enum QkStatus qk_benchmark_circuit(const struct QkBenchmark *b, struct QkCircuit **out);

/**
 * The benchmark circuit as OpenQASM 2.0.
 *
 * # Safety
 * `b` must be a live handle; `out` must be writable.
 */
enum QkStatus qk_benchmark_qasm(const struct QkBenchmark *b, char **out);

/**
 * The sidecar metadata as JSON.
 *
 * # Safety
 * `b` must be a live handle; `out` must be writable.
 */
enum QkStatus qk_benchmark_metadata_json(const struct QkBenchmark *b, char **out);

/**
 * Known cost and ratio of the planted solution. Outputs may be null.
 *
 * # Safety
 * `b` must be a live handle; non-null outputs must be writable.
 */
enum QkStatus qk_benchmark_known(const struct QkBenchmark *b,
                                 size_t *known_cost,
                                 double *known_rho);

/**
 * # Safety
 * `b` must be null or a handle not yet freed.
 */
void qk_benchmark_free(struct QkBenchmark *b);

/**
 * Validates a transcript (JSON) for `c` on `ag` and writes the report as
 * JSON. Returns `ValidationFailed` for an invalid transcript; the report is
 * still written.
 *
 * # Safety
 * Handles must be live; `transcript_json` nul-terminated; `report_out`
 * writable.
 */
enum QkStatus qk_validate_transcript_json(const struct QkCircuit *c,
                                          const struct QkArchitecture *ag,
                                          const char *transcript_json,
                                          char **report_out);

/**
 * Replays sidecar metadata (JSON) against `c` on `ag`; writes the report.
 *
 * # Safety
 * As for [`qk_validate_transcript_json`].
 */
enum QkStatus qk_replay_metadata_json(const struct QkCircuit *c,
                                      const struct QkArchitecture *ag,
                                      const char *metadata_json,
                                      char **report_out);

/**
 * Routes `c` on `ag` with the greedy baseline router (gate objective) and
 * writes the transcript as JSON.
 *
 * # Safety
 * Handles must be live; `transcript_out` writable.
 */
enum QkStatus qk_greedy_route(const struct QkCircuit *c,
                              const struct QkArchitecture *ag,
                              uint64_t seed,
                              size_t restarts,
                              char **transcript_out);

/**
 * Exact minimum swap count on devices with at most 8 qubits. Writes -1 to
 * `out` when no solution within `limit` swaps exists.
 *
 * # Safety
 * Handles must be live; `out` writable.
 */
enum QkStatus qk_optimal_swap_count(const struct QkCircuit *c,
                                    const struct QkArchitecture *ag,
                                    size_t limit,
                                    int64_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QUEKNO_H */
