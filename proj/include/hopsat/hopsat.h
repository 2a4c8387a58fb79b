/* hopsat -- 3-SAT Hopfield-solver library: CNF handling, cubic/quadratized
 * energy models, seeded stochastic solvers, landscape analysis, and
 * benchmarking. All functions are thread-safe on distinct handles; handles
 * are immutable after creation. Failing calls return a status code and leave
 * a message in hopsat_last_error() (thread-local). Strings returned through
 * char** parameters are heap-allocated; release them with
 * hopsat_string_free(). */
#ifndef HOPSAT_H
#define HOPSAT_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  HOPSAT_OK = 0,
  HOPSAT_ERR_PARSE = 1,   /* malformed DIMACS or JSON input */
  HOPSAT_ERR_INVALID = 2, /* bad arguments or configuration */
  HOPSAT_ERR_RUNTIME = 3  /* anything else */
} hopsat_status;

typedef struct hopsat_formula hopsat_formula;
typedef struct hopsat_pubo hopsat_pubo;
typedef struct hopsat_qubo hopsat_qubo;

const char* hopsat_version(void);
const char* hopsat_last_error(void);
void hopsat_string_free(char* s);

/* Folds one word into a seed; used to derive independent per-index seeds. */
uint64_t hopsat_mix_seed(uint64_t seed, uint64_t word);

/* ---- formulas ---- */

hopsat_status hopsat_formula_parse(const char* dimacs_text, hopsat_formula** out);
/* Uniform random 3-SAT with round(ratio * n_vars) clauses (3 distinct
 * variables per clause, independent polarities). distinct_clauses != 0
 * additionally rejects duplicate clauses. */
hopsat_status hopsat_formula_generate(uint32_t n_vars, double ratio, uint64_t seed,
                                      int distinct_clauses, hopsat_formula** out);
void hopsat_formula_free(hopsat_formula* f);
uint32_t hopsat_formula_n_vars(const hopsat_formula* f);
uint32_t hopsat_formula_n_clauses(const hopsat_formula* f);
hopsat_status hopsat_formula_dimacs(const hopsat_formula* f, char** out_text);
/* bits: array of 0/1 values, one per variable. */
hopsat_status hopsat_formula_count_unsat(const hopsat_formula* f, const uint8_t* bits,
                                         size_t n_bits, uint32_t* out);

/* ---- energy models ---- */

/* Cubic model whose energy equals the number of unsatisfied clauses. */
hopsat_status hopsat_pubo_compile(const hopsat_formula* f, hopsat_pubo** out);
void hopsat_pubo_free(hopsat_pubo* m);
uint32_t hopsat_pubo_n_vars(const hopsat_pubo* m);
hopsat_status hopsat_pubo_energy(const hopsat_pubo* m, const uint8_t* bits, size_t n_bits,
                                 double* out);
hopsat_status hopsat_pubo_to_json(const hopsat_pubo* m, char** out_text);

/* Quadratized model: one auxiliary variable per clause, enforced by a
 * penalty of weight `penalty` (> 0). State layout: originals first, then
 * auxiliaries in clause order. */
hopsat_status hopsat_qubo_compile(const hopsat_formula* f, double penalty, hopsat_qubo** out);
void hopsat_qubo_free(hopsat_qubo* m);
uint32_t hopsat_qubo_n_vars(const hopsat_qubo* m); /* originals + auxiliaries */
uint32_t hopsat_qubo_n_aux(const hopsat_qubo* m);
hopsat_status hopsat_qubo_energy(const hopsat_qubo* m, const uint8_t* bits, size_t n_bits,
                                 double* out);
/* Exact minimum over auxiliaries for fixed originals (ties prefer 0).
 * out_aux may be NULL; otherwise it receives n_aux values. */
hopsat_status hopsat_qubo_min_over_aux(const hopsat_qubo* m, const uint8_t* bits, size_t n_bits,
                                       double* out_energy, uint8_t* out_aux);
hopsat_status hopsat_qubo_to_json(const hopsat_qubo* m, char** out_text);

/* ---- solving and analysis ----
 * Configuration goes in as JSON (schemas documented in the README); results
 * come back as JSON/CSV text. Identical configs produce byte-identical
 * results. */

hopsat_status hopsat_solve(const hopsat_formula* f, const char* config_json, char** result_json,
                           char** trace_csv /* may be NULL; empty unless record_trace */);

hopsat_status hopsat_bench(const hopsat_formula* const* formulas, const char* const* names,
                           size_t n, const char* config_json, char** report_json,
                           char** medians_csv);

hopsat_status hopsat_landscape(const hopsat_formula* const* formulas, const char* const* names,
                               size_t n, const char* config_json, char** stats_csv,
                               char** stats_json);

hopsat_status hopsat_delta_histogram(const hopsat_formula* f, const char* config_json,
                                     char** hist_csv, char** hist_json);

/* ---- cost-model arithmetic ---- */

/* Writes +infinity to *out when p_hat is 0. */
hopsat_status hopsat_tts_steps(double p_hat, uint64_t max_steps, double target, double* out);
hopsat_status hopsat_tiles_required(uint32_t n_vars, uint32_t n_col, uint32_t* out);
hopsat_status hopsat_pubo_wordlines(uint32_t n_vars, uint64_t* out);
hopsat_status hopsat_search_space_bits(uint32_t n_vars, uint32_t n_clauses, int quadratized,
                                       uint32_t* out);

#ifdef __cplusplus
}
#endif

#endif /* HOPSAT_H */
