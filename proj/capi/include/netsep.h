/* netsep — separability and sum-capacity analysis for parallel Gaussian
 * single-hop networks.
 *
 * C89-compatible shared-library surface. All objects are opaque handles
 * created and destroyed here; every fallible call returns a netsep_status and
 * leaves a human-readable message in netsep_last_error() (thread-local).
 * Indices (sources, destinations, carriers) are 1-based, matching the file
 * format.
 */

#ifndef NETSEP_H
#define NETSEP_H

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define NETSEP_API __declspec(dllexport)
#else
#define NETSEP_API __attribute__((visibility("default")))
#endif

typedef enum netsep_status {
  NETSEP_OK = 0,
  NETSEP_ERROR_IO = 1,             /* unreadable or malformed input */
  NETSEP_ERROR_VALIDATION = 2,     /* invariant violations in the input */
  NETSEP_ERROR_INSEPARABLE = 3,    /* capacity asked of a non-MAC-Z-BC network */
  NETSEP_ERROR_NONCONVERGENCE = 4, /* optimizer stopped above tolerance */
  NETSEP_ERROR_ARGUMENT = 5        /* bad handle, index, or option */
} netsep_status;

typedef enum netsep_witness_kind {
  NETSEP_WITNESS_Z_INTERFERENCE = 0,
  NETSEP_WITNESS_X_NETWORK = 1,
  NETSEP_WITNESS_SIGMA = 2,
  NETSEP_WITNESS_REVERSE_SIGMA = 3
} netsep_witness_kind;

typedef enum netsep_log_base {
  NETSEP_LOG_BASE_2 = 0, /* rates in bits */
  NETSEP_LOG_BASE_E = 1  /* rates in nats */
} netsep_log_base;

typedef struct netsep_network netsep_network;
typedef struct netsep_verdict netsep_verdict;
typedef struct netsep_capacity netsep_capacity;
typedef struct netsep_gap netsep_gap;

NETSEP_API const char* netsep_version(void);

/* Message describing the most recent failure on this thread. Never NULL. */
NETSEP_API const char* netsep_last_error(void);

NETSEP_API void netsep_string_free(char* text);

/* ---- networks ---------------------------------------------------------- */

/* Parses the JSON network/instance schema (see the file-format docs). */
NETSEP_API netsep_status netsep_network_parse_json(const char* json_text,
                                                   netsep_network** out);

/* Serializes back to the schema; free the result with netsep_string_free. */
NETSEP_API netsep_status netsep_network_to_json(const netsep_network* network,
                                                char** out_json);

/* Reference gap instance of an inseparable pattern (X, sigma, reverse-sigma). */
NETSEP_API netsep_status netsep_canonical_network(netsep_witness_kind kind,
                                                  netsep_network** out);

NETSEP_API void netsep_network_free(netsep_network* network);

NETSEP_API int netsep_network_num_sources(const netsep_network* network);
NETSEP_API int netsep_network_num_destinations(const netsep_network* network);
NETSEP_API int netsep_network_num_edges(const netsep_network* network);
NETSEP_API int netsep_network_num_messages(const netsep_network* network);
NETSEP_API int netsep_network_has_channel(const netsep_network* network);
/* 0 when the network carries no channel section. */
NETSEP_API int netsep_network_num_carriers(const netsep_network* network);

/* ---- classification ---------------------------------------------------- */

NETSEP_API netsep_status netsep_classify(const netsep_network* network,
                                         netsep_verdict** out);
NETSEP_API void netsep_verdict_free(netsep_verdict* verdict);

NETSEP_API int netsep_verdict_is_separable(const netsep_verdict* verdict);
/* 0 when no transmitter (receiver) has degree above one. */
NETSEP_API int netsep_verdict_hub_source(const netsep_verdict* verdict);
NETSEP_API int netsep_verdict_hub_destination(const netsep_verdict* verdict);
/* Canonical index assigned to an original node; 0 on error. */
NETSEP_API int netsep_verdict_source_relabel(const netsep_verdict* verdict, int source);
NETSEP_API int netsep_verdict_destination_relabel(const netsep_verdict* verdict,
                                                  int destination);

NETSEP_API netsep_status netsep_verdict_witness_kind(const netsep_verdict* verdict,
                                                     netsep_witness_kind* out);
NETSEP_API int netsep_verdict_witness_num_edges(const netsep_verdict* verdict);
/* index is 0-based over the canonical edge order. */
NETSEP_API netsep_status netsep_verdict_witness_edge(const netsep_verdict* verdict, int index,
                                                     int* rx, int* tx);
NETSEP_API int netsep_verdict_witness_num_sources(const netsep_verdict* verdict);
NETSEP_API int netsep_verdict_witness_num_destinations(const netsep_verdict* verdict);
/* Host node playing canonical witness role k (1-based); 0 on error. */
NETSEP_API int netsep_verdict_witness_source_map(const netsep_verdict* verdict,
                                                 int canonical_source);
NETSEP_API int netsep_verdict_witness_destination_map(const netsep_verdict* verdict,
                                                      int canonical_destination);

/* ---- sum capacity ------------------------------------------------------ */

typedef struct netsep_solver_options {
  netsep_log_base log_base;
  double tolerance;    /* projected-gradient norm target, default 1e-9 */
  long max_iterations; /* default 100000 */
} netsep_solver_options;

NETSEP_API void netsep_solver_options_init(netsep_solver_options* options);

/* Classifies, relabels to canonical MAC-Z-BC form when separable, maximizes
 * the power allocation across carriers, and maps results back to the original
 * labels. Returns NETSEP_ERROR_INSEPARABLE (no report) on inseparable
 * networks. On NETSEP_ERROR_NONCONVERGENCE the report IS produced and holds
 * the best iterate together with its residual; free it as usual. */
NETSEP_API netsep_status netsep_capacity_optimize(const netsep_network* network,
                                                  const netsep_solver_options* options,
                                                  netsep_capacity** out);
NETSEP_API void netsep_capacity_free(netsep_capacity* capacity);

NETSEP_API double netsep_capacity_total(const netsep_capacity* capacity);
NETSEP_API double netsep_capacity_kkt_residual(const netsep_capacity* capacity);
NETSEP_API int netsep_capacity_converged(const netsep_capacity* capacity);
NETSEP_API long netsep_capacity_iterations(const netsep_capacity* capacity);
NETSEP_API double netsep_capacity_per_carrier(const netsep_capacity* capacity, int carrier);
/* Power given to `source` on `carrier`, in the input's own labeling. */
NETSEP_API double netsep_capacity_allocation(const netsep_capacity* capacity, int source,
                                             int carrier);
NETSEP_API int netsep_capacity_num_messages(const netsep_capacity* capacity);
NETSEP_API netsep_status netsep_capacity_message_rate(const netsep_capacity* capacity,
                                                      int index, int* rx, int* tx,
                                                      double* rate);
/* Canonical label the pipeline assigned to an original node; 0 on error. */
NETSEP_API int netsep_capacity_canonical_source(const netsep_capacity* capacity, int source);
NETSEP_API int netsep_capacity_canonical_destination(const netsep_capacity* capacity,
                                                     int destination);

/* ---- joint-vs-separate coding gaps ------------------------------------- */

/* Evaluates the canonical beamforming scheme of `kind` over a strictly
 * increasing power grid (at least 4 points spanning 1e4 or more) and compares
 * against the separate-coding DoF line. `instance_or_null` may override the
 * canonical gains; it must match the canonical topology and carrier count. */
NETSEP_API netsep_status netsep_gap_run(netsep_witness_kind kind,
                                        const netsep_network* instance_or_null,
                                        const double* power_grid, int grid_len,
                                        netsep_log_base base, netsep_gap** out);
NETSEP_API void netsep_gap_free(netsep_gap* gap);

NETSEP_API int netsep_gap_num_points(const netsep_gap* gap);
NETSEP_API netsep_status netsep_gap_point(const netsep_gap* gap, int index, double* power,
                                          double* joint_rate, double* separate_bound);
NETSEP_API double netsep_gap_separate_dof(const netsep_gap* gap);
NETSEP_API double netsep_gap_slope(const netsep_gap* gap);
NETSEP_API double netsep_gap_intercept(const netsep_gap* gap);
NETSEP_API double netsep_gap_fit_residual(const netsep_gap* gap);
NETSEP_API int netsep_gap_has_crossover(const netsep_gap* gap);
NETSEP_API double netsep_gap_crossover_power(const netsep_gap* gap);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* NETSEP_H */
