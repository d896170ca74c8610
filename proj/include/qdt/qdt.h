#ifndef QDT_QDT_H
#define QDT_QDT_H

/* C interface to the detector tomography library.
 *
 * Every function returns a qdt_status. On failure a message is available from
 * qdt_last_error() on the calling thread until the next failing call there.
 * Matrices cross the boundary as separate row-major real and imaginary arrays
 * of d*d doubles. Handles are released with the matching *_free function;
 * passing NULL to a free function is allowed. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define QDT_API __declspec(dllexport)
#else
#define QDT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qdt_status {
  QDT_OK = 0,
  QDT_ERR_INVALID_ARGUMENT = 1,
  QDT_ERR_INVALID_DIMENSION = 2,
  QDT_ERR_NOT_HERMITIAN = 3,
  QDT_ERR_NOT_PSD = 4,
  QDT_ERR_NOT_PHYSICAL = 5,
  QDT_ERR_SINGULAR_DESIGN = 6,
  QDT_ERR_PRECONDITION = 7,
  QDT_ERR_CONFIG = 8,
  QDT_ERR_IO = 9,
  QDT_ERR_INTERNAL = 99
} qdt_status;

typedef struct qdt_probe_set qdt_probe_set;
typedef struct qdt_povm qdt_povm;
typedef struct qdt_freq qdt_freq;

QDT_API const char* qdt_version(void);
QDT_API const char* qdt_last_error(void);

/* ---- probe sets ---- */

/* name: "sic" (d 2 or 4), "mub" (d 2 or 4), "cube" (d 4), "gpb" (any d),
 * "platonic" (d 2, m in 4 6 8 12 20), "random" (m Haar pure states from seed). */
QDT_API qdt_status qdt_probe_set_builtin(const char* name, int d, int m, uint64_t seed, qdt_probe_set** out);
QDT_API qdt_status qdt_probe_set_from_matrices(int d, size_t m, const double* re, const double* im, qdt_probe_set** out);
QDT_API qdt_status qdt_probe_set_load(const char* path, qdt_probe_set** out);
QDT_API qdt_status qdt_probe_set_save(const qdt_probe_set* set, const char* path, const char* label);
QDT_API void qdt_probe_set_free(qdt_probe_set* set);
QDT_API qdt_status qdt_probe_set_size(const qdt_probe_set* set, size_t* m, int* d);
QDT_API qdt_status qdt_probe_set_state(const qdt_probe_set* set, size_t j, double* re, double* im);

typedef struct qdt_design {
  double umse_criterion; /* M Tr[(X^T X)^-1]; +inf when incomplete */
  double cond;           /* condition number of X; +inf when incomplete */
  int complete;
  int rank;
  size_t eigenvalue_count; /* d^2 */
} qdt_design;

/* eigenvalues may be NULL; otherwise it receives min(cap, d^2) values of
 * X^T X in descending order. */
QDT_API qdt_status qdt_design_report(const qdt_probe_set* set, qdt_design* out, double* eigenvalues, size_t cap);
QDT_API qdt_status qdt_theorem1_optimum(int d, int n, double shots, double* min_umse, double* min_cond);
QDT_API qdt_status qdt_theorem2_optimum(int qubits, int n, double shots, double* min_umse, double* min_cond);
QDT_API qdt_status qdt_perturbation_bounds(const qdt_probe_set* set, double eps, double* criterion_bound,
                                           double* cond_bound);

/* ---- detectors ---- */

typedef struct qdt_detector_spec {
  const char* kind; /* binary_mu, binary_perturbed, three_valued, three_perturbed */
  int dim;
  double mu;
  uint64_t u1_seed;
  uint64_t u2_seed;
  int identity_unitaries;
} qdt_detector_spec;

QDT_API qdt_status qdt_povm_detector(const qdt_detector_spec* spec, qdt_povm** out);
QDT_API qdt_status qdt_povm_from_matrices(int d, size_t n, const double* re, const double* im, qdt_povm** out);
QDT_API qdt_status qdt_povm_load(const char* path, qdt_povm** out);
QDT_API qdt_status qdt_povm_save(const qdt_povm* povm, const char* path, const char* label);
QDT_API void qdt_povm_free(qdt_povm* povm);
QDT_API qdt_status qdt_povm_size(const qdt_povm* povm, size_t* n, int* d);
QDT_API qdt_status qdt_povm_element(const qdt_povm* povm, size_t i, double* re, double* im);

/* ---- measurement and reconstruction ---- */

QDT_API qdt_status qdt_sample_frequencies(const qdt_povm* truth, const qdt_probe_set* set, uint64_t shots, uint64_t seed,
                                          qdt_freq** out);
QDT_API qdt_status qdt_exact_frequencies(const qdt_povm* truth, const qdt_probe_set* set, qdt_freq** out);
QDT_API void qdt_freq_free(qdt_freq* f);
/* Frequency of outcome i on probe j. */
QDT_API qdt_status qdt_freq_get(const qdt_freq* f, size_t i, size_t j, double* value);
QDT_API qdt_status qdt_freq_write_csv(const qdt_freq* f, const char* path);

/* Two-stage estimate with n outcomes. */
QDT_API qdt_status qdt_reconstruct(const qdt_freq* f, const qdt_probe_set* set, int n, qdt_povm** out);
QDT_API qdt_status qdt_povm_mse(const qdt_povm* est, const qdt_povm* truth, double* value);
/* Fidelity F of element i (trace-corrected). */
QDT_API qdt_status qdt_element_fidelity(const qdt_povm* est, const qdt_povm* truth, size_t i, double* value);
QDT_API qdt_status qdt_detect_distortion(const qdt_povm* povm, int* distorted, int* rank);

/* ---- coherent-state probes ---- */

QDT_API qdt_status qdt_fock_coherent(int n, double* alpha_sq, double* infidelity);

/* Optimizes an s-term coherent superposition for the ket (re, im) of length d.
 * c and alpha receive s complex values each as interleaved (re, im) pairs. */
QDT_API qdt_status qdt_optimize_superposition(int d, const double* re, const double* im, int s, int starts, uint64_t seed,
                                              double* c, double* alpha, double* cost, double* discarded_weight);

/* ---- experiments ---- */

typedef void (*qdt_log_fn)(const char* text, void* user);

typedef struct qdt_table1_options {
  uint64_t seed;
  int random_sets;
  int coherent_starts;
  int random_coherent_sets;
  int include_coherent;
  int workers;
} qdt_table1_options;

typedef struct qdt_table1_row {
  int protocol;
  char probes[48];
  int m;
  double criterion;
  double cond;
  int flagged;
} qdt_table1_row;

QDT_API void qdt_table1_default_options(qdt_table1_options* opt);
/* rows receives up to cap rows; *count is set to the number produced. csv_path
 * may be NULL. */
QDT_API qdt_status qdt_table1(const qdt_table1_options* opt, const char* csv_path, qdt_table1_row* rows, size_t cap,
                              size_t* count);

typedef struct qdt_run_options {
  int has_seed;
  uint64_t seed;
  int reps; /* 0 keeps the configured value */
  const char* out_dir;
  int workers;
  int fast;
  int write_files;
  const char* expect_kind; /* NULL or a scenario kind the config must declare */
} qdt_run_options;

QDT_API void qdt_run_default_options(qdt_run_options* opt);
/* Runs a scenario file. Progress text goes to log (may be NULL). checks_passed
 * is 1 when every evaluated slope check fell inside its interval. */
QDT_API qdt_status qdt_run_scenario(const char* config_path, const qdt_run_options* opt, qdt_log_fn log, void* user,
                                    int* checks_passed);

typedef struct qdt_slope {
  int element; /* 1-based */
  int valid;   /* 0 when fewer than three positive points fall in the window */
  double slope;
  double stderr_slope;
  int points;
} qdt_slope;

/* Slope of log10 mean infidelity vs log10 N for each element of a record CSV,
 * restricted to lo <= N <= hi. */
QDT_API qdt_status qdt_slope_from_csv(const char* csv_path, double lo, double hi, qdt_slope* out, size_t cap,
                                      size_t* count);
/* Plot-ready columns (N, mean and std per element). out_path "-" writes to log. */
QDT_API qdt_status qdt_plotdata_from_csv(const char* csv_path, const char* out_path, qdt_log_fn log, void* user);

#ifdef __cplusplus
}
#endif

#endif
