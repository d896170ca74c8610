/* Exercises the C interface from C. argv[1] is a scratch directory. */

#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "qdt/qdt.h"

static int failures = 0;

#define CHECK(cond)                                                  \
  do {                                                               \
    if (!(cond)) {                                                   \
      fprintf(stderr, "%s:%d: CHECK failed: %s (last error: %s)\n", \
              __FILE__, __LINE__, #cond, qdt_last_error());          \
      ++failures;                                                    \
    }                                                                \
  } while (0)

static void count_lines(const char* text, void* user) {
  for (; *text; ++text) *(int*)user += *text == '\n';
}

int main(int argc, char** argv) {
  const char* dir = argc > 1 ? argv[1] : ".";
  char path[1024];

  /* probe sets and design */
  qdt_probe_set* sic = NULL;
  CHECK(qdt_probe_set_builtin("sic", 4, 0, 0, &sic) == QDT_OK);
  size_t m = 0;
  int d = 0;
  CHECK(qdt_probe_set_size(sic, &m, &d) == QDT_OK && m == 16 && d == 4);
  qdt_design rep;
  double eig[16];
  CHECK(qdt_design_report(sic, &rep, eig, 16) == QDT_OK);
  CHECK(fabs(rep.umse_criterion - 304.0) < 1e-9 && fabs(rep.cond - sqrt(5.0)) < 1e-9 && rep.complete);
  CHECK(fabs(eig[0] - 4.0) < 1e-9 && fabs(eig[15] - 0.8) < 1e-9);

  double umse = 0, cond = 0;
  CHECK(qdt_theorem1_optimum(4, 2, 304.0, &umse, &cond) == QDT_OK && fabs(umse - 0.25) < 1e-15);
  CHECK(qdt_theorem2_optimum(2, 2, 100.0, &umse, &cond) == QDT_OK && fabs(umse - 1.0) < 1e-15 && fabs(cond - 3.0) < 1e-15);
  double cb = -1, kb = -1;
  CHECK(qdt_perturbation_bounds(sic, 0.0, &cb, &kb) == QDT_OK && cb == 0.0 && kb == 0.0);
  CHECK(qdt_perturbation_bounds(sic, 1.0, &cb, &kb) == QDT_ERR_PRECONDITION);

  /* error codes */
  qdt_probe_set* bad = NULL;
  CHECK(qdt_probe_set_builtin("nope", 4, 0, 0, &bad) == QDT_ERR_INVALID_ARGUMENT && bad == NULL);
  CHECK(strlen(qdt_last_error()) > 0);
  CHECK(qdt_probe_set_builtin("sic", 3, 0, 0, &bad) == QDT_ERR_INVALID_DIMENSION);
  CHECK(qdt_probe_set_builtin(NULL, 4, 0, 0, &bad) == QDT_ERR_INVALID_ARGUMENT);
  {
    double re[4] = {1, 1, 0, 1}, im[4] = {0, 0, 0, 0};
    CHECK(qdt_probe_set_from_matrices(2, 1, re, im, &bad) == QDT_ERR_NOT_HERMITIAN);
    double re2[4] = {1, 0, 0, 1};
    CHECK(qdt_probe_set_from_matrices(2, 1, re2, im, &bad) == QDT_ERR_NOT_PHYSICAL);
  }
  qdt_probe_set* few = NULL;
  CHECK(qdt_probe_set_builtin("random", 4, 6, 3, &few) == QDT_OK);
  CHECK(qdt_design_report(few, &rep, NULL, 0) == QDT_OK && !rep.complete && isinf(rep.umse_criterion));

  /* detector, sampling, reconstruction */
  qdt_detector_spec spec = {"binary_mu", 4, 1.0, 11, 12, 0};
  qdt_povm* truth = NULL;
  CHECK(qdt_povm_detector(&spec, &truth) == QDT_OK);
  int distorted = -1, rank = -1;
  CHECK(qdt_detect_distortion(truth, &distorted, &rank) == QDT_OK && distorted == 0 && rank == 2);

  qdt_freq* exact = NULL;
  CHECK(qdt_exact_frequencies(truth, sic, &exact) == QDT_OK);
  qdt_povm* est = NULL;
  CHECK(qdt_reconstruct(exact, sic, 2, &est) == QDT_OK);
  double err = 1;
  CHECK(qdt_povm_mse(est, truth, &err) == QDT_OK && err < 1e-14);
  qdt_povm_free(est);

  qdt_freq* f = NULL;
  CHECK(qdt_sample_frequencies(truth, sic, 100000, 5, &f) == QDT_OK);
  double p0 = 0, p1 = 0;
  CHECK(qdt_freq_get(f, 0, 3, &p0) == QDT_OK && qdt_freq_get(f, 1, 3, &p1) == QDT_OK && fabs(p0 + p1 - 1) < 1e-15);
  CHECK(qdt_freq_get(f, 2, 0, &p0) == QDT_ERR_INVALID_ARGUMENT);
  CHECK(qdt_reconstruct(f, sic, 3, &est) == QDT_ERR_INVALID_DIMENSION);
  CHECK(qdt_reconstruct(f, sic, 2, &est) == QDT_OK);
  double fid = 0;
  CHECK(qdt_element_fidelity(est, truth, 1, &fid) == QDT_OK && fid > 0.99 && fid <= 1.0);
  snprintf(path, sizeof path, "%s/c_api_freq.csv", dir);
  CHECK(qdt_freq_write_csv(f, path) == QDT_OK);

  /* round trips */
  snprintf(path, sizeof path, "%s/c_api_povm.txt", dir);
  CHECK(qdt_povm_save(est, path, "estimate") == QDT_OK);
  qdt_povm* back = NULL;
  CHECK(qdt_povm_load(path, &back) == QDT_OK);
  CHECK(qdt_povm_mse(back, est, &err) == QDT_OK && err < 1e-28);
  snprintf(path, sizeof path, "%s/c_api_sic.txt", dir);
  CHECK(qdt_probe_set_save(sic, path, "sic") == QDT_OK);
  qdt_probe_set* sic2 = NULL;
  CHECK(qdt_probe_set_load(path, &sic2) == QDT_OK);
  CHECK(qdt_design_report(sic2, &rep, NULL, 0) == QDT_OK && fabs(rep.umse_criterion - 304.0) < 1e-9);
  CHECK(qdt_povm_load("/nonexistent/file", &back) == QDT_ERR_IO);

  /* coherent */
  double a2 = 0, inf = 0;
  CHECK(qdt_fock_coherent(1, &a2, &inf) == QDT_OK && a2 == 1.0 && fabs(inf - 0.6321) < 1e-3);
  {
    double re[4] = {0, 0, 1, 0}, im[4] = {0, 0, 0, 0}, c[6], alpha[6], cost = -1, disc = -1;
    CHECK(qdt_optimize_superposition(4, re, im, 3, 4, 1, c, alpha, &cost, &disc) == QDT_OK);
    CHECK(cost >= 0 && cost < 0.5 && disc >= 0);
  }

  /* table and scenario */
  qdt_table1_options topt;
  qdt_table1_default_options(&topt);
  topt.include_coherent = 0;
  topt.random_sets = 10;
  qdt_table1_row rows[16];
  size_t nrows = 0;
  CHECK(qdt_table1(&topt, NULL, rows, 16, &nrows) == QDT_OK && nrows == 5);
  CHECK(fabs(rows[2].criterion - 400.0) < 1e-9 && rows[2].m == 36);

  snprintf(path, sizeof path, "%s/c_api.conf", dir);
  FILE* cf = fopen(path, "w");
  CHECK(cf != NULL);
  if (cf) {
    fputs("[scenario]\nid = capi\nkind = scaling\nseed = 3\nreps = 3\nn_grid = 1000, 10000, 100000\n"
          "[detector]\nkind = binary_mu\nmu = 0.5\n[protocol.sic]\nfamily = sic\n"
          "[check]\nsic.P1 = 5, 6\n",
          cf);
    fclose(cf);
  }
  qdt_run_options ropt;
  qdt_run_default_options(&ropt);
  ropt.out_dir = dir;
  ropt.expect_kind = "scaling";
  int lines = 0, passed = -1;
  CHECK(qdt_run_scenario(path, &ropt, count_lines, &lines, &passed) == QDT_OK);
  CHECK(passed == 0 && lines > 0);
  ropt.expect_kind = "coherent";
  CHECK(qdt_run_scenario(path, &ropt, NULL, NULL, &passed) == QDT_ERR_CONFIG);
  CHECK(qdt_run_scenario("/nonexistent.conf", &ropt, NULL, NULL, &passed) == QDT_ERR_CONFIG);

  char csv[1024];
  snprintf(csv, sizeof csv, "%s/capi_sic.csv", dir);
  qdt_slope slopes[4];
  size_t ns = 0;
  CHECK(qdt_slope_from_csv(csv, 0, INFINITY, slopes, 4, &ns) == QDT_OK && ns == 2);
  CHECK(slopes[0].valid && slopes[0].points == 3 && slopes[0].slope < -0.3 && slopes[1].slope < -0.8);
  CHECK(qdt_slope_from_csv(csv, 1e4, 1e5, slopes, 4, &ns) == QDT_OK && !slopes[0].valid);
  lines = 0;
  CHECK(qdt_plotdata_from_csv(csv, "-", count_lines, &lines) == QDT_OK && lines >= 4);

  qdt_freq_free(f);
  qdt_freq_free(exact);
  qdt_povm_free(est);
  qdt_povm_free(back);
  qdt_povm_free(truth);
  qdt_probe_set_free(sic);
  qdt_probe_set_free(sic2);
  qdt_probe_set_free(few);
  qdt_probe_set_free(NULL);

  if (failures) {
    fprintf(stderr, "%d check(s) failed\n", failures);
    return 1;
  }
  printf("c api: all checks passed\n");
  return 0;
}
