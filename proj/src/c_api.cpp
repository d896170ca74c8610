#include "qdt/qdt.h"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <new>
#include <sstream>
#include <string>

#include "qdt/experiments.hpp"
#include "qdt/text_io.hpp"

struct qdt_probe_set {
  qdt::ProbeSet set;
};
struct qdt_povm {
  qdt::Povm povm;
};
struct qdt_freq {
  qdt::FrequencyData data;
};

namespace {

thread_local std::string g_last_error;

qdt_status to_status(qdt::ErrorCode c) {
  switch (c) {
    case qdt::ErrorCode::InvalidArgument: return QDT_ERR_INVALID_ARGUMENT;
    case qdt::ErrorCode::InvalidDimension: return QDT_ERR_INVALID_DIMENSION;
    case qdt::ErrorCode::NotHermitian: return QDT_ERR_NOT_HERMITIAN;
    case qdt::ErrorCode::NotPsd: return QDT_ERR_NOT_PSD;
    case qdt::ErrorCode::NotPhysical: return QDT_ERR_NOT_PHYSICAL;
    case qdt::ErrorCode::SingularDesign: return QDT_ERR_SINGULAR_DESIGN;
    case qdt::ErrorCode::PreconditionViolated: return QDT_ERR_PRECONDITION;
    case qdt::ErrorCode::Config: return QDT_ERR_CONFIG;
    case qdt::ErrorCode::Io: return QDT_ERR_IO;
  }
  return QDT_ERR_INTERNAL;
}

qdt_status fail(qdt_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

template <class F>
qdt_status guard(F&& f) {
  try {
    f();
    return QDT_OK;
  } catch (const qdt::Error& e) {
    return fail(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(QDT_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(QDT_ERR_INTERNAL, e.what());
  }
}

void need(const void* p, const char* what) {
  if (!p) throw qdt::Error(qdt::ErrorCode::InvalidArgument, std::string(what) + " is NULL");
}

qdt::CMatrix read_matrix(int d, const double* re, const double* im, std::size_t offset) {
  qdt::CMatrix m(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) {
      const std::size_t k = offset + static_cast<std::size_t>(r * d + c);
      m(r, c) = qdt::Complex(re[k], im ? im[k] : 0.0);
    }
  return m;
}

void write_matrix(const qdt::CMatrix& m, double* re, double* im) {
  const auto d = m.rows();
  for (Eigen::Index r = 0; r < d; ++r)
    for (Eigen::Index c = 0; c < d; ++c) {
      if (re) re[r * d + c] = m(r, c).real();
      if (im) im[r * d + c] = m(r, c).imag();
    }
}

class CallbackBuf : public std::stringbuf {
 public:
  CallbackBuf(qdt_log_fn fn, void* user) : fn_(fn), user_(user) {}
  ~CallbackBuf() override { flush_text(); }

 protected:
  int sync() override {
    flush_text();
    return 0;
  }

 private:
  void flush_text() {
    const std::string s = str();
    if (!s.empty() && fn_) fn_(s.c_str(), user_);
    str("");
  }
  qdt_log_fn fn_;
  void* user_;
};

}  // namespace

extern "C" {

const char* qdt_version(void) { return "0.1.0"; }

const char* qdt_last_error(void) { return g_last_error.c_str(); }

qdt_status qdt_probe_set_builtin(const char* name, int d, int m, uint64_t seed, qdt_probe_set** out) {
  return guard([&] {
    need(name, "name");
    need(out, "out");
    const std::string n(name);
    qdt::ProbeSet set;
    if (n == "sic") {
      if (d == 4) set = qdt::sic_states_d4();
      else if (d == 2) set = qdt::sic_states_d2();
      else throw qdt::Error(qdt::ErrorCode::InvalidDimension, "sic: d must be 2 or 4");
    } else if (n == "mub") {
      set = qdt::mub_states(d);
    } else if (n == "cube") {
      if (d != 4) throw qdt::Error(qdt::ErrorCode::InvalidDimension, "cube: d must be 4");
      set = qdt::cube_states();
    } else if (n == "gpb") {
      set = qdt::gpb_states(d);
    } else if (n == "platonic") {
      if (d != 2) throw qdt::Error(qdt::ErrorCode::InvalidDimension, "platonic: d must be 2");
      set = qdt::platonic_states(m);
    } else if (n == "random") {
      set = qdt::random_pure_set(m, d, seed);
    } else {
      throw qdt::Error(qdt::ErrorCode::InvalidArgument, "unknown probe family '" + n + "'");
    }
    *out = new qdt_probe_set{std::move(set)};
  });
}

qdt_status qdt_probe_set_from_matrices(int d, size_t m, const double* re, const double* im, qdt_probe_set** out) {
  return guard([&] {
    need(re, "re");
    need(out, "out");
    if (d < 1 || m < 1) throw qdt::Error(qdt::ErrorCode::InvalidDimension, "need d >= 1 and m >= 1");
    std::vector<qdt::DensityMatrix> states;
    std::vector<std::string> labels;
    for (std::size_t j = 0; j < m; ++j) {
      states.emplace_back(qdt::HermitianOp(read_matrix(d, re, im, j * static_cast<std::size_t>(d * d)), 1e-9));
      labels.push_back(std::to_string(j));
    }
    *out = new qdt_probe_set{qdt::ProbeSet(std::move(states), labels)};
  });
}

qdt_status qdt_probe_set_load(const char* path, qdt_probe_set** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = new qdt_probe_set{qdt::load_probe_set(path)};
  });
}

qdt_status qdt_probe_set_save(const qdt_probe_set* set, const char* path, const char* label) {
  return guard([&] {
    need(set, "set");
    need(path, "path");
    qdt::save_probe_set(path, set->set, label ? label : "probes");
  });
}

void qdt_probe_set_free(qdt_probe_set* set) { delete set; }

qdt_status qdt_probe_set_size(const qdt_probe_set* set, size_t* m, int* d) {
  return guard([&] {
    need(set, "set");
    if (m) *m = set->set.size();
    if (d) *d = set->set.dim();
  });
}

qdt_status qdt_probe_set_state(const qdt_probe_set* set, size_t j, double* re, double* im) {
  return guard([&] {
    need(set, "set");
    if (j >= set->set.size()) throw qdt::Error(qdt::ErrorCode::InvalidArgument, "state index out of range");
    write_matrix(set->set[j].matrix(), re, im);
  });
}

qdt_status qdt_design_report(const qdt_probe_set* set, qdt_design* out, double* eigenvalues, size_t cap) {
  return guard([&] {
    need(set, "set");
    need(out, "out");
    const qdt::DesignReport r = qdt::design_report(set->set);
    out->umse_criterion = r.umse_criterion;
    out->cond = r.cond;
    out->complete = r.complete ? 1 : 0;
    out->rank = r.rank;
    out->eigenvalue_count = static_cast<size_t>(r.eigenvalues.size());
    if (eigenvalues) {
      for (Eigen::Index k = 0; k < r.eigenvalues.size() && static_cast<size_t>(k) < cap; ++k) eigenvalues[k] = r.eigenvalues(k);
    }
  });
}

qdt_status qdt_theorem1_optimum(int d, int n, double shots, double* min_umse, double* min_cond) {
  return guard([&] {
    const qdt::OptimumValues v = qdt::theorem1_optimum(d, n, shots);
    if (min_umse) *min_umse = v.min_umse;
    if (min_cond) *min_cond = v.min_cond;
  });
}

qdt_status qdt_theorem2_optimum(int qubits, int n, double shots, double* min_umse, double* min_cond) {
  return guard([&] {
    const qdt::OptimumValues v = qdt::theorem2_optimum(qubits, n, shots);
    if (min_umse) *min_umse = v.min_umse;
    if (min_cond) *min_cond = v.min_cond;
  });
}

qdt_status qdt_perturbation_bounds(const qdt_probe_set* set, double eps, double* criterion_bound, double* cond_bound) {
  return guard([&] {
    need(set, "set");
    const qdt::PerturbationBounds b = qdt::perturbation_bounds(set->set, eps);
    if (criterion_bound) *criterion_bound = b.criterion_bound;
    if (cond_bound) *cond_bound = b.cond_bound;
  });
}

qdt_status qdt_povm_detector(const qdt_detector_spec* spec, qdt_povm** out) {
  return guard([&] {
    need(spec, "spec");
    need(spec->kind, "spec->kind");
    need(out, "out");
    qdt::DetectorSpec ds;
    ds.kind = spec->kind;
    ds.dim = spec->dim;
    ds.mu = spec->mu;
    ds.u1_seed = spec->u1_seed;
    ds.u2_seed = spec->u2_seed;
    ds.identity_unitaries = spec->identity_unitaries != 0;
    *out = new qdt_povm{qdt::build_detector(ds)};
  });
}

qdt_status qdt_povm_from_matrices(int d, size_t n, const double* re, const double* im, qdt_povm** out) {
  return guard([&] {
    need(re, "re");
    need(out, "out");
    if (d < 1 || n < 1) throw qdt::Error(qdt::ErrorCode::InvalidDimension, "need d >= 1 and n >= 1");
    std::vector<qdt::HermitianOp> el;
    for (std::size_t i = 0; i < n; ++i) el.emplace_back(read_matrix(d, re, im, i * static_cast<std::size_t>(d * d)), 1e-9);
    *out = new qdt_povm{qdt::Povm(std::move(el))};
  });
}

qdt_status qdt_povm_load(const char* path, qdt_povm** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = new qdt_povm{qdt::load_povm(path)};
  });
}

qdt_status qdt_povm_save(const qdt_povm* povm, const char* path, const char* label) {
  return guard([&] {
    need(povm, "povm");
    need(path, "path");
    qdt::save_povm(path, povm->povm, label ? label : "povm");
  });
}

void qdt_povm_free(qdt_povm* povm) { delete povm; }

qdt_status qdt_povm_size(const qdt_povm* povm, size_t* n, int* d) {
  return guard([&] {
    need(povm, "povm");
    if (n) *n = povm->povm.size();
    if (d) *d = povm->povm.dim();
  });
}

qdt_status qdt_povm_element(const qdt_povm* povm, size_t i, double* re, double* im) {
  return guard([&] {
    need(povm, "povm");
    if (i >= povm->povm.size()) throw qdt::Error(qdt::ErrorCode::InvalidArgument, "element index out of range");
    write_matrix(povm->povm[i].matrix(), re, im);
  });
}

qdt_status qdt_sample_frequencies(const qdt_povm* truth, const qdt_probe_set* set, uint64_t shots, uint64_t seed,
                                  qdt_freq** out) {
  return guard([&] {
    need(truth, "truth");
    need(set, "set");
    need(out, "out");
    const qdt::MeasurementPlan plan(set->set, shots);
    *out = new qdt_freq{qdt::sample_frequencies(truth->povm, plan, seed)};
  });
}

qdt_status qdt_exact_frequencies(const qdt_povm* truth, const qdt_probe_set* set, qdt_freq** out) {
  return guard([&] {
    need(truth, "truth");
    need(set, "set");
    need(out, "out");
    *out = new qdt_freq{qdt::exact_frequencies(truth->povm, set->set)};
  });
}

void qdt_freq_free(qdt_freq* f) { delete f; }

qdt_status qdt_freq_get(const qdt_freq* f, size_t i, size_t j, double* value) {
  return guard([&] {
    need(f, "f");
    need(value, "value");
    if (i >= static_cast<size_t>(f->data.freqs.rows()) || j >= static_cast<size_t>(f->data.freqs.cols())) {
      throw qdt::Error(qdt::ErrorCode::InvalidArgument, "frequency index out of range");
    }
    *value = f->data.freqs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  });
}

qdt_status qdt_freq_write_csv(const qdt_freq* f, const char* path) {
  return guard([&] {
    need(f, "f");
    need(path, "path");
    std::ofstream os(path);
    if (!os) throw qdt::Error(qdt::ErrorCode::Io, std::string("cannot write '") + path + "'");
    qdt::write_frequencies_csv(os, f->data);
  });
}

qdt_status qdt_reconstruct(const qdt_freq* f, const qdt_probe_set* set, int n, qdt_povm** out) {
  return guard([&] {
    need(f, "f");
    need(set, "set");
    need(out, "out");
    *out = new qdt_povm{qdt::reconstruct(f->data, set->set, n).povm};
  });
}

qdt_status qdt_povm_mse(const qdt_povm* est, const qdt_povm* truth, double* value) {
  return guard([&] {
    need(est, "est");
    need(truth, "truth");
    need(value, "value");
    *value = qdt::mse(est->povm, truth->povm);
  });
}

qdt_status qdt_element_fidelity(const qdt_povm* est, const qdt_povm* truth, size_t i, double* value) {
  return guard([&] {
    need(est, "est");
    need(truth, "truth");
    need(value, "value");
    if (i >= est->povm.size() || i >= truth->povm.size()) throw qdt::Error(qdt::ErrorCode::InvalidArgument, "element index out of range");
    *value = qdt::detector_fidelity_f(est->povm[i], truth->povm[i]);
  });
}

qdt_status qdt_detect_distortion(const qdt_povm* povm, int* distorted, int* rank) {
  return guard([&] {
    need(povm, "povm");
    const qdt::DistortionReport r = qdt::detect_distortion(povm->povm);
    if (distorted) *distorted = r.distorted ? 1 : 0;
    if (rank) *rank = r.rank;
  });
}

qdt_status qdt_fock_coherent(int n, double* alpha_sq, double* infidelity) {
  return guard([&] {
    const qdt::FockCoherent fc = qdt::fock_coherent_infidelity(n);
    if (alpha_sq) *alpha_sq = fc.alpha_sq;
    if (infidelity) *infidelity = fc.infidelity;
  });
}

qdt_status qdt_optimize_superposition(int d, const double* re, const double* im, int s, int starts, uint64_t seed, double* c,
                                      double* alpha, double* cost, double* discarded_weight) {
  return guard([&] {
    need(re, "re");
    if (d < 1) throw qdt::Error(qdt::ErrorCode::InvalidDimension, "d must be >= 1");
    qdt::CVector target(d);
    for (int k = 0; k < d; ++k) target(k) = qdt::Complex(re[k], im ? im[k] : 0.0);
    const qdt::OptimizedSuperposition o = qdt::optimize_superposition(target, s, starts, seed);
    for (std::size_t k = 0; k < o.sup.terms.size(); ++k) {
      if (c) {
        c[2 * k] = o.sup.terms[k].c.real();
        c[2 * k + 1] = o.sup.terms[k].c.imag();
      }
      if (alpha) {
        alpha[2 * k] = o.sup.terms[k].alpha.real();
        alpha[2 * k + 1] = o.sup.terms[k].alpha.imag();
      }
    }
    if (cost) *cost = o.cost;
    if (discarded_weight) *discarded_weight = o.discarded_weight;
  });
}

void qdt_table1_default_options(qdt_table1_options* opt) {
  if (!opt) return;
  const qdt::Table1Options d;
  opt->seed = d.seed;
  opt->random_sets = d.random_sets;
  opt->coherent_starts = d.coherent_starts;
  opt->random_coherent_sets = d.random_coherent_sets;
  opt->include_coherent = d.include_coherent ? 1 : 0;
  opt->workers = d.workers;
}

qdt_status qdt_table1(const qdt_table1_options* opt, const char* csv_path, qdt_table1_row* rows, size_t cap, size_t* count) {
  return guard([&] {
    need(opt, "opt");
    qdt::Table1Options o;
    o.seed = opt->seed;
    o.random_sets = opt->random_sets;
    o.coherent_starts = opt->coherent_starts;
    o.random_coherent_sets = opt->random_coherent_sets;
    o.include_coherent = opt->include_coherent != 0;
    o.workers = opt->workers;
    if (o.random_sets < 1 || o.coherent_starts < 1 || o.random_coherent_sets < 1) {
      throw qdt::Error(qdt::ErrorCode::InvalidArgument, "table1: counts must be positive");
    }
    const auto result = qdt::table1(o);
    if (csv_path) {
      std::ofstream os(csv_path);
      if (!os) throw qdt::Error(qdt::ErrorCode::Io, std::string("cannot write '") + csv_path + "'");
      qdt::write_table1_csv(os, result, o.seed);
    }
    if (count) *count = result.size();
    for (std::size_t k = 0; rows && k < result.size() && k < cap; ++k) {
      qdt_table1_row& r = rows[k];
      r.protocol = result[k].protocol;
      std::snprintf(r.probes, sizeof r.probes, "%s", result[k].probes.c_str());
      r.m = result[k].m;
      r.criterion = result[k].criterion;
      r.cond = result[k].cond;
      r.flagged = result[k].flagged;
    }
  });
}

void qdt_run_default_options(qdt_run_options* opt) {
  if (!opt) return;
  opt->has_seed = 0;
  opt->seed = 0;
  opt->reps = 0;
  opt->out_dir = ".";
  opt->workers = 1;
  opt->fast = 0;
  opt->write_files = 1;
  opt->expect_kind = nullptr;
}

qdt_status qdt_run_scenario(const char* config_path, const qdt_run_options* opt, qdt_log_fn log, void* user,
                            int* checks_passed) {
  return guard([&] {
    need(config_path, "config_path");
    need(opt, "opt");
    const qdt::ScenarioConfig cfg = qdt::load_scenario(config_path);
    if (opt->expect_kind && cfg.kind != opt->expect_kind) {
      throw qdt::Error(qdt::ErrorCode::Config, std::string(config_path) + ": scenario kind is '" + cfg.kind + "', expected '" +
                                                   opt->expect_kind + "'");
    }
    qdt::RunOptions ro;
    if (opt->has_seed) ro.seed = opt->seed;
    if (opt->reps > 0) ro.reps = opt->reps;
    ro.out_dir = opt->out_dir ? opt->out_dir : ".";
    ro.workers = opt->workers > 0 ? opt->workers : 1;
    ro.fast = opt->fast != 0;
    ro.write_files = opt->write_files != 0;
    CallbackBuf buf(log, user);
    std::ostream os(&buf);
    const qdt::ScenarioOutcome out = qdt::run_scenario(cfg, ro, os);
    os.flush();
    if (checks_passed) *checks_passed = out.checks_passed ? 1 : 0;
  });
}

namespace {

std::vector<qdt::ExperimentRow> rows_from(const char* path) {
  std::ifstream in(path);
  if (!in) throw qdt::Error(qdt::ErrorCode::Io, std::string("cannot open '") + path + "'");
  try {
    return qdt::read_record_csv(in);
  } catch (const qdt::Error& e) {
    throw qdt::Error(e.code(), std::string(path) + ": " + e.what());
  }
}

}  // namespace

qdt_status qdt_slope_from_csv(const char* csv_path, double lo, double hi, qdt_slope* out, size_t cap, size_t* count) {
  return guard([&] {
    need(csv_path, "csv_path");
    std::vector<qdt::ExperimentRow> rows;
    for (const auto& r : rows_from(csv_path)) {
      if (static_cast<double>(r.shots) >= lo && static_cast<double>(r.shots) <= hi) rows.push_back(r);
    }
    const qdt::SlopeSummary s = qdt::summarize_rows(rows);
    if (count) *count = s.slopes.size();
    for (std::size_t i = 0; out && i < s.slopes.size() && i < cap; ++i) {
      out[i].element = static_cast<int>(i + 1);
      out[i].valid = s.slopes[i] ? 1 : 0;
      out[i].slope = s.slopes[i] ? s.slopes[i]->slope : NAN;
      out[i].stderr_slope = s.slopes[i] ? s.slopes[i]->stderr_slope : NAN;
      out[i].points = static_cast<int>(s.n_grid.size());
    }
  });
}

qdt_status qdt_plotdata_from_csv(const char* csv_path, const char* out_path, qdt_log_fn log, void* user) {
  return guard([&] {
    need(csv_path, "csv_path");
    need(out_path, "out_path");
    const qdt::SlopeSummary s = qdt::summarize_rows(rows_from(csv_path));
    if (std::strcmp(out_path, "-") == 0) {
      CallbackBuf buf(log, user);
      std::ostream os(&buf);
      qdt::write_plot_data(os, s, csv_path);
      os.flush();
    } else {
      std::ofstream os(out_path);
      if (!os) throw qdt::Error(qdt::ErrorCode::Io, std::string("cannot write '") + out_path + "'");
      qdt::write_plot_data(os, s, csv_path);
    }
  });
}

}  // extern "C"
