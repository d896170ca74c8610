// Command-line harness. Talks to the library only through qdt.h.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qdt/qdt.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitConfig = 2;
constexpr int kExitCheck = 3;

void print_log(const char* text, void*) {
  std::fputs(text, stdout);
  std::fflush(stdout);
}

int report(qdt_status s) {
  std::fprintf(stderr, "qdt: %s\n", qdt_last_error());
  return (s == QDT_ERR_CONFIG || s == QDT_ERR_IO) ? kExitConfig : kExitError;
}

struct RunFlags {
  std::string config;
  std::uint64_t seed = 0;
  int reps = 0;
  std::string out = "results";
  int workers = 1;
  bool fast = false;
  bool check = false;
};

void add_run_flags(CLI::App* sub, RunFlags& f) {
  sub->add_option("config", f.config, "Scenario file")->required();
  sub->add_option("--seed", f.seed, "Override the configured seed");
  sub->add_option("--reps", f.reps, "Override the configured repetition count")->check(CLI::PositiveNumber);
  sub->add_option("--out", f.out, "Output directory")->capture_default_str();
  sub->add_option("--workers", f.workers, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  sub->add_flag("--fast", f.fast, "At most 20 reps and N <= 1e5");
  sub->add_flag("--check", f.check, "Exit with status 3 when a configured slope check fails");
}

int run_scenario(const RunFlags& f, const char* kind, bool seed_given) {
  qdt_run_options opt;
  qdt_run_default_options(&opt);
  opt.has_seed = seed_given ? 1 : 0;
  opt.seed = f.seed;
  opt.reps = f.reps;
  opt.out_dir = f.out.c_str();
  opt.workers = f.workers;
  opt.fast = f.fast ? 1 : 0;
  opt.expect_kind = kind;
  int passed = 1;
  const qdt_status s = qdt_run_scenario(f.config.c_str(), &opt, print_log, nullptr, &passed);
  if (s != QDT_OK) return report(s);
  if (f.check && !passed) {
    std::fprintf(stderr, "qdt: slope check failed\n");
    return kExitCheck;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum detector tomography experiments"};
  app.set_version_flag("--version", std::string(qdt_version()));
  app.require_subcommand(1);

  // table1
  auto* t1 = app.add_subcommand("table1", "Criterion and condition number of the 4-dimensional probe sets");
  std::uint64_t t1_seed = 1;
  int t1_workers = 1;
  bool t1_fast = false, t1_analytic = false;
  std::string t1_out = "results";
  t1->add_option("--seed", t1_seed)->capture_default_str();
  t1->add_option("--workers", t1_workers)->check(CLI::PositiveNumber);
  t1->add_option("--out", t1_out, "Output directory")->capture_default_str();
  t1->add_flag("--fast", t1_fast, "200 random sets, 20 optimizer starts, 20 random coherent sets");
  t1->add_flag("--analytic-only", t1_analytic, "Rows 1-5 only");

  // scenario runners
  RunFlags sc, ad, co, ro;
  auto* scaling = app.add_subcommand("scaling", "Infidelity versus N for the configured protocols");
  auto* adaptive = app.add_subcommand("adaptive", "Two-step adaptive scenario");
  auto* coherent = app.add_subcommand("coherent", "Scenario with coherent-state probes");
  auto* robust = app.add_subcommand("robustness", "Mean curves over random detector unitaries");
  add_run_flags(scaling, sc);
  add_run_flags(adaptive, ad);
  add_run_flags(coherent, co);
  add_run_flags(robust, ro);

  // slope
  auto* slope = app.add_subcommand("slope", "Fit log-log slopes of a record CSV");
  std::string slope_csv;
  double lo = 0, hi = INFINITY;
  slope->add_option("csv", slope_csv)->required()->check(CLI::ExistingFile);
  slope->add_option("--min-n", lo, "Smallest N in the fit window");
  slope->add_option("--max-n", hi, "Largest N in the fit window");

  // plotdata
  auto* plot = app.add_subcommand("plotdata", "Gnuplot-ready mean/std columns from a record CSV");
  std::string plot_csv, plot_out = "-";
  plot->add_option("csv", plot_csv)->required()->check(CLI::ExistingFile);
  plot->add_option("-o,--output", plot_out, "Output file, '-' for stdout")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (t1->parsed()) {
    qdt_table1_options opt;
    qdt_table1_default_options(&opt);
    opt.seed = t1_seed;
    opt.workers = t1_workers;
    opt.include_coherent = t1_analytic ? 0 : 1;
    if (t1_fast) {
      opt.random_sets = 200;
      opt.coherent_starts = 20;
      opt.random_coherent_sets = 20;
    }
    std::error_code ec;
    std::filesystem::create_directories(t1_out, ec);
    const std::string csv = (std::filesystem::path(t1_out) / "table1.csv").string();
    std::vector<qdt_table1_row> rows(32);
    size_t n = 0;
    const qdt_status s = qdt_table1(&opt, csv.c_str(), rows.data(), rows.size(), &n);
    if (s != QDT_OK) return report(s);
    std::printf("%-3s %-22s %4s %14s %12s\n", "#", "probes", "M", "criterion", "cond");
    for (size_t k = 0; k < n; ++k) {
      const auto& r = rows[k];
      std::printf("%-3d %-22s %4d %14.6g %12.6g", r.protocol, r.probes, r.m, r.criterion, r.cond);
      if (r.flagged) std::printf("  (%d flagged)", r.flagged);
      std::printf("\n");
    }
    std::printf("wrote %s\n", csv.c_str());
    return kExitOk;
  }
  if (scaling->parsed()) return run_scenario(sc, "scaling", scaling->count("--seed") > 0);
  if (adaptive->parsed()) return run_scenario(ad, "adaptive", adaptive->count("--seed") > 0);
  if (coherent->parsed()) return run_scenario(co, "coherent", coherent->count("--seed") > 0);
  if (robust->parsed()) return run_scenario(ro, "robustness", robust->count("--seed") > 0);

  if (slope->parsed()) {
    std::vector<qdt_slope> out(16);
    size_t n = 0;
    const qdt_status s = qdt_slope_from_csv(slope_csv.c_str(), lo, hi, out.data(), out.size(), &n);
    if (s != QDT_OK) return report(s);
    std::printf("element,slope,stderr,points\n");
    for (size_t i = 0; i < n && i < out.size(); ++i) {
      if (out[i].valid) {
        std::printf("P%d,%.6f,%.6f,%d\n", out[i].element, out[i].slope, out[i].stderr_slope, out[i].points);
      } else {
        std::printf("P%d,nan,nan,%d\n", out[i].element, out[i].points);
      }
    }
    return kExitOk;
  }
  if (plot->parsed()) {
    const qdt_status s = qdt_plotdata_from_csv(plot_csv.c_str(), plot_out.c_str(), print_log, nullptr);
    return s == QDT_OK ? kExitOk : report(s);
  }
  return kExitError;
}
