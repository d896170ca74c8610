// Acceptance suite: one PASS/FAIL line per criterion. With an argument only
// that criterion runs; exit status is nonzero when any selected line fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "oracles.hpp"
#include "qdt/experiments.hpp"

using namespace qdt;

namespace {

// Tolerances, pinned.
constexpr double kTableRel = 1e-9;
constexpr double kTableSeconds = 1.0;
constexpr double kFormulaRel = 4e-16;
constexpr double kIdentMse = 1e-14;
constexpr double kIdentSeconds = 10.0;
constexpr double kTightRel = 0.10;
constexpr double kScalingSeconds = 20 * 60.0;
constexpr double kFockAbs = 1e-3;
constexpr double kSicS3Max = 400.0;
constexpr double kMubS3Max = 420.0;
constexpr double kS1Ratio = 10.0;
constexpr double kCoherentSeconds = 5 * 60.0;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int workers() { return static_cast<int>(std::clamp(std::thread::hardware_concurrency(), 1u, 8u)); }

struct Line {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [violated: " << what << "]";
    }
  }
};

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

double mean_of(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sem_of(const std::vector<double>& v) {
  const double m = mean_of(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

void c1_table(Line& l) {
  Table1Options opt;
  opt.include_coherent = false;
  const auto t0 = Clock::now();
  const auto rows = table1(opt);
  const double secs = seconds_since(t0);
  const double gpb_cond = std::sqrt((9 + std::sqrt(73.0)) / (9 - std::sqrt(73.0)));
  const double want[4][2] = {{304, std::sqrt(5.0)}, {304, std::sqrt(5.0)}, {400, 3.0}, {640, gpb_cond}};
  double worst = 0;
  for (int k = 0; k < 4; ++k) {
    worst = std::max({worst, rel(rows[k].criterion, want[k][0]), rel(rows[k].cond, want[k][1])});
    l.detail << rows[k].probes << " " << rows[k].criterion << "/" << rows[k].cond << "; ";
  }
  l.detail << "max rel err " << worst << ", " << secs << " s";
  l.require(worst <= kTableRel, "relative error <= 1e-9");
  l.require(secs < kTableSeconds, "runtime < 1 s");
}

void c2_formulas(Line& l) {
  int cases = 0;
  double worst = 0;
  for (int d = 2; d <= 8; ++d) {
    for (int n = 2; n <= 6; ++n) {
      for (double shots : {1.0, 20.0, 304.0, 1e3, 12345.0, 1e6, 1e7}) {
        // integer numerator, then one rounding
        const long long num = static_cast<long long>(n - 1) * (1LL * d * d * d * d + 1LL * d * d * d - 1LL * d * d);
        const auto o = theorem1_optimum(d, n, shots);
        worst = std::max(worst, rel(o.min_umse, static_cast<double>(num) / (4.0 * shots)));
        worst = std::max(worst, rel(o.min_cond * o.min_cond, static_cast<double>(d + 1)));
        ++cases;
      }
    }
  }
  for (int m = 1; m <= 5; ++m) {
    for (int n = 2; n <= 6; ++n) {
      for (double shots : {1.0, 100.0, 1e5}) {
        long long p20 = 1, p3 = 1;
        for (int k = 0; k < m; ++k) {
          p20 *= 20;
          p3 *= 3;
        }
        const auto o = theorem2_optimum(m, n, shots);
        worst = std::max(worst, rel(o.min_umse, static_cast<double>(p20 * (n - 1)) / (4.0 * shots)));
        worst = std::max(worst, rel(o.min_cond * o.min_cond, static_cast<double>(p3)));
        ++cases;
      }
    }
  }
  const bool d4 = theorem1_optimum(4, 2, 304.0).min_umse == 0.25 && theorem1_optimum(4, 3, 1.0).min_umse == 152.0;
  const bool m2 = theorem2_optimum(2, 2, 100.0).min_umse == 1.0 && theorem2_optimum(2, 5, 8.0).min_umse == 50.0;
  l.detail << cases << " grid points, max rel err " << worst << "; d=4: 304(n-1)/(4N) " << (d4 ? "exact" : "off")
           << "; m=2: 100(n-1)/N " << (m2 ? "exact" : "off");
  l.require(worst <= kFormulaRel, "closed forms to rounding");
  l.require(d4 && m2, "anchor values exact");
}

void c3_identifiability(Line& l) {
  Rng rng(3003);
  const auto t0 = Clock::now();
  double worst = 0;
  int count = 0;
  for (int t = 0; t < 50; ++t) {
    const int d = t % 2 == 0 ? 2 : 4;
    const int n = (t / 2) % 2 == 0 ? 2 : 3;
    ProbeSet set;
    switch ((t / 4) % 3) {
      case 0: set = d == 2 ? sic_states_d2() : sic_states_d4(); break;
      case 1: set = mub_states(d); break;
      default: set = random_pure_set(d * d + 4, d, rng); break;
    }
    const Povm truth = oracle::povm(d, n, rng);
    worst = std::max(worst, mse(reconstruct(exact_frequencies(truth, set), set, n).povm, truth));
    ++count;
  }
  const double secs = seconds_since(t0);
  l.detail << count << " POVMs, max MSE " << worst << ", " << secs << " s";
  l.require(worst < kIdentMse, "MSE < 1e-14");
  l.require(secs < kIdentSeconds, "runtime < 10 s");
}

void c4_stage1_bound(Line& l) {
  const ProbeSet set = sic_states_d2();
  const std::uint64_t shots = 10000;
  const double bound = umse_bound(design_report(set), 2, static_cast<double>(shots), BoundKind::Stage1);
  const auto half = HermitianOp::identity(2) * 0.5;
  const Povm truth({half, half});
  std::vector<double> all, free_part;
  for (int r = 0; r < 2000; ++r) {
    const auto f = sample_frequencies(truth, MeasurementPlan(set, shots), Rng(4004, static_cast<std::uint64_t>(r)));
    const auto est = stage1_cls(f, set, 2);
    all.push_back(mse(est.elements, truth));
    free_part.push_back((est.elements[0].matrix() - truth[0].matrix()).squaredNorm());
  }
  const double m = mean_of(all);
  l.detail << "{I/2,I/2}: mean sum_i MSE " << m << " vs bound " << bound << " (ratio " << m / bound
           << ", exact expectation " << oracle::stage1_expected_mse(truth, set, shots) << "); first element alone "
           << mean_of(free_part) / bound << "x bound";
  l.require(std::abs(m / bound - 1.0) <= kTightRel, "mean within 10% of the bound");

  Rng rng(4005);
  int above = 0;
  double worst = 0;
  for (int k = 0; k < 10; ++k) {
    const Povm det = oracle::povm(2, 2, rng);
    std::vector<double> v;
    for (int r = 0; r < 500; ++r) {
      const auto f = sample_frequencies(det, MeasurementPlan(set, shots), Rng(4006 + k, static_cast<std::uint64_t>(r)));
      v.push_back(mse(stage1_cls(f, set, 2).elements, det));
    }
    worst = std::max(worst, mean_of(v) / bound);
    if (mean_of(v) > bound + 2 * sem_of(v)) ++above;
  }
  l.detail << "; random detectors: " << above << "/10 above bound+2SE, worst mean " << worst << "x bound";
  l.require(above == 0, "random detectors within 2 SE of the bound");
}

ScenarioConfig with_protocols(ScenarioConfig sc, const std::vector<std::string>& keep) {
  std::vector<ProtocolSpec> p;
  for (const auto& s : sc.protocols) {
    if (std::find(keep.begin(), keep.end(), s.name) != keep.end()) p.push_back(s);
  }
  sc.protocols = p;
  std::vector<CheckSpec> c;
  for (const auto& s : sc.checks) {
    if (std::find(keep.begin(), keep.end(), s.protocol) != keep.end()) c.push_back(s);
  }
  sc.checks = c;
  return sc;
}

std::optional<SlopeFit> slope_of(const ScenarioOutcome& out, const std::string& protocol, int element) {
  for (const auto& r : out.records) {
    if (r.protocol == protocol) return r.slopes[static_cast<std::size_t>(element)];
  }
  return std::nullopt;
}

void slope_check(Line& l, const ScenarioOutcome& out, const std::string& tag, const std::string& protocol, int element,
                 double lo, double hi) {
  const auto s = slope_of(out, protocol, element);
  l.detail << tag << " " << protocol << ".P" << element + 1 << "=";
  if (!s) {
    l.detail << "none; ";
    l.require(false, tag + " " + protocol + " slope exists");
    return;
  }
  l.detail << s->slope << "; ";
  l.require(s->slope >= lo && s->slope <= hi, tag + " " + protocol + ".P" + std::to_string(element + 1) + " in [" +
                                                   std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

ScenarioOutcome run_desk(ScenarioConfig sc) {
  sc.reps = 50;
  sc.n_grid = log_grid(1e3, 1e6, 7);
  RunOptions opt;
  opt.write_files = false;
  opt.workers = workers();
  std::ostringstream log;
  return run_scenario(sc, opt, log);
}

const std::string kConfigs = std::string(QDT_SOURCE_DIR) + "/configs/";

void c5_scaling(Line& l) {
  const auto t0 = Clock::now();
  const auto mu1 = run_desk(with_protocols(load_scenario(kConfigs + "binary_mu1.conf"), {"random", "adaptive_gpb"}));
  const auto mu025 = run_desk(load_scenario(kConfigs + "binary_mu_sweep_025.conf"));
  const double secs = seconds_since(t0);
  for (int i = 0; i < 2; ++i) slope_check(l, mu1, "mu=1", "random", i, -0.65, -0.35);
  for (int i = 0; i < 2; ++i) slope_check(l, mu1, "mu=1", "adaptive_gpb", i, -1.2, -0.8);
  slope_check(l, mu025, "mu=0.25", "random", 1, -1.2, -0.8);
  l.detail << "reps 50, N 1e3..1e6, " << workers() << " workers, " << secs << " s";
  l.require(secs < kScalingSeconds, "runtime < 20 min");
}

void c6_three_valued(Line& l) {
  const auto out = run_desk(load_scenario(kConfigs + "three_valued.conf"));
  for (int i = 0; i < 3; ++i) slope_check(l, out, "three-valued", "adaptive_gpb", i, -1.2, -0.8);
  slope_check(l, out, "three-valued", "random", 2, -1.2, -0.8);
}

HermitianOp random_effect(int d, Rng& rng) {
  const CMatrix u = oracle::unitary(d, rng);
  RVector ev(d);
  for (int k = 0; k < d; ++k) ev(k) = rng.uniform();
  return HermitianOp(CMatrix(u * ev.cast<Complex>().asDiagonal() * u.adjoint()), 1e-9);
}

void c7_fidelity(Line& l) {
  Rng rng(7007);
  int bad = 0;
  double lowest = 1;
  for (int d : {2, 4}) {
    for (int t = 0; t < 10000; ++t) {
      const HermitianOp a = random_effect(d, rng), b = random_effect(d, rng);
      const double f = detector_fidelity_f(a, b);
      lowest = std::min(lowest, f - (1.0 / d - 1.0));
      if (!(f > 1.0 / d - 1.0 && f <= 1.0 + 1e-12)) ++bad;
      if (f >= 1.0 - 1e-15 && frobenius_distance(a.matrix(), b.matrix()) >= 1e-8) ++bad;
    }
  }
  l.detail << "2x10^4 pairs, " << bad << " out of bounds (min margin " << lowest << "); ";
  l.require(bad == 0, "1/d - 1 < F <= 1");

  // P = diag(1 - tau, 1, ..), est = diag(tau, 0, ..) approaches the lower bound
  double closest = 1;
  for (int d : {2, 4}) {
    double prev = INFINITY;
    for (double tau : {1e-1, 1e-2, 1e-3, 1e-4}) {
      RVector p = RVector::Ones(d), e = RVector::Zero(d);
      p(0) = 1 - tau;
      e(0) = tau;
      const double margin = detector_fidelity_f(HermitianOp(CMatrix(e.cast<Complex>().asDiagonal())),
                                                HermitianOp(CMatrix(p.cast<Complex>().asDiagonal()))) -
                            (1.0 / d - 1.0);
      l.require(margin > 0 && margin < prev, "extreme pair stays above and approaches 1/d - 1");
      prev = margin;
      closest = std::min(closest, margin);
    }
  }
  l.detail << "extreme pairs reach within " << closest << " of 1/d - 1; ";

  const HermitianOp third = HermitianOp::identity(2) * (1.0 / 3.0), half = HermitianOp::identity(2) * 0.5;
  const double f0 = detector_fidelity_f0(half, third), f = detector_fidelity_f(half, third);
  l.detail << "I/3 example F0=" << f0 << " F=" << f << "; ";
  l.require(std::abs(f0 - 1.0) < 1e-12 && f < 1.0 - 1e-6, "F0 = 1 and F < 1 on the I/3 example");

  int cases = 0, agree = 0;
  const auto p0 = HermitianOp::projector(CVector::Unit(2, 0)), p1 = HermitianOp::projector(CVector::Unit(2, 1));
  std::vector<Povm> povms;
  for (int n = 2; n <= 5; ++n) {
    for (int t = 0; t < 50; ++t) povms.push_back(oracle::povm(2, n, rng));
    // dependent families: split one element, or mix commuting projectors
    for (int t = 0; t < 10; ++t) {
      std::vector<HermitianOp> el;
      double left = 1.0;
      for (int k = 0; k + 2 < n; ++k) {
        const double w = left * rng.uniform() * 0.5;
        el.push_back(p0 * w);
        left -= w;
      }
      el.push_back(p0 * left);
      el.push_back(p1);
      povms.emplace_back(el);
    }
  }
  for (const auto& p : povms) {
    std::vector<CMatrix> m;
    for (const auto& e : p.elements()) m.push_back(e.matrix());
    const int rank = oracle::element_rank(m);
    const auto rep = detect_distortion(p);
    ++cases;
    if (rep.distorted == (rank < static_cast<int>(p.size())) && rep.rank == rank) ++agree;
  }
  l.detail << "distortion test agrees with brute-force rank on " << agree << "/" << cases;
  l.require(agree == cases, "detect_distortion matches rank");
}

void c8_fock(Line& l) {
  const double want[] = {0.0, 0.6321, 0.7293};
  for (int n = 0; n < 3; ++n) {
    const double v = fock_coherent_infidelity(n).infidelity;
    l.detail << "n=" << n << ": " << v << "; ";
    l.require(std::abs(v - want[n]) <= kFockAbs, "n=" + std::to_string(n));
  }
}

void c9_coherent(Line& l) {
  const auto t0 = Clock::now();
  double sic3 = INFINITY, mub3 = INFINITY, sic1 = INFINITY;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    sic3 = std::min(sic3, design_report(superposed_probe_set(sic_states_d4(), 3, 100, seed, 4000, workers()).set).umse_criterion);
    mub3 = std::min(mub3, design_report(superposed_probe_set(mub_states(4), 3, 100, seed, 4000, workers()).set).umse_criterion);
    sic1 = std::min(sic1, design_report(superposed_probe_set(sic_states_d4(), 1, 100, seed, 4000, workers()).set).umse_criterion);
  }
  const double secs = seconds_since(t0);
  l.detail << "best of 3 seeds: s=3 SIC " << sic3 << ", s=3 MUB " << mub3 << ", s=1 SIC " << sic1 << " (" << sic1 / sic3
           << "x), " << secs << " s";
  l.require(sic3 <= kSicS3Max, "s=3 SIC <= 400");
  l.require(mub3 <= kMubS3Max, "s=3 MUB <= 420");
  l.require(sic1 >= kS1Ratio * sic3, "s=1 >= 10x s=3");
  l.require(secs < kCoherentSeconds, "runtime < 5 min");
}

void c10_perturbation(Line& l) {
  Rng rng(1010);
  int trials = 0, violations = 0;
  for (const auto& set : {sic_states_d4(), mub_states(4), gpb_states(4), cube_states()}) {
    const auto base = design_report(set);
    const double eps = base.eigenvalues(base.eigenvalues.size() - 1) / (2.0 * static_cast<double>(set.size()));
    const auto b = perturbation_bounds(set, eps);
    for (int t = 0; t < 25; ++t) {
      const auto r = design_report(oracle::perturb(set, eps, rng, t % 5 == 0));
      ++trials;
      if (std::abs(r.umse_criterion - base.umse_criterion) > b.criterion_bound) ++violations;
      if (std::abs(r.cond - base.cond) > b.cond_bound) ++violations;
    }
  }
  const auto zero = perturbation_bounds(sic_states_d4(), 0.0);
  l.detail << trials << " perturbed sets, " << violations << " bound violations; eps=0 bounds " << zero.criterion_bound
           << ", " << zero.cond_bound;
  l.require(violations == 0, "no violations");
  l.require(zero.criterion_bound == 0.0 && zero.cond_bound == 0.0, "eps = 0 gives 0");
}

void c11_long_run(Line& l) {
  const std::vector<std::string> figures = {"binary_mu1",         "binary_mu_sweep_025", "binary_mu_sweep_050",
                                            "binary_mu_sweep_075", "binary_mu_sweep_100", "robustness_binary",
                                            "binary_perturbed",   "three_valued",        "robustness_three_valued",
                                            "three_perturbed",    "coherent_mu1",        "coherent_perturbed"};
  int full = 0;
  for (const auto& f : figures) {
    const auto path = kConfigs + f + ".conf";
    if (!std::filesystem::exists(path)) {
      l.require(false, f + ".conf present");
      continue;
    }
    const auto sc = load_scenario(path);
    if (sc.reps >= 100) ++full;
  }
  l.detail << full << "/" << figures.size() << " shipped configs at full size (reps >= 100); ";
  l.require(full == static_cast<int>(figures.size()), "full-size configs");

  auto sc = load_scenario(kConfigs + "binary_mu1.conf");
  RunOptions opt;
  opt.fast = true;
  opt.write_files = false;
  opt.workers = workers();
  std::ostringstream log;
  const auto out = run_scenario(with_protocols(sc, {"adaptive_gpb"}), opt, log);
  const auto& r = out.records.front();
  l.detail << "--fast: reps " << r.reps << ", N max " << r.n_grid.back() << ", checks "
           << (out.checks_passed ? "pass" : "fail") << "; ";
  l.require(r.reps <= 20 && r.n_grid.back() <= 100000, "fast caps");

  std::ifstream readme(std::string(QDT_SOURCE_DIR) + "/README.md");
  std::stringstream text;
  text << readme.rdbuf();
  const bool documented = text.str().find("Long runs") != std::string::npos;
  l.detail << "README long-run section " << (documented ? "present" : "missing");
  l.require(documented, "long-run mode documented");
}

struct Criterion {
  int id;
  const char* name;
  std::function<void(Line&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "Table-I analytic rows", c1_table},
      {2, "Theorem-1/2 closed forms", c2_formulas},
      {3, "Noiseless identifiability", c3_identifiability},
      {4, "Stage-1 bound tightness", c4_stage1_bound},
      {5, "Scaling laws, binary detector", c5_scaling},
      {6, "Three-valued detector slopes", c6_three_valued},
      {7, "Fidelity properties", c7_fidelity},
      {8, "Fock-state coherent infidelity", c8_fock},
      {9, "Coherent superposition probes", c9_coherent},
      {10, "Perturbation bound soundness", c10_perturbation},
      {11, "Desk-scale suite and long-run mode", c11_long_run},
  };
  const int only = argc > 1 ? std::atoi(argv[1]) : 0;
  int failed = 0;
  for (const auto& c : all) {
    if (only && c.id != only) continue;
    Line l;
    try {
      c.run(l);
    } catch (const std::exception& e) {
      l.require(false, std::string("exception: ") + e.what());
    }
    std::printf("[%s] %2d %s: %s\n", l.pass ? "PASS" : "FAIL", c.id, c.name, l.detail.str().c_str());
    std::fflush(stdout);
    failed += l.pass ? 0 : 1;
  }
  return failed ? 1 : 0;
}
