#include "qdt/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "parallel.hpp"
#include "qdt/text_io.hpp"

namespace qdt {

namespace {

CMatrix detector_unitary(const DetectorSpec& spec, std::uint64_t seed) {
  if (spec.identity_unitaries) return CMatrix::Identity(spec.dim, spec.dim);
  return haar_random_unitary(spec.dim, seed);
}

HermitianOp rotated_diag(const CMatrix& u, const std::vector<double>& diag, int d) {
  RVector v = RVector::Zero(d);
  for (std::size_t k = 0; k < diag.size() && static_cast<int>(k) < d; ++k) v(static_cast<Eigen::Index>(k)) = diag[k];
  return HermitianOp(u * v.cast<Complex>().asDiagonal() * u.adjoint());
}

}  // namespace

Povm build_detector(const DetectorSpec& spec) {
  const int d = spec.dim;
  const HermitianOp id = HermitianOp::identity(d);
  auto checked = [](std::vector<HermitianOp> el) {
    try {
      return Povm(std::move(el));
    } catch (const Error& e) {
      throw Error(ErrorCode::NotPhysical, std::string("build_detector: elements do not form a POVM: ") + e.what());
    }
  };
  if (spec.kind == "custom") return load_povm(spec.file);
  if (spec.kind == "binary_mu") {
    if (!(spec.mu > 0 && spec.mu <= 1)) throw Error(ErrorCode::InvalidArgument, "build_detector: need 0 < mu <= 1");
    const HermitianOp p1 = rotated_diag(detector_unitary(spec, spec.u1_seed), {spec.mu}, d);
    return checked({p1, id - p1});
  }
  if (spec.kind == "binary_perturbed") {
    const std::vector<double> e = spec.eig1.empty() ? std::vector<double>{0.6, 0.001, 0.001, 0.001} : spec.eig1;
    const HermitianOp p1 = rotated_diag(detector_unitary(spec, spec.u1_seed), e, d);
    return checked({p1, id - p1});
  }
  if (spec.kind == "three_valued" || spec.kind == "three_perturbed") {
    std::vector<double> e1 = spec.eig1, e2 = spec.eig2;
    if (spec.kind == "three_valued") {
      if (e1.empty()) e1 = {0.4};
      if (e2.empty()) e2 = {0.0, 0.5};
    } else {
      if (e1.empty()) e1 = {0.4, 0.001, 0.001, 0.001};
      if (e2.empty()) e2 = {0.001, 0.5, 0.001, 0.001};
    }
    const HermitianOp p1 = rotated_diag(detector_unitary(spec, spec.u1_seed), e1, d);
    const HermitianOp p2 = rotated_diag(detector_unitary(spec, spec.u2_seed), e2, d);
    return checked({p1, p2, id - p1 - p2});
  }
  throw Error(ErrorCode::InvalidArgument, "build_detector: unknown kind '" + spec.kind + "'");
}

// ---------------------------------------------------------------------------
// Table I

std::vector<Table1Row> table1(const Table1Options& opt) {
  std::vector<Table1Row> rows;
  auto add = [&](int id, const std::string& name, const ProbeSet& set, int flagged = 0) {
    const DesignReport r = design_report(set);
    rows.push_back({id, name, static_cast<int>(set.size()), r.umse_criterion, r.cond, flagged});
  };
  const ProbeSet sic = sic_states_d4();
  const ProbeSet mub = mub_states(4);
  add(1, "SIC", sic);
  add(2, "MUB", mub);
  add(3, "Cube", cube_states());
  add(4, "GPB", gpb_states(4));

  {
    std::vector<double> crit(static_cast<std::size_t>(opt.random_sets)), cond(crit.size());
    detail::parallel_for(crit.size(), opt.workers, [&](std::size_t k) {
      const DesignReport r = design_report(random_pure_set(32, 4, static_cast<std::uint64_t>(k)));
      crit[k] = r.umse_criterion;
      cond[k] = r.cond;
    });
    rows.push_back({5, "Random Pure", 32, mean(crit), mean(cond), 0});
  }
  if (!opt.include_coherent) return rows;

  int id = 6;
  for (int s = 1; s <= 3; ++s) {
    for (const auto* which : {"SIC", "MUB"}) {
      const ProbeSet& targets = std::string(which) == "SIC" ? sic : mub;
      const SuperposedSet sup = superposed_probe_set(targets, s, opt.coherent_starts, stream_id(opt.seed, static_cast<std::uint64_t>(s)),
                                                     4000, opt.workers);
      add(id++, std::to_string(s) + "-coherent " + which, sup.set, sup.flagged);
    }
    std::vector<double> crit(static_cast<std::size_t>(opt.random_coherent_sets)), cond(crit.size());
    detail::parallel_for(crit.size(), opt.workers, [&](std::size_t k) {
      Rng rng(opt.seed, stream_id(100 + static_cast<std::uint64_t>(s), k));
      const DesignReport r = design_report(random_coherent_set(32, 4, s, rng));
      crit[k] = r.umse_criterion;
      cond[k] = r.cond;
    });
    rows.push_back({id++, std::to_string(s) + "-coherent Random", 32, mean(crit), mean(cond), 0});
  }
  return rows;
}

void write_table1_csv(std::ostream& os, const std::vector<Table1Row>& rows, std::uint64_t seed) {
  os << "# schema=qdt.table1.v1 seed=" << seed << '\n';
  os << "protocol,probes,M,criterion,cond,flagged\n";
  for (const auto& r : rows) {
    os << r.protocol << ',' << r.probes << ',' << r.m << ',' << format_double(r.criterion) << ','
       << format_double(r.cond) << ',' << r.flagged << '\n';
  }
}

// ---------------------------------------------------------------------------
// Scenarios

namespace {

ProbeSet fixed_family(const std::string& family, int d) {
  if (family == "sic") return d == 2 ? sic_states_d2() : sic_states_d4();
  if (family == "mub") return mub_states(d);
  if (family == "cube") return cube_states();
  if (family == "gpb") return gpb_states(d);
  throw Error(ErrorCode::Config, "no fixed probe family '" + family + "'");
}

}  // namespace

BuiltProtocol build_protocol(const ProtocolSpec& spec, int d, std::uint64_t seed) {
  BuiltProtocol out;
  Protocol& p = out.protocol;
  p.name = spec.name;
  p.adaptive = spec.adaptive;
  p.step1_fraction = spec.n0_fraction;
  p.anchor = spec.anchor;
  p.estimator = spec.joint_step2 ? Step2Estimator::Joint : Step2Estimator::PerElement;
  const int s = spec.coherent_terms;

  if (spec.family == "random") {
    const int m = spec.random_m;
    p.step1 = [m, d](Rng& rng) { return random_pure_set(m, d, rng); };
  } else if (spec.family == "random_coherent") {
    const int m = spec.random_m, terms = std::max(1, s);
    p.step1 = [m, d, terms](Rng& rng) { return random_coherent_set(m, d, terms, rng); };
  } else {
    ProbeSet base = fixed_family(spec.family, d);
    if (s > 0) {
      out.fixed_superposition = superposed_probe_set(base, s, spec.coherent_starts, seed);
      base = out.fixed_superposition->set;
    }
    p.step1 = [base](Rng&) { return base; };
    p.rotated_base = base;
  }

  if (spec.adaptive) {
    if (spec.step2 == "rotated") {
      if (p.rotated_base.size() == 0) throw Error(ErrorCode::Config, "protocol '" + spec.name + "': rotated Step 2 needs a fixed family");
      if (spec.anchor < 0 || static_cast<std::size_t>(spec.anchor) >= p.rotated_base.size()) {
        throw Error(ErrorCode::Config, "protocol '" + spec.name + "': anchor out of range");
      }
      p.family = Step2Family::Rotated;
    } else if (s > 0) {
      const int starts = spec.coherent_starts;
      p.family = Step2Family::Custom;
      p.custom = [s, starts](const CMatrix& u, Rng& rng) {
        return superposed_probe_set(adaptive_gpb(u), s, starts, rng()).set;
      };
    } else {
      p.family = Step2Family::Gpb;
    }
  }
  return out;
}

namespace {

std::vector<std::uint64_t> fast_grid(const std::vector<std::uint64_t>& g) {
  std::vector<std::uint64_t> out;
  for (auto n : g)
    if (n <= 100000) out.push_back(n);
  if (out.size() < 3) out = log_grid(static_cast<double>(std::min<std::uint64_t>(g.front(), 1000)), 1e5, 4);
  return out;
}

nlohmann::json record_json(const ExperimentRecord& rec) {
  nlohmann::json j;
  j["protocol"] = rec.protocol;
  j["seed"] = rec.seed;
  if (rec.stream) j["stream"] = *rec.stream;
  j["reps"] = rec.reps;
  j["n_grid"] = rec.n_grid;
  j["mean"] = rec.mean;
  j["std"] = rec.stddev;
  nlohmann::json slopes = nlohmann::json::array();
  for (const auto& s : rec.slopes) {
    if (s) {
      slopes.push_back({{"slope", s->slope}, {"stderr", s->stderr_slope}});
    } else {
      slopes.push_back(nullptr);
    }
  }
  j["slopes"] = slopes;
  if (!rec.condition_counts.empty()) {
    const int total = static_cast<int>(rec.n_grid.size()) * rec.reps;
    nlohmann::json c = nlohmann::json::array();
    for (const auto& cc : rec.condition_counts) {
      c.push_back({{"c1", static_cast<double>(cc[0]) / total}, {"c2", static_cast<double>(cc[1]) / total},
                   {"c3", static_cast<double>(cc[2]) / total}});
    }
    j["condition_rates"] = c;
  }
  j["wall_seconds"] = rec.wall_seconds;
  return j;
}

std::string fmt_slope(const std::optional<SlopeFit>& s) {
  if (!s) return "n/a";
  std::ostringstream os;
  os << std::fixed << std::setprecision(3) << s->slope << " +/- " << s->stderr_slope;
  return os.str();
}

// Mean of per-detector mean curves across random unitary draws.
ExperimentRecord robustness_record(const ScenarioConfig& cfg, const BuiltProtocol& bp, const std::vector<std::uint64_t>& grid,
                                   int reps, std::uint64_t seed, int workers) {
  ExperimentRecord agg;
  agg.protocol = bp.protocol.name;
  agg.seed = seed;
  agg.n_grid = grid;
  agg.reps = cfg.detectors;
  std::vector<std::vector<std::vector<double>>> means;  // [detector][element][grid]
  std::vector<std::vector<std::vector<double>>> mses;
  double wall = 0;
  for (int k = 0; k < cfg.detectors; ++k) {
    DetectorSpec ds = cfg.detector;
    ds.u1_seed = stream_id(cfg.detector.u1_seed, static_cast<std::uint64_t>(k));
    ds.u2_seed = stream_id(cfg.detector.u2_seed, static_cast<std::uint64_t>(k));
    const Povm truth = build_detector(ds);
    const ExperimentRecord rec = scaling_experiment(truth, bp.protocol, grid, reps, stream_id(seed, static_cast<std::uint64_t>(k)), workers);
    wall += rec.wall_seconds;
    means.push_back(rec.mean);
    std::vector<std::vector<double>> m(static_cast<std::size_t>(rec.elements), std::vector<double>(grid.size(), 0.0));
    for (const auto& r : rec.rows) {
      const auto g = static_cast<std::size_t>(std::find(grid.begin(), grid.end(), r.shots) - grid.begin());
      m[static_cast<std::size_t>(r.element)][g] += r.mse / reps;
    }
    mses.push_back(m);
    agg.elements = rec.elements;
  }
  agg.mean.assign(static_cast<std::size_t>(agg.elements), std::vector<double>(grid.size()));
  agg.stddev = agg.mean;
  for (int i = 0; i < agg.elements; ++i) {
    for (std::size_t g = 0; g < grid.size(); ++g) {
      std::vector<double> v;
      for (int k = 0; k < cfg.detectors; ++k) {
        v.push_back(means[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)][g]);
        agg.rows.push_back({grid[g], k, i, v.back(), mses[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)][g]});
      }
      agg.mean[static_cast<std::size_t>(i)][g] = mean(v);
      agg.stddev[static_cast<std::size_t>(i)][g] = stddev(v);
    }
  }
  std::sort(agg.rows.begin(), agg.rows.end(), [](const ExperimentRow& a, const ExperimentRow& b) {
    return std::tie(a.shots, a.rep, a.element) < std::tie(b.shots, b.rep, b.element);
  });
  for (int i = 0; i < agg.elements; ++i) agg.slopes.push_back(slope_in_window(agg, i, 0.0, INFINITY));
  agg.wall_seconds = wall;
  return agg;
}

}  // namespace

ScenarioOutcome run_scenario(const ScenarioConfig& cfg, const RunOptions& opt, std::ostream& log) {
  ScenarioOutcome out;
  const std::uint64_t seed = opt.seed.value_or(cfg.seed);
  int reps = opt.reps.value_or(cfg.reps);
  std::vector<std::uint64_t> grid = cfg.n_grid;
  if (opt.fast) {
    reps = std::min(reps, 20);
    grid = fast_grid(grid);
  }
  const bool robust = cfg.kind == "robustness";
  ScenarioConfig run_cfg = cfg;
  if (opt.fast) run_cfg.detectors = std::min(run_cfg.detectors, 10);
  const Povm truth = build_detector(cfg.detector);

  log << "scenario " << cfg.id << " (" << cfg.kind << "), seed " << seed << ", reps " << reps << ", N grid";
  for (auto n : grid) log << ' ' << n;
  log << '\n';

  nlohmann::json summary;
  summary["scenario"] = cfg.id;
  summary["kind"] = cfg.kind;
  summary["description"] = cfg.description;
  summary["seed"] = seed;
  summary["reps"] = reps;
  summary["fast"] = opt.fast;
  summary["config"] = cfg.text;
  summary["protocols"] = nlohmann::json::object();

  if (opt.write_files) std::filesystem::create_directories(opt.out_dir);
  auto path_for = [&](const std::string& suffix) { return (std::filesystem::path(opt.out_dir) / (cfg.id + suffix)).string(); };

  for (std::size_t k = 0; k < cfg.protocols.size(); ++k) {
    const ProtocolSpec& ps = cfg.protocols[k];
    const BuiltProtocol bp = build_protocol(ps, cfg.detector.dim, stream_id(seed, 1000 + k));
    if (bp.fixed_superposition) {
      log << "  " << ps.name << ": " << ps.coherent_terms << "-term coherent probes, " << bp.fixed_superposition->flagged
          << " flagged for discarded weight >= " << kDiscardFlag << '\n';
      if (opt.write_files) {
        const std::string p = path_for("_" + ps.name + "_superpositions.csv");
        std::ofstream f(p);
        write_superposition_set_csv(f, *bp.fixed_superposition, seed);
        out.files.push_back(p);
      }
    }
    ExperimentRecord rec = robust ? robustness_record(run_cfg, bp, grid, reps, stream_id(seed, k), opt.workers)
                                  : scaling_experiment(truth, bp.protocol, grid, reps, stream_id(seed, k), opt.workers);
    rec.seed = seed;
    rec.stream = k;
    {
      std::ostringstream secs;
      secs << std::fixed << std::setprecision(1) << rec.wall_seconds;
      log << "  " << ps.name << (ps.adaptive ? " [adaptive]" : "") << ": " << secs.str() << " s\n";
    }
    for (int i = 0; i < rec.elements; ++i) {
      log << "    P" << (i + 1) << " slope " << fmt_slope(rec.slopes[static_cast<std::size_t>(i)]);
      if (!rec.condition_counts.empty()) {
        const auto& cc = rec.condition_counts[static_cast<std::size_t>(i)];
        const int total = static_cast<int>(grid.size()) * reps;
        log << "  (c1 " << cc[0] << "/" << total << ", c2 " << cc[1] << "/" << total << ", c3 " << cc[2] << "/" << total << ")";
      }
      log << '\n';
    }
    if (opt.write_files) {
      const std::string p = path_for("_" + ps.name + ".csv");
      std::ofstream f(p);
      if (robust) {
        f << "# schema=qdt.robustness.v1 seed=" << rec.seed << " stream=" << k << " protocol=" << rec.protocol << " detectors=" << run_cfg.detectors
          << " reps=" << reps << '\n';
        f << "N,detector,element,mean_infidelity,mean_mse\n";
        for (const auto& r : rec.rows) {
          f << r.shots << ',' << r.rep << ',' << (r.element + 1) << ',' << format_double(r.infidelity) << ','
            << format_double(r.mse) << '\n';
        }
      } else {
        write_record_csv(f, rec);
      }
      out.files.push_back(p);
    }
    summary["protocols"][ps.name] = record_json(rec);
    out.records.push_back(std::move(rec));
  }

  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : cfg.checks) {
    CheckResult r;
    r.spec = c;
    const auto it = std::find_if(out.records.begin(), out.records.end(), [&](const ExperimentRecord& x) { return x.protocol == c.protocol; });
    if (it == out.records.end() || c.element >= it->elements) {
      throw Error(ErrorCode::Config, cfg.source + ":" + std::to_string(c.line) + ": check refers to a missing element");
    }
    r.fit = slope_in_window(*it, c.element, c.n_lo, c.n_hi);
    r.skipped = !r.fit;
    r.passed = r.fit && r.fit->slope >= c.lo && r.fit->slope <= c.hi;
    if (!r.skipped && !r.passed) out.checks_passed = false;
    log << "  check " << c.protocol << ".P" << (c.element + 1) << " slope in [" << c.lo << ", " << c.hi << "]: "
        << (r.skipped ? "SKIP (fewer than 3 grid points in window)" : (r.passed ? "PASS" : "FAIL")) << " ("
        << fmt_slope(r.fit) << ")\n";
    nlohmann::json cj = {{"protocol", c.protocol}, {"element", c.element + 1}, {"lo", c.lo}, {"hi", c.hi},
                         {"n_lo", c.n_lo}, {"skipped", r.skipped}, {"passed", r.passed}};
    cj["n_hi"] = std::isfinite(c.n_hi) ? nlohmann::json(c.n_hi) : nlohmann::json(nullptr);
    cj["slope"] = r.fit ? nlohmann::json(r.fit->slope) : nlohmann::json(nullptr);
    checks.push_back(cj);
    out.checks.push_back(r);
  }
  summary["checks"] = checks;
  summary["checks_passed"] = out.checks_passed;

  if (opt.write_files) {
    const std::string p = path_for("_summary.json");
    std::ofstream f(p);
    f << summary.dump(2) << '\n';
    out.files.push_back(p);
    for (const auto& f2 : out.files) log << "  wrote " << f2 << '\n';
  }
  return out;
}

SlopeSummary summarize_rows(const std::vector<ExperimentRow>& rows) {
  SlopeSummary s;
  std::map<std::uint64_t, std::map<int, std::vector<double>>> by;
  int elements = 0;
  for (const auto& r : rows) {
    by[r.shots][r.element].push_back(r.infidelity);
    elements = std::max(elements, r.element + 1);
  }
  s.mean.assign(static_cast<std::size_t>(elements), {});
  s.stddev = s.mean;
  for (const auto& [n, per] : by) {
    s.n_grid.push_back(n);
    for (int i = 0; i < elements; ++i) {
      const auto it = per.find(i);
      const std::vector<double> v = it == per.end() ? std::vector<double>{} : it->second;
      s.mean[static_cast<std::size_t>(i)].push_back(mean(v));
      s.stddev[static_cast<std::size_t>(i)].push_back(stddev(v));
    }
  }
  for (int i = 0; i < elements; ++i) {
    std::vector<std::pair<double, double>> pts;
    bool ok = s.n_grid.size() >= 3;
    for (std::size_t g = 0; g < s.n_grid.size(); ++g) {
      const double m = s.mean[static_cast<std::size_t>(i)][g];
      ok = ok && m > 0;
      pts.emplace_back(static_cast<double>(s.n_grid[g]), m);
    }
    s.slopes.push_back(ok ? std::optional<SlopeFit>(fit_slope(pts)) : std::nullopt);
  }
  return s;
}

void write_plot_data(std::ostream& os, const SlopeSummary& s, const std::string& title) {
  os << "# " << title << '\n';
  os << "# N";
  for (std::size_t i = 0; i < s.mean.size(); ++i) os << " mean_P" << (i + 1) << " std_P" << (i + 1);
  os << '\n';
  for (std::size_t g = 0; g < s.n_grid.size(); ++g) {
    os << s.n_grid[g];
    for (std::size_t i = 0; i < s.mean.size(); ++i) os << ' ' << format_double(s.mean[i][g]) << ' ' << format_double(s.stddev[i][g]);
    os << '\n';
  }
}

}  // namespace qdt
