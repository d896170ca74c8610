#include "qdt/adaptive.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace qdt {

namespace {

void require_unitary(const CMatrix& u, const char* who) {
  if (u.rows() != u.cols() || (u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff() > 1e-9) {
    throw Error(ErrorCode::InvalidArgument, std::string(who) + ": matrix is not unitary");
  }
}

int matrix_rank(const RMatrix& m) {
  if (m.cols() == 0 || m.rows() == 0) return 0;
  Eigen::JacobiSVD<RMatrix> svd(m);
  const RVector& s = svd.singularValues();
  int r = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k)
    if (s(k) > tol::kRank * std::max(1.0, s(0))) ++r;
  return r;
}

}  // namespace

ProbeSet rotate_probe_set(const ProbeSet& base, int anchor, const CMatrix& u) {
  if (anchor < 0 || static_cast<std::size_t>(anchor) >= base.size()) {
    throw Error(ErrorCode::InvalidArgument, "rotate_probe_set: anchor index out of range");
  }
  require_unitary(u, "rotate_probe_set");
  if (u.rows() != base.dim()) throw Error(ErrorCode::InvalidDimension, "rotate_probe_set: dimension mismatch");
  const CMatrix va = spectral_decomp(base[static_cast<std::size_t>(anchor)].op()).vectors;
  const CMatrix w = u * va.adjoint();
  std::vector<DensityMatrix> states;
  std::vector<std::string> labels;
  for (std::size_t j = 0; j < base.size(); ++j) {
    const CMatrix r = w * base[j].matrix() * w.adjoint();
    states.emplace_back(HermitianOp(0.5 * (r + r.adjoint())));
    labels.push_back("rot:" + base.labels()[j]);
  }
  return ProbeSet(std::move(states), labels);
}

ProbeSet adaptive_gpb(const CMatrix& u) {
  require_unitary(u, "adaptive_gpb");
  return gpb_states(u);
}

Conditions check_conditions(const ProbeSet& step2_set, const CMatrix& u, int r, const std::optional<ProbeSet>& step1_set) {
  const int d = step2_set.dim();
  if (u.rows() != d || u.cols() != d) throw Error(ErrorCode::InvalidDimension, "check_conditions: eigenvector matrix shape");
  if (r < 0 || r > d) throw Error(ErrorCode::InvalidArgument, "check_conditions: rank out of range");
  const OrthonormalBasis basis = gell_mann_basis(d);
  const int d2 = d * d;

  Conditions c;
  const RMatrix x2 = design_matrix(step2_set, basis);
  c.c2 = matrix_rank(x2) == d2;
  c.c1 = step1_set ? matrix_rank(design_matrix(*step1_set, basis)) == d2 : c.c2;

  // orthonormal null-basis operators, parameterized
  const int k = d - r;
  if (k == 0) {
    c.c3 = true;
    return c;
  }
  std::vector<RVector> null_ops;
  const double h = 1.0 / std::sqrt(2.0);
  const Complex I(0.0, 1.0);
  for (int a = r; a < d; ++a) {
    null_ops.push_back(parameterize(HermitianOp::projector(u.col(a)), basis).coeffs);
    for (int b = a + 1; b < d; ++b) {
      const CMatrix ab = u.col(a) * u.col(b).adjoint();
      null_ops.push_back(parameterize(HermitianOp(h * (ab + ab.adjoint())), basis).coeffs);
      null_ops.push_back(parameterize(HermitianOp(h * (-I * ab + I * ab.adjoint())), basis).coeffs);
    }
  }
  RMatrix q(d2, static_cast<Eigen::Index>(null_ops.size()));
  for (std::size_t t = 0; t < null_ops.size(); ++t) q.col(static_cast<Eigen::Index>(t)) = null_ops[t];

  std::vector<RVector> inside;
  for (Eigen::Index j = 0; j < x2.rows(); ++j) {
    const RVector v = x2.row(j).transpose();
    const RVector resid = v - q * (q.transpose() * v);
    if (resid.norm() < 1e-9) inside.push_back(v);
  }
  RMatrix sub(d2, static_cast<Eigen::Index>(inside.size()));
  for (std::size_t t = 0; t < inside.size(); ++t) sub.col(static_cast<Eigen::Index>(t)) = inside[t];
  c.c3 = matrix_rank(sub) == k * k;
  return c;
}

int estimated_rank(const HermitianOp& p) {
  const RVector ev = spectral_decomp(p).values;
  int r = 0;
  for (Eigen::Index k = 0; k < ev.size(); ++k)
    if (ev(k) > 1e-3 * ev(0)) ++r;
  return r;
}

AdaptivePlan make_plan(ProbeSet step1, Step2Family family, std::uint64_t shots, ProbeSet rotated_base, int anchor) {
  AdaptivePlan p;
  p.step1_set = std::move(step1);
  p.family = family;
  p.rotated_base = std::move(rotated_base);
  p.anchor = anchor;
  p.shots = shots;
  p.step1_shots = shots / 2;
  return p;
}

namespace {

std::vector<double> infidelities(const Povm& est, const Povm& truth) {
  std::vector<double> out;
  for (std::size_t i = 0; i < truth.size(); ++i) out.push_back(1.0 - detector_fidelity_f(est[i], truth[i]));
  return out;
}

std::vector<double> element_mse(const Povm& est, const Povm& truth) {
  std::vector<double> out;
  for (std::size_t i = 0; i < truth.size(); ++i) out.push_back((est[i].matrix() - truth[i].matrix()).squaredNorm());
  return out;
}

// Streams inside a repetition: 1 = Step-1 sampling, 2 = Step-2 sampling,
// 3 = Step-2 set construction.
constexpr std::uint64_t kStep1Stream = 1, kStep2Stream = 2, kBuildStream = 3;

}  // namespace

AdaptiveResult run_two_step(const Povm& truth, const AdaptivePlan& plan, Rng& rng) {
  if (!(plan.step1_shots > 0 && plan.step1_shots < plan.shots)) {
    throw Error(ErrorCode::InvalidArgument, "run_two_step: need 0 < N0 < N");
  }
  const int n = static_cast<int>(truth.size());
  AdaptiveResult res;
  res.seed = rng.seed();
  res.stream = rng.stream();

  const MeasurementPlan p1(plan.step1_set, plan.step1_shots);
  const FrequencyData f1 = sample_frequencies(truth, p1, rng.split(kStep1Stream));
  res.step1 = reconstruct(f1, plan.step1_set, n).povm;

  Rng build = rng.split(kBuildStream);
  ProbeSet pool;
  std::vector<ProbeSet> parts;
  std::vector<CMatrix> eig;
  for (int i = 0; i < n; ++i) {
    eig.push_back(spectral_decomp(res.step1[static_cast<std::size_t>(i)]).vectors);
    ProbeSet adapted;
    switch (plan.family) {
      case Step2Family::Rotated:
        // Ascending order: the anchor's leading eigenvector lands on the
        // estimated smallest-eigenvalue direction.
        adapted = rotate_probe_set(plan.rotated_base, plan.anchor, eig.back().rowwise().reverse());
        break;
      case Step2Family::Gpb:
        adapted = adaptive_gpb(eig.back());
        break;
      case Step2Family::Custom:
        if (!plan.custom) throw Error(ErrorCode::InvalidArgument, "run_two_step: custom family without builder");
        adapted = plan.custom(eig.back(), build);
        break;
    }
    pool.append(adapted);
    parts.push_back(std::move(adapted));
  }
  res.step2_pool_size = pool.size();

  const MeasurementPlan p2(pool, plan.shots - plan.step1_shots);
  const FrequencyData f2 = sample_frequencies(truth, p2, rng.split(kStep2Stream));
  if (plan.estimator == Step2Estimator::Joint) {
    res.step2 = reconstruct(f2, pool, n).povm;
  } else {
    // Element i from its own adapted block only, then one joint Stage-2 pass.
    // Blocks that are not informationally complete (possible for
    // approximate probes) or a singular merged sum fall back to the joint fit.
    bool local = true;
    for (const auto& part : parts) local = local && design_report(part).complete;
    if (local) {
      std::vector<HermitianOp> fitted;
      Eigen::Index offset = 0;
      for (int i = 0; i < n; ++i) {
        const ProbeSet& part = parts[static_cast<std::size_t>(i)];
        const auto m = static_cast<Eigen::Index>(part.size());
        FrequencyData sub = f2;
        sub.freqs = f2.freqs.middleCols(offset, m);
        sub.shots.assign(f2.shots.begin() + offset, f2.shots.begin() + offset + m);
        fitted.push_back(stage1_cls(sub, part, n).elements[static_cast<std::size_t>(i)]);
        offset += m;
      }
      try {
        res.step2 = stage2_merge(fitted).povm;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::SingularDesign) throw;
        local = false;
      }
    }
    if (!local) res.step2 = reconstruct(f2, pool, n).povm;
    res.step2_per_element = local;
  }
  res.shots_used = p1.total_shots + p2.total_shots;

  res.infidelity = infidelities(res.step2, truth);
  res.step1_infidelity = infidelities(res.step1, truth);
  res.mse = element_mse(res.step2, truth);
  for (int i = 0; i < n; ++i) {
    const int r = estimated_rank(res.step1[static_cast<std::size_t>(i)]);
    res.conditions.push_back(check_conditions(pool, eig[static_cast<std::size_t>(i)], r, plan.step1_set));
  }
  return res;
}

AdaptiveResult run_two_step(const Povm& truth, const AdaptivePlan& plan, std::uint64_t seed) {
  Rng rng(seed);
  return run_two_step(truth, plan, rng);
}

AdaptiveResult run_nonadaptive(const Povm& truth, const ProbeSet& set, std::uint64_t shots, Rng& rng) {
  const int n = static_cast<int>(truth.size());
  AdaptiveResult res;
  res.seed = rng.seed();
  res.stream = rng.stream();
  const MeasurementPlan p(set, shots);
  const FrequencyData f = sample_frequencies(truth, p, rng.split(kStep1Stream));
  res.step1 = reconstruct(f, set, n).povm;
  res.step2 = res.step1;
  res.shots_used = p.total_shots;
  res.infidelity = infidelities(res.step2, truth);
  res.step1_infidelity = res.infidelity;
  res.mse = element_mse(res.step2, truth);
  return res;
}

ExperimentRecord scaling_experiment(const Povm& truth, const Protocol& protocol, const std::vector<std::uint64_t>& n_grid,
                                    int reps, std::uint64_t seed, int workers) {
  if (n_grid.empty() || !std::is_sorted(n_grid.begin(), n_grid.end())) {
    throw Error(ErrorCode::InvalidArgument, "scaling_experiment: N grid must be non-empty and ascending");
  }
  if (reps < 1) throw Error(ErrorCode::InvalidArgument, "scaling_experiment: reps must be >= 1");
  if (!protocol.step1) throw Error(ErrorCode::InvalidArgument, "scaling_experiment: protocol without probe set");
  const auto t0 = std::chrono::steady_clock::now();
  const int n = static_cast<int>(truth.size());
  const std::size_t tasks = n_grid.size() * static_cast<std::size_t>(reps);

  std::vector<std::vector<double>> infid(tasks), errs(tasks);
  std::vector<std::vector<Conditions>> conds(tasks);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto work = [&]() {
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= tasks) return;
      const std::size_t g = t / static_cast<std::size_t>(reps);
      const std::size_t r = t % static_cast<std::size_t>(reps);
      try {
        Rng rng(seed, stream_id(g, r));
        Rng set_rng = rng.split(0);
        const ProbeSet step1 = protocol.step1(set_rng);
        AdaptiveResult res;
        if (protocol.adaptive) {
          AdaptivePlan plan;
          plan.step1_set = step1;
          plan.family = protocol.family;
          plan.rotated_base = protocol.rotated_base;
          plan.anchor = protocol.anchor;
          plan.custom = protocol.custom;
          plan.estimator = protocol.estimator;
          plan.shots = n_grid[g];
          plan.step1_shots = static_cast<std::uint64_t>(std::floor(protocol.step1_fraction * static_cast<double>(n_grid[g])));
          res = run_two_step(truth, plan, rng);
        } else {
          res = run_nonadaptive(truth, step1, n_grid[g], rng);
        }
        infid[t] = res.infidelity;
        errs[t] = res.mse;
        conds[t] = res.conditions;
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(tasks);
        return;
      }
    }
  };

  const int pool = std::max(1, std::min<int>(workers, static_cast<int>(tasks)));
  if (pool == 1) {
    work();
  } else {
    std::vector<std::thread> threads;
    for (int w = 0; w < pool; ++w) threads.emplace_back(work);
    for (auto& th : threads) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  ExperimentRecord rec;
  rec.protocol = protocol.name;
  rec.seed = seed;
  rec.n_grid = n_grid;
  rec.reps = reps;
  rec.elements = n;
  rec.mean.assign(static_cast<std::size_t>(n), std::vector<double>(n_grid.size()));
  rec.stddev = rec.mean;
  for (std::size_t g = 0; g < n_grid.size(); ++g) {
    for (int r = 0; r < reps; ++r) {
      const std::size_t t = g * static_cast<std::size_t>(reps) + static_cast<std::size_t>(r);
      for (int i = 0; i < n; ++i) {
        rec.rows.push_back({n_grid[g], r, i, infid[t][static_cast<std::size_t>(i)], errs[t][static_cast<std::size_t>(i)]});
      }
    }
    for (int i = 0; i < n; ++i) {
      std::vector<double> v;
      for (int r = 0; r < reps; ++r) v.push_back(infid[g * static_cast<std::size_t>(reps) + static_cast<std::size_t>(r)][static_cast<std::size_t>(i)]);
      rec.mean[static_cast<std::size_t>(i)][g] = mean(v);
      rec.stddev[static_cast<std::size_t>(i)][g] = stddev(v);
    }
  }
  if (protocol.adaptive) {
    rec.condition_counts.assign(static_cast<std::size_t>(n), {0, 0, 0});
    for (const auto& cs : conds) {
      for (std::size_t i = 0; i < cs.size(); ++i) {
        rec.condition_counts[i][0] += cs[i].c1;
        rec.condition_counts[i][1] += cs[i].c2;
        rec.condition_counts[i][2] += cs[i].c3;
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    rec.slopes.push_back(n_grid.size() >= 3 ? slope_in_window(rec, i, 0.0, INFINITY) : std::nullopt);
  }
  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

std::optional<SlopeFit> slope_in_window(const ExperimentRecord& rec, int element, double lo, double hi) {
  std::vector<std::pair<double, double>> pts;
  for (std::size_t g = 0; g < rec.n_grid.size(); ++g) {
    const double nn = static_cast<double>(rec.n_grid[g]);
    if (nn < lo || nn > hi) continue;
    const double m = rec.mean[static_cast<std::size_t>(element)][g];
    if (!(m > 0)) return std::nullopt;
    pts.emplace_back(nn, m);
  }
  if (pts.size() < 3) return std::nullopt;
  return fit_slope(pts);
}

}  // namespace qdt
