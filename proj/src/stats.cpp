#include "qdt/stats.hpp"

#include <cmath>

#include "qdt/types.hpp"

namespace qdt {

SlopeFit fit_slope(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) throw Error(ErrorCode::InvalidArgument, "fit_slope: need at least 3 points");
  const auto k = static_cast<double>(points.size());
  double sx = 0, sy = 0;
  std::vector<double> xs, ys;
  for (const auto& [n, v] : points) {
    if (!(n > 0) || !(v > 0)) throw Error(ErrorCode::InvalidArgument, "fit_slope: N and values must be positive");
    xs.push_back(std::log10(n));
    ys.push_back(std::log10(v));
    sx += xs.back();
    sy += ys.back();
  }
  const double mx = sx / k, my = sy / k;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx <= 0) throw Error(ErrorCode::InvalidArgument, "fit_slope: all N values are equal");
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - fit.intercept - fit.slope * xs[i];
    sse += r * r;
  }
  fit.stderr_slope = std::sqrt(sse / (k - 2.0) / sxx);
  return fit;
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double stddev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace qdt
