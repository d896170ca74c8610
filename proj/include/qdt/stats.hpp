#pragma once

#include <utility>
#include <vector>

namespace qdt {

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
};

/// Ordinary least squares of log10(value) on log10(N). Needs at least three
/// points, all N and values strictly positive.
SlopeFit fit_slope(const std::vector<std::pair<double, double>>& points);

double mean(const std::vector<double>& v);
/// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double stddev(const std::vector<double>& v);

}  // namespace qdt
