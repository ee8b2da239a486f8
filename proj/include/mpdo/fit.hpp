#pragma once

#include <vector>

namespace mpdo {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  int points = 0;
};

/// Least squares y = slope·x + intercept.
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

/// Fit of log₂ y against x; points with y < floor are dropped.
LinearFit log2_fit(const std::vector<double>& x, const std::vector<double>& y, double floor = 1e-12);

} // namespace mpdo
