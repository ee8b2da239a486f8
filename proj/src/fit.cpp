#include "mpdo/fit.hpp"

#include <cmath>
#include <stdexcept>

namespace mpdo {

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("linear_fit: size mismatch");
  LinearFit f;
  f.points = static_cast<int>(x.size());
  if (f.points < 2) return f;
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= f.points;
  my /= f.points;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
    syy += (y[k] - my) * (y[k] - my);
  }
  if (sxx == 0.0) return f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return f;
}

LinearFit log2_fit(const std::vector<double>& x, const std::vector<double>& y, double floor) {
  if (x.size() != y.size()) throw std::invalid_argument("log2_fit: size mismatch");
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < x.size(); ++k)
    if (y[k] >= floor) {
      xs.push_back(x[k]);
      ys.push_back(std::log2(y[k]));
    }
  return linear_fit(xs, ys);
}

} // namespace mpdo
