#include "reslab/fitting.hpp"

#include <cmath>
#include <limits>

#include <boost/math/tools/minima.hpp>

#include "reslab/errors.hpp"

namespace reslab {

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw DomainError("fit data size mismatch");
  const std::size_t n = x.size();
  if (n < 2) throw InsufficientDataError("linear fit needs at least two points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw DegenerateInputError("linear fit with constant abscissa");
  LinearFit f;
  f.count = n;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

namespace {

struct Residual {
  double sse;
  LinearFit fit;
};

Residual residual_for(const std::vector<double>& x, const std::vector<double>& y, double q) {
  std::vector<double> t(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) t[i] = std::pow(x[i], q);
  LinearFit f = linear_fit(t, y);
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.intercept + f.slope * t[i]);
    sse += r * r;
  }
  return {sse, f};
}

}  // namespace

StretchedFit stretched_fit(const std::vector<double>& x, const std::vector<double>& y, double q_min,
                           double q_max) {
  if (!(q_min > 0.0) || !(q_max > q_min)) throw DomainError("invalid exponent search interval");
  for (double v : x)
    if (!(v > 0.0)) throw DomainError("stretched fit needs positive abscissae");
  const int grid = 200;
  double best_q = q_min, best = std::numeric_limits<double>::infinity();
  const double lq0 = std::log(q_min), lq1 = std::log(q_max);
  for (int i = 0; i <= grid; ++i) {
    const double q = std::exp(lq0 + (lq1 - lq0) * i / grid);
    const double s = residual_for(x, y, q).sse;
    if (s < best) {
      best = s;
      best_q = q;
    }
  }
  const double step = std::exp((lq1 - lq0) / grid);
  const double lo = std::max(q_min, best_q / step), hi = std::min(q_max, best_q * step);
  auto r = boost::math::tools::brent_find_minima(
      [&](double q) { return residual_for(x, y, q).sse; }, lo, hi, 40);
  const Residual res = residual_for(x, y, r.first);
  StretchedFit out;
  out.exponent = r.first;
  out.amplitude = res.fit.intercept;
  out.rate = -res.fit.slope;
  out.r_squared = res.fit.r_squared;
  return out;
}

}  // namespace reslab
