#include "reslab/power_series.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "reslab/errors.hpp"

namespace reslab {

namespace {

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// Neumaier-compensated accumulation of complex terms.
struct CompensatedSum {
  cplx sum{0.0, 0.0};
  cplx carry{0.0, 0.0};

  static void step(double& s, double& c, double x) {
    double t = s + x;
    if (std::abs(s) >= std::abs(x)) {
      c += (s - t) + x;
    } else {
      c += (x - t) + s;
    }
    s = t;
  }

  void add(cplx x) {
    double sr = sum.real(), si = sum.imag(), cr = carry.real(), ci = carry.imag();
    step(sr, cr, x.real());
    step(si, ci, x.imag());
    sum = {sr, si};
    carry = {cr, ci};
  }

  cplx value() const { return sum + carry; }
};

}  // namespace

PowerSeries::PowerSeries(std::size_t order) : coeffs_(order + 1, cplx(0.0, 0.0)) {}

PowerSeries::PowerSeries(std::vector<cplx> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) throw DomainError("power series needs at least one coefficient");
  for (std::size_t n = 0; n < coeffs_.size(); ++n) {
    if (!finite(coeffs_[n]))
      throw DomainError("non-finite coefficient at index " + std::to_string(n));
  }
}

PowerSeries PowerSeries::one(std::size_t order) {
  PowerSeries s(order);
  s.coeffs_[0] = 1.0;
  return s;
}

cplx PowerSeries::evaluate(cplx z) const {
  cplx p = coeffs_.back();
  for (std::size_t i = coeffs_.size() - 1; i-- > 0;) p = p * z + coeffs_[i];
  return p;
}

cplx PowerSeries::evaluate(cplx z, double& error_bound) const {
  const double az = std::abs(z);
  cplx p = coeffs_.back();
  double mu = 0.5 * std::abs(p);
  for (std::size_t i = coeffs_.size() - 1; i-- > 0;) {
    p = p * z + coeffs_[i];
    mu = mu * az + std::abs(p);
  }
  const double u = std::numeric_limits<double>::epsilon() / 2.0;
  error_bound = 8.0 * u * (2.0 * mu - std::abs(p)) + u * std::abs(p);
  return p;
}

double PowerSeries::abs_sum(double r) const {
  double s = 0.0;
  for (std::size_t i = coeffs_.size(); i-- > 0;) s = s * r + std::abs(coeffs_[i]);
  return s;
}

PowerSeries PowerSeries::derivative() const {
  if (coeffs_.size() == 1) return PowerSeries(0);
  PowerSeries d(order() - 1);
  for (std::size_t n = 1; n < coeffs_.size(); ++n) d.coeffs_[n - 1] = static_cast<double>(n) * coeffs_[n];
  return d;
}

PowerSeries PowerSeries::resized(std::size_t order) const {
  PowerSeries r(order);
  for (std::size_t n = 0; n <= order && n < coeffs_.size(); ++n) r.coeffs_[n] = coeffs_[n];
  return r;
}

std::size_t PowerSeries::effective_degree() const {
  std::size_t d = coeffs_.size() - 1;
  while (d > 0 && coeffs_[d] == cplx(0.0, 0.0)) --d;
  return d;
}

TraceSequence::TraceSequence(std::vector<cplx> v)
    : values(std::move(v)), tail_bounds(values.size(), 0.0) {}

TraceSequence::TraceSequence(std::vector<cplx> v, std::vector<double> bounds)
    : values(std::move(v)), tail_bounds(std::move(bounds)) {
  validate();
}

void TraceSequence::validate() const {
  if (values.size() != tail_bounds.size())
    throw DomainError("trace values and tail bounds differ in length");
  for (double b : tail_bounds) {
    if (!(b >= 0.0)) throw DomainError("negative or NaN trace tail bound");
  }
}

PowerSeries multiply(const PowerSeries& f, const PowerSeries& g, std::size_t order,
                     MultiplyOptions options) {
  PowerSeries h(order);
  const std::size_t nf = f.order(), ng = g.order();
  for (std::size_t n = 0; n <= order; ++n) {
    const std::size_t lo = n > ng ? n - ng : 0;
    const std::size_t hi = std::min(n, nf);
    if (options.compensated) {
      CompensatedSum acc;
      for (std::size_t k = lo; k <= hi; ++k) acc.add(f[k] * g[n - k]);
      h[n] = acc.value();
    } else {
      cplx acc(0.0, 0.0);
      for (std::size_t k = lo; k <= hi; ++k) acc += f[k] * g[n - k];
      h[n] = acc;
    }
  }
  return h;
}

PowerSeries scale_argument(const PowerSeries& f, cplx c) {
  PowerSeries s(f.order());
  cplx cn(1.0, 0.0);
  for (std::size_t n = 0; n <= f.order(); ++n) {
    s[n] = f[n] * cn;
    cn *= c;
  }
  return s;
}

PowerSeries power(const PowerSeries& f, std::uint64_t m, std::size_t order) {
  PowerSeries result = PowerSeries::one(order);
  PowerSeries base = f.resized(order);
  while (m > 0) {
    if (m & 1U) result = multiply(result, base, order);
    m >>= 1U;
    if (m > 0) base = multiply(base, base, order);
  }
  return result;
}

PowerSeries series_exp(const PowerSeries& g, std::size_t order) {
  if (std::abs(g[0]) != 0.0) throw DomainError("series_exp expects a vanishing constant term");
  PowerSeries e(order);
  e[0] = 1.0;
  const std::size_t ng = g.order();
  for (std::size_t n = 1; n <= order; ++n) {
    cplx acc(0.0, 0.0);
    for (std::size_t k = 1; k <= std::min(n, ng); ++k) acc += static_cast<double>(k) * g[k] * e[n - k];
    e[n] = acc / static_cast<double>(n);
  }
  return e;
}

PowerSeries divide_one_minus_z(const PowerSeries& g) {
  PowerSeries q(g.order());
  cplx acc(0.0, 0.0);
  for (std::size_t n = 0; n <= g.order(); ++n) {
    acc += g[n];
    q[n] = acc;
  }
  return q;
}

PowerSeries det_from_traces(const TraceSequence& traces, std::size_t order) {
  traces.validate();
  if (traces.size() < order)
    throw InsufficientDataError("determinant of degree " + std::to_string(order) + " needs " +
                                std::to_string(order) + " traces, got " +
                                std::to_string(traces.size()));
  PowerSeries b(order);
  b[0] = 1.0;
  for (std::size_t n = 1; n <= order; ++n) {
    cplx acc(0.0, 0.0);
    for (std::size_t k = 1; k <= n; ++k) acc += traces.values[k - 1] * b[n - k];
    b[n] = -acc / static_cast<double>(n);
  }
  return b;
}

TraceSequence traces_from_det(const PowerSeries& series) {
  if (series[0] != cplx(1.0, 0.0))
    throw NormalizationError("determinant series must have b_0 = 1");
  const std::size_t order = series.order();
  std::vector<cplx> a(order);
  std::vector<double> err(order);
  const double u = std::numeric_limits<double>::epsilon();
  for (std::size_t n = 1; n <= order; ++n) {
    cplx acc = -static_cast<double>(n) * series[n];
    // Rounding in this step, a unit input perturbation of b_n, and inherited errors.
    double mag = static_cast<double>(n) * std::abs(series[n]);
    double inherited = 0.0;
    for (std::size_t k = 1; k < n; ++k) {
      acc -= a[k - 1] * series[n - k];
      mag += std::abs(a[k - 1]) * std::abs(series[n - k]);
      inherited += err[k - 1] * std::abs(series[n - k]);
    }
    a[n - 1] = acc;
    err[n - 1] = 4.0 * static_cast<double>(n + 2) * u * mag + inherited;
  }
  return TraceSequence(std::move(a), std::move(err));
}

namespace {

void check_product_inputs(const PowerSeries& f, const std::vector<double>& scales,
                          const std::vector<std::uint64_t>& exponents) {
  if (f[0] != cplx(1.0, 0.0)) throw NormalizationError("factor series must have b_0 = 1");
  if (scales.size() != exponents.size())
    throw DomainError("scales and exponents differ in length");
  for (std::size_t k = 0; k < scales.size(); ++k) {
    if (!(scales[k] > 0.0))
      throw DomainError("scale c_" + std::to_string(k) + " must be positive");
    if (exponents[k] == 0)
      throw DomainError("exponent m_" + std::to_string(k) + " must be a positive integer");
  }
}

}  // namespace

PowerSeries scaled_power_product(const PowerSeries& f, const std::vector<double>& scales,
                                 const std::vector<std::uint64_t>& exponents, std::size_t order) {
  check_product_inputs(f, scales, exponents);
  PowerSeries result = PowerSeries::one(order);
  for (std::size_t k = 0; k < scales.size(); ++k) {
    PowerSeries factor = power(scale_argument(f.resized(order), scales[k]), exponents[k], order);
    result = multiply(result, factor, order);
  }
  return result;
}

PowerSeries scaled_power_product_log(const PowerSeries& f, const std::vector<double>& scales,
                                     const std::vector<std::uint64_t>& exponents,
                                     std::size_t order) {
  check_product_inputs(f, scales, exponents);
  TraceSequence a = traces_from_det(f.resized(order));
  for (std::size_t n = 1; n <= order; ++n) {
    double weight = 0.0;
    for (std::size_t k = scales.size(); k-- > 0;)
      weight += static_cast<double>(exponents[k]) * std::pow(scales[k], static_cast<double>(n));
    a.values[n - 1] *= weight;
  }
  return det_from_traces(a, order);
}

}  // namespace reslab
