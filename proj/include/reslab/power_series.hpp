#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace reslab {

using cplx = std::complex<double>;

// Truncated formal power series b_0 + b_1 z + ... + b_N z^N.
class PowerSeries {
 public:
  explicit PowerSeries(std::size_t order);
  explicit PowerSeries(std::vector<cplx> coeffs);

  static PowerSeries one(std::size_t order);

  std::size_t order() const { return coeffs_.size() - 1; }
  const std::vector<cplx>& coeffs() const { return coeffs_; }
  cplx operator[](std::size_t n) const { return coeffs_[n]; }
  cplx& operator[](std::size_t n) { return coeffs_[n]; }

  cplx evaluate(cplx z) const;
  // Horner evaluation together with a running bound on the rounding error.
  cplx evaluate(cplx z, double& error_bound) const;
  // Σ |b_n| r^n.
  double abs_sum(double r) const;
  PowerSeries derivative() const;
  // Truncates or zero-pads to the requested order.
  PowerSeries resized(std::size_t order) const;
  // Index of the last nonzero coefficient (0 if all higher ones vanish).
  std::size_t effective_degree() const;

 private:
  std::vector<cplx> coeffs_;
};

// Flat-trace values a_1..a_N with absolute error bounds.
struct TraceSequence {
  std::vector<cplx> values;
  std::vector<double> tail_bounds;

  TraceSequence() = default;
  explicit TraceSequence(std::vector<cplx> v);
  TraceSequence(std::vector<cplx> v, std::vector<double> bounds);

  std::size_t size() const { return values.size(); }
  // a_n for n >= 1.
  cplx a(std::size_t n) const { return values.at(n - 1); }
  double bound(std::size_t n) const { return tail_bounds.at(n - 1); }
  void validate() const;
};

struct MultiplyOptions {
  bool compensated = false;
};

PowerSeries multiply(const PowerSeries& f, const PowerSeries& g, std::size_t order,
                     MultiplyOptions options = {});
// f(c z).
PowerSeries scale_argument(const PowerSeries& f, cplx c);
// f^m truncated at the given order (binary powering).
PowerSeries power(const PowerSeries& f, std::uint64_t m, std::size_t order);
// exp(g) for a series with g_0 = 0.
PowerSeries series_exp(const PowerSeries& g, std::size_t order);
// g / (1 - z) as a formal series.
PowerSeries divide_one_minus_z(const PowerSeries& g);

PowerSeries det_from_traces(const TraceSequence& traces, std::size_t order);
TraceSequence traces_from_det(const PowerSeries& series);

// Π_k f(c_k z)^{m_k} by direct truncated multiplication.
PowerSeries scaled_power_product(const PowerSeries& f, const std::vector<double>& scales,
                                 const std::vector<std::uint64_t>& exponents, std::size_t order);
// The same product through the trace identity a'_n = a_n Σ_k m_k c_k^n.
PowerSeries scaled_power_product_log(const PowerSeries& f, const std::vector<double>& scales,
                                     const std::vector<std::uint64_t>& exponents,
                                     std::size_t order);

}  // namespace reslab
