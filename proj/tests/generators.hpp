#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "reslab/power_series.hpp"
#include "reslab/symbolic_shift.hpp"

namespace gen {

using reslab::cplx;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
  cplx in_disc(double radius) {
    const double r = radius * std::sqrt(uniform(0.0, 1.0));
    return std::polar(r, uniform(0.0, 6.283185307179586));
  }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

// Normalised series with b_0 = 1 and |b_n| ≤ bound.
inline reslab::PowerSeries normalised_series(Rng& rng, std::size_t order, double bound = 1.0) {
  reslab::PowerSeries s(order);
  s[0] = 1.0;
  for (std::size_t n = 1; n <= order; ++n) s[n] = rng.in_disc(bound);
  return s;
}

inline reslab::WeightSpec weight(Rng& rng, std::size_t K, double bound = 0.5) {
  std::vector<cplx> a(K + 1);
  for (auto& x : a) x = rng.in_disc(bound);
  return reslab::WeightSpec::from_alpha(a);
}

inline reslab::WeightSpec positive_weight(Rng& rng, std::size_t K) {
  std::vector<cplx> a(K + 1);
  for (auto& x : a) x = rng.uniform(-0.9, 2.0);
  return reslab::WeightSpec::from_alpha(a, true);
}

}  // namespace gen
