#include <cmath>
#include <numbers>

#include "doctest.h"
#include "generators.hpp"
#include "reslab/errors.hpp"
#include "reslab/power_series.hpp"

using namespace reslab;

namespace {

double max_diff(const PowerSeries& a, const PowerSeries& b) {
  double d = 0.0;
  for (std::size_t n = 0; n <= std::min(a.order(), b.order()); ++n) d = std::max(d, std::abs(a[n] - b[n]));
  return d;
}

TraceSequence constant_traces(std::size_t N, std::function<cplx(std::size_t)> f) {
  std::vector<cplx> v(N);
  for (std::size_t n = 1; n <= N; ++n) v[n - 1] = f(n);
  return TraceSequence(v);
}

}  // namespace

TEST_CASE("power series rejects non-finite coefficients") {
  CHECK_THROWS_AS(PowerSeries(std::vector<cplx>{1.0, cplx(NAN, 0.0)}), DomainError);
  CHECK(PowerSeries(4).coeffs().size() == 5);
}

TEST_CASE("det_from_traces closed forms") {
  SUBCASE("a_n = 2^n gives 1 - 2z") {
    auto d = det_from_traces(constant_traces(8, [](std::size_t n) { return std::pow(2.0, double(n)); }), 8);
    CHECK(std::abs(d[0] - 1.0) == 0.0);
    CHECK(std::abs(d[1] + 2.0) < 1e-14);
    for (std::size_t n = 2; n <= 8; ++n) CHECK(std::abs(d[n]) < 1e-12);
  }
  SUBCASE("a_1 = -i pi gives exp(i pi z)") {
    const cplx ipi(0.0, std::numbers::pi);
    auto d = det_from_traces(constant_traces(15, [&](std::size_t n) { return n == 1 ? -ipi : cplx(0.0); }), 15);
    cplx t = 1.0;
    for (std::size_t n = 0; n <= 15; ++n) {
      CHECK(std::abs(d[n] - t) < 1e-14);
      t *= ipi / double(n + 1);
    }
  }
  SUBCASE("a_n = 1 gives 1 - z") {
    auto d = det_from_traces(constant_traces(10, [](std::size_t) { return cplx(1.0); }), 10);
    CHECK(std::abs(d[1] + 1.0) < 1e-15);
    for (std::size_t n = 2; n <= 10; ++n) CHECK(std::abs(d[n]) < 1e-15);
  }
  SUBCASE("insufficient traces") {
    CHECK_THROWS_AS(det_from_traces(constant_traces(3, [](std::size_t) { return cplx(1.0); }), 4),
                    InsufficientDataError);
  }
}

TEST_CASE("traces_from_det closed forms") {
  auto t = traces_from_det(PowerSeries(std::vector<cplx>{1.0, -2.0}));
  CHECK(t.size() == 1);
  CHECK(std::abs(t.a(1) - 2.0) < 1e-15);

  auto pad = PowerSeries(std::vector<cplx>{1.0, -2.0}).resized(10);
  auto tp = traces_from_det(pad);
  for (std::size_t n = 1; n <= 10; ++n) CHECK(std::abs(tp.a(n) - std::pow(2.0, double(n))) < 1e-12 * std::pow(2.0, double(n)));

  // Lucas numbers: power sums of the inverse zeros of 1 - z - z².
  auto lucas = traces_from_det(PowerSeries(std::vector<cplx>{1.0, -1.0, -1.0}).resized(12));
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0, psi = (1.0 - std::sqrt(5.0)) / 2.0;
  for (std::size_t n = 1; n <= 12; ++n) {
    const double L = std::pow(phi, double(n)) + std::pow(psi, double(n));
    CHECK(std::abs(lucas.a(n) - L) < 1e-12 * L);
  }
  CHECK(std::abs(lucas.a(1) - 1.0) < 1e-15);
  CHECK(std::abs(lucas.a(2) - 3.0) < 1e-14);

  CHECK_THROWS_AS(traces_from_det(PowerSeries(std::vector<cplx>{2.0, 1.0})), NormalizationError);
}

TEST_CASE("property: roundtrip of the exp/log recursion") {
  gen::Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t N = static_cast<std::size_t>(rng.integer(1, 20));
    PowerSeries s = gen::normalised_series(rng, N);
    PowerSeries back = det_from_traces(traces_from_det(s), N);
    CHECK(max_diff(s, back) < 1e-12);
  }
}

TEST_CASE("property: traces are additive under multiplication") {
  gen::Rng rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t N = static_cast<std::size_t>(rng.integer(2, 16));
    PowerSeries f = gen::normalised_series(rng, N, 0.7), g = gen::normalised_series(rng, N, 0.7);
    TraceSequence tf = traces_from_det(f), tg = traces_from_det(g), tfg = traces_from_det(multiply(f, g, N));
    for (std::size_t n = 1; n <= N; ++n) {
      const double scale = std::max({1.0, std::abs(tf.a(n)), std::abs(tg.a(n))});
      CHECK(std::abs(tfg.a(n) - tf.a(n) - tg.a(n)) < 1e-10 * scale);
    }
  }
}

TEST_CASE("property: explicit zeros reproduce the expanded product") {
  gen::Rng rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const int count = rng.integer(1, 10);
    std::vector<cplx> zeros;
    for (int j = 0; j < count; ++j) zeros.push_back(std::polar(rng.uniform(0.1, 3.0), rng.uniform(0.0, 6.2831853)));
    const std::size_t N = static_cast<std::size_t>(count);
    PowerSeries expanded = PowerSeries::one(N);
    for (cplx z : zeros) expanded = multiply(expanded, PowerSeries(std::vector<cplx>{1.0, -1.0 / z}), N);
    std::vector<cplx> a(N);
    for (std::size_t n = 1; n <= N; ++n)
      for (cplx z : zeros) a[n - 1] += std::pow(z, -double(n));
    PowerSeries d = det_from_traces(TraceSequence(a), N);
    // First-order sensitivity of b_n to relative perturbations of the a_k.
    for (std::size_t n = 1; n <= N; ++n) {
      double cond = std::abs(expanded[n]);
      for (std::size_t k = 1; k <= n; ++k) cond += std::abs(a[k - 1]) * std::abs(expanded[n - k]) / double(k);
      CHECK(std::abs(d[n] - expanded[n]) < 1e-12 * cond);
    }
  }
}

TEST_CASE("scaled_power_product") {
  const PowerSeries f(std::vector<cplx>{1.0, -2.0});
  SUBCASE("square") {
    auto p = scaled_power_product(f.resized(2), {1.0}, {2}, 2);
    CHECK(std::abs(p[1] + 4.0) < 1e-15);
    CHECK(std::abs(p[2] - 4.0) < 1e-15);
  }
  SUBCASE("simple rescale") {
    auto p = scaled_power_product(PowerSeries(std::vector<cplx>{1.0, -1.0}).resized(3), {0.5}, {1}, 3);
    CHECK(std::abs(p[1] + 0.5) < 1e-16);
    CHECK(std::abs(p[2]) == 0.0);
  }
  SUBCASE("shell product first coefficient tends to -32/81") {
    double prev_err = 1.0;
    for (unsigned K : {2u, 5u, 10u, 20u}) {
      std::vector<double> c;
      std::vector<std::uint64_t> m;
      for (unsigned k = 0; k <= K; ++k) {
        c.push_back(std::pow(4.0, -double(k + 2)));
        m.push_back(std::uint64_t(k + 1) * (k + 2) * (k + 3) / 6);
      }
      auto p = scaled_power_product(f.resized(3), c, m, 3);
      const double err = std::abs(p[1] + 32.0 / 81.0);
      CHECK(err < prev_err);
      prev_err = err;
    }
    CHECK(prev_err < 1e-9);
  }
  SUBCASE("direct and trace routes agree") {
    gen::Rng rng(14);
    for (int trial = 0; trial < 30; ++trial) {
      PowerSeries g = gen::normalised_series(rng, 10, 0.5);
      std::vector<double> c{0.5, 0.25, 0.1};
      std::vector<std::uint64_t> m{1, 3, 2};
      CHECK(max_diff(scaled_power_product(g, c, m, 10), scaled_power_product_log(g, c, m, 10)) < 1e-12);
    }
  }
  SUBCASE("domain errors") {
    CHECK_THROWS_AS(scaled_power_product(f, {0.0}, {1}, 1), DomainError);
    CHECK_THROWS_AS(scaled_power_product(f, {-1.0}, {1}, 1), DomainError);
    CHECK_THROWS_AS(scaled_power_product(f, {0.5}, {1, 2}, 1), DomainError);
  }
}

TEST_CASE("compensated convolution matches plain convolution") {
  gen::Rng rng(15);
  PowerSeries f = gen::normalised_series(rng, 30), g = gen::normalised_series(rng, 30);
  CHECK(max_diff(multiply(f, g, 30), multiply(f, g, 30, {true})) < 1e-13);
}

TEST_CASE("running error bound covers the evaluation error") {
  PowerSeries p(std::vector<cplx>{1.0, -3.0, 3.0, -1.0});
  double err = 0.0;
  const cplx v = p.evaluate(cplx(1.0 + 1e-5, 0.0), err);
  CHECK(std::abs(v - std::pow(-1e-5, 3.0)) <= err + 1e-30);
}
