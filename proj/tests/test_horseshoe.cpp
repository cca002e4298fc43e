#include <cmath>
#include <numbers>

#include "doctest.h"
#include "generators.hpp"
#include "reslab/errors.hpp"
#include "reslab/horseshoe.hpp"

using namespace reslab;

namespace {

HorseshoeModel model_of(WeightSpec w, unsigned K = 6) {
  HorseshoeModel m;
  m.weight = std::move(w);
  m.product_cutoff = K;
  return m;
}

}  // namespace

TEST_CASE("shell data") {
  CHECK(shell_multiplicity(0) == 1);
  CHECK(shell_multiplicity(1) == 4);
  CHECK(shell_multiplicity(2) == 10);
  CHECK(shell_multiplicity(3) == 20);
  CHECK(shell_scale(0) == 1.0 / 16.0);
  double exact = 0.0;
  for (unsigned k = 6; k < 400; ++k) exact += double(shell_multiplicity(k)) * std::pow(0.3, double(k));
  CHECK(shell_tail_sum(5, 0.3) >= exact * (1.0 - 1e-14));
  CHECK(shell_tail_sum(5, 0.3) <= exact * 1.5);
}

TEST_CASE("determinant weight factor") {
  CHECK(std::abs(det_weight_factor(1) - 16.0 / 81.0) < 1e-16);
  CHECK(std::abs(det_weight_factor(2) - 256.0 / 50625.0) < 1e-18);
  CHECK(std::abs(det_weight_factor_series(1, 30) - det_weight_factor(1)) < 1e-15);
  for (unsigned n = 1; n <= 5; ++n)
    for (unsigned K : {1u, 3u, 8u}) {
      const double rel = std::abs(det_weight_factor_series(n, K) / det_weight_factor(n) - 1.0);
      CHECK(rel <= shell_tail_sum(K, std::pow(4.0, -double(n))) / std::pow(16.0, double(n)) / det_weight_factor(n));
      CHECK(rel <= double(shell_multiplicity(K + 1)) * std::pow(4.0, -double(n * K)));
    }
}

TEST_CASE("horseshoe flat traces") {
  const auto m = model_of(WeightSpec::from_alpha({}));
  CHECK(std::abs(horseshoe_flat_trace(m, 1) - 32.0 / 81.0) < 1e-15);
  CHECK(std::abs(horseshoe_flat_trace(m, 2) - 1024.0 / 50625.0) < 1e-16);
  auto a = traces_from_det(horseshoe_determinant(model_of(WeightSpec::from_alpha({}), 30), 4));
  CHECK(std::abs(a.a(1) - 32.0 / 81.0) < 1e-12);
}

TEST_CASE("determinant product form against brute-force expansion") {
  const auto m = model_of(WeightSpec::from_alpha({}), 3);
  PowerSeries brute = PowerSeries::one(6);
  for (unsigned k = 0; k <= 3; ++k)
    for (std::uint64_t j = 0; j < shell_multiplicity(k); ++j)
      brute = multiply(brute, PowerSeries(std::vector<cplx>{1.0, -2.0 * shell_scale(k)}), 6);
  auto d = horseshoe_determinant(m, 6);
  for (std::size_t n = 0; n <= 6; ++n) CHECK(std::abs(d[n] - brute[n]) < 1e-12 * std::max(1.0, std::abs(brute[n])));
}

TEST_CASE("property: product form equals exp of flat traces") {
  gen::Rng rng(31);
  for (int trial = 0; trial < 8; ++trial) {
    // K = 20 keeps the omitted shells below 1e-10 in every coefficient.
    const auto m = model_of(gen::weight(rng, 12), 20);
    auto product = horseshoe_determinant(m, 12);
    auto traced = det_from_traces(horseshoe_traces(m, 12), 12);
    auto logroute = horseshoe_determinant_log(m, 12);
    for (std::size_t n = 0; n <= 12; ++n) {
      CHECK(std::abs(product[n] - traced[n]) < 1e-9);
      CHECK(std::abs(product[n] - logroute[n]) < 1e-12);
    }
  }
}

TEST_CASE("truncation error when the cutoff is too small") {
  const auto m = model_of(WeightSpec::from_alpha({}), 1);
  CHECK_THROWS_AS(horseshoe_determinant(m, 20, 100.0, 1e-10), TruncationError);
  const unsigned K = default_product_cutoff(m.weight, 100.0, 1e-10);
  CHECK_NOTHROW(horseshoe_determinant(model_of(WeightSpec::from_alpha({}), K), 20, 100.0, 1e-10));
}

TEST_CASE("find_resonances") {
  SUBCASE("single zero") {
    auto rs = find_resonances(PowerSeries(std::vector<cplx>{1.0, -2.0}), 1.0, 1e-12);
    REQUIRE(rs.zeros.size() == 1);
    CHECK(std::abs(rs.zeros[0].z - 0.5) < 1e-15);
    CHECK(rs.zeros[0].multiplicity == 1);
  }
  SUBCASE("horseshoe with zero weight, two shells") {
    auto rs = find_resonances(horseshoe_determinant(model_of(WeightSpec::from_alpha({})), 40), 40.0, 1e-12);
    REQUIRE(rs.zeros.size() == 2);
    CHECK(std::abs(rs.zeros[0].z - 8.0) < 1e-12 * 8.0);
    CHECK(rs.zeros[0].multiplicity == 1);
    CHECK(std::abs(rs.zeros[1].z - 32.0) < 1e-8 * 32.0);
    CHECK(rs.zeros[1].multiplicity == 4);
    CHECK(rs.total_multiplicity() == 5);
    auto lam = rs.resonances();
    CHECK(std::abs(lam[0] - 0.125) < 1e-14);
  }
  SUBCASE("refuses radii beyond the truncation reliability") {
    CHECK_THROWS_AS(find_resonances(horseshoe_determinant(model_of(WeightSpec::from_alpha({})), 40), 150.0, 1e-12),
                    UnreliableTruncationError);
  }
  SUBCASE("zero on the contour") {
    PowerSeries p(std::vector<cplx>{1.0, -1.0, 0.0});
    CHECK_THROWS_AS(find_resonances(p, 1.0, 1e-12), BoundaryAmbiguityError);
  }
  SUBCASE("normalisation") {
    CHECK_THROWS_AS(find_resonances(PowerSeries(std::vector<cplx>{2.0, 1.0}), 1.0, 1e-12), NormalizationError);
  }
}

TEST_CASE("property: random polynomials recover their zeros") {
  gen::Rng rng(32);
  for (int trial = 0; trial < 30; ++trial) {
    const int count = rng.integer(1, 8);
    std::vector<cplx> zeros;
    for (int j = 0; j < count; ++j) {
      cplx z;
      bool ok = false;
      while (!ok) {
        z = std::polar(rng.uniform(0.3, 4.0), rng.uniform(0.0, 6.2831853));
        ok = std::abs(std::abs(z) - 3.0) > 0.05;
        for (cplx w : zeros) ok = ok && std::abs(w - z) > 0.1;
      }
      zeros.push_back(z);
    }
    PowerSeries p = PowerSeries::one(static_cast<std::size_t>(count));
    for (cplx z : zeros) p = multiply(p, PowerSeries(std::vector<cplx>{1.0, -1.0 / z}), p.order());
    auto rs = find_resonances(p, 3.0, 1e-12, {1e-6, {}, true});
    long inside = 0;
    for (cplx z : zeros) inside += std::abs(z) < 3.0;
    CHECK(rs.total_multiplicity() == inside);
    for (const Zero& found : rs.zeros) {
      double best = 1e300;
      for (cplx z : zeros) best = std::min(best, std::abs(z - found.z));
      CHECK(best < 1e-9);
    }
    for (std::size_t i = 1; i < rs.zeros.size(); ++i) CHECK(std::abs(rs.zeros[i - 1].z) <= std::abs(rs.zeros[i].z));
  }
}

TEST_CASE("rien horseshoe has no zeros") {
  const auto m = model_of(WeightSpec::from_generator("rien"));
  CHECK(horseshoe_zero_count(m, 100.0) == 0);
  CHECK(horseshoe_zero_count(model_of(WeightSpec::from_alpha({})), 150.0) == 15);
  double S = 0.0;
  for (unsigned k = 0; k <= 6; ++k) S += double(shell_multiplicity(k)) * shell_scale(k);
  const cplx expected(0.0, -std::numbers::pi * S);
  // Product route: exactly the retained shells.
  auto from_product = traces_from_det(horseshoe_determinant(m, 6));
  CHECK(std::abs(from_product.a(1) - expected) < 1e-12);
  for (std::size_t n = 2; n <= 6; ++n) CHECK(std::abs(from_product.a(n)) < 1e-12);
  // Orbit route: all shells, so it differs by the omitted tail only.
  auto t = horseshoe_traces(m, 3);
  const double tail = std::numbers::pi * shell_tail_sum(6, 0.25) / 16.0;
  CHECK(std::abs(t.a(1) - expected) <= tail + t.bound(1));
  CHECK(std::abs(t.a(1) - cplx(0.0, -std::numbers::pi * 16.0 / 81.0)) < 1e-12);
  CHECK(std::abs(t.a(2)) < 1e-10);
}

TEST_CASE("sharpness radius of the log generator") {
  const auto m = model_of(WeightSpec::from_generator("log"), 8);
  auto d = horseshoe_determinant(m, 120);
  // Ratio estimate of the radius of convergence from the coefficient tail.
  const double ratio = std::abs(d[100] / d[119]);
  const double radius = std::pow(ratio, 1.0 / 19.0);
  CHECK(std::abs(radius / 32.0 - 1.0) < 0.05);
}

TEST_CASE("zeros from factor zeros") {
  auto rs = horseshoe_zeros_from_factor({{0.5, 1}}, 150.0);
  REQUIRE(rs.zeros.size() == 3);
  CHECK(rs.zeros[2].multiplicity == 10);
  CHECK(std::abs(rs.zeros[2].z - 128.0) < 1e-12);
}
