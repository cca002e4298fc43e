#include <doctest.h>

#include <cmath>
#include <numbers>

#include "generators.hpp"
#include "reslab/errors.hpp"
#include "reslab/horseshoe.hpp"
#include "reslab/entire_analysis.hpp"
#include "reslab/nuclear_bounds.hpp"

using namespace reslab;

TEST_CASE("ruse coefficients match the nested geometric sums") {
  const auto a = ruse_coefficients(0.5, 1.0, 0, 20);
  CHECK(a[0] == 1.0);
  CHECK(std::abs(a[1] - 1.0) < 1e-14);
  CHECK(std::abs(a[2] - 1.0 / 3.0) < 1e-14);
  // Σ_{m1<m2<m3} 2^{-(m1+m2+m3)} = 1/21.
  CHECK(std::abs(a[3] - 1.0 / 21.0) < 1e-14);
  // Product over m of (1 + 2^{-m} z) gives a_n = 2^{-n(n+1)/2} / Π_{j≤n}(1 - 2^{-j}).
  for (std::size_t n = 1; n <= 20; ++n) {
    double expect = std::pow(2.0, -0.5 * static_cast<double>(n * (n + 1)));
    for (std::size_t j = 1; j <= n; ++j) expect /= 1.0 - std::pow(2.0, -static_cast<double>(j));
    CHECK(std::abs(a[n] - expect) < 1e-15);
    if (n <= 5) CHECK(std::abs(a[n] / expect - 1.0) < 1e-13);
  }
}

TEST_CASE("ruse coefficients refuse a short product") {
  CHECK_THROWS_AS(ruse_coefficients(0.5, 1.0, 10, 5), PreconditionError);
  CHECK(ruse_tail_bound(0.5, 1.0, 10) >= std::pow(2.0, -11));
  const std::size_t M = ruse_terms_needed(0.9, 2.0);
  CHECK(ruse_tail_bound(0.9, 2.0, M) < 1e-15);
  CHECK(ruse_tail_bound(0.9, 2.0, M - 1) >= 1e-15);
}

TEST_CASE("tail bound dominates the brute-force tail") {
  for (double beta : {0.5, 1.0, 2.5}) {
    for (std::size_t M : {5u, 40u}) {
      double s = 0.0;
      for (std::size_t m = M + 1; m < 2000000; ++m) {
        const double t = std::pow(0.7, std::pow(static_cast<double>(m), 1.0 / beta));
        s += t;
        if (t < 1e-30) break;
      }
      CHECK(s <= ruse_tail_bound(0.7, beta, M));
    }
  }
}

TEST_CASE("stretched fit recovers the exponent of the ruse coefficients") {
  const auto a = ruse_coefficients(0.5, 1.0, 0, 20);
  const std::vector<double> v(a.begin() + 1, a.end());
  const auto fit = fit_stretched_bound(v, 2.0);
  CHECK(fit.verdict == FitVerdict::Pass);
  CHECK(fit.exponent_fit >= 1.8);
  CHECK(fit.exponent_fit <= 2.2);
  CHECK(fit.D_fit > 0.0);
}

TEST_CASE("pure exponential decay fails the quadratic hypothesis") {
  std::vector<double> v;
  for (int n = 1; n <= 20; ++n) v.push_back(std::exp(-static_cast<double>(n)));
  const auto fit = fit_stretched_bound(v, 2.0);
  CHECK(fit.verdict == FitVerdict::Fail);
  CHECK(std::abs(fit.exponent_fit - 1.0) < 0.05);
  CHECK(fit_stretched_bound(v, 1.0).verdict == FitVerdict::Pass);
}

TEST_CASE("stretched fit is undetermined on thin data") {
  std::vector<double> few(9, 0.5);
  CHECK(fit_stretched_bound(few, 2.0).verdict == FitVerdict::Undetermined);
  std::vector<double> flat;
  for (int n = 1; n <= 30; ++n) flat.push_back(std::exp(-0.01 * n));
  CHECK(fit_stretched_bound(flat, 2.0).verdict == FitVerdict::Undetermined);
}

TEST_CASE("diagonal determinant equals the signed ruse coefficients") {
  CHECK(std::abs(diagonal_det_coefficients(SingularValueModel::from_list({0.5}), 3)[1] + 0.5) < 1e-16);
  const std::size_t M = ruse_terms_needed(0.5, 1.0);
  const auto model = SingularValueModel::closed_form(1.0, 0.5, 1.0, M);
  const auto d = diagonal_det_coefficients(model, 20);
  const auto a = ruse_coefficients(0.5, 1.0, M, 20);
  for (std::size_t n = 0; n <= 20; ++n) {
    CHECK(std::abs(std::abs(d[n]) - a[n]) <= 1e-14 * std::max(1.0, a[n]));
    CHECK(d[n].real() * (n % 2 ? -1.0 : 1.0) >= 0.0);
  }
  CHECK(std::abs(d[2] - 1.0 / 3.0) < 1e-14);
  std::vector<double> mags;
  for (std::size_t n = 1; n <= 20; ++n) mags.push_back(std::abs(d[n]));
  CHECK(fit_stretched_bound(mags, 2.0).verdict == FitVerdict::Pass);
}

TEST_CASE("closed-form model coefficients scale as C^n") {
  for (double beta : {0.5, 1.0, 2.0}) {
    const double theta = 0.3;
    const std::size_t M = ruse_terms_needed(theta, beta);
    const auto model = SingularValueModel::closed_form(1.7, theta, beta, M);
    const auto d = diagonal_det_coefficients(model, 12);
    const auto a = ruse_coefficients(theta, beta, M, 12);
    for (std::size_t n = 0; n <= 12; ++n)
      CHECK(std::abs(d[n]) <= a[n] * std::pow(1.7, static_cast<double>(n)) * (1.0 + 1e-13));
  }
}

TEST_CASE("termwise domination carries to the coefficients") {
  gen::Rng rng(0x5eed);
  for (int trial = 0; trial < 40; ++trial) {
    const double theta = rng.uniform(0.1, 0.8);
    const double beta = rng.uniform(0.5, 2.0);
    const std::size_t M = 30;
    const auto dom = SingularValueModel::closed_form(1.0, theta, beta, M);
    std::vector<cplx> lam;
    double prev = 1e300;
    for (std::size_t m = 1; m <= M; ++m) {
      const double cap = std::min(prev, std::abs(dom.value(m)));
      const double mod = cap * rng.uniform(0.0, 1.0);
      prev = mod;
      lam.push_back(std::polar(mod, rng.uniform(0.0, 6.283185307179586)));
    }
    const auto model = SingularValueModel::from_list(lam);
    const auto d = diagonal_det_coefficients(model, 10);
    const auto e = nuclear_coefficient_bound(dom, 10);
    const auto h = nuclear_coefficient_bound(dom, 10, true);
    for (std::size_t n = 0; n <= 10; ++n) {
      CHECK(std::abs(d[n]) <= e[n] * (1.0 + 1e-12) + 1e-300);
      CHECK(e[n] <= h[n]);
    }
  }
}

TEST_CASE("singular value models validate") {
  CHECK_THROWS_AS(SingularValueModel::closed_form(1.0, 1.0, 1.0, 4), DomainError);
  CHECK_THROWS_AS(SingularValueModel::closed_form(1.0, 0.5, 0.0, 4), DomainError);
  CHECK_THROWS_AS(SingularValueModel::from_list({0.1, 0.2}), DomainError);
  const auto m = SingularValueModel::closed_form(2.0, 0.5, 1.0, 5);
  for (std::size_t k = 2; k <= 5; ++k) CHECK(std::abs(m.value(k)) < std::abs(m.value(k - 1)));
  CHECK_THROWS_AS(m.value(6), DomainError);
}

TEST_CASE("preced integral closed forms") {
  const auto r0 = preced_check(0.0, {2.0, 10.0, 1e6});
  for (const auto& row : r0.rows) CHECK(std::abs(row.ratio - 1.0) < 1e-12);
  const auto r1 = preced_check(1.0, {2.0, 10.0, 1e3, 1e6, 1e12});
  for (const auto& row : r1.rows) {
    CHECK(std::abs(row.integral - (std::log(row.r) + 1.0)) < 1e-10 * row.integral);
    CHECK(std::abs(row.integral - row.closed_form) < 1e-10 * row.integral);
  }
  CHECK(r1.bounded);
  CHECK(std::abs(r1.rows.back().ratio - 1.0) < 0.04);
  // β = 2: log² r + 2 log r + 2.
  const auto r2 = preced_check(2.0, {5.0, 50.0});
  for (const auto& row : r2.rows) {
    const double l = std::log(row.r);
    CHECK(std::abs(row.integral - (l * l + 2 * l + 2)) < 1e-10 * row.integral);
  }
}

TEST_CASE("preced ratio is monotone and bounded at fractional beta") {
  const auto rep = preced_check(2.5, {1e6, 10.0, 1e3});
  REQUIRE(rep.rows.size() == 3);
  CHECK(rep.rows[0].r == 10.0);
  CHECK(rep.bounded);
  CHECK(rep.rows[0].ratio > rep.rows[1].ratio);
  CHECK(rep.rows[1].ratio > rep.rows[2].ratio);
  CHECK(rep.rows[2].ratio > 1.0);
  for (const auto& row : rep.rows) CHECK(std::abs(row.integral / row.closed_form - 1.0) < 1e-10);
  CHECK_THROWS_AS(preced_check(1.0, {1.5}), DomainError);
}

TEST_CASE("counting to decay on geometric sequences") {
  std::vector<double> a;
  for (int m = 1; m <= 60; ++m) a.push_back(std::pow(2.0, -m));
  const auto cert = counting_to_decay(a, 1.0);
  REQUIRE(cert.ok);
  CHECK(cert.M <= 1.0 / std::numbers::ln2 + 1e-12);
  CHECK(std::abs(cert.theta - 0.5) < 1e-12);
  for (std::size_t m = 0; m < a.size(); ++m)
    CHECK(a[m] <= cert.C * std::pow(cert.theta, static_cast<double>(m)) * (1 + 1e-12));
}

TEST_CASE("counting to decay rejects a power law") {
  std::vector<double> a;
  for (int m = 1; m <= 2000; ++m) a.push_back(1.0 / m);
  const auto cert = counting_to_decay(a, 1.0);
  CHECK_FALSE(cert.ok);
  CHECK(cert.witness_epsilon > 0.0);
  CHECK(cert.witness_epsilon < 0.5);
  CHECK_THROWS_AS(counting_to_decay({0.1, 0.2, 0.05}, 1.0), DomainError);
}

TEST_CASE("counting to decay recovers stretched sequences") {
  gen::Rng rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const double theta0 = rng.uniform(0.2, 0.8);
    const double beta = rng.uniform(0.5, 2.5);
    const double scale = rng.uniform(0.5, 4.0);
    std::vector<double> a;
    for (int m = 0; m < 400; ++m) {
      const double v = scale * std::pow(theta0, std::pow(static_cast<double>(m), 1.0 / beta));
      if (v < 1e-280) break;
      a.push_back(v);
    }
    const auto cert = counting_to_decay(a, beta);
    REQUIRE(cert.ok);
    const double ratio = std::log(cert.theta) / std::log(theta0);
    CHECK(ratio > 0.1);
    CHECK(ratio < 1.5);
    for (std::size_t m = 0; m < a.size(); ++m)
      CHECK(a[m] <= cert.C * std::pow(cert.theta, std::pow(static_cast<double>(m), 1.0 / beta)) * (1 + 1e-9));
  }
}

TEST_CASE("growth of the diagonal determinant is (log R)^2") {
  const std::size_t M = ruse_terms_needed(0.5, 1.0);
  const auto model = SingularValueModel::closed_form(1.0, 0.5, 1.0, M);
  const auto d = diagonal_det_coefficients(model, 40);
  const auto rep = growth_and_counting_check(d, 1.0, 10.0, 4.0);
  CHECK_FALSE(rep.truncated);
  CHECK(rep.growth_exponent > 1.7);
  CHECK(rep.growth_exponent < 2.3);
  CHECK(rep.growth_bounded);
  CHECK(rep.counts_bounded);
  REQUIRE(rep.coefficient_fit.has_value());
  CHECK(rep.coefficient_fit->verdict == FitVerdict::Pass);
  // Jensen bounds dominate the true count of zeros -2^m inside |z| < R/2.
  for (std::size_t i = 0; i < rep.count_r.size(); ++i) {
    const long exact = static_cast<long>(std::floor(std::log2(1.0 / rep.count_r[i])));
    CHECK(rep.counts[i] >= exact);
  }
}

TEST_CASE("growth of a linear polynomial is logarithmic") {
  PowerSeries p(std::vector<cplx>{1.0, -2.0});
  const auto rep = growth_and_counting_check(p, 1.0);
  CHECK(std::abs(rep.growth_exponent - 1.0) < 0.15);
  CHECK(rep.growth_bounded);
  CHECK(rep.counts_bounded);
}

TEST_CASE("horseshoe determinant growth through the product form") {
  HorseshoeModel model;
  model.weight = WeightSpec::from_alpha({0.0});
  model.product_cutoff = 40;
  const auto rep = growth_and_counting_check([&](cplx z) { return horseshoe_log_abs(model, z); },
                                             [&](double r) { return jensen_count(model, r); }, 4.0, 1e3, 4.0);
  CHECK(rep.growth_bounded);
  CHECK(rep.counts_bounded);
  CHECK(rep.count_exponent > 3.5);
  CHECK(rep.count_exponent < 4.5);
  CHECK(rep.growth_exponent > 4.0);
  CHECK(rep.growth_exponent < 5.5);
  MESSAGE("horseshoe growth exponent " << rep.growth_exponent << ", counting exponent " << rep.count_exponent);
}

TEST_CASE("series growth check stops at the reliability radius") {
  HorseshoeModel model;
  model.weight = WeightSpec::from_alpha({0.0});
  const auto d = horseshoe_determinant(model, 40);
  const double certified = reliability_radius(d, 1e-12);
  REQUIRE(certified < 1e5);
  REQUIRE(certified > 50.0);
  const auto rep = growth_and_counting_check(d, 4.0, 2.0, 4.0);
  CHECK(rep.truncated);
  CHECK(rep.max_radius < certified);
  PowerSeries short_reach(std::vector<cplx>{1.0, 1.0, 1.0, 1.0, 1.0, 1.0});
  CHECK_THROWS_AS(growth_and_counting_check(short_reach, 1.0), UnreliableTruncationError);
}
