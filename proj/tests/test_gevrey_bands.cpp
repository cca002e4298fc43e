#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "generators.hpp"
#include "reslab/bands.hpp"
#include "reslab/cones.hpp"
#include "reslab/errors.hpp"
#include "reslab/gevrey.hpp"

using namespace reslab;

namespace {

Eigen::MatrixXd hyperbolic_matrix() {
  Eigen::MatrixXd A(2, 2);
  A << 4.0, 0.0, 0.0, 0.25;
  return A;
}

struct Setup {
  HyperbolicParameters par;
  ConeFamily cones;
};

Setup default_setup(unsigned r = 4) {
  const auto provisional = ConeFamily::nested(r, default_t_bar(r, 2.0, 1.0));
  const auto h = cone_hyperbolicity_check(hyperbolic_matrix(), provisional, provisional);
  Setup s;
  s.par = hyperbolic_parameters(hyperbolic_matrix(), h.lambda, 3.5);
  s.cones = ConeFamily::nested(r, default_t_bar(r, s.par.nu, s.par.a));
  return s;
}

std::vector<FourierTestFunction> five_packets() {
  return {gaussian_packet("origin", Vec2(0.0, 0.0), 1.0), gaussian_packet("axis", Vec2(300.0, 0.0), 20.0),
          gaussian_packet("diagonal", Vec2(700.0, 700.0), 50.0),
          gaussian_packet("normal", Vec2(0.0, 2000.0), 100.0),
          gaussian_packet("oblique", Vec2(5000.0, 1500.0), 200.0)};
}

}  // namespace

TEST_CASE("gaussian derivatives follow the Hermite recursion") {
  const auto g = GevreyProfile::gaussian();
  const auto d = g.derivatives(0.7, 4);
  const double e = std::exp(-0.49);
  CHECK(std::abs(d[0] - e) < 1e-15);
  CHECK(std::abs(d[1] + 1.4 * e) < 1e-14);
  CHECK(std::abs(d[2] - (4.0 * 0.49 - 2.0) * e) < 1e-14);
  CHECK(std::abs(d[4] - (16.0 * 0.7 * 0.7 * 0.7 * 0.7 - 48.0 * 0.49 + 12.0) * e) < 1e-12);
}

TEST_CASE("bump derivatives agree with finite differences") {
  const auto b = GevreyProfile::bump(1.0);
  CHECK(std::abs(b.sigma - 2.0) < 1e-15);
  for (double x : {-0.6, -0.1, 0.3, 0.8}) {
    const auto d = b.derivatives(x, 2);
    const double h = 1e-5;
    const double fd1 = (b.value(x + h) - b.value(x - h)) / (2.0 * h);
    const double fd2 = (b.value(x + h) - 2.0 * b.value(x) + b.value(x - h)) / (h * h);
    CHECK(std::abs(d[1] - fd1) < 1e-8);
    CHECK(std::abs(d[2] - fd2) < 1e-4 * std::max(1.0, std::abs(d[2])));
  }
  CHECK(b.value(1.0) == 0.0);
  CHECK(b.value(-1.5) == 0.0);
}

TEST_CASE("sampled profiles have no derivative recursion") {
  const auto s = GevreyProfile::from_function([](double x) { return std::exp(-x * x); }, 2.0);
  CHECK_THROWS_AS(s.derivatives(0.0, 2), UnsupportedError);
  CHECK_THROWS_AS(gevrey_condition_check(s, 4), UnsupportedError);
}

TEST_CASE("gevrey condition holds for smooth profiles and fails for the indicator") {
  const auto g = gevrey_condition_check(GevreyProfile::gaussian(2.0), 10);
  CHECK(g.ok);
  CHECK(g.R <= 1.5);
  const auto b = gevrey_condition_check(GevreyProfile::bump(1.0), 10);
  CHECK(b.ok);
  CHECK(b.R < 10.0);
  const auto ind = gevrey_condition_check(GevreyProfile::indicator(), 10);
  CHECK_FALSE(ind.ok);
  CHECK(ind.failure_order == 1);
}

TEST_CASE("too small a Gevrey index shows as drifting local rates") {
  auto b = GevreyProfile::bump(1.0);
  b.sigma = 1.3;
  CHECK_FALSE(gevrey_condition_check(b, 12).ok);
}

TEST_CASE("Fourier decay exponents are ordered gaussian, bump, indicator") {
  const auto g = fourier_decay_check(GevreyProfile::gaussian());
  const auto b = fourier_decay_check(GevreyProfile::bump(1.0));
  const auto ind = fourier_decay_check(GevreyProfile::indicator());
  CHECK(g.verdict == DecayVerdict::Pass);
  CHECK(std::abs(g.exponent - 2.0) < 0.1);
  CHECK(b.verdict == DecayVerdict::Pass);
  CHECK(b.exponent >= 0.5 * 0.85);
  CHECK(b.exponent < 1.0);
  CHECK(ind.non_gevrey);
  CHECK(ind.verdict == DecayVerdict::Fail);
  CHECK(g.exponent > b.exponent);
  CHECK(g.aliasing <= 1e-12);
  CHECK(g.decades >= 4.0);
}

TEST_CASE("sharper bumps decay faster") {
  const auto b1 = fourier_decay_check(GevreyProfile::bump(1.0));
  const auto b2 = fourier_decay_check(GevreyProfile::bump(2.0));
  CHECK(b2.exponent > b1.exponent);
  CHECK(b2.verdict == DecayVerdict::Pass);
}

TEST_CASE("profiles that do not vanish at the grid edge are rejected") {
  CHECK_THROWS_AS(GevreyProfile::gaussian(2.0, 16, 3.0).validate(), DomainError);
  CHECK_THROWS_AS(GevreyProfile::gaussian(2.0, 30).validate(), DomainError);
}

TEST_CASE("band cutoff is a monotone smooth step") {
  CHECK(band_cutoff(0.5) == 1.0);
  CHECK(band_cutoff(1.0) == 0.0);
  CHECK(std::abs(band_cutoff(0.75) - 0.5) < 1e-15);
  double prev = 1.0;
  for (int k = 0; k <= 100; ++k) {
    const double v = band_cutoff(0.5 + 0.005 * k);
    CHECK(v <= prev);
    prev = v;
  }
}

TEST_CASE("radial bands form a partition of unity with the stated supports") {
  const auto b = build_band_partition(3.5, 12);
  CHECK(b.partition_error <= 1e-12);
  CHECK(b.supports_ok);
  CHECK(b.max_overlap <= 2);
  CHECK(b.psi_value(0, 1.0) == 1.0);
  CHECK(b.psi_value(0, 2.5) == 0.0);
  CHECK(b.psi_value(0, 2.0) == 0.0);
  const double lo = std::pow(3.0, 3.5), hi = std::pow(4.0, 3.5) + 1.0;
  for (double rho : b.radii) {
    if (b.psi_value(3, rho) != 0.0) {
      CHECK(rho >= lo);
      CHECK(rho <= hi);
    }
  }
  CHECK(b.psi_value(3, 0.5 * (lo + hi)) == 1.0);
}

TEST_CASE("enlarged bands dominate their bands") {
  const auto b = build_band_partition(3.5, 6);
  for (double rho : b.radii)
    for (std::size_t n = 1; n + 1 <= 6; ++n)
      if (b.psi_value(n, rho) != 0.0) CHECK(b.psi_tilde_value(n, rho) == 1.0);
}

TEST_CASE("band partition rejects a short grid and bad exponents") {
  CHECK_THROWS_AS(build_band_partition(3.5, 12, {0.0, 1.0, 100.0}), DomainError);
  CHECK_THROWS_AS(build_band_partition(1.0, 12), DomainError);
  CHECK_THROWS_AS(build_band_partition(3.5, 0), DomainError);
}

TEST_CASE("partition sums to one for random exponents") {
  gen::Rng rng(71);
  for (int trial = 0; trial < 8; ++trial) {
    const double alpha = rng.uniform(1.5, 4.0);
    const std::size_t n = static_cast<std::size_t>(rng.integer(2, 10));
    const auto b = build_band_partition(alpha, n);
    CHECK(b.partition_error <= 1e-12);
    CHECK(b.supports_ok);
  }
}

TEST_CASE("weight and band sum are equivalent with a stable constant") {
  const auto s = default_setup();
  const auto b = build_band_partition(3.5, 12);
  const auto rep = weight_and_equivalence(s.cones, b, five_packets());
  CHECK(std::isfinite(rep.sandwich_constant));
  CHECK(rep.sandwich_spread < 2.0);
  CHECK(rep.partition_error <= 1e-12);
  CHECK(rep.ratios.size() == 5);
  CHECK(rep.ratios_within);
  for (std::size_t n = 1; n <= 12; ++n) CHECK(rep.band_sandwich[n] <= rep.sandwich_constant);
  CHECK(rep.fine_constant >= 1.0);
  CHECK(rep.max_simultaneous <= 4);
  for (std::size_t n = 2; n <= 12; ++n) CHECK(rep.fine_constants[n] <= rep.fine_constants[n - 1] * (1.0 + 1e-9));
}

TEST_CASE("weight equivalence with two cones") {
  const auto s = default_setup(2);
  const auto b = build_band_partition(3.5, 8);
  const auto rep = weight_and_equivalence(s.cones, b, {gaussian_packet("axis", Vec2(200.0, 0.0), 15.0)}, 360);
  CHECK(rep.sandwich_spread < 2.0);
  CHECK(rep.ratios_within);
}

TEST_CASE("weight is one near the origin and follows the cone exponents far out") {
  const auto s = default_setup();
  const auto b = build_band_partition(3.5, 12);
  CHECK(anisotropic_weight(s.cones, b, Vec2(0.5, 0.5)) == 1.0);
  const Vec2 along(3000.0, 0.0), across(0.0, 3000.0);
  const double root = std::pow(3000.0, 1.0 / 3.5);
  CHECK(std::abs(anisotropic_weight(s.cones, b, along) - std::exp(s.cones.t_bar[4] * root)) < 1e-12);
  CHECK(std::abs(anisotropic_weight(s.cones, b, across) - std::exp(s.cones.t_bar[0] * root)) < 1e-12);
}

TEST_CASE("test functions outside the retained bands are refused") {
  const auto s = default_setup();
  const auto b = build_band_partition(3.5, 4);
  CHECK_THROWS_AS(weight_and_equivalence(s.cones, b, {gaussian_packet("far", Vec2(1e4, 0.0), 10.0)}),
                  DomainError);
}

TEST_CASE("zero exponents are rejected") {
  CHECK_THROWS_AS(ConeFamily::nested(4, {0.0, 0.0, 0.0, 0.0, 0.0}).validate(), DomainError);
  CHECK_THROWS_AS(check_sueur({0.1, -0.1, -0.05}, 1.2, 0.6), DomainError);
  CHECK_THROWS_AS(check_sueur({0.1, -0.1, -0.3, -1.0}, 1.2, 0.6), DomainError);
  CHECK_NOTHROW(check_sueur(default_t_bar(4, 1.2, 0.6), 1.2, 0.6));
}

TEST_CASE("default exponents satisfy the ordering constraints for random parameters") {
  gen::Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const double nu = rng.uniform(1.01, 3.0), a = rng.uniform(0.1, 3.0);
    const unsigned r = static_cast<unsigned>(rng.integer(2, 6));
    const auto t = default_t_bar(r, nu, a);
    CHECK_NOTHROW(check_sueur(t, nu, a));
    CHECK(t.size() == r + 1);
  }
}

TEST_CASE("angular cutoffs sum to one and respect their supports") {
  const auto c = ConeFamily::nested(4, default_t_bar(4, 1.2, 0.6));
  for (int k = 0; k <= 900; ++k) {
    const double delta = 0.5 * std::numbers::pi * k / 900.0;
    double sum = 0.0;
    for (unsigned i = 0; i <= 4; ++i) {
      const double v = c.phi_of_angle(i, delta);
      sum += v;
      CHECK(v >= -1e-15);
      if (v != 0.0) {
        const auto [lo, hi] = c.phi_support(i);
        CHECK(delta >= lo - 1e-15);
        CHECK(delta <= hi + 1e-15);
      }
    }
    CHECK(std::abs(sum - 1.0) < 1e-14);
  }
  for (unsigned i = 1; i <= 4; ++i) {
    CHECK(c.half_angles[i] < c.half_angles[i - 1]);
    CHECK(c.phi_support(i).second <= c.half_angles[i] + 1e-15);
  }
}

TEST_CASE("distance between transverse sectors grows linearly") {
  const Sector xp{0.0, 0.0, false}, yp{std::numbers::pi / 2.0, 0.0, false};
  const auto d = cone_distance_check(xp, yp, 20000, 1);
  CHECK(std::abs(d.mu - 1.0) < 1e-9);
  CHECK(d.violations == 0);
  const double w = std::numbers::pi / 6.0;
  const Sector s1{0.0, w, false}, s2{std::numbers::pi / 2.0, w, false};
  const auto e = cone_distance_check(s1, s2, 20000, 2);
  CHECK(std::abs(e.mu - 0.5) < 1e-6);
  CHECK(e.violations == 0);
  CHECK(e.min_ratio >= e.mu - 1e-12);
  CHECK_THROWS_AS(cone_distance_check(s1, Sector{0.4, w, false}, 100, 3), DegenerateInputError);
}

TEST_CASE("hyperbolic matrix preserves the nested sectors") {
  const auto s = default_setup();
  const auto h = cone_hyperbolicity_check(hyperbolic_matrix(), s.cones, s.cones);
  CHECK(h.cond_i);
  CHECK(h.cond_ii);
  CHECK(h.cond_iii);
  CHECK(h.lambda > 1.5);
  CHECK(s.par.nu > 1.0);
  CHECK(s.par.nu < std::pow(h.lambda, 1.0 / 3.5));
}

TEST_CASE("identity and quarter rotation are not cone hyperbolic") {
  const auto s = default_setup();
  Eigen::MatrixXd I = Eigen::MatrixXd::Identity(2, 2), R(2, 2);
  R << 0.0, -1.0, 1.0, 0.0;
  const auto hi = cone_hyperbolicity_check(I, s.cones, s.cones);
  CHECK_FALSE(hi.cond_ii);
  CHECK_FALSE(hi.cond_iii);
  const auto hr = cone_hyperbolicity_check(R, s.cones, s.cones);
  CHECK_FALSE(hr.cond_i);
  Eigen::MatrixXd big = Eigen::MatrixXd::Identity(3, 3);
  CHECK_THROWS_AS(cone_hyperbolicity_check(big, s.cones, s.cones), UnsupportedError);
}

TEST_CASE("leak distance grows like the band radius for unrelated pairs") {
  const auto s = default_setup();
  struct Pair {
    std::size_t n, l;
    unsigned i, j;
  };
  const std::vector<Pair> pairs{{6, 2, 0, 0}, {10, 4, 0, 0}, {20, 8, 0, 0},
                                {40, 16, 0, 0}, {10, 3, 0, 2}, {20, 6, 0, 2}};
  double lo = 1e300, hi = 0.0;
  for (const auto& p : pairs) {
    const auto rep = band_leak_distance_check(hyperbolic_matrix(), s.cones, s.cones, p.n, p.l, p.i, p.j, 3.5,
                                              s.par.nu, s.par.a);
    REQUIRE(rep.status == "measured");
    CHECK(rep.c > 0.0);
    lo = std::min(lo, rep.c);
    hi = std::max(hi, rep.c);
  }
  CHECK(hi / lo < 2.0);
}

TEST_CASE("related pairs and small indices are not measured") {
  const auto s = default_setup();
  CHECK(leak_relation(5, 15, 0, 0, 4, s.par.nu, s.par.a));
  const auto rel =
      band_leak_distance_check(hyperbolic_matrix(), s.cones, s.cones, 5, 15, 0, 0, 3.5, s.par.nu, s.par.a);
  CHECK(rel.status == "related");
  const auto small =
      band_leak_distance_check(hyperbolic_matrix(), s.cones, s.cones, 2, 1, 0, 0, 3.5, s.par.nu, s.par.a);
  CHECK(small.status == "below threshold");
  CHECK_FALSE(leak_relation(6, 2, 0, 0, 4, s.par.nu, s.par.a));
  CHECK(leak_relation(10, 3, 4, 4, 4, s.par.nu, s.par.a));
}
