#include <cmath>
#include <numbers>

#include "doctest.h"
#include "generators.hpp"
#include "reslab/counterexamples.hpp"
#include "reslab/entire_analysis.hpp"
#include "reslab/errors.hpp"
#include "reslab/horseshoe.hpp"

using namespace reslab;

namespace {

const double kGolden = (std::sqrt(5.0) - 1.0) / 2.0;

double brute_constant(double theta, int H) {
  double c = 1e300;
  for (int n = 1; n <= H; ++n)
    c = std::min(c, double(n) * n * std::abs(1.0 - std::polar(1.0, 2.0 * std::numbers::pi * n * theta)));
  return c;
}

HorseshoeModel model_of(WeightSpec w) {
  HorseshoeModel m;
  m.weight = std::move(w);
  return m;
}

}  // namespace

TEST_CASE("Diophantine constant") {
  CHECK_THROWS_AS(diophantine_constant(0.5, 2), DegenerateInputError);
  CHECK_THROWS_AS(diophantine_constant(0.25, 10), DegenerateInputError);
  const auto g = RotationSpec::golden(10);
  CHECK(std::abs(g.c - brute_constant(kGolden, 10)) < 1e-12);
  CHECK(std::abs(g.theta - kGolden) < 1e-16);
  // Badly approximable: the minimum is attained early and stays put.
  CHECK(RotationSpec::golden(10000).c == doctest::Approx(g.c).epsilon(1e-12));
  CHECK(g.c > 0.0);
  for (std::uint64_t n = 1; n <= 2000; ++n)
    CHECK(double(n) * n * std::abs(1.0 - g.phase(n)) >= RotationSpec::golden(2000).c * (1.0 - 1e-12));
}

TEST_CASE("rotation phases are exact for huge indices") {
  const auto g = RotationSpec::golden(10);
  // frac(mθ) for Fibonacci m approaches 0 or 1: F_k θ - F_{k-1} = (-1)^k θ^k.
  std::uint64_t a = 1, b = 1;
  for (int k = 2; k < 80; ++k) {
    const std::uint64_t c = a + b;
    a = b;
    b = c;
  }
  // b = F_80 ≈ 2.3e16.
  const double f = g.frac(b);
  CHECK(std::min(f, 1.0 - f) < 1e-15);
  const auto r = RotationSpec::from_theta(0.3, 5);
  CHECK(std::abs(r.frac(7) - std::fmod(7 * 0.3, 1.0)) < 1e-15);
  CHECK(std::abs(r.frac(3, 5) - std::fmod(15 * 0.3, 1.0)) < 1e-14);
}

TEST_CASE("Abel summation") {
  SUBCASE("alternating harmonic") {
    auto res = abel_sum(
        1.0, [](std::size_t m) { return 1.0 / double(m + 1); },
        [](std::size_t m) { return cplx(m % 2 ? -1.0 : 1.0); }, 100000);
    CHECK(std::abs(res.sum - std::log(2.0)) <= res.tail_bound);
    CHECK(std::abs(res.sum) <= res.global_bound);
  }
  SUBCASE("rotation with logarithmic weights") {
    const auto g = RotationSpec::golden(10);
    const double M = 2.0 / std::abs(1.0 - g.phase(1));
    auto c = [](std::size_t m) { return 1.0 / std::log(double(m) + 2.0); };
    auto b = [&](std::size_t m) { return g.phase(m); };
    auto r1 = abel_sum(M, c, b, 1000);
    auto r2 = abel_sum(M, c, b, 100000);
    CHECK(r2.tail_bound < r1.tail_bound);
    CHECK(std::abs(r1.sum - r2.sum) <= r1.tail_bound + r2.tail_bound);
    CHECK(r2.tail_bound == doctest::Approx(2.0 * M / std::log(100002.0)));
  }
  SUBCASE("preconditions") {
    CHECK_THROWS_AS(abel_sum(
                        1.0, [](std::size_t m) { return m == 3 ? 2.0 : 1.0 / double(m + 1); },
                        [](std::size_t) { return cplx(0.0); }, 10),
                    PreconditionError);
    CHECK_THROWS_AS(abel_sum(
                        0.5, [](std::size_t m) { return 1.0 / double(m + 1); },
                        [](std::size_t) { return cplx(1.0); }, 10),
                    PreconditionError);
  }
  SUBCASE("property: the sum never exceeds 2 M c_0") {
    gen::Rng rng(7);
    for (int trial = 0; trial < 40; ++trial) {
      const double theta = rng.uniform(0.05, 0.95);
      const double M = 2.0 / std::abs(1.0 - std::polar(1.0, 2.0 * std::numbers::pi * theta));
      const double p = rng.uniform(0.2, 2.0);
      auto res = abel_sum(
          M, [&](std::size_t m) { return std::pow(double(m + 1), -p); },
          [&](std::size_t m) { return std::polar(1.0, 2.0 * std::numbers::pi * theta * double(m)); },
          std::size_t(rng.integer(1, 3000)));
      CHECK(std::abs(res.sum) <= res.global_bound * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("factorial blocks") {
  CHECK(factorial_block(0) == 0);
  CHECK(factorial_block(1) == 0);
  CHECK(factorial_block(2) == 1);
  CHECK(factorial_block(3) == 2);
  CHECK(factorial_block(6) == 2);
  CHECK(factorial_block(7) == 3);
  CHECK(factorial_block(24) == 3);
  CHECK(factorial_block(25) == 4);
  for (unsigned k = 1; k <= 19; ++k) {
    auto [lo, hi] = factorial_block_range(k);
    CHECK(factorial_block(lo) == k);
    CHECK(factorial_block(hi) == k);
    CHECK(factorial_block(lo - 1) == k - 1);
  }
  CHECK_THROWS_AS(factorial_block_range(20), DomainError);
}

TEST_CASE("counterexample traces") {
  const auto a = CounterexampleSeries::type_a();
  SUBCASE("two truncations overlap") {
    for (unsigned n : {1u, 2u, 4u}) {
      auto t1 = counterexample_traces(a, n, 1000000);
      auto t2 = counterexample_traces(a, n, 2000000);
      CHECK(std::abs(t1.value - t2.value) <= t1.tail_bound + t2.tail_bound);
    }
    auto t4 = counterexample_traces(a, 4, 1000000);
    CHECK(t4.tail_bound == doctest::Approx(4.0 / a.rotation.c * 16.0 / std::pow(std::log(1e6), 4)));
  }
  SUBCASE("tail bound decays in n only when ln m0 > 1") {
    CHECK(counterexample_traces(a, 400, 3).tail_bound < counterexample_traces(a, 200, 3).tail_bound);
    CHECK(counterexample_traces(a, 400, 3).tail_bound < 1e-5);
    CHECK(counterexample_traces(a, 30, 2).tail_bound > counterexample_traces(a, 10, 2).tail_bound);
  }
  SUBCASE("flagging") {
    CHECK(counterexample_traces(a, 1, 100, 1e-3).flagged);
    CHECK_FALSE(counterexample_traces(a, 12, 100000, 1e-3).flagged);
  }
  SUBCASE("accelerated traces agree with truncations") {
    for (unsigned n : {1u, 2u, 3u, 6u, 10u}) {
      auto acc = accelerated_trace(a, n);
      auto t = counterexample_traces(a, n, 2000000);
      CHECK(acc.tail_bound < 1e-10);
      CHECK(std::abs(acc.value - t.value) <= t.tail_bound + acc.tail_bound);
      // Shifting the start by a finite block changes the sum by exactly that block.
      auto later = accelerated_trace(CounterexampleSeries::type_a(1000), n);
      auto block = counterexample_traces(a, n, 1000);
      CHECK(std::abs(acc.value - later.value - block.value) <= acc.tail_bound + later.tail_bound + 1e-12);
    }
  }
  SUBCASE("accelerated traces at huge start indices") {
    const auto far = CounterexampleSeries::type_a(std::uint64_t{1} << 40);
    auto t = accelerated_trace(far, 1);
    const double L = std::log(std::ldexp(1.0, 40));
    // Leading Abel term q^M c_M / (1 - q).
    const cplx q = far.rotation.phase(1);
    const cplx lead = far.rotation.phase(std::uint64_t{1} << 40) / (L * (1.0 - q));
    CHECK(std::abs(t.value - lead) < 1e-9 * std::abs(lead));
    CHECK(t.tail_bound < 1e-14);
  }
  SUBCASE("type (b) block sums match direct summation") {
    const auto b = CounterexampleSeries::type_b();
    for (unsigned n : {1u, 3u}) {
      cplx direct(0.0);
      for (std::uint64_t m = 0; m < 5040 + 1; ++m) direct += b.inverse_zero_power(m, n);
      auto t = counterexample_traces(b, n, 5041);
      CHECK(std::abs(direct - t.value) < 1e-10);
      const double L = std::log(double(factorial_block(5041)) + 2.0);
      CHECK(t.tail_bound == doctest::Approx(4.0 / b.rotation.c * n * n / std::pow(L, double(n))));
    }
    // Within a block the partial sums stay within the Abel bound of the block's weight.
    const cplx q = b.rotation.phase(1);
    auto [lo, hi] = factorial_block_range(6);
    const auto base = counterexample_traces(b, 1, lo);
    for (std::uint64_t m : {lo + 10, lo + 1000, hi}) {
      const auto part = counterexample_traces(b, 1, m + 1);
      CHECK(std::abs(part.value - base.value) <= 2.0 / std::abs(1.0 - q) / std::log(8.0) + 1e-12);
    }
  }
  SUBCASE("traces as a sequence") {
    auto ts = a.traces(4, 10000);
    CHECK(ts.size() == 4);
    CHECK(ts.bound(2) == doctest::Approx(counterexample_traces(a, 2, 10000).tail_bound));
  }
  SUBCASE("steps beyond the certified horizon are refused") {
    CounterexampleSeries s = a;
    s.rotation = RotationSpec::golden(5);
    CHECK_THROWS_AS(counterexample_traces(s, 6, 100), PreconditionError);
  }
}

TEST_CASE("type (a) zeros: conditional but not absolute convergence") {
  const auto a = CounterexampleSeries::type_a();
  double abs_sum = 0.0;
  std::vector<double> at;
  for (std::uint64_t m = 2; m <= 100000; ++m) {
    abs_sum += 1.0 / std::log(double(m));
    if (m == 1000 || m == 10000 || m == 100000) at.push_back(abs_sum);
  }
  CHECK(at[1] - at[0] > 50.0);
  CHECK(at[2] - at[1] > 50.0);
  auto g = formula_generator([&](std::size_t m) { return 1.0 / a.inverse_zero_power(m, 1); }, 2);
  auto v = check_global_trace_formula(TraceSequence(std::vector<cplx>{accelerated_trace(a, 1).value}), *g, 1, nullptr,
                                      {1u << 16, 1e-14});
  CHECK_FALSE(v.abs_convergent);
  CHECK_FALSE(v.pass());
}

TEST_CASE("realisation as h") {
  SUBCASE("degenerate traces give alpha = 0") {
    auto w = realise_from_traces(std::vector<double>(5, 0.0), 2.0);
    CHECK(std::abs(w.lambda - 0.5) < 1e-15);
    for (auto a : w.weight.alphas(49)) CHECK(std::abs(a) < 1e-15);
  }
  SUBCASE("feasible and spec-sized targets") {
    for (auto [eps, rho] : {std::pair{1.0, 2.0}, std::pair{0.1, 4.0}}) {
      const auto w = realise_as_h(CounterexampleSeries::type_a(), eps, rho);
      CHECK(w.max_scaled_alpha + w.certificate <= eps);
      CHECK(w.route_difference < 1e-10);
      const auto alpha = w.weight.alphas(49);
      double rl = 1.0;
      for (const auto& x : alpha) {
        CHECK(std::abs(x) * rl <= eps);
        CHECK(x != cplx(-1.0));
        rl *= rho;
      }
      // ζ⁻¹ = 1 - 2z - z(1-z)h and the construction targets f(0) = 1, f(1) = -1.
      CHECK(std::abs(w.weight.zeta_inverse(0.0) - 1.0) < 1e-15);
      CHECK(std::abs(w.weight.zeta_inverse(1.0) + 1.0) < 1e-15);
      const cplx f1 = (1.0 - 1.0 / w.lambda) * w.f_tilde_one;
      CHECK(std::abs(f1 + 1.0) < 1e-8);
      // Its traces are λ^{-n} + a_n + conj(a_n).
      const auto series = zeta_inverse_series(w.weight, 10);
      const auto traces = traces_from_det(series);
      for (unsigned n = 1; n <= 10; ++n) {
        const double expect = std::pow(1.0 / w.lambda.real(), n) + w.trace_values[n - 1];
        CHECK(std::abs(traces.a(n) - expect) < 1e-9 * std::pow(2.5, n));
      }
    }
  }
  SUBCASE("pipeline through the horseshoe") {
    const auto w = realise_as_h(CounterexampleSeries::type_a(), 1.0, 2.0);
    const auto t = horseshoe_traces(model_of(w.weight), 5);
    for (unsigned n = 1; n <= 5; ++n) {
      const double expect = (std::pow(1.0 / w.lambda.real(), n) + w.trace_values[n - 1]) * det_weight_factor(n);
      CHECK(std::abs(t.a(n) - expect) <= t.bound(n) + 1e-9 * std::abs(expect));
    }
  }
  SUBCASE("unreachable target reports non-convergence") {
    RealiseOptions o;
    o.max_doublings = 3;
    CHECK_THROWS_AS(realise_as_h(CounterexampleSeries::type_a(), 1e-6, 4.0, o), NonConvergenceError);
    CHECK_THROWS_AS(realise_as_h(CounterexampleSeries::type_a(), 1.0, 1.5), DomainError);
  }
}

TEST_CASE("prescribed trace-formula sets") {
  SUBCASE("E = {2}") {
    auto p = prescribe_trace_formula_set(IndexSet::finite({2}), 0.1, 4.0);
    CHECK(p.q_coeffs[1] != 0.0);
    CHECK(p.q_coeffs[2] == 0.0);
    CHECK(p.q_coeffs[3] != 0.0);
  }
  SUBCASE("E empty: every coefficient nonzero") {
    auto p = prescribe_trace_formula_set(IndexSet::finite({}), 0.1, 4.0);
    for (std::size_t n = 1; n <= 40; ++n) CHECK(p.q_coeffs[n] != 0.0);
  }
  SUBCASE("E everything: Q = 0") {
    auto p = prescribe_trace_formula_set(IndexSet::all_but({}), 0.1, 4.0);
    for (auto a : p.weight.alphas(10)) CHECK(a == cplx(0.0));
    auto q = prescribe_trace_formula_set(IndexSet::periodic(3, {0, 1, 2}), 0.1, 4.0);
    CHECK(q.weight.max_degree() == 0);
  }
  SUBCASE("cofinite sets") {
    auto p = prescribe_trace_formula_set(IndexSet::all_but({3, 5}), 0.1, 4.0);
    for (unsigned n = 1; n <= 20; ++n) CHECK((p.q_coeffs[n] == 0.0) == (n != 3 && n != 5));
    double sum = 0.0;
    for (double b : p.q_coeffs) sum += b;
    CHECK(sum == 0.0);
    CHECK_THROWS_AS(prescribe_trace_formula_set(IndexSet::all_but({3}), 0.1, 4.0), DomainError);
  }
  SUBCASE("property: zero pattern matches E and coefficients obey the bound") {
    gen::Rng rng(11);
    for (int trial = 0; trial < 30; ++trial) {
      std::vector<unsigned> e;
      for (unsigned n = 1; n <= 12; ++n)
        if (rng.integer(0, 1)) e.push_back(n);
      const auto E = trial % 3 == 0 ? IndexSet::periodic(5, {1, 3}) : IndexSet::finite(e);
      const double eps = rng.uniform(0.01, 1.0), rho = rng.uniform(1.0, 6.0);
      auto p = prescribe_trace_formula_set(E, eps, rho);
      for (unsigned n = 1; n <= 40; ++n) CHECK((p.q_coeffs[n] == 0.0) == E.contains(n));
      auto alpha = p.weight.alphas(49);
      double rl = 1.0;
      for (auto a : alpha) {
        CHECK(std::abs(a) * rl <= eps);
        rl *= rho;
      }
      // ζ⁻¹ from α reproduces (1 - 2z) e^{aQ} through its traces.
      const auto t = traces_from_det(zeta_inverse_series(p.weight, 12));
      for (unsigned n = 1; n <= 12; ++n)
        CHECK(std::abs(t.a(n) - p.zeta_trace(n)) < 1e-11 * std::pow(2.0, n));
    }
  }
  SUBCASE("global trace formula holds exactly on E") {
    const auto E = IndexSet::finite({2, 4});
    auto p = prescribe_trace_formula_set(E, 0.1, 4.0);
    const auto t = horseshoe_traces(model_of(p.weight), 6);
    const TailModel tm = shell_tail_model({{0.5, 1}});
    for (unsigned n = 1; n <= 6; ++n) {
      auto g = shell_generator({{0.5, 1}});
      auto v = check_global_trace_formula(t, *g, n, &tm);
      CHECK(v.abs_convergent);
      CHECK(v.pass() == E.contains(n));
    }
  }
}

TEST_CASE("prescribed zero density") {
  std::vector<std::pair<double, double>> n0;
  for (int i = 2; i <= 8; ++i) {
    const double r = std::pow(10.0, -i);
    n0.push_back({r, std::abs(std::log(r))});
  }
  SUBCASE("logarithmic density") {
    auto z = prescribe_zero_density(n0, 0.1, 4.0);
    CHECK(z.density_margin >= 2.0);
    CHECK(z.max_scaled_alpha <= 0.1);
    for (std::size_t i = 1; i < z.zeros.size(); ++i) CHECK(z.zeros[i - 1] <= z.zeros[i]);
    for (std::size_t i = 1; i < z.genus.size(); ++i) CHECK(z.genus[i - 1] < z.genus[i]);
    for (auto [r, v] : n0) CHECK(double(zero_density_resonance_count(z, r)) > v);
    CHECK(std::abs(z.weight.zeta_inverse(1.0) + 1.0) < 1e-14);
    // λ is the only zero of f inside |z| < z_0.
    CHECK(std::abs(z.weight.zeta_inverse(z.lambda)) < 1e-6);
  }
  SUBCASE("N0 = 0") {
    std::vector<std::pair<double, double>> zero;
    for (auto [r, v] : n0) zero.push_back({r, 0.0});
    auto z = prescribe_zero_density(zero, 0.1, 4.0);
    CHECK(z.max_scaled_alpha <= 0.1);
    CHECK(std::isinf(z.density_margin));
  }
  SUBCASE("unreachable bound") {
    CHECK_THROWS_AS(prescribe_zero_density(n0, 1e-300, 50.0, 3), NonConvergenceError);
  }
}

TEST_CASE("reordering destroys convergence") {
  CHECK(reorder_schedule(0) == 1);
  CHECK(reorder_schedule(1) == 1);
  CHECK(reorder_schedule(2) == 2);
  CHECK(reorder_schedule(3) == 1);
  CHECK(reorder_schedule(5) == 3);
  CHECK(reorder_schedule(6) == 1);
  CHECK(std::cos(2.0 * std::numbers::pi / 6.0) >= 0.5 - 1e-15);

  auto d = reorder_divergence_demo(1, 8);
  CHECK(d.natural.size() == d.reordered.size());
  double prev = -1.0;
  int qualifying = 0;
  for (const auto& b : d.blocks) {
    CHECK(b.natural_spread <= b.natural_bound * (1.0 + 1e-12));
    if (!b.qualifying) continue;
    CHECK(b.jump >= b.bound - 1e-12);
    if (b.k >= 1) {
      CHECK(b.bound > prev);
      prev = b.bound;
      ++qualifying;
    }
  }
  CHECK(qualifying == 3);
  // Block ends agree: the permutation stays inside each block.
  for (const auto& b : d.blocks) {
    const auto hi = factorial_block_range(b.k).second;
    CHECK(std::abs(d.natural[hi + 1] - d.reordered[hi + 1]) < 1e-9);
  }
  auto d2 = reorder_divergence_demo(2, 5);
  for (const auto& b : d2.blocks)
    if (b.qualifying) CHECK(b.jump >= b.bound - 1e-12);
  CHECK_THROWS_AS(reorder_divergence_demo(1, 9), DomainError);
}
