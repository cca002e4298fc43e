#include "reslab/roots.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "reslab/errors.hpp"

namespace reslab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct NewtonStep {
  cplx ratio;         // p(z) / p'(z)
  double residual;    // |p(z)| / Σ|b_n||z|^n
  bool exact_zero;
};

NewtonStep newton_ratio(const std::vector<cplx>& b, cplx z) {
  const std::size_t D = b.size() - 1;
  const double az = std::abs(z);
  if (az <= 1.0) {
    cplx p = b[D], dp(0.0, 0.0);
    double s = std::abs(b[D]);
    for (std::size_t i = D; i-- > 0;) {
      dp = dp * z + p;
      p = p * z + b[i];
      s = s * az + std::abs(b[i]);
    }
    if (p == cplx(0.0, 0.0)) return {cplx(0.0, 0.0), 0.0, true};
    return {p / dp, std::abs(p) / s, false};
  }
  const cplx w = 1.0 / z;
  const double aw = std::abs(w);
  cplx q = b[0], dq(0.0, 0.0);
  double s = std::abs(b[0]);
  for (std::size_t i = 1; i <= D; ++i) {
    dq = dq * w + q;
    q = q * w + b[i];
    s = s * aw + std::abs(b[i]);
  }
  if (q == cplx(0.0, 0.0)) return {cplx(0.0, 0.0), 0.0, true};
  const cplx denom = w * (static_cast<double>(D) - w * dq / q);
  return {1.0 / denom, std::abs(q) / s, false};
}

}  // namespace

std::vector<cplx> aberth_initial_guess(const std::vector<cplx>& coeffs) {
  const std::size_t D = coeffs.size() - 1;
  std::vector<std::size_t> idx;
  for (std::size_t n = 0; n <= D; ++n)
    if (coeffs[n] != cplx(0.0, 0.0)) idx.push_back(n);
  auto lg = [&](std::size_t n) { return std::log(std::abs(coeffs[n])); };
  // Upper convex hull of (n, log|b_n|).
  std::vector<std::size_t> hull;
  for (std::size_t n : idx) {
    while (hull.size() >= 2) {
      const std::size_t a = hull[hull.size() - 2], c = hull.back();
      const double cross = (static_cast<double>(c) - a) * (lg(n) - lg(a)) -
                           (lg(c) - lg(a)) * (static_cast<double>(n) - a);
      if (cross >= 0.0) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(n);
  }
  std::vector<cplx> z;
  z.reserve(D);
  const double sigma = 0.7;
  for (std::size_t e = 0; e + 1 < hull.size(); ++e) {
    const std::size_t i = hull[e], j = hull[e + 1];
    const std::size_t count = j - i;
    const double r = std::exp((lg(i) - lg(j)) / static_cast<double>(count));
    for (std::size_t k = 0; k < count; ++k) {
      const double ang = kTwoPi * static_cast<double>(k) / static_cast<double>(count) +
                         std::numbers::pi / (2.0 * static_cast<double>(count)) + sigma +
                         0.37 * static_cast<double>(e);
      z.push_back(std::polar(r, ang));
    }
  }
  return z;
}

AberthResult aberth_roots(const std::vector<cplx>& coeffs, AberthOptions options) {
  std::size_t D = coeffs.size() - 1;
  while (D > 0 && coeffs[D] == cplx(0.0, 0.0)) --D;
  std::vector<cplx> b(coeffs.begin(), coeffs.begin() + static_cast<std::ptrdiff_t>(D + 1));
  AberthResult result;
  if (D == 0) {
    result.converged = true;
    return result;
  }
  if (b[0] == cplx(0.0, 0.0)) throw DomainError("polynomial has a root at the origin");
  std::vector<cplx> z = aberth_initial_guess(b);
  std::vector<bool> done(D, false);
  std::vector<double> residual(D, 1.0);
  const double eps = std::numeric_limits<double>::epsilon();
  int it = 0;
  for (; it < options.max_iterations; ++it) {
    bool all_done = true;
    for (std::size_t i = 0; i < D; ++i) {
      if (done[i]) continue;
      NewtonStep st = newton_ratio(b, z[i]);
      residual[i] = st.residual;
      if (st.exact_zero) {
        done[i] = true;
        continue;
      }
      cplx sum(0.0, 0.0);
      for (std::size_t j = 0; j < D; ++j)
        if (j != i) sum += 1.0 / (z[i] - z[j]);
      const cplx corr = st.ratio / (1.0 - st.ratio * sum);
      z[i] -= corr;
      if (std::abs(corr) <= 4.0 * eps * std::abs(z[i]) || st.residual <= 8.0 * eps) done[i] = true;
      all_done = all_done && done[i];
    }
    if (all_done) break;
  }
  result.iterations = it;
  bool ok = true;
  for (std::size_t i = 0; i < D; ++i) {
    const double r = newton_ratio(b, z[i]).residual;
    if (!(r <= options.residual_tol)) ok = false;
  }
  result.converged = ok;
  result.roots = std::move(z);
  return result;
}

int winding_number(const std::function<cplx(cplx)>& f, cplx center, double radius,
                   int initial_samples) {
  int M = std::max(64, initial_samples);
  const int max_samples = 1 << 20;
  for (;;) {
    std::vector<cplx> v(static_cast<std::size_t>(M));
    double vmax = 0.0, vmin = std::numeric_limits<double>::infinity();
    for (int j = 0; j < M; ++j) {
      const cplx z = center + std::polar(radius, kTwoPi * j / M);
      v[static_cast<std::size_t>(j)] = f(z);
      const double a = std::abs(v[static_cast<std::size_t>(j)]);
      if (!std::isfinite(a)) throw DomainError("non-finite value on the counting contour");
      vmax = std::max(vmax, a);
      vmin = std::min(vmin, a);
    }
    if (vmin == 0.0 || vmin < 1e-300)
      throw BoundaryAmbiguityError("function vanishes on the counting contour |z - c| = " +
                                   std::to_string(radius));
    double total = 0.0, worst = 0.0;
    for (int j = 0; j < M; ++j) {
      const cplx a = v[static_cast<std::size_t>(j)], c = v[static_cast<std::size_t>((j + 1) % M)];
      const double d = std::arg(c / a);
      worst = std::max(worst, std::abs(d));
      total += d;
    }
    if (worst < std::numbers::pi / 4.0) {
      const double w = total / kTwoPi;
      const double rounded = std::round(w);
      if (std::abs(w - rounded) < 1e-6) return static_cast<int>(rounded);
    }
    if (M >= max_samples)
      throw BoundaryAmbiguityError("argument principle did not resolve on |z - c| = " +
                                   std::to_string(radius));
    M *= 2;
  }
}

}  // namespace reslab
