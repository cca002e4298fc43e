#include "reslab/nuclear_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "reslab/entire_analysis.hpp"
#include "reslab/errors.hpp"
#include "reslab/fitting.hpp"
#include "reslab/horseshoe.hpp"

namespace reslab {

SingularValueModel SingularValueModel::closed_form(double C, double theta, double beta, std::size_t count) {
  SingularValueModel m;
  m.mode = Mode::ClosedForm;
  m.C = C;
  m.theta = theta;
  m.beta = beta;
  m.count = count;
  m.validate();
  return m;
}

SingularValueModel SingularValueModel::from_list(std::vector<cplx> values) {
  SingularValueModel m;
  m.mode = Mode::Explicit;
  m.count = values.size();
  m.explicit_values = std::move(values);
  m.validate();
  return m;
}

cplx SingularValueModel::value(std::size_t m) const {
  if (m < 1 || m > count) throw DomainError("singular value index out of range");
  if (mode == Mode::Explicit) return explicit_values[m - 1];
  return C * std::pow(theta, std::pow(static_cast<double>(m), 1.0 / beta));
}

std::vector<cplx> SingularValueModel::values() const {
  std::vector<cplx> v(count);
  for (std::size_t m = 1; m <= count; ++m) v[m - 1] = value(m);
  return v;
}

void SingularValueModel::validate() const {
  if (mode == Mode::ClosedForm) {
    if (!(C > 0.0) || !std::isfinite(C)) throw DomainError("C must be positive");
    if (!(theta > 0.0 && theta < 1.0)) throw DomainError("theta must lie in (0, 1)");
    if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("beta must be positive");
    return;
  }
  if (explicit_values.size() != count) throw DomainError("explicit list size mismatch");
  for (std::size_t i = 0; i < explicit_values.size(); ++i) {
    const double a = std::abs(explicit_values[i]);
    if (!std::isfinite(a)) throw DomainError("non-finite singular value");
    if (i > 0 && a > std::abs(explicit_values[i - 1])) throw DomainError("|λ_m| must be non-increasing");
  }
}

double ruse_tail_bound(double theta, double beta, std::size_t M) {
  if (!(theta > 0.0 && theta < 1.0) || !(beta > 0.0)) throw DomainError("need 0 < theta < 1 and beta > 0");
  // ∫_M^∞ θ^{x^{1/β}} dx = β Γ(β, L M^{1/β}) / L^β with L = ln(1/θ).
  const double L = -std::log(theta);
  const double x = L * std::pow(static_cast<double>(M), 1.0 / beta);
  return beta * boost::math::tgamma(beta, x) / std::pow(L, beta);
}

std::size_t ruse_terms_needed(double theta, double beta, double tol) {
  std::size_t hi = 1;
  while (ruse_tail_bound(theta, beta, hi) >= tol) {
    hi *= 2;
    if (hi > (std::size_t{1} << 26)) throw ResourceError("too many factors for the requested tail");
  }
  std::size_t lo = hi / 2;
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    (ruse_tail_bound(theta, beta, mid) < tol ? hi : lo) = mid;
  }
  return hi;
}

std::vector<double> ruse_coefficients(double theta, double beta, std::size_t M, std::size_t N) {
  if (M == 0) M = ruse_terms_needed(theta, beta);
  if (!(ruse_tail_bound(theta, beta, M) < 1e-15))
    throw PreconditionError("omitted tail of the product exceeds 1e-15; increase M");
  std::vector<double> a(N + 1, 0.0);
  a[0] = 1.0;
  // Smallest factors first.
  for (std::size_t m = M; m >= 1; --m) {
    const double x = std::pow(theta, std::pow(static_cast<double>(m), 1.0 / beta));
    for (std::size_t n = N; n >= 1; --n) a[n] += x * a[n - 1];
  }
  return a;
}

std::string to_string(FitVerdict v) {
  switch (v) {
    case FitVerdict::Pass: return "pass";
    case FitVerdict::Fail: return "fail";
    case FitVerdict::Undetermined: return "undetermined";
  }
  return "undetermined";
}

StretchedBoundFit fit_stretched_bound(const std::vector<double>& values, double exponent_hypothesis,
                                      std::size_t first_index) {
  if (!(exponent_hypothesis > 0.0)) throw DomainError("exponent hypothesis must be positive");
  StretchedBoundFit out;
  std::vector<double> n, logs;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = std::abs(values[i]);
    if (!(v > 0.0) || !std::isfinite(v)) continue;
    n.push_back(static_cast<double>(first_index + i));
    logs.push_back(std::log(v));
  }
  if (n.size() < 10) {
    out.reason = "fewer than 10 nonzero values";
    return out;
  }
  const double span = (*std::max_element(logs.begin(), logs.end()) - *std::min_element(logs.begin(), logs.end())) /
                      std::numbers::ln10;
  if (span < 3.0) {
    out.reason = "decay spans fewer than 3 decades";
    return out;
  }
  std::vector<double> x(n.size());
  for (std::size_t i = 0; i < n.size(); ++i) x[i] = std::pow(n[i], exponent_hypothesis);
  const LinearFit lf = linear_fit(x, logs);
  out.D_fit = -lf.slope;
  out.intercept = lf.intercept;
  out.r_squared = lf.r_squared;
  const StretchedFit sf = stretched_fit(n, logs, 0.25, 8.0);
  out.exponent_fit = sf.exponent;
  out.free_r_squared = sf.r_squared;
  if (!(lf.slope < 0.0)) {
    out.verdict = FitVerdict::Fail;
    out.reason = "log|a_n| does not decrease against n^q";
  } else if (lf.r_squared < 0.98) {
    out.verdict = FitVerdict::Fail;
    out.reason = "R^2 below 0.98";
  } else if (sf.exponent < exponent_hypothesis - 0.2) {
    out.verdict = FitVerdict::Fail;
    out.reason = "decay slower than the hypothesised exponent";
  } else {
    out.verdict = FitVerdict::Pass;
  }
  return out;
}

PowerSeries diagonal_det_coefficients(const SingularValueModel& model, std::size_t N) {
  model.validate();
  std::vector<cplx> a(N + 1, cplx(0.0, 0.0));
  a[0] = 1.0;
  for (std::size_t m = model.count; m >= 1; --m) {
    const cplx lam = model.value(m);
    for (std::size_t n = N; n >= 1; --n) a[n] -= lam * a[n - 1];
  }
  return PowerSeries(std::move(a));
}

std::vector<double> nuclear_coefficient_bound(const SingularValueModel& model, std::size_t N, bool hadamard) {
  model.validate();
  std::vector<double> e(N + 1, 0.0);
  e[0] = 1.0;
  for (std::size_t m = model.count; m >= 1; --m) {
    const double x = std::abs(model.value(m));
    for (std::size_t n = N; n >= 1; --n) e[n] += x * e[n - 1];
  }
  if (hadamard)
    for (std::size_t n = 1; n <= N; ++n) e[n] *= std::pow(static_cast<double>(n), 0.5 * static_cast<double>(n));
  return e;
}

PrecedReport preced_check(double beta, std::vector<double> r_list) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw DomainError("beta must be non-negative");
  if (r_list.empty()) throw DomainError("empty radius list");
  std::sort(r_list.begin(), r_list.end());
  PrecedReport rep;
  rep.beta = beta;
  for (double r : r_list) {
    if (!(r >= 2.0) || !std::isfinite(r)) throw DomainError("preced_check requires r >= 2");
    const double lr = std::log(r);
    const double U = lr + 50.0 * beta;
    PrecedRow row;
    row.r = r;
    double err = 0.0;
    double quad = 0.0;
    if (U > lr) {
      auto f = [&](double u) { return std::exp(lr - u + (u > 0.0 ? beta * std::log(u) : 0.0)); };
      quad = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lr, U, 15, 1e-14, &err);
    }
    const double tail = r * boost::math::tgamma(beta + 1.0, U);
    row.integral = quad + tail;
    row.error = err;
    row.closed_form = r * boost::math::tgamma(beta + 1.0, lr);
    if (!std::isfinite(row.integral) || err > 1e-9 * std::max(1.0, row.integral))
      throw NonConvergenceError("quadrature did not converge at r = " + std::to_string(r), err);
    row.ratio = row.integral / std::pow(lr, beta);
    rep.rows.push_back(row);
  }
  rep.bounded = true;
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    rep.max_ratio = std::max(rep.max_ratio, rep.rows[i].ratio);
    if (!std::isfinite(rep.rows[i].ratio)) rep.bounded = false;
    if (i > 0 && rep.rows[i].ratio > rep.rows[i - 1].ratio * (1.0 + 1e-12)) rep.bounded = false;
  }
  return rep;
}

DecayCertificate counting_to_decay(const std::vector<double>& a_seq, double beta) {
  if (!(beta > 0.0)) throw DomainError("beta must be positive");
  for (std::size_t i = 0; i < a_seq.size(); ++i) {
    if (!(a_seq[i] > 0.0) || !std::isfinite(a_seq[i])) throw DomainError("sequence must be positive");
    if (i > 0 && a_seq[i] > a_seq[i - 1]) throw DomainError("sequence must be non-increasing");
  }
  DecayCertificate cert;
  std::size_t prefix = 0;
  while (prefix < a_seq.size() && a_seq[prefix] >= 0.5) ++prefix;
  cert.prefix = prefix;
  if (a_seq.size() - prefix < 3) throw InsufficientDataError("fewer than 3 terms below 1/2");

  // #{k : a_k ≥ a_m}, maximal over ties.
  auto count_at = [&](std::size_t m) {
    std::size_t j = m;
    while (j + 1 < a_seq.size() && a_seq[j + 1] == a_seq[m]) ++j;
    return static_cast<double>(j + 1);
  };
  std::vector<double> x, y;
  double worst = 0.0;
  for (std::size_t m = prefix; m < a_seq.size(); ++m) {
    const double L = -std::log(a_seq[m]);
    const double c = count_at(m);
    const double ratio = c / std::pow(L, beta);
    if (ratio > cert.M) {
      cert.M = ratio;
      worst = a_seq[m];
    }
    x.push_back(std::log(L));
    y.push_back(std::log(c));
  }
  cert.count_exponent = linear_fit(x, y).slope;
  if (cert.count_exponent > beta + 0.25) {
    cert.witness_epsilon = worst;
    cert.reason = "count grows like ln(1/eps)^" + std::to_string(cert.count_exponent) + ", beyond beta";
    return cert;
  }
  cert.theta = std::exp(-std::pow(cert.M, -1.0 / beta));
  auto envelope = [&](std::size_t m) { return std::pow(cert.theta, std::pow(static_cast<double>(m), 1.0 / beta)); };
  cert.C = 1.0;
  for (std::size_t m = 0; m < prefix; ++m) cert.C = std::max(cert.C, a_seq[m] / envelope(m));
  for (std::size_t m = prefix; m < a_seq.size(); ++m) {
    if (a_seq[m] > envelope(m) * (1.0 + 1e-12)) {
      cert.witness_epsilon = a_seq[m];
      cert.reason = "decay envelope violated at m = " + std::to_string(m);
      return cert;
    }
  }
  cert.ok = true;
  return cert;
}

namespace {

bool ratios_bounded(const std::vector<double>& ratio) {
  if (ratio.size() < 2) return false;
  const std::size_t half = ratio.size() / 2;
  double lo = 0.0, hi = 0.0;
  for (std::size_t i = 0; i < ratio.size(); ++i) {
    if (!std::isfinite(ratio[i])) return false;
    (i < half ? lo : hi) = std::max(i < half ? lo : hi, ratio[i]);
  }
  return hi <= 1.1 * lo + 1e-12;
}

}  // namespace

GrowthCountingReport growth_and_counting_check(const std::function<double(cplx)>& log_abs,
                                               const std::function<long(double)>& count, double beta,
                                               double r_min, double decades, std::size_t samples) {
  if (!(beta >= 0.0)) throw DomainError("beta must be non-negative");
  if (!(r_min > 1.0) || !(decades > 0.0) || samples < 3) throw DomainError("need r_min > 1, decades > 0, samples >= 3");
  GrowthCountingReport rep;
  rep.beta = beta;
  const double q = 1.0 + beta;
  std::vector<double> xs, ys, cx, cy;
  for (std::size_t i = 0; i < samples; ++i) {
    const double R = r_min * std::pow(10.0, decades * static_cast<double>(i) / static_cast<double>(samples - 1));
    double sup = 0.0;
    constexpr int kCircle = 1024;
    for (int j = 0; j < kCircle; ++j)
      sup = std::max(sup, log_abs(std::polar(R, 2.0 * std::numbers::pi * j / kCircle)));
    const double lR = std::log(R);
    rep.radii.push_back(R);
    rep.log_max.push_back(sup);
    rep.growth_ratio.push_back(sup / std::pow(lR, q));
    if (sup > 0.0) {
      xs.push_back(lR);
      ys.push_back(-sup);
    }
    // Jensen circle |z| = R counts zeros of modulus < R/2.
    const double r = 2.0 / R;
    const long c = count(r);
    rep.count_r.push_back(r);
    rep.counts.push_back(c);
    rep.count_ratio.push_back(static_cast<double>(c) / std::pow(-std::log(r), q));
    if (c > 0 && r < 1.0) {
      cx.push_back(std::log(-std::log(r)));
      cy.push_back(std::log(static_cast<double>(c)));
    }
  }
  rep.max_radius = rep.radii.back();
  if (xs.size() >= 3) rep.growth_exponent = stretched_fit(xs, ys, 0.25, 10.0).exponent;
  if (cx.size() >= 2) rep.count_exponent = linear_fit(cx, cy).slope;
  rep.growth_bounded = ratios_bounded(rep.growth_ratio);
  rep.counts_bounded = ratios_bounded(rep.count_ratio);
  return rep;
}

GrowthCountingReport growth_and_counting_check(const PowerSeries& series, double beta, double r_min,
                                               double decades, std::size_t samples) {
  const double certified = reliability_radius(series, 1e-12);
  double top = r_min * std::pow(10.0, decades);
  bool truncated = false;
  if (!(top < certified)) {
    truncated = true;
    top = 0.999 * certified;
    if (!(top > r_min * 10.0))
      throw UnreliableTruncationError("reliability radius too small for a growth fit", certified);
    decades = std::log10(top / r_min);
  }
  auto log_abs = [&](cplx z) { return std::log(std::abs(series.evaluate(z))); };
  auto count = [&](double r) { return jensen_count(log_abs, r); };
  GrowthCountingReport rep = growth_and_counting_check(log_abs, count, beta, r_min, decades, samples);
  rep.truncated = truncated;
  std::vector<double> mags;
  for (std::size_t n = 1; n <= series.order(); ++n) mags.push_back(std::abs(series[n]));
  if (beta > 0.0) rep.coefficient_fit = fit_stretched_bound(mags, 1.0 + 1.0 / beta);
  return rep;
}

}  // namespace reslab
