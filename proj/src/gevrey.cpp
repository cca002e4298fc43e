#include "reslab/gevrey.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "reslab/errors.hpp"
#include "reslab/fft.hpp"
#include "reslab/fitting.hpp"

namespace reslab {

GevreyProfile GevreyProfile::gaussian(double sigma, unsigned log2_size, double extent) {
  GevreyProfile p;
  p.family = GevreyFamily::Gaussian;
  p.sigma = sigma;
  p.log2_size = log2_size;
  p.extent = extent;
  p.validate();
  return p;
}

GevreyProfile GevreyProfile::bump(double a, unsigned log2_size, double extent) {
  GevreyProfile p;
  p.family = GevreyFamily::Bump;
  p.a = a;
  p.sigma = 1.0 + 1.0 / a;
  p.log2_size = log2_size;
  p.extent = extent;
  p.validate();
  return p;
}

GevreyProfile GevreyProfile::indicator(double sigma, unsigned log2_size, double extent) {
  GevreyProfile p;
  p.family = GevreyFamily::Indicator;
  p.sigma = sigma;
  p.log2_size = log2_size;
  p.extent = extent;
  p.validate();
  return p;
}

GevreyProfile GevreyProfile::from_function(std::function<double(double)> f, double sigma, unsigned log2_size,
                                           double extent) {
  GevreyProfile p;
  p.family = GevreyFamily::Sampled;
  p.sampled = std::move(f);
  p.sigma = sigma;
  p.log2_size = log2_size;
  p.extent = extent;
  p.validate();
  return p;
}

GevreyFamily GevreyProfile::parse_family(const std::string& name) {
  if (name == "gaussian") return GevreyFamily::Gaussian;
  if (name == "bump" || name == "bump_a") return GevreyFamily::Bump;
  if (name == "indicator") return GevreyFamily::Indicator;
  throw DomainError("unknown Gevrey family '" + name + "'");
}

std::string GevreyProfile::family_name() const {
  switch (family) {
    case GevreyFamily::Gaussian: return "gaussian";
    case GevreyFamily::Bump: return "bump_a";
    case GevreyFamily::Indicator: return "indicator";
    case GevreyFamily::Sampled: return "sampled";
  }
  return "sampled";
}

void GevreyProfile::validate() const {
  if (!(sigma > 1.0) || !std::isfinite(sigma)) throw DomainError("sigma must exceed 1");
  if (log2_size < 4 || log2_size > 26) throw DomainError("grid size must be 2^p with 4 <= p <= 26");
  if (family == GevreyFamily::Bump && !(a > 0.0)) throw DomainError("bump exponent must be positive");
  if (family == GevreyFamily::Sampled && !sampled) throw DomainError("sampled profile without a function");
  // Decaying families must be negligible at the boundary.
  const double edge = std::max(std::abs(value(-extent)), std::abs(value(extent * (1.0 - 1e-12))));
  if (!(extent > 0.0) || edge >= 1e-14) throw DomainError("grid extent too small for the profile to decay");
}

double GevreyProfile::value(double x) const {
  switch (family) {
    case GevreyFamily::Gaussian: return std::exp(-x * x);
    case GevreyFamily::Bump:
      if (!(std::abs(x) < 1.0)) return 0.0;
      return std::exp(-std::pow(1.0 + x, -a) - std::pow(1.0 - x, -a));
    case GevreyFamily::Indicator: return std::abs(x) <= 1.0 ? 1.0 : 0.0;
    case GevreyFamily::Sampled: return sampled(x);
  }
  return 0.0;
}

std::vector<double> GevreyProfile::derivatives(double x, unsigned order) const {
  std::vector<double> d(order + 1, 0.0);
  if (family == GevreyFamily::Gaussian) {
    // f^{(k)} = (-1)^k H_k(x) e^{-x²}.
    const double e = std::exp(-x * x);
    double h0 = 1.0, h1 = 2.0 * x;
    d[0] = e;
    if (order >= 1) d[1] = -h1 * e;
    for (unsigned k = 1; k < order; ++k) {
      const double h2 = 2.0 * x * h1 - 2.0 * k * h0;
      h0 = h1;
      h1 = h2;
      d[k + 1] = ((k + 1) % 2 ? -1.0 : 1.0) * h1 * e;
    }
    return d;
  }
  if (family == GevreyFamily::Bump) {
    if (!(std::abs(x) < 1.0)) return d;
    // Taylor coefficients of g(x+t) = -(1+x+t)^{-a} - (1-x-t)^{-a}, then of exp(g).
    const double cp = 1.0 + x, cm = 1.0 - x;
    std::vector<double> g(order + 1);
    double binom = 1.0;
    for (unsigned k = 0; k <= order; ++k) {
      if (k > 0) binom *= (-a - static_cast<double>(k) + 1.0) / static_cast<double>(k);
      const double up = std::pow(cp, -a - static_cast<double>(k));
      const double um = std::pow(cm, -a - static_cast<double>(k)) * (k % 2 ? -1.0 : 1.0);
      g[k] = -binom * (up + um);
    }
    if (g[0] < -700.0) return d;
    std::vector<double> e(order + 1);
    e[0] = std::exp(g[0]);
    for (unsigned k = 1; k <= order; ++k) {
      double s = 0.0;
      for (unsigned j = 1; j <= k; ++j) s += static_cast<double>(j) * g[j] * e[k - j];
      e[k] = s / static_cast<double>(k);
    }
    double fact = 1.0;
    for (unsigned k = 0; k <= order; ++k) {
      if (k > 0) fact *= static_cast<double>(k);
      d[k] = fact * e[k];
    }
    return d;
  }
  throw UnsupportedError("no exact derivative recursion for the " + family_name() + " family");
}

double GevreyProfile::spacing() const { return 2.0 * extent / static_cast<double>(std::size_t{1} << log2_size); }

std::vector<double> GevreyProfile::grid() const {
  const std::size_t n = std::size_t{1} << log2_size;
  std::vector<double> x(n);
  const double h = spacing();
  for (std::size_t j = 0; j < n; ++j) x[j] = -extent + h * static_cast<double>(j);
  return x;
}

GevreyConditionReport gevrey_condition_check(const GevreyProfile& profile, unsigned alpha_max, double r_max) {
  profile.validate();
  if (alpha_max < 1 || alpha_max > 12) throw DomainError("alpha_max must lie in [1, 12]");
  GevreyConditionReport rep;
  if (profile.family == GevreyFamily::Indicator) {
    rep.sup_norms = {1.0};
    rep.C = 1.0;
    rep.failure_order = 1;
    rep.reason = "no classical derivative at the jumps";
    return rep;
  }
  rep.sup_norms.assign(alpha_max + 1, 0.0);
  for (double x : profile.grid()) {
    const auto d = profile.derivatives(x, alpha_max);
    for (unsigned k = 0; k <= alpha_max; ++k) rep.sup_norms[k] = std::max(rep.sup_norms[k], std::abs(d[k]));
  }
  rep.C = rep.sup_norms[0];
  if (!(rep.C > 0.0)) throw DegenerateInputError("profile vanishes on the grid");
  rep.R = 1.0;
  rep.local_rates.assign(alpha_max + 1, 0.0);
  for (unsigned k = 1; k <= alpha_max; ++k) {
    const double kk = static_cast<double>(k);
    const double budget = std::log(rep.C) + profile.sigma * kk * std::log(kk);
    rep.local_rates[k] = std::exp((std::log(rep.sup_norms[k]) - budget) / kk);
    rep.R = std::max(rep.R, rep.local_rates[k]);
  }
  // Upward drift of the local rates over the upper half of the orders means σ is too small.
  double drift = 0.0;
  if (alpha_max >= 4) {
    std::vector<double> lk, lr;
    for (unsigned k = (alpha_max + 1) / 2; k <= alpha_max; ++k) {
      lk.push_back(std::log(static_cast<double>(k)));
      lr.push_back(std::log(rep.local_rates[k]));
    }
    drift = linear_fit(lk, lr).slope;
  }
  if (!std::isfinite(rep.R)) {
    rep.reason = "non-finite derivative bound";
  } else if (rep.R > r_max) {
    rep.reason = "required R exceeds " + std::to_string(r_max);
  } else if (drift > 0.25) {
    rep.reason = "derivative rates grow faster than k^{sigma k}";
  } else {
    rep.ok = true;
  }
  if (!rep.ok)
    for (unsigned k = 1; k <= alpha_max; ++k)
      if (rep.local_rates[k] > r_max || (k > 1 && rep.local_rates[k] > rep.local_rates[k - 1])) {
        rep.failure_order = k;
        break;
      }
  return rep;
}

std::string to_string(DecayVerdict v) {
  switch (v) {
    case DecayVerdict::Pass: return "pass";
    case DecayVerdict::Fail: return "fail";
    case DecayVerdict::Undetermined: return "undetermined";
  }
  return "undetermined";
}

namespace {

// |f̂(ξ_k)| for k < n/2 with ξ_k = 2πk/(n h).
std::vector<double> spectrum(const GevreyProfile& p, unsigned log2_size) {
  const std::size_t n = std::size_t{1} << log2_size;
  const double h = 2.0 * p.extent / static_cast<double>(n);
  std::vector<cplx> s(n);
  for (std::size_t j = 0; j < n; ++j) s[j] = p.value(-p.extent + h * static_cast<double>(j));
  const auto F = fft_forward(s);
  std::vector<double> out(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) out[k] = std::abs(F[k]) * h;
  return out;
}

}  // namespace

FourierDecayReport fourier_decay_check(const GevreyProfile& profile) {
  profile.validate();
  FourierDecayReport rep;
  rep.threshold = (1.0 / profile.sigma) * (1.0 - 0.15);
  const auto F = spectrum(profile, profile.log2_size);
  const double F0 = F[0];
  if (!(F0 > 0.0)) throw DegenerateInputError("profile has zero mean; normalisation by f̂(0) impossible");
  const double dxi = std::numbers::pi / profile.extent;
  std::vector<double> env(F.size());
  double run = 0.0;
  for (std::size_t k = F.size(); k-- > 0;) {
    run = std::max(run, F[k] / F0);
    env[k] = run;
  }
  const bool reached_floor = env.back() < 1e-12;
  const double lower = reached_floor ? 1e-12 : env.back();
  std::vector<double> xs, ys;
  for (std::size_t k = 1; k < env.size(); ++k) {
    if (env[k] > 1e-2 || env[k] < lower) continue;
    xs.push_back(dxi * static_cast<double>(k));
    ys.push_back(std::log(env[k]));
  }
  if (xs.size() >= 3) rep.decades = (ys.front() - ys.back()) / std::numbers::ln10;
  // Thin to about 2000 log-spaced abscissae.
  if (xs.size() > 4000) {
    std::vector<double> tx, ty;
    const double l0 = std::log(xs.front()), l1 = std::log(xs.back());
    double next = l0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (std::log(xs[i]) + 1e-15 < next && i + 1 != xs.size()) continue;
      tx.push_back(xs[i]);
      ty.push_back(ys[i]);
      next = std::log(xs[i]) + (l1 - l0) / 2000.0;
    }
    xs.swap(tx);
    ys.swap(ty);
  }
  rep.xi = xs;
  for (double y : ys) rep.envelope.push_back(std::exp(y));

  if (!reached_floor) {
    // Decay stalls above the floor: a power law is the signature of a non-smooth profile.
    if (rep.decades < 1.0) {
      rep.reason = "decay too slow to fit on the resolved frequency range";
      return rep;
    }
    std::vector<double> lx;
    for (double x : xs) lx.push_back(std::log(x));
    const LinearFit pl = linear_fit(lx, ys);
    const StretchedFit sf = stretched_fit(xs, ys, 0.01, 4.0);
    rep.exponent = sf.exponent;
    rep.rate = sf.rate;
    rep.r_squared = sf.r_squared;
    if (pl.r_squared >= 0.95 || sf.exponent < rep.threshold) {
      rep.non_gevrey = true;
      rep.verdict = DecayVerdict::Fail;
      rep.reason = "algebraic decay of the Fourier transform (slope " + std::to_string(pl.slope) + ")";
    } else {
      rep.reason = "floor not reached on the resolved frequency range";
    }
    return rep;
  }

  if (profile.log2_size < 26) {
    const auto F2 = spectrum(profile, profile.log2_size + 1);
    for (std::size_t k = 0; k < F.size(); ++k) rep.aliasing = std::max(rep.aliasing, std::abs(F[k] - F2[k]) / F0);
    if (rep.aliasing > 1e-12) {
      rep.reason = "transform not resolved by the grid (aliasing " + std::to_string(rep.aliasing) + ")";
      return rep;
    }
  }
  if (rep.decades < 4.0) {
    rep.reason = "dynamic range below 4 decades";
    return rep;
  }
  const StretchedFit sf = stretched_fit(xs, ys, 0.01, 4.0);
  rep.exponent = sf.exponent;
  rep.rate = sf.rate;
  rep.r_squared = sf.r_squared;
  rep.verdict = sf.exponent >= rep.threshold ? DecayVerdict::Pass : DecayVerdict::Fail;
  if (rep.verdict == DecayVerdict::Fail) rep.reason = "decay slower than exp(-|xi|^{1/sigma})";
  return rep;
}

}  // namespace reslab
