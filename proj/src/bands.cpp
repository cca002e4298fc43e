#include "reslab/bands.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "reslab/errors.hpp"

namespace reslab {

double band_cutoff(double x) {
  if (x <= 0.5) return 1.0;
  if (x >= 1.0) return 0.0;
  const double s = 2.0 * (x - 0.5);
  return 1.0 - s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

double BandPartition::chi(long n, double rho) const {
  if (n <= 0) return 0.0;
  return band_cutoff(rho - std::pow(static_cast<double>(n), alpha));
}

double BandPartition::psi_value(std::size_t n, double rho) const {
  const long m = static_cast<long>(n);
  return chi(m + 1, rho) - chi(m, rho);
}

double BandPartition::psi_tilde_value(std::size_t n, double rho) const {
  const long m = static_cast<long>(n);
  return chi(m + 2, rho) - chi(m - 1, rho);
}

double BandPartition::covered_radius() const {
  return std::pow(static_cast<double>(n_bands + 1), alpha) + 0.5;
}

std::pair<double, double> BandPartition::support_bound(std::size_t n) const {
  if (n == 0) return {0.0, 2.0};
  return {std::pow(static_cast<double>(n), alpha), std::pow(static_cast<double>(n + 1), alpha) + 1.0};
}

std::vector<double> default_radial_grid(double alpha, std::size_t n_bands, double extent) {
  const double top = std::max(extent, std::pow(static_cast<double>(n_bands + 2), alpha) + 2.0);
  std::vector<double> g{0.0};
  for (std::size_t m = 1; m <= n_bands + 2; ++m) {
    const double c = std::pow(static_cast<double>(m), alpha);
    for (int k = 0; k <= 100; ++k) g.push_back(c + 0.45 + 0.6 * k / 100.0);
  }
  for (int k = 0; k <= 200; ++k) g.push_back(2.0 * k / 200.0);
  for (int k = 0; k <= 2000; ++k) g.push_back(std::exp(std::log(1e-3) + (std::log(top) - std::log(1e-3)) * k / 2000.0));
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

BandPartition build_band_partition(double alpha, std::size_t n_bands, std::vector<double> radii) {
  if (!(alpha > 1.0) || !std::isfinite(alpha)) throw DomainError("band exponent must exceed 1");
  if (n_bands < 1 || n_bands > 16) throw DomainError("number of bands must lie in [1, 16]");
  BandPartition b;
  b.alpha = alpha;
  b.n_bands = n_bands;
  if (radii.empty()) radii = default_radial_grid(alpha, n_bands);
  std::sort(radii.begin(), radii.end());
  if (radii.front() < 0.0) throw DomainError("radii must be non-negative");
  const double need = std::pow(static_cast<double>(n_bands + 1), alpha) + 1.0;
  if (radii.back() < need)
    throw DomainError("grid extent " + std::to_string(radii.back()) + " below (N+1)^alpha + 1 = " + std::to_string(need));
  b.radii = std::move(radii);
  b.psi.assign(n_bands + 1, std::vector<double>(b.radii.size()));
  for (std::size_t n = 0; n <= n_bands; ++n)
    for (std::size_t k = 0; k < b.radii.size(); ++k) b.psi[n][k] = b.psi_value(n, b.radii[k]);
  b.supports_ok = true;
  const double covered = b.covered_radius();
  for (std::size_t k = 0; k < b.radii.size(); ++k) {
    double sum = 0.0;
    std::size_t live = 0;
    for (std::size_t n = 0; n <= n_bands; ++n) {
      const double v = b.psi[n][k];
      sum += v;
      if (v != 0.0) {
        ++live;
        const auto [lo, hi] = b.support_bound(n);
        if (b.radii[k] < lo || b.radii[k] > hi) b.supports_ok = false;
      }
    }
    b.max_overlap = std::max(b.max_overlap, live);
    if (b.radii[k] <= covered) b.partition_error = std::max(b.partition_error, std::abs(sum - 1.0));
  }
  return b;
}

FourierTestFunction gaussian_packet(const std::string& name, const Vec2& center, double width) {
  if (!(width > 0.0)) throw DomainError("packet width must be positive");
  FourierTestFunction f;
  f.name = name;
  f.fhat_abs = [center, width](const Vec2& xi) { return std::exp(-(xi - center).squaredNorm() / (width * width)); };
  f.rho_min = std::max(0.0, center.norm() - 7.0 * width);
  f.rho_max = center.norm() + 7.0 * width;
  return f;
}

namespace {

struct PointValues {
  double weight = 0.0;
  double band_sum = 0.0;
  double partition = 0.0;
  std::size_t live = 0;
};

PointValues evaluate(const ConeFamily& cones, const BandPartition& bands, double rho, double delta) {
  PointValues pv;
  std::vector<double> phi(cones.r + 1);
  for (unsigned i = 0; i <= cones.r; ++i) phi[i] = cones.phi_of_angle(i, delta);
  const double psi0 = bands.psi_value(0, rho);
  const double root = std::pow(rho, 1.0 / bands.alpha);
  double outer = 0.0;
  for (unsigned i = 0; i <= cones.r; ++i) outer += phi[i] * std::exp(cones.t_bar[i] * root);
  pv.weight = psi0 + (1.0 - psi0) * outer;
  for (unsigned i = 0; i <= cones.r; ++i) {
    const double v = psi0 * phi[i];
    if (v == 0.0) continue;
    ++pv.live;
    pv.partition += v;
    pv.band_sum += v * v;
  }
  // ψ_n(ρ) ≠ 0 only for n^α < ρ < (n+1)^α + 1.
  const std::size_t first = rho > 1.0 ? static_cast<std::size_t>(std::pow(rho - 1.0, 1.0 / bands.alpha)) : 0;
  const std::size_t last = std::min(bands.n_bands, static_cast<std::size_t>(root) + 1);
  for (std::size_t n = std::max<std::size_t>(first, 1); n <= last; ++n) {
    const double p = bands.psi_value(n, rho);
    if (p == 0.0) continue;
    for (unsigned i = 0; i <= cones.r; ++i) {
      const double v = p * phi[i];
      if (v == 0.0) continue;
      ++pv.live;
      pv.partition += v;
      pv.band_sum += std::exp(2.0 * cones.t_bar[i] * static_cast<double>(n)) * v * v;
    }
  }
  return pv;
}

// Composite Simpson nodes on [a, b], split at the given breakpoints.
void simpson_nodes(double a, double b, std::vector<double> breaks, double step, std::size_t min_intervals,
                   std::vector<double>& x, std::vector<double>& w) {
  x.clear();
  w.clear();
  breaks.push_back(a);
  breaks.push_back(b);
  std::sort(breaks.begin(), breaks.end());
  double prev = a;
  for (double c : breaks) {
    if (c <= prev || c > b) continue;
    std::size_t m = std::max(min_intervals, static_cast<std::size_t>(std::ceil((c - prev) / step)));
    m += m % 2;
    const double h = (c - prev) / static_cast<double>(m);
    for (std::size_t k = 0; k <= m; ++k) {
      const double wk = h / 3.0 * ((k == 0 || k == m) ? 1.0 : (k % 2 ? 4.0 : 2.0));
      if (k == 0 && !x.empty()) {
        w.back() += wk;
        continue;
      }
      x.push_back(prev + h * static_cast<double>(k));
      w.push_back(wk);
    }
    prev = c;
  }
}

double axis_angle_of(const ConeFamily& cones, double theta) {
  double t = std::fmod(theta - cones.axis, std::numbers::pi);
  if (t < 0.0) t += std::numbers::pi;
  return std::min(t, std::numbers::pi - t);
}

}  // namespace

double anisotropic_weight(const ConeFamily& cones, const BandPartition& bands, const Vec2& xi) {
  return evaluate(cones, bands, xi.norm(), cones.axis_angle(xi)).weight;
}

double band_weight_sum(const ConeFamily& cones, const BandPartition& bands, const Vec2& xi) {
  return evaluate(cones, bands, xi.norm(), cones.axis_angle(xi)).band_sum;
}

EquivalenceReport weight_and_equivalence(const ConeFamily& cones, const BandPartition& bands,
                                         const std::vector<FourierTestFunction>& tests, std::size_t angles) {
  cones.validate();
  if (angles < 16) throw DomainError("need at least 16 angular samples");
  EquivalenceReport rep;
  const std::size_t N = bands.n_bands;
  const double covered = bands.covered_radius();
  rep.fine_constants.assign(N + 1, 1.0);
  rep.band_sandwich.assign(N + 1, 1.0);
  double tmax = 0.0;
  for (double t : cones.t_bar) tmax = std::max(tmax, std::abs(t));

  auto fold = [&](double rho, const PointValues& pv) {
    const double w2 = pv.weight * pv.weight;
    const double c = std::max(pv.band_sum / w2, w2 / pv.band_sum);
    rep.sandwich_constant = std::max(rep.sandwich_constant, c);
    rep.max_simultaneous = std::max(rep.max_simultaneous, pv.live);
    rep.partition_error = std::max(rep.partition_error, std::abs(pv.partition - 1.0));
    for (std::size_t n = 1; n <= N; ++n) {
      const double lo = std::pow(static_cast<double>(n), bands.alpha) + 0.5;
      const double hi = std::pow(static_cast<double>(n + 1), bands.alpha) + 1.0;
      if (rho < lo || rho > hi) continue;
      rep.band_sandwich[n] = std::max(rep.band_sandwich[n], c);
      const double dev = std::abs(std::pow(rho, 1.0 / bands.alpha) - static_cast<double>(n));
      rep.fine_constants[n] = std::max(rep.fine_constants[n], std::exp(tmax * dev));
    }
  };

  for (double rho : bands.radii) {
    if (rho > covered) continue;
    for (std::size_t k = 0; k < angles; ++k) {
      const double theta = std::numbers::pi * static_cast<double>(k) / static_cast<double>(angles);
      fold(rho, evaluate(cones, bands, rho, axis_angle_of(cones, theta)));
    }
  }

  std::vector<double> radial_breaks{1.5, 2.0};
  for (std::size_t m = 1; m <= N + 1; ++m) {
    radial_breaks.push_back(std::pow(static_cast<double>(m), bands.alpha) + 0.5);
    radial_breaks.push_back(std::pow(static_cast<double>(m), bands.alpha) + 1.0);
  }
  std::vector<double> angular_breaks;
  for (int k = -1; k <= 2; ++k) {
    const double base = cones.axis + std::numbers::pi * k;
    angular_breaks.push_back(base + std::numbers::pi / 2.0);
    for (unsigned i = 1; i <= cones.r; ++i)
      for (double d : {cones.ramp_start[i], cones.ramp_end[i]}) {
        angular_breaks.push_back(base + d);
        angular_breaks.push_back(base - d);
      }
  }

  // Polar composite Simpson, split where the cutoffs change formula.
  auto integrate = [&](const FourierTestFunction& f, double h_rad, double h_ang, std::size_t min_iv, double& num,
                       double& den) {
    std::vector<double> xr, wr, xt, wt;
    simpson_nodes(f.rho_min, f.rho_max, radial_breaks, h_rad, min_iv, xr, wr);
    simpson_nodes(0.0, 2.0 * std::numbers::pi, angular_breaks, h_ang, min_iv, xt, wt);
    num = den = 0.0;
    for (std::size_t k = 0; k < xr.size(); ++k) {
      const double rho = xr[k];
      double sn = 0.0, sd = 0.0;
      for (std::size_t q = 0; q < xt.size(); ++q) {
        const Vec2 xi(rho * std::cos(xt[q]), rho * std::sin(xt[q]));
        const double g = f.fhat_abs(xi);
        if (g < 1e-20) continue;
        const PointValues pv = evaluate(cones, bands, rho, axis_angle_of(cones, xt[q]));
        fold(rho, pv);
        sn += wt[q] * g * g * pv.band_sum;
        sd += wt[q] * g * g * pv.weight * pv.weight;
      }
      num += wr[k] * rho * sn;
      den += wr[k] * rho * sd;
    }
  };

  rep.ratios_within = true;
  for (const auto& f : tests) {
    if (!(f.rho_max > f.rho_min) || f.rho_min < 0.0) throw DomainError("test function radial range invalid");
    if (f.rho_max > covered)
      throw DomainError("test function '" + f.name + "' extends beyond the retained bands");
    const double h_rad = (f.rho_max - f.rho_min) / 400.0;
    const double h_ang = std::min(2.0 * std::numbers::pi / static_cast<double>(angles), h_rad / f.rho_max);
    double n1, d1, n2, d2;
    integrate(f, h_rad, h_ang, 8, n1, d1);
    integrate(f, 2.0 * h_rad, 2.0 * h_ang, 8, n2, d2);
    const double r1 = n1 / d1, r2 = n2 / d2;
    if (!(d1 > 0.0) || !std::isfinite(r1) || std::abs(r1 - r2) > 1e-4 * r1)
      throw NonConvergenceError("Fourier transform of '" + f.name + "' not resolved by the integration grid",
                                std::abs(r1 - r2));
    rep.names.push_back(f.name);
    rep.ratios.push_back(r1);
  }
  for (double r : rep.ratios)
    if (r > rep.sandwich_constant || r < 1.0 / rep.sandwich_constant) rep.ratios_within = false;

  rep.fine_constant = *std::max_element(rep.fine_constants.begin() + 1, rep.fine_constants.end());
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (std::size_t n = 1; n <= N; ++n) {
    lo = std::min(lo, rep.band_sandwich[n]);
    hi = std::max(hi, rep.band_sandwich[n]);
  }
  rep.sandwich_spread = hi / lo;
  return rep;
}

}  // namespace reslab
