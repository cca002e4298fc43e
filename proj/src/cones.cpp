#include "reslab/cones.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "reslab/errors.hpp"

namespace reslab {

namespace {

constexpr double kPi = std::numbers::pi;

// Angle reduced to (-π, π].
double wrap(double x) {
  x = std::remainder(x, 2.0 * kPi);
  return x <= -kPi ? x + 2.0 * kPi : x;
}

double angle_of(const Vec2& v) { return std::atan2(v.y(), v.x()); }

Vec2 unit(double theta) { return Vec2(std::cos(theta), std::sin(theta)); }

// 1 on (-∞, 0], 0 on [1, ∞), quintic in between.
double smooth_drop(double s) {
  if (s <= 0.0) return 1.0;
  if (s >= 1.0) return 0.0;
  return 1.0 - s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

double ray_distance(const Vec2& v, const Vec2& u) {
  const double p = v.dot(u);
  return p <= 0.0 ? v.norm() : (v - p * u).norm();
}

double segment_distance(const Vec2& v, const Vec2& a, const Vec2& b) {
  const Vec2 d = b - a;
  const double len2 = d.squaredNorm();
  const double t = len2 > 0.0 ? std::clamp((v - a).dot(d) / len2, 0.0, 1.0) : 0.0;
  return (v - (a + t * d)).norm();
}

// {ρa ≤ |p| ≤ ρb, angle between p and the axis line in [δa, δb]}.
struct PolarSet {
  double rho_lo, rho_hi, delta_lo, delta_hi, axis;

  double axis_angle(const Vec2& v) const {
    double t = std::fmod(angle_of(v) - axis, kPi);
    if (t < 0.0) t += kPi;
    return std::min(t, kPi - t);
  }
  bool contains(const Vec2& p) const {
    const double r = p.norm();
    if (r < rho_lo || r > rho_hi) return false;
    if (r == 0.0) return true;
    const double d = axis_angle(p);
    return d >= delta_lo - 1e-14 && d <= delta_hi + 1e-14;
  }
  std::vector<std::pair<double, double>> intervals() const {
    return {{axis + delta_lo, axis + delta_hi},
            {axis - delta_hi, axis - delta_lo},
            {axis + kPi + delta_lo, axis + kPi + delta_hi},
            {axis + kPi - delta_hi, axis + kPi - delta_lo}};
  }
  double distance(const Vec2& p) const {
    if (contains(p)) return 0.0;
    const double r = p.norm();
    const double th = angle_of(p);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [a, b] : intervals()) {
      const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
      if (std::abs(wrap(th - mid)) <= half) {
        best = std::min(best, std::max({rho_lo - r, r - rho_hi, 0.0}));
      } else {
        for (double e : {a, b}) best = std::min(best, segment_distance(p, rho_lo * unit(e), rho_hi * unit(e)));
      }
    }
    return best;
  }
  // Points along every boundary piece.
  std::vector<Vec2> boundary(std::size_t per_piece) const {
    std::vector<Vec2> pts;
    for (const auto& [a, b] : intervals()) {
      for (std::size_t k = 0; k <= per_piece; ++k) {
        const double s = static_cast<double>(k) / static_cast<double>(per_piece);
        const double th = a + s * (b - a);
        pts.push_back(rho_hi * unit(th));
        if (rho_lo > 0.0) pts.push_back(rho_lo * unit(th));
        const double rr = rho_lo + s * (rho_hi - rho_lo);
        pts.push_back(rr * unit(a));
        pts.push_back(rr * unit(b));
      }
    }
    return pts;
  }
};

Mat2 transpose_2x2(const Eigen::MatrixXd& A) {
  if (A.rows() != 2 || A.cols() != 2) throw UnsupportedError("cone checks are implemented in dimension 2");
  if (!A.allFinite() || std::abs(A.determinant()) < 1e-300) throw DomainError("matrix must be invertible");
  return A.transpose();
}

}  // namespace

bool Sector::contains(const Vec2& v) const {
  if (v.squaredNorm() == 0.0) return true;
  const double th = angle_of(v);
  if (std::abs(wrap(th - center)) <= half_width + 1e-14) return true;
  return double_sided && std::abs(wrap(th - center - kPi)) <= half_width + 1e-14;
}

double Sector::distance(const Vec2& v) const {
  if (contains(v)) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> centers{center};
  if (double_sided) centers.push_back(center + kPi);
  for (double c : centers)
    for (double e : {c - half_width, c + half_width}) best = std::min(best, ray_distance(v, unit(e)));
  return best;
}

ConeFamily ConeFamily::from_half_angles(std::vector<double> gammas, std::vector<double> t_bar, double axis) {
  ConeFamily f;
  if (gammas.size() < 2) throw DomainError("need at least two cones");
  f.r = static_cast<unsigned>(gammas.size());
  f.axis = axis;
  f.half_angles.push_back(kPi / 2.0);
  for (double g : gammas) f.half_angles.push_back(g);
  f.t_bar = std::move(t_bar);
  f.ramp_start.assign(f.r + 1, 0.0);
  f.ramp_end.assign(f.r + 1, 0.0);
  for (unsigned i = 1; i <= f.r; ++i) {
    const double lo = i < f.r ? f.half_angles[i + 1] : 0.0;
    const double hi = f.half_angles[i];
    f.ramp_start[i] = lo + (hi - lo) / 3.0;
    f.ramp_end[i] = lo + 2.0 * (hi - lo) / 3.0;
  }
  f.validate();
  return f;
}

ConeFamily ConeFamily::nested(unsigned r, std::vector<double> t_bar, double axis, double tan_first, double ratio) {
  if (r < 2) throw DomainError("need at least two cones");
  if (!(tan_first > 0.0) || !(ratio > 0.0 && ratio < 1.0)) throw DomainError("invalid cone opening sequence");
  std::vector<double> g;
  for (unsigned i = 1; i <= r; ++i) g.push_back(std::atan(tan_first * std::pow(ratio, static_cast<double>(i - 1))));
  return from_half_angles(std::move(g), std::move(t_bar), axis);
}

void ConeFamily::validate() const {
  if (r < 2) throw DomainError("need at least two cones");
  if (half_angles.size() != r + 1 || ramp_start.size() != r + 1 || ramp_end.size() != r + 1)
    throw DomainError("cone family size mismatch");
  for (unsigned i = 1; i <= r; ++i)
    if (!(half_angles[i] > 0.0 && half_angles[i] < half_angles[i - 1]))
      throw DomainError("cone half-angles must decrease strictly inside (0, π/2)");
  if (t_bar.size() != r + 1) throw DomainError("t_bar must have r + 1 entries");
  if (!(t_bar[0] > 0.0) || !(t_bar[1] < 0.0)) throw DomainError("t_bar must satisfy t_0 > 0 > t_1");
  for (unsigned i = 1; i < r; ++i)
    if (!(t_bar[i + 1] < t_bar[i])) throw DomainError("t_bar must be strictly decreasing");
}

double ConeFamily::axis_angle(const Vec2& v) const {
  double t = std::fmod(angle_of(v) - axis, kPi);
  if (t < 0.0) t += kPi;
  return std::min(t, kPi - t);
}

bool ConeFamily::in_cone(unsigned i, const Vec2& v) const {
  if (i == 0 || v.squaredNorm() == 0.0) return true;
  return axis_angle(v) <= half_angles.at(i) + 1e-12;
}

Sector ConeFamily::sector(unsigned i) const { return Sector{axis, half_angles.at(i), true}; }

double ConeFamily::phi_of_angle(unsigned i, double delta) const {
  auto h = [&](unsigned k) {
    if (k > r) return 0.0;
    return smooth_drop((delta - ramp_start[k]) / (ramp_end[k] - ramp_start[k]));
  };
  if (i > r) throw DomainError("cone index out of range");
  if (i == 0) return 1.0 - h(1);
  return h(i) - h(i + 1);
}

double ConeFamily::phi(unsigned i, const Vec2& v) const { return phi_of_angle(i, axis_angle(v)); }

std::pair<double, double> ConeFamily::phi_support(unsigned i) const {
  if (i > r) throw DomainError("cone index out of range");
  const double lo = i == r ? 0.0 : ramp_start[i + 1];
  const double hi = i == 0 ? kPi / 2.0 : ramp_end[i];
  return {lo, hi};
}

std::pair<double, double> ConeFamily::phi_tilde_support(unsigned i) const {
  if (i > r) throw DomainError("cone index out of range");
  const auto [lo, hi] = phi_support(i);
  const double inner = i + 2 <= r ? half_angles[i + 2] : 0.0;
  return {i == r ? 0.0 : 0.5 * (inner + lo), i == 0 ? kPi / 2.0 : 0.5 * (hi + half_angles[i])};
}

void check_sueur(const std::vector<double>& t, double nu, double a) {
  if (t.size() < 3) throw DomainError("t_bar needs at least three entries");
  const std::size_t r = t.size() - 1;
  if (!(t[0] > 0.0 && t[1] < 0.0)) throw DomainError("t_bar violates t_0 > 0 > t_1");
  for (std::size_t i = 1; i < r; ++i)
    if (!(t[i + 1] < t[i])) throw DomainError("t_bar violates t_i > t_{i+1}");
  if (!(t[r] > nu * t[r - 1])) throw DomainError("t_bar violates t_r > nu t_{r-1}");
  for (std::size_t i = 0; i + 2 <= r; ++i)
    if (!(t[i + 1] < (2.0 / a) * t[i]))
      throw DomainError("t_bar violates t_{i+1} < (2/a) t_i at i = " + std::to_string(i));
}

std::vector<double> default_t_bar(unsigned r, double nu, double a, double scale) {
  if (r < 2) throw DomainError("need at least two cones");
  if (!(nu > 1.0)) throw DomainError("nu must exceed 1");
  if (!(a > 0.0) || !(scale > 0.0)) throw DomainError("a and scale must be positive");
  const double kappa = 1.1 * std::max(1.0, 2.0 / a);
  std::vector<double> t(r + 1);
  t[0] = scale;
  t[1] = -scale;
  for (unsigned i = 1; i + 1 < r; ++i) t[i + 1] = kappa * t[i];
  t[r] = t[r - 1] * 0.5 * (1.0 + nu);
  check_sueur(t, nu, a);
  return t;
}

ConeDistanceReport cone_distance_check(const Sector& c_plus, const Sector& c_minus, std::size_t sample_count,
                                       std::uint64_t seed) {
  auto sphere_distance = [](const Sector& from, const Sector& to) {
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> centers{from.center};
    if (from.double_sided) centers.push_back(from.center + kPi);
    constexpr int kGrid = 20000;
    for (double c : centers)
      for (int k = 0; k <= kGrid; ++k)
        best = std::min(best, to.distance(unit(c - from.half_width + 2.0 * from.half_width * k / kGrid)));
    return best;
  };
  ConeDistanceReport rep;
  rep.mu = std::min(sphere_distance(c_plus, c_minus), sphere_distance(c_minus, c_plus));
  if (!(rep.mu > 1e-12)) throw DegenerateInputError("cones are not transverse (mu = 0)");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  auto draw = [&](const Sector& s) -> Vec2 {
    if (u01(rng) < 0.02) return Vec2::Zero();
    double th = s.center + (2.0 * u01(rng) - 1.0) * s.half_width;
    if (s.double_sided && u01(rng) < 0.5) th += kPi;
    return std::exp(-5.0 + 10.0 * u01(rng)) * unit(th);
  };
  rep.min_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < sample_count; ++k) {
    const Vec2 xi = draw(c_plus), eta = draw(c_minus);
    const double m = std::max(xi.norm(), eta.norm());
    ++rep.samples;
    if (m == 0.0) continue;
    const double ratio = (xi - eta).norm() / m;
    rep.min_ratio = std::min(rep.min_ratio, ratio);
    if (ratio < rep.mu * (1.0 - 1e-9)) ++rep.violations;
  }
  return rep;
}

ConeHyperbolicityReport cone_hyperbolicity_check(const Eigen::MatrixXd& A, const ConeFamily& theta,
                                                 const ConeFamily& theta_prime, std::size_t samples) {
  theta.validate();
  theta_prime.validate();
  if (theta.r != theta_prime.r) throw DomainError("polarizations must have the same number of cones");
  const Mat2 B = transpose_2x2(A);
  const unsigned r = theta.r;
  std::vector<double> dirs;
  for (std::size_t k = 0; k < samples; ++k) dirs.push_back(kPi * static_cast<double>(k) / static_cast<double>(samples));
  for (unsigned i = 1; i <= r; ++i)
    for (double s : {-1.0, 1.0}) dirs.push_back(theta.axis + s * theta.half_angles[i]);

  ConeHyperbolicityReport rep;
  rep.samples = dirs.size();
  rep.cond_i = true;
  rep.lambda_ii = std::numeric_limits<double>::infinity();
  rep.lambda_iii = std::numeric_limits<double>::infinity();
  for (double th : dirs) {
    const Vec2 v = unit(th);
    const Vec2 w = B * v;
    for (unsigned i = 1; i <= r; ++i) {
      if (!theta.in_cone(i, v)) break;
      if (!theta_prime.in_cone(std::min(i + 2, r), w) && rep.cond_i) {
        rep.cond_i = false;
        rep.worst_direction_i = th;
      }
    }
    if (theta.in_cone(r - 1, v)) rep.lambda_ii = std::min(rep.lambda_ii, w.norm());
    if (!theta_prime.in_cone(2, w)) rep.lambda_iii = std::min(rep.lambda_iii, 1.0 / w.norm());
  }
  rep.lambda = std::min(rep.lambda_ii, rep.lambda_iii);
  rep.cond_ii = rep.lambda_ii > 1.0;
  rep.cond_iii = rep.lambda_iii > 1.0;
  return rep;
}

HyperbolicParameters hyperbolic_parameters(const Eigen::MatrixXd& A, double Lambda, double alpha) {
  const Mat2 B = transpose_2x2(A);
  if (!(Lambda > 1.0)) throw DomainError("Lambda must exceed 1");
  if (!(alpha > 1.0)) throw DomainError("alpha must exceed 1");
  Eigen::JacobiSVD<Mat2> svd(B);
  const double smin = svd.singularValues().minCoeff();
  HyperbolicParameters p;
  p.Lambda = Lambda;
  p.nu = 0.5 * (1.0 + std::pow(Lambda, 1.0 / alpha));
  p.a = 0.9 * std::pow(smin, 1.0 / alpha);
  return p;
}

bool leak_relation(std::size_t n, std::size_t l, unsigned i, unsigned j, unsigned r, double nu, double a) {
  const double dn = static_cast<double>(n), dl = static_cast<double>(l);
  if (i == 0 && j == 0) return dl >= nu * dn;
  if (i + 1 >= r && j + 1 >= r) return dn >= nu * dl;
  if (i >= j + 1 && j + 2 <= r) return dn >= 0.5 * a * dl;
  return false;
}

BandLeakReport band_leak_distance_check(const Eigen::MatrixXd& A, const ConeFamily& theta,
                                        const ConeFamily& theta_prime, std::size_t n, std::size_t l, unsigned i,
                                        unsigned j, double alpha, double nu, double a, std::size_t n_config,
                                        std::size_t samples) {
  const Mat2 B = transpose_2x2(A);
  if (i > theta_prime.r || j > theta.r) throw DomainError("cone index out of range");
  BandLeakReport rep;
  rep.scale = std::pow(static_cast<double>(std::max(n, l)), alpha);
  if (leak_relation(n, l, i, j, theta.r, nu, a)) {
    rep.status = "related";
    return rep;
  }
  if (std::max(n, l) <= n_config) {
    rep.status = "below threshold";
    return rep;
  }
  auto pw = [&](std::size_t k) { return std::pow(static_cast<double>(k), alpha); };
  PolarSet target{0.0, 2.0, 0.0, kPi / 2.0, theta_prime.axis};
  if (n >= 1) {
    const auto [lo, hi] = theta_prime.phi_support(i);
    target = {pw(n) + 0.5, pw(n + 1) + 1.0, lo, hi, theta_prime.axis};
  }
  PolarSet source{0.0, pw(2) + 1.0, 0.0, kPi / 2.0, theta.axis};
  if (l >= 1) {
    const auto [lo, hi] = theta.phi_tilde_support(j);
    source = {l >= 2 ? pw(l - 1) + 0.5 : 0.0, pw(l + 2) + 1.0, lo, hi, theta.axis};
  }
  rep.applicable = true;
  rep.status = "measured";
  const Mat2 Binv = B.inverse();
  bool meet = false;
  for (const Vec2& p : target.boundary(samples))
    if (source.contains(Binv * p)) {
      meet = true;
      break;
    }
  double best = std::numeric_limits<double>::infinity();
  if (!meet)
    for (const Vec2& q : source.boundary(samples)) best = std::min(best, target.distance(B * q));
  rep.distance = meet ? 0.0 : best;
  rep.c = rep.distance / rep.scale;
  return rep;
}

}  // namespace reslab
