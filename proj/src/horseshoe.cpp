#include "reslab/horseshoe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "reslab/errors.hpp"

namespace reslab {

void HorseshoeModel::validate() const {
  if (product_cutoff < 1) throw DomainError("product cutoff must be at least 1");
}

std::uint64_t shell_multiplicity(unsigned k) {
  const std::uint64_t a = k + 1, b = k + 2, c = k + 3;
  return a * b * c / 6;
}

double shell_scale(unsigned k) { return std::pow(4.0, -static_cast<double>(k + 2)); }

double shell_tail_sum(unsigned K, double q) {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("shell tail needs 0 < q < 1");
  // Terms t_k = C(k+3,3) q^k have ratio (k+4)/(k+1)·q, decreasing in k.
  double total = 0.0;
  double t = static_cast<double>(shell_multiplicity(K + 1)) * std::pow(q, static_cast<double>(K + 1));
  for (unsigned k = K + 1;; ++k) {
    const double ratio = q * static_cast<double>(k + 4) / static_cast<double>(k + 1);
    if (ratio < 0.5) return total + t / (1.0 - ratio);
    total += t;
    t *= ratio;
    if (k > K + 100000) throw DomainError("shell tail does not settle");
  }
}

double det_weight_factor(unsigned n) {
  if (n < 1) throw PreconditionError("period must be at least 1");
  const double x = std::pow(4.0, -static_cast<double>(n));
  // 16^n/(4^n-1)^4 = 16^{-n} (1 - 4^{-n})^{-4}
  return std::pow(16.0, -static_cast<double>(n)) / std::pow(1.0 - x, 4.0);
}

double det_weight_factor_series(unsigned n, unsigned K) {
  const double q = std::pow(4.0, -static_cast<double>(n));
  double s = 0.0;
  for (unsigned k = K + 1; k-- > 0;)
    s += static_cast<double>(shell_multiplicity(k)) * std::pow(q, static_cast<double>(k));
  return std::pow(16.0, -static_cast<double>(n)) * s;
}

cplx horseshoe_flat_trace(const HorseshoeModel& model, unsigned n) {
  model.validate();
  return flat_trace_shift(model.weight, n) * det_weight_factor(n);
}

TraceSequence horseshoe_traces(const HorseshoeModel& model, unsigned n_max,
                               EnumerationOptions options) {
  model.validate();
  std::vector<cplx> v(n_max);
  std::vector<double> b(n_max);
  const double u = std::numeric_limits<double>::epsilon();
  for (unsigned n = 1; n <= n_max; ++n) {
    const BoundedValue r = flat_trace_shift_bounded(model.weight, n, options);
    const double f = det_weight_factor(n);
    v[n - 1] = r.value * f;
    b[n - 1] = r.error_bound * f + 16.0 * u * std::abs(v[n - 1]);
  }
  return TraceSequence(std::move(v), std::move(b));
}

namespace {

double first_trace_modulus(const WeightSpec& w) {
  const double s1 = std::abs(2.0 + w.alpha(0));
  return s1 > 0.0 ? s1 : 1.0;
}

std::vector<double> scales_upto(unsigned K) {
  std::vector<double> c(K + 1);
  for (unsigned k = 0; k <= K; ++k) c[k] = shell_scale(k);
  return c;
}

std::vector<std::uint64_t> mults_upto(unsigned K) {
  std::vector<std::uint64_t> m(K + 1);
  for (unsigned k = 0; k <= K; ++k) m[k] = shell_multiplicity(k);
  return m;
}

}  // namespace

unsigned default_product_cutoff(const WeightSpec& weight, double radius, double tol) {
  if (!(radius > 0.0) || !(tol > 0.0)) throw DomainError("cutoff rule needs positive radius and tol");
  const double s1 = first_trace_modulus(weight);
  for (unsigned K = 1; K < 200; ++K) {
    if (static_cast<double>(shell_multiplicity(K)) * s1 * shell_scale(K) * radius < tol) return K;
  }
  throw TruncationError("no product cutoff below 200 reaches the tolerance", tol);
}

double omitted_factor_bound(const HorseshoeModel& model, double radius) {
  const double s1 = first_trace_modulus(model.weight);
  const double q = 0.25;
  // Σ_{k>K} m_k c_k |s_1| R with c_k = 4^{-2} q^k.
  return s1 * radius * shell_scale(0) * shell_tail_sum(model.product_cutoff, q);
}

PowerSeries horseshoe_determinant(const HorseshoeModel& model, std::size_t N) {
  model.validate();
  const unsigned K = model.product_cutoff;
  return scaled_power_product(zeta_inverse_series(model.weight, N), scales_upto(K), mults_upto(K), N);
}

PowerSeries horseshoe_determinant(const HorseshoeModel& model, std::size_t N, double radius,
                                  double tol) {
  const double bound = omitted_factor_bound(model, radius);
  if (bound > tol)
    throw TruncationError("product cutoff " + std::to_string(model.product_cutoff) +
                              " leaves an omitted-factor perturbation of " + std::to_string(bound) +
                              " on |z| <= " + std::to_string(radius),
                          bound);
  return horseshoe_determinant(model, N);
}

PowerSeries horseshoe_determinant_log(const HorseshoeModel& model, std::size_t N) {
  model.validate();
  const unsigned K = model.product_cutoff;
  return scaled_power_product_log(zeta_inverse_series(model.weight, N), scales_upto(K),
                                  mults_upto(K), N);
}

double horseshoe_log_abs(const HorseshoeModel& model, cplx z) {
  model.validate();
  double s = 0.0;
  for (unsigned k = 0; k <= model.product_cutoff; ++k)
    s += static_cast<double>(shell_multiplicity(k)) *
         std::log(std::abs(model.weight.zeta_inverse(shell_scale(k) * z)));
  return s;
}

long horseshoe_zero_count(const HorseshoeModel& model, double radius) {
  model.validate();
  auto f = [&](cplx w) { return model.weight.zeta_inverse(w); };
  long total = 0;
  for (unsigned k = 0; k <= model.product_cutoff; ++k) {
    const int w = winding_number(f, 0.0, shell_scale(k) * radius);
    total += static_cast<long>(shell_multiplicity(k)) * w;
  }
  // Every omitted factor has its counting disc inside this one.
  const int beyond = winding_number(f, 0.0, shell_scale(model.product_cutoff + 1) * radius);
  if (beyond != 0)
    throw TruncationError("omitted product factors carry zeros inside the radius",
                          static_cast<double>(beyond));
  return total;
}

long ResonanceSet::total_multiplicity() const {
  long s = 0;
  for (const Zero& z : zeros) s += z.multiplicity;
  return s;
}

std::vector<cplx> ResonanceSet::resonances() const {
  std::vector<cplx> out;
  out.reserve(zeros.size());
  for (const Zero& z : zeros) out.push_back(1.0 / z.z);
  return out;
}

void sort_zeros(std::vector<Zero>& zeros) {
  std::stable_sort(zeros.begin(), zeros.end(), [](const Zero& a, const Zero& b) {
    const double ma = std::abs(a.z), mb = std::abs(b.z);
    if (ma != mb) return ma < mb;
    return std::arg(a.z) < std::arg(b.z);
  });
}

namespace {

// Estimated omitted tail Σ_{n>N} |b_n| r^n from the last retained terms.
// Below this order there are too few coefficients to judge a truncation tail,
// so the series is taken as an exact polynomial.
constexpr std::size_t kMinTailOrder = 4;

double tail_estimate(const PowerSeries& s, double r) {
  const std::size_t N = s.order();
  double t = 0.0;
  for (std::size_t n = N >= 2 ? N - 2 : 0; n <= N; ++n)
    t = std::max(t, std::abs(s[n]) * std::pow(r, static_cast<double>(n)));
  return t;
}

struct ScaledEval {
  cplx p;       // p(z) / s(z)
  cplx dp;      // p'(z) / s(z)
  double abs;   // Σ|b_n||z|^n / s(z)
  double scale_log;  // log s(z): 0 for |z| ≤ 1, D log|z| otherwise
};

ScaledEval scaled_eval(const std::vector<cplx>& b, cplx z) {
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
    return {p, dp, s, 0.0};
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
  // p(z) = z^D q(w), p'(z) = z^{D-1}(D q - w q').
  return {q, w * (static_cast<double>(D) * q - w * dq), s, static_cast<double>(D) * std::log(az)};
}

struct DisjointSets {
  std::vector<std::size_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  }
  void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

}  // namespace

double reliability_radius(const PowerSeries& series, double tol) {
  const std::size_t N = series.order();
  if (series.effective_degree() < N || N < kMinTailOrder) return std::numeric_limits<double>::infinity();
  // Bisection on log r for tail(r) <= tol·max(1, Σ|b_n| r^n).
  auto ok = [&](double r) { return tail_estimate(series, r) <= tol * std::max(1.0, series.abs_sum(r)); };
  double lo = 1e-300, hi = 1.0;
  if (!ok(lo)) return 0.0;
  while (ok(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) return std::numeric_limits<double>::infinity();
  }
  for (int i = 0; i < 200 && hi / lo > 1.0 + 1e-12; ++i) {
    const double mid = std::sqrt(lo * hi);
    (ok(mid) ? lo : hi) = mid;
  }
  return lo;
}

namespace {

// An m-fold zero is a simple zero of p^{(m-1)}; Newton there is well conditioned.
cplx refine_cluster(const PowerSeries& poly, cplx center, long m, double r_loc) {
  PowerSeries q = poly;
  for (long j = 1; j < m; ++j) q = q.derivative();
  const PowerSeries dq = q.derivative();
  cplx z = center;
  for (int it = 0; it < 60; ++it) {
    const cplx d = dq.evaluate(z);
    if (d == cplx(0.0, 0.0)) return center;
    const cplx step = q.evaluate(z) / d;
    z -= step;
    if (!(std::abs(z - center) < r_loc)) return center;
    if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(z)) break;
  }
  return z;
}

}  // namespace

ResonanceSet find_resonances(const PowerSeries& series, double radius, double tol,
                             ResonanceOptions options) {
  if (series[0] != cplx(1.0, 0.0)) throw NormalizationError("determinant series must have b_0 = 1");
  if (!(radius > 0.0)) throw DomainError("radius must be positive");
  const std::size_t D = series.effective_degree();
  const bool exact = options.exact_polynomial || D < series.order() || series.order() < kMinTailOrder;
  double certified = std::numeric_limits<double>::infinity();
  if (!exact) {
    certified = reliability_radius(series, tol);
    if (!(radius < certified))
      throw UnreliableTruncationError(
          "radius " + std::to_string(radius) + " exceeds the truncation-reliability radius " +
              std::to_string(certified) + " of the degree-" + std::to_string(series.order()) +
              " series",
          certified);
  }
  ResonanceSet out;
  out.reliability_radius = radius;
  if (D == 0) return out;

  std::vector<cplx> b(series.coeffs().begin(), series.coeffs().begin() + static_cast<std::ptrdiff_t>(D + 1));
  const AberthResult ar = aberth_roots(b, options.aberth);
  if (!ar.converged)
    throw NonConvergenceError("simultaneous iteration did not reach the residual tolerance",
                              static_cast<double>(ar.iterations));
  const std::vector<cplx>& z = ar.roots;
  const double u = std::numeric_limits<double>::epsilon();

  // Pseudozero inclusion discs: every polynomial within the evaluation
  // uncertainty η of p has a root within D (|p| + η)/|p'| of z_i.
  std::vector<double> rad(D);
  for (std::size_t i = 0; i < D; ++i) {
    const ScaledEval e = scaled_eval(b, z[i]);
    double eta = 16.0 * u * static_cast<double>(D + 1) * e.abs;
    if (!exact) eta += tail_estimate(series, std::abs(z[i])) * std::exp(-e.scale_log);
    const double dp = std::abs(e.dp);
    double r = dp > 0.0 ? static_cast<double>(D) * (std::abs(e.p) + eta) / dp
                        : std::numeric_limits<double>::infinity();
    rad[i] = std::clamp(r, options.cluster_eps * std::abs(z[i]), 0.25 * std::abs(z[i]));
  }
  DisjointSets ds(D);
  for (std::size_t i = 0; i < D; ++i)
    for (std::size_t j = i + 1; j < D; ++j)
      if (std::abs(z[i] - z[j]) <= rad[i] + rad[j]) ds.unite(i, j);

  struct Cluster {
    cplx center{0.0, 0.0};
    long count = 0;
    double spread = 0.0;
    double reach = 0.0;
    bool inside = false;
    std::vector<std::size_t> members;
  };
  std::vector<Cluster> clusters;
  std::vector<long> index_of(D, -1);
  for (std::size_t i = 0; i < D; ++i) {
    const std::size_t root = ds.find(i);
    if (index_of[root] < 0) {
      index_of[root] = static_cast<long>(clusters.size());
      clusters.emplace_back();
    }
    clusters[static_cast<std::size_t>(index_of[root])].members.push_back(i);
  }
  for (Cluster& c : clusters) {
    for (std::size_t i : c.members) c.center += z[i];
    c.count = static_cast<long>(c.members.size());
    c.center /= static_cast<double>(c.count);
    for (std::size_t i : c.members) {
      c.spread = std::max(c.spread, std::abs(z[i] - c.center));
      c.reach = std::max(c.reach, std::abs(z[i] - c.center) + rad[i]);
    }
  }

  const PowerSeries poly = series.resized(D);
  auto f = [&](cplx x) { return poly.evaluate(x); };

  long inside = 0;
  for (Cluster& c : clusters) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (std::size_t i : c.members) {
      lo = std::min(lo, std::abs(z[i]));
      hi = std::max(hi, std::abs(z[i]));
    }
    const double margin = options.cluster_eps * radius;
    const bool in = hi < radius - margin, outside = lo > radius + margin;
    if (!in && !outside)
      throw BoundaryAmbiguityError("a zero cluster straddles |z| = " + std::to_string(radius) +
                                   " within the clustering tolerance; choose another radius");
    c.inside = in;
    if (in) inside += c.count;
  }
  const int contour = winding_number(f, 0.0, radius);
  if (contour != inside)
    throw UnreliableTruncationError("argument-principle count " + std::to_string(contour) +
                                        " disagrees with " + std::to_string(inside) +
                                        " located zeros in |z| < " + std::to_string(radius),
                                    certified);

  for (std::size_t ci = 0; ci < clusters.size(); ++ci) {
    const Cluster& c = clusters[ci];
    if (!c.inside) continue;
    double nearest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < D; ++i)
      if (static_cast<std::size_t>(index_of[ds.find(i)]) != ci) nearest = std::min(nearest, std::abs(z[i] - c.center));
    double r_loc = std::max(3.0 * c.reach, 3.0 * options.cluster_eps * std::abs(c.center));
    r_loc = std::min(r_loc, 0.5 * nearest);
    const int local = winding_number(f, c.center, r_loc);
    if (local != c.count)
      throw UnreliableTruncationError("local argument-principle count " + std::to_string(local) +
                                          " disagrees with cluster size " + std::to_string(c.count),
                                      certified);
    out.zeros.push_back({refine_cluster(poly, c.center, c.count, r_loc), c.count});
  }
  sort_zeros(out.zeros);
  return out;
}

ResonanceSet horseshoe_zeros_from_factor(const std::vector<Zero>& factor_zeros, double radius) {
  ResonanceSet out;
  out.reliability_radius = radius;
  for (const Zero& w : factor_zeros) {
    if (std::abs(w.z) == 0.0) throw DomainError("factor zero at the origin");
    for (unsigned k = 0;; ++k) {
      const cplx z = w.z / shell_scale(k);
      if (!(std::abs(z) < radius)) break;
      out.zeros.push_back({z, static_cast<long>(shell_multiplicity(k)) * w.multiplicity});
    }
  }
  sort_zeros(out.zeros);
  return out;
}

}  // namespace reslab
