#include "reslab/entire_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>

#include "reslab/errors.hpp"
#include "reslab/fitting.hpp"

namespace reslab {

namespace {

constexpr double kU = std::numeric_limits<double>::epsilon();

}  // namespace

std::vector<cplx> order_zeros(const std::vector<Zero>& zeros) {
  std::vector<Zero> sorted = zeros;
  for (const Zero& z : sorted) {
    if (z.z == cplx(0.0, 0.0)) throw DomainError("zero at the origin cannot be ordered");
    if (z.multiplicity < 1) throw DomainError("multiplicities must be positive");
  }
  sort_zeros(sorted);
  std::vector<cplx> out;
  for (const Zero& z : sorted) out.insert(out.end(), static_cast<std::size_t>(z.multiplicity), z.z);
  return out;
}

OrderEstimate estimate_order_from_coeffs(const PowerSeries& series) {
  OrderEstimate est;
  const std::size_t N = series.order();
  const std::size_t D = series.effective_degree();
  if (D == 0) {
    est.degenerate = true;
    return est;
  }
  // Trailing exact zeros or a very short list: a polynomial, order zero.
  if (D < N || N < 4) return est;
  std::vector<double> x, v;
  for (std::size_t n = 2; n <= N; ++n) {
    const double a = std::abs(series[n]);
    if (a == 0.0 || !(a < 1.0)) continue;
    const double ln = std::log(static_cast<double>(n));
    x.push_back(1.0 / ln);
    v.push_back(static_cast<double>(n) * ln / -std::log(a));
  }
  std::size_t nonzero = 0;
  for (std::size_t n = 1; n <= N; ++n) nonzero += series[n] != cplx(0.0, 0.0);
  if (nonzero < 10 || x.size() < 4)
    throw InsufficientDataError("order estimate needs at least 10 decaying nonzero coefficients");
  const std::size_t start = x.size() - std::max<std::size_t>(4, x.size() / 4);
  std::vector<double> xs(x.begin() + static_cast<std::ptrdiff_t>(start), x.end());
  std::vector<double> vs(v.begin() + static_cast<std::ptrdiff_t>(start), v.end());
  const LinearFit f = linear_fit(xs, vs);
  est.order = std::max(0.0, f.intercept);
  est.points_used = xs.size();
  return est;
}

std::vector<double> max_modulus_order_diagnostic(const std::function<double(cplx)>& log_abs,
                                                 const std::vector<double>& radii) {
  std::vector<double> out;
  for (double R : radii) {
    if (!(R > 1.0)) throw DomainError("order diagnostic needs radii above 1");
    double logM = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < 1024; ++j) logM = std::max(logM, log_abs(std::polar(R, 2.0 * std::numbers::pi * j / 1024)));
    out.push_back(logM > 1.0 ? std::log(logM) / std::log(R) : 0.0);
  }
  return out;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Convergent:
      return "convergent";
    case Verdict::Divergent:
      return "divergent";
    default:
      return "undetermined";
  }
}

ConvergenceData series_convergence(const std::vector<double>& terms) {
  ConvergenceData d;
  const std::size_t M = terms.size();
  double s = 0.0;
  std::size_t next = 1;
  for (std::size_t m = 0; m < M; ++m) {
    s += terms[m];
    if (m + 1 == next) {
      d.checkpoints.push_back(next);
      d.partial_sums.push_back(s);
      next *= 2;
    }
  }
  if (M == 0) return d;

  // Ratio test on the last quarter.
  const std::size_t q0 = M - std::max<std::size_t>(1, M / 4);
  if (M - q0 >= 8) {
    double worst = 0.0;
    bool all_zero = true;
    for (std::size_t m = q0; m + 1 < M; ++m) {
      if (terms[m] > 0.0) {
        all_zero = false;
        worst = std::max(worst, terms[m + 1] / terms[m]);
      } else if (terms[m + 1] > 0.0) {
        worst = std::numeric_limits<double>::infinity();
      }
    }
    if (all_zero || worst <= 0.9) {
      d.verdict = Verdict::Convergent;
      return d;
    }
  }

  // Cauchy condensation over doubling blocks; at least three decades of index.
  const std::size_t blocks = d.partial_sums.size();
  if (blocks < 11) return d;
  std::vector<double> delta;
  for (std::size_t j = 0; j + 1 < blocks; ++j) delta.push_back(d.partial_sums[j + 1] - d.partial_sums[j]);
  double rmax = 0.0, rmin = std::numeric_limits<double>::infinity();
  for (std::size_t j = delta.size() - 4; j < delta.size(); ++j) {
    const double prev = delta[j - 1], cur = delta[j];
    double r;
    if (prev <= 0.0) {
      r = cur <= 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    } else {
      r = cur / prev;
    }
    rmax = std::max(rmax, r);
    rmin = std::min(rmin, r);
  }
  if (rmax <= 0.9) {
    d.verdict = Verdict::Convergent;
  } else if (rmin >= 0.98) {
    d.verdict = Verdict::Divergent;
  }
  return d;
}

namespace {

class ListGenerator final : public ZeroGenerator {
 public:
  explicit ListGenerator(std::vector<Zero> z) : zeros_(std::move(z)) { sort_zeros(zeros_); }
  std::optional<Zero> next() override {
    if (pos_ >= zeros_.size()) return std::nullopt;
    return zeros_[pos_++];
  }
  bool finite() const override { return true; }

 private:
  std::vector<Zero> zeros_;
  std::size_t pos_ = 0;
};

class FormulaGenerator final : public ZeroGenerator {
 public:
  FormulaGenerator(std::function<cplx(std::size_t)> f, std::size_t first) : f_(std::move(f)), m_(first) {}
  std::optional<Zero> next() override { return Zero{f_(m_++), 1}; }
  bool finite() const override { return false; }

 private:
  std::function<cplx(std::size_t)> f_;
  std::size_t m_;
};

class ShellGenerator final : public ZeroGenerator {
 public:
  explicit ShellGenerator(std::vector<Zero> factor) : factor_(std::move(factor)) {
    for (std::size_t i = 0; i < factor_.size(); ++i) {
      if (factor_[i].z == cplx(0.0, 0.0)) throw DomainError("factor zero at the origin");
      push(i, 0);
    }
  }
  std::optional<Zero> next() override {
    if (heap_.empty()) return std::nullopt;
    Entry e = heap_.top();
    heap_.pop();
    const Zero& w = factor_[e.index];
    Zero out{w.z / shell_scale(e.k), static_cast<long>(shell_multiplicity(e.k)) * w.multiplicity};
    if (e.k < 400) push(e.index, e.k + 1);
    return out;
  }
  bool finite() const override { return factor_.empty(); }

 private:
  struct Entry {
    double modulus;
    double arg;
    std::size_t index;
    unsigned k;
    bool operator<(const Entry& o) const {
      if (modulus != o.modulus) return modulus > o.modulus;
      return arg > o.arg;
    }
  };
  void push(std::size_t i, unsigned k) {
    const cplx z = factor_[i].z / shell_scale(k);
    heap_.push({std::abs(z), std::arg(z), i, k});
  }
  std::vector<Zero> factor_;
  std::priority_queue<Entry> heap_;
};

GenusReport genus_from_moduli(const std::vector<double>& moduli, bool complete, unsigned p_max) {
  GenusReport rep;
  rep.p_max = p_max;
  bool undetermined_before = false;
  for (unsigned p = 0; p <= p_max; ++p) {
    std::vector<double> terms(moduli.size());
    for (std::size_t m = 0; m < moduli.size(); ++m) terms[m] = std::pow(moduli[m], -static_cast<double>(p + 1));
    ConvergenceData d = series_convergence(terms);
    d.p = p;
    if (complete) d.verdict = Verdict::Convergent;
    rep.data.push_back(d);
    if (rep.genus || undetermined_before) continue;
    if (d.verdict == Verdict::Convergent) {
      rep.genus = p;
    } else if (d.verdict == Verdict::Undetermined) {
      undetermined_before = true;
    }
  }
  if (!rep.genus) {
    if (undetermined_before) {
      rep.undetermined = true;
    } else {
      rep.infinite_up_to_pmax = true;
    }
  }
  return rep;
}

}  // namespace

std::unique_ptr<ZeroGenerator> list_generator(std::vector<Zero> zeros) {
  return std::make_unique<ListGenerator>(std::move(zeros));
}

std::unique_ptr<ZeroGenerator> formula_generator(std::function<cplx(std::size_t)> f, std::size_t first) {
  return std::make_unique<FormulaGenerator>(std::move(f), first);
}

std::unique_ptr<ZeroGenerator> shell_generator(std::vector<Zero> factor_zeros) {
  return std::make_unique<ShellGenerator>(std::move(factor_zeros));
}

GenusReport estimate_genus(ZeroGenerator& zeros, std::size_t horizon, unsigned p_max) {
  std::vector<double> moduli;
  bool exhausted = false;
  while (moduli.size() < horizon) {
    auto z = zeros.next();
    if (!z) {
      exhausted = true;
      break;
    }
    const double r = std::abs(z->z);
    if (r == 0.0) throw DomainError("zero at the origin");
    const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(z->multiplicity), horizon - moduli.size());
    moduli.insert(moduli.end(), take, r);
  }
  if (!exhausted && moduli.size() < 50) throw InsufficientDataError("genus estimate needs at least 50 zeros");
  return genus_from_moduli(moduli, exhausted && zeros.finite(), p_max);
}

GenusReport estimate_genus(const std::vector<cplx>& ordered_zeros, unsigned p_max) {
  if (ordered_zeros.size() < 50) throw InsufficientDataError("genus estimate needs at least 50 zeros");
  std::vector<double> moduli;
  moduli.reserve(ordered_zeros.size());
  for (cplx z : ordered_zeros) {
    if (z == cplx(0.0, 0.0)) throw DomainError("zero at the origin");
    moduli.push_back(std::abs(z));
  }
  for (std::size_t i = 1; i < moduli.size(); ++i)
    if (moduli[i] < moduli[i - 1]) throw PreconditionError("zeros must be ordered by modulus");
  return genus_from_moduli(moduli, false, p_max);
}

cplx weierstrass_factor(cplx u, unsigned p) {
  cplx s(0.0, 0.0), t(1.0, 0.0);
  for (unsigned k = 1; k <= p; ++k) {
    t *= u;
    s += t / static_cast<double>(k);
  }
  return (1.0 - u) * std::exp(s);
}

PowerSeries canonical_product(const std::vector<cplx>& zeros, unsigned p, std::size_t order) {
  // log E(u,p) = -Σ_{k>p} u^k / k, so the traces are the power sums beyond p.
  std::vector<cplx> a(order, cplx(0.0, 0.0));
  for (cplx z : zeros) {
    if (z == cplx(0.0, 0.0)) throw DomainError("zero at the origin");
    const cplx w = 1.0 / z;
    cplx t(1.0, 0.0);
    for (std::size_t k = 1; k <= order; ++k) {
      t *= w;
      if (k > p) a[k - 1] += t;
    }
  }
  return det_from_traces(TraceSequence(a), order);
}

LocalTraceReport check_local_trace_formula(const TraceSequence& traces, const std::vector<Zero>& zeros,
                                           double r, unsigned n_max, double cluster_eps) {
  if (!(r > 0.0)) throw DomainError("radius must be positive");
  if (traces.size() < n_max) throw InsufficientDataError("not enough traces for the requested steps");
  for (const Zero& z : zeros) {
    if (std::abs(std::abs(z.z) - r) <= cluster_eps * r)
      throw PreconditionError("a zero lies on |z| = " + std::to_string(r) + "; try r = " +
                              std::to_string(r * (1.0 + 1e3 * cluster_eps)));
  }
  LocalTraceReport rep;
  rep.r = r;
  std::vector<double> xs, ys;
  for (unsigned n = 1; n <= n_max; ++n) {
    cplx s(0.0, 0.0);
    double abs_s = 0.0;
    for (const Zero& z : zeros) {
      if (!(std::abs(z.z) < r)) continue;
      const cplx t = static_cast<double>(z.multiplicity) * std::pow(z.z, -static_cast<double>(n));
      s += t;
      abs_s += std::abs(t);
    }
    LocalTraceRow row;
    row.n = n;
    row.e = traces.a(n) - s;
    const double rn = std::pow(r, static_cast<double>(n));
    row.e_scaled = std::abs(row.e) * rn;
    row.noise = (traces.bound(n) + 4.0 * (n + 4.0) * kU * (std::abs(traces.a(n)) + abs_s)) * rn;
    if (row.e_scaled > row.noise) {
      xs.push_back(n);
      ys.push_back(std::log(row.e_scaled));
    }
    rep.rows.push_back(row);
  }
  if (xs.size() < 2) {
    rep.slope = 0.0;
    rep.pass = true;
  } else {
    rep.slope = linear_fit(xs, ys).slope;
    rep.pass = rep.slope < 0.0;
  }
  return rep;
}

TailModel shell_tail_model(std::vector<Zero> factor_zeros) {
  TailModel model;
  model.absolute = true;
  model.bound = [fz = std::move(factor_zeros)](double last_modulus, std::size_t, unsigned n) {
    double total = 0.0;
    for (const Zero& w : fz) {
      const double aw = std::abs(w.z);
      // Shells at the last emitted modulus are kept since ties may remain unemitted.
      unsigned k0 = 0;
      while (aw / shell_scale(k0) < last_modulus && k0 < 400) ++k0;
      // Σ_{k≥k0} m_k (|w| 4^{k+2})^{-n} = (16|w|)^{-n} Σ_{k≥k0} m_k q^k with q = 4^{-n}.
      const double q = std::pow(0.25, static_cast<double>(n));
      const double shells = k0 == 0 ? std::pow(1.0 - q, -4.0) : shell_tail_sum(k0 - 1, q);
      const double s = std::pow(16.0 * aw, -static_cast<double>(n)) * shells;
      total += static_cast<double>(w.multiplicity) * s;
    }
    return total;
  };
  return model;
}

GlobalTraceVerdict check_global_trace_formula(const TraceSequence& traces, ZeroGenerator& zeros, unsigned n,
                                              const TailModel* tail_model, GlobalTraceOptions options) {
  if (n < 1 || n > traces.size()) throw InsufficientDataError("no trace for the requested step");
  GlobalTraceVerdict v;
  v.n = n;
  const cplx a = traces.a(n);
  std::vector<double> abs_terms;
  cplx s(0.0, 0.0);
  double abs_sum = 0.0;
  double last = 0.0;
  std::size_t consumed = 0;
  bool exhausted = false;
  double tail = std::numeric_limits<double>::infinity();
  while (abs_terms.size() < options.horizon) {
    auto z = zeros.next();
    if (!z) {
      exhausted = true;
      break;
    }
    ++consumed;
    last = std::abs(z->z);
    const cplx t = std::pow(z->z, -static_cast<double>(n));
    const double mult = static_cast<double>(z->multiplicity);
    s += mult * t;
    abs_sum += mult * std::abs(t);
    const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(z->multiplicity),
                                                   options.horizon - abs_terms.size());
    abs_terms.insert(abs_terms.end(), take, std::abs(t));
    if (tail_model) {
      tail = tail_model->bound(last, consumed, n);
      if (tail <= options.relative_tail * std::max(std::abs(a), std::numeric_limits<double>::min())) break;
    }
  }
  v.zeros_used = consumed;
  v.partial_sum = s;
  v.rounding = 4.0 * (n + 4.0) * kU * (abs_sum + std::abs(a));
  const ConvergenceData cd = series_convergence(abs_terms);
  v.abs_verdict = cd.verdict;
  if (exhausted && zeros.finite()) {
    v.abs_verdict = Verdict::Convergent;
    v.abs_convergent = true;
    v.bounded = true;
    v.tail_bound = 0.0;
  } else if (tail_model) {
    v.bounded = std::isfinite(tail);
    v.tail_bound = tail;
    v.abs_convergent = tail_model->absolute ? cd.verdict != Verdict::Divergent && v.bounded
                                            : cd.verdict == Verdict::Convergent;
  } else {
    v.bounded = false;
    v.tail_bound = std::numeric_limits<double>::infinity();
    v.abs_convergent = cd.verdict == Verdict::Convergent;
    v.note = "convergent-looking but unbounded error: no tail model";
  }
  if (v.bounded) {
    v.matches_a_n = std::abs(a - s) <= v.tail_bound + traces.bound(n) + v.rounding;
  }
  return v;
}

long jensen_count(const std::function<double(cplx)>& log_abs, double r, double extra_log) {
  if (!(r > 0.0)) throw DomainError("radius must be positive");
  const double R = 2.0 / r;
  double sup = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < 4096; ++j) sup = std::max(sup, log_abs(std::polar(R, 2.0 * std::numbers::pi * j / 4096)));
  const double v = std::max(0.0, sup + extra_log);
  return static_cast<long>(std::ceil(2.0 / std::numbers::ln2 * v));
}

long jensen_count(const PowerSeries& series, double r, double tol) {
  const double R = 2.0 / r;
  const double certified = reliability_radius(series, tol);
  if (!(R < certified))
    throw UnreliableTruncationError("Jensen circle |z| = " + std::to_string(R) +
                                        " exceeds the truncation-reliability radius " + std::to_string(certified),
                                    certified);
  return jensen_count([&](cplx z) { return std::log(std::abs(series.evaluate(z))); }, r);
}

long jensen_count(const HorseshoeModel& model, double r) {
  // log(1 + x) ≤ x bounds each omitted factor's contribution.
  const double extra = 2.0 * omitted_factor_bound(model, 2.0 / r);
  return jensen_count([&](cplx z) { return horseshoe_log_abs(model, z); }, r, extra);
}

long resonance_count(const ResonanceSet& zeros, double r) {
  long c = 0;
  for (const Zero& z : zeros.zeros)
    if (std::abs(z.z) * r < 1.0) c += z.multiplicity;
  return c;
}

CountingFit counting_exponent(const std::function<long(double)>& count, double r_min, double r_max,
                              std::size_t samples) {
  if (!(r_min > 0.0) || !(r_max > r_min) || !(r_max < 1.0)) throw DomainError("need 0 < r_min < r_max < 1");
  if (samples < 2) throw DomainError("need at least two samples");
  CountingFit fit;
  std::vector<double> x, y;
  for (std::size_t i = 0; i < samples; ++i) {
    const double r = std::exp(std::log(r_max) + (std::log(r_min) - std::log(r_max)) * static_cast<double>(i) /
                                                    static_cast<double>(samples - 1));
    const long c = count(r);
    fit.r.push_back(r);
    fit.counts.push_back(c);
    if (c > 0) {
      x.push_back(std::log(-std::log(r)));
      y.push_back(std::log(static_cast<double>(c)));
    }
  }
  if (x.size() < 2) throw InsufficientDataError("counting function vanishes on the sampled range");
  const LinearFit f = linear_fit(x, y);
  fit.exponent = f.slope;
  fit.r_squared = f.r_squared;
  return fit;
}

}  // namespace reslab
