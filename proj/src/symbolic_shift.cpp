#include "reslab/symbolic_shift.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <thread>

#include "reslab/errors.hpp"

namespace reslab {

namespace {

constexpr double kPi = std::numbers::pi;

double param(const GeneratorParams& p, const std::string& key, double fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

// Σ_{l ≥ k+2} (iπ)^l / l!, summed from the small end for relative accuracy.
cplx rien_alpha(std::size_t k) {
  const cplx ipi(0.0, kPi);
  std::vector<cplx> terms;
  cplx t(1.0, 0.0);
  for (std::size_t l = 1; l <= k + 1; ++l) t *= ipi / static_cast<double>(l);
  for (std::size_t l = k + 2;; ++l) {
    t *= ipi / static_cast<double>(l);
    terms.push_back(t);
    if (std::abs(t) < 1e-40 * std::abs(terms.front()) || std::abs(t) == 0.0) break;
  }
  cplx s(0.0, 0.0);
  for (std::size_t i = terms.size(); i-- > 0;) s += terms[i];
  return s;
}

cplx log_alpha(std::size_t k, double a, double rho) {
  if (k == 0) return 0.0;
  const double sign = (k % 2 == 1) ? 1.0 : -1.0;
  return a * sign / (static_cast<double>(k) * std::pow(rho, static_cast<double>(k)));
}

}  // namespace

const std::vector<std::string>& WeightSpec::generator_names() {
  static const std::vector<std::string> names{"rien", "log"};
  return names;
}

WeightSpec WeightSpec::from_alpha(std::vector<cplx> alpha, bool positive) {
  WeightSpec s;
  s.alpha_ = std::move(alpha);
  s.positive_ = positive;
  for (std::size_t k = 0; k < s.alpha_.size(); ++k) {
    const cplx a = s.alpha_[k];
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
      throw DomainError("alpha_" + std::to_string(k) + " is not finite");
  }
  s.validate(s.alpha_.size());
  return s;
}

WeightSpec WeightSpec::from_generator(const std::string& name, GeneratorParams params,
                                      bool positive) {
  WeightSpec s;
  s.generator_ = name;
  s.positive_ = positive;
  if (name == "rien") {
    if (!params.empty()) throw DomainError("generator 'rien' takes no parameters");
  } else if (name == "log") {
    for (const auto& [key, value] : params) {
      if (key != "a" && key != "rho") throw DomainError("generator 'log' has no parameter '" + key + "'");
      if (!std::isfinite(value)) throw DomainError("generator parameter '" + key + "' is not finite");
    }
    params.emplace("a", 0.1);
    params.emplace("rho", 2.0);
    if (!(params["rho"] > 0.0)) throw DomainError("generator 'log' needs rho > 0");
  } else {
    throw DomainError("unknown weight generator '" + name + "'");
  }
  s.params_ = std::move(params);
  s.validate(kGeneratorDegree + 1);
  return s;
}

void WeightSpec::validate(std::size_t count) const {
  for (std::size_t k = 0; k < count; ++k) {
    const cplx a = alpha(k);
    if (a == cplx(-1.0, 0.0))
      throw DomainError("alpha_" + std::to_string(k) + " = -1 makes the beta ratios undefined");
    if (positive_ && !(a.imag() == 0.0 && a.real() > -1.0))
      throw DomainError("alpha_" + std::to_string(k) + " violates the positivity flag");
  }
}

cplx WeightSpec::alpha(std::size_t k) const {
  if (generator_.empty()) return k < alpha_.size() ? alpha_[k] : cplx(0.0, 0.0);
  if (generator_ == "rien") return rien_alpha(k);
  return log_alpha(k, param(params_, "a", 0.1), param(params_, "rho", 2.0));
}

std::vector<cplx> WeightSpec::alphas(std::size_t count) const {
  std::vector<cplx> out(count);
  for (std::size_t k = 0; k < count; ++k) out[k] = alpha(k);
  return out;
}

std::size_t WeightSpec::max_degree() const {
  if (is_generator()) return kGeneratorDegree;
  return alpha_.empty() ? 0 : alpha_.size() - 1;
}

std::optional<cplx> WeightSpec::closed_form_zeta_inverse(cplx z) const {
  if (generator_ == "rien") return std::exp(cplx(0.0, kPi) * z);
  if (generator_ == "log") {
    const double a = param(params_, "a", 0.1), rho = param(params_, "rho", 2.0);
    return 1.0 - 2.0 * z - z * (1.0 - z) * a * std::log(1.0 + z / rho);
  }
  return std::nullopt;
}

cplx WeightSpec::zeta_inverse(cplx z) const {
  if (auto v = closed_form_zeta_inverse(z)) return *v;
  cplx h(0.0, 0.0);
  for (std::size_t k = alpha_.size(); k-- > 0;) h = h * z + alpha_[k];
  return 1.0 - 2.0 * z - z * (1.0 - z) * h;
}

std::vector<cplx> beta_from_alpha(const WeightSpec& spec, std::size_t count) {
  std::vector<cplx> beta(count);
  cplx prev(0.0, 0.0);
  for (std::size_t m = 0; m < count; ++m) {
    const cplx a = spec.alpha(m);
    if (a == cplx(-1.0, 0.0))
      throw DomainError("alpha_" + std::to_string(m) + " = -1 makes the beta ratios undefined");
    beta[m] = (m == 0) ? 1.0 + a : (1.0 + a) / (1.0 + prev);
    prev = a;
  }
  return beta;
}

std::vector<cplx> beta_from_alpha(const WeightSpec& spec) {
  return beta_from_alpha(spec, spec.max_degree() + 1);
}

unsigned configured_threads() {
  if (const char* env = std::getenv("RESLAB_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) return static_cast<unsigned>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

namespace {

struct Partial {
  cplx sum{0.0, 0.0};
  double abs_sum = 0.0;
};

// Weight of one nonzero period-n word: product over its ones of the block
// products P_L = β_0 β_1 ... β_L, L the number of zeros preceding that one.
Partial enumerate_range(const std::vector<cplx>& block, unsigned n, std::uint64_t lo,
                        std::uint64_t hi) {
  Partial p;
  for (std::uint64_t w = lo; w < hi; ++w) {
    if (w == 0) {
      p.sum += 1.0;
      p.abs_sum += 1.0;
      continue;
    }
    const unsigned first = static_cast<unsigned>(__builtin_ctzll(w));
    cplx weight(1.0, 0.0);
    unsigned prev = first;
    std::uint64_t rest = w & (w - 1);
    while (rest != 0) {
      const unsigned pos = static_cast<unsigned>(__builtin_ctzll(rest));
      weight *= block[pos - prev - 1];
      prev = pos;
      rest &= rest - 1;
    }
    weight *= block[first + n - prev - 1];
    p.sum += weight;
    p.abs_sum += std::abs(weight);
  }
  return p;
}

}  // namespace

BoundedValue flat_trace_shift_bounded(const WeightSpec& spec, unsigned n, EnumerationOptions options) {
  if (n < 1) throw PreconditionError("period must be at least 1");
  if (n > options.cap || n > 62)
    throw ResourceError("period " + std::to_string(n) + " exceeds the enumeration cap " +
                        std::to_string(options.cap));
  const std::vector<cplx> beta = beta_from_alpha(spec, n);
  std::vector<cplx> block(n);
  cplx acc(1.0, 0.0);
  for (unsigned L = 0; L < n; ++L) {
    acc *= beta[L];
    block[L] = acc;
  }
  const std::uint64_t total = std::uint64_t{1} << n;
  unsigned threads = options.threads ? options.threads : configured_threads();
  const std::uint64_t min_chunk = std::uint64_t{1} << 14;
  threads = static_cast<unsigned>(std::max<std::uint64_t>(1, std::min<std::uint64_t>(threads, total / min_chunk)));

  // Fixed chunking independent of the thread count keeps the reduction order
  // and therefore the result bit-identical.
  const std::uint64_t chunks = std::min<std::uint64_t>(total, 256);
  const std::uint64_t chunk_size = (total + chunks - 1) / chunks;
  std::vector<Partial> partial(chunks);
  auto work = [&](unsigned tid) {
    for (std::uint64_t c = tid; c < chunks; c += threads) {
      const std::uint64_t lo = c * chunk_size, hi = std::min(total, lo + chunk_size);
      if (lo < hi) partial[c] = enumerate_range(block, n, lo, hi);
    }
  };
  if (threads <= 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }
  Partial total_sum;
  for (const Partial& p : partial) {
    total_sum.sum += p.sum;
    total_sum.abs_sum += p.abs_sum;
  }
  const double u = std::numeric_limits<double>::epsilon();
  const double bound = 4.0 * (2.0 * n + static_cast<double>(n) + 4.0) * u * total_sum.abs_sum;
  return {total_sum.sum, bound};
}

cplx flat_trace_shift(const WeightSpec& spec, unsigned n, EnumerationOptions options) {
  return flat_trace_shift_bounded(spec, n, options).value;
}

TraceSequence shift_traces(const WeightSpec& spec, unsigned n_max, EnumerationOptions options) {
  std::vector<cplx> v(n_max);
  std::vector<double> b(n_max);
  for (unsigned n = 1; n <= n_max; ++n) {
    BoundedValue r = flat_trace_shift_bounded(spec, n, options);
    v[n - 1] = r.value;
    b[n - 1] = r.error_bound;
  }
  return TraceSequence(std::move(v), std::move(b));
}

TransitionMatrix transition_matrix(const WeightSpec& spec, std::size_t N) {
  if (N < 1) throw PreconditionError("transition matrix needs N >= 1");
  const std::vector<cplx> beta = beta_from_alpha(spec, N);
  TransitionMatrix P = TransitionMatrix::Zero(static_cast<Eigen::Index>(N + 1),
                                              static_cast<Eigen::Index>(N + 1));
  for (std::size_t j = 0; j < N; ++j) P(0, static_cast<Eigen::Index>(j)) = beta[j];
  P(0, static_cast<Eigen::Index>(N)) = 1.0;
  for (std::size_t i = 0; i < N; ++i)
    P(static_cast<Eigen::Index>(i + 1), static_cast<Eigen::Index>(i)) = beta[i];
  P(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N)) = 1.0;
  return P;
}

cplx matrix_trace_oracle(const WeightSpec& spec, std::size_t N, unsigned k) {
  if (k < 1) throw PreconditionError("power k must be at least 1");
  if (N <= k)
    throw PreconditionError("matrix oracle requires N > k (N=" + std::to_string(N) +
                            ", k=" + std::to_string(k) + ")");
  TransitionMatrix base = transition_matrix(spec, N);
  TransitionMatrix result = TransitionMatrix::Identity(base.rows(), base.cols());
  unsigned e = k;
  while (e > 0) {
    if (e & 1U) result = result * base;
    e >>= 1U;
    if (e > 0) base = base * base;
  }
  return result.trace();
}

PowerSeries zeta_inverse_series(const WeightSpec& spec, std::size_t N) {
  PowerSeries s(N);
  s[0] = 1.0;
  if (N >= 1) s[1] = -2.0 - spec.alpha(0);
  for (std::size_t n = 2; n <= N; ++n) s[n] = spec.alpha(n - 2) - spec.alpha(n - 1);
  return s;
}

}  // namespace reslab
