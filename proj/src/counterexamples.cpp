#include "reslab/counterexamples.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "reslab/errors.hpp"
#include "reslab/fft.hpp"
#include "reslab/horseshoe.hpp"

namespace reslab {

namespace {

constexpr double kU = std::numeric_limits<double>::epsilon();
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kTwo64 = 18446744073709551616.0;
constexpr unsigned kMaxBlock = 19;

const uint128 kGoldenFraction =
    (static_cast<uint128>(0x9e3779b97f4a7c15ULL) << 64) | static_cast<uint128>(0xf39cc0605cedc834ULL);

double fraction_to_double(uint128 f) {
  return (static_cast<double>(static_cast<std::uint64_t>(f >> 64)) +
          static_cast<double>(static_cast<std::uint64_t>(f)) / kTwo64) /
         kTwo64;
}

// Signed representative of a fraction in [-1/2, 1/2).
double centred(uint128 f) {
  const double x = fraction_to_double(f);
  return x >= 0.5 ? x - 1.0 : x;
}

uint128 fraction_of(double theta) {
  const double hi = std::floor(std::ldexp(theta, 64));
  const double lo = std::ldexp(std::ldexp(theta, 64) - hi, 64);
  return (static_cast<uint128>(static_cast<std::uint64_t>(hi)) << 64) |
         static_cast<uint128>(static_cast<std::uint64_t>(lo));
}

std::uint64_t factorial(unsigned k) {
  std::uint64_t f = 1;
  for (unsigned i = 2; i <= k; ++i) f *= i;
  return f;
}

void check_step(const CounterexampleSeries& s, unsigned n) {
  if (n == 0) throw DomainError("trace step must be at least 1");
  if (n > s.rotation.verified_horizon)
    throw PreconditionError("step " + std::to_string(n) + " exceeds the Diophantine horizon " +
                            std::to_string(s.rotation.verified_horizon));
  if (s.kind == CounterexampleKind::A && s.start_index < 2)
    throw DomainError("type (a) series start at m >= 2");
}

// Σ_{m=lo}^{hi} q^m with q = e^{2πinθ}.
cplx geometric_block(const RotationSpec& rot, unsigned n, std::uint64_t lo, std::uint64_t hi) {
  if (hi - lo < 64) {
    cplx s(0.0, 0.0);
    for (std::uint64_t m = lo; m <= hi; ++m) s += rot.phase(m, n);
    return s;
  }
  const cplx q = rot.phase(1, n);
  return (rot.phase(lo, n) - rot.phase(hi + 1, n)) / (1.0 - q);
}

struct Differences {
  std::vector<double> value;  // Δ^j c_M for j = 0..J, c_m = ln(m)^{-n}
  std::vector<double> error;
};

// Forward differences from the Taylor expansion of (ln(M + t))^{-n} and j!S(r, j) = Δ^j t^r |_0.
Differences log_power_differences(double M, unsigned n, unsigned J) {
  constexpr unsigned R = 80;
  const double L = std::log(M);
  std::vector<double> y(R + 1, 0.0), g(R + 1, 0.0);
  for (unsigned r = 1; r <= R; ++r) y[r] = ((r % 2) ? 1.0 : -1.0) / (static_cast<double>(r) * L);
  g[0] = 1.0;
  const double alpha = -static_cast<double>(n);
  for (unsigned r = 1; r <= R; ++r) {
    double acc = 0.0;
    for (unsigned i = 1; i <= r; ++i)
      acc += ((alpha + 1.0) * i - static_cast<double>(r)) * y[i] * g[r - i];
    g[r] = acc / r;
  }
  const double lead = std::pow(L, alpha);
  std::vector<double> tau(R + 1);
  double scale = lead;
  for (unsigned r = 0; r <= R; ++r) {
    tau[r] = g[r] * scale;
    scale /= M;
  }
  // T[j] holds j! S(r, j) for the current r.
  std::vector<double> T(J + 1, 0.0);
  T[0] = 1.0;
  Differences d{std::vector<double>(J + 1, 0.0), std::vector<double>(J + 1, 0.0)};
  std::vector<double> mag(J + 1, 0.0), last(J + 1, 0.0);
  for (unsigned r = 0; r <= R; ++r) {
    if (r > 0) {
      for (unsigned j = std::min(r, J); j >= 1; --j) T[j] = j * (T[j] + T[j - 1]);
      T[0] = 0.0;
    }
    for (unsigned j = 0; j <= std::min(r, J); ++j) {
      const double term = tau[r] * T[j];
      d.value[j] += term;
      mag[j] += std::abs(term);
      last[j] = std::abs(term);
    }
  }
  for (unsigned j = 0; j <= J; ++j) d.error[j] = 4.0 * R * kU * mag[j] + 2.0 * last[j];
  d.value[0] = lead;
  d.error[0] = kU * lead;
  return d;
}

}  // namespace

double RotationSpec::frac(std::uint64_t m, std::uint64_t n) const {
  const uint128 k = static_cast<uint128>(m) * n;
  return fraction_to_double(k * fraction);
}

cplx RotationSpec::phase(std::uint64_t m, std::uint64_t n) const {
  const uint128 k = static_cast<uint128>(m) * n;
  return std::polar(1.0, kTwoPi * centred(k * fraction));
}

RotationSpec RotationSpec::golden(std::uint64_t horizon) {
  RotationSpec r;
  r.fraction = kGoldenFraction;
  r.theta = fraction_to_double(kGoldenFraction);
  r.c = diophantine_constant(kGoldenFraction, horizon);
  r.verified_horizon = horizon;
  return r;
}

RotationSpec RotationSpec::from_theta(double theta, std::uint64_t horizon) {
  if (!(theta > 0.0 && theta < 1.0)) throw DomainError("rotation angle must lie in (0, 1)");
  RotationSpec r;
  r.fraction = fraction_of(theta);
  r.theta = theta;
  r.c = diophantine_constant(r.fraction, horizon);
  r.verified_horizon = horizon;
  return r;
}

double diophantine_constant(uint128 fraction, std::uint64_t horizon) {
  if (horizon < 1) throw DomainError("Diophantine horizon must be at least 1");
  double c = std::numeric_limits<double>::infinity();
  for (std::uint64_t n = 1; n <= horizon; ++n) {
    const double x = centred(static_cast<uint128>(n) * fraction);
    const double gap = 2.0 * std::abs(std::sin(std::numbers::pi * x));
    if (gap <= 64.0 * kU * static_cast<double>(n))
      throw DegenerateInputError("rotation is rational at machine resolution: n = " + std::to_string(n) +
                                 " gives |1 - e^{2πinθ}| = " + std::to_string(gap));
    c = std::min(c, static_cast<double>(n) * static_cast<double>(n) * gap);
  }
  return c;
}

double diophantine_constant(double theta, std::uint64_t horizon) {
  if (!(theta > 0.0 && theta < 1.0)) throw DomainError("rotation angle must lie in (0, 1)");
  return diophantine_constant(fraction_of(theta), horizon);
}

AbelResult abel_sum(double M, const std::function<double(std::size_t)>& c,
                    const std::function<cplx(std::size_t)>& b, std::size_t horizon) {
  if (!(M > 0.0)) throw PreconditionError("partial-sum bound M must be positive");
  AbelResult r;
  cplx partial(0.0, 0.0);
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < horizon; ++m) {
    const double cm = c(m);
    if (!(cm > 0.0) || cm > prev)
      throw PreconditionError("c is not positive and non-increasing at index " + std::to_string(m));
    prev = cm;
    const cplx bm = b(m);
    partial += bm;
    if (std::abs(partial) > M * (1.0 + 1e-12))
      throw PreconditionError("partial sum of b exceeds M at index " + std::to_string(m));
    r.sum += bm * cm;
  }
  const double ch = c(horizon);
  if (!(ch >= 0.0) || ch > prev)
    throw PreconditionError("c is not non-increasing at the horizon " + std::to_string(horizon));
  r.tail_bound = 2.0 * M * ch;
  r.global_bound = 2.0 * M * (horizon > 0 ? c(0) : ch);
  return r;
}

unsigned factorial_block(std::uint64_t m) {
  if (m <= 1) return 0;
  unsigned k = 1;
  std::uint64_t hi = 2;  // (k+1)!
  while (k < 20 && m > hi) {
    ++k;
    hi *= (k + 1);
  }
  return k;
}

std::pair<std::uint64_t, std::uint64_t> factorial_block_range(unsigned k) {
  if (k > kMaxBlock) throw DomainError("factorial blocks beyond I_19 overflow 64-bit indices");
  if (k == 0) return {0, 1};
  return {factorial(k) + 1, factorial(k + 1)};
}

CounterexampleSeries CounterexampleSeries::type_a(std::uint64_t start) {
  if (start < 2) throw DomainError("type (a) series start at m >= 2");
  CounterexampleSeries s;
  s.kind = CounterexampleKind::A;
  s.start_index = start;
  return s;
}

CounterexampleSeries CounterexampleSeries::type_b(std::uint64_t start) {
  CounterexampleSeries s;
  s.kind = CounterexampleKind::B;
  s.start_index = start;
  return s;
}

double CounterexampleSeries::log_scale(std::uint64_t m) const {
  if (kind == CounterexampleKind::A) {
    if (m < 2) throw DomainError("type (a) terms start at m = 2");
    return std::log(static_cast<double>(m));
  }
  return std::log(static_cast<double>(factorial_block(m)) + 2.0);
}

cplx CounterexampleSeries::inverse_zero_power(std::uint64_t m, unsigned n) const {
  return rotation.phase(m, n) * std::pow(log_scale(m), -static_cast<double>(n));
}

TraceSequence CounterexampleSeries::traces(unsigned n_max, std::uint64_t m0) const {
  std::vector<cplx> v(n_max);
  std::vector<double> b(n_max);
  for (unsigned n = 1; n <= n_max; ++n) {
    const auto t = counterexample_traces(*this, n, m0);
    v[n - 1] = t.value;
    b[n - 1] = t.tail_bound;
  }
  return TraceSequence(std::move(v), std::move(b));
}

CounterexampleTrace counterexample_traces(const CounterexampleSeries& series, unsigned n, std::uint64_t m0,
                                          double tolerance) {
  check_step(series, n);
  if (m0 < 2) throw DomainError("truncation point m0 must be at least 2");
  const double dn = static_cast<double>(n);
  CounterexampleTrace out;
  out.m0 = m0;
  if (series.kind == CounterexampleKind::A) {
    cplx sum(0.0, 0.0), carry(0.0, 0.0);
    for (std::uint64_t m = series.start_index; m < m0; ++m) {
      const cplx term = series.inverse_zero_power(m, n);
      const cplx t = sum + term;
      carry += (sum - t) + term;
      sum = t;
    }
    out.value = sum + carry;
  } else {
    if (m0 - 1 > factorial(kMaxBlock + 1))
      throw DomainError("type (b) truncation beyond 20! is not representable");
    const unsigned k_last = factorial_block(m0 - 1);
    for (unsigned k = factorial_block(series.start_index); k <= k_last && series.start_index < m0; ++k) {
      auto [lo, hi] = factorial_block_range(k);
      lo = std::max(lo, series.start_index);
      hi = std::min(hi, m0 - 1);
      if (lo > hi) continue;
      out.value += geometric_block(series.rotation, n, lo, hi) *
                   std::pow(std::log(static_cast<double>(k) + 2.0), -dn);
    }
  }
  const double L = series.log_scale(std::max(m0, series.start_index));
  out.tail_bound = 4.0 / series.rotation.c * dn * dn * std::pow(L, -dn);
  out.flagged = out.tail_bound > tolerance;
  return out;
}

CounterexampleTrace accelerated_trace(const CounterexampleSeries& series, unsigned n) {
  check_step(series, n);
  const double dn = static_cast<double>(n);
  const cplx q = series.rotation.phase(1, n);
  const double gap = std::abs(1.0 - q);
  CounterexampleTrace out;
  if (series.kind == CounterexampleKind::B) {
    const unsigned k0 = factorial_block(series.start_index);
    double mag = 0.0;
    for (unsigned k = k0; k <= kMaxBlock; ++k) {
      auto [lo, hi] = factorial_block_range(k);
      lo = std::max(lo, series.start_index);
      if (lo > hi) continue;
      const cplx term = geometric_block(series.rotation, n, lo, hi) *
                        std::pow(std::log(static_cast<double>(k) + 2.0), -dn);
      out.value += term;
      mag += std::abs(term);
    }
    out.m0 = factorial(kMaxBlock + 1) + 1;
    out.tail_bound = 4.0 / gap * std::pow(std::log(kMaxBlock + 3.0), -dn) + 8.0 * kU * mag;
    return out;
  }

  const std::uint64_t M = std::max<std::uint64_t>(series.start_index, 256);
  double mag = 0.0;
  for (std::uint64_t m = series.start_index; m < M; ++m) {
    const cplx term = series.inverse_zero_power(m, n);
    out.value += term;
    mag += std::abs(term);
  }
  const double dM = static_cast<double>(M);
  constexpr unsigned Jmax = 8;
  const Differences d = log_power_differences(dM, n, Jmax);
  const cplx ratio = q / (1.0 - q);
  const cplx head = series.rotation.phase(M, n) / (1.0 - q);
  // Remainder after J summations by parts, bounded by Abel and a Cauchy estimate on |ζ - x| ≤ x/4.
  double best = std::numeric_limits<double>::infinity();
  unsigned bestJ = 0;
  const double cauchy = std::pow(std::log(0.75 * dM), -dn);
  for (unsigned J = 0; J <= Jmax; ++J) {
    double err = std::pow(std::abs(ratio), J) * 4.0 / gap * std::tgamma(J + 1.0) * std::pow(4.0 / dM, J) * cauchy;
    for (unsigned j = 0; j < J; ++j) err += std::pow(std::abs(ratio), j) * d.error[j] / gap;
    if (err < best) {
      best = err;
      bestJ = J;
    }
  }
  cplx rj(1.0, 0.0);
  for (unsigned j = 0; j < bestJ; ++j) {
    const cplx term = rj * head * d.value[j];
    out.value += term;
    mag += std::abs(term);
    rj *= ratio;
  }
  out.m0 = M;
  out.tail_bound = best + 8.0 * kU * mag;
  return out;
}

namespace {

double tail_sum_n_x(std::size_t N, double x) {
  // Σ_{n>N} n x^n
  const double xn = std::pow(x, static_cast<double>(N + 1));
  return xn * (static_cast<double>(N + 1) - static_cast<double>(N) * x) / ((1.0 - x) * (1.0 - x));
}

struct RealiseCore {
  RealisedWeight w;
  std::vector<double> alpha;
};

// From t_n with absolute errors err_n and a bound on the log-series tail on |z| = ρ.
RealiseCore realise_core(const std::vector<double>& t, const std::vector<double>& err, double tail, double rho,
                         const RealiseOptions& options) {
  if (!(rho >= 2.0)) throw DomainError("realisation radius must satisfy rho >= 2");
  const std::size_t S = options.samples;
  const std::size_t L = options.degree;
  if (S < 4 * (L + 2)) throw DomainError("too few circle samples for the requested degree");
  const std::size_t N = t.size();

  double dg = tail;
  double gmag = 0.0;
  {
    double rn = 1.0;
    for (std::size_t n = 1; n <= N; ++n) {
      rn *= rho;
      dg += err[n - 1] * rn / static_cast<double>(n);
      gmag += std::abs(t[n - 1]) * rn / static_cast<double>(n);
    }
  }
  dg += 4.0 * static_cast<double>(N + 2) * kU * gmag;

  auto log_f = [&](cplx z) {
    cplx acc(0.0, 0.0);
    for (std::size_t n = N; n >= 1; --n) acc = acc * z + t[n - 1] / static_cast<double>(n);
    return -acc * z;
  };
  const cplx F1 = std::exp(log_f(1.0));
  const double dF1 = std::abs(F1) * std::expm1(dg);
  const cplx lambda = F1 / (1.0 + F1);

  std::vector<cplx> B(S), Hdirect(S);
  double Fmax = 0.0, Bmax = 0.0;
  for (std::size_t j = 0; j < S; ++j) {
    const cplx z = std::polar(rho, kTwoPi * static_cast<double>(j) / static_cast<double>(S));
    const cplx F = std::exp(log_f(z));
    Fmax = std::max(Fmax, std::abs(F));
    const cplx H = (F - 1.0) / z - (F1 - 1.0);
    B[j] = H / (1.0 - z);
    Bmax = std::max(Bmax, std::abs(B[j]));
    const cplx f = (1.0 - z / lambda) * F;
    Hdirect[j] = -(f - 1.0 + 2.0 * z) / (z * (1.0 - z));
  }
  const auto beta = cauchy_coefficients(B, rho, S / 2);
  const auto direct = cauchy_coefficients(Hdirect, rho, L + 1);

  // Aliasing floor from the upper half of the resolved band.
  double alias = 0.0;
  {
    double rl = std::pow(rho, static_cast<double>(S / 4));
    for (std::size_t l = S / 4; l < S / 2; ++l) {
      alias = std::max(alias, std::abs(beta[l]) * rl);
      rl *= rho;
    }
  }
  const double dF = Fmax * std::expm1(dg);
  const double dH = dF / rho + dF1;
  const double dB = dH / (rho - 1.0) + 32.0 * kU * Bmax + alias;
  const double dinv_lambda = dF1 / (std::abs(F1) * std::abs(F1));

  RealiseCore core;
  core.alpha.resize(L + 1);
  core.alpha[0] = -(beta[0] + (F1 * F1 - 1.0) / F1).real();
  double cert = dB + dF1 * (1.0 + 1.0 / (std::abs(F1) * std::abs(F1)));
  double max_scaled = std::abs(core.alpha[0]);
  double route = std::abs(core.alpha[0] - direct[0].real());
  double rl = 1.0;
  for (std::size_t l = 0; l < L; ++l) {
    core.alpha[l + 1] = -(beta[l + 1] - beta[l] / lambda).real();
    const double next = rl * rho;
    cert = std::max(cert, dB + rho * dB / std::abs(lambda) + next * std::abs(beta[l]) * dinv_lambda);
    max_scaled = std::max(max_scaled, std::abs(core.alpha[l + 1]) * next);
    route = std::max(route, std::abs(core.alpha[l + 1] - direct[l + 1].real()) * next);
    rl = next;
  }
  core.w.f_tilde_one = F1;
  core.w.lambda = lambda;
  core.w.max_scaled_alpha = max_scaled;
  core.w.certificate = cert;
  core.w.route_difference = route;
  core.w.trace_values = t;
  return core;
}

WeightSpec weight_from_real(const std::vector<double>& alpha) {
  std::vector<cplx> a(alpha.begin(), alpha.end());
  return WeightSpec::from_alpha(std::move(a));
}

}  // namespace

RealisedWeight realise_from_traces(const std::vector<double>& t, double rho, RealiseOptions options) {
  auto core = realise_core(t, std::vector<double>(t.size(), 0.0), 0.0, rho, options);
  core.w.weight = weight_from_real(core.alpha);
  return std::move(core.w);
}

RealisedWeight realise_as_h(const CounterexampleSeries& series, double eps, double rho, RealiseOptions options) {
  if (!(eps > 0.0)) throw DomainError("eps must be positive");
  if (!(rho >= 2.0)) throw DomainError("realisation radius must satisfy rho >= 2");
  constexpr std::size_t kMaxTerms = 2000;
  constexpr double kTailTarget = 1e-18;
  std::uint64_t start = series.start_index;
  double best = std::numeric_limits<double>::infinity();
  for (unsigned it = 0; it < options.max_doublings; ++it) {
    CounterexampleSeries s = series;
    s.start_index = start;
    const double L = s.kind == CounterexampleKind::A ? std::log(static_cast<double>(start))
                                                     : std::log(factorial_block(start) + 2.0);
    const double x = rho / L;
    if (x < 1.0) {
      // |a_n| ≤ (4 n²/c) L^{-n}, so the log series beyond N is below (8/c) Σ n x^n.
      std::size_t N = 1;
      while (N < kMaxTerms && 8.0 / s.rotation.c * tail_sum_n_x(N, x) > kTailTarget) ++N;
      const double tail = 8.0 / s.rotation.c * tail_sum_n_x(N, x);
      if (N < kMaxTerms && N <= s.rotation.verified_horizon) {
        std::vector<double> t(N), err(N);
        for (std::size_t n = 1; n <= N; ++n) {
          const auto a = accelerated_trace(s, static_cast<unsigned>(n));
          t[n - 1] = 2.0 * a.value.real();
          err[n - 1] = 2.0 * a.tail_bound;
        }
        auto core = realise_core(t, err, tail, rho, options);
        const double achieved = core.w.max_scaled_alpha + core.w.certificate;
        best = std::min(best, achieved);
        if (achieved <= eps) {
          core.w.weight = weight_from_real(core.alpha);
          core.w.start_index = start;
          return std::move(core.w);
        }
      }
    }
    if (start > (std::uint64_t{1} << 61)) break;
    start *= 2;
  }
  throw NonConvergenceError("no start index up to the doubling cap meets |alpha_l| <= eps/rho^l; best max |alpha_l| rho^l "
                            "(with certificate) = " + std::to_string(best),
                            best);
}

IndexSet IndexSet::finite(std::vector<unsigned> elements) {
  IndexSet s;
  s.kind = Kind::Finite;
  for (unsigned e : elements)
    if (e == 0) throw DomainError("index sets contain positive integers only");
  std::sort(elements.begin(), elements.end());
  elements.erase(std::unique(elements.begin(), elements.end()), elements.end());
  s.members = std::move(elements);
  return s;
}

IndexSet IndexSet::all_but(std::vector<unsigned> excluded) {
  IndexSet s = finite(std::move(excluded));
  s.kind = Kind::Cofinite;
  return s;
}

IndexSet IndexSet::periodic(unsigned period, std::vector<unsigned> residues) {
  if (period == 0) throw DomainError("period must be positive");
  IndexSet s;
  s.kind = Kind::Periodic;
  s.period = period;
  for (unsigned& r : residues) r %= period;
  std::sort(residues.begin(), residues.end());
  residues.erase(std::unique(residues.begin(), residues.end()), residues.end());
  s.members = std::move(residues);
  return s;
}

bool IndexSet::contains(unsigned n) const {
  switch (kind) {
    case Kind::Finite:
      return std::binary_search(members.begin(), members.end(), n);
    case Kind::Cofinite:
      return n > 0 && !std::binary_search(members.begin(), members.end(), n);
    case Kind::Periodic:
      return n > 0 && std::binary_search(members.begin(), members.end(), n % period);
  }
  return false;
}

bool IndexSet::has_final_segment() const {
  if (kind == Kind::Cofinite) return true;
  if (kind == Kind::Periodic) return members.size() == period;
  return false;
}

double PrescribedTraceSet::zeta_trace(unsigned n) const {
  const double beta = n < q_coeffs.size() ? q_coeffs[n] : 0.0;
  return std::pow(2.0, n) - static_cast<double>(n) * scale * beta;
}

PrescribedTraceSet prescribe_trace_formula_set(const IndexSet& E, double eps, double rho, std::size_t degree) {
  if (!(eps > 0.0) || !(rho > 0.0)) throw DomainError("eps and rho must be positive");
  const std::size_t T = degree + 2;
  PrescribedTraceSet out;
  out.b.assign(T + 1, 0.0);

  const bool everything = E.has_final_segment() && (E.kind == IndexSet::Kind::Periodic || E.members.empty());
  if (everything) {
    out.q_coeffs.assign(T + 1, 0.0);
    out.weight = WeightSpec::from_alpha({});
    return out;
  }
  if (E.has_final_segment()) {
    // Finitely many failing steps F: β_n = 1 on F except the last, which balances Q(1) = 0.
    const auto& F = E.members;
    if (F.size() == 1)
      throw DomainError("a single failing step cannot be prescribed: Q(1) = 0 needs two nonzero coefficients");
    if (F.back() > T) throw DomainError("failing steps exceed the working degree");
    std::vector<double> beta(T + 2, 0.0);
    for (std::size_t i = 0; i + 1 < F.size(); ++i) beta[F[i]] = 1.0;
    beta[F.back()] = -static_cast<double>(F.size() - 1);
    out.b[0] = beta[1];
    for (std::size_t n = 1; n <= T; ++n) out.b[n] = out.b[n - 1] + beta[n + 1];
  } else {
    auto ell = [&](std::size_t n) {
      std::size_t l = n;
      while (E.contains(static_cast<unsigned>(l + 2))) ++l;
      return l;
    };
    auto inv_fact = [](std::size_t l) { return std::exp(-std::lgamma(static_cast<double>(l) + 2.0)); };
    out.b[0] = E.contains(1) ? 0.0 : inv_fact(ell(0));
    for (std::size_t n = 1; n <= T; ++n)
      out.b[n] = E.contains(static_cast<unsigned>(n + 1)) ? out.b[n - 1] : inv_fact(ell(n));
  }
  out.q_coeffs.assign(T + 1, 0.0);
  out.q_coeffs[1] = out.b[0];
  for (std::size_t n = 1; n < T; ++n) out.q_coeffs[n + 1] = out.b[n] - out.b[n - 1];

  PowerSeries q(T), Q(T);
  for (std::size_t n = 0; n <= T; ++n) q[n] = out.b[n];
  for (std::size_t n = 0; n <= T; ++n) Q[n] = out.q_coeffs[n];
  PowerSeries one_minus_2z(T);
  one_minus_2z[0] = 1.0;
  one_minus_2z[1] = -2.0;
  const PowerSeries base = multiply(one_minus_2z, q, T);

  double a = 1.0;
  for (int it = 0; it < 200; ++it, a *= 0.5) {
    // φ(aQ) = Σ (aQ)^j/(j+1)!, h = -a (1 - 2z) q φ(aQ).
    PowerSeries aQ(T);
    for (std::size_t n = 0; n <= T; ++n) aQ[n] = a * Q[n];
    PowerSeries phi = PowerSeries::one(T), pw = PowerSeries::one(T);
    double fact = 1.0;
    for (std::size_t j = 1; j <= T; ++j) {
      pw = multiply(pw, aQ, T);
      fact *= static_cast<double>(j + 1);
      for (std::size_t n = 0; n <= T; ++n) phi[n] += pw[n] / fact;
    }
    const PowerSeries h = multiply(base, phi, T);
    std::vector<cplx> alpha(degree + 1);
    double worst = 0.0, rl = 1.0;
    for (std::size_t l = 0; l <= degree; ++l) {
      alpha[l] = -a * h[l].real();
      worst = std::max(worst, std::abs(alpha[l]) * rl);
      rl *= rho;
    }
    if (worst <= eps) {
      out.scale = a;
      out.max_scaled_alpha = worst;
      out.weight = WeightSpec::from_alpha(std::move(alpha));
      return out;
    }
  }
  throw NonConvergenceError("no scale a > 2^-200 meets the coefficient bound", 0.0);
}

namespace {

// log E(u, p) = -Σ_{j>p} u^j / j for |u| < 1.
double log_primary_factor(double u, unsigned p) {
  double term = std::pow(u, static_cast<double>(p + 1));
  double sum = 0.0;
  for (unsigned j = p + 1; j < p + 2000 && term != 0.0; ++j) {
    sum -= term / j;
    if (term / j < 1e-20 * std::abs(sum)) break;
    term *= u;
  }
  return sum;
}

}  // namespace

ZeroDensityResult prescribe_zero_density(const std::vector<std::pair<double, double>>& n0, double eps, double rho,
                                         std::size_t m0_cap, std::size_t degree) {
  if (!(eps > 0.0) || !(rho > 0.0)) throw DomainError("eps and rho must be positive");
  std::vector<std::pair<double, double>> samples;  // (R = 1/(16 r), N0)
  for (const auto& [r, v] : n0) {
    if (!(r > 0.0) || !std::isfinite(v)) throw DomainError("N0 samples need r > 0 and finite values");
    samples.push_back({1.0 / (16.0 * r), v});
  }
  std::sort(samples.begin(), samples.end());
  const double R_max = samples.empty() ? 1.0 : samples.back().first;

  std::vector<double> base;
  for (std::size_t m = 0; base.size() <= m0_cap + 1 || base.back() < 2.0 * R_max; ++m)
    base.push_back(2.0 * std::exp(std::sqrt(static_cast<double>(m))));

  const std::size_t T = degree + 64;
  double best = std::numeric_limits<double>::infinity();
  double best_margin = 0.0;
  for (std::size_t m0 = 0; m0 <= m0_cap; ++m0) {
    const double floor_mod = base[m0];
    std::vector<double> zeros(base.begin() + static_cast<std::ptrdiff_t>(m0), base.end());
    for (const auto& [R, v] : samples) {
      if (v <= 0.0 || 0.99 * R < floor_mod) continue;
      const auto target = static_cast<long>(std::ceil(2.0 * v));
      const long have = std::upper_bound(zeros.begin(), zeros.end(), R) - zeros.begin();
      for (long i = have; i < target; ++i) zeros.insert(std::upper_bound(zeros.begin(), zeros.end(), 0.99 * R), 0.99 * R);
    }
    std::vector<unsigned> p(zeros.size());
    for (std::size_t i = 0; i < zeros.size(); ++i) p[i] = static_cast<unsigned>(m0 + i + 1);

    PowerSeries G(T);
    double G1 = 0.0;
    for (std::size_t i = 0; i < zeros.size(); ++i) {
      const double lz = std::log(zeros[i]);
      for (std::size_t j = p[i] + 1; j <= T; ++j) G[j] -= std::exp(-static_cast<double>(j) * lz) / static_cast<double>(j);
      G1 += log_primary_factor(1.0 / zeros[i], p[i]);
    }
    const PowerSeries P = series_exp(G, T);
    const double inv_lambda = 1.0 + std::exp(-G1);
    const double two_minus = -std::expm1(-G1);
    std::vector<double> d(T + 1, 0.0);
    d[1] = P[1].real() + two_minus;
    for (std::size_t j = 2; j <= T; ++j) d[j] = P[j].real() - inv_lambda * P[j - 1].real();
    std::vector<double> alpha(degree + 1, 0.0);
    double tail = 0.0;
    for (std::size_t i = T; i >= degree + 2; --i) tail += d[i];
    double worst = 0.0, rl = 1.0;
    for (std::size_t l = degree + 1; l-- > 0;) {
      alpha[l] = tail;
      tail += d[l + 1];
    }
    for (std::size_t l = 0; l <= degree; ++l) {
      worst = std::max(worst, std::abs(alpha[l]) * rl);
      rl *= rho;
    }

    double margin = std::numeric_limits<double>::infinity();
    for (const auto& [R, v] : samples) {
      if (v <= 0.0) continue;
      const long have = std::upper_bound(zeros.begin(), zeros.end(), R) - zeros.begin();
      margin = std::min(margin, static_cast<double>(have) / v);
    }
    if (worst < best) {
      best = worst;
      best_margin = margin;
    }
    if (worst <= eps) {
      ZeroDensityResult out;
      out.weight = weight_from_real(alpha);
      out.zeros = std::move(zeros);
      out.genus = std::move(p);
      out.m0 = m0;
      out.lambda = 1.0 / inv_lambda;
      out.max_scaled_alpha = worst;
      out.density_margin = margin;
      return out;
    }
  }
  throw NonConvergenceError("coefficient bound not met up to m0 = " + std::to_string(m0_cap) +
                                "; best max |alpha_l| rho^l = " + std::to_string(best) +
                                ", density margin " + std::to_string(best_margin),
                            best);
}

long zero_density_resonance_count(const ZeroDensityResult& result, double r) {
  if (!(r > 0.0)) throw DomainError("radius must be positive");
  std::vector<double> moduli = result.zeros;
  moduli.push_back(std::abs(result.lambda));
  long total = 0;
  for (double w : moduli) {
    for (unsigned k = 0; shell_scale(k) > w * r; ++k) total += static_cast<long>(shell_multiplicity(k));
  }
  return total;
}

unsigned reorder_schedule(unsigned k) {
  unsigned row = 1;
  while (k >= row) {
    k -= row;
    ++row;
  }
  return k + 1;
}

ReorderDemo reorder_divergence_demo(unsigned n, unsigned k_max, const RotationSpec& rotation) {
  if (n < 1) throw DomainError("step must be at least 1");
  if (k_max > 8) throw DomainError("k_max is capped at 8");
  ReorderDemo demo;
  demo.n = n;
  const double dn = static_cast<double>(n);
  const double eps = demo.epsilon;
  const std::uint64_t last = factorial_block_range(k_max).second;
  demo.natural.assign(last + 2, cplx(0.0, 0.0));
  demo.reordered.assign(last + 2, cplx(0.0, 0.0));
  const cplx q = rotation.phase(1, n);
  for (unsigned k = 0; k <= k_max; ++k) {
    const auto [lo, hi] = factorial_block_range(k);
    const double c = std::pow(std::log(k + 2.0), -dn);
    const unsigned phi = reorder_schedule(k);
    std::vector<std::uint64_t> first, rest;
    for (std::uint64_t m = lo; m <= hi; ++m) (rotation.frac(m, phi) <= eps ? first : rest).push_back(m);
    BlockJump jump;
    jump.k = k;
    jump.first = lo;
    jump.qualifying = phi == n;
    jump.natural_bound = 2.0 / std::abs(1.0 - q) * c;
    std::uint64_t pos = lo;
    for (auto list : {&first, &rest}) {
      for (std::uint64_t m : *list) {
        demo.reordered[pos + 1] = demo.reordered[pos] + rotation.phase(m, n) * c;
        ++pos;
      }
    }
    for (std::uint64_t m = lo; m <= hi; ++m) {
      demo.natural[m + 1] = demo.natural[m] + rotation.phase(m, n) * c;
      jump.natural_spread = std::max(jump.natural_spread, std::abs(demo.natural[m + 1] - demo.natural[lo]));
    }
    if (jump.qualifying) {
      jump.count = first.size();
      jump.bound = static_cast<double>(jump.count) * c / 2.0;
      jump.jump = demo.reordered[lo + jump.count].real() - demo.natural[lo].real();
    } else {
      std::uint64_t count = 0;
      for (std::uint64_t m = lo; m <= hi; ++m) count += rotation.frac(m, n) <= eps;
      jump.count = count;
    }
    demo.blocks.push_back(jump);
  }
  return demo;
}

}  // namespace reslab
