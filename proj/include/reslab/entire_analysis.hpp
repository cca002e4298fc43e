#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "reslab/horseshoe.hpp"
#include "reslab/power_series.hpp"

namespace reslab {

// Expanded with multiplicity; non-decreasing modulus, ties by increasing principal argument.
std::vector<cplx> order_zeros(const std::vector<Zero>& zeros);

struct OrderEstimate {
  double order = 0.0;
  bool degenerate = false;  // no nonzero coefficient beyond b_0
  std::size_t points_used = 0;
};
// ρ = limsup n log n / log(1/|b_n|), extrapolated over the top quartile of n.
OrderEstimate estimate_order_from_coeffs(const PowerSeries& series);

// log log M(R) / log R on each radius, M(R) = max_{|z|=R} |f|, from 1024 samples of log|f|.
std::vector<double> max_modulus_order_diagnostic(const std::function<double(cplx)>& log_abs,
                                                 const std::vector<double>& radii);

enum class Verdict { Convergent, Divergent, Undetermined };
std::string to_string(Verdict v);

// Verdict on Σ x_m for a positive non-increasing sequence, given partial data x_1..x_M.
struct ConvergenceData {
  unsigned p = 0;
  std::vector<std::size_t> checkpoints;   // M values (doubling)
  std::vector<double> partial_sums;       // S_M
  Verdict verdict = Verdict::Undetermined;
};
ConvergenceData series_convergence(const std::vector<double>& terms);

// Single-consumer stream of zeros in non-decreasing modulus.
class ZeroGenerator {
 public:
  virtual ~ZeroGenerator() = default;
  // Next zero, or nothing when the family is exhausted.
  virtual std::optional<Zero> next() = 0;
  // True if the family is finite and next() eventually returns nothing.
  virtual bool finite() const = 0;
};

std::unique_ptr<ZeroGenerator> list_generator(std::vector<Zero> zeros);
// z_m = f(m) for m = first, first+1, ... (moduli must be non-decreasing).
std::unique_ptr<ZeroGenerator> formula_generator(std::function<cplx(std::size_t)> f, std::size_t first);
// Zeros w/c_k with multiplicity m_k·mult(w), merged across shells by modulus.
std::unique_ptr<ZeroGenerator> shell_generator(std::vector<Zero> factor_zeros);

struct GenusReport {
  std::optional<unsigned> genus;    // set when determined
  bool infinite_up_to_pmax = false;
  bool undetermined = false;
  unsigned p_max = 8;
  std::vector<ConvergenceData> data;
};
// Uses at most horizon zeros (expanded with multiplicity).
GenusReport estimate_genus(ZeroGenerator& zeros, std::size_t horizon, unsigned p_max = 8);
GenusReport estimate_genus(const std::vector<cplx>& ordered_zeros, unsigned p_max = 8);

// E(u, p) = (1 - u) exp(Σ_{k≤p} u^k / k).
cplx weierstrass_factor(cplx u, unsigned p);
// Π_j E(z/z_j, p) expanded to the given order.
PowerSeries canonical_product(const std::vector<cplx>& zeros, unsigned p, std::size_t order);

struct LocalTraceRow {
  unsigned n = 0;
  cplx e{0.0, 0.0};
  double e_scaled = 0.0;  // |e_n| r^n
  double noise = 0.0;     // trace bound plus rounding, scaled by r^n
};
struct LocalTraceReport {
  double r = 0.0;
  std::vector<LocalTraceRow> rows;
  double slope = 0.0;   // of log(e_n r^n) against n over rows above noise
  bool pass = false;
};
LocalTraceReport check_local_trace_formula(const TraceSequence& traces, const std::vector<Zero>& zeros,
                                           double r, unsigned n_max, double cluster_eps = 1e-6);

// Bound on |Σ z^{-n}| over the zeros not yet emitted, given the last emitted modulus and
// the number of distinct zeros consumed so far.
struct TailModel {
  std::function<double(double last_modulus, std::size_t consumed, unsigned n)> bound;
  // The bound also holds for Σ |z|^{-n}, which certifies absolute convergence.
  bool absolute = true;
};
// Tail model for shell_generator families.
TailModel shell_tail_model(std::vector<Zero> factor_zeros);

struct GlobalTraceVerdict {
  unsigned n = 0;
  bool abs_convergent = false;
  Verdict abs_verdict = Verdict::Undetermined;
  cplx partial_sum{0.0, 0.0};
  double tail_bound = 0.0;
  double rounding = 0.0;
  bool bounded = false;     // a tail bound was available
  bool matches_a_n = false;
  std::size_t zeros_used = 0;
  std::string note;
  bool pass() const { return abs_convergent && matches_a_n; }
};
struct GlobalTraceOptions {
  std::size_t horizon = 1u << 20;
  // Stop once the tail bound falls below this fraction of |a_n|.
  double relative_tail = 1e-14;
};
GlobalTraceVerdict check_global_trace_formula(const TraceSequence& traces, ZeroGenerator& zeros, unsigned n,
                                              const TailModel* tail_model,
                                              GlobalTraceOptions options = {});

// ceil((2/ln 2) · sup_{|z|=2/r} log_+|f|) from 4096 samples; extra_log adds a bound on neglected factors.
long jensen_count(const std::function<double(cplx)>& log_abs, double r, double extra_log = 0.0);
// Series version: requires 2/r inside the truncation-reliability radius.
long jensen_count(const PowerSeries& series, double r, double tol = 1e-12);
// Horseshoe version through the product form, including the omitted-factor bound.
long jensen_count(const HorseshoeModel& model, double r);

// N(r) = #{resonances with |λ| > r} counted with multiplicity.
long resonance_count(const ResonanceSet& zeros, double r);

struct CountingFit {
  std::vector<double> r;
  std::vector<long> counts;
  double exponent = 0.0;  // slope of log N against log|log r|
  double r_squared = 0.0;
};
// Fits N(r) ≈ C |log r|^d for r log-spaced in [r_min, r_max].
CountingFit counting_exponent(const std::function<long(double)>& count, double r_min, double r_max,
                              std::size_t samples = 25);

}  // namespace reslab
