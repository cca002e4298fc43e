#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "reslab/power_series.hpp"
#include "reslab/symbolic_shift.hpp"

namespace reslab {

using uint128 = unsigned __int128;

// Rotation angle θ ∈ (0,1) with a Diophantine constant certified up to a horizon.
struct RotationSpec {
  uint128 fraction = 0;  // θ·2^128
  double theta = 0.0;
  double c = 0.0;        // min n²|1 - e^{2πinθ}| over n ≤ verified_horizon
  std::uint64_t verified_horizon = 0;

  // θ = (√5 - 1)/2 to 128 bits.
  static RotationSpec golden(std::uint64_t horizon = 10000);
  // θ taken as the exact binary value of the double.
  static RotationSpec from_theta(double theta, std::uint64_t horizon = 10000);

  // frac(m·n·θ) for the stored fraction.
  double frac(std::uint64_t m, std::uint64_t n = 1) const;
  // e^{2πi m n θ}
  cplx phase(std::uint64_t m, std::uint64_t n = 1) const;
};

// min_{1≤n≤H} n²|1 - e^{2πinθ}|; throws DegenerateInputError when θ looks rational at the horizon.
double diophantine_constant(double theta, std::uint64_t horizon);
double diophantine_constant(uint128 fraction, std::uint64_t horizon);

struct AbelResult {
  cplx sum{0.0, 0.0};     // Σ_{m<horizon} b_m c_m
  double tail_bound = 0;  // 2 M c_horizon
  double global_bound = 0;  // 2 M c_0, bounds the full sum
};
// Requires c positive and non-increasing on [0, horizon] and |Σ_{m≤ℓ} b_m| ≤ M for ℓ < horizon.
AbelResult abel_sum(double M, const std::function<double(std::size_t)>& c,
                    const std::function<cplx(std::size_t)>& b, std::size_t horizon);

enum class CounterexampleKind { A, B };

// a_n = Σ_{m ≥ start_index} (e^{2πimθ}/L(m))^n with L(m) = ln m (kind A)
// or ln(k(m) + 2) over the factorial blocks (kind B).
struct CounterexampleSeries {
  CounterexampleKind kind = CounterexampleKind::A;
  std::uint64_t start_index = 2;
  RotationSpec rotation = RotationSpec::golden();

  static CounterexampleSeries type_a(std::uint64_t start = 2);
  static CounterexampleSeries type_b(std::uint64_t start = 0);

  // Denominator L(m) of the m-th term.
  double log_scale(std::uint64_t m) const;
  // 1/z_m^n
  cplx inverse_zero_power(std::uint64_t m, unsigned n) const;
  // Truncated traces a_1..a_{n_max} at m0 with their tail bounds.
  TraceSequence traces(unsigned n_max, std::uint64_t m0) const;
};

// Block index k(m): I_0 = {0, 1}, I_k = [k! + 1, (k+1)!].
unsigned factorial_block(std::uint64_t m);
// First and last element of I_k (k ≤ 19).
std::pair<std::uint64_t, std::uint64_t> factorial_block_range(unsigned k);

struct CounterexampleTrace {
  cplx value{0.0, 0.0};
  double tail_bound = 0.0;
  std::uint64_t m0 = 0;
  bool flagged = false;  // tail bound above the requested tolerance
};
// Partial sum over start ≤ m < m0 with tail ≤ (4/c) n² / L(m0)^n.
CounterexampleTrace counterexample_traces(const CounterexampleSeries& series, unsigned n, std::uint64_t m0,
                                          double tolerance = 1e300);
// Full sum with a small certified remainder: summation by parts for kind A,
// closed-form block sums for kind B.
CounterexampleTrace accelerated_trace(const CounterexampleSeries& series, unsigned n);

struct RealiseOptions {
  std::size_t degree = 48;       // α_0..α_degree are returned and checked
  std::size_t samples = 4096;    // circle samples for the Cauchy coefficients
  unsigned max_doublings = 64;
};
struct RealisedWeight {
  WeightSpec weight;
  std::uint64_t start_index = 0;
  cplx f_tilde_one{0.0, 0.0};
  cplx lambda{0.0, 0.0};
  double max_scaled_alpha = 0.0;   // max |α_ℓ| ρ^ℓ
  double certificate = 0.0;        // bound on the error in |α_ℓ| ρ^ℓ
  double route_difference = 0.0;   // max |α_ℓ - α_ℓ(direct)| ρ^ℓ
  std::vector<double> trace_values;  // 2 Re a_n^{(k)} used for f̃
};
RealisedWeight realise_as_h(const CounterexampleSeries& series, double eps, double rho,
                            RealiseOptions options = {});
// Single realisation step from the symmetrised traces t_n = a_n + conj(a_n), n = 1..t.size(),
// taken as exact and with t_n = 0 beyond the list.
RealisedWeight realise_from_traces(const std::vector<double>& t, double rho, RealiseOptions options = {});

// Finite set, complement of a finite set, or a union of residue classes.
struct IndexSet {
  enum class Kind { Finite, Cofinite, Periodic };
  Kind kind = Kind::Finite;
  std::vector<unsigned> members;  // elements, excluded elements, or residues
  unsigned period = 1;

  static IndexSet finite(std::vector<unsigned> elements);
  static IndexSet all_but(std::vector<unsigned> excluded);
  static IndexSet periodic(unsigned period, std::vector<unsigned> residues);
  bool contains(unsigned n) const;
  bool has_final_segment() const;
};

struct PrescribedTraceSet {
  WeightSpec weight;
  double scale = 0.0;          // a in (1 - 2z) e^{aQ}
  std::vector<double> b;       // Q = z(1-z) Σ b_n z^n
  std::vector<double> q_coeffs;  // β_n = [z^n] Q
  double max_scaled_alpha = 0.0;
  // Traces of (1 - 2z) e^{aQ}: 2^n - n a β_n.
  double zeta_trace(unsigned n) const;
};
PrescribedTraceSet prescribe_trace_formula_set(const IndexSet& E, double eps, double rho,
                                               std::size_t degree = 48);

struct ZeroDensityResult {
  WeightSpec weight;
  std::vector<double> zeros;      // zeros z_m of the Weierstrass product, increasing
  std::vector<unsigned> genus;    // p_m
  std::size_t m0 = 0;             // base zeros dropped
  cplx lambda{0.5, 0.0};          // extra zero fixing f(1) = -1
  double max_scaled_alpha = 0.0;
  double density_margin = 0.0;    // min over samples with N0 > 0 of #{z_m ≤ 1/(16r)} / N0(r)
};
// N0 given as (r, N0(r)) samples.
ZeroDensityResult prescribe_zero_density(const std::vector<std::pair<double, double>>& n0, double eps,
                                         double rho, std::size_t m0_cap = 64, std::size_t degree = 48);
// Horseshoe resonances of modulus > r: Σ_k m_k #{w : |w|/c_k < 1/r} over the zeros w of f.
long zero_density_resonance_count(const ZeroDensityResult& result, double r);

struct BlockJump {
  unsigned k = 0;
  std::uint64_t first = 0;     // first index of I_k
  std::uint64_t count = 0;     // N_k^{(n)}
  bool qualifying = false;     // φ(k) = n
  double bound = 0.0;          // N_k / (2 ln(k+2)^n)
  double jump = 0.0;           // Re S̃_{first + N_k} - Re S_first
  double natural_spread = 0.0;  // max_{m ∈ I_k} |S_m - S_first|
  double natural_bound = 0.0;   // (2/|1 - q|) / ln(k+2)^n
};
struct ReorderDemo {
  unsigned n = 1;
  double epsilon = 1.0 / 6.0;
  std::vector<cplx> natural;    // S_0 = 0, S_{i+1} = S_i + z_i^{-n}
  std::vector<cplx> reordered;
  std::vector<BlockJump> blocks;
};
// φ = 1, 1, 2, 1, 2, 3, ...
unsigned reorder_schedule(unsigned k);
ReorderDemo reorder_divergence_demo(unsigned n, unsigned k_max,
                                    const RotationSpec& rotation = RotationSpec::golden());

}  // namespace reslab
