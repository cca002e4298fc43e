#pragma once

#include <cstdint>
#include <vector>

#include "reslab/power_series.hpp"
#include "reslab/roots.hpp"
#include "reslab/symbolic_shift.hpp"

namespace reslab {

struct HorseshoeModel {
  static constexpr double lin_expansion = 4.0;

  WeightSpec weight;
  unsigned product_cutoff = 6;

  void validate() const;
};

// m_k = (k+1)(k+2)(k+3)/6.
std::uint64_t shell_multiplicity(unsigned k);
// c_k = 4^{-(k+2)}.
double shell_scale(unsigned k);
// Upper bound on Σ_{k>K} m_k q^k for 0 < q < 1.
double shell_tail_sum(unsigned K, double q);

// 1/|det(I - L^n)| = 16^n / (4^n - 1)^4.
double det_weight_factor(unsigned n);
// 16^{-n} Σ_{k≤K} C(k+3,3) 4^{-nk}.
double det_weight_factor_series(unsigned n, unsigned K);

cplx horseshoe_flat_trace(const HorseshoeModel& model, unsigned n);
TraceSequence horseshoe_traces(const HorseshoeModel& model, unsigned n_max,
                               EnumerationOptions options = {});

unsigned default_product_cutoff(const WeightSpec& weight, double radius, double tol);
// Estimated perturbation of the determinant on |z| ≤ radius from the omitted factors.
double omitted_factor_bound(const HorseshoeModel& model, double radius);

PowerSeries horseshoe_determinant(const HorseshoeModel& model, std::size_t N);
// Same, but raises TruncationError if the omitted factors exceed tol on |z| ≤ radius.
PowerSeries horseshoe_determinant(const HorseshoeModel& model, std::size_t N, double radius,
                                  double tol);
// Trace-domain route, used as an independent cross-check.
PowerSeries horseshoe_determinant_log(const HorseshoeModel& model, std::size_t N);

// log|d(z)| from the product over retained factors with exact ζ⁻¹ evaluations.
double horseshoe_log_abs(const HorseshoeModel& model, cplx z);
// Zero count of the product in |z| < radius via the argument principle factor by factor.
long horseshoe_zero_count(const HorseshoeModel& model, double radius);

struct Zero {
  cplx z;
  long multiplicity = 1;
};

struct ResonanceSet {
  std::vector<Zero> zeros;
  double reliability_radius = 0.0;

  long total_multiplicity() const;
  // Resonances λ = 1/z.
  std::vector<cplx> resonances() const;
};

struct ResonanceOptions {
  double cluster_eps = 1e-6;
  AberthOptions aberth{};
  // Treat the coefficients as an exact polynomial (no truncation tail).
  bool exact_polynomial = false;
};

// Largest radius on which the omitted tail stays below tol relative to the series size.
double reliability_radius(const PowerSeries& series, double tol);

ResonanceSet find_resonances(const PowerSeries& series, double radius, double tol,
                             ResonanceOptions options = {});

// Zeros w_j/c_k (multiplicity m_k·mult_j) of the product built from the zeros of ζ⁻¹.
ResonanceSet horseshoe_zeros_from_factor(const std::vector<Zero>& factor_zeros, double radius);

void sort_zeros(std::vector<Zero>& zeros);

}  // namespace reslab
