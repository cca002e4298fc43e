#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "reslab/power_series.hpp"

namespace reslab {

// Singular values λ_1..λ_M, either C θ^{m^{1/β}} or an explicit list.
struct SingularValueModel {
  enum class Mode { ClosedForm, Explicit };
  Mode mode = Mode::ClosedForm;
  double C = 1.0;
  double theta = 0.5;
  double beta = 1.0;
  std::vector<cplx> explicit_values;
  std::size_t count = 0;

  static SingularValueModel closed_form(double C, double theta, double beta, std::size_t count);
  static SingularValueModel from_list(std::vector<cplx> values);

  // λ_m for 1 ≤ m ≤ count.
  cplx value(std::size_t m) const;
  std::vector<cplx> values() const;
  void validate() const;
};

// Σ_{m>M} θ^{m^{1/β}}, bounded by the integral of the decreasing summand.
double ruse_tail_bound(double theta, double beta, std::size_t M);
// Smallest M with ruse_tail_bound below tol.
std::size_t ruse_terms_needed(double theta, double beta, double tol = 1e-15);

// Coefficients a_0..a_N of Π_{m=1..M}(1 + θ^{m^{1/β}} z); M = 0 picks the smallest admissible M.
std::vector<double> ruse_coefficients(double theta, double beta, std::size_t M, std::size_t N);

enum class FitVerdict { Pass, Fail, Undetermined };
std::string to_string(FitVerdict v);

struct StretchedBoundFit {
  double D_fit = 0.0;         // -slope of log a_n against n^q at the hypothesised q
  double intercept = 0.0;
  double r_squared = 0.0;
  double exponent_fit = 0.0;  // free fit of log a_n ≈ A - D n^q
  double free_r_squared = 0.0;
  FitVerdict verdict = FitVerdict::Undetermined;
  std::string reason;
};
// values[i] = |a_{first_index + i}|; zeros are skipped.
StretchedBoundFit fit_stretched_bound(const std::vector<double>& values, double exponent_hypothesis,
                                      std::size_t first_index = 1);

// Coefficients of Π_m (1 - λ_m z) truncated at N.
PowerSeries diagonal_det_coefficients(const SingularValueModel& model, std::size_t N);
// e_n(|λ|) · (n^{n/2} when hadamard is set) bounds |a_n| for unit-norm factors.
std::vector<double> nuclear_coefficient_bound(const SingularValueModel& model, std::size_t N,
                                              bool hadamard = false);

struct PrecedRow {
  double r = 0.0;
  double integral = 0.0;     // r ∫_{log r}^∞ e^{-u} u^β du
  double error = 0.0;        // quadrature error estimate
  double closed_form = 0.0;  // r Γ(β+1, log r)
  double ratio = 0.0;        // integral / (log r)^β
};
struct PrecedReport {
  double beta = 0.0;
  std::vector<PrecedRow> rows;  // sorted by r
  double max_ratio = 0.0;
  bool bounded = false;         // ratios finite and non-increasing in r
};
PrecedReport preced_check(double beta, std::vector<double> r_list);

struct DecayCertificate {
  bool ok = false;
  double C = 0.0;
  double theta = 0.0;
  double M = 0.0;               // sup of #{a ≥ ε} / ln(1/ε)^β over the sampled ε
  double count_exponent = 0.0;  // slope of log count against log ln(1/ε)
  std::size_t prefix = 0;       // leading terms with a_m ≥ 1/2
  double witness_epsilon = 0.0;  // where the counting hypothesis fails
  std::string reason;
};
// a_seq indexed from m = 0 and non-increasing; the sampled ε are the values a_m themselves.
DecayCertificate counting_to_decay(const std::vector<double>& a_seq, double beta);

struct GrowthCountingReport {
  double beta = 0.0;
  std::vector<double> radii;
  std::vector<double> log_max;        // sup log_+|f| on |z| = R
  std::vector<double> growth_ratio;   // log_max / (log R)^{1+β}
  double growth_exponent = 0.0;       // free fit of log_max ≈ A + K (log R)^d
  bool growth_bounded = false;
  std::vector<double> count_r;
  std::vector<long> counts;           // Jensen bounds on N(r)
  std::vector<double> count_ratio;    // counts / |log r|^{1+β}
  double count_exponent = 0.0;
  bool counts_bounded = false;
  bool truncated = false;             // sampling stopped at the reliability radius
  double max_radius = 0.0;
  std::optional<StretchedBoundFit> coefficient_fit;
};
// Samples |z| = R for R log-spaced over [r_min, r_min·10^decades].
GrowthCountingReport growth_and_counting_check(const PowerSeries& series, double beta, double r_min = 10.0,
                                               double decades = 4.0, std::size_t samples = 17);
// Same from a log-modulus and a counting bound; count(r) bounds #{zeros of modulus < 1/r}.
GrowthCountingReport growth_and_counting_check(const std::function<double(cplx)>& log_abs,
                                               const std::function<long(double)>& count, double beta,
                                               double r_min = 10.0, double decades = 4.0,
                                               std::size_t samples = 17);

}  // namespace reslab
