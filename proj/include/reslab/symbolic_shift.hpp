#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "reslab/power_series.hpp"

namespace reslab {

using GeneratorParams = std::map<std::string, double>;

// Coefficients α_k of h(z) = Σ α_k z^k, either listed (zero beyond the list)
// or produced by a named closed-form generator.
class WeightSpec {
 public:
  WeightSpec() = default;

  static WeightSpec from_alpha(std::vector<cplx> alpha, bool positive = false);
  // Known generators: "rien", "log" (params a, rho).
  static WeightSpec from_generator(const std::string& name, GeneratorParams params = {},
                                   bool positive = false);

  cplx alpha(std::size_t k) const;
  std::vector<cplx> alphas(std::size_t count) const;

  // Highest listed index for explicit specs, a nominal cap for generators.
  std::size_t max_degree() const;
  bool is_generator() const { return !generator_.empty(); }
  const std::string& generator() const { return generator_; }
  const GeneratorParams& params() const { return params_; }
  const std::vector<cplx>& listed_alpha() const { return alpha_; }
  bool positive() const { return positive_; }
  // True when h is a polynomial, so that ζ⁻¹ is an exact polynomial.
  bool is_polynomial() const { return !is_generator(); }

  // Closed-form 1 - 2z - z(1-z)h(z), if the generator provides one.
  std::optional<cplx> closed_form_zeta_inverse(cplx z) const;
  // Evaluates ζ⁻¹ exactly: polynomial for listed specs, closed form for generators.
  cplx zeta_inverse(cplx z) const;

  static const std::vector<std::string>& generator_names();
  static constexpr std::size_t kGeneratorDegree = 160;

 private:
  void validate(std::size_t count) const;

  std::vector<cplx> alpha_;
  std::string generator_;
  GeneratorParams params_;
  bool positive_ = false;
};

std::vector<cplx> beta_from_alpha(const WeightSpec& spec, std::size_t count);
std::vector<cplx> beta_from_alpha(const WeightSpec& spec);

struct BoundedValue {
  cplx value;
  double error_bound;
};

struct EnumerationOptions {
  unsigned cap = 24;
  // 0 selects the RESLAB_THREADS environment value or the hardware count.
  unsigned threads = 0;
};

cplx flat_trace_shift(const WeightSpec& spec, unsigned n, EnumerationOptions options = {});
BoundedValue flat_trace_shift_bounded(const WeightSpec& spec, unsigned n,
                                      EnumerationOptions options = {});
TraceSequence shift_traces(const WeightSpec& spec, unsigned n_max, EnumerationOptions options = {});

using TransitionMatrix = Eigen::MatrixXcd;

TransitionMatrix transition_matrix(const WeightSpec& spec, std::size_t N);
cplx matrix_trace_oracle(const WeightSpec& spec, std::size_t N, unsigned k);

PowerSeries zeta_inverse_series(const WeightSpec& spec, std::size_t N);

unsigned configured_threads();

}  // namespace reslab
