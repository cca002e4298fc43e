#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace reslab {

enum class GevreyFamily { Gaussian, Bump, Indicator, Sampled };

// One-dimensional test profile sampled on 2^log2_size points of [-extent, extent).
struct GevreyProfile {
  GevreyFamily family = GevreyFamily::Gaussian;
  double a = 1.0;        // bump exponent: exp(-(1+x)^{-a} - (1-x)^{-a}) on (-1, 1)
  double sigma = 2.0;
  unsigned log2_size = 16;
  double extent = 16.0;
  std::function<double(double)> sampled;  // Sampled family only

  static GevreyProfile gaussian(double sigma = 2.0, unsigned log2_size = 16, double extent = 16.0);
  // σ = 1 + 1/a.
  static GevreyProfile bump(double a = 1.0, unsigned log2_size = 16, double extent = 16.0);
  static GevreyProfile indicator(double sigma = 2.0, unsigned log2_size = 16, double extent = 16.0);
  static GevreyProfile from_function(std::function<double(double)> f, double sigma, unsigned log2_size = 16,
                                     double extent = 16.0);

  static GevreyFamily parse_family(const std::string& name);
  std::string family_name() const;

  double value(double x) const;
  // f(x), f'(x), ..., f^{(order)}(x); throws UnsupportedError without an exact recursion.
  std::vector<double> derivatives(double x, unsigned order) const;
  std::vector<double> grid() const;
  double spacing() const;
  void validate() const;
};

struct GevreyConditionReport {
  bool ok = false;
  double C = 0.0;
  double R = 0.0;                   // smallest R making sup|f^{(k)}| ≤ C R^k k^{σk} for k ≤ alpha_max
  std::vector<double> sup_norms;    // sup|f^{(k)}| over the grid
  std::vector<double> local_rates;  // (sup|f^{(k)}| / (C k^{σk}))^{1/k}
  unsigned failure_order = 0;
  std::string reason;
};
// R is accepted when it is at most r_max and the local rates show no upward trend.
GevreyConditionReport gevrey_condition_check(const GevreyProfile& profile, unsigned alpha_max,
                                             double r_max = 1e3);

enum class DecayVerdict { Pass, Fail, Undetermined };
std::string to_string(DecayVerdict v);

struct FourierDecayReport {
  double exponent = 0.0;   // q̂ in log|f̂| ≈ A - D |ξ|^q
  double rate = 0.0;       // D
  double r_squared = 0.0;
  double decades = 0.0;    // dynamic range of the fitted window
  double aliasing = 0.0;   // relative change of |f̂| when the grid is refined
  double threshold = 0.0;  // (1/σ)(1 - 0.15)
  bool non_gevrey = false;
  DecayVerdict verdict = DecayVerdict::Undetermined;
  std::vector<double> xi;        // fitted window
  std::vector<double> envelope;  // max_{η ≥ ξ} |f̂(η)| / |f̂(0)|
  std::string reason;
};
FourierDecayReport fourier_decay_check(const GevreyProfile& profile);

}  // namespace reslab
