#pragma once

#include <cstddef>
#include <vector>

namespace reslab {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t count = 0;
};

// Ordinary least squares y ≈ intercept + slope·x.
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

// Least squares y ≈ A - D·x^q over a grid of q, refined by golden-section search.
struct StretchedFit {
  double amplitude = 0.0;  // A
  double rate = 0.0;       // D
  double exponent = 0.0;   // q
  double r_squared = 0.0;
};
StretchedFit stretched_fit(const std::vector<double>& x, const std::vector<double>& y, double q_min,
                           double q_max);

}  // namespace reslab
