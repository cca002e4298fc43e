#pragma once

#include <functional>
#include <vector>

#include "reslab/power_series.hpp"

namespace reslab {

struct AberthOptions {
  int max_iterations = 200;
  double residual_tol = 1e-12;
};

struct AberthResult {
  std::vector<cplx> roots;
  int iterations = 0;
  bool converged = false;
};

// All roots of the polynomial Σ b_n z^n (degree = effective degree).
AberthResult aberth_roots(const std::vector<cplx>& coeffs, AberthOptions options = {});

// Newton-polygon initial radii, one per root.
std::vector<cplx> aberth_initial_guess(const std::vector<cplx>& coeffs);

// Winding number of f around |z - center| = radius, with adaptive sampling.
// Throws BoundaryAmbiguityError when f is too close to zero on the contour.
int winding_number(const std::function<cplx(cplx)>& f, cplx center, double radius,
                   int initial_samples = 512);

}  // namespace reslab
