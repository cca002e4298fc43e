#pragma once

#include <cstddef>
#include <vector>

#include "reslab/power_series.hpp"

namespace reslab {

// Unnormalised forward DFT: X_k = Σ_j x_j e^{-2πijk/n}.
std::vector<cplx> fft_forward(const std::vector<cplx>& x);
// Unnormalised inverse DFT: x_j = Σ_k X_k e^{+2πijk/n}.
std::vector<cplx> fft_inverse(const std::vector<cplx>& x);
// Row-major two-dimensional forward DFT of an rows×cols array.
std::vector<cplx> fft_forward_2d(const std::vector<cplx>& x, std::size_t rows, std::size_t cols);

// Taylor coefficients c_0..c_{count-1} of f from samples f(ρ e^{2πij/M}), j < M.
std::vector<cplx> cauchy_coefficients(const std::vector<cplx>& samples, double radius, std::size_t count);

}  // namespace reslab
