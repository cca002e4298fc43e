#include "reslab/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <mutex>

#include "reslab/errors.hpp"

namespace reslab {

namespace {

// FFTW planning is not thread-safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::vector<cplx> run(const std::vector<cplx>& x, int rank, const int* dims, int sign) {
  std::vector<cplx> out(x.size());
  if (x.empty()) return out;
  static_assert(sizeof(fftw_complex) == sizeof(cplx));
  std::vector<cplx> in = x;
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_dft(rank, dims, reinterpret_cast<fftw_complex*>(in.data()),
                         reinterpret_cast<fftw_complex*>(out.data()), sign, FFTW_ESTIMATE);
  }
  if (plan == nullptr) throw ResourceError("FFTW could not create a plan");
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

}  // namespace

std::vector<cplx> fft_forward(const std::vector<cplx>& x) {
  const int n = static_cast<int>(x.size());
  return run(x, 1, &n, FFTW_FORWARD);
}

std::vector<cplx> fft_inverse(const std::vector<cplx>& x) {
  const int n = static_cast<int>(x.size());
  return run(x, 1, &n, FFTW_BACKWARD);
}

std::vector<cplx> fft_forward_2d(const std::vector<cplx>& x, std::size_t rows, std::size_t cols) {
  if (rows * cols != x.size()) throw DomainError("2-D transform size mismatch");
  const int dims[2] = {static_cast<int>(rows), static_cast<int>(cols)};
  return run(x, 2, dims, FFTW_FORWARD);
}

std::vector<cplx> cauchy_coefficients(const std::vector<cplx>& samples, double radius, std::size_t count) {
  const std::size_t M = samples.size();
  if (count > M) throw DomainError("more coefficients requested than circle samples");
  if (!(radius > 0.0)) throw DomainError("circle radius must be positive");
  const std::vector<cplx> F = fft_forward(samples);
  std::vector<cplx> c(count);
  double scale = 1.0 / static_cast<double>(M);
  for (std::size_t l = 0; l < count; ++l) {
    c[l] = F[l] * scale;
    scale /= radius;
  }
  return c;
}

}  // namespace reslab
