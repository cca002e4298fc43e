#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "reslab/cones.hpp"

namespace reslab {

// χ = 1 on (-∞, 1/2], 0 on [1, ∞), quintic smoothstep in between.
double band_cutoff(double x);

// Radial bands ψ_n = χ_{n+1} - χ_n with χ_n(ξ) = χ(|ξ| - n^α), n = 0..n_bands.
struct BandPartition {
  double alpha = 3.5;
  std::size_t n_bands = 12;
  std::vector<double> radii;
  std::vector<std::vector<double>> psi;  // psi[n][k] = ψ_n(radii[k])
  double partition_error = 0.0;          // max |Σ ψ_n - 1| over covered radii
  bool supports_ok = false;
  std::size_t max_overlap = 0;           // most bands nonzero at one radius

  double chi(long n, double rho) const;
  double psi_value(std::size_t n, double rho) const;
  // ψ̃_n = χ_{n+2} - χ_{n-1}
  double psi_tilde_value(std::size_t n, double rho) const;
  // Radii where every ψ_n with n > n_bands vanishes: |ξ| ≤ (n_bands+1)^α + 1/2.
  double covered_radius() const;
  // [n^α, (n+1)^α + 1] for n ≥ 1, [0, 2] for n = 0.
  std::pair<double, double> support_bound(std::size_t n) const;
};

// Fine sampling across every cutoff transition plus a log-spaced background up to `extent`.
std::vector<double> default_radial_grid(double alpha, std::size_t n_bands, double extent = 0.0);
BandPartition build_band_partition(double alpha, std::size_t n_bands, std::vector<double> radii = {});

// |f̂| as a function of ξ, supported (up to negligible mass) in rho_min ≤ |ξ| ≤ rho_max.
struct FourierTestFunction {
  std::string name;
  std::function<double(const Vec2&)> fhat_abs;
  double rho_min = 0.0;
  double rho_max = 1.0;
};
// exp(-|ξ - center|²/width²)
FourierTestFunction gaussian_packet(const std::string& name, const Vec2& center, double width);

double anisotropic_weight(const ConeFamily& cones, const BandPartition& bands, const Vec2& xi);
// Σ_{n,i} e^{2 t_i n} ψ_{n,i}(ξ)² with ψ_{n,i} = ψ_n φ_i
double band_weight_sum(const ConeFamily& cones, const BandPartition& bands, const Vec2& xi);

struct EquivalenceReport {
  std::vector<double> fine_constants;   // per band n ≥ 1: max_i sup |t_i (|ξ|^{1/α} - n)| exponentiated
  double fine_constant = 0.0;
  std::vector<double> band_sandwich;    // per band n ≥ 1: sup over its annulus of max(S/w², w²/S)
  double sandwich_constant = 0.0;       // over every evaluated point
  double sandwich_spread = 0.0;         // max/min of band_sandwich
  std::size_t max_simultaneous = 0;     // most nonzero ψ_{n,i} at one point
  double partition_error = 0.0;         // max |Σ_{n,i} ψ_{n,i} - 1|
  std::vector<std::string> names;
  std::vector<double> ratios;           // Σ e^{2t_i n}‖ψ_{n,i}(D)f‖² / ∫|f̂|² w²
  bool ratios_within = false;
};
EquivalenceReport weight_and_equivalence(const ConeFamily& cones, const BandPartition& bands,
                                         const std::vector<FourierTestFunction>& tests, std::size_t angles = 720);

}  // namespace reslab
