#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace reslab {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

// Closed sector of half-width `half_width` around direction `center`; double-sided sectors
// also contain the opposite direction.
struct Sector {
  double center = 0.0;
  double half_width = 0.0;
  bool double_sided = false;

  bool contains(const Vec2& v) const;
  // Euclidean distance from v to the sector.
  double distance(const Vec2& v) const;
};

// Nested double sectors C_0 = R² ⊃ C_1 ⋑ ... ⋑ C_r around an axis line, with smooth angular
// cutoffs φ_0..φ_r summing to one and exponents t_0..t_r.
struct ConeFamily {
  unsigned r = 4;
  double axis = 0.0;                 // angle of the axis line
  std::vector<double> half_angles;   // γ_0 = π/2, γ_1 > ... > γ_r > 0
  std::vector<double> t_bar;         // t_0 > 0 > t_1 > ... > t_r
  std::vector<double> ramp_start;    // b_i: h_i = 1 for δ ≤ b_i (index 1..r)
  std::vector<double> ramp_end;      // e_i: h_i = 0 for δ ≥ e_i

  // tan γ_i = tan_first · ratio^{i-1}.
  static ConeFamily nested(unsigned r, std::vector<double> t_bar, double axis = 0.0, double tan_first = 3.0,
                           double ratio = 1.0 / 3.0);
  static ConeFamily from_half_angles(std::vector<double> gammas, std::vector<double> t_bar, double axis = 0.0);

  // Angle between v and the axis line, in [0, π/2].
  double axis_angle(const Vec2& v) const;
  bool in_cone(unsigned i, const Vec2& v) const;
  Sector sector(unsigned i) const;
  double phi(unsigned i, const Vec2& v) const;
  double phi_of_angle(unsigned i, double delta) const;
  // Angular supports [lo, hi] of φ_i and of the enlarged cutoff φ̃_i, as ranges of axis_angle.
  std::pair<double, double> phi_support(unsigned i) const;
  std::pair<double, double> phi_tilde_support(unsigned i) const;
  void validate() const;
};

// t_0 > 0 > t_1 > ... > t_r, t_r > ν t_{r-1}, t_{i+1} < (2/a) t_i for i ≤ r-2.
void check_sueur(const std::vector<double>& t_bar, double nu, double a);
// (s, -s, -κs, -κ²s, ...) with κ = 1.1·max(1, 2/a) and t_r = t_{r-1}(1+ν)/2.
std::vector<double> default_t_bar(unsigned r, double nu, double a, double scale = 0.15);

struct ConeDistanceReport {
  double mu = 0.0;
  double min_ratio = 0.0;  // min d(ξ,η)/max(|ξ|,|η|) over the samples
  std::size_t samples = 0;
  std::size_t violations = 0;
};
// Throws DegenerateInputError when the sectors are not transverse (μ = 0).
ConeDistanceReport cone_distance_check(const Sector& c_plus, const Sector& c_minus, std::size_t sample_count,
                                       std::uint64_t seed);

struct ConeHyperbolicityReport {
  bool cond_i = false;
  bool cond_ii = false;
  bool cond_iii = false;
  double lambda_ii = 0.0;   // min |ᵀAξ|/|ξ| on C_{r-1}
  double lambda_iii = 0.0;  // min |ξ|/|ᵀAξ| where ᵀAξ ∉ C'_2
  double lambda = 0.0;
  double worst_direction_i = 0.0;  // angle of a direction breaking (i), if any
  std::size_t samples = 0;
};
ConeHyperbolicityReport cone_hyperbolicity_check(const Eigen::MatrixXd& A, const ConeFamily& theta,
                                                 const ConeFamily& theta_prime, std::size_t samples = 20000);

struct HyperbolicParameters {
  double Lambda = 0.0;
  double nu = 0.0;  // midpoint of (1, Λ^{1/α})
  double a = 0.0;   // 0.9 ‖ᵀA^{-1}‖^{-1/α}
};
HyperbolicParameters hyperbolic_parameters(const Eigen::MatrixXd& A, double Lambda, double alpha);

// (l, j) ↪ (n, i)
bool leak_relation(std::size_t n, std::size_t l, unsigned i, unsigned j, unsigned r, double nu, double a);

struct BandLeakReport {
  bool applicable = false;
  std::string status;       // "measured", "related" or "below threshold"
  double distance = 0.0;
  double scale = 0.0;       // max(n, l)^α
  double c = 0.0;           // distance / scale
};
// d(supp ψ_{Θ',n,i}, ᵀA supp ψ̃_{Θ,l,j}) from dense boundary sampling.
BandLeakReport band_leak_distance_check(const Eigen::MatrixXd& A, const ConeFamily& theta,
                                        const ConeFamily& theta_prime, std::size_t n, std::size_t l, unsigned i,
                                        unsigned j, double alpha, double nu, double a, std::size_t n_config = 2,
                                        std::size_t samples = 2048);

}  // namespace reslab
