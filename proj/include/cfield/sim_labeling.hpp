#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "cfield/common.hpp"

namespace cfield {

// Soft contact probability c(d) = exp(-(max(d,0)/lambda)^k): 1 at or below
// the surface, decaying with clearance, c = 0.5 at half_prob_depth.
struct SoftContactConfig {
  double k_sharpness = 1.7;
  double half_prob_depth = 0.005;  // m

  double length_scale() const {
    return half_prob_depth / std::pow(std::log(2.0), 1.0 / k_sharpness);
  }
  void validate() const {
    if (k_sharpness <= 0 || half_prob_depth <= 0)
      throw ConfigError("soft contact: k and half_prob_depth must be > 0");
  }
};

struct SparseContact {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();  // unit
  double magnitude = 0.0;                             // N, >= 0
};

struct ExtrapolationConfig {
  double lambda_dist = 50.0;     // 1/m
  double d_thresh = 0.005;       // m clearance at which forces taper to zero
  double clip_percentile = 98.0;  // 100 disables clipping

  void validate() const {
    if (lambda_dist <= 0 || d_thresh <= 0)
      throw ConfigError("extrapolation: lambda_dist and d_thresh must be > 0");
    if (clip_percentile <= 0 || clip_percentile > 100)
      throw ConfigError("extrapolation: clip_percentile must be in (0, 100]");
  }
};

double soft_contact_prob(double d, const SoftContactConfig& cfg);
std::vector<double> soft_contact_prob(const std::vector<double>& d,
                                      const SoftContactConfig& cfg);

/// Dense force field from sparse contacts: inverse-square distance-kernel
/// mean of F_j * n_j, scaled by the depth taper
/// S(d) = sqrt(max(0, 1 - max(d,0)/d_thresh)). Magnitudes above the
/// clip_percentile of nonzero magnitudes are rescaled to that value,
/// direction preserved.
std::vector<Eigen::Vector3d> extrapolate_forces(
    const std::vector<Eigen::Vector3d>& tool_points, const std::vector<double>& d,
    const std::vector<SparseContact>& contacts, const ExtrapolationConfig& cfg);

}  // namespace cfield
