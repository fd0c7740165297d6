#pragma once

#include <Eigen/Dense>
#include <vector>

#include "cfield/common.hpp"

namespace cfield {

struct LossConfig {
  double gamma = 0.75;      // focal focusing
  double alpha_pos = 0.9;   // focal balance for the positive class
  double tau_dir = 0.005;   // N, direction-loss mask threshold
  double w_clip_lo = 1.0;   // adaptive magnitude weight clamp
  double w_clip_hi = 3.0;
  double lambda_prob = 1.0;
  double lambda_force = 2.0;
  double lambda_mag = 1.5;
  double lambda_dir = 1.0;
  double w_scale = 1.0;  // proportionality constant of the adaptive weight

  void validate() const {
    if (gamma < 0 || alpha_pos <= 0 || alpha_pos >= 1 || w_clip_lo > w_clip_hi ||
        lambda_prob < 0 || lambda_force < 0 || lambda_mag < 0 || lambda_dir < 0)
      throw ConfigError("loss config: invalid parameter");
  }
};

/// Focal loss, mean over points. Predictions are clamped to
/// [1e-7, 1 - 1e-7] before the log.
double focal_loss(const std::vector<double>& pred_prob,
                  const std::vector<int>& target, const LossConfig& cfg = {});

/// Adaptive-weighted squared error of force norms,
/// w = clamp(w_scale * log(1 + ||f_gt||), lo, hi).
double magnitude_loss(const std::vector<Eigen::Vector3d>& pred,
                      const std::vector<Eigen::Vector3d>& gt,
                      const LossConfig& cfg = {});

/// Cosine direction loss over points with ||f_gt|| > tau; zero if none
/// qualify. Range [0, 2].
double direction_loss(const std::vector<Eigen::Vector3d>& pred,
                      const std::vector<Eigen::Vector3d>& gt,
                      const LossConfig& cfg = {});

struct CompositeLoss {
  double total = 0.0;
  double prob = 0.0;
  double mag = 0.0;
  double dir = 0.0;
};

/// total = lambda_prob * L_prob + lambda_force * (lambda_mag * L_mag +
/// lambda_dir * L_dir).
CompositeLoss composite_loss(const std::vector<double>& pred_prob,
                             const std::vector<Eigen::Vector3d>& pred_force,
                             const std::vector<int>& gt_binary,
                             const std::vector<Eigen::Vector3d>& gt_force,
                             const LossConfig& cfg = {});

/// F1 over predictions binarized at threshold (>=). No positives anywhere is
/// a perfect empty prediction (1.0); positives on exactly one side is 0.0.
double f1_score(const std::vector<double>& pred_prob,
                const std::vector<int>& gt_binary, double threshold = 0.5);

/// Mean squared error over all 3N force components.
double force_mse(const std::vector<Eigen::Vector3d>& pred,
                 const std::vector<Eigen::Vector3d>& gt);

/// Normalized efficiency: min(1, eff / (blade_len / max_blade_len)).
double eff_norm(double eff, double blade_len, double max_blade_len);

}  // namespace cfield
