#include "cfield/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace cfield {

namespace {
constexpr double kProbClamp = 1e-7;

void check_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw ValidationError(std::string(what) + ": length mismatch");
}
}  // namespace

double focal_loss(const std::vector<double>& pred_prob,
                  const std::vector<int>& target, const LossConfig& cfg) {
  cfg.validate();
  check_same_size(pred_prob.size(), target.size(), "focal_loss");
  if (pred_prob.empty()) return 0.0;

  double acc = 0;
  for (std::size_t i = 0; i < pred_prob.size(); ++i) {
    const double p = std::clamp(pred_prob[i], kProbClamp, 1.0 - kProbClamp);
    const double pt = target[i] ? p : 1.0 - p;
    const double alpha = target[i] ? cfg.alpha_pos : 1.0 - cfg.alpha_pos;
    acc += -alpha * std::pow(1.0 - pt, cfg.gamma) * std::log(pt);
  }
  return acc / pred_prob.size();
}

double magnitude_loss(const std::vector<Eigen::Vector3d>& pred,
                      const std::vector<Eigen::Vector3d>& gt,
                      const LossConfig& cfg) {
  cfg.validate();
  check_same_size(pred.size(), gt.size(), "magnitude_loss");
  if (pred.empty()) return 0.0;

  double acc = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double mg = gt[i].norm();
    const double w = std::clamp(cfg.w_scale * std::log1p(mg), cfg.w_clip_lo, cfg.w_clip_hi);
    const double e = pred[i].norm() - mg;
    acc += w * e * e;
  }
  return acc / pred.size();
}

double direction_loss(const std::vector<Eigen::Vector3d>& pred,
                      const std::vector<Eigen::Vector3d>& gt,
                      const LossConfig& cfg) {
  cfg.validate();
  check_same_size(pred.size(), gt.size(), "direction_loss");

  double acc = 0;
  int count = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (gt[i].norm() <= cfg.tau_dir) continue;
    const double denom = std::max(pred[i].norm() * gt[i].norm(), 1e-8);
    acc += 1.0 - pred[i].dot(gt[i]) / denom;
    ++count;
  }
  return count > 0 ? acc / count : 0.0;
}

CompositeLoss composite_loss(const std::vector<double>& pred_prob,
                             const std::vector<Eigen::Vector3d>& pred_force,
                             const std::vector<int>& gt_binary,
                             const std::vector<Eigen::Vector3d>& gt_force,
                             const LossConfig& cfg) {
  CompositeLoss loss;
  loss.prob = focal_loss(pred_prob, gt_binary, cfg);
  loss.mag = magnitude_loss(pred_force, gt_force, cfg);
  loss.dir = direction_loss(pred_force, gt_force, cfg);
  loss.total = cfg.lambda_prob * loss.prob +
               cfg.lambda_force * (cfg.lambda_mag * loss.mag + cfg.lambda_dir * loss.dir);
  return loss;
}

double f1_score(const std::vector<double>& pred_prob,
                const std::vector<int>& gt_binary, double threshold) {
  check_same_size(pred_prob.size(), gt_binary.size(), "f1_score");
  long tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < pred_prob.size(); ++i) {
    const bool p = pred_prob[i] >= threshold;
    const bool g = gt_binary[i] != 0;
    tp += p && g;
    fp += p && !g;
    fn += !p && g;
  }
  if (tp + fp == 0 && tp + fn == 0) return 1.0;  // perfect empty prediction
  if (tp == 0) return 0.0;
  const double precision = static_cast<double>(tp) / (tp + fp);
  const double recall = static_cast<double>(tp) / (tp + fn);
  return 2.0 * precision * recall / (precision + recall);
}

double force_mse(const std::vector<Eigen::Vector3d>& pred,
                 const std::vector<Eigen::Vector3d>& gt) {
  check_same_size(pred.size(), gt.size(), "force_mse");
  if (pred.empty()) return 0.0;
  double acc = 0;
  for (std::size_t i = 0; i < pred.size(); ++i)
    acc += (pred[i] - gt[i]).squaredNorm();
  return acc / (3.0 * pred.size());
}

double eff_norm(double eff, double blade_len, double max_blade_len) {
  if (blade_len <= 0 || max_blade_len <= 0 || blade_len > max_blade_len)
    throw ValidationError("eff_norm: need 0 < blade_len <= max_blade_len");
  const double l_ref = blade_len / max_blade_len;
  return std::min(1.0, eff / l_ref);
}

}  // namespace cfield
