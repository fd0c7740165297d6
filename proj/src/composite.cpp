#include "cfield/composite.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <random>

namespace cfield {

std::vector<int> farthest_point_sample(const std::vector<Eigen::Vector3d>& points,
                                       int count, std::uint64_t seed) {
  if (count < 1) throw ValidationError("farthest_point_sample: count must be >= 1");
  if (points.empty()) throw ValidationError("farthest_point_sample: empty cloud");
  const int n = static_cast<int>(points.size());

  std::vector<int> picked;
  picked.reserve(count);
  std::mt19937_64 rng(seed);
  picked.push_back(static_cast<int>(rng() % n));

  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  const int unique = std::min(count, n);
  while (static_cast<int>(picked.size()) < unique) {
    const auto& last = points[picked.back()];
    int best = 0;
    double best_d = -1.0;
    for (int i = 0; i < n; ++i) {
      dist[i] = std::min(dist[i], (points[i] - last).squaredNorm());
      if (dist[i] > best_d) {
        best_d = dist[i];
        best = i;
      }
    }
    picked.push_back(best);
  }
  // Cloud smaller than requested count: repeat cyclically.
  for (int i = 0; static_cast<int>(picked.size()) < count; ++i)
    picked.push_back(picked[i % unique]);
  return picked;
}

CompositeInput assemble_composite(const Frame& frame, int sample_obj, int sample_env) {
  frame.validate();
  if (sample_obj < 1 || sample_env < 1)
    throw ValidationError("assemble_composite: sample counts must be >= 1");

  const std::uint64_t seed = std::bit_cast<std::uint64_t>(frame.time);
  const auto obj_idx = farthest_point_sample(frame.tool_points, sample_obj, seed);
  const auto env_idx = farthest_point_sample(frame.env_points, sample_env, seed ^ 0x9e3779b97f4a7c15ull);

  CompositeInput out;
  out.n_obj = sample_obj;
  out.n_env = sample_env;
  out.n_tac = frame.tactile.marker_count();
  out.repeated_points =
      sample_obj > static_cast<int>(frame.tool_points.size()) ||
      sample_env > static_cast<int>(frame.env_points.size());

  const int n = out.size();
  out.points.resize(n, 3);
  out.features = Eigen::MatrixXd::Zero(n, kFeatureWidth);

  int row = 0;
  for (int i : obj_idx) {
    out.points.row(row) = frame.tool_points[i].transpose();
    out.features(row, 0) = kTypeObject;
    ++row;
  }
  for (int i : env_idx) {
    out.points.row(row) = frame.env_points[i].transpose();
    out.features(row, 0) = kTypeEnv;
    ++row;
  }
  const bool has_hist = !frame.tactile.displacement_history.empty();
  for (int m = 0; m < out.n_tac; ++m) {
    out.points.row(row) = frame.tactile.marker_positions[m].transpose();
    out.features(row, 0) = kTypeTactile;
    if (has_hist)
      for (int h = 0; h < kHistoryScalars; ++h)
        out.features(row, 1 + h) = frame.tactile.displacement_history[m][h];
    ++row;
  }
  return out;
}

CompositeInput apply_rigid_transform(const CompositeInput& input,
                                     const Eigen::Vector3d& translation,
                                     double angle_z) {
  CompositeInput out = input;
  Eigen::Matrix3d rot =
      Eigen::AngleAxisd(angle_z, Eigen::Vector3d::UnitZ()).toRotationMatrix();
  for (Eigen::Index i = 0; i < out.points.rows(); ++i)
    out.points.row(i) =
        (rot * input.points.row(i).transpose() + translation).transpose();
  return out;
}

CompositeInput augment(const CompositeInput& input, const AugmentConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.rng_seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double angle = cfg.max_rotation_z > 0 ? u(rng) * cfg.max_rotation_z : 0.0;
  Eigen::Vector3d t = Eigen::Vector3d::Zero();
  if (cfg.max_translation > 0)
    t = Eigen::Vector3d(u(rng), u(rng), u(rng)) * cfg.max_translation;

  CompositeInput out = apply_rigid_transform(input, t, angle);

  if (cfg.jitter_sigma > 0) {
    std::normal_distribution<double> jitter(0.0, cfg.jitter_sigma);
    for (Eigen::Index i = 0; i < out.points.rows(); ++i)
      for (int c = 0; c < 3; ++c) out.points(i, c) += jitter(rng);
  }
  if (cfg.tactile_noise_sigma > 0) {
    std::normal_distribution<double> noise(0.0, cfg.tactile_noise_sigma);
    for (Eigen::Index i = 0; i < out.features.rows(); ++i) {
      if (out.features(i, 0) != kTypeTactile) continue;
      for (int c = 1; c < kFeatureWidth; ++c) out.features(i, c) += noise(rng);
    }
  }
  return out;
}

}  // namespace cfield
