#include "cfield/types.hpp"

#include <cmath>

namespace cfield {

namespace {
constexpr double kUnitTol = 1e-6;
}

void TactileState::validate() const {
  const std::size_t n = static_cast<std::size_t>(marker_count());
  if (marker_positions.size() != n)
    throw ValidationError("tactile: marker count " +
                          std::to_string(marker_positions.size()) +
                          " != sensor_count * grid (" + std::to_string(n) + ")");
  if (marker_displacements.size() != n)
    throw ValidationError("tactile: displacement count mismatch");
  if (depth.size() != n)
    throw ValidationError("tactile: depth count mismatch");
  if (!displacement_history.empty() && displacement_history.size() != n)
    throw ValidationError("tactile: history count mismatch");
}

void ContactField::validate() const {
  if (prob.size() != force.size())
    throw ValidationError("contact field: prob/force length mismatch");
  for (double c : prob)
    if (!(c >= 0.0 && c <= 1.0))
      throw ValidationError("contact field: probability outside [0,1]");
  for (const auto& f : force)
    if (!f.allFinite())
      throw ValidationError("contact field: non-finite force");
}

void Frame::validate() const {
  if (tool_normals) {
    if (tool_normals->size() != tool_points.size())
      throw ValidationError("frame: tool_normals length != tool_points");
    for (const auto& n : *tool_normals)
      if (std::abs(n.norm() - 1.0) > kUnitTol)
        throw ValidationError("frame: tool normal not unit length");
  }
  if (std::abs(gripper_pose.orientation.norm() - 1.0) > kUnitTol)
    throw ValidationError("frame: gripper quaternion not unit norm");
  tactile.validate();
  if (labels) {
    labels->validate();
    if (labels->size() != tool_points.size())
      throw ValidationError("frame: labels length != tool_points");
  }
}

void CompositeInput::validate() const {
  const int n = size();
  if (points.rows() != n || features.rows() != n)
    throw ValidationError("composite: row counts inconsistent with section counts");
  if (features.cols() != kFeatureWidth)
    throw ValidationError("composite: feature width != 16");
  for (int i = 0; i < n; ++i) {
    const double t = features(i, 0);
    if (t != kTypeObject && t != kTypeEnv && t != kTypeTactile)
      throw ValidationError("composite: unknown type code");
    if (t != kTypeTactile && features.row(i).tail(kHistoryScalars).cwiseAbs().maxCoeff() != 0.0)
      throw ValidationError("composite: non-tactile row has nonzero history channels");
  }
}

void AugmentConfig::validate() const {
  if (max_translation < 0 || max_rotation_z < 0 || jitter_sigma < 0 ||
      tactile_noise_sigma < 0)
    throw ConfigError("augment: ranges and sigmas must be non-negative");
}

}  // namespace cfield
