#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cfield/common.hpp"

namespace cfield {

// Marker displacement history depth (frames). Each marker carries the last
// kHistorySteps displacement vectors flattened to 15 scalars, oldest first.
inline constexpr int kHistorySteps = 5;
inline constexpr int kHistoryScalars = kHistorySteps * 3;

// Per-point feature width of the composite network input:
// 1 type channel + 15 tactile history channels.
inline constexpr int kFeatureWidth = 1 + kHistoryScalars;

// Type-channel codes for composite input rows.
inline constexpr double kTypeObject = 0.0;
inline constexpr double kTypeEnv = 1.0;
inline constexpr double kTypeTactile = 2.0;

struct Pose {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Quaterniond orientation = Eigen::Quaterniond::Identity();  // w,x,y,z

  Eigen::Vector3d to_local(const Eigen::Vector3d& world) const {
    return orientation.conjugate() * (world - position);
  }
  Eigen::Vector3d to_world(const Eigen::Vector3d& local) const {
    return orientation * local + position;
  }
};

struct TactileState {
  int sensor_count = 2;
  int grid_rows = 7;
  int grid_cols = 9;
  // All marker arrays have length sensor_count * grid_rows * grid_cols.
  std::vector<Eigen::Vector3d> marker_positions;      // world frame, m
  std::vector<Eigen::Vector3d> marker_displacements;  // sensor frame, m
  std::vector<std::array<double, kHistoryScalars>> displacement_history;
  std::vector<double> depth;  // m, negative = indentation

  int markers_per_sensor() const { return grid_rows * grid_cols; }
  int marker_count() const { return sensor_count * markers_per_sensor(); }
  void validate() const;
};

// Dense per-tool-point contact labels: probability in [0,1] and force in N.
struct ContactField {
  std::vector<double> prob;
  std::vector<Eigen::Vector3d> force;

  std::size_t size() const { return prob.size(); }
  void validate() const;
};

// One timestep of a recorded tool-interaction episode.
struct Frame {
  double time = 0.0;  // s
  std::vector<Eigen::Vector3d> tool_points;  // world frame, m
  std::optional<std::vector<Eigen::Vector3d>> tool_normals;  // unit, inward
  std::vector<Eigen::Vector3d> env_points;
  TactileState tactile;
  Pose gripper_pose;
  std::optional<double> table_z;
  std::optional<ContactField> labels;

  void validate() const;
};

struct Wrench {
  Eigen::Vector3d force = Eigen::Vector3d::Zero();   // N
  Eigen::Vector3d torque = Eigen::Vector3d::Zero();  // N*m
  std::string frame_id = "gripper";

  // Dimensionless 6-vector norm with torque mixed in via L_c.
  double mixed_norm(double characteristic_length = kCharacteristicLength) const {
    Eigen::Matrix<double, 6, 1> v;
    v << force, torque / characteristic_length;
    return v.norm();
  }
};

// Composite network input: N x 3 positions plus N x 16 per-point features.
struct CompositeInput {
  Eigen::Matrix<double, Eigen::Dynamic, 3> points;
  Eigen::MatrixXd features;  // N x kFeatureWidth
  int n_obj = 0;
  int n_env = 0;
  int n_tac = 0;
  // Set when an input cloud was smaller than the requested sample count and
  // points had to be repeated.
  bool repeated_points = false;

  int size() const { return n_obj + n_env + n_tac; }
  void validate() const;
};

struct AugmentConfig {
  double max_translation = 0.0;   // m, per axis
  double max_rotation_z = 0.0;    // rad
  double jitter_sigma = 0.0;      // m
  double tactile_noise_sigma = 0.0;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

}  // namespace cfield
