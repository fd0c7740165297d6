#pragma once

#include <Eigen/Dense>
#include <string>
#include <variant>
#include <vector>

#include "cfield/common.hpp"

namespace cfield {

struct HalfSpace {
  Eigen::Vector3d point = Eigen::Vector3d::Zero();
  Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();  // outward, unit
};

struct Sphere {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  double radius = 1.0;
};

struct Box {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  Eigen::Vector3d half_extents = Eigen::Vector3d::Ones();
  Eigen::Quaterniond rotation = Eigen::Quaterniond::Identity();
};

struct Capsule {
  Eigen::Vector3d a = Eigen::Vector3d::Zero();
  Eigen::Vector3d b = Eigen::Vector3d::UnitZ();
  double radius = 1.0;
};

using SdfPrimitive = std::variant<HalfSpace, Sphere, Box, Capsule>;

// Union of analytic primitives: signed distance is the pointwise minimum.
struct SdfScene {
  std::vector<SdfPrimitive> primitives;
  void validate() const;
};

double signed_distance(const SdfPrimitive& prim, const Eigen::Vector3d& p);
double signed_distance(const SdfScene& scene, const Eigen::Vector3d& p);
std::vector<double> batch_distance(const SdfScene& scene,
                                   const std::vector<Eigen::Vector3d>& points);

/// Scene description file: JSON array of primitives keyed by "kind".
SdfScene read_scene(const std::string& path);

struct NormalEstimate {
  std::vector<Eigen::Vector3d> normals;  // unit, inward (toward centroid)
  std::vector<bool> valid;               // false for degenerate neighborhoods
};

/// Per-point inward normals from a k-NN local plane fit (smallest-eigenvalue
/// direction of the neighborhood covariance), oriented toward the cloud
/// centroid.
NormalEstimate estimate_normals(const std::vector<Eigen::Vector3d>& points, int k = 12);

}  // namespace cfield
