#include "cfield/sdf.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>

namespace cfield {

using nlohmann::json;

namespace {

double sdf_half_space(const HalfSpace& h, const Eigen::Vector3d& p) {
  return h.normal.dot(p - h.point);
}

double sdf_sphere(const Sphere& s, const Eigen::Vector3d& p) {
  return (p - s.center).norm() - s.radius;
}

double sdf_box(const Box& b, const Eigen::Vector3d& p) {
  const Eigen::Vector3d local = b.rotation.conjugate() * (p - b.center);
  const Eigen::Vector3d q = local.cwiseAbs() - b.half_extents;
  const double outside = q.cwiseMax(0.0).norm();
  const double inside = std::min(q.maxCoeff(), 0.0);
  return outside + inside;
}

double sdf_capsule(const Capsule& c, const Eigen::Vector3d& p) {
  const Eigen::Vector3d ab = c.b - c.a;
  const double denom = ab.squaredNorm();
  const double t = denom > 0 ? std::clamp((p - c.a).dot(ab) / denom, 0.0, 1.0) : 0.0;
  return (p - (c.a + t * ab)).norm() - c.radius;
}

}  // namespace

void SdfScene::validate() const {
  if (primitives.empty()) throw ValidationError("sdf scene: no primitives");
  for (const auto& prim : primitives) {
    std::visit(
        [](const auto& g) {
          using T = std::decay_t<decltype(g)>;
          if constexpr (std::is_same_v<T, HalfSpace>) {
            if (std::abs(g.normal.norm() - 1.0) > 1e-6)
              throw ValidationError("half_space: normal must be unit");
          } else if constexpr (std::is_same_v<T, Sphere>) {
            if (g.radius <= 0) throw ValidationError("sphere: radius must be > 0");
          } else if constexpr (std::is_same_v<T, Box>) {
            if ((g.half_extents.array() <= 0).any())
              throw ValidationError("box: half_extents must be > 0");
          } else if constexpr (std::is_same_v<T, Capsule>) {
            if (g.radius <= 0) throw ValidationError("capsule: radius must be > 0");
          }
        },
        prim);
  }
}

double signed_distance(const SdfPrimitive& prim, const Eigen::Vector3d& p) {
  return std::visit(
      [&p](const auto& g) -> double {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, HalfSpace>) return sdf_half_space(g, p);
        else if constexpr (std::is_same_v<T, Sphere>) return sdf_sphere(g, p);
        else if constexpr (std::is_same_v<T, Box>) return sdf_box(g, p);
        else return sdf_capsule(g, p);
      },
      prim);
}

double signed_distance(const SdfScene& scene, const Eigen::Vector3d& p) {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& prim : scene.primitives)
    d = std::min(d, signed_distance(prim, p));
  return d;
}

std::vector<double> batch_distance(const SdfScene& scene,
                                   const std::vector<Eigen::Vector3d>& points) {
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(signed_distance(scene, p));
  return out;
}

SdfScene read_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scene file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  auto vec3 = [](const json& a) {
    return Eigen::Vector3d(a[0].get<double>(), a[1].get<double>(), a[2].get<double>());
  };
  SdfScene scene;
  for (const auto& e : j) {
    const std::string kind = e.at("kind").get<std::string>();
    if (kind == "half_space") {
      scene.primitives.push_back(HalfSpace{vec3(e.at("point")), vec3(e.at("normal"))});
    } else if (kind == "sphere") {
      scene.primitives.push_back(Sphere{vec3(e.at("center")), e.at("radius").get<double>()});
    } else if (kind == "box") {
      Box b{vec3(e.at("center")), vec3(e.at("half_extents"))};
      if (e.contains("rotation")) {
        const auto& q = e.at("rotation");
        b.rotation = Eigen::Quaterniond(q[0].get<double>(), q[1].get<double>(),
                                        q[2].get<double>(), q[3].get<double>());
      }
      scene.primitives.push_back(b);
    } else if (kind == "capsule") {
      scene.primitives.push_back(
          Capsule{vec3(e.at("a")), vec3(e.at("b")), e.at("radius").get<double>()});
    } else {
      throw ParseError(path + ": unknown primitive kind '" + kind + "'");
    }
  }
  scene.validate();
  return scene;
}

NormalEstimate estimate_normals(const std::vector<Eigen::Vector3d>& points, int k) {
  const int n = static_cast<int>(points.size());
  if (k < 3) throw ValidationError("estimate_normals: k must be >= 3");
  if (n < k + 1) throw ValidationError("estimate_normals: need at least k+1 points");

  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (const auto& p : points) centroid += p;
  centroid /= n;

  NormalEstimate out;
  out.normals.assign(n, Eigen::Vector3d::Zero());
  out.valid.assign(n, false);

  std::vector<std::pair<double, int>> dist(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j)
      dist[j] = {(points[j] - points[i]).squaredNorm(), j};
    std::nth_element(dist.begin(), dist.begin() + k, dist.end());

    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    for (int j = 0; j <= k; ++j) mean += points[dist[j].second];
    mean /= k + 1;
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (int j = 0; j <= k; ++j) {
      const Eigen::Vector3d d = points[dist[j].second] - mean;
      cov += d * d.transpose();
    }

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
    const Eigen::Vector3d evals = eig.eigenvalues();  // ascending
    // Collinear neighborhood: the plane normal is not determined.
    if (evals(1) <= 1e-12 * std::max(evals(2), 1e-300)) continue;

    Eigen::Vector3d normal = eig.eigenvectors().col(0).normalized();
    if (normal.dot(centroid - points[i]) < 0) normal = -normal;
    out.normals[i] = normal;
    out.valid[i] = true;
  }
  return out;
}

}  // namespace cfield
