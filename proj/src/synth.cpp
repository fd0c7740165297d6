#include "cfield/synth.hpp"

#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <random>

#include "cfield/episode_io.hpp"
#include "cfield/sdf.hpp"
#include "cfield/tactile.hpp"

namespace cfield {

using nlohmann::json;

void SynthConfig::validate() const {
  if (blade_length <= 0 || blade_thickness <= 0 || blade_height <= 0 ||
      handle_length <= 0 || slide_length < 0 || press_force < 0 ||
      point_sigma < 0 || marker_sigma < 0)
    throw ConfigError("synth: dimensions and sigmas must be positive");
  if (n_frames < 3) throw ConfigError("synth: n_frames must be >= 3");
  if (approach_depth <= 0) throw ConfigError("synth: approach_depth must be > 0");
  if (approach_depth > blade_height)
    throw ConfigError("synth: approach_depth exceeds blade height");
}

SynthConfig read_synth_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open synth config: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  SynthConfig cfg;
  if (j.contains("shape")) {
    const auto s = j["shape"].get<std::string>();
    if (s == "scraper") cfg.shape = ToolShape::scraper;
    else if (s == "crayon") cfg.shape = ToolShape::crayon;
    else throw ConfigError("synth: unknown shape '" + s + "'");
  }
  if (j.contains("tool")) {
    const auto& t = j["tool"];
    cfg.blade_length = t.value("blade_length", cfg.blade_length);
    cfg.blade_thickness = t.value("blade_thickness", cfg.blade_thickness);
    cfg.blade_height = t.value("blade_height", cfg.blade_height);
    cfg.handle_length = t.value("handle_length", cfg.handle_length);
  }
  if (j.contains("episode")) {
    const auto& e = j["episode"];
    cfg.approach_depth = e.value("approach_depth", cfg.approach_depth);
    cfg.slide_length = e.value("slide_length", cfg.slide_length);
    cfg.n_frames = e.value("n_frames", cfg.n_frames);
    cfg.press_force = e.value("press_force", cfg.press_force);
  }
  cfg.table_z = j.value("table_z", cfg.table_z);
  if (j.contains("noise")) {
    const auto& n = j["noise"];
    cfg.point_sigma = n.value("point_sigma", cfg.point_sigma);
    cfg.marker_sigma = n.value("marker_sigma", cfg.marker_sigma);
  }
  cfg.rng_seed = j.value("rng_seed", cfg.rng_seed);
  cfg.validate();
  return cfg;
}

namespace {

struct ToolModel {
  std::vector<Eigen::Vector3d> points;   // tool frame, blade bottom at z = 0
  std::vector<Eigen::Vector3d> normals;  // unit, inward
  std::vector<int> bottom;               // indices of the contact-capable row
  double grip_height = 0.0;              // gripper origin height above z = 0
};

ToolModel build_scraper(const SynthConfig& cfg) {
  ToolModel tool;
  const int nb = 15;
  auto push = [&](const Eigen::Vector3d& p, const Eigen::Vector3d& n) {
    tool.points.push_back(p);
    tool.normals.push_back(n.normalized());
  };
  // Blade bottom edge: the only points that can reach the table.
  for (int i = 0; i < nb; ++i) {
    const double x = -cfg.blade_length / 2 + cfg.blade_length * i / (nb - 1);
    tool.bottom.push_back(static_cast<int>(tool.points.size()));
    push({x, 0.0, 0.0}, Eigen::Vector3d::UnitZ());
  }
  // Blade faces, well above the bottom row so the candidate band is clean.
  for (int i = 0; i < nb; ++i) {
    const double x = -cfg.blade_length / 2 + cfg.blade_length * i / (nb - 1);
    for (double z : {cfg.blade_height / 3, 2 * cfg.blade_height / 3, cfg.blade_height})
      for (double sy : {-1.0, 1.0})
        push({x, sy * cfg.blade_thickness / 2, z}, {0.0, -sy, 0.0});
  }
  // Handle shaft.
  const int nh = 8;
  for (int i = 0; i < nh; ++i) {
    const double z =
        cfg.blade_height + cfg.handle_length * (i + 1) / static_cast<double>(nh);
    for (double a : {0.0, M_PI / 2, M_PI, 3 * M_PI / 2})
      push({0.008 * std::cos(a), 0.008 * std::sin(a), z},
           {-std::cos(a), -std::sin(a), 0.0});
  }
  tool.grip_height = cfg.blade_height + cfg.handle_length + 0.02;
  return tool;
}

ToolModel build_crayon(const SynthConfig& cfg) {
  // Vertical capsule shaft with a single tip point; the handle_length field
  // doubles as shaft length and blade_thickness as shaft radius.
  ToolModel tool;
  const double radius = cfg.blade_thickness;
  auto push = [&](const Eigen::Vector3d& p, const Eigen::Vector3d& n) {
    tool.points.push_back(p);
    tool.normals.push_back(n.normalized());
  };
  tool.bottom.push_back(0);
  push({0, 0, 0}, Eigen::Vector3d::UnitZ());
  const int rings = 10, around = 8;
  for (int i = 0; i < rings; ++i) {
    const double z = radius + cfg.handle_length * (i + 1) / static_cast<double>(rings);
    for (int j = 0; j < around; ++j) {
      const double a = 2 * M_PI * j / around;
      push({radius * std::cos(a), radius * std::sin(a), z},
           {-std::cos(a), -std::sin(a), 0.0});
    }
  }
  tool.grip_height = cfg.handle_length + radius + 0.02;
  return tool;
}

// Minimum-norm marker forces realizing the requested wrench about the
// gripper origin, converted to displacements through the marker force
// model's gains.
void invert_marker_model(const std::vector<Eigen::Vector3d>& marker_local,
                         const Wrench& target, TactileState& tac) {
  const int m = static_cast<int>(marker_local.size());
  Eigen::MatrixXd g(6, 3 * m);
  for (int i = 0; i < m; ++i) {
    g.block<3, 3>(0, 3 * i) = Eigen::Matrix3d::Identity();
    const auto& p = marker_local[i];
    Eigen::Matrix3d sk;
    sk << 0, -p.z(), p.y(), p.z(), 0, -p.x(), -p.y(), p.x(), 0;
    g.block<3, 3>(3, 3 * i) = sk;
  }
  Eigen::Matrix<double, 6, 1> w;
  w << target.force, target.torque;
  const Eigen::VectorXd f =
      g.transpose() * (g * g.transpose()).ldlt().solve(w);
  for (int i = 0; i < m; ++i) {
    const Eigen::Vector3d fi = f.segment<3>(3 * i);
    tac.depth[i] = -fi.z() / kNormalGain;
    tac.marker_displacements[i] =
        Eigen::Vector3d(fi.x() / kShearGain, fi.y() / kShearGain, tac.depth[i]);
  }
}

}  // namespace

SynthEpisode generate_episode(const SynthConfig& cfg) {
  cfg.validate();
  const ToolModel tool =
      cfg.shape == ToolShape::scraper ? build_scraper(cfg) : build_crayon(cfg);
  const int n_tool = static_cast<int>(tool.points.size());

  // Sensor marker grids in the gripper frame: two 7x9 patches spanning x-z,
  // offset in +-y.
  std::vector<Eigen::Vector3d> marker_local;
  for (double sy : {-1.0, 1.0})
    for (int r = 0; r < 7; ++r)
      for (int c = 0; c < 9; ++c)
        marker_local.emplace_back(-0.006 + 0.002 * r, sy * 0.012,
                                  -0.013 + 0.002 * c);

  // Environment: a sampled patch of the table plane.
  std::vector<Eigen::Vector3d> env_local;
  for (int i = 0; i < 12; ++i)
    for (int j = 0; j < 10; ++j)
      env_local.emplace_back(-0.10 + 0.025 * i, -0.10 + 0.022 * j, cfg.table_z);

  // Trajectory: approach stays clear of the candidate band until the final
  // approach frame drops to full depth; then press in place, then slide.
  const int na = cfg.n_frames / 3;
  const int np = cfg.n_frames / 3;
  const int ns = cfg.n_frames - na - np;
  std::vector<Eigen::Vector2d> offsets;  // (x, z) of the blade bottom
  for (int i = 0; i < na; ++i) {
    const double z = i + 1 == na
                         ? -cfg.approach_depth
                         : 0.02 - (0.02 - 0.005) * i / std::max(1, na - 1);
    offsets.emplace_back(0.0, z);
  }
  for (int i = 0; i < np; ++i) offsets.emplace_back(0.0, -cfg.approach_depth);
  for (int i = 0; i < ns; ++i)
    offsets.emplace_back(cfg.slide_length * (i + 1) / ns, -cfg.approach_depth);

  const SdfScene plane{{HalfSpace{{0, 0, cfg.table_z}, Eigen::Vector3d::UnitZ()}}};
  const SoftContactConfig soft_cfg;
  const ExtrapolationConfig ext_cfg;
  std::mt19937_64 rng(cfg.rng_seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  SynthEpisode ep;
  for (int t = 0; t < cfg.n_frames; ++t) {
    const Eigen::Vector3d shift(offsets[t].x(), 0.0,
                                cfg.table_z + offsets[t].y());
    Frame fr;
    fr.time = 0.1 * t;
    fr.table_z = cfg.table_z;
    fr.gripper_pose.position = shift + Eigen::Vector3d(0, 0, tool.grip_height);

    fr.tool_points.reserve(n_tool);
    for (int i = 0; i < n_tool; ++i) fr.tool_points.push_back(tool.points[i] + shift);
    fr.tool_normals = tool.normals;
    fr.env_points = env_local;

    // Analytic contact set and injected load.
    std::vector<int> contact_idx;
    for (int i : tool.bottom)
      if (fr.tool_points[i].z() <= cfg.table_z + 1e-9) contact_idx.push_back(i);
    const bool loaded = !contact_idx.empty() && cfg.press_force > 0;

    Wrench injected;
    std::vector<SparseContact> frame_contacts;
    if (loaded) {
      const double per_point = cfg.press_force / contact_idx.size();
      for (int i : contact_idx) {
        frame_contacts.push_back(
            {fr.tool_points[i], Eigen::Vector3d::UnitZ(), per_point});
        const Eigen::Vector3d f(0, 0, per_point);
        injected.force += f;
        injected.torque += (fr.tool_points[i] - fr.gripper_pose.position).cross(f);
      }
    }

    // Tactile channel consistent with the injected wrench by construction.
    TactileState tac;
    tac.marker_displacements.assign(marker_local.size(), Eigen::Vector3d::Zero());
    tac.depth.assign(marker_local.size(), 0.0);
    if (loaded) invert_marker_model(marker_local, injected, tac);
    tac.marker_positions.reserve(marker_local.size());
    for (const auto& p : marker_local)
      tac.marker_positions.push_back(fr.gripper_pose.to_world(p));
    fr.tactile = tac;

    // Exact soft-contact and extrapolated-force ground truth.
    const auto dist = batch_distance(plane, fr.tool_points);
    ContactField gt;
    gt.prob = soft_contact_prob(dist, soft_cfg);
    gt.force = extrapolate_forces(fr.tool_points, dist, frame_contacts, ext_cfg);
    fr.labels = gt;

    ep.frames.push_back(std::move(fr));
    ep.ground_truth.push_back(std::move(gt));
    ep.contacts.push_back(std::move(frame_contacts));
    ep.contact_indices.push_back(std::move(contact_idx));
    ep.injected_wrench.push_back(injected);
  }

  // Noise pass (after the clean episode so the marker scale is known).
  if (cfg.point_sigma > 0 || cfg.marker_sigma > 0) {
    double rms = 0;
    std::size_t cnt = 0;
    for (const auto& fr : ep.frames)
      for (const auto& d : fr.tactile.marker_displacements) {
        rms += d.squaredNorm();
        cnt += 3;
      }
    rms = cnt ? std::sqrt(rms / cnt) : 0.0;
    const double marker_abs = cfg.marker_sigma * rms;
    for (auto& fr : ep.frames) {
      if (cfg.point_sigma > 0) {
        for (auto& p : fr.tool_points)
          p += cfg.point_sigma * Eigen::Vector3d(gauss(rng), gauss(rng), gauss(rng));
        for (auto& p : fr.env_points)
          p += cfg.point_sigma * Eigen::Vector3d(gauss(rng), gauss(rng), gauss(rng));
      }
      if (marker_abs > 0)
        for (auto& d : fr.tactile.marker_displacements)
          d += marker_abs * Eigen::Vector3d(gauss(rng), gauss(rng), gauss(rng));
    }
  }

  rebuild_history(ep.frames);
  return ep;
}

}  // namespace cfield
