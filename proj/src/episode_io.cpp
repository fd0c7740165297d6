#include "cfield/episode_io.hpp"

#include <fstream>
#include <nlohmann/json.hpp>

#include "cfield/common.hpp"

namespace cfield {

using nlohmann::json;

namespace {

Eigen::Vector3d to_vec3(const json& j) {
  if (!j.is_array() || j.size() != 3) throw ParseError("expected [x,y,z]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

std::vector<Eigen::Vector3d> to_points(const json& j) {
  std::vector<Eigen::Vector3d> out;
  out.reserve(j.size());
  for (const auto& e : j) out.push_back(to_vec3(e));
  return out;
}

json from_points(const std::vector<Eigen::Vector3d>& pts) {
  json j = json::array();
  for (const auto& p : pts) j.push_back({p.x(), p.y(), p.z()});
  return j;
}

ContactField parse_field(const json& j) {
  ContactField f;
  f.prob = j.at("c").get<std::vector<double>>();
  f.force = to_points(j.at("f"));
  return f;
}

json dump_field(const ContactField& f) {
  return json{{"c", f.prob}, {"f", from_points(f.force)}};
}

Frame parse_frame(const json& j) {
  Frame fr;
  fr.time = j.at("t").get<double>();
  fr.tool_points = to_points(j.at("tool_points"));
  fr.env_points = to_points(j.at("env_points"));

  const json& m = j.at("markers");
  fr.tactile.sensor_count = m.at("sensors").get<int>();
  const auto grid = m.at("grid").get<std::vector<int>>();
  if (grid.size() != 2) throw ParseError("markers.grid must be [rows, cols]");
  fr.tactile.grid_rows = grid[0];
  fr.tactile.grid_cols = grid[1];
  fr.tactile.marker_positions = to_points(m.at("pos"));
  fr.tactile.marker_displacements = to_points(m.at("disp"));
  fr.tactile.depth = m.at("depth").get<std::vector<double>>();
  if (m.contains("hist")) {
    for (const auto& h : m.at("hist")) {
      if (h.size() != kHistoryScalars) throw ParseError("history row must have 15 scalars");
      std::array<double, kHistoryScalars> row{};
      for (int i = 0; i < kHistoryScalars; ++i) row[i] = h[i].get<double>();
      fr.tactile.displacement_history.push_back(row);
    }
  }

  const auto gp = j.at("gripper_pose").get<std::vector<double>>();
  if (gp.size() != 7) throw ParseError("gripper_pose must be [x,y,z,qw,qx,qy,qz]");
  fr.gripper_pose.position = {gp[0], gp[1], gp[2]};
  fr.gripper_pose.orientation = Eigen::Quaterniond(gp[3], gp[4], gp[5], gp[6]);

  if (j.contains("tool_normals")) fr.tool_normals = to_points(j.at("tool_normals"));
  if (j.contains("table_z")) fr.table_z = j.at("table_z").get<double>();
  if (j.contains("labels")) fr.labels = parse_field(j.at("labels"));
  return fr;
}

json dump_frame(const Frame& fr) {
  json m{{"grid", {fr.tactile.grid_rows, fr.tactile.grid_cols}},
         {"sensors", fr.tactile.sensor_count},
         {"pos", from_points(fr.tactile.marker_positions)},
         {"disp", from_points(fr.tactile.marker_displacements)},
         {"depth", fr.tactile.depth}};
  if (!fr.tactile.displacement_history.empty()) {
    json hist = json::array();
    for (const auto& row : fr.tactile.displacement_history) hist.push_back(row);
    m["hist"] = hist;
  }
  const auto& p = fr.gripper_pose;
  json j{{"t", fr.time},
         {"tool_points", from_points(fr.tool_points)},
         {"env_points", from_points(fr.env_points)},
         {"markers", std::move(m)},
         {"gripper_pose",
          {p.position.x(), p.position.y(), p.position.z(), p.orientation.w(),
           p.orientation.x(), p.orientation.y(), p.orientation.z()}}};
  if (fr.tool_normals) j["tool_normals"] = from_points(*fr.tool_normals);
  if (fr.table_z) j["table_z"] = *fr.table_z;
  if (fr.labels) j["labels"] = dump_field(*fr.labels);
  return j;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path);
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  return out;
}

}  // namespace

std::vector<Frame> read_episode(const std::string& path) {
  auto in = open_input(path);
  std::vector<Frame> frames;
  std::string line;
  std::size_t lineno = 0;
  bool any_history = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    Frame fr;
    try {
      fr = parse_frame(json::parse(line));
      fr.validate();
    } catch (const json::exception& e) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": " + e.what());
    } catch (const std::runtime_error& e) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
    if (!frames.empty() && fr.time <= frames.back().time)
      throw ValidationError(path + ":" + std::to_string(lineno) +
                            ": non-monotone timestamp");
    any_history = any_history || !fr.tactile.displacement_history.empty();
    frames.push_back(std::move(fr));
  }
  if (!any_history) rebuild_history(frames);
  return frames;
}

void write_episode(const std::string& path, const std::vector<Frame>& frames) {
  auto out = open_output(path);
  for (const auto& fr : frames) out << dump_frame(fr) << '\n';
}

void rebuild_history(std::vector<Frame>& frames) {
  if (frames.empty()) return;
  const std::size_t n = frames.front().tactile.marker_displacements.size();
  for (std::size_t t = 0; t < frames.size(); ++t) {
    auto& tac = frames[t].tactile;
    if (tac.marker_displacements.size() != n)
      throw ValidationError("rebuild_history: marker layout changes across frames");
    tac.displacement_history.assign(n, {});
    for (std::size_t m = 0; m < n; ++m) {
      // Slot h holds the displacement from frame t - (H-1) + h; oldest first.
      for (int h = 0; h < kHistorySteps; ++h) {
        const long src = static_cast<long>(t) - (kHistorySteps - 1) + h;
        if (src < 0) continue;  // zero-padded before episode start
        const auto& d = frames[src].tactile.marker_displacements[m];
        tac.displacement_history[m][3 * h + 0] = d.x();
        tac.displacement_history[m][3 * h + 1] = d.y();
        tac.displacement_history[m][3 * h + 2] = d.z();
      }
    }
  }
}

std::vector<ContactField> read_fields(const std::string& path) {
  auto in = open_input(path);
  std::vector<ContactField> fields;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      fields.push_back(parse_field(json::parse(line)));
    } catch (const json::exception& e) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return fields;
}

void write_fields(const std::string& path, const std::vector<ContactField>& fields) {
  auto out = open_output(path);
  for (const auto& f : fields) out << dump_field(f) << '\n';
}

void export_ply(const std::string& path,
                const std::vector<Eigen::Vector3d>& points,
                const ContactField& field) {
  if (field.size() != points.size())
    throw ValidationError("export_ply: field length != point count");
  auto out = open_output(path);
  out << "ply\nformat ascii 1.0\n"
      << "element vertex " << points.size() << "\n"
      << "property float x\nproperty float y\nproperty float z\n"
      << "property float prob\n"
      << "property float fx\nproperty float fy\nproperty float fz\n"
      << "end_header\n";
  out.precision(9);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    const auto& f = field.force[i];
    out << p.x() << ' ' << p.y() << ' ' << p.z() << ' ' << field.prob[i] << ' '
        << f.x() << ' ' << f.y() << ' ' << f.z() << '\n';
  }
}

}  // namespace cfield
