#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "cfield/composite.hpp"
#include "cfield/episode_io.hpp"
#include "test_helpers.hpp"

using namespace cfield;
using cfield::testing::make_frame;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) {
    path = (std::filesystem::temp_directory_path() / name).string();
  }
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("read_episode: empty file gives empty list") {
  TempFile f("cfield_empty.jsonl");
  std::ofstream(f.path).close();
  CHECK(read_episode(f.path).empty());
}

TEST_CASE("read_episode: missing file is an io error") {
  CHECK_THROWS_AS(read_episode("/nonexistent/ep.jsonl"), IoError);
}

TEST_CASE("episode round-trip preserves every numeric field") {
  std::vector<Frame> frames;
  for (int t = 0; t < 3; ++t) {
    Frame fr = make_frame(5, 6, 0.1 * t);
    fr.table_z = 0.017;
    fr.tactile.marker_displacements[3] = {1e-4, -2.5e-4, 3.3e-5};
    fr.tactile.depth[3] = -0.0021;
    ContactField labels;
    labels.prob.assign(5, 0.25);
    labels.force.assign(5, Eigen::Vector3d(0.1, -0.2, 0.3));
    fr.labels = labels;
    frames.push_back(fr);
  }
  rebuild_history(frames);

  TempFile f("cfield_roundtrip.jsonl");
  write_episode(f.path, frames);
  const auto back = read_episode(f.path);
  REQUIRE(back.size() == 3);
  for (int t = 0; t < 3; ++t) {
    CHECK(back[t].time == doctest::Approx(frames[t].time).epsilon(1e-12));
    REQUIRE(back[t].tool_points.size() == frames[t].tool_points.size());
    for (std::size_t i = 0; i < frames[t].tool_points.size(); ++i)
      CHECK((back[t].tool_points[i] - frames[t].tool_points[i]).norm() <= 1e-12);
    CHECK(back[t].tactile.depth == frames[t].tactile.depth);
    CHECK(*back[t].table_z == *frames[t].table_z);
    REQUIRE(back[t].labels.has_value());
    CHECK(back[t].labels->prob == frames[t].labels->prob);
    for (int m = 0; m < back[t].tactile.marker_count(); ++m)
      CHECK(back[t].tactile.displacement_history[m] ==
            frames[t].tactile.displacement_history[m]);
  }
}

TEST_CASE("frame with mismatched label count fails validation") {
  Frame fr = make_frame(5, 4);
  ContactField labels;
  labels.prob.assign(4, 0.0);
  labels.force.assign(4, Eigen::Vector3d::Zero());
  fr.labels = labels;
  CHECK_THROWS_AS(fr.validate(), ValidationError);
}

TEST_CASE("non-monotone timestamps rejected") {
  std::vector<Frame> frames = {make_frame(3, 3, 0.2), make_frame(3, 3, 0.1)};
  std::swap(frames[0].time, frames[1].time);  // make earlier one later
  TempFile f("cfield_nonmono.jsonl");
  write_episode(f.path, {make_frame(3, 3, 0.2), make_frame(3, 3, 0.1)});
  CHECK_THROWS_AS(read_episode(f.path), ValidationError);
}

TEST_CASE("history reconstruction zero-pads the episode start") {
  std::vector<Frame> frames;
  for (int t = 0; t < 3; ++t) {
    Frame fr = make_frame(3, 3, 0.1 * t);
    fr.tactile.marker_displacements[0] = {0.01 * (t + 1), 0.0, 0.0};
    fr.tactile.displacement_history.clear();
    frames.push_back(fr);
  }
  TempFile f("cfield_hist.jsonl");
  write_episode(f.path, frames);
  const auto back = read_episode(f.path);
  const auto& h = back[2].tactile.displacement_history[0];
  // Slots: [0, 0, f0, f1, f2] each 3 scalars, oldest first.
  CHECK(h[0] == 0.0);
  CHECK(h[6] == doctest::Approx(0.01));
  CHECK(h[9] == doctest::Approx(0.02));
  CHECK(h[12] == doctest::Approx(0.03));
}

TEST_CASE("assemble_composite: reference sizes 256 + 512 + 126") {
  Frame fr = make_frame(300, 600, 0.5);
  const auto input = assemble_composite(fr, 256, 512);
  CHECK(input.size() == 894);
  CHECK(input.points.rows() == 894);
  CHECK(input.features.rows() == 894);
  CHECK(input.features.cols() == 16);
  CHECK(input.n_tac == 126);
  CHECK_FALSE(input.repeated_points);
  input.validate();
}

TEST_CASE("assemble_composite: zero history gives [type_code, 0 x 15] rows") {
  Frame fr = make_frame(10, 10);
  const auto input = assemble_composite(fr, 4, 4);
  for (int i = 8; i < input.size(); ++i) {
    CHECK(input.features(i, 0) == kTypeTactile);
    CHECK(input.features.row(i).tail(15).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("assemble_composite: single point identity and repeat flag") {
  Frame fr = make_frame(1, 1);
  const auto one = assemble_composite(fr, 1, 1);
  CHECK((one.points.row(0).transpose() - fr.tool_points[0]).norm() == 0.0);
  const auto repeated = assemble_composite(fr, 3, 1);
  CHECK(repeated.repeated_points);
  CHECK(repeated.n_obj == 3);
}

TEST_CASE("assemble_composite is deterministic") {
  Frame fr = make_frame(50, 80, 1.25);
  const auto a = assemble_composite(fr, 16, 32);
  const auto b = assemble_composite(fr, 16, 32);
  CHECK(a.points == b.points);
  CHECK(a.features == b.features);
}

TEST_CASE("augment: zero config is the identity") {
  const auto input = assemble_composite(make_frame(10, 10), 8, 8);
  const auto out = augment(input, AugmentConfig{});
  CHECK(out.points == input.points);
  CHECK(out.features == input.features);
}

TEST_CASE("quarter turn about Z maps (1,0,0) to (0,1,0)") {
  CompositeInput input;
  input.n_obj = 1;
  input.points.resize(1, 3);
  input.points.row(0) << 1.0, 0.0, 0.0;
  input.features = Eigen::MatrixXd::Zero(1, kFeatureWidth);
  const auto out = apply_rigid_transform(input, Eigen::Vector3d::Zero(), M_PI / 2);
  CHECK((out.points.row(0) - Eigen::RowVector3d(0, 1, 0)).norm() <= 1e-12);
}

TEST_CASE("augment: same seed is bit-identical") {
  const auto input = assemble_composite(make_frame(20, 20), 10, 10);
  AugmentConfig cfg;
  cfg.max_translation = 0.1;
  cfg.max_rotation_z = 0.5;
  cfg.jitter_sigma = 0.01;
  cfg.tactile_noise_sigma = 0.001;
  cfg.rng_seed = 7;
  const auto a = augment(input, cfg);
  const auto b = augment(input, cfg);
  CHECK(a.points == b.points);
  CHECK(a.features == b.features);
}

TEST_CASE("pure rotation preserves pairwise distances") {
  const auto input = assemble_composite(make_frame(30, 30, 2.0), 16, 16);
  AugmentConfig cfg;
  cfg.max_rotation_z = 1.0;
  cfg.rng_seed = 3;
  const auto out = augment(input, cfg);
  for (int i = 0; i < input.size(); ++i)
    for (int j = i + 1; j < input.size(); j += 7) {
      const double before = (input.points.row(i) - input.points.row(j)).norm();
      const double after = (out.points.row(i) - out.points.row(j)).norm();
      CHECK(std::abs(before - after) <= 1e-9);
    }
}

TEST_CASE("augment touches only tactile history channels") {
  const auto input = assemble_composite(make_frame(10, 10), 8, 8);
  AugmentConfig cfg;
  cfg.tactile_noise_sigma = 0.01;
  cfg.rng_seed = 1;
  const auto out = augment(input, cfg);
  CHECK(out.features.col(0) == input.features.col(0));
  for (int i = 0; i < input.n_obj + input.n_env; ++i)
    CHECK(out.features.row(i) == input.features.row(i));
}
