#include <doctest.h>

#include <cmath>

#include "cfield/synth.hpp"
#include "cfield/tactile.hpp"

using namespace cfield;

TEST_CASE("generated episodes validate and carry aligned ground truth") {
  SynthConfig cfg;
  const auto ep = generate_episode(cfg);
  REQUIRE(static_cast<int>(ep.frames.size()) == cfg.n_frames);
  REQUIRE(ep.ground_truth.size() == ep.frames.size());
  REQUIRE(ep.contacts.size() == ep.frames.size());
  REQUIRE(ep.injected_wrench.size() == ep.frames.size());
  for (const auto& fr : ep.frames) {
    fr.validate();
    REQUIRE(fr.tool_normals.has_value());
    CHECK(fr.table_z.has_value());
  }
  for (std::size_t t = 0; t < ep.frames.size(); ++t) {
    CHECK(ep.ground_truth[t].prob.size() == ep.frames[t].tool_points.size());
    CHECK(ep.ground_truth[t].force.size() == ep.frames[t].tool_points.size());
  }
}

TEST_CASE("generation is deterministic under a fixed seed") {
  SynthConfig cfg;
  cfg.point_sigma = 0.001;
  cfg.marker_sigma = 0.05;
  cfg.rng_seed = 99;
  const auto a = generate_episode(cfg);
  const auto b = generate_episode(cfg);
  REQUIRE(a.frames.size() == b.frames.size());
  for (std::size_t t = 0; t < a.frames.size(); ++t) {
    for (std::size_t i = 0; i < a.frames[t].tool_points.size(); ++i)
      CHECK((a.frames[t].tool_points[i] - b.frames[t].tool_points[i]).norm() == 0.0);
    for (std::size_t m = 0; m < a.frames[t].tactile.marker_displacements.size(); ++m)
      CHECK((a.frames[t].tactile.marker_displacements[m] -
             b.frames[t].tactile.marker_displacements[m]).norm() == 0.0);
  }
}

TEST_CASE("zero noise: tactile wrench reproduces the injected wrench") {
  SynthConfig cfg;
  const auto ep = generate_episode(cfg);
  for (std::size_t t = 0; t < ep.frames.size(); ++t) {
    const Wrench obs =
        compute_wrench(ep.frames[t].tactile, ep.frames[t].gripper_pose, {1.0});
    const Wrench& inj = ep.injected_wrench[t];
    CHECK((obs.force - inj.force).norm() <= 1e-9);
    CHECK((obs.torque - inj.torque).norm() <= 1e-9);
  }
}

TEST_CASE("press frames carry the configured normal load") {
  SynthConfig cfg;
  cfg.press_force = 3.5;
  const auto ep = generate_episode(cfg);
  bool saw_press = false;
  for (std::size_t t = 0; t < ep.frames.size(); ++t) {
    if (ep.contact_indices[t].empty()) {
      CHECK(ep.injected_wrench[t].force.norm() == 0.0);
      continue;
    }
    saw_press = true;
    CHECK(ep.injected_wrench[t].force.z() == doctest::Approx(3.5).epsilon(1e-12));
    // Sparse contact magnitudes sum to the load.
    double total = 0;
    for (const auto& c : ep.contacts[t]) total += c.magnitude;
    CHECK(total == doctest::Approx(3.5).epsilon(1e-12));
  }
  CHECK(saw_press);
}

TEST_CASE("analytic contact set matches the tool points at the table") {
  SynthConfig cfg;
  const auto ep = generate_episode(cfg);
  for (std::size_t t = 0; t < ep.frames.size(); ++t) {
    std::vector<int> expect;
    for (std::size_t i = 0; i < ep.frames[t].tool_points.size(); ++i)
      if (ep.frames[t].tool_points[i].z() <= cfg.table_z + 1e-9)
        expect.push_back(static_cast<int>(i));
    CHECK(ep.contact_indices[t] == expect);
    // Ground-truth probability is 1 exactly on the contact set.
    for (int i : expect)
      CHECK(ep.ground_truth[t].prob[i] == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("free frames carry zero ground-truth forces") {
  SynthConfig cfg;
  const auto ep = generate_episode(cfg);
  for (std::size_t t = 0; t < ep.frames.size(); ++t) {
    if (!ep.contact_indices[t].empty()) continue;
    for (const auto& f : ep.ground_truth[t].force) CHECK(f.norm() == 0.0);
    for (const auto& d : ep.frames[t].tactile.marker_displacements)
      CHECK(d.norm() == 0.0);
  }
}

TEST_CASE("crayon tool generates a valid episode too") {
  SynthConfig cfg;
  cfg.shape = ToolShape::crayon;
  const auto ep = generate_episode(cfg);
  for (const auto& fr : ep.frames) fr.validate();
  bool any_contact = false;
  for (const auto& ci : ep.contact_indices) any_contact |= !ci.empty();
  CHECK(any_contact);
}

TEST_CASE("slide phase translates the tool without losing contact") {
  SynthConfig cfg;
  const auto ep = generate_episode(cfg);
  // Gather frames in contact; the gripper x position must span the slide.
  double x_min = 1e9, x_max = -1e9;
  for (std::size_t t = 0; t < ep.frames.size(); ++t) {
    if (ep.contact_indices[t].empty()) continue;
    x_min = std::min(x_min, ep.frames[t].gripper_pose.position.x());
    x_max = std::max(x_max, ep.frames[t].gripper_pose.position.x());
  }
  CHECK(x_max - x_min == doctest::Approx(cfg.slide_length).epsilon(1e-9));
}

TEST_CASE("config validation") {
  SynthConfig cfg;
  cfg.n_frames = 2;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.n_frames = 30;
  cfg.approach_depth = cfg.blade_height + 0.01;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("marker noise scales with the clean displacement magnitude") {
  SynthConfig clean_cfg;
  SynthConfig noisy_cfg;
  noisy_cfg.marker_sigma = 0.05;
  noisy_cfg.rng_seed = 5;
  const auto clean = generate_episode(clean_cfg);
  const auto noisy = generate_episode(noisy_cfg);
  double clean_rms = 0, diff_rms = 0;
  std::size_t n = 0;
  for (std::size_t t = 0; t < clean.frames.size(); ++t) {
    const auto& a = clean.frames[t].tactile.marker_displacements;
    const auto& b = noisy.frames[t].tactile.marker_displacements;
    for (std::size_t m = 0; m < a.size(); ++m) {
      clean_rms += a[m].squaredNorm();
      diff_rms += (a[m] - b[m]).squaredNorm();
      ++n;
    }
  }
  clean_rms = std::sqrt(clean_rms / n);
  diff_rms = std::sqrt(diff_rms / n);
  CHECK(diff_rms > 0.0);
  // Perturbation is on the order of 5% of the clean rms, not wildly off.
  CHECK(diff_rms < 0.25 * clean_rms);
}
