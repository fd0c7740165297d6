#include <doctest.h>

#include <cmath>
#include <random>

#include "cfield/tactile.hpp"
#include "test_helpers.hpp"

using namespace cfield;
using cfield::testing::single_marker;

TEST_CASE("spatial_filter: constant grid unchanged") {
  Eigen::MatrixXd grid = Eigen::MatrixXd::Constant(7, 9, 3.25);
  const auto out = spatial_filter(grid, 0.25);
  CHECK((out.array() - 3.25).abs().maxCoeff() <= 1e-12);
}

TEST_CASE("spatial_filter: unit impulse at sigma 0.25") {
  Eigen::MatrixXd grid = Eigen::MatrixXd::Zero(7, 9);
  grid(3, 4) = 1.0;
  const auto out = spatial_filter(grid, 0.25);

  // Explicit kernel: radius ceil(4*0.25) = 1, weights exp(-k^2/(2 s^2)).
  const double w1 = std::exp(-0.5 / (0.25 * 0.25));
  const double center = 1.0 / (1.0 + 2.0 * w1);
  CHECK(out(3, 4) == doctest::Approx(center * center).epsilon(1e-12));
  CHECK(out.sum() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("spatial_filter: sigma -> 0 limit is the identity") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  Eigen::MatrixXd grid(7, 9);
  for (int r = 0; r < 7; ++r)
    for (int c = 0; c < 9; ++c) grid(r, c) = u(rng);
  const auto out = spatial_filter(grid, 1e-6);
  CHECK((out - grid).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("spatial_filter preserves channel sums") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::MatrixXd grid(7, 9);
    for (int r = 0; r < 7; ++r)
      for (int c = 0; c < 9; ++c) grid(r, c) = u(rng);
    const auto out = spatial_filter(grid, 0.25 + 0.3 * trial);
    CHECK(out.sum() == doctest::Approx(grid.sum()).epsilon(1e-9));
  }
}

TEST_CASE("savitzky_golay: window 7 order 1 equals the moving average") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2, 2);
  std::vector<double> series(40);
  for (auto& v : series) v = u(rng);
  const auto out = savitzky_golay(series, 7, 1);
  for (int i = 3; i < 37; ++i) {
    double mean = 0;
    for (int k = -3; k <= 3; ++k) mean += series[i + k];
    mean /= 7;
    CHECK(out[i] == doctest::Approx(mean).epsilon(1e-12));
  }
}

TEST_CASE("savitzky_golay reproduces polynomials up to the fit order") {
  for (int order = 1; order <= 3; ++order) {
    std::vector<double> series(30);
    for (int t = 0; t < 30; ++t) {
      double v = 0;
      for (int p = 0; p <= order; ++p) v += (p + 1) * std::pow(0.1 * t, p);
      series[t] = v;
    }
    const auto out = savitzky_golay(series, 9, order);
    for (int t = 4; t < 26; ++t)
      CHECK(out[t] == doctest::Approx(series[t]).epsilon(1e-9));
  }
}

TEST_CASE("savitzky_golay: linear ramp reproduced everywhere") {
  std::vector<double> series(20);
  for (int t = 0; t < 20; ++t) series[t] = 2.0 * t + 1.0;
  const auto out = savitzky_golay(series, 7, 1);
  for (int t = 0; t < 20; ++t)
    CHECK(out[t] == doctest::Approx(series[t]).epsilon(1e-9));
}

TEST_CASE("savitzky_golay: constant unchanged, bad configs rejected") {
  std::vector<double> series(10, 4.0);
  const auto out = savitzky_golay(series, 5, 2);
  for (double v : out) CHECK(v == doctest::Approx(4.0).epsilon(1e-12));
  CHECK_THROWS_AS(savitzky_golay(series, 6, 1), ConfigError);
  CHECK_THROWS_AS(savitzky_golay(series, 3, 3), ConfigError);
}

TEST_CASE("phase_smooth: no contact collapses to the median") {
  FilterConfig cfg;
  std::vector<double> series{1.0, 5.0, 2.0, 9.0, 3.0};
  std::vector<double> depth(5, 0.0);
  const auto out = phase_smooth(series, depth, cfg);
  for (double v : out) CHECK(v == doctest::Approx(3.0));
  // Idempotent here: a constant series has itself as median.
  CHECK(phase_smooth(out, depth, cfg) == out);
}

TEST_CASE("phase_smooth: contact from frame 0 leaves the series unchanged") {
  FilterConfig cfg;
  std::vector<double> series{1.0, 2.0, 3.0};
  std::vector<double> depth(3, -0.01);
  const auto out = phase_smooth(series, depth, cfg);
  CHECK(out == series);
  CHECK(phase_smooth(out, depth, cfg) == out);
}

TEST_CASE("phase_smooth: pre-contact ramp, hand-evaluated") {
  FilterConfig cfg;
  std::vector<double> series{4.0, 0.0, 2.0, 6.0};
  std::vector<double> depth{0.0, 0.0, 0.0, -0.01};
  const auto out = phase_smooth(series, depth, cfg);
  CHECK(out[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(out[1] == doctest::Approx(10.0 / 3).epsilon(1e-12));
  CHECK(out[2] == doctest::Approx(14.0 / 3).epsilon(1e-12));
  CHECK(out[3] == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("phase_smooth: post-contact ramp mirrors the rule") {
  FilterConfig cfg;
  std::vector<double> series{6.0, 2.0, 0.0, 4.0};
  std::vector<double> depth{-0.01, 0.0, 0.0, 0.0};
  const auto out = phase_smooth(series, depth, cfg);
  // Suffix median of {2,0,4} is 2; ramp 6 -> 2 over 3 steps.
  CHECK(out[0] == doctest::Approx(6.0));
  CHECK(out[1] == doctest::Approx(6.0 - 4.0 / 3).epsilon(1e-12));
  CHECK(out[2] == doctest::Approx(6.0 - 8.0 / 3).epsilon(1e-12));
  CHECK(out[3] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("compute_wrench: zero input gives zero wrench") {
  const auto tac = single_marker({0, 0, 0}, Eigen::Vector3d::Zero(), 0.0);
  const Wrench w = compute_wrench(tac, Pose{}, {1.0});
  CHECK(w.force.norm() == 0.0);
  CHECK(w.torque.norm() == 0.0);
}

TEST_CASE("compute_wrench: cross-product torque identity") {
  // Marker at r = (0, 0.1, 0), gripper-frame force (1, 0, 0):
  // dx = 1 / kShearGain.
  const auto tac =
      single_marker({0, 0.1, 0}, {1.0 / kShearGain, 0, 0}, 0.0);
  const Wrench w = compute_wrench(tac, Pose{}, {1.0});
  CHECK((w.force - Eigen::Vector3d(1, 0, 0)).norm() <= 1e-12);
  CHECK((w.torque - Eigen::Vector3d(0, 0, -0.1)).norm() <= 1e-12);
}

TEST_CASE("compute_wrench is linear in the calibration scale") {
  const auto tac = single_marker({0.02, -0.01, 0.0}, {0.001, -0.002, 0.0}, -0.0005);
  const Wrench w1 = compute_wrench(tac, Pose{}, {1.0});
  const Wrench w2 = compute_wrench(tac, Pose{}, {2.0});
  CHECK((w2.force - 2.0 * w1.force).norm() == 0.0);
  CHECK((w2.torque - 2.0 * w1.torque).norm() == 0.0);
}

TEST_CASE("calibrate: identity, pure ratio, and the zero error") {
  Wrench a;
  a.force = {0, 0, 1};
  Wrench b;
  b.force = {0, 0, 2.5};
  CHECK(calibrate(a, a).scale == doctest::Approx(1.0));
  CHECK(calibrate(a, b).scale == doctest::Approx(2.5));
  CHECK_THROWS_AS(calibrate(Wrench{}, b), ValidationError);
}

TEST_CASE("contact_gate: override threshold and the strict inequality") {
  std::vector<TactileState> series;
  for (int t = 0; t < 4; ++t)
    series.push_back(single_marker({0, 0, 0}, Eigen::Vector3d::Zero(), 0.0));
  GateConfig cfg;
  cfg.threshold_override = 0.001;
  const auto flags = contact_gate(series, cfg);
  for (bool f : flags) CHECK_FALSE(f);

  // Statistic exactly at the threshold stays out of contact.
  series[2].marker_displacements[0] = {0.001, 0, 0};
  CHECK_FALSE(contact_gate(series, cfg)[2]);
}

TEST_CASE("contact_gate: mean + 3 sigma rule, hand-evaluated") {
  std::vector<TactileState> series;
  for (double s : {0.0001, 0.0001, 0.005})
    series.push_back(single_marker({0, 0, 0}, {s, 0, 0}, 0.0));
  GateConfig cfg;
  cfg.noise_window_begin = 0;
  cfg.noise_window_end = 2;
  const auto flags = contact_gate(series, cfg);
  CHECK_FALSE(flags[0]);
  CHECK_FALSE(flags[1]);
  CHECK(flags[2]);
}

TEST_CASE("contact_gate: empty noise window without override rejected") {
  std::vector<TactileState> series{single_marker({0, 0, 0}, {0, 0, 0}, 0.0)};
  GateConfig cfg;
  cfg.noise_window_begin = 0;
  cfg.noise_window_end = 0;
  CHECK_THROWS_AS(contact_gate(series, cfg), ConfigError);
}

TEST_CASE("contact_gate: constant offset cancels against a shifted override") {
  std::vector<double> stats{0.001, 0.004, 0.002};
  auto run = [](const std::vector<double>& s, double thr) {
    std::vector<TactileState> series;
    for (double v : s) series.push_back(single_marker({0, 0, 0}, {v, 0, 0}, 0.0));
    GateConfig cfg;
    cfg.threshold_override = thr;
    return contact_gate(series, cfg);
  };
  const double offset = 0.01;
  std::vector<double> shifted = stats;
  for (auto& v : shifted) v += offset;
  CHECK(run(stats, 0.0025) == run(shifted, 0.0025 + offset));
}

TEST_CASE("filter_episode keeps marker layout and rebuilds history") {
  std::vector<Frame> frames;
  for (int t = 0; t < 10; ++t) {
    Frame fr = cfield::testing::make_frame(4, 4, 0.1 * t);
    for (auto& d : fr.tactile.marker_displacements) d = {1e-4 * t, 0, 0};
    for (auto& d : fr.tactile.depth) d = t > 4 ? -0.01 : 0.0;
    frames.push_back(fr);
  }
  FilterConfig cfg;
  const auto out = filter_episode(frames, cfg);
  REQUIRE(out.size() == frames.size());
  for (const auto& fr : out) fr.validate();
  // Current-step x slot of the rebuilt history carries the filtered dx.
  CHECK(out.back().tactile.displacement_history[0][3 * (kHistorySteps - 1)] != 0.0);
}
