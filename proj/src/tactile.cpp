#include "cfield/tactile.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>

#include "cfield/episode_io.hpp"

namespace cfield {

using nlohmann::json;

void FilterConfig::validate() const {
  if (spatial_sigma <= 0) throw ConfigError("filter: spatial_sigma must be > 0");
  if (sg_window % 2 == 0 || sg_window <= sg_polyorder)
    throw ConfigError("filter: sg_window must be odd and > polyorder");
}

FilterConfig read_filter_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open filter config: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  FilterConfig cfg;
  if (j.contains("spatial")) {
    const auto& s = j["spatial"];
    cfg.spatial_enabled = s.value("enabled", cfg.spatial_enabled);
    cfg.spatial_sigma = s.value("sigma", cfg.spatial_sigma);
  }
  if (j.contains("temporal")) {
    const auto& t = j["temporal"];
    cfg.temporal_enabled = t.value("enabled", cfg.temporal_enabled);
    cfg.sg_window = t.value("window_length", cfg.sg_window);
    cfg.sg_polyorder = t.value("polyorder", cfg.sg_polyorder);
  }
  if (j.contains("contact_smoothing"))
    cfg.phase_smoothing_enabled =
        j["contact_smoothing"].value("enabled", cfg.phase_smoothing_enabled);
  cfg.depth_threshold = j.value("depth_threshold", cfg.depth_threshold);
  cfg.validate();
  return cfg;
}

Eigen::MatrixXd spatial_filter(const Eigen::MatrixXd& grid, double sigma) {
  if (sigma <= 0) throw ConfigError("spatial_filter: sigma must be > 0");
  const int radius = static_cast<int>(std::ceil(4.0 * sigma));
  Eigen::VectorXd kernel(2 * radius + 1);
  for (int k = -radius; k <= radius; ++k)
    kernel(k + radius) = std::exp(-0.5 * (k / sigma) * (k / sigma));
  kernel /= kernel.sum();

  // Reflect index into [0, n): ... 2 1 0 | 0 1 2 ... n-1 | n-1 n-2 ...
  auto reflect = [](int i, int n) {
    while (i < 0 || i >= n) {
      if (i < 0) i = -i - 1;
      if (i >= n) i = 2 * n - i - 1;
    }
    return i;
  };

  const int rows = static_cast<int>(grid.rows());
  const int cols = static_cast<int>(grid.cols());
  Eigen::MatrixXd tmp(rows, cols), out(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      double acc = 0;
      for (int k = -radius; k <= radius; ++k)
        acc += kernel(k + radius) * grid(reflect(r + k, rows), c);
      tmp(r, c) = acc;
    }
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      double acc = 0;
      for (int k = -radius; k <= radius; ++k)
        acc += kernel(k + radius) * tmp(r, reflect(c + k, cols));
      out(r, c) = acc;
    }
  return out;
}

std::vector<double> savitzky_golay(const std::vector<double>& series, int window,
                                   int polyorder) {
  if (window % 2 == 0 || window <= polyorder)
    throw ConfigError("savitzky_golay: window must be odd and > polyorder");
  const int n = static_cast<int>(series.size());
  if (n < window)
    throw ValidationError("savitzky_golay: series shorter than window");

  const int half = window / 2;
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - half);
    const int hi = std::min(n - 1, i + half);
    const int m = hi - lo + 1;
    const int order = std::min(polyorder, m - 1);
    Eigen::MatrixXd van(m, order + 1);
    Eigen::VectorXd y(m);
    for (int j = 0; j < m; ++j) {
      const double x = lo + j - i;  // offset from evaluation point
      double pw = 1.0;
      for (int p = 0; p <= order; ++p) {
        van(j, p) = pw;
        pw *= x;
      }
      y(j) = series[lo + j];
    }
    // Fit value at offset 0 is the constant coefficient.
    out[i] = van.colPivHouseholderQr().solve(y)(0);
  }
  return out;
}

namespace {

double median(std::vector<double> v) {
  const std::size_t n = v.size();
  std::nth_element(v.begin(), v.begin() + n / 2, v.end());
  double hi = v[n / 2];
  if (n % 2 == 1) return hi;
  std::nth_element(v.begin(), v.begin() + n / 2 - 1, v.end());
  return 0.5 * (v[n / 2 - 1] + hi);
}

}  // namespace

std::vector<double> phase_smooth(const std::vector<double>& series,
                                 const std::vector<double>& depth,
                                 const FilterConfig& cfg) {
  if (series.size() != depth.size())
    throw ValidationError("phase_smooth: series/depth length mismatch");
  const int n = static_cast<int>(series.size());
  if (n == 0) return {};

  int first = -1, last = -1;
  for (int i = 0; i < n; ++i) {
    if (depth[i] < cfg.depth_threshold) {
      if (first < 0) first = i;
      last = i;
    }
  }

  std::vector<double> out = series;
  if (first < 0) {
    // No contact anywhere: the whole episode is one drift phase.
    const double m = median(series);
    std::fill(out.begin(), out.end(), m);
    return out;
  }
  if (first > 0) {
    const double m = median(std::vector<double>(series.begin(), series.begin() + first));
    for (int i = 0; i < first; ++i)
      out[i] = m + (series[first] - m) * static_cast<double>(i) / first;
  }
  if (last < n - 1) {
    const double m = median(std::vector<double>(series.begin() + last + 1, series.end()));
    for (int i = last + 1; i < n; ++i)
      out[i] = series[last] + (m - series[last]) *
                                  static_cast<double>(i - last) / (n - 1 - last);
  }
  return out;
}

Wrench compute_wrench(const TactileState& tactile, const Pose& gripper_pose,
                      const CalibrationScale& cal) {
  if (tactile.depth.size() != static_cast<std::size_t>(tactile.marker_count()))
    throw ValidationError("compute_wrench: missing depth channel");
  tactile.validate();

  Wrench w;
  for (int i = 0; i < tactile.marker_count(); ++i) {
    const auto& d = tactile.marker_displacements[i];
    const Eigen::Vector3d f = cal.scale * Eigen::Vector3d(kShearGain * d.x(),
                                                          kShearGain * d.y(),
                                                          kNormalGain * (-tactile.depth[i]));
    const Eigen::Vector3d r = gripper_pose.to_local(tactile.marker_positions[i]);
    w.force += f;
    w.torque += r.cross(f);
  }
  return w;
}

CalibrationScale calibrate(const Wrench& observed, const Wrench& reference) {
  const double denom = observed.mixed_norm();
  if (denom <= 0)
    throw ValidationError("calibrate: observed wrench is zero");
  return {reference.mixed_norm() / denom};
}

std::vector<bool> contact_gate(const std::vector<TactileState>& series,
                               const GateConfig& cfg) {
  if (cfg.k_sigma <= 0) throw ConfigError("contact_gate: k_sigma must be > 0");
  const int n = static_cast<int>(series.size());
  std::vector<double> stat(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double acc = 0;
    for (const auto& d : series[i].marker_displacements) acc += d.norm();
    stat[i] = series[i].marker_displacements.empty()
                  ? 0.0
                  : acc / series[i].marker_displacements.size();
  }

  double threshold;
  if (cfg.threshold_override) {
    threshold = *cfg.threshold_override;
  } else {
    if (cfg.noise_window_begin < 0 || cfg.noise_window_end > n ||
        cfg.noise_window_begin >= cfg.noise_window_end)
      throw ConfigError("contact_gate: empty or invalid noise window");
    const int m = cfg.noise_window_end - cfg.noise_window_begin;
    double mean = 0;
    for (int i = cfg.noise_window_begin; i < cfg.noise_window_end; ++i) mean += stat[i];
    mean /= m;
    double var = 0;
    for (int i = cfg.noise_window_begin; i < cfg.noise_window_end; ++i)
      var += (stat[i] - mean) * (stat[i] - mean);
    threshold = mean + cfg.k_sigma * std::sqrt(var / m);
  }

  std::vector<bool> flags(n);
  for (int i = 0; i < n; ++i) flags[i] = stat[i] > threshold;
  return flags;
}

std::vector<Frame> filter_episode(const std::vector<Frame>& frames,
                                  const FilterConfig& cfg) {
  cfg.validate();
  std::vector<Frame> out = frames;
  if (out.empty()) return out;

  const auto& tac0 = out.front().tactile;
  const int sensors = tac0.sensor_count;
  const int rows = tac0.grid_rows;
  const int cols = tac0.grid_cols;
  const int per = rows * cols;
  const int markers = tac0.marker_count();
  const int n = static_cast<int>(out.size());

  if (cfg.spatial_enabled) {
    for (auto& fr : out) {
      auto& tac = fr.tactile;
      for (int s = 0; s < sensors; ++s) {
        for (int ch = 0; ch < 4; ++ch) {  // dx, dy, dz, depth
          Eigen::MatrixXd grid(rows, cols);
          for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) {
              const int i = s * per + r * cols + c;
              grid(r, c) = ch < 3 ? tac.marker_displacements[i](ch) : tac.depth[i];
            }
          grid = spatial_filter(grid, cfg.spatial_sigma);
          for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) {
              const int i = s * per + r * cols + c;
              if (ch < 3)
                tac.marker_displacements[i](ch) = grid(r, c);
              else
                tac.depth[i] = grid(r, c);
            }
        }
      }
    }
  }

  auto channel = [&](int marker, int ch) {
    std::vector<double> series(n);
    for (int t = 0; t < n; ++t)
      series[t] = ch < 3 ? out[t].tactile.marker_displacements[marker](ch)
                         : out[t].tactile.depth[marker];
    return series;
  };
  auto store = [&](int marker, int ch, const std::vector<double>& series) {
    for (int t = 0; t < n; ++t) {
      if (ch < 3)
        out[t].tactile.marker_displacements[marker](ch) = series[t];
      else
        out[t].tactile.depth[marker] = series[t];
    }
  };

  if (cfg.temporal_enabled && n >= cfg.sg_window) {
    for (int m = 0; m < markers; ++m)
      for (int ch = 0; ch < 4; ++ch)
        store(m, ch, savitzky_golay(channel(m, ch), cfg.sg_window, cfg.sg_polyorder));
  }

  if (cfg.phase_smoothing_enabled) {
    std::vector<double> min_depth(n);
    for (int t = 0; t < n; ++t) {
      const auto& d = out[t].tactile.depth;
      min_depth[t] = d.empty() ? 0.0 : *std::min_element(d.begin(), d.end());
    }
    for (int m = 0; m < markers; ++m)
      for (int ch = 0; ch < 3; ++ch)
        store(m, ch, phase_smooth(channel(m, ch), min_depth, cfg));
  }

  rebuild_history(out);
  return out;
}

}  // namespace cfield
