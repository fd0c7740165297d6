#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cfield/types.hpp"

namespace cfield {

struct FilterConfig {
  bool spatial_enabled = true;
  double spatial_sigma = 0.25;  // grid-cell units
  bool temporal_enabled = true;
  int sg_window = 7;
  int sg_polyorder = 1;
  bool phase_smoothing_enabled = true;
  double depth_threshold = -0.002;  // m; frame in contact iff depth below this

  void validate() const;
};

/// Reads a filter config from a JSON file mirroring the tactile-filtering
/// key layout: spatial.{enabled,sigma}, temporal.{enabled,window_length,
/// polyorder}, contact_smoothing.enabled, depth_threshold.
FilterConfig read_filter_config(const std::string& path);

struct CalibrationScale {
  double scale = 1.0;
};

struct GateConfig {
  int noise_window_begin = 0;  // [begin, end) declared contact-free
  int noise_window_end = 0;
  double k_sigma = 3.0;
  std::optional<double> threshold_override;
};

// Marker force model: displacement -> force gains (N/m). The absolute values
// are a stand-in; the calibration scale absorbs overall magnitude error.
inline constexpr double kShearGain = 20.0;
inline constexpr double kNormalGain = 500.0;

/// 2D Gaussian smoothing of one grid channel. Kernel truncated at radius
/// ceil(4*sigma), renormalized; reflect boundary handling.
Eigen::MatrixXd spatial_filter(const Eigen::MatrixXd& grid, double sigma);

/// Savitzky-Golay smoothing: each sample replaced by the center value of the
/// least-squares polynomial fit over the window. Boundary samples fit on the
/// truncated one-sided window.
std::vector<double> savitzky_golay(const std::vector<double>& series, int window,
                                   int polyorder);

/// Replaces the pre-contact prefix with a linear ramp from the prefix median
/// to the first contact value, and the post-contact suffix with a ramp from
/// the last contact value to the suffix median. Contact iff
/// depth < cfg.depth_threshold. A series with no contact frames collapses to
/// its median.
std::vector<double> phase_smooth(const std::vector<double>& series,
                                 const std::vector<double>& depth,
                                 const FilterConfig& cfg);

/// Net wrench about the gripper origin from the linear marker force model,
/// scaled by the calibration factor. Displacements and depth are read in the
/// sensor frame (taken to coincide with the gripper frame); marker world
/// positions supply the lever arms.
Wrench compute_wrench(const TactileState& tactile, const Pose& gripper_pose,
                      const CalibrationScale& cal);

/// Scalar alignment of the observed wrench magnitude to a reference, on the
/// mixed-unit 6-vector norm.
CalibrationScale calibrate(const Wrench& observed, const Wrench& reference);

/// Per-frame contact flags: statistic = mean marker displacement norm;
/// threshold = mean + k_sigma * std over the declared noise window (or the
/// override); in contact iff statistic strictly exceeds the threshold.
std::vector<bool> contact_gate(const std::vector<TactileState>& series,
                               const GateConfig& cfg);

/// Full per-episode tactile post-processing: per-frame spatial smoothing of
/// the marker grids, temporal Savitzky-Golay per marker channel, and
/// contact-phase smoothing keyed on the per-frame minimum depth. Histories
/// are rebuilt from the filtered displacements.
std::vector<Frame> filter_episode(const std::vector<Frame>& frames,
                                  const FilterConfig& cfg);

}  // namespace cfield
