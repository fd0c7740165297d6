#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cfield/sim_labeling.hpp"
#include "cfield/types.hpp"

namespace cfield {

enum class ToolShape { scraper, crayon };

struct SynthConfig {
  ToolShape shape = ToolShape::scraper;
  // Tool geometry (m).
  double blade_length = 0.08;
  double blade_thickness = 0.005;
  double blade_height = 0.03;
  double handle_length = 0.10;
  // Episode schedule.
  double approach_depth = 0.002;  // penetration below the table during press
  double slide_length = 0.05;
  int n_frames = 30;
  double press_force = 2.0;  // N, total normal load while pressed
  double table_z = 0.0;
  // Noise.
  double point_sigma = 0.0;   // m, Gaussian on tool/env points
  double marker_sigma = 0.0;  // relative (fraction of rms clean displacement)
  std::uint64_t rng_seed = 0;

  void validate() const;
};

SynthConfig read_synth_config(const std::string& path);

struct SynthEpisode {
  std::vector<Frame> frames;  // labels carry the analytic soft-contact GT
  std::vector<ContactField> ground_truth;
  std::vector<std::vector<SparseContact>> contacts;  // per frame
  // Analytic binary contact set (tool point indices at/below the table).
  std::vector<std::vector<int>> contact_indices;
  std::vector<Wrench> injected_wrench;  // gripper frame, zero when free
};

/// Procedural scraping episode against the plane z = table_z with exact
/// analytic ground truth. Tactile marker displacements are synthesized by
/// inverting the marker force model, so compute_wrench reproduces the
/// injected wrench exactly at zero noise. Deterministic under rng_seed.
SynthEpisode generate_episode(const SynthConfig& cfg);

}  // namespace cfield
