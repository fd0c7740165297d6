#pragma once

#include <vector>

#include "cfield/force_opt.hpp"
#include "cfield/tactile.hpp"
#include "cfield/types.hpp"

namespace cfield {

struct HeuristicConfig {
  double epsilon_height = 0.004;  // m, candidate band above the table
  GateConfig gate;

  void validate() const {
    if (epsilon_height <= 0)
      throw ConfigError("heuristic: epsilon_height must be > 0");
  }
};

/// Per-tool-point heuristic contact probability from table proximity:
/// c = clamp(1 - (p_z - table_z) / eps_h, 0, 1) for points below
/// table_z + eps_h, zero elsewhere. A frame gated out of contact gets all
/// zeros. Forces are zero (filled in by the solver stage).
ContactField heuristic_contact(const Frame& frame, const HeuristicConfig& cfg,
                               bool gated_in_contact);

struct SocpBuild {
  SocpProblem problem;
  std::vector<int> tool_indices;  // candidate -> tool point index
};

/// Assembles the force problem over points with positive heuristic
/// probability: positions and normals transformed world -> gripper frame,
/// invalid-normal points dropped. Throws ValidationError when no candidates
/// survive.
SocpBuild build_socp(const Frame& frame, const ContactField& probs,
                     const Wrench& wrench, double reg_lambda, double reg_eps);

struct FrameDiagnostics {
  bool gated_in_contact = false;
  int candidate_count = 0;
  bool solver_converged = true;
  bool skipped = false;  // gated in contact but no geometric candidates
  double wrench_residual = 0.0;
  double feasibility_gap = 0.0;
};

struct RealLabelResult {
  std::vector<ContactField> fields;
  std::vector<FrameDiagnostics> diagnostics;
};

/// Full pseudo-ground-truth pipeline: tactile filtering, signal gating,
/// heuristic probabilities, wrench estimation, and the per-frame cone
/// program, with solved forces scattered back to tool-point indices.
RealLabelResult label_episode_real(const std::vector<Frame>& frames,
                                   const FilterConfig& filter_cfg,
                                   const HeuristicConfig& heur_cfg,
                                   const CalibrationScale& cal,
                                   double reg_lambda = 0.01,
                                   double reg_eps = 1e-3, int threads = 1);

}  // namespace cfield
