#include "cfield/real_labeling.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "cfield/sdf.hpp"

namespace cfield {

ContactField heuristic_contact(const Frame& frame, const HeuristicConfig& cfg,
                               bool gated_in_contact) {
  cfg.validate();
  if (!frame.table_z)
    throw ValidationError("heuristic_contact: frame has no table_z");

  ContactField field;
  field.prob.assign(frame.tool_points.size(), 0.0);
  field.force.assign(frame.tool_points.size(), Eigen::Vector3d::Zero());
  if (!gated_in_contact) return field;

  const double table = *frame.table_z;
  for (std::size_t i = 0; i < frame.tool_points.size(); ++i) {
    const double height = frame.tool_points[i].z() - table;
    if (height < cfg.epsilon_height)
      field.prob[i] = std::clamp(1.0 - height / cfg.epsilon_height, 0.0, 1.0);
  }
  return field;
}

SocpBuild build_socp(const Frame& frame, const ContactField& probs,
                     const Wrench& wrench, double reg_lambda, double reg_eps) {
  if (probs.size() != frame.tool_points.size())
    throw ValidationError("build_socp: probs not aligned to tool points");

  // Normals: use the frame's if present, otherwise a local plane fit.
  std::vector<Eigen::Vector3d> normals;
  std::vector<bool> valid;
  if (frame.tool_normals) {
    normals = *frame.tool_normals;
    valid.assign(normals.size(), true);
  } else {
    auto est = estimate_normals(frame.tool_points);
    normals = std::move(est.normals);
    valid = std::move(est.valid);
  }

  SocpBuild build;
  build.problem.target = wrench;
  build.problem.reg_lambda = reg_lambda;
  build.problem.reg_eps = reg_eps;
  const auto& pose = frame.gripper_pose;
  for (std::size_t i = 0; i < frame.tool_points.size(); ++i) {
    if (probs.prob[i] <= 0.0 || !valid[i]) continue;
    SocpCandidate c;
    c.position = pose.to_local(frame.tool_points[i]);
    c.normal = pose.orientation.conjugate() * normals[i];
    c.prob = probs.prob[i];
    build.problem.candidates.push_back(c);
    build.tool_indices.push_back(static_cast<int>(i));
  }
  if (build.problem.candidates.empty())
    throw ValidationError("build_socp: no contact candidates");
  return build;
}

RealLabelResult label_episode_real(const std::vector<Frame>& frames,
                                   const FilterConfig& filter_cfg,
                                   const HeuristicConfig& heur_cfg,
                                   const CalibrationScale& cal,
                                   double reg_lambda, double reg_eps,
                                   int threads) {
  const std::vector<Frame> filtered = filter_episode(frames, filter_cfg);

  std::vector<TactileState> tactiles;
  tactiles.reserve(filtered.size());
  for (const auto& fr : filtered) tactiles.push_back(fr.tactile);
  const std::vector<bool> gate = contact_gate(tactiles, heur_cfg.gate);

  RealLabelResult result;
  result.fields.resize(filtered.size());
  result.diagnostics.resize(filtered.size());

  auto process = [&](std::size_t t) {
    const Frame& fr = filtered[t];
    auto& diag = result.diagnostics[t];
    diag.gated_in_contact = gate[t];
    ContactField field = heuristic_contact(fr, heur_cfg, gate[t]);
    if (gate[t]) {
      try {
        const Wrench wrench = compute_wrench(fr.tactile, fr.gripper_pose, cal);
        SocpBuild build = build_socp(fr, field, wrench, reg_lambda, reg_eps);
        diag.candidate_count = static_cast<int>(build.problem.candidates.size());
        const SocpSolution sol = solve(build.problem);
        diag.solver_converged = sol.converged;
        diag.wrench_residual = sol.wrench_residual;
        const auto report = verify(build.problem, sol.forces);
        diag.feasibility_gap = report.feasibility_gap;
        // Scatter solved forces (gripper frame) back to world-frame tool
        // point slots.
        for (std::size_t k = 0; k < build.tool_indices.size(); ++k)
          field.force[build.tool_indices[k]] =
              fr.gripper_pose.orientation * sol.forces[k];
      } catch (const ValidationError&) {
        // Gate fired but no geometric candidates survived: emit zeros and
        // flag the frame instead of failing the episode.
        diag.skipped = true;
        field.prob.assign(fr.tool_points.size(), 0.0);
        field.force.assign(fr.tool_points.size(), Eigen::Vector3d::Zero());
      }
    }
    result.fields[t] = std::move(field);
  };

  const std::size_t n = filtered.size();
  if (threads <= 1 || n < 2) {
    for (std::size_t t = 0; t < n; ++t) process(t);
  } else {
    const int workers = std::min<std::size_t>(threads, n);
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t t = w; t < n; t += workers) process(t);
      });
    for (auto& th : pool) th.join();
  }
  return result;
}

}  // namespace cfield
