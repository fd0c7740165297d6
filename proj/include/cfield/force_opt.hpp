#pragma once

#include <Eigen/Dense>
#include <vector>

#include "cfield/types.hpp"

namespace cfield {

struct SocpCandidate {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();  // gripper frame, m
  Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();   // unit, inward
  double prob = 1.0;                                   // heuristic c_i in [0,1]
};

// Force distribution problem: explain the target wrench with per-candidate
// forces, regularized inversely to the heuristic contact probability,
// each force inside a 60-degree friction cone about its inward normal.
struct SocpProblem {
  std::vector<SocpCandidate> candidates;
  Wrench target;  // gripper frame
  double reg_lambda = 0.01;
  double reg_eps = 1e-3;

  void validate() const;
};

struct SolverConfig {
  double rho = 1.0;  // ADMM penalty
  int max_iters = 2000;
  double tol_primal = 1e-8;
  double tol_dual = 1e-8;
  double over_relaxation = 1.6;  // in [1, 1.9]
};

struct SocpSolution {
  std::vector<Eigen::Vector3d> forces;  // exactly cone-feasible (z iterate)
  double objective = 0.0;
  double wrench_residual = 0.0;  // ||G f - W~||, torque rows mixed by 1/L_c
  int iterations = 0;
  bool converged = false;
  double kkt_residual = 0.0;
};

struct VerificationReport {
  double feasibility_gap = 0.0;  // max_i max(0, ||f_i|| - 2 f_i.n_i)
  double kkt_residual = 0.0;
  double wrench_residual = 0.0;
  double objective = 0.0;
};

/// 6 x 3n grasp matrix: per candidate the block [I3; [p]x], so
/// G f = (sum f_i, sum p_i x f_i). Torque rows are unscaled here.
Eigen::MatrixXd grasp_matrix(const std::vector<Eigen::Vector3d>& positions);

/// Euclidean projection onto the cone {f : ||f|| <= 2 (f . n)}.
Eigen::Vector3d cone_project(const Eigen::Vector3d& v, const Eigen::Vector3d& n);

/// Objective value ||G f - W~||^2 + lambda sum ||f_i||^2 / (c_i + eps) with
/// torque rows of G and W scaled by 1/L_c.
double socp_objective(const SocpProblem& problem,
                      const std::vector<Eigen::Vector3d>& forces);

/// ADMM solve with analytic cone projections. Warm start optional.
SocpSolution solve(const SocpProblem& problem, const SolverConfig& cfg = {},
                   const std::vector<Eigen::Vector3d>* warm_start = nullptr);

/// Recomputes all certificates from scratch, independent of solver state.
VerificationReport verify(const SocpProblem& problem,
                          const std::vector<Eigen::Vector3d>& forces);

}  // namespace cfield
