#include "cfield/force_opt.hpp"

#include <cmath>

#include "cfield/common.hpp"

namespace cfield {

namespace {

constexpr double kSqrt3 = 1.7320508075688772;

// Cross-product matrix [p]x.
Eigen::Matrix3d skew(const Eigen::Vector3d& p) {
  Eigen::Matrix3d m;
  m << 0, -p.z(), p.y(), p.z(), 0, -p.x(), -p.y(), p.x(), 0;
  return m;
}

// Grasp matrix with torque rows scaled by 1/L_c, and the matching target.
Eigen::MatrixXd scaled_grasp(const std::vector<SocpCandidate>& candidates) {
  const int n = static_cast<int>(candidates.size());
  Eigen::MatrixXd g(6, 3 * n);
  for (int i = 0; i < n; ++i) {
    g.block<3, 3>(0, 3 * i) = Eigen::Matrix3d::Identity();
    g.block<3, 3>(3, 3 * i) = skew(candidates[i].position) / kCharacteristicLength;
  }
  return g;
}

Eigen::Matrix<double, 6, 1> scaled_wrench(const Wrench& w) {
  Eigen::Matrix<double, 6, 1> v;
  v << w.force, w.torque / kCharacteristicLength;
  return v;
}

Eigen::VectorXd flatten(const std::vector<Eigen::Vector3d>& forces) {
  Eigen::VectorXd f(3 * forces.size());
  for (std::size_t i = 0; i < forces.size(); ++i) f.segment<3>(3 * i) = forces[i];
  return f;
}

std::vector<Eigen::Vector3d> unflatten(const Eigen::VectorXd& f) {
  std::vector<Eigen::Vector3d> out(f.size() / 3);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f.segment<3>(3 * i);
  return out;
}

Eigen::VectorXd reg_weights(const SocpProblem& p) {
  Eigen::VectorXd w(p.candidates.size());
  for (std::size_t i = 0; i < p.candidates.size(); ++i)
    w(i) = p.reg_lambda / (p.candidates[i].prob + p.reg_eps);
  return w;
}

// Gradient of the objective at f: 2 G^T (G f - W) + 2 Lambda f.
Eigen::VectorXd objective_gradient(const Eigen::MatrixXd& g,
                                   const Eigen::Matrix<double, 6, 1>& w,
                                   const Eigen::VectorXd& reg,
                                   const Eigen::VectorXd& f) {
  Eigen::VectorXd grad = 2.0 * g.transpose() * (g * f - w);
  for (Eigen::Index i = 0; i < reg.size(); ++i)
    grad.segment<3>(3 * i) += 2.0 * reg(i) * f.segment<3>(3 * i);
  return grad;
}

double projected_gradient_norm(const SocpProblem& problem,
                               const Eigen::MatrixXd& g,
                               const Eigen::Matrix<double, 6, 1>& w,
                               const Eigen::VectorXd& reg,
                               const Eigen::VectorXd& f) {
  const Eigen::VectorXd grad = objective_gradient(g, w, reg, f);
  double acc = 0;
  for (std::size_t i = 0; i < problem.candidates.size(); ++i) {
    const Eigen::Vector3d step = f.segment<3>(3 * i) - grad.segment<3>(3 * i);
    const Eigen::Vector3d proj = cone_project(step, problem.candidates[i].normal);
    acc += (f.segment<3>(3 * i) - proj).squaredNorm();
  }
  return std::sqrt(acc);
}

}  // namespace

void SocpProblem::validate() const {
  if (candidates.empty()) throw ValidationError("socp: needs at least one candidate");
  for (const auto& c : candidates) {
    if (std::abs(c.normal.norm() - 1.0) > 1e-6)
      throw ValidationError("socp: candidate normal not unit");
    if (!(c.prob >= 0.0 && c.prob <= 1.0))
      throw ValidationError("socp: candidate prob outside [0,1]");
  }
  if (reg_lambda < 0 || reg_eps <= 0)
    throw ValidationError("socp: lambda must be >= 0 and eps > 0");
}

Eigen::MatrixXd grasp_matrix(const std::vector<Eigen::Vector3d>& positions) {
  if (positions.empty()) throw ValidationError("grasp_matrix: no candidates");
  const int n = static_cast<int>(positions.size());
  Eigen::MatrixXd g(6, 3 * n);
  for (int i = 0; i < n; ++i) {
    g.block<3, 3>(0, 3 * i) = Eigen::Matrix3d::Identity();
    g.block<3, 3>(3, 3 * i) = skew(positions[i]);
  }
  return g;
}

Eigen::Vector3d cone_project(const Eigen::Vector3d& v, const Eigen::Vector3d& n) {
  const double a = v.dot(n);
  const Eigen::Vector3d tangential = v - a * n;
  const double b = tangential.norm();
  if (b <= kSqrt3 * a) return v;            // inside the cone
  if (b <= -a / kSqrt3) return Eigen::Vector3d::Zero();  // inside the polar cone
  const double a_star = (a + kSqrt3 * b) / 4.0;
  return a_star * n + (kSqrt3 * a_star / b) * tangential;
}

double socp_objective(const SocpProblem& problem,
                      const std::vector<Eigen::Vector3d>& forces) {
  const Eigen::MatrixXd g = scaled_grasp(problem.candidates);
  const Eigen::Matrix<double, 6, 1> w = scaled_wrench(problem.target);
  const Eigen::VectorXd f = flatten(forces);
  const Eigen::VectorXd reg = reg_weights(problem);
  double obj = (g * f - w).squaredNorm();
  for (Eigen::Index i = 0; i < reg.size(); ++i)
    obj += reg(i) * f.segment<3>(3 * i).squaredNorm();
  return obj;
}

SocpSolution solve(const SocpProblem& problem, const SolverConfig& cfg,
                   const std::vector<Eigen::Vector3d>* warm_start) {
  problem.validate();
  if (cfg.rho <= 0 || cfg.tol_primal <= 0 || cfg.tol_dual <= 0)
    throw ConfigError("socp solver: rho and tolerances must be > 0");

  const int n = static_cast<int>(problem.candidates.size());
  const int dim = 3 * n;
  const Eigen::MatrixXd g = scaled_grasp(problem.candidates);
  const Eigen::Matrix<double, 6, 1> w = scaled_wrench(problem.target);
  const Eigen::VectorXd reg = reg_weights(problem);

  Eigen::MatrixXd a = 2.0 * g.transpose() * g;
  for (int i = 0; i < n; ++i)
    a.block<3, 3>(3 * i, 3 * i) +=
        (2.0 * reg(i) + cfg.rho) * Eigen::Matrix3d::Identity();
  Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
  if (ldlt.info() != Eigen::Success)
    throw SolverError("socp solver: normal equations not factorizable");
  const Eigen::VectorXd b_const = 2.0 * g.transpose() * w;

  Eigen::VectorXd z = warm_start ? flatten(*warm_start)
                                 : Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(dim);

  SocpSolution sol;
  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    const Eigen::VectorXd f = ldlt.solve(b_const + cfg.rho * (z - u));
    const Eigen::VectorXd f_hat =
        cfg.over_relaxation * f + (1.0 - cfg.over_relaxation) * z;
    Eigen::VectorXd z_new(dim);
    for (int i = 0; i < n; ++i)
      z_new.segment<3>(3 * i) = cone_project(
          f_hat.segment<3>(3 * i) + u.segment<3>(3 * i), problem.candidates[i].normal);
    u += f_hat - z_new;

    const double primal = (f - z_new).norm();
    const double dual = cfg.rho * (z_new - z).norm();
    z = z_new;
    sol.iterations = iter;
    if (primal < cfg.tol_primal && dual < cfg.tol_dual) {
      sol.converged = true;
      break;
    }
  }

  sol.forces = unflatten(z);
  sol.objective = socp_objective(problem, sol.forces);
  sol.wrench_residual = (g * z - w).norm();
  sol.kkt_residual = projected_gradient_norm(problem, g, w, reg, z);
  return sol;
}

VerificationReport verify(const SocpProblem& problem,
                          const std::vector<Eigen::Vector3d>& forces) {
  problem.validate();
  if (forces.size() != problem.candidates.size())
    throw ValidationError("verify: force count != candidate count");

  const Eigen::MatrixXd g = scaled_grasp(problem.candidates);
  const Eigen::Matrix<double, 6, 1> w = scaled_wrench(problem.target);
  const Eigen::VectorXd reg = reg_weights(problem);
  const Eigen::VectorXd f = flatten(forces);

  VerificationReport report;
  for (std::size_t i = 0; i < forces.size(); ++i) {
    const double gap =
        forces[i].norm() - 2.0 * forces[i].dot(problem.candidates[i].normal);
    report.feasibility_gap = std::max(report.feasibility_gap, gap);
  }
  report.feasibility_gap = std::max(report.feasibility_gap, 0.0);
  report.kkt_residual = projected_gradient_norm(problem, g, w, reg, f);
  report.wrench_residual = (g * f - w).norm();
  report.objective = socp_objective(problem, forces);
  return report;
}

}  // namespace cfield
