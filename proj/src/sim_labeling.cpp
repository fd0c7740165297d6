#include "cfield/sim_labeling.hpp"

#include <algorithm>

namespace cfield {

double soft_contact_prob(double d, const SoftContactConfig& cfg) {
  const double clearance = std::max(d, 0.0);
  if (clearance == 0.0) return 1.0;
  return std::exp(-std::pow(clearance / cfg.length_scale(), cfg.k_sharpness));
}

std::vector<double> soft_contact_prob(const std::vector<double>& d,
                                      const SoftContactConfig& cfg) {
  cfg.validate();
  std::vector<double> out;
  out.reserve(d.size());
  for (double v : d) out.push_back(soft_contact_prob(v, cfg));
  return out;
}

namespace {

// Linear-interpolation percentile over a sorted copy.
double percentile(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  if (v.size() == 1) return v[0];
  const double rank = p / 100.0 * (v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(rank);
  if (lo + 1 >= v.size()) return v.back();
  const double frac = rank - lo;
  return v[lo] * (1.0 - frac) + v[lo + 1] * frac;
}

}  // namespace

std::vector<Eigen::Vector3d> extrapolate_forces(
    const std::vector<Eigen::Vector3d>& tool_points, const std::vector<double>& d,
    const std::vector<SparseContact>& contacts, const ExtrapolationConfig& cfg) {
  cfg.validate();
  if (tool_points.size() != d.size())
    throw ValidationError("extrapolate_forces: points/distance length mismatch");

  const std::size_t n = tool_points.size();
  std::vector<Eigen::Vector3d> out(n, Eigen::Vector3d::Zero());
  if (contacts.empty()) return out;

  for (std::size_t i = 0; i < n; ++i) {
    const double clearance = std::max(d[i], 0.0);
    const double taper = std::sqrt(std::max(0.0, 1.0 - clearance / cfg.d_thresh));
    if (taper == 0.0) continue;

    Eigen::Vector3d num = Eigen::Vector3d::Zero();
    double den = 0.0;
    for (const auto& c : contacts) {
      const double r = cfg.lambda_dist * (c.position - tool_points[i]).norm();
      const double w = 1.0 / (1.0 + r * r);
      num += w * c.magnitude * c.normal;
      den += w;
    }
    if (den < 1e-12) continue;
    out[i] = taper * num / den;
  }

  if (cfg.clip_percentile < 100.0) {
    std::vector<double> mags;
    for (const auto& f : out)
      if (f.norm() > 0) mags.push_back(f.norm());
    if (!mags.empty()) {
      const double cap = percentile(std::move(mags), cfg.clip_percentile);
      for (auto& f : out) {
        const double m = f.norm();
        if (m > cap && m > 0) f *= cap / m;
      }
    }
  }
  return out;
}

}  // namespace cfield
