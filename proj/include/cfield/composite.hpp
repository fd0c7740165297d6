#pragma once

#include <cstdint>
#include <vector>

#include "cfield/types.hpp"

namespace cfield {

/// Deterministic farthest-point subsampling. The start point is picked by a
/// seeded RNG; the greedy sweep afterwards is fully determined by it. When
/// count exceeds the cloud size, indices repeat cyclically.
std::vector<int> farthest_point_sample(const std::vector<Eigen::Vector3d>& points,
                                       int count, std::uint64_t seed);

/// Assembles the unified network input for one frame: subsampled tool and
/// environment points plus all tactile markers, each row carrying
/// [type_code | 15 history scalars]. Deterministic (the sampler seed derives
/// from the frame timestamp).
CompositeInput assemble_composite(const Frame& frame, int sample_obj, int sample_env);

/// Shared rigid transform (Z-rotation then translation) applied to every
/// point position. Feature channels untouched.
CompositeInput apply_rigid_transform(const CompositeInput& input,
                                     const Eigen::Vector3d& translation,
                                     double angle_z);

/// Random augmentation: one shared rigid transform, per-point Gaussian
/// jitter, Gaussian noise on tactile history channels of tactile rows.
CompositeInput augment(const CompositeInput& input, const AugmentConfig& cfg);

}  // namespace cfield
