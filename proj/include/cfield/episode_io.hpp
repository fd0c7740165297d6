#pragma once

#include <string>
#include <vector>

#include "cfield/types.hpp"

namespace cfield {

/// Reads a JSONL episode file (one frame object per line), returned in time
/// order. Displacement histories are reconstructed (zero-padded) when the
/// file does not carry them.
std::vector<Frame> read_episode(const std::string& path);

/// Writes frames as JSONL with full double precision (round-trip exact).
void write_episode(const std::string& path, const std::vector<Frame>& frames);

/// Rebuilds each frame's displacement_history from the displacement sequence,
/// zero-padded at episode start. Frames must share a marker layout.
void rebuild_history(std::vector<Frame>& frames);

std::vector<ContactField> read_fields(const std::string& path);
void write_fields(const std::string& path, const std::vector<ContactField>& fields);

/// ASCII PLY export of one frame's tool points with per-point probability and
/// force, for visualization tools.
void export_ply(const std::string& path,
                const std::vector<Eigen::Vector3d>& points,
                const ContactField& field);

}  // namespace cfield
