#pragma once

#include <cstddef>
#include <string>

#include "xrt/geometry.hpp"
#include "xrt/inversion.hpp"

namespace xrt {

/// Sidecar fields stored next to a raw volume.
struct VolumeMetadata {
    Branch branch = Branch::xray;
    double normalization = 1.0;
    std::size_t quadrature_count = 0;
    double diff_step = 0.0;
};

/// Writes `<stem>.raw` (float32 little-endian, x fastest) and `<stem>.json`
/// with dims, spacing, origin and the reconstruction settings.
void write_volume(const std::string& stem, const VolumeGrid& vol, const VolumeMetadata& meta);

/// Reads a volume written by write_volume. Samples come back as the
/// float32 values widened to double.
VolumeGrid read_volume(const std::string& stem, VolumeMetadata* meta = nullptr);

}  // namespace xrt
