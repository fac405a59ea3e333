#pragma once

#include <array>
#include <string>

#include "crackpot/image.hpp"

namespace crackpot {

enum class RoadMaskKind { FullFrame, ExternalFile, FixedTrapezoid };

// Where road masks come from. The segmentation network that produced them is
// external to this project; we only consume its output (or an analytic stand-in).
struct RoadMaskSource {
    RoadMaskKind kind = RoadMaskKind::FullFrame;

    // ExternalFile: path pattern containing "{index}", substituted with the
    // zero-based frame index. Files are P5 PGM; samples >= 128 count as road.
    std::string file_pattern;

    // FixedTrapezoid: four corners as (x, y) fractions of frame width/height,
    // in polygon order.
    std::array<std::array<double, 2>, 4> corners{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
};

// Produces the road mask for one frame at the requested dimensions.
BinaryMask mask_for_frame(const RoadMaskSource& src, int frame_index, int width, int height);

}  // namespace crackpot
