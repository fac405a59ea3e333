#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "crackpot/dataset.hpp"
#include "crackpot/image.hpp"

namespace crackpot {

// Synthetic frame with one dark jagged polyline and its tight pixel extent.
struct SyntheticFrame {
    Image frame;
    BoundingBox crack_box;
};

// Flat frame with no defects (constant texture).
Image make_clean_frame(int width, int height, std::uint8_t value = 170);

// Bright mildly-noisy road surface with one thick dark polyline crack.
// Noise amplitude stays below the edge-detector thresholds so the polyline is
// the only candidate source.
SyntheticFrame make_crack_frame(std::mt19937& gen, int width, int height);

// Patch-scale textured samples matching what candidate crops look like after
// resizing: noisy bright background, with (crack) or without (clean) a thin
// dark polyline.
Image make_crack_patch(std::mt19937& gen, int size);
Image make_clean_patch(std::mt19937& gen, int size);

// Balanced labeled set: `per_class` cracks then `per_class` clean patches.
std::vector<LabeledPatch> make_patch_set(int per_class, int size, std::uint32_t seed);

}  // namespace crackpot
