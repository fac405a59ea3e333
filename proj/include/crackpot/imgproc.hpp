#pragma once

#include <vector>

#include "crackpot/image.hpp"

namespace crackpot {

// Weighted 8-bit grayscale reduction: round(0.299 R + 0.587 G + 0.114 B).
// 1-channel input is returned unchanged.
Image to_grayscale(const Image& img);

// Separable Gaussian smoothing, clamp-to-edge borders, normalized kernel.
// The intermediate pass is kept in doubles; quantization happens once at the end.
Image gaussian_blur(const Image& img, double sigma, int radius);

// Optional view into canny_edges internals, filled when a caller passes one.
struct CannyDebug {
    int width = 0;
    int height = 0;
    std::vector<int> magnitude;       // L1 Sobel magnitude of the blurred image
    std::vector<std::uint8_t> nms;    // 1 where a pixel survived non-maximum suppression
};

// Canny edge detector, fixed variant:
//   Gaussian(sigma=1.4, radius=2) -> Sobel 3x3 -> L1 magnitude ->
//   4-direction non-maximum suppression -> 8-connected hysteresis.
// The 1-pixel image border is never an edge.
BinaryMask canny_edges(const Image& img, int low, int high, CannyDebug* debug = nullptr);

// Morphological dilation with a full 3x3 square element, applied `iterations`
// times. Neighborhoods are truncated at the borders.
BinaryMask dilate(const BinaryMask& mask, int iterations);

// Per-bit AND of two equally sized masks.
BinaryMask mask_and(const BinaryMask& a, const BinaryMask& b);

// Tight bounding boxes of 8-connected components with pixel count >= min_area,
// sorted by (y, x) of the top-left corner. min_area below 1 behaves as 1.
std::vector<BoundingBox> extract_boxes(const BinaryMask& mask, int min_area);

// Crop `box` out of `img` and resize it to out_size x out_size with bilinear
// interpolation over half-pixel centers. Channels are preserved; a crop whose
// box already measures out_size x out_size is copied exactly.
CandidatePatch crop_resize(const Image& img, const BoundingBox& box, int out_size);

}  // namespace crackpot
