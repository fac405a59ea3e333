#include "crackpot/imgproc.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace crackpot {

namespace {

inline int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

}  // namespace

Image to_grayscale(const Image& img) {
    if (img.channels != 1 && img.channels != 3)
        throw InvalidParameterError("imgproc.to_grayscale: channels must be 1 or 3");
    if (img.channels == 1) return img;

    Image out = Image::make(img.width, img.height, 1);
    const std::size_t n = static_cast<std::size_t>(img.width) * img.height;
    for (std::size_t i = 0; i < n; ++i) {
        const int r = img.data[i * 3 + 0];
        const int g = img.data[i * 3 + 1];
        const int b = img.data[i * 3 + 2];
        // round(0.299 R + 0.587 G + 0.114 B), exact in integer arithmetic
        out.data[i] = static_cast<std::uint8_t>((299 * r + 587 * g + 114 * b + 500) / 1000);
    }
    return out;
}

Image gaussian_blur(const Image& img, double sigma, int radius) {
    if (img.channels != 1)
        throw InvalidParameterError("imgproc.gaussian_blur: 1-channel input required");
    if (sigma <= 0.0)
        throw InvalidParameterError("imgproc.gaussian_blur: sigma must be positive");
    if (radius < 1)
        throw InvalidParameterError("imgproc.gaussian_blur: radius must be >= 1");

    std::vector<double> kernel(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        kernel[i + radius] = std::exp(-(double(i) * i) / (2.0 * sigma * sigma));
        sum += kernel[i + radius];
    }
    for (double& k : kernel) k /= sum;

    const int w = img.width, h = img.height;
    std::vector<double> tmp(static_cast<std::size_t>(w) * h);
    // horizontal pass
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i)
                acc += kernel[i + radius] * img.at(clampi(x + i, 0, w - 1), y);
            tmp[static_cast<std::size_t>(y) * w + x] = acc;
        }
    }
    // vertical pass + quantization
    Image out = Image::make(w, h, 1);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i)
                acc += kernel[i + radius] * tmp[static_cast<std::size_t>(clampi(y + i, 0, h - 1)) * w + x];
            out.at(x, y) = static_cast<std::uint8_t>(std::lround(acc));
        }
    }
    return out;
}

BinaryMask canny_edges(const Image& img, int low, int high, CannyDebug* debug) {
    if (img.channels != 1)
        throw InvalidParameterError("imgproc.canny_edges: 1-channel input required");
    if (low >= high)
        throw InvalidParameterError("imgproc.canny_edges: low must be < high");

    const Image blurred = gaussian_blur(img, 1.4, 2);
    const int w = img.width, h = img.height;
    const std::size_t n = static_cast<std::size_t>(w) * h;

    std::vector<int> gx(n, 0), gy(n, 0), mag(n, 0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            auto px = [&](int dx, int dy) {
                return int(blurred.at(clampi(x + dx, 0, w - 1), clampi(y + dy, 0, h - 1)));
            };
            const int sx = -px(-1, -1) + px(1, -1) - 2 * px(-1, 0) + 2 * px(1, 0) - px(-1, 1) + px(1, 1);
            const int sy = -px(-1, -1) - 2 * px(0, -1) - px(1, -1) + px(-1, 1) + 2 * px(0, 1) + px(1, 1);
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            gx[i] = sx;
            gy[i] = sy;
            mag[i] = std::abs(sx) + std::abs(sy);
        }
    }

    // Non-maximum suppression along the quantized gradient direction.
    // Ties break toward the lower-index pixel: keep iff strictly greater than
    // the neighbor at +offset and at least equal to the one at -offset.
    constexpr double kTan22 = 0.41421356237309503;  // tan(22.5 deg)
    constexpr double kTan67 = 2.414213562373095;    // tan(67.5 deg)
    std::vector<std::uint8_t> nms(n, 0);
    for (int y = 1; y < h - 1; ++y) {
        for (int x = 1; x < w - 1; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            const int m = mag[i];
            if (m <= 0) continue;
            const double ax = std::abs(double(gx[i]));
            const double ay = std::abs(double(gy[i]));
            int dx, dy;
            if (ay < kTan22 * ax) {
                dx = 1; dy = 0;
            } else if (ay > kTan67 * ax) {
                dx = 0; dy = 1;
            } else if ((gx[i] >= 0) == (gy[i] >= 0)) {
                dx = 1; dy = 1;
            } else {
                dx = 1; dy = -1;
            }
            const int fwd = mag[static_cast<std::size_t>(y + dy) * w + (x + dx)];
            const int bwd = mag[static_cast<std::size_t>(y - dy) * w + (x - dx)];
            if (m > fwd && m >= bwd) nms[i] = 1;
        }
    }

    // Hysteresis: strong seeds (mag >= high) grow through weak survivors
    // (mag >= low) over 8-connectivity.
    BinaryMask out = BinaryMask::make(w, h);
    std::vector<std::size_t> stack;
    for (int y = 1; y < h - 1; ++y) {
        for (int x = 1; x < w - 1; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            if (nms[i] && mag[i] >= high && !out.bits[i]) {
                out.bits[i] = 1;
                stack.push_back(i);
                while (!stack.empty()) {
                    const std::size_t j = stack.back();
                    stack.pop_back();
                    const int jx = static_cast<int>(j % w), jy = static_cast<int>(j / w);
                    for (int ny = jy - 1; ny <= jy + 1; ++ny) {
                        for (int nx = jx - 1; nx <= jx + 1; ++nx) {
                            if (nx < 1 || nx >= w - 1 || ny < 1 || ny >= h - 1) continue;
                            const std::size_t k = static_cast<std::size_t>(ny) * w + nx;
                            if (!out.bits[k] && nms[k] && mag[k] >= low) {
                                out.bits[k] = 1;
                                stack.push_back(k);
                            }
                        }
                    }
                }
            }
        }
    }

    if (debug) {
        debug->width = w;
        debug->height = h;
        debug->magnitude = std::move(mag);
        debug->nms = std::move(nms);
    }
    return out;
}

BinaryMask dilate(const BinaryMask& mask, int iterations) {
    if (iterations < 0)
        throw InvalidParameterError("imgproc.dilate: iterations must be >= 0");
    const int w = mask.width, h = mask.height;
    BinaryMask cur = mask;
    BinaryMask tmp = BinaryMask::make(w, h);
    for (int it = 0; it < iterations; ++it) {
        // 3x3 square dilation separates into a horizontal and a vertical pass
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                std::uint8_t v = cur.at(x, y);
                if (x > 0) v |= cur.at(x - 1, y);
                if (x < w - 1) v |= cur.at(x + 1, y);
                tmp.at(x, y) = v;
            }
        }
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                std::uint8_t v = tmp.at(x, y);
                if (y > 0) v |= tmp.at(x, y - 1);
                if (y < h - 1) v |= tmp.at(x, y + 1);
                cur.at(x, y) = v;
            }
        }
    }
    return cur;
}

BinaryMask mask_and(const BinaryMask& a, const BinaryMask& b) {
    if (a.width != b.width || a.height != b.height)
        throw InvalidParameterError("imgproc.mask_and: mask dimensions differ");
    BinaryMask out = BinaryMask::make(a.width, a.height);
    for (std::size_t i = 0; i < out.bits.size(); ++i) out.bits[i] = a.bits[i] & b.bits[i];
    return out;
}

std::vector<BoundingBox> extract_boxes(const BinaryMask& mask, int min_area) {
    if (min_area < 1) min_area = 1;
    const int w = mask.width, h = mask.height;
    std::vector<std::uint8_t> visited(mask.bits.size(), 0);
    std::vector<BoundingBox> boxes;
    std::vector<std::size_t> stack;

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t start = static_cast<std::size_t>(y) * w + x;
            if (!mask.bits[start] || visited[start]) continue;
            int minx = x, maxx = x, miny = y, maxy = y;
            long long count = 0;
            visited[start] = 1;
            stack.push_back(start);
            while (!stack.empty()) {
                const std::size_t j = stack.back();
                stack.pop_back();
                ++count;
                const int jx = static_cast<int>(j % w), jy = static_cast<int>(j / w);
                minx = std::min(minx, jx);
                maxx = std::max(maxx, jx);
                miny = std::min(miny, jy);
                maxy = std::max(maxy, jy);
                for (int ny = std::max(0, jy - 1); ny <= std::min(h - 1, jy + 1); ++ny) {
                    for (int nx = std::max(0, jx - 1); nx <= std::min(w - 1, jx + 1); ++nx) {
                        const std::size_t k = static_cast<std::size_t>(ny) * w + nx;
                        if (mask.bits[k] && !visited[k]) {
                            visited[k] = 1;
                            stack.push_back(k);
                        }
                    }
                }
            }
            if (count >= min_area)
                boxes.push_back({minx, miny, maxx - minx + 1, maxy - miny + 1});
        }
    }
    std::sort(boxes.begin(), boxes.end(), [](const BoundingBox& a, const BoundingBox& b) {
        return a.y != b.y ? a.y < b.y : a.x < b.x;
    });
    return boxes;
}

CandidatePatch crop_resize(const Image& img, const BoundingBox& box, int out_size) {
    if (out_size < 1)
        throw InvalidParameterError("imgproc.crop_resize: out_size must be >= 1");
    if (box.w < 1 || box.h < 1 || box.x < 0 || box.y < 0 ||
        box.right() > img.width || box.bottom() > img.height)
        throw InvalidParameterError("imgproc.crop_resize: box exceeds image bounds");

    CandidatePatch patch;
    patch.source_box = box;
    patch.pixels = Image::make(out_size, out_size, img.channels);

    // Half-pixel-center mapping: out pixel o samples source (o + 0.5)*scale - 0.5.
    const double sx = double(box.w) / out_size;
    const double sy = double(box.h) / out_size;
    std::vector<int> x0(out_size), x1(out_size);
    std::vector<double> fx(out_size);
    for (int ox = 0; ox < out_size; ++ox) {
        double u = (ox + 0.5) * sx - 0.5;
        u = std::clamp(u, 0.0, double(box.w - 1));
        x0[ox] = static_cast<int>(std::floor(u));
        x1[ox] = std::min(x0[ox] + 1, box.w - 1);
        fx[ox] = u - x0[ox];
    }
    for (int oy = 0; oy < out_size; ++oy) {
        double v = (oy + 0.5) * sy - 0.5;
        v = std::clamp(v, 0.0, double(box.h - 1));
        const int y0 = static_cast<int>(std::floor(v));
        const int y1 = std::min(y0 + 1, box.h - 1);
        const double gy = v - y0;
        for (int ox = 0; ox < out_size; ++ox) {
            for (int c = 0; c < img.channels; ++c) {
                const double p00 = img.at(box.x + x0[ox], box.y + y0, c);
                const double p10 = img.at(box.x + x1[ox], box.y + y0, c);
                const double p01 = img.at(box.x + x0[ox], box.y + y1, c);
                const double p11 = img.at(box.x + x1[ox], box.y + y1, c);
                const double top = p00 + fx[ox] * (p10 - p00);
                const double bot = p01 + fx[ox] * (p11 - p01);
                patch.pixels.at(ox, oy, c) =
                    static_cast<std::uint8_t>(std::lround(top + gy * (bot - top)));
            }
        }
    }
    return patch;
}

}  // namespace crackpot
