#pragma once

#include <cstdint>
#include <vector>

#include "crackpot/error.hpp"

namespace crackpot {

// 8-bit raster, row-major, interleaved samples when channels == 3.
struct Image {
    int width = 0;
    int height = 0;
    int channels = 1;  // 1 or 3
    std::vector<std::uint8_t> data;

    static Image make(int width, int height, int channels, std::uint8_t fill = 0) {
        if (width < 0 || height < 0 || (channels != 1 && channels != 3))
            throw InvalidParameterError("imgproc.Image: channels must be 1 or 3");
        Image img;
        img.width = width;
        img.height = height;
        img.channels = channels;
        img.data.assign(static_cast<std::size_t>(width) * height * channels, fill);
        return img;
    }

    std::uint8_t& at(int x, int y, int c = 0) {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    std::uint8_t at(int x, int y, int c = 0) const {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }

    bool same_dims(const Image& o) const {
        return width == o.width && height == o.height && channels == o.channels;
    }
};

// One boolean per pixel, row-major. Stored as 0/1 bytes.
struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;

    static BinaryMask make(int width, int height, bool fill = false) {
        BinaryMask m;
        m.width = width;
        m.height = height;
        m.bits.assign(static_cast<std::size_t>(width) * height, fill ? 1 : 0);
        return m;
    }

    std::uint8_t& at(int x, int y) { return bits[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t at(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x]; }

    std::size_t count() const {
        std::size_t n = 0;
        for (std::uint8_t b : bits) n += b;
        return n;
    }
};

// Axis-aligned pixel rectangle; (x, y) is the top-left corner.
struct BoundingBox {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;

    long long area() const { return static_cast<long long>(w) * h; }
    int right() const { return x + w; }    // exclusive
    int bottom() const { return y + h; }   // exclusive

    bool contains(const BoundingBox& o) const {
        return o.x >= x && o.y >= y && o.right() <= right() && o.bottom() <= bottom();
    }
    bool intersects(const BoundingBox& o) const {
        return o.x < right() && x < o.right() && o.y < bottom() && y < o.bottom();
    }
    bool operator==(const BoundingBox& o) const {
        return x == o.x && y == o.y && w == o.w && h == o.h;
    }
};

// A contour-derived region resized to the classifier's square input size.
struct CandidatePatch {
    BoundingBox source_box;
    Image pixels;
};

}  // namespace crackpot
