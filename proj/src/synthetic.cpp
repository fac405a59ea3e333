#include "crackpot/synthetic.hpp"

#include <algorithm>
#include <cmath>

namespace crackpot {

namespace {

// [lo, hi] inclusive, uniform from the raw mt19937 stream
int rand_range(std::mt19937& gen, int lo, int hi) {
    return lo + static_cast<int>(gen() % static_cast<std::uint32_t>(hi - lo + 1));
}

struct Extent {
    int minx = 1 << 30, miny = 1 << 30, maxx = -1, maxy = -1;
    void add(int x, int y) {
        minx = std::min(minx, x);
        miny = std::min(miny, y);
        maxx = std::max(maxx, x);
        maxy = std::max(maxy, y);
    }
    bool empty() const { return maxx < 0; }
};

void stamp_disc(Image& img, int cx, int cy, int radius, std::uint8_t value, Extent& ext) {
    for (int y = cy - radius; y <= cy + radius; ++y) {
        if (y < 0 || y >= img.height) continue;
        for (int x = cx - radius; x <= cx + radius; ++x) {
            if (x < 0 || x >= img.width) continue;
            if ((x - cx) * (x - cx) + (y - cy) * (y - cy) > radius * radius) continue;
            img.at(x, y) = value;
            ext.add(x, y);
        }
    }
}

void draw_thick_segment(Image& img, int x0, int y0, int x1, int y1, int radius,
                        std::uint8_t value, Extent& ext) {
    const int steps = std::max(std::abs(x1 - x0), std::abs(y1 - y0));
    for (int s = 0; s <= steps; ++s) {
        const double t = steps == 0 ? 0.0 : double(s) / steps;
        const int x = static_cast<int>(std::lround(x0 + t * (x1 - x0)));
        const int y = static_cast<int>(std::lround(y0 + t * (y1 - y0)));
        stamp_disc(img, x, y, radius, value, ext);
    }
}

// Jagged random-walk polyline across the image, clamped to the given margin.
Extent draw_polyline(Image& img, std::mt19937& gen, int margin, int segments, int seg_len_lo,
                     int seg_len_hi, int radius, std::uint8_t value) {
    const int w = img.width, h = img.height;
    int x = rand_range(gen, margin, std::max(margin, w / 3));
    int y = rand_range(gen, margin, h - 1 - margin);
    Extent ext;
    double heading = (rand_range(gen, -30, 30)) * 3.14159265358979 / 180.0;
    for (int s = 0; s < segments; ++s) {
        const int len = rand_range(gen, seg_len_lo, seg_len_hi);
        heading += rand_range(gen, -55, 55) * 3.14159265358979 / 180.0;
        int nx = x + static_cast<int>(std::lround(len * std::cos(heading)));
        int ny = y + static_cast<int>(std::lround(len * std::sin(heading)));
        nx = std::clamp(nx, margin, w - 1 - margin);
        ny = std::clamp(ny, margin, h - 1 - margin);
        draw_thick_segment(img, x, y, nx, ny, radius, value, ext);
        x = nx;
        y = ny;
    }
    return ext;
}

Image noisy_background(std::mt19937& gen, int width, int height, int base_lo, int base_hi,
                       int noise) {
    Image img = Image::make(width, height, 1);
    const int base = rand_range(gen, base_lo, base_hi);
    for (auto& v : img.data) {
        const int sample = base + rand_range(gen, -noise, noise);
        v = static_cast<std::uint8_t>(std::clamp(sample, 0, 255));
    }
    return img;
}

}  // namespace

Image make_clean_frame(int width, int height, std::uint8_t value) {
    return Image::make(width, height, 1, value);
}

SyntheticFrame make_crack_frame(std::mt19937& gen, int width, int height) {
    SyntheticFrame out;
    // noise +-5 keeps post-blur gradients far below the default Canny low
    out.frame = noisy_background(gen, width, height, 150, 200, 5);
    const std::uint8_t dark = static_cast<std::uint8_t>(rand_range(gen, 20, 60));
    const int radius = rand_range(gen, 3, 4);  // stroke thickness 7-9 px
    const Extent ext = draw_polyline(out.frame, gen, 24, rand_range(gen, 4, 7), 40, 80,
                                     radius, dark);
    out.crack_box = {ext.minx, ext.miny, ext.maxx - ext.minx + 1, ext.maxy - ext.miny + 1};
    return out;
}

Image make_crack_patch(std::mt19937& gen, int size) {
    Image img = noisy_background(gen, size, size, 150, 200, 10);
    const std::uint8_t dark = static_cast<std::uint8_t>(rand_range(gen, 20, 70));
    const int radius = rand_range(gen, 0, 1);  // stroke thickness 1-3 px
    draw_polyline(img, gen, 2, rand_range(gen, 3, 6), size / 4, size / 2, radius, dark);
    return img;
}

Image make_clean_patch(std::mt19937& gen, int size) {
    return noisy_background(gen, size, size, 150, 200, 10);
}

std::vector<LabeledPatch> make_patch_set(int per_class, int size, std::uint32_t seed) {
    std::mt19937 gen(seed);
    std::vector<LabeledPatch> set;
    set.reserve(static_cast<std::size_t>(2 * per_class));
    for (int i = 0; i < per_class; ++i) set.push_back({make_crack_patch(gen, size), 1});
    for (int i = 0; i < per_class; ++i) set.push_back({make_clean_patch(gen, size), 0});
    return set;
}

}  // namespace crackpot
