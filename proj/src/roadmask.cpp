#include "crackpot/roadmask.hpp"

#include <algorithm>
#include <vector>

#include "crackpot/pnm.hpp"

namespace crackpot {

namespace {

std::string substitute_index(const std::string& pattern, int frame_index) {
    const std::string needle = "{index}";
    const std::size_t pos = pattern.find(needle);
    if (pos == std::string::npos)
        throw InvalidParameterError("roadmask.mask_for_frame: file pattern lacks {index}");
    std::string path = pattern;
    path.replace(pos, needle.size(), std::to_string(frame_index));
    return path;
}

BinaryMask trapezoid_mask(const std::array<std::array<double, 2>, 4>& corners,
                          int width, int height) {
    std::array<double, 4> px, py;
    for (int i = 0; i < 4; ++i) {
        px[i] = corners[i][0] * width;
        py[i] = corners[i][1] * height;
    }
    BinaryMask mask = BinaryMask::make(width, height);
    std::vector<double> xs;
    for (int y = 0; y < height; ++y) {
        const double cy = y + 0.5;
        xs.clear();
        for (int i = 0; i < 4; ++i) {
            const int j = (i + 1) % 4;
            if ((py[i] <= cy && cy < py[j]) || (py[j] <= cy && cy < py[i]))
                xs.push_back(px[i] + (cy - py[i]) * (px[j] - px[i]) / (py[j] - py[i]));
        }
        std::sort(xs.begin(), xs.end());
        for (int x = 0; x < width; ++x) {
            const double cx = x + 0.5;
            // even-odd rule on the pixel center: odd crossing count to the right
            std::size_t right = xs.end() - std::upper_bound(xs.begin(), xs.end(), cx);
            mask.at(x, y) = (right & 1) ? 1 : 0;
        }
    }
    return mask;
}

}  // namespace

BinaryMask mask_for_frame(const RoadMaskSource& src, int frame_index, int width, int height) {
    switch (src.kind) {
        case RoadMaskKind::FullFrame:
            return BinaryMask::make(width, height, true);
        case RoadMaskKind::FixedTrapezoid:
            return trapezoid_mask(src.corners, width, height);
        case RoadMaskKind::ExternalFile: {
            const std::string path = substitute_index(src.file_pattern, frame_index);
            BinaryMask mask = read_mask_pnm(path);
            if (mask.width != width || mask.height != height)
                throw InvalidParameterError("roadmask.mask_for_frame: " + path +
                                            ": mask dimensions do not match the frame");
            return mask;
        }
    }
    throw InvalidParameterError("roadmask.mask_for_frame: unknown source kind");
}

}  // namespace crackpot
