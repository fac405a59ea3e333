#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "crackpot/image.hpp"

namespace crackpot {

// One training/evaluation sample: a square patch and its class.
struct LabeledPatch {
    Image pixels;
    int label = 0;  // 1 = crack, 0 = crack-free
};

// Index-based split of a loaded patch set. Parts are disjoint and together
// cover the full set.
struct DatasetSplit {
    std::vector<int> train, val, test;
    std::uint32_t seed = 0;
};

// Loads `<root>/crack/*.pgm|*.ppm` (label 1) followed by
// `<root>/nocrack/*.pgm|*.ppm` (label 0), each directory in lexicographic
// file order.
std::vector<LabeledPatch> load_patch_dataset(const std::string& root);

// Seeded shuffle-and-partition into train/val/test index lists.
DatasetSplit split_dataset(std::size_t count, double train_frac, double val_frac,
                           std::uint32_t seed);

}  // namespace crackpot
