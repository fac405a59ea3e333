#include "crackpot/dataset.hpp"

#include <algorithm>
#include <filesystem>
#include <random>

#include "crackpot/pnm.hpp"

namespace fs = std::filesystem;

namespace crackpot {

namespace {

void load_dir(const fs::path& dir, int label, std::vector<LabeledPatch>& out) {
    if (!fs::is_directory(dir))
        throw NotFoundError("dataeval.load_patch_dataset: missing subdirectory " + dir.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string ext = entry.path().extension().string();
        if (ext == ".pgm" || ext == ".ppm") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const fs::path& f : files) {
        LabeledPatch patch;
        try {
            patch.pixels = read_pnm(f.string());
        } catch (const FormatError& e) {
            throw FormatError("dataeval.load_patch_dataset: " + f.string() + ": " + e.what());
        }
        patch.label = label;
        out.push_back(std::move(patch));
    }
}

}  // namespace

std::vector<LabeledPatch> load_patch_dataset(const std::string& root) {
    std::vector<LabeledPatch> patches;
    load_dir(fs::path(root) / "crack", 1, patches);
    load_dir(fs::path(root) / "nocrack", 0, patches);
    return patches;
}

DatasetSplit split_dataset(std::size_t count, double train_frac, double val_frac,
                           std::uint32_t seed) {
    if (train_frac < 0 || val_frac < 0 || train_frac + val_frac > 1.0)
        throw InvalidParameterError("dataeval.split_dataset: fractions must be in [0,1] and sum <= 1");
    std::vector<int> idx(count);
    for (std::size_t i = 0; i < count; ++i) idx[i] = static_cast<int>(i);
    std::mt19937 gen(seed);
    for (std::size_t i = 0; i + 1 < count; ++i) {
        const std::size_t j = i + gen() % (count - i);
        std::swap(idx[i], idx[j]);
    }
    DatasetSplit split;
    split.seed = seed;
    const std::size_t n_train = static_cast<std::size_t>(train_frac * double(count));
    const std::size_t n_val = static_cast<std::size_t>(val_frac * double(count));
    split.train.assign(idx.begin(), idx.begin() + n_train);
    split.val.assign(idx.begin() + n_train, idx.begin() + std::min(count, n_train + n_val));
    split.test.assign(idx.begin() + std::min(count, n_train + n_val), idx.end());
    return split;
}

}  // namespace crackpot
