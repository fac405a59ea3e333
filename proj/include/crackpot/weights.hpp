#pragma once

#include <string>
#include <utility>
#include <vector>

#include "crackpot/network.hpp"

namespace crackpot {

// One record of the weight container format.
struct NamedTensor {
    std::string name;
    std::vector<int> shape;
    std::vector<float> values;
};

// Container format (all integers little-endian):
//   magic "CPOT" | u32 version = 1 | u32 tensor count
//   per tensor: u16 name length | name bytes | u8 rank | rank * u32 extents |
//               product(extents) * f32 values, row-major.
void write_tensor_file(const std::string& path, const std::vector<NamedTensor>& tensors);
std::vector<NamedTensor> read_tensor_file(const std::string& path);

// Network persistence on top of the container: a "config" pseudo-tensor of the
// 12 NetworkConfig integers comes first, followed by the parameter tensors in
// canonical order. Round-trips are bit-exact.
void save_weights(const std::string& path, const NetworkParams& params, const NetworkConfig& cfg);
std::pair<NetworkParams, NetworkConfig> load_weights(const std::string& path);

}  // namespace crackpot
