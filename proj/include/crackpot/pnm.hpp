#pragma once

#include <string>

#include "crackpot/image.hpp"

namespace crackpot {

// Binary netpbm I/O: P5 (1 channel) and P6 (3 channels), maxval 255.
// Writers emit exactly one whitespace byte after each header token.
Image read_pnm(const std::string& path);
void write_pnm(const std::string& path, const Image& img);

// Masks travel as P5 with samples {0, 255}; on read any sample >= 128 is true.
BinaryMask read_mask_pnm(const std::string& path);
void write_mask_pnm(const std::string& path, const BinaryMask& mask);

}  // namespace crackpot
