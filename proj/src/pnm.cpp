#include "crackpot/pnm.hpp"

#include <cstdio>
#include <fstream>

namespace crackpot {

namespace {

bool is_pnm_space(int c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

// Skips whitespace and '#' comments, then reads one unsigned decimal token.
int read_header_int(std::ifstream& in, const std::string& path, const char* what) {
    int c = in.get();
    while (c != EOF && (is_pnm_space(c) || c == '#')) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        }
        c = in.get();
    }
    if (c == EOF || c < '0' || c > '9')
        throw FormatError("pnm.read: " + path + ": expected " + std::string(what));
    long value = 0;
    while (c >= '0' && c <= '9') {
        value = value * 10 + (c - '0');
        if (value > 1 << 30)
            throw FormatError("pnm.read: " + path + ": " + std::string(what) + " out of range");
        c = in.get();
    }
    if (c != EOF) in.unget();
    return static_cast<int>(value);
}

}  // namespace

Image read_pnm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw NotFoundError("pnm.read: cannot open " + path);

    char m0 = 0, m1 = 0;
    in.get(m0);
    in.get(m1);
    int channels;
    if (m0 == 'P' && m1 == '5') channels = 1;
    else if (m0 == 'P' && m1 == '6') channels = 3;
    else throw FormatError("pnm.read: " + path + ": bad magic, expected P5 or P6");

    const int width = read_header_int(in, path, "width");
    const int height = read_header_int(in, path, "height");
    const int maxval = read_header_int(in, path, "maxval");
    if (maxval != 255)
        throw FormatError("pnm.read: " + path + ": maxval must be 255");
    const int sep = in.get();
    if (sep == EOF || !is_pnm_space(sep))
        throw FormatError("pnm.read: " + path + ": expected single whitespace after maxval");

    Image img = Image::make(width, height, channels);
    in.read(reinterpret_cast<char*>(img.data.data()), static_cast<std::streamsize>(img.data.size()));
    if (static_cast<std::size_t>(in.gcount()) != img.data.size())
        throw FormatError("pnm.read: " + path + ": truncated pixel data");
    return img;
}

void write_pnm(const std::string& path, const Image& img) {
    if (img.channels != 1 && img.channels != 3)
        throw InvalidParameterError("pnm.write: channels must be 1 or 3");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw NotFoundError("pnm.write: cannot open " + path);
    char header[64];
    const int len = std::snprintf(header, sizeof(header), "%s\n%d %d\n255\n",
                                  img.channels == 1 ? "P5" : "P6", img.width, img.height);
    out.write(header, len);
    out.write(reinterpret_cast<const char*>(img.data.data()),
              static_cast<std::streamsize>(img.data.size()));
    if (!out)
        throw FormatError("pnm.write: " + path + ": write failed");
}

BinaryMask read_mask_pnm(const std::string& path) {
    const Image img = read_pnm(path);
    if (img.channels != 1)
        throw FormatError("pnm.read_mask: " + path + ": mask files must be P5");
    BinaryMask mask = BinaryMask::make(img.width, img.height);
    for (std::size_t i = 0; i < mask.bits.size(); ++i) mask.bits[i] = img.data[i] >= 128 ? 1 : 0;
    return mask;
}

void write_mask_pnm(const std::string& path, const BinaryMask& mask) {
    Image img = Image::make(mask.width, mask.height, 1);
    for (std::size_t i = 0; i < mask.bits.size(); ++i) img.data[i] = mask.bits[i] ? 255 : 0;
    write_pnm(path, img);
}

}  // namespace crackpot
