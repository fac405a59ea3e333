#include "crackpot/weights.hpp"

#include <bit>
#include <cstdint>
#include <fstream>

namespace crackpot {

namespace {

constexpr char kMagic[4] = {'C', 'P', 'O', 'T'};
constexpr std::uint32_t kVersion = 1;

class Writer {
public:
    explicit Writer(const std::string& path) : out_(path, std::ios::binary | std::ios::trunc) {
        if (!out_) throw NotFoundError("neuralnet.save_weights: cannot open " + path);
    }
    void bytes(const void* p, std::size_t n) {
        out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
    }
    void u8(std::uint8_t v) { bytes(&v, 1); }
    void u16(std::uint16_t v) {
        const std::uint8_t b[2] = {std::uint8_t(v & 0xff), std::uint8_t(v >> 8)};
        bytes(b, 2);
    }
    void u32(std::uint32_t v) {
        const std::uint8_t b[4] = {std::uint8_t(v & 0xff), std::uint8_t((v >> 8) & 0xff),
                                   std::uint8_t((v >> 16) & 0xff), std::uint8_t(v >> 24)};
        bytes(b, 4);
    }
    void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
    bool ok() const { return bool(out_); }

private:
    std::ofstream out_;
};

class Reader {
public:
    explicit Reader(const std::string& path) : in_(path, std::ios::binary), path_(path) {
        if (!in_) throw NotFoundError("neuralnet.load_weights: cannot open " + path);
    }
    long long offset() const { return offset_; }
    void bytes(void* p, std::size_t n, const char* what) {
        in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in_.gcount()) != n)
            throw FormatError("neuralnet.load_weights: " + path_ + ": truncated " + what, offset_);
        offset_ += static_cast<long long>(n);
    }
    std::uint8_t u8(const char* what) {
        std::uint8_t v;
        bytes(&v, 1, what);
        return v;
    }
    std::uint16_t u16(const char* what) {
        std::uint8_t b[2];
        bytes(b, 2, what);
        return std::uint16_t(b[0] | (b[1] << 8));
    }
    std::uint32_t u32(const char* what) {
        std::uint8_t b[4];
        bytes(b, 4, what);
        return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) | (std::uint32_t(b[2]) << 16) |
               (std::uint32_t(b[3]) << 24);
    }
    float f32(const char* what) { return std::bit_cast<float>(u32(what)); }
    const std::string& path() const { return path_; }

private:
    std::ifstream in_;
    std::string path_;
    long long offset_ = 0;
};

}  // namespace

void write_tensor_file(const std::string& path, const std::vector<NamedTensor>& tensors) {
    Writer w(path);
    w.bytes(kMagic, 4);
    w.u32(kVersion);
    w.u32(static_cast<std::uint32_t>(tensors.size()));
    for (const NamedTensor& t : tensors) {
        if (t.name.size() > 0xffff)
            throw InvalidParameterError("neuralnet.save_weights: tensor name too long");
        if (t.shape.empty() || t.shape.size() > 255)
            throw InvalidParameterError("neuralnet.save_weights: rank must be 1..255");
        std::size_t n = 1;
        for (int e : t.shape) n *= static_cast<std::size_t>(e);
        if (n != t.values.size())
            throw InvalidParameterError("neuralnet.save_weights: extents do not match value count");
        w.u16(static_cast<std::uint16_t>(t.name.size()));
        w.bytes(t.name.data(), t.name.size());
        w.u8(static_cast<std::uint8_t>(t.shape.size()));
        for (int e : t.shape) w.u32(static_cast<std::uint32_t>(e));
        for (float v : t.values) w.f32(v);
    }
    if (!w.ok()) throw FormatError("neuralnet.save_weights: " + path + ": write failed");
}

std::vector<NamedTensor> read_tensor_file(const std::string& path) {
    Reader r(path);
    char magic[4];
    r.bytes(magic, 4, "magic");
    if (magic[0] != 'C' || magic[1] != 'P' || magic[2] != 'O' || magic[3] != 'T')
        throw FormatError("neuralnet.load_weights: " + path + ": bad magic", 0);
    const std::uint32_t version = r.u32("version");
    if (version != kVersion)
        throw FormatError("neuralnet.load_weights: " + path + ": unsupported version " +
                              std::to_string(version),
                          4);
    const std::uint32_t count = r.u32("tensor count");

    std::vector<NamedTensor> tensors;
    tensors.reserve(count);
    for (std::uint32_t ti = 0; ti < count; ++ti) {
        NamedTensor t;
        const std::uint16_t name_len = r.u16("name length");
        t.name.resize(name_len);
        r.bytes(t.name.data(), name_len, "name");
        const std::uint8_t rank = r.u8("rank");
        if (rank == 0)
            throw FormatError("neuralnet.load_weights: " + path + ": rank 0 tensor " + t.name,
                              r.offset() - 1);
        std::size_t n = 1;
        for (int d = 0; d < rank; ++d) {
            const std::uint32_t extent = r.u32("extent");
            if (extent == 0 || extent > (1u << 28) || n > (1u << 28))
                throw FormatError("neuralnet.load_weights: " + path + ": implausible extent in " +
                                      t.name,
                                  r.offset() - 4);
            t.shape.push_back(static_cast<int>(extent));
            n *= extent;
        }
        t.values.resize(n);
        for (std::size_t i = 0; i < n; ++i) t.values[i] = r.f32("values");
        tensors.push_back(std::move(t));
    }
    return tensors;
}

void save_weights(const std::string& path, const NetworkParams& params, const NetworkConfig& cfg) {
    std::vector<NamedTensor> tensors;
    NamedTensor config;
    config.name = "config";
    config.shape = {12};
    for (int v : cfg.to_ints()) config.values.push_back(static_cast<float>(v));
    tensors.push_back(std::move(config));

    params.for_each([&](const char* name, const Tensor& t) {
        tensors.push_back(NamedTensor{name, t.shape, t.data});
    });
    write_tensor_file(path, tensors);
}

std::pair<NetworkParams, NetworkConfig> load_weights(const std::string& path) {
    const std::vector<NamedTensor> tensors = read_tensor_file(path);
    if (tensors.empty() || tensors.front().name != "config")
        throw FormatError("neuralnet.load_weights: " + path + ": missing leading config tensor");
    const NamedTensor& config = tensors.front();
    if (config.shape != std::vector<int>{12})
        throw FormatError("neuralnet.load_weights: " + path + ": config tensor must have 12 values");
    std::array<int, 12> ints;
    for (int i = 0; i < 12; ++i) ints[static_cast<std::size_t>(i)] = static_cast<int>(config.values[static_cast<std::size_t>(i)]);

    NetworkConfig cfg;
    try {
        cfg = NetworkConfig::from_ints(ints);
    } catch (const InvalidParameterError& e) {
        throw FormatError("neuralnet.load_weights: " + path + ": " + e.what());
    }

    NetworkParams params = make_params<float>(cfg);
    std::size_t cursor = 1;
    params.for_each([&](const char* name, Tensor& t) {
        if (cursor >= tensors.size())
            throw FormatError("neuralnet.load_weights: " + path + ": missing tensor " +
                              std::string(name));
        const NamedTensor& stored = tensors[cursor++];
        if (stored.name != name)
            throw FormatError("neuralnet.load_weights: " + path + ": expected tensor " +
                              std::string(name) + ", found " + stored.name);
        if (stored.shape != t.shape)
            throw FormatError("neuralnet.load_weights: " + path + ": shape of " +
                              std::string(name) + " inconsistent with config");
        t.data = stored.values;
    });
    if (cursor != tensors.size())
        throw FormatError("neuralnet.load_weights: " + path + ": unexpected trailing tensor " +
                          tensors[cursor].name);
    return {std::move(params), cfg};
}

}  // namespace crackpot
