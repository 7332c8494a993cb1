#include "nsad/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

namespace nsad {

void NamedTensors::put(std::string name, Tensor t) {
    for (auto& [n, existing] : items_) {
        if (n == name) {
            existing = std::move(t);
            return;
        }
    }
    items_.emplace_back(std::move(name), std::move(t));
}

const Tensor* NamedTensors::find(const std::string& name) const {
    for (const auto& [n, t] : items_)
        if (n == name) return &t;
    return nullptr;
}

const Tensor& NamedTensors::get(const std::string& name) const {
    const Tensor* t = find(name);
    if (!t) throw DataError("checkpoint is missing tensor '" + name + "'");
    return *t;
}

namespace {

void put_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ostream& os, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), 8);
}

void put_f64(std::ostream& os, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    put_u64(os, bits);
}

bool get_u32(std::istream& is, std::uint32_t& v) {
    unsigned char b[4];
    if (!is.read(reinterpret_cast<char*>(b), 4)) return false;
    v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return true;
}

std::uint64_t get_u64(std::istream& is) {
    unsigned char b[8];
    if (!is.read(reinterpret_cast<char*>(b), 8))
        throw DataError("checkpoint truncated");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

double get_f64(std::istream& is) {
    std::uint64_t bits = get_u64(is);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

} // namespace

void save_tensors(const std::string& path, const NamedTensors& tensors) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw DataError("cannot open '" + path + "' for writing");
    os.write("NSAD", 4);
    put_u32(os, kCheckpointVersion);
    for (const auto& [name, t] : tensors.items()) {
        put_u32(os, static_cast<std::uint32_t>(name.size()));
        os.write(name.data(), static_cast<std::streamsize>(name.size()));
        put_u32(os, static_cast<std::uint32_t>(t.rank()));
        for (std::size_t d : t.shape()) put_u64(os, d);
        for (double v : t.values()) put_f64(os, v);
    }
    if (!os) throw DataError("write failed for '" + path + "'");
}

NamedTensors load_tensors(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError("cannot open '" + path + "'");
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, "NSAD", 4) != 0)
        throw DataError("'" + path + "' is not a checkpoint (bad magic)");
    std::uint32_t version = 0;
    if (!get_u32(is, version) || version != kCheckpointVersion)
        throw DataError("'" + path + "': unsupported checkpoint version");

    NamedTensors out;
    std::uint32_t name_len = 0;
    while (get_u32(is, name_len)) {
        std::string name(name_len, '\0');
        if (!is.read(name.data(), name_len)) throw DataError("checkpoint truncated in name");
        std::uint32_t rank = 0;
        if (!get_u32(is, rank)) throw DataError("checkpoint truncated in rank");
        std::vector<std::size_t> shape(rank);
        std::size_t n = 1;
        for (std::uint32_t i = 0; i < rank; ++i) {
            shape[i] = static_cast<std::size_t>(get_u64(is));
            n *= shape[i];
        }
        std::vector<double> values(n);
        for (std::size_t i = 0; i < n; ++i) values[i] = get_f64(is);
        out.put(std::move(name), Tensor::from(std::move(shape), std::move(values)));
    }
    return out;
}

} // namespace nsad
