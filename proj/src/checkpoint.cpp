#include "ganbench/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include "ganbench/errors.hpp"

namespace ganbench {

namespace {

constexpr char kMagic[4] = {'G', 'B', 'C', 'K'};

template <typename T>
void put(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw CorruptCheckpoint("checkpoint: unexpected end of file");
    return v;
}

void put_string(std::ostream& os, const std::string& s) {
    put<std::uint32_t>(os, static_cast<std::uint32_t>(s.size()));
    os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_string(std::istream& is) {
    const auto len = get<std::uint32_t>(is);
    std::string s(len, '\0');
    is.read(s.data(), len);
    if (!is) throw CorruptCheckpoint("checkpoint: truncated string");
    return s;
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IOError("checkpoint: cannot open for writing: " + path.string());
    os.write(kMagic, 4);
    put<std::uint32_t>(os, Checkpoint::kVersion);
    put<std::int64_t>(os, ckpt.epoch);

    put<std::uint32_t>(os, static_cast<std::uint32_t>(ckpt.meta.size()));
    for (const auto& [k, v] : ckpt.meta) {
        put_string(os, k);
        put_string(os, v);
    }

    put<std::uint32_t>(os, static_cast<std::uint32_t>(ckpt.tensors.size()));
    for (const auto& [name, t] : ckpt.tensors) {
        put_string(os, name);
        put<std::uint32_t>(os, static_cast<std::uint32_t>(t.shape.size()));
        for (int d : t.shape) put<std::int32_t>(os, d);
        os.write(reinterpret_cast<const char*>(t.data.data()),
                 static_cast<std::streamsize>(t.size() * sizeof(double)));
    }
    if (!os) throw IOError("checkpoint: write failed: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw CorruptCheckpoint("checkpoint: cannot open: " + path.string());
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0)
        throw CorruptCheckpoint("checkpoint: bad magic in " + path.string());
    const auto version = get<std::uint32_t>(is);
    if (version != Checkpoint::kVersion)
        throw VersionMismatch("checkpoint: version " + std::to_string(version) +
                              " unsupported (expected " + std::to_string(Checkpoint::kVersion) +
                              ")");

    Checkpoint ckpt;
    ckpt.epoch = get<std::int64_t>(is);
    const auto n_meta = get<std::uint32_t>(is);
    for (std::uint32_t i = 0; i < n_meta; ++i) {
        std::string k = get_string(is);
        ckpt.meta[k] = get_string(is);
    }
    const auto n_tensors = get<std::uint32_t>(is);
    for (std::uint32_t i = 0; i < n_tensors; ++i) {
        std::string name = get_string(is);
        const auto rank = get<std::uint32_t>(is);
        std::vector<int> shape(rank);
        for (auto& d : shape) {
            d = get<std::int32_t>(is);
            if (d <= 0) throw CorruptCheckpoint("checkpoint: bad tensor dimension");
        }
        Tensor t(shape);
        is.read(reinterpret_cast<char*>(t.data.data()),
                static_cast<std::streamsize>(t.size() * sizeof(double)));
        if (!is) throw CorruptCheckpoint("checkpoint: truncated tensor data");
        ckpt.tensors[name] = std::move(t);
    }
    return ckpt;
}

}  // namespace ganbench
