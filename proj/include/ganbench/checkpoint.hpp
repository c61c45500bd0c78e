#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "ganbench/tensor.hpp"

namespace ganbench {

// Named-tensor archive with a version field. Tensor names are namespaced by
// the writer (e.g. "gen.layer0.weight", "adam_gen.m.layer0.weight"); string
// metadata carries RNG stream states and structural counts.
struct Checkpoint {
    static constexpr std::uint32_t kVersion = 1;

    std::int64_t epoch = 0;
    std::map<std::string, Tensor> tensors;
    std::map<std::string, std::string> meta;
};

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);

// Throws VersionMismatch on a foreign version field, CorruptCheckpoint on
// anything else unreadable.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace ganbench
