#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace ganbench::dicom {

// Decoded image-domain pixel data from a single-frame DICOM file.
// Uncompressed little-endian transfer syntaxes only (implicit or explicit VR).
struct DicomImage {
    int rows = 0;
    int cols = 0;
    int bits_allocated = 0;  // 8 or 16
    int bits_stored = 0;
    std::vector<std::int32_t> pixels;  // row-major rows*cols
};

// Throws CorruptFile on anything unreadable (bad magic, compressed transfer
// syntax, truncated pixel data, missing mandatory tags).
DicomImage read_file(const std::filesystem::path& path);

}  // namespace ganbench::dicom
