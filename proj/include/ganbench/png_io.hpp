#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace ganbench::png {

// Minimal PNG codec (zlib-backed): 8-bit grayscale and 8-bit RGB,
// non-interlaced. Output bytes are deterministic for identical input.

struct Gray8 {
    int height = 0;
    int width = 0;
    std::vector<std::uint8_t> pixels;  // row-major, height*width
};

struct Rgb8 {
    int height = 0;
    int width = 0;
    std::vector<std::uint8_t> pixels;  // row-major, height*width*3
};

void write_gray8(const std::filesystem::path& path, const Gray8& img);
void write_rgb8(const std::filesystem::path& path, const Rgb8& img);
Gray8 read_gray8(const std::filesystem::path& path);

}  // namespace ganbench::png
