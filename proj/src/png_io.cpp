#include "ganbench/png_io.hpp"

#include <zlib.h>

#include <cstring>
#include <fstream>

#include "ganbench/errors.hpp"

namespace ganbench::png {

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

std::uint32_t get_u32(const std::uint8_t* p) {
    return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) |
           (std::uint32_t(p[2]) << 8) | std::uint32_t(p[3]);
}

void append_chunk(std::vector<std::uint8_t>& out, const char type[4],
                  const std::vector<std::uint8_t>& payload) {
    put_u32(out, static_cast<std::uint32_t>(payload.size()));
    const std::size_t crc_start = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), payload.begin(), payload.end());
    const auto crc = crc32(0, out.data() + crc_start, static_cast<uInt>(out.size() - crc_start));
    put_u32(out, static_cast<std::uint32_t>(crc));
}

std::vector<std::uint8_t> zlib_compress(const std::vector<std::uint8_t>& raw) {
    uLongf bound = compressBound(static_cast<uLong>(raw.size()));
    std::vector<std::uint8_t> out(bound);
    if (compress2(out.data(), &bound, raw.data(), static_cast<uLong>(raw.size()), 6) != Z_OK)
        throw IOError("png: zlib compression failed");
    out.resize(bound);
    return out;
}

std::vector<std::uint8_t> zlib_decompress(const std::vector<std::uint8_t>& comp,
                                          std::size_t expected) {
    std::vector<std::uint8_t> out(expected);
    uLongf len = static_cast<uLongf>(expected);
    if (uncompress(out.data(), &len, comp.data(), static_cast<uLong>(comp.size())) != Z_OK ||
        len != expected)
        throw CorruptFile("png: zlib decompression failed");
    return out;
}

void write_png(const std::filesystem::path& path, int height, int width, int channels,
               const std::vector<std::uint8_t>& pixels) {
    if (height <= 0 || width <= 0 ||
        pixels.size() != static_cast<std::size_t>(height) * width * channels)
        throw IOError("png: bad image dimensions");

    std::vector<std::uint8_t> ihdr;
    put_u32(ihdr, static_cast<std::uint32_t>(width));
    put_u32(ihdr, static_cast<std::uint32_t>(height));
    ihdr.push_back(8);                                   // bit depth
    ihdr.push_back(channels == 1 ? 0 : 2);               // gray / truecolor
    ihdr.push_back(0);
    ihdr.push_back(0);
    ihdr.push_back(0);                                   // no interlace

    const std::size_t stride = static_cast<std::size_t>(width) * channels;
    std::vector<std::uint8_t> raw;
    raw.reserve((stride + 1) * height);
    for (int r = 0; r < height; ++r) {
        raw.push_back(0);  // filter: none
        raw.insert(raw.end(), pixels.begin() + r * stride, pixels.begin() + (r + 1) * stride);
    }

    std::vector<std::uint8_t> out;
    static const std::uint8_t sig[8] = {137, 80, 78, 71, 13, 10, 26, 10};
    out.insert(out.end(), sig, sig + 8);
    append_chunk(out, "IHDR", ihdr);
    append_chunk(out, "IDAT", zlib_compress(raw));
    append_chunk(out, "IEND", {});

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IOError("png: cannot open for writing: " + path.string());
    f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
    if (!f) throw IOError("png: write failed: " + path.string());
}

int paeth(int a, int b, int c) {
    const int p = a + b - c;
    const int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
    if (pa <= pb && pa <= pc) return a;
    if (pb <= pc) return b;
    return c;
}

}  // namespace

void write_gray8(const std::filesystem::path& path, const Gray8& img) {
    write_png(path, img.height, img.width, 1, img.pixels);
}

void write_rgb8(const std::filesystem::path& path, const Rgb8& img) {
    write_png(path, img.height, img.width, 3, img.pixels);
}

Gray8 read_gray8(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IOError("png: cannot open: " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                    std::istreambuf_iterator<char>());
    static const std::uint8_t sig[8] = {137, 80, 78, 71, 13, 10, 26, 10};
    if (bytes.size() < 8 || std::memcmp(bytes.data(), sig, 8) != 0)
        throw CorruptFile("png: bad signature: " + path.string());

    int width = 0, height = 0, bit_depth = 0, color_type = 0;
    std::vector<std::uint8_t> idat;
    std::size_t pos = 8;
    while (pos + 8 <= bytes.size()) {
        const std::uint32_t len = get_u32(&bytes[pos]);
        if (pos + 12 + len > bytes.size()) throw CorruptFile("png: truncated chunk");
        const char* type = reinterpret_cast<const char*>(&bytes[pos + 4]);
        const std::uint8_t* payload = &bytes[pos + 8];
        if (std::memcmp(type, "IHDR", 4) == 0) {
            if (len != 13) throw CorruptFile("png: bad IHDR");
            width = static_cast<int>(get_u32(payload));
            height = static_cast<int>(get_u32(payload + 4));
            bit_depth = payload[8];
            color_type = payload[9];
            if (payload[12] != 0) throw CorruptFile("png: interlaced images unsupported");
        } else if (std::memcmp(type, "IDAT", 4) == 0) {
            idat.insert(idat.end(), payload, payload + len);
        } else if (std::memcmp(type, "IEND", 4) == 0) {
            break;
        }
        pos += 12 + len;
    }
    if (width <= 0 || height <= 0 || bit_depth != 8 || color_type != 0)
        throw CorruptFile("png: only 8-bit grayscale supported: " + path.string());

    const std::size_t stride = static_cast<std::size_t>(width);
    auto raw = zlib_decompress(idat, (stride + 1) * height);

    Gray8 img;
    img.height = height;
    img.width = width;
    img.pixels.resize(stride * height);
    std::vector<std::uint8_t> prev(stride, 0);
    for (int r = 0; r < height; ++r) {
        const std::uint8_t filter = raw[r * (stride + 1)];
        const std::uint8_t* src = &raw[r * (stride + 1) + 1];
        std::uint8_t* dst = &img.pixels[r * stride];
        for (std::size_t c = 0; c < stride; ++c) {
            const int a = c > 0 ? dst[c - 1] : 0;
            const int b = prev[c];
            const int cc = c > 0 ? prev[c - 1] : 0;
            int v = src[c];
            switch (filter) {
                case 0: break;
                case 1: v += a; break;
                case 2: v += b; break;
                case 3: v += (a + b) / 2; break;
                case 4: v += paeth(a, b, cc); break;
                default: throw CorruptFile("png: unknown filter type");
            }
            dst[c] = static_cast<std::uint8_t>(v & 0xff);
        }
        std::memcpy(prev.data(), dst, stride);
    }
    return img;
}

}  // namespace ganbench::png
