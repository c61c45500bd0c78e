#include "ganbench/dicom.hpp"

#include <cstring>
#include <fstream>
#include <string>

#include "ganbench/errors.hpp"

namespace ganbench::dicom {

namespace {

struct Reader {
    const std::uint8_t* p;
    std::size_t len;
    std::size_t pos = 0;

    bool eof() const { return pos >= len; }
    void need(std::size_t n, const char* what) const {
        if (pos + n > len) throw CorruptFile(std::string("dicom: truncated ") + what);
    }
    std::uint16_t u16() {
        need(2, "u16");
        std::uint16_t v = static_cast<std::uint16_t>(p[pos] | (p[pos + 1] << 8));
        pos += 2;
        return v;
    }
    std::uint32_t u32() {
        need(4, "u32");
        std::uint32_t v = p[pos] | (p[pos + 1] << 8) | (p[pos + 2] << 16) |
                          (std::uint32_t(p[pos + 3]) << 24);
        pos += 4;
        return v;
    }
    std::string bytes(std::size_t n) {
        need(n, "value");
        std::string s(reinterpret_cast<const char*>(p + pos), n);
        pos += n;
        return s;
    }
    void skip(std::size_t n) {
        need(n, "value");
        pos += n;
    }
};

bool is_explicit_vr(const char* vr) {
    static const char* known[] = {"AE", "AS", "AT", "CS", "DA", "DS", "DT", "FL", "FD", "IS",
                                  "LO", "LT", "OB", "OD", "OF", "OL", "OW", "PN", "SH", "SL",
                                  "SQ", "SS", "ST", "TM", "UC", "UI", "UL", "UN", "UR", "US",
                                  "UT"};
    for (const char* k : known)
        if (vr[0] == k[0] && vr[1] == k[1]) return true;
    return false;
}

constexpr std::uint32_t kUndefined = 0xFFFFFFFFu;

struct Element {
    std::uint16_t group = 0;
    std::uint16_t elem = 0;
    char vr[3] = {0, 0, 0};
    std::uint32_t length = 0;  // kUndefined allowed for SQ / pixel data
};

Element read_header(Reader& r, bool explicit_vr) {
    Element e;
    e.group = r.u16();
    e.elem = r.u16();
    // Item / delimitation tags never carry a VR.
    if (e.group == 0xFFFE) {
        e.length = r.u32();
        return e;
    }
    if (explicit_vr) {
        r.need(2, "vr");
        e.vr[0] = static_cast<char>(r.p[r.pos]);
        e.vr[1] = static_cast<char>(r.p[r.pos + 1]);
        r.pos += 2;
        const std::string vr(e.vr, 2);
        if (vr == "OB" || vr == "OW" || vr == "OF" || vr == "OD" || vr == "OL" || vr == "SQ" ||
            vr == "UC" || vr == "UR" || vr == "UT" || vr == "UN") {
            r.skip(2);  // reserved
            e.length = r.u32();
        } else {
            e.length = r.u16();
        }
    } else {
        e.length = r.u32();
    }
    return e;
}

// Skip a value with undefined length (sequence or encapsulated data) by
// scanning nested items up to the matching SequenceDelimitationItem.
void skip_undefined(Reader& r, bool explicit_vr) {
    while (!r.eof()) {
        Element e = read_header(r, explicit_vr);
        if (e.group == 0xFFFE && e.elem == 0xE0DD) return;  // sequence delimiter
        if (e.length == kUndefined)
            skip_undefined(r, explicit_vr);
        else
            r.skip(e.length);
    }
    throw CorruptFile("dicom: unterminated undefined-length value");
}

}  // namespace

DicomImage read_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw CorruptFile("dicom: cannot open: " + path.string());
    std::vector<std::uint8_t> buf((std::istreambuf_iterator<char>(f)),
                                  std::istreambuf_iterator<char>());

    Reader r{buf.data(), buf.size()};
    bool explicit_vr = true;
    if (buf.size() >= 132 && std::memcmp(buf.data() + 128, "DICM", 4) == 0) {
        r.pos = 132;
        // File meta group (0002) is always explicit VR little endian; the
        // transfer syntax UID switches the main data set encoding.
        std::string transfer_syntax = "1.2.840.10008.1.2.1";
        while (!r.eof()) {
            const std::size_t mark = r.pos;
            Element e = read_header(r, true);
            if (e.group != 0x0002) {
                r.pos = mark;
                break;
            }
            std::string value = r.bytes(e.length);
            if (e.elem == 0x0010) {
                while (!value.empty() && (value.back() == '\0' || value.back() == ' '))
                    value.pop_back();
                transfer_syntax = value;
            }
        }
        if (transfer_syntax == "1.2.840.10008.1.2")
            explicit_vr = false;
        else if (transfer_syntax != "1.2.840.10008.1.2.1")
            throw CorruptFile("dicom: unsupported transfer syntax " + transfer_syntax + ": " +
                              path.string());
    } else {
        // Some exporters omit the part-10 preamble; sniff the VR convention
        // from the first element header.
        if (buf.size() < 8) throw CorruptFile("dicom: file too small: " + path.string());
        explicit_vr = is_explicit_vr(reinterpret_cast<const char*>(buf.data() + 4));
    }

    DicomImage img;
    int pixel_representation = 0;
    bool have_pixels = false;
    std::vector<std::uint8_t> pixel_bytes;

    while (!r.eof()) {
        Element e = read_header(r, explicit_vr);
        const bool is_us = explicit_vr ? (e.vr[0] == 'U' && e.vr[1] == 'S') : true;
        if (e.group == 0x0028 && e.length == 2 && is_us) {
            const std::uint16_t v = r.u16();
            switch (e.elem) {
                case 0x0010: img.rows = v; break;
                case 0x0011: img.cols = v; break;
                case 0x0100: img.bits_allocated = v; break;
                case 0x0101: img.bits_stored = v; break;
                case 0x0103: pixel_representation = v; break;
                default: break;
            }
            continue;
        }
        if (e.group == 0x7FE0 && e.elem == 0x0010) {
            if (e.length == kUndefined)
                throw CorruptFile("dicom: encapsulated pixel data unsupported: " + path.string());
            r.need(e.length, "pixel data");
            pixel_bytes.assign(r.p + r.pos, r.p + r.pos + e.length);
            r.skip(e.length);
            have_pixels = true;
            continue;
        }
        if (e.length == kUndefined)
            skip_undefined(r, explicit_vr);
        else
            r.skip(e.length);
    }

    if (!have_pixels) throw CorruptFile("dicom: no pixel data: " + path.string());
    if (img.rows <= 0 || img.cols <= 0)
        throw CorruptFile("dicom: missing rows/columns: " + path.string());
    if (img.bits_allocated != 8 && img.bits_allocated != 16)
        throw CorruptFile("dicom: unsupported bits allocated: " + path.string());
    if (img.bits_stored == 0) img.bits_stored = img.bits_allocated;

    const std::size_t n = static_cast<std::size_t>(img.rows) * img.cols;
    const std::size_t bytes_per = img.bits_allocated / 8;
    if (pixel_bytes.size() < n * bytes_per)
        throw CorruptFile("dicom: pixel data shorter than rows*cols: " + path.string());

    img.pixels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (bytes_per == 1) {
            img.pixels[i] = pixel_bytes[i];
        } else {
            std::uint16_t v =
                static_cast<std::uint16_t>(pixel_bytes[2 * i] | (pixel_bytes[2 * i + 1] << 8));
            img.pixels[i] = pixel_representation ? static_cast<std::int16_t>(v) : v;
        }
    }
    return img;
}

}  // namespace ganbench::dicom
