#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <vector>

#include "ganbench/data_pipeline.hpp"
#include "ganbench/errors.hpp"
#include "ganbench/png_io.hpp"
#include "ganbench/rng.hpp"

using namespace ganbench;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("ganbench_dp_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void put_u16(std::vector<unsigned char>& out, std::uint16_t v) {
    out.push_back(static_cast<unsigned char>(v & 0xFF));
    out.push_back(static_cast<unsigned char>(v >> 8));
}

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xFF));
}

// Explicit-VR little-endian element with a short-form length.
void put_element(std::vector<unsigned char>& out, std::uint16_t group, std::uint16_t elem,
                 const char vr[2], const std::vector<unsigned char>& value) {
    put_u16(out, group);
    put_u16(out, elem);
    out.push_back(static_cast<unsigned char>(vr[0]));
    out.push_back(static_cast<unsigned char>(vr[1]));
    put_u16(out, static_cast<std::uint16_t>(value.size()));
    out.insert(out.end(), value.begin(), value.end());
}

void put_element_long(std::vector<unsigned char>& out, std::uint16_t group, std::uint16_t elem,
                      const char vr[2], const std::vector<unsigned char>& value) {
    put_u16(out, group);
    put_u16(out, elem);
    out.push_back(static_cast<unsigned char>(vr[0]));
    out.push_back(static_cast<unsigned char>(vr[1]));
    put_u16(out, 0);
    put_u32(out, static_cast<std::uint32_t>(value.size()));
    out.insert(out.end(), value.begin(), value.end());
}

std::vector<unsigned char> us_value(std::uint16_t v) {
    std::vector<unsigned char> out;
    put_u16(out, v);
    return out;
}

// Minimal part-10 file: preamble, DICM, file meta, then an 8-bit monochrome
// image with the given pixels (row-major).
std::vector<unsigned char> make_dicom(int rows, int cols,
                                      const std::vector<unsigned char>& pixels) {
    std::vector<unsigned char> out(128, 0);
    out.insert(out.end(), {'D', 'I', 'C', 'M'});
    const std::string ts = "1.2.840.10008.1.2.1\0";  // explicit VR LE
    std::vector<unsigned char> ts_bytes(ts.begin(), ts.end());
    if (ts_bytes.size() % 2) ts_bytes.push_back(0);
    std::vector<unsigned char> meta;
    put_element(meta, 0x0002, 0x0010, "UI", ts_bytes);
    std::vector<unsigned char> len;
    put_u32(len, static_cast<std::uint32_t>(meta.size()));
    put_element(out, 0x0002, 0x0000, "UL", len);
    out.insert(out.end(), meta.begin(), meta.end());

    put_element(out, 0x0028, 0x0010, "US", us_value(static_cast<std::uint16_t>(rows)));
    put_element(out, 0x0028, 0x0011, "US", us_value(static_cast<std::uint16_t>(cols)));
    put_element(out, 0x0028, 0x0100, "US", us_value(8));   // bits allocated
    put_element(out, 0x0028, 0x0101, "US", us_value(8));   // bits stored
    put_element(out, 0x0028, 0x0103, "US", us_value(0));   // unsigned
    put_element_long(out, 0x7FE0, 0x0010, "OB", pixels);
    return out;
}

void write_file(const fs::path& path, const std::vector<unsigned char>& bytes) {
    std::ofstream out(path, std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<long>(bytes.size()));
}

}  // namespace

TEST_CASE("dicom ingest reads valid files in filename order") {
    const auto dir = temp_dir("ingest");
    std::vector<unsigned char> px(16 * 16);
    for (std::size_t i = 0; i < px.size(); ++i) px[i] = static_cast<unsigned char>(i);
    write_file(dir / "b.dcm", make_dicom(16, 16, px));
    write_file(dir / "a.dcm", make_dicom(16, 16, px));
    write_file(dir / "c.dcm", make_dicom(16, 16, px));

    const auto result = ingest_dicom(dir, "knee");
    REQUIRE(result.studies.size() == 3);
    CHECK(result.warnings.empty());
    CHECK(result.studies[0].source_path.filename() == "a.dcm");
    CHECK(result.studies[1].source_path.filename() == "b.dcm");
    CHECK(result.studies[2].source_path.filename() == "c.dcm");
    CHECK(result.studies[0].pixels(0, 1) == 1);
    CHECK(result.studies[0].bit_depth == 8);
}

TEST_CASE("dicom ingest skips truncated files with a warning") {
    const auto dir = temp_dir("ingest_corrupt");
    std::vector<unsigned char> px(8 * 8, 100);
    write_file(dir / "ok1.dcm", make_dicom(8, 8, px));
    write_file(dir / "ok2.dcm", make_dicom(8, 8, px));
    auto truncated = make_dicom(8, 8, px);
    truncated.resize(truncated.size() - 40);  // cut into the pixel data
    write_file(dir / "bad.dcm", truncated);

    const auto result = ingest_dicom(dir, "knee");
    CHECK(result.studies.size() == 2);
    CHECK(result.warnings.size() == 1);
}

TEST_CASE("dicom ingest of an empty directory fails") {
    const auto dir = temp_dir("ingest_empty");
    CHECK_THROWS_AS(ingest_dicom(dir, "knee"), EmptyDirectory);
}

TEST_CASE("dicom ingest fails when every file is corrupt") {
    const auto dir = temp_dir("ingest_allbad");
    write_file(dir / "bad.dcm", {0, 1, 2, 3});
    CHECK_THROWS_AS(ingest_dicom(dir, "knee"), EmptyDirectory);
}

TEST_CASE("normalize_pixels endpoints and interior") {
    RawImage raw(1, 3);
    raw << 0, 1024, 4095;
    const Image n = normalize_pixels(raw, 0, 4095);
    CHECK(n(0, 0) == doctest::Approx(0.0));
    CHECK(n(0, 2) == doctest::Approx(1.0));
    RawImage raw2(1, 1);
    raw2 << 1024;
    CHECK(normalize_pixels(raw2, 0, 4096)(0, 0) == doctest::Approx(0.25));
}

TEST_CASE("normalize_pixels clamps out-of-window values and rejects lo >= hi") {
    RawImage raw(1, 2);
    raw << -5, 300;
    const Image n = normalize_pixels(raw, 0, 255);
    CHECK(n(0, 0) == 0.0);
    CHECK(n(0, 1) == 1.0);
    CHECK_THROWS_AS(normalize_pixels(raw, 7, 7), DegenerateRange);
}

TEST_CASE("normalization is monotone") {
    RawImage raw(1, 4);
    raw << 10, 20, 30, 40;
    const Image n = normalize_pixels(raw, 0, 100);
    for (int c = 1; c < 4; ++c) CHECK(n(0, c) > n(0, c - 1));
}

TEST_CASE("resize constant image stays constant") {
    ImageSample s;
    s.pixels = Image::Constant(256, 256, 0.5);
    s.sample_id = "c";
    const auto out = resize(s, 64, 64);
    CHECK(out.pixels.rows() == 64);
    CHECK(out.pixels.cols() == 64);
    CHECK(out.pixels.minCoeff() == doctest::Approx(0.5));
    CHECK(out.pixels.maxCoeff() == doctest::Approx(0.5));
}

TEST_CASE("resize identity is a no-op") {
    ImageSample s;
    s.pixels = Image::Random(64, 64).abs();
    s.sample_id = "i";
    const auto out = resize(s, 64, 64);
    CHECK((out.pixels - s.pixels).abs().maxCoeff() == 0.0);
}

TEST_CASE("resize halves a checkerboard to all 0.5 (half-pixel centers)") {
    ImageSample s;
    s.pixels = Image(16, 16);
    for (int r = 0; r < 16; ++r)
        for (int c = 0; c < 16; ++c) s.pixels(r, c) = (r + c) % 2 == 0 ? 1.0 : 0.0;
    s.sample_id = "cb";
    const auto out = resize(s, 8, 8);
    for (int r = 0; r < 8; ++r)
        for (int c = 0; c < 8; ++c) CHECK(out.pixels(r, c) == doctest::Approx(0.5));
}

TEST_CASE("resize rejects targets below 8 unless identity") {
    ImageSample s;
    s.pixels = Image::Constant(16, 16, 0.1);
    s.sample_id = "x";
    CHECK_THROWS_AS(resize(s, 4, 4), InvalidTarget);
}

TEST_CASE("split_dataset floor rule and partition") {
    auto check_split = [](int n, double ratio, std::size_t want_train) {
        DatasetManifest m = make_synthetic_dataset(n, 16, 16, 3);
        m = split_dataset(std::move(m), ratio, 42);
        CHECK(m.members(Split::train).size() == want_train);
        CHECK(m.members(Split::test).size() == static_cast<std::size_t>(n) - want_train);
        for (const auto& s : m.samples) CHECK(s.split != Split::unassigned);
    };
    check_split(100, 0.7, 70);
    check_split(10, 0.7, 7);
    check_split(64, 0.7, 44);
}

TEST_CASE("split_dataset is deterministic in the seed") {
    DatasetManifest a = split_dataset(make_synthetic_dataset(20, 16, 16, 3), 0.7, 42);
    DatasetManifest b = split_dataset(make_synthetic_dataset(20, 16, 16, 3), 0.7, 42);
    DatasetManifest c = split_dataset(make_synthetic_dataset(20, 16, 16, 3), 0.7, 43);
    bool same_ab = true, same_ac = true;
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        same_ab = same_ab && a.samples[i].split == b.samples[i].split;
        same_ac = same_ac && a.samples[i].split == c.samples[i].split;
    }
    CHECK(same_ab);
    CHECK_FALSE(same_ac);
}

TEST_CASE("split_dataset rejects fewer than two samples") {
    CHECK_THROWS_AS(split_dataset(make_synthetic_dataset(1, 16, 16, 3), 0.7, 42), TooFewSamples);
}

TEST_CASE("png export endpoints and rounding") {
    const auto dir = temp_dir("png");
    ImageSample s;
    s.pixels = Image(1, 2);
    s.pixels << 1.0, 0.5;
    s.sample_id = "px";
    export_png(s, dir / "px.png");
    const png::Gray8 g = png::read_gray8(dir / "px.png");
    CHECK(g.pixels[0] == 255);
    CHECK(g.pixels[1] == 128);  // 127.5 rounds half away from zero
}

TEST_CASE("png round trip quantization bound") {
    const auto dir = temp_dir("png_rt");
    ImageSample s;
    s.pixels = Image::Constant(16, 16, 0.25);
    s.sample_id = "q";
    export_png(s, dir / "q.png");
    const Image back = import_png(dir / "q.png");
    CHECK((back - s.pixels).abs().maxCoeff() <= 1.0 / 510.0 + 1e-12);
}

TEST_CASE("png round trip on random images stays within the quantization bound") {
    const auto dir = temp_dir("png_prop");
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        ImageSample s;
        s.pixels = Image(9, 13);
        for (int r = 0; r < 9; ++r)
            for (int c = 0; c < 13; ++c) s.pixels(r, c) = rng.uniform();
        s.sample_id = "r";
        export_png(s, dir / "r.png");
        const Image back = import_png(dir / "r.png");
        CHECK((back - s.pixels).abs().maxCoeff() <= 1.0 / 510.0 + 1e-12);
    }
}

TEST_CASE("synthetic dataset contract") {
    const DatasetManifest m = make_synthetic_dataset(8, 32, 32, 1);
    REQUIRE(m.samples.size() == 8);
    for (const auto& s : m.samples) {
        CHECK(s.pixels.rows() == 32);
        CHECK(s.pixels.minCoeff() >= 0.0);
        CHECK(s.pixels.maxCoeff() <= 1.0);
    }
    // distinct images
    for (std::size_t i = 1; i < m.samples.size(); ++i)
        CHECK((m.samples[i].pixels - m.samples[0].pixels).abs().maxCoeff() > 0.0);
    // bit-identical on repeat, different across seeds
    const DatasetManifest m2 = make_synthetic_dataset(8, 32, 32, 1);
    const DatasetManifest m3 = make_synthetic_dataset(8, 32, 32, 2);
    CHECK((m.samples[0].pixels - m2.samples[0].pixels).abs().maxCoeff() == 0.0);
    double diff = 0.0;
    for (std::size_t i = 0; i < m.samples.size(); ++i)
        diff += (m.samples[i].pixels - m3.samples[i].pixels).abs().mean();
    CHECK(diff / 8.0 > 0.0);
}

TEST_CASE("dataset write/load round trip preserves splits and ids") {
    const auto dir = temp_dir("ds_rt");
    DatasetManifest m = split_dataset(make_synthetic_dataset(10, 16, 16, 5), 0.7, 42);
    m.config_hash = "abc123";
    write_dataset(m, dir);
    const DatasetManifest back = load_dataset(dir / "manifest.json");
    REQUIRE(back.samples.size() == m.samples.size());
    CHECK(back.config_hash == "abc123");
    CHECK(back.split_seed == m.split_seed);
    for (std::size_t i = 0; i < m.samples.size(); ++i) {
        CHECK(back.samples[i].sample_id == m.samples[i].sample_id);
        CHECK(back.samples[i].split == m.samples[i].split);
        CHECK((back.samples[i].pixels - m.samples[i].pixels).abs().maxCoeff() <=
              1.0 / 510.0 + 1e-12);
    }
}
