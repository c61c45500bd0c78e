#include "ganbench/data_pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "ganbench/dicom.hpp"
#include "ganbench/png_io.hpp"
#include "ganbench/rng.hpp"

namespace ganbench {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::string to_string(Split s) {
    switch (s) {
        case Split::train: return "train";
        case Split::test: return "test";
        case Split::unassigned: return "unassigned";
    }
    return "unassigned";
}

Split split_from_string(const std::string& s) {
    if (s == "train") return Split::train;
    if (s == "test") return Split::test;
    if (s == "unassigned") return Split::unassigned;
    throw CorruptFile("manifest: unknown split tag '" + s + "'");
}

std::vector<const ImageSample*> DatasetManifest::members(Split s) const {
    std::vector<const ImageSample*> out;
    for (const auto& sample : samples)
        if (sample.split == s) out.push_back(&sample);
    return out;
}

IngestResult ingest_dicom(const fs::path& directory, const std::string& modality) {
    if (!fs::is_directory(directory))
        throw EmptyDirectory("ingest: not a directory: " + directory.string());

    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(directory)) {
        if (entry.is_regular_file() && entry.path().extension() == ".dcm")
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
    if (files.empty())
        throw EmptyDirectory("ingest: no .dcm files in " + directory.string());

    IngestResult result;
    for (const auto& file : files) {
        try {
            dicom::DicomImage img = dicom::read_file(file);
            RawStudy study;
            study.source_path = file;
            study.modality_tag = modality;
            study.bit_depth = img.bits_stored;
            study.pixels = RawImage(img.rows, img.cols);
            for (int r = 0; r < img.rows; ++r)
                for (int c = 0; c < img.cols; ++c)
                    study.pixels(r, c) = img.pixels[static_cast<std::size_t>(r) * img.cols + c];
            study.pixel_min = study.pixels.minCoeff();
            study.pixel_max = study.pixels.maxCoeff();
            result.studies.push_back(std::move(study));
        } catch (const CorruptFile& e) {
            result.warnings.push_back(std::string("skipped ") + file.filename().string() + ": " +
                                      e.what());
        }
    }
    if (result.studies.empty())
        throw EmptyDirectory("ingest: all files in " + directory.string() + " were unreadable");
    return result;
}

Image normalize_pixels(const RawImage& raw, int lo, int hi) {
    if (lo >= hi) throw DegenerateRange("normalize: lo must be < hi");
    const double span = static_cast<double>(hi) - lo;
    Image out = (raw.cast<double>() - static_cast<double>(lo)) / span;
    return out.min(1.0).max(0.0);
}

ImageSample resize(const ImageSample& sample, int target_h, int target_w) {
    if (target_h < 8 || target_w < 8)
        throw InvalidTarget("resize: target dims must be >= 8x8");
    const int src_h = sample.height(), src_w = sample.width();
    if (src_h == target_h && src_w == target_w) return sample;

    ImageSample out = sample;
    out.pixels = Image(target_h, target_w);
    const double sy = static_cast<double>(src_h) / target_h;
    const double sx = static_cast<double>(src_w) / target_w;
    for (int r = 0; r < target_h; ++r) {
        const double fy = std::clamp((r + 0.5) * sy - 0.5, 0.0, src_h - 1.0);
        const int y0 = static_cast<int>(std::floor(fy));
        const int y1 = std::min(y0 + 1, src_h - 1);
        const double wy = fy - y0;
        for (int c = 0; c < target_w; ++c) {
            const double fx = std::clamp((c + 0.5) * sx - 0.5, 0.0, src_w - 1.0);
            const int x0 = static_cast<int>(std::floor(fx));
            const int x1 = std::min(x0 + 1, src_w - 1);
            const double wx = fx - x0;
            const double top = sample.pixels(y0, x0) * (1 - wx) + sample.pixels(y0, x1) * wx;
            const double bot = sample.pixels(y1, x0) * (1 - wx) + sample.pixels(y1, x1) * wx;
            out.pixels(r, c) = top * (1 - wy) + bot * wy;
        }
    }
    return out;
}

DatasetManifest split_dataset(DatasetManifest manifest, double ratio, std::uint64_t seed) {
    const std::size_t n = manifest.samples.size();
    if (n < 2) throw TooFewSamples("split: need at least 2 samples");
    if (ratio <= 0.0 || ratio >= 1.0) throw TooFewSamples("split: ratio must be in (0, 1)");

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    Rng rng(seed);
    for (std::size_t i = n - 1; i > 0; --i)
        std::swap(order[i], order[rng.below(i + 1)]);

    const std::size_t n_train = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n)));
    for (auto& s : manifest.samples) s.split = Split::test;
    for (std::size_t i = 0; i < n_train; ++i)
        manifest.samples[order[i]].split = Split::train;

    manifest.split_ratio = ratio;
    manifest.split_seed = seed;
    return manifest;
}

void export_png(const ImageSample& sample, const fs::path& path) {
    png::Gray8 img;
    img.height = sample.height();
    img.width = sample.width();
    img.pixels.resize(static_cast<std::size_t>(img.height) * img.width);
    for (int r = 0; r < img.height; ++r)
        for (int c = 0; c < img.width; ++c) {
            // round-half-away-from-zero, bit-stable across platforms
            const double v = std::round(sample.pixels(r, c) * 255.0);
            img.pixels[static_cast<std::size_t>(r) * img.width + c] =
                static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
        }
    png::write_gray8(path, img);
}

Image import_png(const fs::path& path) {
    const png::Gray8 img = png::read_gray8(path);
    Image out(img.height, img.width);
    for (int r = 0; r < img.height; ++r)
        for (int c = 0; c < img.width; ++c)
            out(r, c) = img.pixels[static_cast<std::size_t>(r) * img.width + c] / 255.0;
    return out;
}

DatasetManifest make_synthetic_dataset(int n, int height, int width, std::uint64_t seed) {
    if (n < 2) throw TooFewSamples("synthetic: need n >= 2");
    DatasetManifest manifest;
    manifest.dataset_id = "synthetic";
    manifest.height = height;
    manifest.width = width;

    Rng rng(seed);
    for (int i = 0; i < n; ++i) {
        ImageSample s;
        s.sample_id = "phantom_" + std::string(4 - std::to_string(i).size(), '0') + std::to_string(i);
        s.pixels = Image::Zero(height, width);

        // mild diagonal illumination gradient
        const double g = rng.uniform(0.02, 0.10);
        for (int r = 0; r < height; ++r)
            for (int c = 0; c < width; ++c)
                s.pixels(r, c) = g * (r + c) / static_cast<double>(height + width - 2);

        const int n_ellipses = 2 + static_cast<int>(rng.below(3));
        for (int e = 0; e < n_ellipses; ++e) {
            const double cy = rng.uniform(0.25, 0.75) * height;
            const double cx = rng.uniform(0.25, 0.75) * width;
            const double ry = rng.uniform(0.12, 0.35) * height;
            const double rx = rng.uniform(0.12, 0.35) * width;
            const double theta = rng.uniform(0.0, M_PI);
            const double amp = rng.uniform(0.3, 0.9);
            const double ct = std::cos(theta), st = std::sin(theta);
            for (int r = 0; r < height; ++r)
                for (int c = 0; c < width; ++c) {
                    const double dy = r - cy, dx = c - cx;
                    const double u = (dx * ct + dy * st) / rx;
                    const double v = (-dx * st + dy * ct) / ry;
                    const double d2 = u * u + v * v;
                    if (d2 < 1.0) s.pixels(r, c) += amp * (1.0 - d2);
                }
        }
        s.pixels = s.pixels.min(1.0).max(0.0);
        manifest.samples.push_back(std::move(s));
    }
    return manifest;
}

void write_dataset(const DatasetManifest& manifest, const fs::path& dir) {
    fs::create_directories(dir / "images");
    ordered_json j;
    j["dataset_id"] = manifest.dataset_id;
    j["resolution"] = {manifest.height, manifest.width};
    j["split_seed"] = manifest.split_seed;
    j["split_ratio"] = manifest.split_ratio;
    j["config_hash"] = manifest.config_hash;
    j["samples"] = ordered_json::array();
    for (const auto& s : manifest.samples) {
        const std::string file = "images/" + s.sample_id + ".png";
        export_png(s, dir / file);
        j["samples"].push_back(
            {{"sample_id", s.sample_id}, {"file", file}, {"split", to_string(s.split)}});
    }
    std::ofstream out(dir / "manifest.json", std::ios::trunc);
    if (!out) throw IOError("manifest: cannot write " + (dir / "manifest.json").string());
    out << j.dump(2) << "\n";
}

DatasetManifest load_dataset(const fs::path& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw IOError("manifest: cannot open " + manifest_path.string());
    ordered_json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw CorruptFile("manifest: bad JSON in " + manifest_path.string() + ": " + e.what());
    }
    DatasetManifest m;
    m.dataset_id = j.at("dataset_id").get<std::string>();
    m.height = j.at("resolution").at(0).get<int>();
    m.width = j.at("resolution").at(1).get<int>();
    m.split_seed = j.at("split_seed").get<std::uint64_t>();
    m.split_ratio = j.at("split_ratio").get<double>();
    m.config_hash = j.value("config_hash", "");
    const fs::path dir = manifest_path.parent_path();
    for (const auto& sj : j.at("samples")) {
        ImageSample s;
        s.sample_id = sj.at("sample_id").get<std::string>();
        s.split = split_from_string(sj.at("split").get<std::string>());
        s.pixels = import_png(dir / sj.at("file").get<std::string>());
        if (s.height() != m.height || s.width() != m.width)
            throw CorruptFile("manifest: sample " + s.sample_id + " resolution mismatch");
        m.samples.push_back(std::move(s));
    }
    return m;
}

}  // namespace ganbench
