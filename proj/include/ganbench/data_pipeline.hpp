#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ganbench/errors.hpp"

namespace ganbench {

// Grayscale image, row = y, col = x, values in [0, 1] once normalized.
using Image = Eigen::ArrayXXd;
using RawImage = Eigen::ArrayXXi;

enum class Split { train, test, unassigned };

std::string to_string(Split s);
Split split_from_string(const std::string& s);

struct RawStudy {
    std::filesystem::path source_path;
    std::string modality_tag;
    int bit_depth = 0;
    int pixel_min = 0;
    int pixel_max = 0;
    RawImage pixels;
};

struct ImageSample {
    Image pixels;
    std::string sample_id;
    Split split = Split::unassigned;

    int height() const { return static_cast<int>(pixels.rows()); }
    int width() const { return static_cast<int>(pixels.cols()); }
};

struct DatasetManifest {
    std::string dataset_id;  // knee | heart | brain | synthetic
    std::vector<ImageSample> samples;
    int height = 0;
    int width = 0;
    std::uint64_t split_seed = 0;
    double split_ratio = 0.0;
    std::string config_hash;  // stamped by prepare-data for idempotence

    std::vector<const ImageSample*> members(Split s) const;
};

struct IngestResult {
    std::vector<RawStudy> studies;
    std::vector<std::string> warnings;  // one entry per skipped corrupt file
};

// Reads every *.dcm under `directory` (sorted by filename), skipping corrupt
// files with a warning. Throws EmptyDirectory if no valid file remains.
IngestResult ingest_dicom(const std::filesystem::path& directory, const std::string& modality);

// (raw - lo) / (hi - lo), clamped to [0, 1]. Throws DegenerateRange if lo >= hi.
Image normalize_pixels(const RawImage& raw, int lo, int hi);

// Bilinear resample with half-pixel centers; identity when dims already match.
ImageSample resize(const ImageSample& sample, int target_h, int target_w);

// Deterministic seeded shuffle; first floor(ratio*N) samples become train.
DatasetManifest split_dataset(DatasetManifest manifest, double ratio, std::uint64_t seed);

// 8-bit grayscale PNG, byte = round-half-away-from-zero(pixel * 255).
void export_png(const ImageSample& sample, const std::filesystem::path& path);
Image import_png(const std::filesystem::path& path);

// Deterministic phantoms: random ellipses with smooth intensity falloff.
DatasetManifest make_synthetic_dataset(int n, int height, int width, std::uint64_t seed);

// Writes sample PNGs plus manifest.json into `dir`; load reverses it.
void write_dataset(const DatasetManifest& manifest, const std::filesystem::path& dir);
DatasetManifest load_dataset(const std::filesystem::path& manifest_path);

}  // namespace ganbench
