#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ganbench/metrics.hpp"
#include "ganbench/train.hpp"

namespace ganbench::toml {

// Minimal TOML subset: [section] / [section.sub] headers, key = value lines,
// '#' comments. Values: "string", integer, float, bool, flat arrays.
struct Value {
    std::variant<std::string, std::int64_t, double, bool, std::vector<Value>> v;
    int line = 0;

    bool is_string() const { return std::holds_alternative<std::string>(v); }
    bool is_int() const { return std::holds_alternative<std::int64_t>(v); }
    bool is_number() const { return is_int() || std::holds_alternative<double>(v); }
    bool is_bool() const { return std::holds_alternative<bool>(v); }
    bool is_array() const { return std::holds_alternative<std::vector<Value>>(v); }

    const std::string& as_string() const;
    std::int64_t as_int() const;
    double as_double() const;
    bool as_bool() const;
    const std::vector<Value>& as_array() const;
};

// Dotted key path -> value, e.g. "training.wgan.n_critic".
using Table = std::map<std::string, Value>;

Table parse(const std::string& text);
Table parse_file(const std::filesystem::path& path);

}  // namespace ganbench::toml

namespace ganbench {

struct DatasetConfig {
    std::string source = "synthetic";  // "synthetic" or a DICOM root directory
    std::string modality = "knee";
    int synthetic_n = 64;
    int resolution = 64;
    double split_ratio = 0.7;
    std::uint64_t split_seed = 42;
    std::string normalize = "per_image";  // or "global"
    int window_lo = 0;
    int window_hi = 4095;
};

struct MetricsConfig {
    PairingStrategy pairing = PairingStrategy::index;
    std::string classifier = "moment-probe";  // or a weights-file path
    int classifier_k = 10;
    int n_splits = 10;
    int eval_every = 50;
    double psnr_cap_db = 100.0;
    SsimConstants ssim;
};

struct StatsConfig {
    std::vector<double> alphas = {0.05, 0.01, 0.001};
};

struct BenchmarkConfig {
    DatasetConfig dataset;
    std::map<ModelFamily, Hyperparameters> families;  // always all three
    MetricsConfig metrics;
    StatsConfig stats;
    std::filesystem::path output_dir = "out";
    std::uint64_t master_seed = 7;
    int checkpoint_every = 0;

    // FNV-1a over a canonical rendering; stamped into manifests and reports.
    std::string hash() const;
    std::string dataset_hash() const;
};

// Validates against the schema: unknown keys rejected with line diagnostics,
// 	type errors name the key. Throws ConfigError.
BenchmarkConfig load_config(const std::filesystem::path& path);
BenchmarkConfig config_from_table(const toml::Table& table);

std::unique_ptr<ClassifierBackend> make_classifier(const MetricsConfig& metrics);
EvalContext make_eval_context(const MetricsConfig& metrics, ClassifierBackend& classifier);

}  // namespace ganbench
