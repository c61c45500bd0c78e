#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ganbench/stats.hpp"
#include "ganbench/train.hpp"

namespace ganbench {

// A completed run directory parsed back from disk (run.json + training_log.csv).
struct RunSummary {
    std::filesystem::path dir;
    std::string run_id;
    ModelFamily family = ModelFamily::VANILLA;
    std::uint64_t seed = 0;
    Hyperparameters hyper;
    std::string dataset_ref;
    int epoch_count = 0;
    double wall_time_sec = 0.0;
    std::optional<MetricSnapshot> final_metrics;
    std::vector<EpochRecord> log;
};

nlohmann::ordered_json hyper_to_json(const Hyperparameters& h);
Hyperparameters hyper_from_json(const nlohmann::json& j);

nlohmann::ordered_json run_manifest_json(const TrainRun& run);
void write_run_manifest(const TrainRun& run, const std::filesystem::path& path);
RunSummary load_run(const std::filesystem::path& run_dir);

std::vector<EpochRecord> read_training_log(const std::filesystem::path& path);

// Table-style comparison of final metrics, one row per run.
std::string render_comparison_md(const std::vector<RunSummary>& runs);

// Per-metric ANOVA + pairwise table rendering.
std::string render_stats_md(const std::vector<SignificanceReport>& reports);

struct ReportArtifacts {
    std::filesystem::path curves_ssim, curves_psnr, curves_is;
    std::filesystem::path comparison_md;
    std::filesystem::path stats_json, stats_md;
    std::filesystem::path report_json;
};

// Emits curve plots, comparison.md, stats_report.{json,md}, and report.json
// under out_dir. Stats sections are skipped (with a note) when fewer than two
// runs are available.
ReportArtifacts write_benchmark_report(const std::vector<RunSummary>& runs,
                                       const std::vector<SignificanceReport>& stats,
                                       const std::string& config_hash,
                                       const std::filesystem::path& out_dir);

}  // namespace ganbench
