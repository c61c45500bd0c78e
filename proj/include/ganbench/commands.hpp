#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ganbench/config.hpp"
#include "ganbench/report.hpp"

namespace ganbench {

struct CommandOptions {
    bool quiet = false;
    bool verbose = false;
};

// Builds (or validates) the dataset under <output>/dataset. Re-running with an
// unchanged config is a no-op keyed on the dataset hash stamped into the
// manifest.
void cmd_prepare_data(const BenchmarkConfig& config, const CommandOptions& opts = {});

// Trains `family` ("vanilla", "dcgan", "wgan", or "all") against the prepared
// dataset. Run directories land in <output>/runs/<run_id>. For "all", run
// seeds derive from the master seed as seed + family index.
std::vector<std::filesystem::path> cmd_train(const BenchmarkConfig& config,
                                             const std::string& family,
                                             std::optional<std::uint64_t> seed_override = {},
                                             std::optional<int> epochs_override = {},
                                             const CommandOptions& opts = {});

// Recomputes the final metrics of a completed run from its final checkpoint
// and reports them (verifying against the recorded manifest values).
MetricSnapshot cmd_evaluate(const std::filesystem::path& run_dir,
                            const MetricsConfig& metrics = {},
                            const CommandOptions& opts = {});

// ANOVA + Tukey over the per-image observations of the given runs, grouped by
// family. Writes stats_report.{json,md} into out_dir.
std::vector<SignificanceReport> cmd_stats(const std::vector<std::filesystem::path>& run_dirs,
                                          const StatsConfig& stats,
                                          const std::filesystem::path& out_dir,
                                          const CommandOptions& opts = {});

// Aggregates every run under <output>/runs into curves, comparison tables,
// and the benchmark report under <output>/report.
ReportArtifacts cmd_report(const BenchmarkConfig& config, const CommandOptions& opts = {});

// Helpers shared with tests.
std::filesystem::path dataset_dir(const BenchmarkConfig& config);
std::filesystem::path runs_dir(const BenchmarkConfig& config);
std::vector<MetricGroup> observation_groups(const std::vector<std::filesystem::path>& run_dirs,
                                            const std::string& metric);

}  // namespace ganbench
