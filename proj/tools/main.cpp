#include <cstdlib>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ganbench/commands.hpp"
#include "ganbench/errors.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitTrain = 4;
constexpr int kExitReport = 5;

ganbench::BenchmarkConfig load(const std::string& config_path) {
    auto cfg = ganbench::load_config(config_path);
    if (const char* env = std::getenv("GANBENCH_OUTPUT"); env != nullptr && *env != '\0')
        cfg.output_dir = env;
    return cfg;
}

int run_guarded(int failure_code, const std::function<void()>& body) {
    try {
        body();
        return kExitOk;
    } catch (const ganbench::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return failure_code;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"GAN benchmarking harness"};
    app.require_subcommand(1);

    ganbench::CommandOptions opts;
    app.add_flag("--quiet", opts.quiet, "suppress progress output");
    app.add_flag("--verbose", opts.verbose, "per-epoch progress output");

    std::string config_path;
    std::string family = "all";
    std::optional<std::uint64_t> seed;
    std::optional<int> epochs;
    std::string run_dir;
    std::vector<std::string> run_dirs;
    std::string stats_out = ".";

    auto* prepare = app.add_subcommand("prepare-data", "build the dataset from the config");
    prepare->add_option("--config", config_path, "benchmark config file")->required();

    auto* train = app.add_subcommand("train", "train one family or all three");
    train->add_option("--config", config_path, "benchmark config file")->required();
    train->add_option("--family", family, "vanilla|dcgan|wgan|all");
    std::uint64_t seed_val = 0;
    int epochs_val = 0;
    auto* seed_opt = train->add_option("--seed", seed_val, "override the run seed");
    auto* epochs_opt = train->add_option("--epochs", epochs_val, "override the epoch budget");

    auto* evaluate = app.add_subcommand("evaluate", "recompute final metrics for a run");
    evaluate->add_option("--run", run_dir, "run directory")->required();

    auto* stats = app.add_subcommand("stats", "significance analysis over completed runs");
    stats->add_option("--runs", run_dirs, "run directories")->required()->expected(-1);
    stats->add_option("--out", stats_out, "output directory for the stats reports");

    auto* report = app.add_subcommand("report", "curves, comparison tables, and the full report");
    report->add_option("--config", config_path, "benchmark config file")->required();

    CLI11_PARSE(app, argc, argv);

    if (*seed_opt) seed = seed_val;
    if (*epochs_opt) epochs = epochs_val;

    if (prepare->parsed())
        return run_guarded(kExitData, [&] { ganbench::cmd_prepare_data(load(config_path), opts); });
    if (train->parsed())
        return run_guarded(kExitTrain, [&] {
            ganbench::cmd_train(load(config_path), family, seed, epochs, opts);
        });
    if (evaluate->parsed())
        return run_guarded(kExitReport,
                           [&] { ganbench::cmd_evaluate(run_dir, ganbench::MetricsConfig{}, opts); });
    if (stats->parsed())
        return run_guarded(kExitReport, [&] {
            std::vector<std::filesystem::path> dirs(run_dirs.begin(), run_dirs.end());
            ganbench::cmd_stats(dirs, ganbench::StatsConfig{}, stats_out, opts);
        });
    if (report->parsed())
        return run_guarded(kExitReport, [&] { ganbench::cmd_report(load(config_path), opts); });
    return kExitOk;
}
