#include "ganbench/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>

#include "ganbench/errors.hpp"

namespace ganbench {

namespace {

void log_line(const CommandOptions& opts, const std::string& msg) {
    if (!opts.quiet) std::cout << msg << "\n";
}

DatasetManifest build_dataset(const BenchmarkConfig& config, const CommandOptions& opts) {
    const auto& d = config.dataset;
    DatasetManifest manifest;
    if (d.source == "synthetic") {
        manifest = make_synthetic_dataset(d.synthetic_n, d.resolution, d.resolution, d.split_seed);
    } else {
        const IngestResult ingest = ingest_dicom(d.source, d.modality);
        for (const auto& w : ingest.warnings) log_line(opts, "warning: " + w);
        manifest.dataset_id = d.modality;
        int idx = 0;
        for (const auto& study : ingest.studies) {
            ImageSample sample;
            if (d.normalize == "per_image") {
                if (study.pixel_min >= study.pixel_max)
                    throw DegenerateRange("prepare-data: constant image " +
                                          study.source_path.string());
                sample.pixels = normalize_pixels(study.pixels, study.pixel_min, study.pixel_max);
            } else {
                sample.pixels = normalize_pixels(study.pixels, d.window_lo, d.window_hi);
            }
            char id[32];
            std::snprintf(id, sizeof(id), "%s_%04d", d.modality.c_str(), idx++);
            sample.sample_id = id;
            manifest.samples.push_back(resize(
                ImageSample{std::move(sample.pixels), sample.sample_id, Split::unassigned},
                d.resolution, d.resolution));
        }
        manifest.height = d.resolution;
        manifest.width = d.resolution;
    }
    manifest = split_dataset(std::move(manifest), d.split_ratio, d.split_seed);
    manifest.config_hash = config.dataset_hash();
    return manifest;
}

DatasetManifest load_prepared_dataset(const BenchmarkConfig& config) {
    const auto manifest_path = dataset_dir(config) / "manifest.json";
    if (!std::filesystem::exists(manifest_path))
        throw ConfigError("train: no prepared dataset at " + manifest_path.string() +
                          " (run prepare-data first)");
    DatasetManifest manifest = load_dataset(manifest_path);
    if (manifest.config_hash != config.dataset_hash())
        throw ConfigError("train: dataset at " + manifest_path.string() +
                          " was prepared with a different config (hash " + manifest.config_hash +
                          " vs " + config.dataset_hash() + "); re-run prepare-data");
    return manifest;
}

int family_index(ModelFamily f) {
    switch (f) {
        case ModelFamily::VANILLA: return 0;
        case ModelFamily::DCGAN: return 1;
        case ModelFamily::WGAN: return 2;
    }
    return 0;
}

void write_observations(const std::filesystem::path& path, const PerImageObservations& obs,
                        int epoch) {
    nlohmann::ordered_json j;
    j["epoch"] = epoch;
    j["ssim"] = obs.ssim;
    j["psnr"] = obs.psnr;
    j["is_splits"] = obs.is_per_split;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IOError("cannot write " + path.string());
    out << j.dump(2) << "\n";
}

std::filesystem::path train_one(const BenchmarkConfig& config, const DatasetManifest& dataset,
                                Hyperparameters hyper, std::uint64_t seed,
                                const CommandOptions& opts) {
    const std::string run_id = to_string(hyper.family) + "-seed" + std::to_string(seed);
    const auto run_dir = runs_dir(config) / run_id;
    std::filesystem::create_directories(run_dir / "checkpoints");

    log_line(opts, "training " + run_id + " (" + std::to_string(hyper.epochs) + " epochs)");

    const auto classifier = make_classifier(config.metrics);
    const EvalContext eval = make_eval_context(config.metrics, *classifier);

    TrainHooks hooks;
    if (opts.verbose) {
        hooks.after_epoch = [&](const EpochRecord& rec) {
            std::cout << run_id << " epoch " << rec.epoch << " g_loss=" << rec.g_loss
                      << " d_loss=" << rec.d_loss << "\n";
        };
    }
    TrainOptions topts;
    topts.checkpoint_dir = run_dir / "checkpoints";
    topts.checkpoint_every = config.checkpoint_every;

    TrainRun run;
    try {
        run = train(dataset, hyper, seed, eval, hooks, topts);
    } catch (const Error& e) {
        throw Error(to_string(hyper.family) + ": " + e.what());
    }
    run.dataset_ref = (dataset_dir(config) / "manifest.json").generic_string();

    write_run_manifest(run, run_dir / "run.json");
    write_training_log(run, run_dir / "training_log.csv");

    // Final per-image observations for the significance analysis.
    const auto test_split = dataset.members(Split::test);
    if (!test_split.empty() && hyper.eval_every > 0) {
        Network gen(build_generator(hyper.family, hyper.latent_dim, dataset.height, hyper.model),
                    run.generator_params);
        Rng rng_eval(mix_seed(seed, 6));
        const Tensor latents =
            sample_latent(static_cast<int>(test_split.size()), hyper.latent_dim, rng_eval);
        PerImageObservations obs;
        const MetricSnapshot snap =
            evaluate_epoch(gen, latents, test_split, eval, hyper.epochs, &obs);
        write_observations(run_dir / "observations.json", obs, snap.epoch);
    }
    log_line(opts, "finished " + run_id);
    return run_dir;
}

}  // namespace

std::filesystem::path dataset_dir(const BenchmarkConfig& config) {
    return config.output_dir / "dataset";
}

std::filesystem::path runs_dir(const BenchmarkConfig& config) { return config.output_dir / "runs"; }

void cmd_prepare_data(const BenchmarkConfig& config, const CommandOptions& opts) {
    const auto dir = dataset_dir(config);
    const auto manifest_path = dir / "manifest.json";
    if (std::filesystem::exists(manifest_path)) {
        try {
            const DatasetManifest existing = load_dataset(manifest_path);
            if (existing.config_hash == config.dataset_hash()) {
                log_line(opts, "dataset up to date (" + existing.config_hash + ")");
                return;
            }
        } catch (const Error&) {
            // fall through and rebuild
        }
    }
    const DatasetManifest manifest = build_dataset(config, opts);
    write_dataset(manifest, dir);
    log_line(opts, "prepared " + std::to_string(manifest.samples.size()) + " samples (" +
                       std::to_string(manifest.members(Split::train).size()) + " train / " +
                       std::to_string(manifest.members(Split::test).size()) + " test) under " +
                       dir.generic_string());
}

std::vector<std::filesystem::path> cmd_train(const BenchmarkConfig& config,
                                             const std::string& family,
                                             std::optional<std::uint64_t> seed_override,
                                             std::optional<int> epochs_override,
                                             const CommandOptions& opts) {
    const DatasetManifest dataset = load_prepared_dataset(config);
    const std::uint64_t base_seed = seed_override.value_or(config.master_seed);

    std::vector<ModelFamily> targets;
    if (family == "all")
        targets = {ModelFamily::VANILLA, ModelFamily::DCGAN, ModelFamily::WGAN};
    else
        targets = {family_from_string(family)};

    std::vector<std::filesystem::path> run_dirs;
    for (const ModelFamily f : targets) {
        Hyperparameters hyper = config.families.at(f);
        if (epochs_override) hyper.epochs = *epochs_override;
        const std::uint64_t seed =
            family == "all" ? base_seed + static_cast<std::uint64_t>(family_index(f)) : base_seed;
        run_dirs.push_back(train_one(config, dataset, hyper, seed, opts));
    }
    return run_dirs;
}

MetricSnapshot cmd_evaluate(const std::filesystem::path& run_dir, const MetricsConfig& metrics,
                            const CommandOptions& opts) {
    const RunSummary run = load_run(run_dir);
    const DatasetManifest dataset = load_dataset(run.dataset_ref);
    const auto test_split = dataset.members(Split::test);
    if (test_split.empty()) throw EmptyTestSplit("evaluate: dataset has no test split");

    const auto ckpt_path = run_dir / "checkpoints" / "final.ckpt";
    if (!std::filesystem::exists(ckpt_path))
        throw MissingRuns("evaluate: no final checkpoint at " + ckpt_path.string());
    const Checkpoint ckpt = load_checkpoint(ckpt_path);

    const NetworkSpec gen_spec =
        build_generator(run.hyper.family, run.hyper.latent_dim, dataset.height, run.hyper.model);
    ParameterStore params = init_parameters(gen_spec, mix_seed(run.seed, 1));
    for (auto& [name, t] : params.tensors) {
        const auto it = ckpt.tensors.find("gen." + name);
        if (it == ckpt.tensors.end())
            throw CorruptCheckpoint("evaluate: checkpoint missing tensor gen." + name);
        if (it->second.shape != t.shape)
            throw CorruptCheckpoint("evaluate: checkpoint shape mismatch for gen." + name);
        t = it->second;
    }
    Network gen(gen_spec, params);

    const auto classifier = make_classifier(metrics);
    const EvalContext eval = make_eval_context(metrics, *classifier);
    Rng rng_eval(mix_seed(run.seed, 6));
    const Tensor latents =
        sample_latent(static_cast<int>(test_split.size()), run.hyper.latent_dim, rng_eval);
    const MetricSnapshot snap =
        evaluate_epoch(gen, latents, test_split, eval, static_cast<int>(ckpt.epoch));

    log_line(opts, "run " + run.run_id + " epoch " + std::to_string(snap.epoch) +
                       ": ssim=" + std::to_string(snap.ssim_mean) +
                       " psnr=" + std::to_string(snap.psnr_mean) +
                       " is=" + std::to_string(snap.is_mean));
    if (run.final_metrics && std::abs(run.final_metrics->ssim_mean - snap.ssim_mean) > 1e-9)
        log_line(opts, "warning: recomputed SSIM differs from run.json (" +
                           std::to_string(run.final_metrics->ssim_mean) + ")");
    return snap;
}

std::vector<MetricGroup> observation_groups(const std::vector<std::filesystem::path>& run_dirs,
                                            const std::string& metric) {
    std::map<int, MetricGroup> by_family;  // keyed by family index for stable order
    for (const auto& dir : run_dirs) {
        const auto obs_path = dir / "observations.json";
        if (!std::filesystem::exists(obs_path))
            throw MissingRuns("stats: no observations.json in " + dir.string());
        std::ifstream in(obs_path);
        nlohmann::json j;
        in >> j;
        const RunSummary run = load_run(dir);
        const std::string key = metric == "is" ? "is_splits" : metric;
        auto& group = by_family[family_index(run.family)];
        group.label = to_string(run.family);
        for (const auto& v : j.at(key)) group.samples.push_back(v.get<double>());
    }
    std::vector<MetricGroup> groups;
    for (auto& [_, g] : by_family) groups.push_back(std::move(g));
    return groups;
}

std::vector<SignificanceReport> cmd_stats(const std::vector<std::filesystem::path>& run_dirs,
                                          const StatsConfig& stats,
                                          const std::filesystem::path& out_dir,
                                          const CommandOptions& opts) {
    if (run_dirs.empty()) throw MissingRuns("stats: no run directories given");

    std::vector<SignificanceReport> reports;
    for (const std::string metric : {"ssim", "psnr", "is"}) {
        const auto groups = observation_groups(run_dirs, metric);
        if (groups.size() < 2) {
            log_line(opts, "warning: stats skipped for " + metric +
                               " (need >= 2 family groups, have " +
                               std::to_string(groups.size()) + ")");
            continue;
        }
        const AnovaResult anova = one_way_anova(groups, stats.alphas);
        const double alpha = stats.alphas.empty() ? 0.05 : stats.alphas.front();
        const auto tukey = tukey_hsd(groups, alpha);
        reports.push_back(significance_report(metric, anova, tukey, stats.alphas));
    }

    std::filesystem::create_directories(out_dir);
    nlohmann::ordered_json json_out = nlohmann::ordered_json::array();
    for (const auto& rep : reports) json_out.push_back(to_json(rep));
    {
        std::ofstream out(out_dir / "stats_report.json", std::ios::binary);
        if (!out) throw IOError("cannot write stats_report.json");
        out << json_out.dump(2) << "\n";
    }
    {
        std::ofstream out(out_dir / "stats_report.md", std::ios::binary);
        if (!out) throw IOError("cannot write stats_report.md");
        out << render_stats_md(reports);
    }
    log_line(opts, "stats written to " + out_dir.generic_string());
    return reports;
}

ReportArtifacts cmd_report(const BenchmarkConfig& config, const CommandOptions& opts) {
    const auto rdir = runs_dir(config);
    std::vector<std::filesystem::path> run_paths;
    if (std::filesystem::is_directory(rdir)) {
        for (const auto& entry : std::filesystem::directory_iterator(rdir))
            if (entry.is_directory() && std::filesystem::exists(entry.path() / "run.json"))
                run_paths.push_back(entry.path());
    }
    if (run_paths.empty()) throw MissingRuns("report: no completed runs under " + rdir.string());
    std::sort(run_paths.begin(), run_paths.end());

    std::vector<RunSummary> runs;
    for (const auto& p : run_paths) runs.push_back(load_run(p));
    std::sort(runs.begin(), runs.end(), [](const RunSummary& a, const RunSummary& b) {
        const int fa = family_index(a.family), fb = family_index(b.family);
        return fa != fb ? fa < fb : a.seed < b.seed;
    });

    std::vector<SignificanceReport> stats;
    bool have_observations = true;
    for (const auto& p : run_paths)
        if (!std::filesystem::exists(p / "observations.json")) have_observations = false;
    std::set<int> families;
    for (const auto& r : runs) families.insert(family_index(r.family));
    if (families.size() >= 2 && have_observations) {
        stats = cmd_stats(run_paths, config.stats, config.output_dir / "report",
                          CommandOptions{true, false});
    } else {
        log_line(opts, "warning: stats skipped (need >= 2 families with observations)");
    }

    const auto artifacts =
        write_benchmark_report(runs, stats, config.hash(), config.output_dir / "report");
    log_line(opts, "report written to " + (config.output_dir / "report").generic_string());
    return artifacts;
}

}  // namespace ganbench
