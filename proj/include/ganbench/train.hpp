#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ganbench/adam.hpp"
#include "ganbench/checkpoint.hpp"
#include "ganbench/classifier.hpp"
#include "ganbench/data_pipeline.hpp"
#include "ganbench/metrics.hpp"
#include "ganbench/models.hpp"

namespace ganbench {

struct Hyperparameters {
    ModelFamily family = ModelFamily::VANILLA;
    int latent_dim = 100;
    int batch_size = 128;
    int epochs = 2000;
    double lr_generator = 0.00004;
    double lr_discriminator = 0.0001;
    std::string optimizer = "adam";
    double adam_beta1 = 0.5;
    double adam_beta2 = 0.999;
    double clip_c = 0.01;  // WGAN only
    int n_critic = 5;      // WGAN only
    int eval_every = 50;
    bool saturating_generator_loss = false;
    ModelOptions model;

    static Hyperparameters defaults(ModelFamily family);
    void validate() const;
};

struct EpochRecord {
    int epoch = 0;  // 1-based
    double g_loss = 0.0;
    double d_loss = 0.0;
    int clamp_events = 0;
    std::optional<MetricSnapshot> metric_snapshot;
};

struct TrainRun {
    std::string run_id;
    Hyperparameters hyper;
    std::uint64_t seed = 0;
    std::vector<EpochRecord> epoch_records;
    ParameterStore generator_params;
    ParameterStore discriminator_params;
    NetworkSpec generator_spec;
    NetworkSpec discriminator_spec;
    std::string dataset_ref;
    double wall_time_sec = 0.0;
};

struct EvalContext {
    ClassifierBackend* classifier = nullptr;  // required when eval runs
    PairingStrategy pairing = PairingStrategy::index;
    int is_splits = 10;
    SsimConstants ssim_consts;
    double psnr_cap_db = 100.0;
};

struct TrainHooks {
    // Fires after every critic update (post-clip); WGAN only.
    std::function<void(const ParameterStore& critic, int step)> after_critic_update;
    std::function<void(const EpochRecord&)> after_epoch;
};

struct TrainOptions {
    // When set, checkpoints land here; a diagnostic checkpoint is written on
    // NonFiniteLoss.
    std::filesystem::path checkpoint_dir;
    int checkpoint_every = 0;  // epochs; 0 disables periodic checkpoints
    std::filesystem::path resume_from;  // empty = fresh run
};

TrainRun train(const DatasetManifest& dataset, const Hyperparameters& hyper, std::uint64_t seed,
               const EvalContext& eval, const TrainHooks& hooks = {},
               const TrainOptions& opts = {});

// Per-observation metric values backing a MetricSnapshot; the raw groups fed
// to the significance analysis.
struct PerImageObservations {
    std::vector<double> ssim;          // one per paired image
    std::vector<double> psnr;          // one per paired image
    std::vector<double> is_per_split;  // one per inception-score split
};

// Generates |test| images from seeded latents with a frozen generator (eval
// mode), maps tanh output to [0,1], and scores against the test split.
MetricSnapshot evaluate_epoch(Network& generator, const Tensor& eval_latents,
                              const std::vector<const ImageSample*>& test_split,
                              const EvalContext& eval, int epoch,
                              PerImageObservations* observations = nullptr);

// `training_log.csv` row set; metric columns stay empty on non-eval epochs.
void write_training_log(const TrainRun& run, const std::filesystem::path& path);

}  // namespace ganbench
