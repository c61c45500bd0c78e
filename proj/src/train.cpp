#include "ganbench/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "ganbench/losses.hpp"

namespace ganbench {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

Tensor batch_from_samples(const std::vector<const ImageSample*>& samples,
                          const std::vector<std::size_t>& order, std::size_t begin,
                          std::size_t count) {
    const int h = samples[order[begin]]->height();
    const int w = samples[order[begin]]->width();
    Tensor t({static_cast<int>(count), 1, h, w});
    for (std::size_t i = 0; i < count; ++i) {
        const Image& px = samples[order[begin + i]]->pixels;
        for (int r = 0; r < h; ++r)
            for (int c = 0; c < w; ++c)
                t.data[(static_cast<long>(i) * h + r) * w + c] = 2.0 * px(r, c) - 1.0;
    }
    return t;
}

Tensor concat_batches(const Tensor& a, const Tensor& b) {
    std::vector<int> shape = a.shape;
    shape[0] += b.dim(0);
    Tensor out(shape);
    out.data.head(a.size()) = a.data;
    out.data.tail(b.size()) = b.data;
    return out;
}

struct RunState {
    ParameterStore gen_params, disc_params;
    AdamState adam_g, adam_d;
    Rng rng_data, rng_latent, rng_dropout;
    int start_epoch = 1;
};

Checkpoint to_checkpoint(const RunState& st, int epoch, ModelFamily family) {
    Checkpoint ckpt;
    ckpt.epoch = epoch;
    for (const auto& [name, t] : st.gen_params.tensors) ckpt.tensors["gen." + name] = t;
    for (const auto& [name, t] : st.disc_params.tensors) ckpt.tensors["disc." + name] = t;
    for (const auto& [name, t] : st.adam_g.m) ckpt.tensors["adam_g.m." + name] = t;
    for (const auto& [name, t] : st.adam_g.v) ckpt.tensors["adam_g.v." + name] = t;
    for (const auto& [name, t] : st.adam_d.m) ckpt.tensors["adam_d.m." + name] = t;
    for (const auto& [name, t] : st.adam_d.v) ckpt.tensors["adam_d.v." + name] = t;
    ckpt.meta["family"] = to_string(family);
    ckpt.meta["adam_g.step"] = std::to_string(st.adam_g.step);
    ckpt.meta["adam_d.step"] = std::to_string(st.adam_d.step);
    ckpt.meta["rng_data"] = st.rng_data.serialize();
    ckpt.meta["rng_latent"] = st.rng_latent.serialize();
    ckpt.meta["rng_dropout"] = st.rng_dropout.serialize();
    return ckpt;
}

void restore_from_checkpoint(RunState& st, const Checkpoint& ckpt) {
    auto restore_group = [&](const std::string& prefix, std::map<std::string, Tensor>& dst) {
        for (auto& [name, t] : dst) {
            const auto it = ckpt.tensors.find(prefix + name);
            if (it == ckpt.tensors.end())
                throw CorruptCheckpoint("checkpoint: missing tensor " + prefix + name);
            if (it->second.shape != t.shape)
                throw CorruptCheckpoint("checkpoint: shape mismatch for " + prefix + name);
            t = it->second;
        }
    };
    restore_group("gen.", st.gen_params.tensors);
    restore_group("disc.", st.disc_params.tensors);
    for (const auto& [name, t] : ckpt.tensors) {
        if (name.rfind("adam_g.m.", 0) == 0) st.adam_g.m[name.substr(9)] = t;
        else if (name.rfind("adam_g.v.", 0) == 0) st.adam_g.v[name.substr(9)] = t;
        else if (name.rfind("adam_d.m.", 0) == 0) st.adam_d.m[name.substr(9)] = t;
        else if (name.rfind("adam_d.v.", 0) == 0) st.adam_d.v[name.substr(9)] = t;
    }
    st.adam_g.step = std::stol(ckpt.meta.at("adam_g.step"));
    st.adam_d.step = std::stol(ckpt.meta.at("adam_d.step"));
    st.rng_data.deserialize(ckpt.meta.at("rng_data"));
    st.rng_latent.deserialize(ckpt.meta.at("rng_latent"));
    st.rng_dropout.deserialize(ckpt.meta.at("rng_dropout"));
    st.start_epoch = static_cast<int>(ckpt.epoch) + 1;
}

}  // namespace

Hyperparameters Hyperparameters::defaults(ModelFamily family) {
    Hyperparameters h;
    h.family = family;
    switch (family) {
        case ModelFamily::VANILLA:
            h.epochs = 2000;
            h.lr_generator = 0.00004;
            h.lr_discriminator = 0.0001;
            break;
        case ModelFamily::DCGAN:
        case ModelFamily::WGAN:
            h.epochs = 1000;
            h.lr_generator = 0.00005;
            h.lr_discriminator = 0.0002;
            break;
    }
    return h;
}

void Hyperparameters::validate() const {
    if (latent_dim < 1 || batch_size < 1 || epochs < 1 || eval_every < 0)
        throw Error("hyperparameters: counts must be positive");
    if (lr_generator <= 0.0 || lr_discriminator <= 0.0)
        throw Error("hyperparameters: learning rates must be positive");
    if (optimizer != "adam") throw Error("hyperparameters: only adam is supported");
    if (family == ModelFamily::WGAN) {
        if (clip_c <= 0.0) throw NonPositiveClip("hyperparameters: clip_c must be > 0 for WGAN");
        if (n_critic < 1) throw Error("hyperparameters: n_critic must be >= 1 for WGAN");
    }
}

MetricSnapshot evaluate_epoch(Network& generator, const Tensor& eval_latents,
                              const std::vector<const ImageSample*>& test_split,
                              const EvalContext& eval, int epoch,
                              PerImageObservations* observations) {
    if (test_split.empty()) throw EmptyTestSplit("evaluate: test split is empty");
    if (eval.classifier == nullptr) throw Error("evaluate: classifier backend is required");

    const Tensor out = generator.forward(eval_latents, false);
    const int n = out.dim(0), h = out.dim(2), w = out.dim(3);
    std::vector<Image> generated;
    generated.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        Image img(h, w);
        for (int r = 0; r < h; ++r)
            for (int c = 0; c < w; ++c)
                img(r, c) = (out.data[(static_cast<long>(i) * h + r) * w + c] + 1.0) / 2.0;
        generated.push_back(std::move(img));
    }
    std::vector<Image> reference;
    reference.reserve(test_split.size());
    for (const auto* s : test_split) reference.push_back(s->pixels);

    const auto pairs = pair_images(generated, reference, eval.pairing);
    std::vector<double> ssims, psnrs;
    for (const auto& [g, r] : pairs) {
        ssims.push_back(ssim(generated[static_cast<std::size_t>(g)],
                             reference[static_cast<std::size_t>(r)], eval.ssim_consts)
                            .mssim);
        psnrs.push_back(psnr(generated[static_cast<std::size_t>(g)],
                             reference[static_cast<std::size_t>(r)], eval.ssim_consts.L,
                             eval.psnr_cap_db)
                            .db);
    }
    auto mean_std = [](const std::vector<double>& v) {
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        double var = 0.0;
        for (double x : v) var += (x - mean) * (x - mean);
        var /= static_cast<double>(v.size());
        return std::pair<double, double>(mean, std::sqrt(var));
    };

    MetricSnapshot snap;
    snap.epoch = epoch;
    std::tie(snap.ssim_mean, snap.ssim_std) = mean_std(ssims);
    std::tie(snap.psnr_mean, snap.psnr_std) = mean_std(psnrs);
    const int splits = std::min<int>(eval.is_splits, static_cast<int>(generated.size()));
    std::tie(snap.is_mean, snap.is_std) = inception_score(generated, *eval.classifier, splits);
    snap.pairing = to_string(eval.pairing);
    snap.n_images = static_cast<int>(pairs.size());
    if (observations != nullptr) {
        observations->ssim = ssims;
        observations->psnr = psnrs;
        observations->is_per_split = inception_score_splits(generated, *eval.classifier, splits);
    }
    return snap;
}

TrainRun train(const DatasetManifest& dataset, const Hyperparameters& hyper, std::uint64_t seed,
               const EvalContext& eval, const TrainHooks& hooks, const TrainOptions& opts) {
    const auto t0 = std::chrono::steady_clock::now();
    hyper.validate();
    if (dataset.height != dataset.width)
        throw UnsupportedShape("train: dataset resolution must be square");

    const auto train_split = dataset.members(Split::train);
    const auto test_split = dataset.members(Split::test);
    if (train_split.size() < static_cast<std::size_t>(hyper.batch_size))
        throw EmptyTrainSplit("train: train split smaller than one batch");

    const int side = dataset.height;
    const int m = hyper.batch_size;
    const bool wgan = hyper.family == ModelFamily::WGAN;

    TrainRun run;
    run.run_id = to_string(hyper.family) + "-seed" + std::to_string(seed);
    run.hyper = hyper;
    run.seed = seed;
    run.dataset_ref = dataset.dataset_id;
    run.generator_spec = build_generator(hyper.family, hyper.latent_dim, side, hyper.model);
    run.discriminator_spec = build_discriminator(hyper.family, side, hyper.model);

    RunState st;
    st.gen_params = init_parameters(run.generator_spec, mix_seed(seed, 1));
    st.disc_params = init_parameters(run.discriminator_spec, mix_seed(seed, 2));
    st.rng_data = Rng(mix_seed(seed, 3));
    st.rng_latent = Rng(mix_seed(seed, 4));
    st.rng_dropout = Rng(mix_seed(seed, 5));
    if (!opts.resume_from.empty())
        restore_from_checkpoint(st, load_checkpoint(opts.resume_from));

    Network gen(run.generator_spec, st.gen_params);
    Network disc(run.discriminator_spec, st.disc_params);

    // Fixed evaluation latents: metric curves track the generator, not the
    // latent draw.
    Tensor eval_latents;
    if (!test_split.empty()) {
        Rng rng_eval(mix_seed(seed, 6));
        eval_latents = sample_latent(static_cast<int>(test_split.size()), hyper.latent_dim,
                                     rng_eval);
    }

    std::vector<std::size_t> order(train_split.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    const std::size_t n_batches = train_split.size() / static_cast<std::size_t>(m);
    int global_critic_steps = 0;

    auto write_ckpt = [&](int epoch, const std::string& name) {
        if (opts.checkpoint_dir.empty()) return;
        std::filesystem::create_directories(opts.checkpoint_dir);
        save_checkpoint(to_checkpoint(st, epoch, hyper.family), opts.checkpoint_dir / name);
    };

    for (int epoch = st.start_epoch; epoch <= hyper.epochs; ++epoch) {
        // Re-derive the epoch order purely from the serialized rng stream so
        // resuming from a checkpoint reproduces the batch composition.
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        for (std::size_t i = order.size() - 1; i > 0; --i)
            std::swap(order[i], order[st.rng_data.below(i + 1)]);

        double d_loss_sum = 0.0, g_loss_sum = 0.0;
        long d_steps = 0, g_steps = 0;
        int clamp_events = 0;

        for (std::size_t b = 0; b < n_batches; ++b) {
            const Tensor real = batch_from_samples(train_split, order, b * m,
                                                   static_cast<std::size_t>(m));
            const int critic_iters = wgan ? hyper.n_critic : 1;

            for (int j = 0; j < critic_iters; ++j) {
                const Tensor z = sample_latent(m, hyper.latent_dim, st.rng_latent);
                const Tensor fake = gen.forward(z, true, &st.rng_dropout);
                const Tensor both = concat_batches(real, fake);
                const Tensor scores = disc.forward(both, true, &st.rng_dropout);

                AdversarialBatchScores s;
                s.d_real = scores.data.head(m);
                s.d_fake = scores.data.tail(m);
                s.critic_mode = wgan;
                const LossWithGrad loss =
                    wgan ? wasserstein_critic_loss(s) : discriminator_bce_loss(s);

                Tensor grad({2 * m, 1});
                grad.data.head(m) = loss.grad_real;
                grad.data.tail(m) = loss.grad_fake;
                disc.zero_grads();
                disc.backward(grad);
                adam_update(st.disc_params, disc.grads(), st.adam_d, hyper.lr_discriminator,
                            hyper.adam_beta1, hyper.adam_beta2);
                if (wgan) {
                    clip_parameters(st.disc_params, hyper.clip_c);
                    ++global_critic_steps;
                    if (hooks.after_critic_update)
                        hooks.after_critic_update(st.disc_params, global_critic_steps);
                }
                d_loss_sum += loss.value;
                clamp_events += loss.clamp_events;
                ++d_steps;
            }

            // generator update
            {
                const Tensor z = sample_latent(m, hyper.latent_dim, st.rng_latent);
                const Tensor fake = gen.forward(z, true, &st.rng_dropout);
                const Tensor scores = disc.forward(fake, true, &st.rng_dropout);
                const Eigen::ArrayXd fake_scores = scores.data;
                const LossWithGrad loss =
                    wgan ? wasserstein_generator_loss(fake_scores)
                         : generator_bce_loss(fake_scores, hyper.saturating_generator_loss);

                Tensor grad({m, 1});
                grad.data = loss.grad_fake;
                disc.zero_grads();
                const Tensor d_images = disc.backward(grad);
                gen.zero_grads();
                gen.backward(d_images);
                adam_update(st.gen_params, gen.grads(), st.adam_g, hyper.lr_generator,
                            hyper.adam_beta1, hyper.adam_beta2);
                g_loss_sum += loss.value;
                clamp_events += loss.clamp_events;
                ++g_steps;
            }
        }

        EpochRecord rec;
        rec.epoch = epoch;
        rec.d_loss = d_steps > 0 ? d_loss_sum / static_cast<double>(d_steps) : 0.0;
        rec.g_loss = g_steps > 0 ? g_loss_sum / static_cast<double>(g_steps) : 0.0;
        rec.clamp_events = clamp_events;

        if (!std::isfinite(rec.d_loss) || !std::isfinite(rec.g_loss)) {
            write_ckpt(epoch, "diagnostic_epoch" + std::to_string(epoch) + ".ckpt");
            throw NonFiniteLoss("train: non-finite loss at epoch " + std::to_string(epoch) +
                                " (d=" + fmt(rec.d_loss) + ", g=" + fmt(rec.g_loss) + ")");
        }

        if (hyper.eval_every > 0 && epoch % hyper.eval_every == 0 && !test_split.empty())
            rec.metric_snapshot = evaluate_epoch(gen, eval_latents, test_split, eval, epoch);

        if (hooks.after_epoch) hooks.after_epoch(rec);
        run.epoch_records.push_back(std::move(rec));

        if (opts.checkpoint_every > 0 && epoch % opts.checkpoint_every == 0)
            write_ckpt(epoch, "epoch" + std::to_string(epoch) + ".ckpt");
    }

    write_ckpt(hyper.epochs, "final.ckpt");
    run.generator_params = std::move(st.gen_params);
    run.discriminator_params = std::move(st.disc_params);
    run.wall_time_sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return run;
}

void write_training_log(const TrainRun& run, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IOError("training log: cannot write " + path.string());
    out << "epoch,g_loss,d_loss,ssim_mean,ssim_std,psnr_mean,psnr_std,is_mean,is_std\n";
    for (const auto& rec : run.epoch_records) {
        out << rec.epoch << ',' << fmt(rec.g_loss) << ',' << fmt(rec.d_loss) << ',';
        if (rec.metric_snapshot) {
            const auto& s = *rec.metric_snapshot;
            out << fmt(s.ssim_mean) << ',' << fmt(s.ssim_std) << ',' << fmt(s.psnr_mean) << ','
                << fmt(s.psnr_std) << ',' << fmt(s.is_mean) << ',' << fmt(s.is_std);
        } else {
            out << ",,,,,";
        }
        out << '\n';
    }
}

}  // namespace ganbench
