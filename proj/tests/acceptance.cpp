// Acceptance gate: one pass/fail line per criterion, nonzero exit on any
// failure. Each criterion is self-contained and runs against the installed
// library (plus the golden report fixtures for criterion 8).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ganbench/classifier.hpp"
#include "ganbench/commands.hpp"
#include "ganbench/config.hpp"
#include "ganbench/data_pipeline.hpp"
#include "ganbench/losses.hpp"
#include "ganbench/metrics.hpp"
#include "ganbench/models.hpp"
#include "ganbench/rng.hpp"
#include "ganbench/stats.hpp"
#include "ganbench/train.hpp"

namespace fs = std::filesystem;
using namespace ganbench;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double now_sec() {
    using clock = std::chrono::steady_clock;
    static const clock::time_point t0 = clock::now();
    return std::chrono::duration<double>(clock::now() - t0).count();
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("ganbench_accept_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

Image random_image(Rng& rng, int h, int w) {
    Image img(h, w);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) img(r, c) = rng.uniform();
    return img;
}

// ---------------------------------------------------------------------------
// Criterion 1: closed-form metric oracles at pinned tolerances, under 5 s.
// ---------------------------------------------------------------------------
Outcome criterion1() {
    const double start = now_sec();
    std::ostringstream why;
    bool ok = true;
    auto expect = [&](bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            why << (why.str().empty() ? "" : "; ") << what;
        }
    };

    {  // SSIM of opposite constant images collapses to C1/(L^2+C1) ~ 1.0e-4
        SsimConstants k;
        k.L = 255.0;
        const Image x = Image::Constant(16, 16, 0.0);
        const Image y = Image::Constant(16, 16, 255.0);
        const auto s = ssim(x, y, k);
        expect(std::abs(s.mssim - 1.0e-4) <= 1e-6, "ssim constant-image oracle");
        expect(std::abs(s.contrast - 1.0) <= 1e-9 && std::abs(s.structure - 1.0) <= 1e-9,
               "ssim constant contrast/structure");
    }
    {  // PSNR closed forms at max_i = 255
        const Image x = Image::Constant(8, 8, 0.0);
        expect(std::abs(psnr(x, Image(Image::Constant(8, 8, 1.0)), 255.0).db -
                        48.130803608679344) <= 1e-3,
               "psnr MSE=1 oracle");
        expect(std::abs(psnr(x, Image(Image::Constant(8, 8, 16.0)), 255.0).db -
                        24.048673881253852) <= 1e-3,
               "psnr MSE=256 oracle");
    }
    {  // Inception score hand example: rows {1,0} and {0.5,0.5}
        MatrixRM rows(2, 2);
        rows << 1.0, 0.0, 0.5, 0.5;
        StubClassifier cls(rows);
        const std::vector<Image> imgs(2, Image::Constant(8, 8, 0.5));
        const auto [mean, sd] = inception_score(imgs, cls, 1);
        const double want =
            std::exp((std::log(4.0 / 3.0) + 0.5 * std::log(2.0 / 3.0) + 0.5 * std::log(2.0)) /
                     2.0);
        expect(std::abs(mean - want) <= 1e-6, "inception score hand example");
        (void)sd;
    }
    {  // BCE loss frozen values
        auto scores = [](double r, double f) {
            AdversarialBatchScores s;
            s.d_real = Eigen::ArrayXd::Constant(1, r);
            s.d_fake = Eigen::ArrayXd::Constant(1, f);
            return s;
        };
        expect(std::abs(discriminator_bce_loss(scores(0.9, 0.1)).value -
                        0.21072103131565256) <= 1e-9,
               "bce confident oracle");
        expect(std::abs(discriminator_bce_loss(scores(0.5, 0.5)).value -
                        1.3862943611198906) <= 1e-9,
               "bce chance oracle");
        expect(std::abs(generator_bce_loss(Eigen::ArrayXd::Constant(1, 0.1), false).value -
                        2.302585092994046) <= 1e-9,
               "non-saturating generator oracle");
    }
    {  // exact 1-D W1 fixtures
        Eigen::ArrayXd a(2), b(2), c(2), d(2);
        a << 0, 1;
        b << 2, 3;
        c << 0, 2;
        d << 1, 1;
        expect(exact_w1_empirical_1d(a, b).value == 2.0, "W1 shift oracle");
        expect(exact_w1_empirical_1d(c, d).value == 1.0, "W1 crossing oracle");
    }

    const double elapsed = now_sec() - start;
    expect(elapsed < 5.0, "runtime budget 5s exceeded");
    std::ostringstream detail;
    detail << "metric oracles, " << elapsed << "s";
    return {ok, ok ? detail.str() : why.str()};
}

// ---------------------------------------------------------------------------
// Criterion 2: property suites (SSIM invariances, PSNR monotonicity, IS
// oracle agreement, conv-vs-direct-summation), under 60 s.
// ---------------------------------------------------------------------------
double is_direct_oracle(const MatrixRM& probs) {
    Eigen::ArrayXd marginal = Eigen::ArrayXd::Zero(probs.cols());
    for (long r = 0; r < probs.rows(); ++r)
        for (long c = 0; c < probs.cols(); ++c) marginal[c] += probs(r, c);
    marginal /= static_cast<double>(probs.rows());
    double mean_kl = 0.0;
    for (long r = 0; r < probs.rows(); ++r) {
        double kl = 0.0;
        for (long c = 0; c < probs.cols(); ++c)
            if (probs(r, c) > 0.0) kl += probs(r, c) * std::log(probs(r, c) / marginal[c]);
        mean_kl += kl;
    }
    return std::exp(mean_kl / static_cast<double>(probs.rows()));
}

Tensor conv2d_direct(const Tensor& input, const Tensor& weight, const Tensor& bias, int stride,
                     int pad) {
    const int n = input.dim(0), in_ch = input.dim(1), h = input.dim(2), w = input.dim(3);
    const int out_ch = weight.dim(0), k = weight.dim(2);
    const int oh = (h + 2 * pad - k) / stride + 1;
    const int ow = (w + 2 * pad - k) / stride + 1;
    Tensor out;
    out.shape = {n, out_ch, oh, ow};
    out.data = Eigen::ArrayXd::Zero(static_cast<long>(n) * out_ch * oh * ow);
    auto in_at = [&](int b, int c, int r, int col) -> double {
        if (r < 0 || col < 0 || r >= h || col >= w) return 0.0;
        return input.data[((static_cast<long>(b) * in_ch + c) * h + r) * w + col];
    };
    for (int b = 0; b < n; ++b)
        for (int oc = 0; oc < out_ch; ++oc)
            for (int r = 0; r < oh; ++r)
                for (int c = 0; c < ow; ++c) {
                    double acc = bias.data[oc];
                    for (int ic = 0; ic < in_ch; ++ic)
                        for (int kr = 0; kr < k; ++kr)
                            for (int kc = 0; kc < k; ++kc)
                                acc += weight.data[((static_cast<long>(oc) * in_ch + ic) * k +
                                                    kr) *
                                                       k +
                                                   kc] *
                                       in_at(b, ic, r * stride - pad + kr,
                                             c * stride - pad + kc);
                    out.data[((static_cast<long>(b) * out_ch + oc) * oh + r) * ow + c] = acc;
                }
    return out;
}

Outcome criterion2() {
    const double start = now_sec();
    int failures = 0;
    std::ostringstream why;
    auto expect = [&](bool cond, const std::string& what) {
        if (!cond && failures++ < 5) why << (why.str().empty() ? "" : "; ") << what;
    };

    {  // SSIM symmetry / identity / range over 1000 random pairs
        Rng rng(2);
        for (int trial = 0; trial < 1000; ++trial) {
            const Image x = random_image(rng, 13, 13);
            const Image y = random_image(rng, 13, 13);
            const double xy = ssim(x, y).mssim;
            expect(std::abs(xy - ssim(y, x).mssim) < 1e-12, "ssim symmetry");
            expect(xy <= 1.0 + 1e-12 && xy >= -1.0 - 1e-12, "ssim range");
            expect(std::abs(ssim(x, x).mssim - 1.0) < 1e-12, "ssim identity");
        }
    }
    {  // PSNR strictly decreases with noise amplitude
        Rng rng(5);
        const Image x = random_image(rng, 16, 16);
        Image noise(16, 16);
        for (int r = 0; r < 16; ++r)
            for (int c = 0; c < 16; ++c) noise(r, c) = rng.gaussian();
        double prev = psnr(x, Image(x + 0.01 * noise), 1.0).db;
        for (const double amp : {0.02, 0.05, 0.1, 0.2}) {
            const double cur = psnr(x, Image(x + amp * noise), 1.0).db;
            expect(cur < prev, "psnr monotonicity");
            prev = cur;
        }
    }
    {  // IS vs direct-definition oracle on 500 random stochastic matrices
        Rng rng(6);
        const std::vector<Image> pool(8, Image::Constant(8, 8, 0.5));
        for (int trial = 0; trial < 500; ++trial) {
            const int n = 2 + static_cast<int>(rng.below(6));
            const int k = 2 + static_cast<int>(rng.below(5));
            MatrixRM probs(n, k);
            for (int r = 0; r < n; ++r) {
                double sum = 0.0;
                for (int c = 0; c < k; ++c) {
                    probs(r, c) = -std::log(rng.uniform());
                    sum += probs(r, c);
                }
                for (int c = 0; c < k; ++c) probs(r, c) /= sum;
            }
            StubClassifier cls(probs);
            std::vector<Image> imgs(pool.begin(), pool.begin() + n);
            const auto [mean, sd] = inception_score(imgs, cls, 1);
            (void)sd;
            expect(std::abs(mean - is_direct_oracle(probs)) < 1e-9, "IS oracle agreement");
            expect(mean >= 1.0 - 1e-9 && mean <= k + 1e-9, "IS in [1, K]");
        }
    }
    {  // conv2d layer vs direct summation, rel error <= 1e-5
        Rng rng(77);
        for (const auto& [in_ch, out_ch, size, k, stride, pad] :
             std::vector<std::tuple<int, int, int, int, int, int>>{
                 {1, 2, 8, 3, 1, 1}, {2, 3, 8, 4, 2, 1}, {3, 1, 6, 3, 1, 0}}) {
            NetworkSpec spec;
            spec.input_shape = {in_ch, size, size};
            spec.layers = {LayerSpec::Conv2d(in_ch, out_ch, k, stride, pad)};
            spec.output_shape = NetworkSpec::infer_shape(spec.layers[0], spec.input_shape);
            spec.head = Head::linear;
            ParameterStore params = init_parameters(spec, rng.below(1000), 0.5);
            Network net(spec, params);
            Tensor in;
            in.shape = {2, in_ch, size, size};
            in.data = Eigen::ArrayXd(2l * in_ch * size * size);
            for (long i = 0; i < in.data.size(); ++i) in.data[i] = rng.gaussian();
            const Tensor got = net.forward(in, false);
            const Tensor want = conv2d_direct(in, params.tensors.at("layer0.weight"),
                                              params.tensors.at("layer0.bias"), stride, pad);
            const double rel = (got.data - want.data).abs().maxCoeff() /
                               std::max(1.0, want.data.abs().maxCoeff());
            expect(got.shape == want.shape && rel <= 1e-5, "conv oracle");
        }
    }

    const double elapsed = now_sec() - start;
    expect(elapsed < 60.0, "runtime budget 60s exceeded");
    std::ostringstream detail;
    detail << "property suites, " << elapsed << "s";
    return {failures == 0, failures == 0 ? detail.str() : why.str()};
}

// ---------------------------------------------------------------------------
// Criterion 3: analytic loss gradients through a <=100-parameter network vs
// central finite differences, rel err <= 1e-4, 100 batches per loss.
// ---------------------------------------------------------------------------
enum class LossUnderTest { disc_bce, gen_saturating, gen_non_saturating, critic, wgan_gen };

int gradient_check(LossUnderTest which) {
    NetworkSpec spec;
    spec.input_shape = {4};
    const bool critic_like = which == LossUnderTest::critic || which == LossUnderTest::wgan_gen;
    spec.layers = {LayerSpec::Dense(4, 6), LayerSpec::LeakyRelu(0.2), LayerSpec::Dense(6, 1)};
    if (!critic_like) spec.layers.push_back(LayerSpec::Sigmoid());
    spec.output_shape = {1};
    spec.head = critic_like ? Head::linear : Head::sigmoid;

    const bool uses_real = which == LossUnderTest::disc_bce || which == LossUnderTest::critic;
    Rng rng(21 + static_cast<int>(which));
    int bad_trials = 0;
    for (int trial = 0; trial < 100; ++trial) {
        ParameterStore params = init_parameters(spec, 2000 + trial, 0.3);
        const int m = 3;
        Tensor real, fake;
        real.shape = fake.shape = {m, 4};
        real.data = Eigen::ArrayXd(m * 4);
        fake.data = Eigen::ArrayXd(m * 4);
        for (long i = 0; i < real.data.size(); ++i) {
            real.data[i] = rng.gaussian();
            fake.data[i] = rng.gaussian();
        }

        auto loss_of = [&](ParameterStore& p) -> LossWithGrad {
            AdversarialBatchScores s;
            s.critic_mode = critic_like;
            if (uses_real) s.d_real = Network(spec, p).forward(real, false).data;
            s.d_fake = Network(spec, p).forward(fake, false).data;
            switch (which) {
                case LossUnderTest::disc_bce: return discriminator_bce_loss(s);
                case LossUnderTest::gen_saturating: return generator_bce_loss(s.d_fake, true);
                case LossUnderTest::gen_non_saturating:
                    return generator_bce_loss(s.d_fake, false);
                case LossUnderTest::critic: return wasserstein_critic_loss(s);
                case LossUnderTest::wgan_gen: return wasserstein_generator_loss(s.d_fake);
            }
            return {};
        };

        // analytic dLoss/dParam via backprop on separate real/fake passes
        Network net_real(spec, params), net_fake(spec, params);
        AdversarialBatchScores s;
        s.critic_mode = critic_like;
        if (uses_real) s.d_real = net_real.forward(real, false).data;
        s.d_fake = net_fake.forward(fake, false).data;
        LossWithGrad l;
        switch (which) {
            case LossUnderTest::disc_bce: l = discriminator_bce_loss(s); break;
            case LossUnderTest::gen_saturating: l = generator_bce_loss(s.d_fake, true); break;
            case LossUnderTest::gen_non_saturating:
                l = generator_bce_loss(s.d_fake, false);
                break;
            case LossUnderTest::critic: l = wasserstein_critic_loss(s); break;
            case LossUnderTest::wgan_gen: l = wasserstein_generator_loss(s.d_fake); break;
        }
        Tensor gf;
        gf.shape = {m, 1};
        gf.data = l.grad_fake;
        net_fake.zero_grads();
        net_fake.backward(gf);
        if (uses_real) {
            Tensor gr;
            gr.shape = {m, 1};
            gr.data = l.grad_real;
            net_real.zero_grads();
            net_real.backward(gr);
        }

        bool ok = true;
        for (const auto& name : params.trainable) {
            const Tensor& af = net_fake.grads().at(name);
            for (long i = 0; i < af.data.size(); ++i) {
                double analytic = af.data[i];
                if (uses_real) analytic += net_real.grads().at(name).data[i];
                ParameterStore p = params;
                const double w0 = p.tensors.at(name).data[i];
                p.tensors.at(name).data[i] = w0 + 1e-6;
                const double up = loss_of(p).value;
                p.tensors.at(name).data[i] = w0 - 1e-6;
                const double down = loss_of(p).value;
                const double fd = (up - down) / 2e-6;
                if (std::abs(analytic - fd) > 1e-4 * std::max(1.0, std::abs(fd))) ok = false;
            }
        }
        if (!ok) ++bad_trials;
    }
    return bad_trials;
}

Outcome criterion3() {
    std::ostringstream why;
    bool ok = true;
    const std::vector<std::pair<LossUnderTest, const char*>> losses = {
        {LossUnderTest::disc_bce, "discriminator bce"},
        {LossUnderTest::gen_saturating, "saturating generator"},
        {LossUnderTest::gen_non_saturating, "non-saturating generator"},
        {LossUnderTest::critic, "wasserstein critic"},
        {LossUnderTest::wgan_gen, "wasserstein generator"},
    };
    for (const auto& [which, label] : losses) {
        const int bad = gradient_check(which);
        if (bad != 0) {
            ok = false;
            why << (why.str().empty() ? "" : "; ") << label << ": " << bad << "/100 batches off";
        }
    }
    return {ok, ok ? "all five losses, 100 batches each, rel err <= 1e-4" : why.str()};
}

// ---------------------------------------------------------------------------
// Criterion 4: weight-clipping invariant on a desk-scale WGAN run.
// ---------------------------------------------------------------------------
Outcome criterion4() {
    DatasetManifest ds = make_synthetic_dataset(16, 32, 32, 42);
    ds = split_dataset(ds, 0.7, 42);

    Hyperparameters hp = Hyperparameters::defaults(ModelFamily::WGAN);
    hp.epochs = 50;
    hp.batch_size = 8;
    hp.eval_every = 0;
    hp.model = ModelOptions{16, 8, 0.2, 0.3};

    int updates = 0, violations = 0;
    double observed_max = 0.0;
    TrainHooks hooks;
    hooks.after_critic_update = [&](const ParameterStore& critic, int) {
        ++updates;
        double max_abs = 0.0;
        for (const auto& name : critic.trainable)
            max_abs = std::max(max_abs, critic.tensors.at(name).data.abs().maxCoeff());
        observed_max = std::max(observed_max, max_abs);
        if (max_abs > hp.clip_c) ++violations;
    };

    EvalContext eval;  // eval disabled (eval_every = 0)
    train(ds, hp, 42, eval, hooks);

    std::ostringstream detail;
    detail << updates << " critic updates, max|w| = " << observed_max << " <= " << hp.clip_c
           << ", violations = " << violations;
    return {violations == 0 && updates > 0, detail.str()};
}

// ---------------------------------------------------------------------------
// Criterion 5: ANOVA / Tukey fixtures, brute-force agreement, invariances.
// ---------------------------------------------------------------------------
Outcome criterion5() {
    const double start = now_sec();
    std::ostringstream why;
    bool ok = true;
    auto expect = [&](bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            why << (why.str().empty() ? "" : "; ") << what;
        }
    };

    const std::vector<MetricGroup> fixture = {
        {"a", {1, 2, 3}}, {"b", {2, 3, 4}}, {"c", {3, 4, 5}}};
    {  // F = 3.0 exactly at df (2, 6)
        const AnovaResult r = one_way_anova(fixture);
        expect(std::abs(r.f_value - 3.0) <= 1e-12, "fixture F value");
        expect(r.df_between == 2 && r.df_within == 6, "fixture df");
    }
    {  // brute-force sums of squares on 500 random group sets
        Rng rng(11);
        for (int trial = 0; trial < 500; ++trial) {
            const int k = 2 + static_cast<int>(rng.below(4));
            std::vector<MetricGroup> groups(static_cast<std::size_t>(k));
            double grand_sum = 0.0;
            long total = 0;
            for (auto& g : groups) {
                const int n = 2 + static_cast<int>(rng.below(6));
                g.samples.resize(static_cast<std::size_t>(n));
                for (auto& v : g.samples) {
                    v = rng.gaussian() * (1.0 + rng.uniform() * 3.0);
                    grand_sum += v;
                }
                total += n;
            }
            const double grand = grand_sum / static_cast<double>(total);
            double ssb = 0.0, ssw = 0.0;
            for (const auto& g : groups) {
                const double m = g.mean();
                ssb += static_cast<double>(g.n()) * (m - grand) * (m - grand);
                for (const double v : g.samples) ssw += (v - m) * (v - m);
            }
            const AnovaResult r = one_way_anova(groups);
            expect(std::abs(r.ss_between - ssb) <= 1e-9 && std::abs(r.ss_within - ssw) <= 1e-9,
                   "brute-force SS agreement");
        }
    }
    {  // Tukey on the fixture: extreme pair Q = 3.464 vs critical 4.339
        const auto pairs = tukey_hsd(fixture, 0.05);
        expect(pairs.size() == 3, "pair count");
        bool found = false;
        for (const auto& p : pairs) {
            expect(!p.significant, "no pair significant at alpha 0.05");
            expect(std::abs(p.critical_q - 4.339) <= 5e-3, "critical q(0.05, 3, 6)");
            if (std::abs(std::abs(p.q_value) - 2.0 * std::sqrt(3.0)) <= 1e-9) found = true;
        }
        expect(found, "extreme pair Q = 2*sqrt(3)");
    }
    {  // F statistic invariant under shift and positive scaling
        Rng rng(12);
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<MetricGroup> groups(3);
            for (auto& g : groups) {
                g.samples.resize(5);
                for (auto& v : g.samples) v = rng.gaussian();
            }
            const double f0 = one_way_anova(groups).f_value;
            const double shift = rng.uniform(-10.0, 10.0);
            const double scale = 0.1 + 5.0 * rng.uniform();
            for (auto& g : groups)
                for (auto& v : g.samples) v = scale * v + shift;
            expect(std::abs(one_way_anova(groups).f_value - f0) <=
                       1e-9 * std::max(1.0, std::abs(f0)),
                   "F shift/scale invariance");
        }
    }

    const double elapsed = now_sec() - start;
    expect(elapsed < 10.0, "runtime budget 10s exceeded");
    std::ostringstream detail;
    detail << "anova/tukey oracles, " << elapsed << "s";
    return {ok, ok ? detail.str() : why.str()};
}

// ---------------------------------------------------------------------------
// Criteria 6-8 drive the full pipeline through the library commands.
// ---------------------------------------------------------------------------
BenchmarkConfig config_from_text(const std::string& text) {
    return config_from_table(toml::parse(text));
}

std::string pipeline_config(const fs::path& out_dir, int epochs, int eval_every) {
    std::ostringstream os;
    os << "[dataset]\n"
          "source = \"synthetic\"\n"
          "synthetic_n = 16\n"
          "resolution = 32\n"
          "split_ratio = 0.7\n"
          "split_seed = 42\n"
          "\n[output]\ndir = \""
       << out_dir.generic_string()
       << "\"\n"
          "\n[training]\nmaster_seed = 7\n"
          "\n[metrics]\neval_every = "
       << eval_every << "\nn_splits = 2\nclassifier_k = 4\n";
    for (const char* fam : {"vanilla", "dcgan", "wgan"})
        os << "\n[training." << fam << "]\nepochs = " << epochs
           << "\nbatch_size = 8\ngen_base_filters = 16\ndisc_base_filters = 8\n";
    return os.str();
}

nlohmann::json strip_wall_time(const fs::path& run_json) {
    auto j = nlohmann::json::parse(read_file(run_json));
    j.erase("wall_time");
    return j;
}

Outcome criterion6() {
    const double start = now_sec();
    const fs::path base = fresh_dir("determinism");
    const fs::path out = base / "out";
    const std::string cfg_text = pipeline_config(out, 20, 10);
    const CommandOptions quiet{true, false};

    auto run_pipeline = [&]() {
        const BenchmarkConfig cfg = config_from_text(cfg_text);
        cmd_prepare_data(cfg, quiet);
        cmd_train(cfg, "all", {}, {}, quiet);
        cmd_report(cfg, quiet);
    };
    run_pipeline();
    const fs::path first = base / "first";
    fs::rename(out, first);
    run_pipeline();

    std::ostringstream why;
    bool ok = true;
    auto expect_same = [&](const fs::path& rel) {
        if (read_file(first / rel) != read_file(out / rel)) {
            ok = false;
            why << (why.str().empty() ? "" : "; ") << rel.string() << " differs";
        }
    };
    expect_same("dataset/manifest.json");
    for (const char* run_id : {"vanilla-seed7", "dcgan-seed8", "wgan-seed9"}) {
        const fs::path rd = fs::path("runs") / run_id;
        expect_same(rd / "training_log.csv");
        expect_same(rd / "observations.json");
        if (strip_wall_time(first / rd / "run.json") != strip_wall_time(out / rd / "run.json")) {
            ok = false;
            why << (why.str().empty() ? "" : "; ") << (rd / "run.json").string() << " differs";
        }
    }
    expect_same("report/stats_report.json");
    expect_same("report/comparison.md");
    expect_same("report/stats_report.md");
    expect_same("report/curves_ssim.png");

    const double elapsed = now_sec() - start;
    if (elapsed >= 900.0) {
        ok = false;
        why << (why.str().empty() ? "" : "; ") << "runtime budget 15min exceeded";
    }
    std::ostringstream detail;
    detail << "two identical pipelines, " << elapsed << "s";
    return {ok, ok ? detail.str() : why.str()};
}

std::string trend_config(const fs::path& out_dir) {
    std::ostringstream os;
    os << "[dataset]\n"
          "source = \"synthetic\"\n"
          "synthetic_n = 64\n"
          "resolution = 32\n"
          "split_ratio = 0.7\n"
          "split_seed = 42\n"
          "\n[output]\ndir = \""
       << out_dir.generic_string()
       << "\"\n"
          "\n[metrics]\neval_every = 300\nn_splits = 4\nclassifier_k = 4\n"
          "\n[training.vanilla]\n"
          "epochs = 300\nbatch_size = 16\n"
          "lr_generator = 0.0002\nlr_discriminator = 0.0005\n"
          "gen_base_filters = 32\ndisc_base_filters = 16\n"
          "\n[training.dcgan]\n"
          "epochs = 300\nbatch_size = 16\n"
          "lr_generator = 0.00025\nlr_discriminator = 0.001\n"
          "gen_base_filters = 32\ndisc_base_filters = 16\n"
          "\n[training.wgan]\n"
          "epochs = 300\nbatch_size = 16\n"
          "lr_generator = 0.00025\nlr_discriminator = 0.001\n"
          "gen_base_filters = 32\ndisc_base_filters = 16\n";
    return os.str();
}

Outcome criterion7() {
    const double start = now_sec();
    const fs::path base = fresh_dir("trend");
    const CommandOptions quiet{true, false};

    int conv_wins = 0, significant_wins = 0;
    std::ostringstream log;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const fs::path out = base / ("seed" + std::to_string(seed));
        const BenchmarkConfig cfg = config_from_text(trend_config(out));
        cmd_prepare_data(cfg, quiet);
        std::vector<fs::path> run_dirs;
        for (const char* fam : {"vanilla", "dcgan", "wgan"}) {
            auto dirs = cmd_train(cfg, fam, seed, {}, quiet);
            run_dirs.insert(run_dirs.end(), dirs.begin(), dirs.end());
        }
        const auto groups = observation_groups(run_dirs, "ssim");
        double vanilla = 0.0, best_conv = 0.0;
        for (const auto& g : groups) {
            if (g.label == "vanilla")
                vanilla = g.mean();
            else
                best_conv = std::max(best_conv, g.mean());
        }
        const AnovaResult anova = one_way_anova(groups);
        const bool win = best_conv > vanilla;
        const bool sig = anova.p_value < 0.05;
        if (win) {
            ++conv_wins;
            if (sig) ++significant_wins;
        }
        log << " seed" << seed << ": conv " << best_conv << (win ? " > " : " <= ") << vanilla
            << " vanilla, p = " << anova.p_value << ";";
    }

    const double elapsed = now_sec() - start;
    const bool ok = conv_wins >= 4 && significant_wins >= 4 && elapsed < 3600.0;
    std::ostringstream detail;
    detail << conv_wins << "/5 conv wins, " << significant_wins
           << "/5 with p < 0.05, " << elapsed << "s --" << log.str();
    return {ok, detail.str()};
}

Outcome criterion8() {
    const fs::path golden_dir = GANBENCH_GOLDEN_DIR;
    const fs::path base = fresh_dir("golden");
    const fs::path out = base / "out";
    // Mirrors the fixture used to freeze the golden report files.
    std::ostringstream os;
    os << "[dataset]\n"
          "source = \"synthetic\"\n"
          "synthetic_n = 16\n"
          "resolution = 16\n"
          "split_ratio = 0.7\n"
          "split_seed = 42\n"
          "\n[output]\ndir = \""
       << out.generic_string()
       << "\"\n"
          "\n[metrics]\neval_every = 2\nn_splits = 2\nclassifier_k = 4\n";
    for (const char* fam : {"vanilla", "dcgan", "wgan"})
        os << "\n[training." << fam
           << "]\nepochs = 4\nbatch_size = 4\ngen_base_filters = 16\ndisc_base_filters = 8\n";

    const CommandOptions quiet{true, false};
    const BenchmarkConfig cfg = config_from_text(os.str());
    cmd_prepare_data(cfg, quiet);
    cmd_train(cfg, "all", {}, {}, quiet);
    cmd_report(cfg, quiet);

    std::ostringstream why;
    bool ok = true;
    for (const char* name : {"comparison.md", "stats_report.md"}) {
        const fs::path golden = golden_dir / name;
        if (!fs::exists(golden)) {
            ok = false;
            why << (why.str().empty() ? "" : "; ") << "missing golden " << name;
            continue;
        }
        if (read_file(out / "report" / name) != read_file(golden)) {
            ok = false;
            why << (why.str().empty() ? "" : "; ") << name << " differs from golden";
        }
    }
    return {ok, ok ? "report files match the golden fixtures byte-for-byte" : why.str()};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"metric value oracles", criterion1},
        {"metric property suites", criterion2},
        {"loss gradient checks", criterion3},
        {"wgan weight-clipping invariant", criterion4},
        {"anova / tukey validation", criterion5},
        {"end-to-end determinism", criterion6},
        {"desk-scale quality trend", criterion7},
        {"report fidelity vs goldens", criterion8},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome result;
        try {
            result = criteria[i].second();
        } catch (const std::exception& e) {
            result = {false, std::string("exception: ") + e.what()};
        }
        std::printf("[%s] criterion %zu: %s (%s)\n", result.pass ? "PASS" : "FAIL", i + 1,
                    criteria[i].first, result.detail.c_str());
        std::fflush(stdout);
        if (!result.pass) ++failures;
    }
    if (failures != 0) std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
