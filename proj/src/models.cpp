#include "ganbench/models.hpp"

#include <algorithm>

#include "ganbench/errors.hpp"

namespace ganbench {

namespace {

bool power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

void check_side(int side) {
    if (side < 8 || !power_of_two(side))
        throw UnsupportedShape("image side must be a power of two >= 8, got " +
                               std::to_string(side));
}

int upsample_steps(int side) {
    int steps = 0;
    for (int s = 4; s < side; s *= 2) ++steps;
    return steps;
}

}  // namespace

std::string to_string(ModelFamily f) {
    switch (f) {
        case ModelFamily::VANILLA: return "vanilla";
        case ModelFamily::DCGAN: return "dcgan";
        case ModelFamily::WGAN: return "wgan";
    }
    throw Error("unknown model family");
}

ModelFamily family_from_string(const std::string& s) {
    if (s == "vanilla") return ModelFamily::VANILLA;
    if (s == "dcgan") return ModelFamily::DCGAN;
    if (s == "wgan") return ModelFamily::WGAN;
    throw Error("unknown model family '" + s + "'");
}

NetworkSpec build_generator(ModelFamily family, int latent_dim, int out_side,
                            const ModelOptions& opts) {
    check_side(out_side);
    if (latent_dim < 1) throw UnsupportedShape("latent_dim must be >= 1");

    NetworkSpec spec;
    spec.input_shape = {latent_dim};
    spec.output_shape = {1, out_side, out_side};
    spec.head = Head::tanh;

    if (family == ModelFamily::VANILLA) {
        const int px = out_side * out_side;
        spec.layers = {
            LayerSpec::Dense(latent_dim, 256),
            LayerSpec::LeakyRelu(opts.leaky_slope),
            LayerSpec::Dense(256, 512),
            LayerSpec::LeakyRelu(opts.leaky_slope),
            LayerSpec::Dense(512, 1024),
            LayerSpec::LeakyRelu(opts.leaky_slope),
            LayerSpec::Dense(1024, px),
            LayerSpec::Tanh(),
            LayerSpec::Reshape({1, out_side, out_side}),
        };
        spec.validate();
        return spec;
    }

    // DCGAN / WGAN: dense seed at 4x4, transposed-conv upsampling with
    // batch-norm + LeakyReLU, then a 3x3 conv down to one channel and tanh.
    const int steps = upsample_steps(out_side);
    int ch = opts.gen_base_filters;
    spec.layers.push_back(LayerSpec::Dense(latent_dim, ch * 4 * 4));
    spec.layers.push_back(LayerSpec::Reshape({ch, 4, 4}));
    spec.layers.push_back(LayerSpec::BatchNorm(ch));
    spec.layers.push_back(LayerSpec::LeakyRelu(opts.leaky_slope));
    for (int i = 0; i < steps; ++i) {
        const int next = std::max(ch / 2, 8);
        spec.layers.push_back(LayerSpec::TransposedConv2d(ch, next, 4, 2, 1));
        spec.layers.push_back(LayerSpec::BatchNorm(next));
        spec.layers.push_back(LayerSpec::LeakyRelu(opts.leaky_slope));
        ch = next;
    }
    spec.layers.push_back(LayerSpec::Conv2d(ch, 1, 3, 1, 1));
    spec.layers.push_back(LayerSpec::Tanh());
    spec.validate();
    return spec;
}

NetworkSpec build_discriminator(ModelFamily family, int in_side, const ModelOptions& opts) {
    check_side(in_side);

    NetworkSpec spec;
    spec.input_shape = {1, in_side, in_side};
    spec.output_shape = {1};
    spec.head = family == ModelFamily::WGAN ? Head::linear : Head::sigmoid;

    if (family == ModelFamily::VANILLA) {
        const int px = in_side * in_side;
        spec.layers = {
            LayerSpec::Flatten(),
            LayerSpec::Dense(px, 512),
            LayerSpec::LeakyRelu(opts.leaky_slope),
            LayerSpec::Dropout(opts.dropout_prob),
            LayerSpec::Dense(512, 256),
            LayerSpec::LeakyRelu(opts.leaky_slope),
            LayerSpec::Dropout(opts.dropout_prob),
            LayerSpec::Dense(256, 1),
            LayerSpec::Sigmoid(),
        };
        spec.validate();
        return spec;
    }

    // DCGAN discriminator / WGAN critic: strided convs halving spatial dims
    // down to 4x4. Batch-norm in DCGAN only; the critic avoids coupling its
    // score to batch statistics.
    const bool use_bn = family == ModelFamily::DCGAN;
    int side = in_side;
    int in_ch = 1;
    int out_ch = opts.disc_base_filters;
    bool first = true;
    while (side > 4) {
        spec.layers.push_back(LayerSpec::Conv2d(in_ch, out_ch, 4, 2, 1));
        if (use_bn && !first) spec.layers.push_back(LayerSpec::BatchNorm(out_ch));
        spec.layers.push_back(LayerSpec::LeakyRelu(opts.leaky_slope));
        side /= 2;
        in_ch = out_ch;
        out_ch *= 2;
        first = false;
    }
    spec.layers.push_back(LayerSpec::Flatten());
    spec.layers.push_back(LayerSpec::Dense(in_ch * side * side, 1));
    if (family != ModelFamily::WGAN) spec.layers.push_back(LayerSpec::Sigmoid());
    spec.validate();
    return spec;
}

std::vector<double> reference_convolve_1d(const std::vector<double>& h,
                                          const std::vector<double>& x) {
    if (h.empty() || x.empty()) throw EmptyInput("convolve: inputs must be non-empty");
    std::vector<double> y(h.size() + x.size() - 1, 0.0);
    for (std::size_t n = 0; n < y.size(); ++n)
        for (std::size_t k = 0; k < h.size(); ++k)
            if (n >= k && n - k < x.size()) y[n] += h[k] * x[n - k];
    return y;
}

Tensor sample_latent(int n, int dim, Rng& rng) {
    if (n < 1 || dim < 1) throw ShapeMismatch("sample_latent: n and dim must be >= 1");
    Tensor z({n, dim});
    for (long i = 0; i < z.size(); ++i) z[i] = rng.gaussian();
    return z;
}

}  // namespace ganbench
