#pragma once

#include <string>
#include <vector>

#include "ganbench/layers.hpp"
#include "ganbench/tensor.hpp"

namespace ganbench {

enum class ModelFamily { VANILLA, DCGAN, WGAN };

std::string to_string(ModelFamily f);
ModelFamily family_from_string(const std::string& s);

struct ModelOptions {
    // Filter count of the generator's 4x4 seed block; halves per upsample.
    int gen_base_filters = 256;
    // Filter count of the discriminator's first conv block; doubles per stride.
    int disc_base_filters = 64;
    double leaky_slope = 0.2;
    double dropout_prob = 0.3;
};

// out_side must be a power of two >= 8 (single grayscale channel assumed).
NetworkSpec build_generator(ModelFamily family, int latent_dim, int out_side,
                            const ModelOptions& opts = {});
NetworkSpec build_discriminator(ModelFamily family, int in_side, const ModelOptions& opts = {});

// Full discrete 1-D convolution, length |h| + |x| - 1.
std::vector<double> reference_convolve_1d(const std::vector<double>& h,
                                          const std::vector<double>& x);

// n x dim matrix of i.i.d. standard normal draws from `rng`.
Tensor sample_latent(int n, int dim, Rng& rng);

}  // namespace ganbench
