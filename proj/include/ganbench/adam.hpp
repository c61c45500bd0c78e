#pragma once

#include <map>
#include <string>

#include "ganbench/layers.hpp"

namespace ganbench {

struct AdamState {
    std::map<std::string, Tensor> m;  // first-moment estimates
    std::map<std::string, Tensor> v;  // second-moment estimates
    long step = 0;
};

// Standard Adam with bias correction, applied to every trainable tensor.
void adam_update(ParameterStore& params, const GradientStore& grads, AdamState& state, double lr,
                 double beta1, double beta2, double eps = 1e-8);

}  // namespace ganbench
