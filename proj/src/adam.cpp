#include "ganbench/adam.hpp"

#include <cmath>

#include "ganbench/errors.hpp"

namespace ganbench {

void adam_update(ParameterStore& params, const GradientStore& grads, AdamState& state, double lr,
                 double beta1, double beta2, double eps) {
    if (lr <= 0.0) throw Error("adam: lr must be > 0");
    state.step += 1;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.step));

    for (const auto& name : params.trainable) {
        auto& p = params.tensors.at(name);
        const auto git = grads.find(name);
        if (git == grads.end()) throw ShapeMismatch("adam: missing gradient for " + name);
        const Tensor& g = git->second;
        if (!g.same_shape(p)) throw ShapeMismatch("adam: gradient shape mismatch for " + name);

        auto [mit, fresh] = state.m.try_emplace(name, Tensor(p.shape));
        if (fresh) state.v.emplace(name, Tensor(p.shape));
        Tensor& m = mit->second;
        Tensor& v = state.v.at(name);

        m.data = beta1 * m.data + (1.0 - beta1) * g.data;
        v.data = beta2 * v.data + (1.0 - beta2) * g.data.square();
        p.data -= lr * (m.data / bc1) / ((v.data / bc2).sqrt() + eps);
    }
}

}  // namespace ganbench
