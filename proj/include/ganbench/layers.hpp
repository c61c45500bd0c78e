#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ganbench/rng.hpp"
#include "ganbench/tensor.hpp"

namespace ganbench {

enum class LayerKind {
    dense,
    conv2d,
    transposed_conv2d,
    batch_norm,
    leaky_relu,
    sigmoid,
    tanh_act,
    dropout,
    reshape,
    flatten,
};

std::string to_string(LayerKind k);
LayerKind layer_kind_from_string(const std::string& s);

struct LayerSpec {
    LayerKind kind{};
    // dense
    int in_features = 0, out_features = 0;
    // conv2d / transposed_conv2d
    int in_channels = 0, out_channels = 0, kernel = 0, stride = 1, padding = 0;
    // batch_norm
    int channels = 0;
    double momentum = 0.9, eps = 1e-5;
    // leaky_relu
    double slope = 0.2;
    // dropout
    double drop_prob = 0.3;
    // reshape
    std::vector<int> target_shape;

    void validate() const;

    static LayerSpec Dense(int in, int out);
    static LayerSpec Conv2d(int in_ch, int out_ch, int kernel, int stride, int padding);
    static LayerSpec TransposedConv2d(int in_ch, int out_ch, int kernel, int stride, int padding);
    static LayerSpec BatchNorm(int channels);
    static LayerSpec LeakyRelu(double slope = 0.2);
    static LayerSpec Sigmoid();
    static LayerSpec Tanh();
    static LayerSpec Dropout(double prob = 0.3);
    static LayerSpec Reshape(std::vector<int> shape);
    static LayerSpec Flatten();
};

enum class Head { sigmoid, linear, tanh };

std::string to_string(Head h);

// Immutable layer-graph description; shapes exclude the batch dimension
// ({F} for flat data, {C, H, W} for feature maps).
struct NetworkSpec {
    std::vector<LayerSpec> layers;
    std::vector<int> input_shape;
    std::vector<int> output_shape;
    Head head = Head::linear;

    // Shape after layer i applied to `in`; throws ShapeMismatch on an
    // incompatible chain.
    static std::vector<int> infer_shape(const LayerSpec& layer, const std::vector<int>& in);
    void validate() const;

    nlohmann::ordered_json to_json() const;
};

// Named trainable tensors plus non-trainable buffers (batch-norm running
// statistics). Owned by exactly one training run at a time.
struct ParameterStore {
    std::map<std::string, Tensor> tensors;
    std::vector<std::string> trainable;  // subset of tensor names
    std::uint64_t rng_seed = 0;

    long parameter_count() const;
};

ParameterStore init_parameters(const NetworkSpec& spec, std::uint64_t seed,
                               double weight_std = 0.02);

// Clamp every trainable weight to [-c, c]; buffers untouched.
void clip_parameters(ParameterStore& params, double c);

using GradientStore = std::map<std::string, Tensor>;

// Runtime evaluator bound to a spec and a parameter store. Caches layer
// activations on forward so backward can run; one instance per logical
// thread of execution.
class Network {
public:
    Network(const NetworkSpec& spec, ParameterStore& params);

    // training=true enables dropout (needs rng) and batch statistics.
    Tensor forward(const Tensor& batch, bool training = false, Rng* rng = nullptr);

    // Returns gradient w.r.t. the input batch; accumulates parameter
    // gradients into grads(). Requires a preceding forward call.
    Tensor backward(const Tensor& grad_out);

    GradientStore& grads() { return grads_; }
    void zero_grads();

    const NetworkSpec& spec() const { return spec_; }

    struct Cache {
        Tensor input;       // layer input as seen on forward
        Tensor output;      // layer output (activations)
        Tensor aux;         // kind-specific (dropout mask, batch-norm xhat, ...)
        Eigen::ArrayXd mean, inv_std;  // batch-norm
    };

private:
    const NetworkSpec spec_;
    ParameterStore& params_;
    GradientStore grads_;
    std::vector<Cache> caches_;
    bool last_training_ = false;
};

}  // namespace ganbench
