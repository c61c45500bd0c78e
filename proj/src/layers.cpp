#include "ganbench/layers.hpp"

#include <algorithm>
#include <cmath>

#include "ganbench/errors.hpp"

namespace ganbench {

namespace {

long product(const std::vector<int>& v) {
    long p = 1;
    for (int d : v) p *= d;
    return p;
}

int conv_out_dim(int in, int kernel, int stride, int padding) {
    return (in + 2 * padding - kernel) / stride + 1;
}

int tconv_out_dim(int in, int kernel, int stride, int padding) {
    return (in - 1) * stride - 2 * padding + kernel;
}

// Gather kernel patches: cols is [C*k*k, oH*oW]; entry ((c*k+kh)*k+kw, oh*oW+ow)
// reads src[c, oh*stride - pad + kh, ow*stride - pad + kw] (zero outside).
void im2col(const double* src, int C, int H, int W, int k, int stride, int pad, int oH, int oW,
            MatrixRM& cols) {
    cols.resize(static_cast<long>(C) * k * k, static_cast<long>(oH) * oW);
    for (int c = 0; c < C; ++c)
        for (int kh = 0; kh < k; ++kh)
            for (int kw = 0; kw < k; ++kw) {
                const long row = (static_cast<long>(c) * k + kh) * k + kw;
                for (int oh = 0; oh < oH; ++oh) {
                    const int ih = oh * stride - pad + kh;
                    for (int ow = 0; ow < oW; ++ow) {
                        const int iw = ow * stride - pad + kw;
                        double v = 0.0;
                        if (ih >= 0 && ih < H && iw >= 0 && iw < W)
                            v = src[(static_cast<long>(c) * H + ih) * W + iw];
                        cols(row, static_cast<long>(oh) * oW + ow) = v;
                    }
                }
            }
}

// Adjoint of im2col: scatter-add cols back into dst [C, H, W].
void col2im(const MatrixRM& cols, int C, int H, int W, int k, int stride, int pad, int oH, int oW,
            double* dst) {
    std::fill(dst, dst + static_cast<long>(C) * H * W, 0.0);
    for (int c = 0; c < C; ++c)
        for (int kh = 0; kh < k; ++kh)
            for (int kw = 0; kw < k; ++kw) {
                const long row = (static_cast<long>(c) * k + kh) * k + kw;
                for (int oh = 0; oh < oH; ++oh) {
                    const int ih = oh * stride - pad + kh;
                    if (ih < 0 || ih >= H) continue;
                    for (int ow = 0; ow < oW; ++ow) {
                        const int iw = ow * stride - pad + kw;
                        if (iw < 0 || iw >= W) continue;
                        dst[(static_cast<long>(c) * H + ih) * W + iw] +=
                            cols(row, static_cast<long>(oh) * oW + ow);
                    }
                }
            }
}

Eigen::Map<MatrixRM> mat(Tensor& t, long rows, long cols) { return t.as_matrix(rows, cols); }
Eigen::Map<const MatrixRM> mat(const Tensor& t, long rows, long cols) {
    return t.as_matrix(rows, cols);
}

}  // namespace

std::string to_string(LayerKind k) {
    switch (k) {
        case LayerKind::dense: return "dense";
        case LayerKind::conv2d: return "conv2d";
        case LayerKind::transposed_conv2d: return "transposed_conv2d";
        case LayerKind::batch_norm: return "batch_norm";
        case LayerKind::leaky_relu: return "leaky_relu";
        case LayerKind::sigmoid: return "sigmoid";
        case LayerKind::tanh_act: return "tanh";
        case LayerKind::dropout: return "dropout";
        case LayerKind::reshape: return "reshape";
        case LayerKind::flatten: return "flatten";
    }
    throw Error("unknown layer kind");
}

LayerKind layer_kind_from_string(const std::string& s) {
    static const std::pair<const char*, LayerKind> table[] = {
        {"dense", LayerKind::dense},
        {"conv2d", LayerKind::conv2d},
        {"transposed_conv2d", LayerKind::transposed_conv2d},
        {"batch_norm", LayerKind::batch_norm},
        {"leaky_relu", LayerKind::leaky_relu},
        {"sigmoid", LayerKind::sigmoid},
        {"tanh", LayerKind::tanh_act},
        {"dropout", LayerKind::dropout},
        {"reshape", LayerKind::reshape},
        {"flatten", LayerKind::flatten},
    };
    for (const auto& [name, kind] : table)
        if (s == name) return kind;
    throw Error("unknown layer kind '" + s + "'");
}

std::string to_string(Head h) {
    switch (h) {
        case Head::sigmoid: return "sigmoid";
        case Head::linear: return "linear";
        case Head::tanh: return "tanh";
    }
    throw Error("unknown head");
}

void LayerSpec::validate() const {
    switch (kind) {
        case LayerKind::dense:
            if (in_features <= 0 || out_features <= 0)
                throw ShapeMismatch("dense: features must be positive");
            break;
        case LayerKind::conv2d:
        case LayerKind::transposed_conv2d:
            if (in_channels <= 0 || out_channels <= 0 || kernel <= 0 || stride <= 0 || padding < 0)
                throw ShapeMismatch("conv: invalid geometry");
            break;
        case LayerKind::batch_norm:
            if (channels <= 0) throw ShapeMismatch("batch_norm: channels must be positive");
            break;
        case LayerKind::leaky_relu:
            if (slope <= 0.0 || slope >= 1.0) throw Error("leaky_relu: slope must be in (0,1)");
            break;
        case LayerKind::dropout:
            if (drop_prob < 0.0 || drop_prob >= 1.0) throw Error("dropout: prob must be in [0,1)");
            break;
        case LayerKind::reshape:
            if (target_shape.empty() || product(target_shape) <= 0)
                throw ShapeMismatch("reshape: bad target shape");
            break;
        default: break;
    }
}

LayerSpec LayerSpec::Dense(int in, int out) {
    LayerSpec s;
    s.kind = LayerKind::dense;
    s.in_features = in;
    s.out_features = out;
    return s;
}
LayerSpec LayerSpec::Conv2d(int in_ch, int out_ch, int kernel, int stride, int padding) {
    LayerSpec s;
    s.kind = LayerKind::conv2d;
    s.in_channels = in_ch;
    s.out_channels = out_ch;
    s.kernel = kernel;
    s.stride = stride;
    s.padding = padding;
    return s;
}
LayerSpec LayerSpec::TransposedConv2d(int in_ch, int out_ch, int kernel, int stride, int padding) {
    LayerSpec s = Conv2d(in_ch, out_ch, kernel, stride, padding);
    s.kind = LayerKind::transposed_conv2d;
    return s;
}
LayerSpec LayerSpec::BatchNorm(int channels) {
    LayerSpec s;
    s.kind = LayerKind::batch_norm;
    s.channels = channels;
    return s;
}
LayerSpec LayerSpec::LeakyRelu(double slope) {
    LayerSpec s;
    s.kind = LayerKind::leaky_relu;
    s.slope = slope;
    return s;
}
LayerSpec LayerSpec::Sigmoid() {
    LayerSpec s;
    s.kind = LayerKind::sigmoid;
    return s;
}
LayerSpec LayerSpec::Tanh() {
    LayerSpec s;
    s.kind = LayerKind::tanh_act;
    return s;
}
LayerSpec LayerSpec::Dropout(double prob) {
    LayerSpec s;
    s.kind = LayerKind::dropout;
    s.drop_prob = prob;
    return s;
}
LayerSpec LayerSpec::Reshape(std::vector<int> shape) {
    LayerSpec s;
    s.kind = LayerKind::reshape;
    s.target_shape = std::move(shape);
    return s;
}
LayerSpec LayerSpec::Flatten() {
    LayerSpec s;
    s.kind = LayerKind::flatten;
    return s;
}

std::vector<int> NetworkSpec::infer_shape(const LayerSpec& layer, const std::vector<int>& in) {
    layer.validate();
    switch (layer.kind) {
        case LayerKind::dense:
            if (in.size() != 1 || in[0] != layer.in_features)
                throw ShapeMismatch("dense: expected flat input of " +
                                    std::to_string(layer.in_features));
            return {layer.out_features};
        case LayerKind::conv2d: {
            if (in.size() != 3 || in[0] != layer.in_channels)
                throw ShapeMismatch("conv2d: expected CHW input with C=" +
                                    std::to_string(layer.in_channels));
            const int oh = conv_out_dim(in[1], layer.kernel, layer.stride, layer.padding);
            const int ow = conv_out_dim(in[2], layer.kernel, layer.stride, layer.padding);
            if (oh <= 0 || ow <= 0) throw ShapeMismatch("conv2d: kernel larger than input");
            return {layer.out_channels, oh, ow};
        }
        case LayerKind::transposed_conv2d: {
            if (in.size() != 3 || in[0] != layer.in_channels)
                throw ShapeMismatch("transposed_conv2d: expected CHW input with C=" +
                                    std::to_string(layer.in_channels));
            const int oh = tconv_out_dim(in[1], layer.kernel, layer.stride, layer.padding);
            const int ow = tconv_out_dim(in[2], layer.kernel, layer.stride, layer.padding);
            if (oh <= 0 || ow <= 0) throw ShapeMismatch("transposed_conv2d: degenerate output");
            return {layer.out_channels, oh, ow};
        }
        case LayerKind::batch_norm: {
            const int c = in.size() == 3 ? in[0] : (in.size() == 1 ? in[0] : -1);
            if (c != layer.channels)
                throw ShapeMismatch("batch_norm: channel mismatch");
            return in;
        }
        case LayerKind::leaky_relu:
        case LayerKind::sigmoid:
        case LayerKind::tanh_act:
        case LayerKind::dropout:
            return in;
        case LayerKind::reshape:
            if (product(in) != product(layer.target_shape))
                throw ShapeMismatch("reshape: element count mismatch");
            return layer.target_shape;
        case LayerKind::flatten:
            return {static_cast<int>(product(in))};
    }
    throw Error("unknown layer kind");
}

void NetworkSpec::validate() const {
    std::vector<int> shape = input_shape;
    for (const auto& layer : layers) shape = infer_shape(layer, shape);
    if (shape != output_shape)
        throw ShapeMismatch("network: inferred output shape disagrees with declared shape");
}

nlohmann::ordered_json NetworkSpec::to_json() const {
    nlohmann::ordered_json j;
    j["input_shape"] = input_shape;
    j["output_shape"] = output_shape;
    j["head"] = to_string(head);
    j["layers"] = nlohmann::ordered_json::array();
    for (const auto& l : layers) {
        nlohmann::ordered_json lj;
        lj["kind"] = to_string(l.kind);
        switch (l.kind) {
            case LayerKind::dense:
                lj["in_features"] = l.in_features;
                lj["out_features"] = l.out_features;
                break;
            case LayerKind::conv2d:
            case LayerKind::transposed_conv2d:
                lj["in_channels"] = l.in_channels;
                lj["out_channels"] = l.out_channels;
                lj["kernel"] = l.kernel;
                lj["stride"] = l.stride;
                lj["padding"] = l.padding;
                break;
            case LayerKind::batch_norm:
                lj["channels"] = l.channels;
                lj["momentum"] = l.momentum;
                lj["eps"] = l.eps;
                break;
            case LayerKind::leaky_relu: lj["slope"] = l.slope; break;
            case LayerKind::dropout: lj["prob"] = l.drop_prob; break;
            case LayerKind::reshape: lj["shape"] = l.target_shape; break;
            default: break;
        }
        j["layers"].push_back(lj);
    }
    return j;
}

long ParameterStore::parameter_count() const {
    long n = 0;
    for (const auto& name : trainable) n += tensors.at(name).size();
    return n;
}

ParameterStore init_parameters(const NetworkSpec& spec, std::uint64_t seed, double weight_std) {
    spec.validate();
    ParameterStore store;
    store.rng_seed = seed;
    Rng rng(seed);

    auto gaussian_fill = [&](Tensor& t) {
        for (long i = 0; i < t.size(); ++i) t[i] = weight_std * rng.gaussian();
    };

    for (std::size_t i = 0; i < spec.layers.size(); ++i) {
        const auto& l = spec.layers[i];
        const std::string prefix = "layer" + std::to_string(i) + ".";
        switch (l.kind) {
            case LayerKind::dense: {
                Tensor w({l.out_features, l.in_features});
                gaussian_fill(w);
                store.tensors[prefix + "weight"] = std::move(w);
                store.tensors[prefix + "bias"] = Tensor({l.out_features});
                store.trainable.push_back(prefix + "weight");
                store.trainable.push_back(prefix + "bias");
                break;
            }
            case LayerKind::conv2d: {
                Tensor w({l.out_channels, l.in_channels, l.kernel, l.kernel});
                gaussian_fill(w);
                store.tensors[prefix + "weight"] = std::move(w);
                store.tensors[prefix + "bias"] = Tensor({l.out_channels});
                store.trainable.push_back(prefix + "weight");
                store.trainable.push_back(prefix + "bias");
                break;
            }
            case LayerKind::transposed_conv2d: {
                Tensor w({l.in_channels, l.out_channels, l.kernel, l.kernel});
                gaussian_fill(w);
                store.tensors[prefix + "weight"] = std::move(w);
                store.tensors[prefix + "bias"] = Tensor({l.out_channels});
                store.trainable.push_back(prefix + "weight");
                store.trainable.push_back(prefix + "bias");
                break;
            }
            case LayerKind::batch_norm: {
                Tensor gamma({l.channels});
                gamma.data.setOnes();
                store.tensors[prefix + "gamma"] = std::move(gamma);
                store.tensors[prefix + "beta"] = Tensor({l.channels});
                Tensor rv({l.channels});
                rv.data.setOnes();
                store.tensors[prefix + "running_mean"] = Tensor({l.channels});
                store.tensors[prefix + "running_var"] = std::move(rv);
                store.trainable.push_back(prefix + "gamma");
                store.trainable.push_back(prefix + "beta");
                break;
            }
            default: break;
        }
    }
    return store;
}

void clip_parameters(ParameterStore& params, double c) {
    if (c <= 0.0) throw NonPositiveClip("clip: c must be > 0");
    for (const auto& name : params.trainable) {
        auto& t = params.tensors.at(name);
        t.data = t.data.min(c).max(-c);
    }
}

Network::Network(const NetworkSpec& spec, ParameterStore& params)
    : spec_(spec), params_(params) {
    spec_.validate();
    caches_.resize(spec_.layers.size());
    zero_grads();
}

void Network::zero_grads() {
    grads_.clear();
    for (const auto& name : params_.trainable) {
        Tensor g(params_.tensors.at(name).shape);
        grads_[name] = std::move(g);
    }
}

Tensor Network::forward(const Tensor& batch, bool training, Rng* rng) {
    if (batch.rank() < 1) throw ShapeMismatch("forward: empty batch");
    std::vector<int> expect = {batch.dim(0)};
    expect.insert(expect.end(), spec_.input_shape.begin(), spec_.input_shape.end());
    if (batch.shape != expect)
        throw ShapeMismatch("forward: batch shape does not match network input shape");
    last_training_ = training;

    const int N = batch.dim(0);
    Tensor x = batch;
    std::vector<int> shape = spec_.input_shape;
    MatrixRM cols;

    for (std::size_t i = 0; i < spec_.layers.size(); ++i) {
        const auto& l = spec_.layers[i];
        auto& cache = caches_[i];
        cache.input = x;
        const std::vector<int> out_shape = NetworkSpec::infer_shape(l, shape);
        std::vector<int> batched_out = {N};
        batched_out.insert(batched_out.end(), out_shape.begin(), out_shape.end());
        Tensor y(batched_out);
        const std::string prefix = "layer" + std::to_string(i) + ".";

        switch (l.kind) {
            case LayerKind::dense: {
                const auto& w = params_.tensors.at(prefix + "weight");
                const auto& b = params_.tensors.at(prefix + "bias");
                auto X = mat(x, N, l.in_features);
                auto W = mat(w, l.out_features, l.in_features);
                auto Y = mat(y, N, l.out_features);
                Y.noalias() = X * W.transpose();
                Y.rowwise() += Eigen::Map<const Eigen::RowVectorXd>(b.data.data(), l.out_features);
                break;
            }
            case LayerKind::conv2d: {
                const auto& w = params_.tensors.at(prefix + "weight");
                const auto& b = params_.tensors.at(prefix + "bias");
                const int C = l.in_channels, H = shape[1], W = shape[2];
                const int oH = out_shape[1], oW = out_shape[2];
                auto Wm = mat(w, l.out_channels, static_cast<long>(C) * l.kernel * l.kernel);
                const long in_sz = static_cast<long>(C) * H * W;
                const long out_sz = static_cast<long>(l.out_channels) * oH * oW;
                for (int n = 0; n < N; ++n) {
                    im2col(x.data.data() + n * in_sz, C, H, W, l.kernel, l.stride, l.padding, oH,
                           oW, cols);
                    Eigen::Map<MatrixRM> Y(y.data.data() + n * out_sz, l.out_channels,
                                           static_cast<long>(oH) * oW);
                    Y.noalias() = Wm * cols;
                    Y.colwise() += Eigen::Map<const Eigen::VectorXd>(b.data.data(), l.out_channels);
                }
                break;
            }
            case LayerKind::transposed_conv2d: {
                const auto& w = params_.tensors.at(prefix + "weight");
                const auto& b = params_.tensors.at(prefix + "bias");
                const int Ci = l.in_channels, Co = l.out_channels;
                const int iH = shape[1], iW = shape[2];
                const int oH = out_shape[1], oW = out_shape[2];
                auto Wm = mat(w, Ci, static_cast<long>(Co) * l.kernel * l.kernel);
                const long in_sz = static_cast<long>(Ci) * iH * iW;
                const long out_sz = static_cast<long>(Co) * oH * oW;
                for (int n = 0; n < N; ++n) {
                    Eigen::Map<const MatrixRM> X(x.data.data() + n * in_sz, Ci,
                                                 static_cast<long>(iH) * iW);
                    cols.noalias() = Wm.transpose() * X;
                    col2im(cols, Co, oH, oW, l.kernel, l.stride, l.padding, iH, iW,
                           y.data.data() + n * out_sz);
                    Eigen::Map<MatrixRM> Y(y.data.data() + n * out_sz, Co,
                                           static_cast<long>(oH) * oW);
                    Y.colwise() += Eigen::Map<const Eigen::VectorXd>(b.data.data(), Co);
                }
                break;
            }
            case LayerKind::batch_norm: {
                auto& gamma = params_.tensors.at(prefix + "gamma");
                auto& beta = params_.tensors.at(prefix + "beta");
                auto& rmean = params_.tensors.at(prefix + "running_mean");
                auto& rvar = params_.tensors.at(prefix + "running_var");
                const int C = l.channels;
                const long spatial = x.size() / (static_cast<long>(N) * C);
                cache.aux = Tensor(x.shape);  // xhat
                cache.mean.resize(C);
                cache.inv_std.resize(C);
                for (int c = 0; c < C; ++c) {
                    double mean, var;
                    if (training) {
                        double sum = 0.0, sq = 0.0;
                        for (int n = 0; n < N; ++n) {
                            const double* p =
                                x.data.data() + (static_cast<long>(n) * C + c) * spatial;
                            for (long s = 0; s < spatial; ++s) {
                                sum += p[s];
                                sq += p[s] * p[s];
                            }
                        }
                        const double count = static_cast<double>(N) * spatial;
                        mean = sum / count;
                        var = sq / count - mean * mean;
                        if (var < 0.0) var = 0.0;
                        rmean[c] = l.momentum * rmean[c] + (1.0 - l.momentum) * mean;
                        rvar[c] = l.momentum * rvar[c] + (1.0 - l.momentum) * var;
                    } else {
                        mean = rmean[c];
                        var = rvar[c];
                    }
                    const double inv_std = 1.0 / std::sqrt(var + l.eps);
                    cache.mean[c] = mean;
                    cache.inv_std[c] = inv_std;
                    const double g = gamma[c], bb = beta[c];
                    for (int n = 0; n < N; ++n) {
                        const long off = (static_cast<long>(n) * C + c) * spatial;
                        for (long s = 0; s < spatial; ++s) {
                            const double xhat = (x.data[off + s] - mean) * inv_std;
                            cache.aux.data[off + s] = xhat;
                            y.data[off + s] = g * xhat + bb;
                        }
                    }
                }
                break;
            }
            case LayerKind::leaky_relu:
                y.data = (x.data >= 0.0).select(x.data, l.slope * x.data);
                break;
            case LayerKind::sigmoid:
                y.data = 1.0 / (1.0 + (-x.data).exp());
                break;
            case LayerKind::tanh_act:
                y.data = x.data.tanh();
                break;
            case LayerKind::dropout:
                if (training) {
                    if (rng == nullptr) throw Error("dropout: training forward needs an rng");
                    cache.aux = Tensor(x.shape);
                    const double keep = 1.0 - l.drop_prob;
                    for (long s = 0; s < x.size(); ++s)
                        cache.aux.data[s] = rng->uniform() < keep ? 1.0 / keep : 0.0;
                    y.data = x.data * cache.aux.data;
                } else {
                    y.data = x.data;
                }
                break;
            case LayerKind::reshape:
            case LayerKind::flatten:
                y.data = x.data;
                break;
        }
        cache.output = y;
        x = std::move(y);
        shape = out_shape;
    }
    return x;
}

Tensor Network::backward(const Tensor& grad_out) {
    const int N = caches_.empty() ? 0 : caches_.front().input.dim(0);
    Tensor grad = grad_out;
    MatrixRM cols;

    for (int li = static_cast<int>(spec_.layers.size()) - 1; li >= 0; --li) {
        const auto& l = spec_.layers[static_cast<std::size_t>(li)];
        auto& cache = caches_[static_cast<std::size_t>(li)];
        if (!grad.same_shape(cache.output))
            throw ShapeMismatch("backward: gradient shape mismatch at layer " +
                                std::to_string(li));
        const std::string prefix = "layer" + std::to_string(li) + ".";
        Tensor grad_in(cache.input.shape);

        switch (l.kind) {
            case LayerKind::dense: {
                const auto& w = params_.tensors.at(prefix + "weight");
                auto X = mat(cache.input, N, l.in_features);
                auto W = mat(w, l.out_features, l.in_features);
                auto dY = mat(grad, N, l.out_features);
                auto dX = mat(grad_in, N, l.in_features);
                auto dW = mat(grads_.at(prefix + "weight"), l.out_features, l.in_features);
                dX.noalias() = dY * W;
                dW.noalias() += dY.transpose() * X;
                Eigen::Map<Eigen::VectorXd> db(grads_.at(prefix + "bias").data.data(),
                                               l.out_features);
                db += dY.colwise().sum().transpose();
                break;
            }
            case LayerKind::conv2d: {
                const auto& w = params_.tensors.at(prefix + "weight");
                const int C = l.in_channels, H = cache.input.dim(2), W = cache.input.dim(3);
                const int oH = cache.output.dim(2), oW = cache.output.dim(3);
                auto Wm = mat(w, l.out_channels, static_cast<long>(C) * l.kernel * l.kernel);
                auto dWm = mat(grads_.at(prefix + "weight"), l.out_channels,
                               static_cast<long>(C) * l.kernel * l.kernel);
                Eigen::Map<Eigen::VectorXd> db(grads_.at(prefix + "bias").data.data(),
                                               l.out_channels);
                const long in_sz = static_cast<long>(C) * H * W;
                const long out_sz = static_cast<long>(l.out_channels) * oH * oW;
                MatrixRM dcols;
                for (int n = 0; n < N; ++n) {
                    Eigen::Map<const MatrixRM> dY(grad.data.data() + n * out_sz, l.out_channels,
                                                  static_cast<long>(oH) * oW);
                    im2col(cache.input.data.data() + n * in_sz, C, H, W, l.kernel, l.stride,
                           l.padding, oH, oW, cols);
                    dWm.noalias() += dY * cols.transpose();
                    db += dY.rowwise().sum();
                    dcols.noalias() = Wm.transpose() * dY;
                    col2im(dcols, C, H, W, l.kernel, l.stride, l.padding, oH, oW,
                           grad_in.data.data() + n * in_sz);
                }
                break;
            }
            case LayerKind::transposed_conv2d: {
                const auto& w = params_.tensors.at(prefix + "weight");
                const int Ci = l.in_channels, Co = l.out_channels;
                const int iH = cache.input.dim(2), iW = cache.input.dim(3);
                const int oH = cache.output.dim(2), oW = cache.output.dim(3);
                auto Wm = mat(w, Ci, static_cast<long>(Co) * l.kernel * l.kernel);
                auto dWm = mat(grads_.at(prefix + "weight"), Ci,
                               static_cast<long>(Co) * l.kernel * l.kernel);
                Eigen::Map<Eigen::VectorXd> db(grads_.at(prefix + "bias").data.data(), Co);
                const long in_sz = static_cast<long>(Ci) * iH * iW;
                const long out_sz = static_cast<long>(Co) * oH * oW;
                for (int n = 0; n < N; ++n) {
                    Eigen::Map<const MatrixRM> dY(grad.data.data() + n * out_sz, Co,
                                                  static_cast<long>(oH) * oW);
                    db += dY.rowwise().sum();
                    im2col(grad.data.data() + n * out_sz, Co, oH, oW, l.kernel, l.stride,
                           l.padding, iH, iW, cols);
                    Eigen::Map<const MatrixRM> X(cache.input.data.data() + n * in_sz, Ci,
                                                 static_cast<long>(iH) * iW);
                    dWm.noalias() += X * cols.transpose();
                    Eigen::Map<MatrixRM> dX(grad_in.data.data() + n * in_sz, Ci,
                                            static_cast<long>(iH) * iW);
                    dX.noalias() = Wm * cols;
                }
                break;
            }
            case LayerKind::batch_norm: {
                const auto& gamma = params_.tensors.at(prefix + "gamma");
                auto& dgamma = grads_.at(prefix + "gamma");
                auto& dbeta = grads_.at(prefix + "beta");
                const int C = l.channels;
                const long spatial = grad.size() / (static_cast<long>(N) * C);
                const double count = static_cast<double>(N) * spatial;
                for (int c = 0; c < C; ++c) {
                    double sum_dy = 0.0, sum_dy_xhat = 0.0;
                    for (int n = 0; n < N; ++n) {
                        const long off = (static_cast<long>(n) * C + c) * spatial;
                        for (long s = 0; s < spatial; ++s) {
                            sum_dy += grad.data[off + s];
                            sum_dy_xhat += grad.data[off + s] * cache.aux.data[off + s];
                        }
                    }
                    dgamma[c] += sum_dy_xhat;
                    dbeta[c] += sum_dy;
                    const double g = gamma[c], inv_std = cache.inv_std[c];
                    for (int n = 0; n < N; ++n) {
                        const long off = (static_cast<long>(n) * C + c) * spatial;
                        for (long s = 0; s < spatial; ++s) {
                            if (last_training_) {
                                grad_in.data[off + s] =
                                    g * inv_std / count *
                                    (count * grad.data[off + s] - sum_dy -
                                     cache.aux.data[off + s] * sum_dy_xhat);
                            } else {
                                grad_in.data[off + s] = g * inv_std * grad.data[off + s];
                            }
                        }
                    }
                }
                break;
            }
            case LayerKind::leaky_relu:
                grad_in.data = (cache.input.data >= 0.0).select(grad.data, l.slope * grad.data);
                break;
            case LayerKind::sigmoid:
                grad_in.data = grad.data * cache.output.data * (1.0 - cache.output.data);
                break;
            case LayerKind::tanh_act:
                grad_in.data = grad.data * (1.0 - cache.output.data.square());
                break;
            case LayerKind::dropout:
                if (last_training_)
                    grad_in.data = grad.data * cache.aux.data;
                else
                    grad_in.data = grad.data;
                break;
            case LayerKind::reshape:
            case LayerKind::flatten:
                grad_in.data = grad.data;
                break;
        }
        grad = std::move(grad_in);
    }
    return grad;
}

}  // namespace ganbench
