#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "ganbench/data_pipeline.hpp"
#include "ganbench/tensor.hpp"

namespace ganbench {

// Backend contract: predict maps a batch of [0,1] grayscale images to an
// N x K row-stochastic matrix. Implementations must be safe for batched
// sequential calls; declare reentrant() to allow parallel dispatch.
class ClassifierBackend {
public:
    virtual ~ClassifierBackend() = default;
    virtual MatrixRM predict(const std::vector<Image>& images) = 0;
    virtual int num_classes() const = 0;
    virtual std::string descriptor() const = 0;
    virtual bool reentrant() const { return false; }
};

// Test backend: replays scripted probability rows, cycling when the batch is
// longer than the script.
class StubClassifier : public ClassifierBackend {
public:
    explicit StubClassifier(MatrixRM rows);
    MatrixRM predict(const std::vector<Image>& images) override;
    int num_classes() const override { return static_cast<int>(rows_.cols()); }
    std::string descriptor() const override { return "stub"; }
    bool reentrant() const override { return true; }

private:
    MatrixRM rows_;
};

// Default backend for synthetic benchmarks: a fixed random projection of
// image moment features through a softmax. Deterministic; no external
// weights needed.
class MomentProbeClassifier : public ClassifierBackend {
public:
    explicit MomentProbeClassifier(int k = 10, std::uint64_t seed = 0x6d6f6d656e74ull);
    MatrixRM predict(const std::vector<Image>& images) override;
    int num_classes() const override { return k_; }
    std::string descriptor() const override;
    bool reentrant() const override { return true; }

private:
    int k_;
    MatrixRM projection_;  // k x feature_dim
};

// Backend loading a dense softmax classifier from a named-tensor checkpoint
// ("weight" K x D over 8x8-downsampled pixels, "bias" K).
class ExternalWeightsClassifier : public ClassifierBackend {
public:
    explicit ExternalWeightsClassifier(const std::filesystem::path& weights_path);
    MatrixRM predict(const std::vector<Image>& images) override;
    int num_classes() const override { return k_; }
    std::string descriptor() const override { return "external:" + path_; }

private:
    int k_ = 0;
    std::string path_;
    MatrixRM weight_;
    Eigen::VectorXd bias_;
};

// Eq-of-definition Inception Score: split the image list into n_splits
// contiguous chunks, exp(mean KL(p(y|x) || p(y))) per chunk, mean/std across
// chunks. 0*log(0) is taken as 0.
std::pair<double, double> inception_score(const std::vector<Image>& images,
                                          ClassifierBackend& classifier, int n_splits);

// The raw per-split scores behind inception_score.
std::vector<double> inception_score_splits(const std::vector<Image>& images,
                                           ClassifierBackend& classifier, int n_splits);

}  // namespace ganbench
