#include "ganbench/classifier.hpp"

#include <cmath>

#include "ganbench/checkpoint.hpp"
#include "ganbench/errors.hpp"
#include "ganbench/rng.hpp"

namespace ganbench {

namespace {

constexpr int kFeatureDim = 8 * 8 + 4;

// 8x8 block means plus first moments; scale-free enough to separate phantoms.
Eigen::VectorXd image_features(const Image& img) {
    Eigen::VectorXd f(kFeatureDim);
    const int gh = 8, gw = 8;
    const int bh = std::max<int>(1, static_cast<int>(img.rows()) / gh);
    const int bw = std::max<int>(1, static_cast<int>(img.cols()) / gw);
    for (int r = 0; r < gh; ++r)
        for (int c = 0; c < gw; ++c) {
            const int r0 = std::min<int>(r * bh, static_cast<int>(img.rows()) - 1);
            const int c0 = std::min<int>(c * bw, static_cast<int>(img.cols()) - 1);
            const int hh = std::min<int>(bh, static_cast<int>(img.rows()) - r0);
            const int ww = std::min<int>(bw, static_cast<int>(img.cols()) - c0);
            f[r * gw + c] = img.block(r0, c0, hh, ww).mean();
        }
    const double mean = img.mean();
    const double var = (img - mean).square().mean();
    double gx = 0.0, gy = 0.0;
    for (int r = 0; r + 1 < img.rows(); ++r) gy += (img.row(r + 1) - img.row(r)).abs().sum();
    for (int c = 0; c + 1 < img.cols(); ++c) gx += (img.col(c + 1) - img.col(c)).abs().sum();
    const double px = static_cast<double>(img.size());
    f[64] = mean;
    f[65] = std::sqrt(var);
    f[66] = gx / px;
    f[67] = gy / px;
    return f;
}

void softmax_rows(MatrixRM& logits) {
    for (long r = 0; r < logits.rows(); ++r) {
        const double mx = logits.row(r).maxCoeff();
        logits.row(r) = (logits.row(r).array() - mx).exp();
        logits.row(r) /= logits.row(r).sum();
    }
}

}  // namespace

StubClassifier::StubClassifier(MatrixRM rows) : rows_(std::move(rows)) {
    if (rows_.rows() < 1 || rows_.cols() < 2)
        throw DegenerateClassifier("stub: need at least 1 row and 2 classes");
}

MatrixRM StubClassifier::predict(const std::vector<Image>& images) {
    MatrixRM out(static_cast<long>(images.size()), rows_.cols());
    for (long i = 0; i < out.rows(); ++i) out.row(i) = rows_.row(i % rows_.rows());
    return out;
}

MomentProbeClassifier::MomentProbeClassifier(int k, std::uint64_t seed) : k_(k) {
    if (k < 2) throw DegenerateClassifier("moment-probe: K must be >= 2");
    Rng rng(seed);
    projection_.resize(k, kFeatureDim);
    for (long i = 0; i < projection_.size(); ++i)
        projection_.data()[i] = rng.gaussian();
}

MatrixRM MomentProbeClassifier::predict(const std::vector<Image>& images) {
    MatrixRM logits(static_cast<long>(images.size()), k_);
    for (std::size_t i = 0; i < images.size(); ++i)
        logits.row(static_cast<long>(i)) = (projection_ * image_features(images[i])).transpose();
    logits *= 4.0;  // temperature; spreads predictions enough to rank diversity
    softmax_rows(logits);
    return logits;
}

std::string MomentProbeClassifier::descriptor() const {
    return "moment-probe-k" + std::to_string(k_);
}

ExternalWeightsClassifier::ExternalWeightsClassifier(const std::filesystem::path& weights_path)
    : path_(weights_path.string()) {
    const Checkpoint ckpt = load_checkpoint(weights_path);
    const auto wit = ckpt.tensors.find("weight");
    const auto bit = ckpt.tensors.find("bias");
    if (wit == ckpt.tensors.end() || bit == ckpt.tensors.end())
        throw DegenerateClassifier("external classifier: weight/bias tensors missing in " + path_);
    const Tensor& w = wit->second;
    if (w.rank() != 2 || w.dim(1) != 64)
        throw DegenerateClassifier("external classifier: weight must be K x 64");
    k_ = w.dim(0);
    if (k_ < 2 || bit->second.size() != k_)
        throw DegenerateClassifier("external classifier: inconsistent K");
    weight_ = w.as_matrix(k_, 64);
    bias_ = Eigen::Map<const Eigen::VectorXd>(bit->second.data.data(), k_);
}

MatrixRM ExternalWeightsClassifier::predict(const std::vector<Image>& images) {
    MatrixRM logits(static_cast<long>(images.size()), k_);
    for (std::size_t i = 0; i < images.size(); ++i) {
        const Eigen::VectorXd f = image_features(images[i]).head(64);
        logits.row(static_cast<long>(i)) = (weight_ * f + bias_).transpose();
    }
    softmax_rows(logits);
    return logits;
}

std::vector<double> inception_score_splits(const std::vector<Image>& images,
                                           ClassifierBackend& classifier, int n_splits) {
    const int n = static_cast<int>(images.size());
    if (n_splits < 1) throw TooFewImages("inception_score: n_splits must be >= 1");
    if (n < n_splits) throw TooFewImages("inception_score: need at least n_splits images");

    const MatrixRM probs = classifier.predict(images);
    if (probs.rows() != n || probs.cols() != classifier.num_classes())
        throw DegenerateClassifier("inception_score: backend returned wrong shape");
    for (long r = 0; r < probs.rows(); ++r) {
        if (std::abs(probs.row(r).sum() - 1.0) > 1e-6 || (probs.row(r).array() < 0.0).any())
            throw DegenerateClassifier("inception_score: row " + std::to_string(r) +
                                       " is not a probability vector");
    }

    std::vector<double> scores;
    for (int s = 0; s < n_splits; ++s) {
        const int lo = s * n / n_splits;
        const int hi = (s + 1) * n / n_splits;
        const auto block = probs.middleRows(lo, hi - lo);
        const Eigen::RowVectorXd marginal = block.colwise().mean();
        double mean_kl = 0.0;
        for (long r = 0; r < block.rows(); ++r) {
            double kl = 0.0;
            for (long c = 0; c < block.cols(); ++c) {
                const double p = block(r, c);
                if (p > 0.0) kl += p * std::log(p / marginal[c]);
            }
            mean_kl += kl;
        }
        mean_kl /= static_cast<double>(block.rows());
        scores.push_back(std::exp(mean_kl));
    }
    return scores;
}

std::pair<double, double> inception_score(const std::vector<Image>& images,
                                          ClassifierBackend& classifier, int n_splits) {
    const std::vector<double> scores = inception_score_splits(images, classifier, n_splits);
    double mean = 0.0;
    for (double v : scores) mean += v;
    mean /= static_cast<double>(scores.size());
    double var = 0.0;
    for (double v : scores) var += (v - mean) * (v - mean);
    var /= static_cast<double>(scores.size());
    return {mean, std::sqrt(var)};
}

}  // namespace ganbench
