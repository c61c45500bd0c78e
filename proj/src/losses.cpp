#include "ganbench/losses.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "ganbench/errors.hpp"

namespace ganbench {

namespace {

void check_sizes(const AdversarialBatchScores& s) {
    if (s.d_real.size() < 1 || s.d_real.size() != s.d_fake.size())
        throw SizeMismatch("scores: |d_real| must equal |d_fake| >= 1");
}

void check_probability_mode(const Eigen::ArrayXd& v, bool critic_mode, const char* what) {
    if (critic_mode)
        throw ModeMismatch(std::string(what) + ": called with critic-mode scores");
    if ((v < 0.0).any() || (v > 1.0).any())
        throw ModeMismatch(std::string(what) + ": scores outside [0,1]");
}

// Clamp to [eps, 1-eps], counting how many entries triggered.
Eigen::ArrayXd clamp_probs(const Eigen::ArrayXd& v, int& events) {
    Eigen::ArrayXd out = v.min(1.0 - kProbEps).max(kProbEps);
    events += static_cast<int>((out != v).count());
    return out;
}

}  // namespace

LossWithGrad discriminator_bce_loss(const AdversarialBatchScores& scores) {
    check_sizes(scores);
    check_probability_mode(scores.d_real, scores.critic_mode, "discriminator_bce_loss");
    check_probability_mode(scores.d_fake, scores.critic_mode, "discriminator_bce_loss");

    LossWithGrad r;
    const double m = static_cast<double>(scores.m());
    const Eigen::ArrayXd real = clamp_probs(scores.d_real, r.clamp_events);
    const Eigen::ArrayXd fake = clamp_probs(scores.d_fake, r.clamp_events);

    r.value = -real.log().mean() - (1.0 - fake).log().mean();
    // clamped entries sit on a flat of the loss, so their gradient is zero
    r.grad_real = (scores.d_real == real).select(-1.0 / (m * real), 0.0);
    r.grad_fake = (scores.d_fake == fake).select(1.0 / (m * (1.0 - fake)), 0.0);
    return r;
}

LossWithGrad generator_bce_loss(const Eigen::ArrayXd& d_fake, bool saturating) {
    if (d_fake.size() < 1) throw SizeMismatch("generator_bce_loss: empty batch");
    check_probability_mode(d_fake, false, "generator_bce_loss");

    LossWithGrad r;
    const double m = static_cast<double>(d_fake.size());
    const Eigen::ArrayXd fake = clamp_probs(d_fake, r.clamp_events);
    if (saturating) {
        r.value = (1.0 - fake).log().mean();
        r.grad_fake = (d_fake == fake).select(-1.0 / (m * (1.0 - fake)), 0.0);
    } else {
        r.value = -fake.log().mean();
        r.grad_fake = (d_fake == fake).select(-1.0 / (m * fake), 0.0);
    }
    return r;
}

LossWithGrad wasserstein_critic_loss(const AdversarialBatchScores& scores) {
    check_sizes(scores);
    if (!scores.critic_mode)
        throw ModeMismatch("wasserstein_critic_loss: needs critic-mode scores");

    LossWithGrad r;
    const double m = static_cast<double>(scores.m());
    r.value = scores.d_fake.mean() - scores.d_real.mean();
    r.grad_real = Eigen::ArrayXd::Constant(scores.m(), -1.0 / m);
    r.grad_fake = Eigen::ArrayXd::Constant(scores.m(), 1.0 / m);
    return r;
}

LossWithGrad wasserstein_generator_loss(const Eigen::ArrayXd& c_fake) {
    if (c_fake.size() < 1) throw SizeMismatch("wasserstein_generator_loss: empty batch");
    LossWithGrad r;
    const double m = static_cast<double>(c_fake.size());
    r.value = -c_fake.mean();
    r.grad_fake = Eigen::ArrayXd::Constant(c_fake.size(), -1.0 / m);
    return r;
}

WassersteinEstimate exact_w1_empirical_1d(const Eigen::ArrayXd& a, const Eigen::ArrayXd& b) {
    if (a.size() != b.size() || a.size() < 1)
        throw SizeMismatch("exact_w1: distributions must have equal size >= 1");
    std::vector<double> sa(a.data(), a.data() + a.size());
    std::vector<double> sb(b.data(), b.data() + b.size());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    double total = 0.0;
    for (std::size_t i = 0; i < sa.size(); ++i) total += std::abs(sa[i] - sb[i]);
    WassersteinEstimate e;
    e.value = total / static_cast<double>(sa.size());
    e.source = WassersteinEstimate::Source::exact_1d_oracle;
    return e;
}

}  // namespace ganbench
