#pragma once

#include <Eigen/Core>
#include <string>

namespace ganbench {

// Per-batch discriminator/critic outputs. sigmoid-mode scores live in (0,1);
// critic scores are unbounded reals.
struct AdversarialBatchScores {
    Eigen::ArrayXd d_real;
    Eigen::ArrayXd d_fake;
    bool critic_mode = false;

    long m() const { return d_real.size(); }
};

struct LossWithGrad {
    double value = 0.0;
    Eigen::ArrayXd grad_real;  // d loss / d d_real (empty when unused)
    Eigen::ArrayXd grad_fake;  // d loss / d d_fake
    int clamp_events = 0;      // scores clamped to [eps, 1-eps] before logs
};

inline constexpr double kProbEps = 1e-7;

// -(1/m) sum log d_real - (1/m) sum log(1 - d_fake)
LossWithGrad discriminator_bce_loss(const AdversarialBatchScores& scores);

// saturating: (1/m) sum log(1 - d_fake); non-saturating: -(1/m) sum log d_fake
LossWithGrad generator_bce_loss(const Eigen::ArrayXd& d_fake, bool saturating);

// mean(c_fake) - mean(c_real); -loss estimates W(P_r, P_g)
LossWithGrad wasserstein_critic_loss(const AdversarialBatchScores& scores);

// -mean(c_fake)
LossWithGrad wasserstein_generator_loss(const Eigen::ArrayXd& c_fake);

struct WassersteinEstimate {
    double value = 0.0;
    enum class Source { critic_dual, exact_1d_oracle } source = Source::exact_1d_oracle;
};

// Exact W1 between equal-size 1-D empirical distributions (sorted matching).
WassersteinEstimate exact_w1_empirical_1d(const Eigen::ArrayXd& a, const Eigen::ArrayXd& b);

}  // namespace ganbench
