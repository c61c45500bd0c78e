#include "ganbench/metrics.hpp"

#include <cmath>
#include <limits>

#include "ganbench/errors.hpp"

namespace ganbench {

namespace {

// Normalized window weights (sum 1), row-major size x size.
Image make_window(const SsimConstants& c) {
    const int n = c.window_size;
    Image w(n, n);
    if (c.window == SsimConstants::Window::uniform) {
        w.setConstant(1.0 / (n * n));
        return w;
    }
    const double half = (n - 1) / 2.0;
    for (int r = 0; r < n; ++r)
        for (int col = 0; col < n; ++col) {
            const double dy = r - half, dx = col - half;
            w(r, col) = std::exp(-(dy * dy + dx * dx) / (2.0 * c.sigma * c.sigma));
        }
    w /= w.sum();
    return w;
}

double signed_pow(double base, double exponent) {
    if (exponent == 1.0) return base;
    return base >= 0.0 ? std::pow(base, exponent) : -std::pow(-base, exponent);
}

}  // namespace

SsimComponents ssim(const Image& x, const Image& y, const SsimConstants& consts) {
    if (x.rows() != y.rows() || x.cols() != y.cols())
        throw DimMismatch("ssim: image dimensions differ");
    const int n = consts.window_size;
    if (n > x.rows() || n > x.cols())
        throw WindowLargerThanImage("ssim: window exceeds image dimensions");

    const Image w = make_window(consts);
    const double C1 = consts.C1(), C2 = consts.C2(), C3 = consts.C3();
    const int out_h = static_cast<int>(x.rows()) - n + 1;
    const int out_w = static_cast<int>(x.cols()) - n + 1;

    SsimComponents out;
    out.map = Image(out_h, out_w);
    double sum_l = 0.0, sum_c = 0.0, sum_s = 0.0;

    for (int r = 0; r < out_h; ++r)
        for (int c = 0; c < out_w; ++c) {
            const auto px = x.block(r, c, n, n);
            const auto py = y.block(r, c, n, n);
            const double mu_x = (w * px).sum();
            const double mu_y = (w * py).sum();
            double var_x = (w * px.square()).sum() - mu_x * mu_x;
            double var_y = (w * py.square()).sum() - mu_y * mu_y;
            const double cov = (w * px * py).sum() - mu_x * mu_y;
            if (var_x < 0.0) var_x = 0.0;
            if (var_y < 0.0) var_y = 0.0;
            const double sig_x = std::sqrt(var_x), sig_y = std::sqrt(var_y);

            const double l = (2.0 * mu_x * mu_y + C1) / (mu_x * mu_x + mu_y * mu_y + C1);
            const double ct = (2.0 * sig_x * sig_y + C2) / (var_x + var_y + C2);
            const double s = (cov + C3) / (sig_x * sig_y + C3);
            sum_l += l;
            sum_c += ct;
            sum_s += s;
            out.map(r, c) = signed_pow(l, consts.alpha) * signed_pow(ct, consts.beta) *
                            signed_pow(s, consts.gamma);
        }

    const double count = static_cast<double>(out_h) * out_w;
    out.luminance = sum_l / count;
    out.contrast = sum_c / count;
    out.structure = sum_s / count;
    out.mssim = out.map.mean();
    return out;
}

PsnrResult psnr(const Image& x, const Image& y, double max_i, double cap_db) {
    if (x.rows() != y.rows() || x.cols() != y.cols())
        throw DimMismatch("psnr: image dimensions differ");
    if (max_i <= 0.0) throw DimMismatch("psnr: max_i must be > 0");
    const double mse = (x - y).square().mean();
    if (mse == 0.0) return {cap_db, true};
    const double db = 10.0 * std::log10(max_i * max_i / mse);
    return {std::min(db, cap_db), false};
}

std::string to_string(PairingStrategy p) {
    return p == PairingStrategy::index ? "index" : "nearest";
}

PairingStrategy pairing_from_string(const std::string& s) {
    if (s == "index") return PairingStrategy::index;
    if (s == "nearest") return PairingStrategy::nearest;
    throw Error("unknown pairing strategy '" + s + "'");
}

std::vector<std::pair<int, int>> pair_images(const std::vector<Image>& generated,
                                             const std::vector<Image>& reference,
                                             PairingStrategy strategy) {
    if (generated.empty() || reference.empty())
        throw SizeMismatch("pair_images: both image lists must be non-empty");

    std::vector<std::pair<int, int>> pairs;
    if (strategy == PairingStrategy::index) {
        if (generated.size() != reference.size())
            throw SizeMismatch("pair_images: index mode needs equal-size lists");
        for (int i = 0; i < static_cast<int>(generated.size()); ++i) pairs.emplace_back(i, i);
        return pairs;
    }

    for (int g = 0; g < static_cast<int>(generated.size()); ++g) {
        int best = 0;
        double best_mse = std::numeric_limits<double>::infinity();
        for (int r = 0; r < static_cast<int>(reference.size()); ++r) {
            if (generated[static_cast<std::size_t>(g)].rows() !=
                    reference[static_cast<std::size_t>(r)].rows() ||
                generated[static_cast<std::size_t>(g)].cols() !=
                    reference[static_cast<std::size_t>(r)].cols())
                throw DimMismatch("pair_images: mixed image dimensions");
            const double mse = (generated[static_cast<std::size_t>(g)] -
                                reference[static_cast<std::size_t>(r)])
                                   .square()
                                   .mean();
            if (mse < best_mse) {  // strict: ties keep the lowest reference index
                best_mse = mse;
                best = r;
            }
        }
        pairs.emplace_back(g, best);
    }
    return pairs;
}

}  // namespace ganbench
