#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ganbench/data_pipeline.hpp"

namespace ganbench {

struct SsimConstants {
    double K1 = 0.01;
    double K2 = 0.03;
    double L = 1.0;  // dynamic range of the pixel domain
    enum class Window { gaussian, uniform } window = Window::gaussian;
    int window_size = 11;
    double sigma = 1.5;  // gaussian window only
    double alpha = 1.0, beta = 1.0, gamma = 1.0;

    double C1() const { return (K1 * L) * (K1 * L); }
    double C2() const { return (K2 * L) * (K2 * L); }
    double C3() const { return C2() / 2.0; }
};

struct SsimComponents {
    double luminance = 0.0;  // mean of the per-window l term
    double contrast = 0.0;
    double structure = 0.0;
    Image map;               // per-window SSIM values (valid positions)
    double mssim = 0.0;
};

SsimComponents ssim(const Image& x, const Image& y, const SsimConstants& consts = {});

struct PsnrResult {
    double db = 0.0;
    bool exact = false;  // true when MSE was 0 and the cap sentinel applies
};

PsnrResult psnr(const Image& x, const Image& y, double max_i, double cap_db = 100.0);

enum class PairingStrategy { index, nearest };

std::string to_string(PairingStrategy p);
PairingStrategy pairing_from_string(const std::string& s);

// Returns (generated index, reference index) pairs. Index mode pairs by
// position (sizes must match); nearest mode pairs each generated image with
// its minimum-MSE reference (with replacement, ties to the lowest index).
std::vector<std::pair<int, int>> pair_images(const std::vector<Image>& generated,
                                             const std::vector<Image>& reference,
                                             PairingStrategy strategy);

struct MetricSnapshot {
    int epoch = 0;
    double ssim_mean = 0.0, ssim_std = 0.0;
    double psnr_mean = 0.0, psnr_std = 0.0;
    double is_mean = 0.0, is_std = 0.0;
    std::string pairing;
    int n_images = 0;
};

}  // namespace ganbench
