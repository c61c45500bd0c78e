#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace ganbench {

struct MetricGroup {
    std::string label;
    std::vector<double> samples;

    std::size_t n() const { return samples.size(); }
    double mean() const;
};

struct AnovaResult {
    double f_value = 0.0;
    int df_between = 0;
    int df_within = 0;
    double ss_between = 0.0;
    double ss_within = 0.0;
    double p_value = 1.0;
    std::vector<double> significant_at;  // alphas with p < alpha
};

struct TukeyResult {
    std::string group_a, group_b;
    double mean_diff = 0.0;  // signed, mean_a - mean_b
    double q_value = 0.0;
    double critical_q = 0.0;
    bool significant = false;
};

AnovaResult one_way_anova(const std::vector<MetricGroup>& groups,
                          const std::vector<double>& alphas = {0.05, 0.01, 0.001});

// Tukey-Kramer for unequal sizes (harmonic-mean n). alpha must lie in the
// supported range [0.0005, 0.2].
std::vector<TukeyResult> tukey_hsd(const std::vector<MetricGroup>& groups, double alpha);

struct SignificanceReport {
    std::string metric;
    AnovaResult anova;
    std::vector<TukeyResult> pairs;
    std::vector<double> alpha_levels;
};

SignificanceReport significance_report(const std::string& metric, const AnovaResult& anova,
                                       const std::vector<TukeyResult>& tukey,
                                       const std::vector<double>& alphas);

nlohmann::ordered_json to_json(const SignificanceReport& report);

// --- special functions (exposed for oracle tests) ---

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double regularized_incomplete_beta(double a, double b, double x);

// Survival function P(F >= f) for the F distribution with (d1, d2) dof.
double f_distribution_sf(double f, int d1, int d2);

// CDF of the studentized range with k groups and df error degrees of freedom
// (df <= 0 means infinite), evaluated by quadrature.
double studentized_range_cdf(double q, int k, int df);

// Upper critical value q s.t. P(Q > q) = alpha.
double studentized_range_critical(double alpha, int k, int df);

}  // namespace ganbench
