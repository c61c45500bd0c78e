#include "ganbench/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ganbench/errors.hpp"

namespace ganbench {

namespace {

constexpr double kBetaTol = 1e-12;

double beta_cont_frac(double a, double b, double x) {
    // Lentz's algorithm for the continued fraction of I_x(a, b).
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < 1e-300) d = 1e-300;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 500; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < 1e-300) d = 1e-300;
        c = 1.0 + aa / c;
        if (std::abs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < 1e-300) d = 1e-300;
        c = 1.0 + aa / c;
        if (std::abs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kBetaTol) break;
    }
    return h;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }
double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); }

// Gauss-Legendre nodes/weights on [-1, 1], computed once per order by
// Newton iteration on the Legendre recurrence.
struct GaussLegendre {
    std::vector<double> nodes, weights;
    explicit GaussLegendre(int n) : nodes(n), weights(n) {
        for (int i = 0; i < n; ++i) {
            double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            double pp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = 0.0;
                for (int j = 0; j < n; ++j) {
                    const double p2 = p1;
                    p1 = p0;
                    p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
                }
                pp = n * (x * p0 - p1) / (x * x - 1.0);
                const double dx = p0 / pp;
                x -= dx;
                if (std::abs(dx) < 1e-15) break;
            }
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
        }
    }
};

const GaussLegendre& gl_inner() {
    static const GaussLegendre gl(160);
    return gl;
}
const GaussLegendre& gl_outer() {
    static const GaussLegendre gl(96);
    return gl;
}

// P(range of k standard normals <= w)
double range_cdf_normal(double w, int k) {
    if (w <= 0.0) return 0.0;
    const auto& gl = gl_inner();
    const double lo = -9.0, hi = 9.0;
    const double half = (hi - lo) / 2.0, mid = (hi + lo) / 2.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
        const double z = mid + half * gl.nodes[i];
        const double span = normal_cdf(z) - normal_cdf(z - w);
        sum += gl.weights[i] * normal_pdf(z) * std::pow(span, k - 1);
    }
    return std::min(1.0, k * half * sum);
}

}  // namespace

double MetricGroup::mean() const {
    double s = 0.0;
    for (double v : samples) s += v;
    return s / static_cast<double>(samples.size());
}

double regularized_incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    if (x < (a + 1.0) / (a + b + 2.0))
        return std::exp(ln_front) * beta_cont_frac(a, b, x) / a;
    return 1.0 - std::exp(ln_front) * beta_cont_frac(b, a, 1.0 - x) / b;
}

double f_distribution_sf(double f, int d1, int d2) {
    if (f <= 0.0) return 1.0;
    if (std::isinf(f)) return 0.0;
    const double x = static_cast<double>(d2) / (d2 + static_cast<double>(d1) * f);
    return regularized_incomplete_beta(d2 / 2.0, d1 / 2.0, x);
}

double studentized_range_cdf(double q, int k, int df) {
    if (k < 2) throw TooFewGroups("studentized range: k must be >= 2");
    if (q <= 0.0) return 0.0;
    if (df <= 0) return range_cdf_normal(q, k);

    // Integrate over the scale factor s = chi_df / sqrt(df):
    //   f(s) = df^(df/2) / (Gamma(df/2) 2^(df/2 - 1)) * s^(df-1) exp(-df s^2 / 2)
    const double nu = static_cast<double>(df);
    const double ln_norm = 0.5 * nu * std::log(nu) - std::lgamma(nu / 2.0) -
                           (nu / 2.0 - 1.0) * std::log(2.0);
    const auto& gl = gl_outer();
    const double lo = 0.0, hi = 1.0 + 12.0 / std::sqrt(nu);
    const double half = (hi - lo) / 2.0, mid = (hi + lo) / 2.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
        const double s = mid + half * gl.nodes[i];
        const double ln_density = ln_norm + (nu - 1.0) * std::log(s) - nu * s * s / 2.0;
        sum += gl.weights[i] * std::exp(ln_density) * range_cdf_normal(q * s, k);
    }
    return std::min(1.0, half * sum);
}

double studentized_range_critical(double alpha, int k, int df) {
    if (alpha < 0.0005 || alpha > 0.2)
        throw UnsupportedAlpha("studentized range: alpha " + std::to_string(alpha) +
                               " outside supported range [0.0005, 0.2]");
    double lo = 0.0, hi = 100.0;
    const double target = 1.0 - alpha;
    for (int it = 0; it < 80; ++it) {
        const double midq = (lo + hi) / 2.0;
        if (studentized_range_cdf(midq, k, df) < target)
            lo = midq;
        else
            hi = midq;
        if (hi - lo < 1e-9) break;
    }
    return (lo + hi) / 2.0;
}

AnovaResult one_way_anova(const std::vector<MetricGroup>& groups,
                          const std::vector<double>& alphas) {
    if (groups.size() < 2) throw TooFewGroups("anova: need at least 2 groups");
    for (const auto& g : groups) {
        if (g.n() < 2) throw TooFewSamples("anova: every group needs n >= 2");
        for (double v : g.samples)
            if (!std::isfinite(v)) throw TooFewSamples("anova: non-finite sample in " + g.label);
    }

    const int k = static_cast<int>(groups.size());
    long total_n = 0;
    double grand_sum = 0.0;
    for (const auto& g : groups) {
        total_n += static_cast<long>(g.n());
        for (double v : g.samples) grand_sum += v;
    }
    const double grand_mean = grand_sum / static_cast<double>(total_n);

    AnovaResult r;
    r.df_between = k - 1;
    r.df_within = static_cast<int>(total_n) - k;
    for (const auto& g : groups) {
        const double gm = g.mean();
        r.ss_between += static_cast<double>(g.n()) * (gm - grand_mean) * (gm - grand_mean);
        for (double v : g.samples) r.ss_within += (v - gm) * (v - gm);
    }

    if (r.ss_within == 0.0) {
        if (r.ss_between > 0.0) {
            r.f_value = std::numeric_limits<double>::infinity();
            r.p_value = 0.0;
        } else {
            r.f_value = 0.0;
            r.p_value = 1.0;
        }
    } else {
        r.f_value = (r.ss_between / r.df_between) / (r.ss_within / r.df_within);
        r.p_value = f_distribution_sf(r.f_value, r.df_between, r.df_within);
    }
    for (double a : alphas)
        if (r.p_value < a) r.significant_at.push_back(a);
    return r;
}

std::vector<TukeyResult> tukey_hsd(const std::vector<MetricGroup>& groups, double alpha) {
    const AnovaResult anova = one_way_anova(groups);
    if (anova.df_within < 1) throw TooFewSamples("tukey: df_within must be >= 1");
    const double msw = anova.ss_within / anova.df_within;
    const int k = static_cast<int>(groups.size());

    // Tukey-Kramer: harmonic-mean group size
    double inv_sum = 0.0;
    for (const auto& g : groups) inv_sum += 1.0 / static_cast<double>(g.n());
    const double n_h = static_cast<double>(k) / inv_sum;
    const double se = std::sqrt(msw / n_h);
    const double critical = studentized_range_critical(alpha, k, anova.df_within);

    std::vector<TukeyResult> out;
    for (int a = 0; a < k; ++a)
        for (int b = a + 1; b < k; ++b) {
            TukeyResult t;
            t.group_a = groups[static_cast<std::size_t>(a)].label;
            t.group_b = groups[static_cast<std::size_t>(b)].label;
            t.mean_diff = groups[static_cast<std::size_t>(a)].mean() -
                          groups[static_cast<std::size_t>(b)].mean();
            t.q_value = se > 0.0 ? std::abs(t.mean_diff) / se
                                 : (t.mean_diff == 0.0 ? 0.0
                                                       : std::numeric_limits<double>::infinity());
            t.critical_q = critical;
            t.significant = t.q_value > t.critical_q;
            out.push_back(std::move(t));
        }
    return out;
}

SignificanceReport significance_report(const std::string& metric, const AnovaResult& anova,
                                       const std::vector<TukeyResult>& tukey,
                                       const std::vector<double>& alphas) {
    SignificanceReport r;
    r.metric = metric;
    r.anova = anova;
    r.pairs = tukey;
    r.alpha_levels = alphas;
    return r;
}

nlohmann::ordered_json to_json(const SignificanceReport& report) {
    nlohmann::ordered_json j;
    j["metric"] = report.metric;
    j["anova"] = {{"f", report.anova.f_value},
                  {"df", {report.anova.df_between, report.anova.df_within}},
                  {"p", report.anova.p_value}};
    j["pairs"] = nlohmann::ordered_json::array();
    for (const auto& p : report.pairs)
        j["pairs"].push_back({{"a", p.group_a},
                              {"b", p.group_b},
                              {"mean_diff", p.mean_diff},
                              {"q", p.q_value},
                              {"critical_q", p.critical_q},
                              {"significant", p.significant}});
    j["alpha_levels"] = report.alpha_levels;
    return j;
}

}  // namespace ganbench
