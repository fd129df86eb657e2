#include "idla/analytics.hpp"

#include <cmath>
#include <stdexcept>

namespace idla {

FluctuationReport fluctuation_metrics(const Cluster& cluster, std::int32_t n) {
    if (cluster.size() == 0)
        throw std::invalid_argument("fluctuation_metrics: empty cluster");
    FluctuationReport report;
    report.n = n;
    report.delta_in = n - cluster.inner_full_radius();
    report.delta_out = cluster.max_norm() - n;
    for (std::int32_t k = n + 1; k <= cluster.max_norm(); ++k)
        report.outer_profile.push_back(cluster.layer_count(k));
    return report;
}

Envelope theorem_envelopes(std::int32_t n, const Rational& p) {
    if (n < 2) throw std::invalid_argument("theorem_envelopes: n >= 2");
    Envelope env;
    const double dn = n;
    if (Rational(1, 2) < p) {
        const double r = p.to_double() / (1.0 - p.to_double());
        const double half = 6.0 * std::log(dn) / std::log(r);
        env.inner_radius = dn - half;
        env.outer_radius = dn + half;
    } else {
        const double eta = std::sqrt(dn * std::log(dn));
        env.inner_radius = dn - 4.0 * eta;
        env.outer_radius = dn + 20.0 * eta;
    }
    if (env.inner_radius < 0) {
        env.inner_radius = 0;
        env.inner_clamped = true;
    }
    return env;
}

std::vector<AxisTimeSample> simulate_axis_times(std::int32_t m, std::int32_t replicas,
                                                RandomStream& rng) {
    if (m < 1 || replicas < 1)
        throw std::invalid_argument("simulate_axis_times: m, replicas >= 1");
    std::vector<double> log1m(static_cast<std::size_t>(m) + 1);
    for (std::int32_t i = 1; i <= m; ++i)
        log1m[static_cast<std::size_t>(i)] = std::log1p(-1.0 / (4.0 * i));
    std::vector<AxisTimeSample> samples;
    samples.reserve(static_cast<std::size_t>(replicas));
    for (std::int32_t rep = 0; rep < replicas; ++rep) {
        std::uint64_t t = 0;
        for (std::int32_t i = 1; i <= m; ++i) {
            // geometric on {1,2,...} with success probability 1/4i
            const double u = rng.unit_open();
            t += static_cast<std::uint64_t>(
                std::ceil(std::log(u) / log1m[static_cast<std::size_t>(i)]));
        }
        samples.push_back({m, t});
    }
    return samples;
}

double axis_time_variance(std::int32_t m) {
    double b = 0;
    for (std::int64_t i = 1; i <= m; ++i)
        b += static_cast<double>(16 * i * i - 4 * i);
    return b;
}

std::pair<double, double> lil_envelope(std::int32_t m, double eps) {
    if (m < 16) throw std::invalid_argument("lil_envelope: m >= 16");
    if (!(eps >= 0.0 && eps < 1.0))
        throw std::invalid_argument("lil_envelope: eps in [0,1)");
    const double dm = m;
    const double center = 2.0 * dm * (dm + 1.0);
    const double half =
        (1.0 - eps) * std::sqrt(32.0 * dm * dm * dm * std::log(std::log(dm)) / 3.0);
    return {center - half, center + half};
}

std::pair<double, double> chernoff_bounds(double mean, double b) {
    if (mean < 0 || b < 0)
        throw std::invalid_argument("chernoff_bounds: mean, b >= 0");
    if (b == 0) return {1.0, 1.0};
    const double upper = std::exp(-0.5 * b * b / (mean + b / 3.0));
    const double lower = mean == 0 ? 0.0 : std::exp(-0.5 * b * b / mean);
    return {upper, lower};
}

ChiSquare chi_square_uniform(std::span<const std::uint64_t> counts) {
    if (counts.size() < 2)
        throw std::invalid_argument("chi_square_uniform: need >= 2 cells");
    std::uint64_t total = 0;
    for (const auto c : counts) total += c;
    if (total == 0) throw std::invalid_argument("chi_square_uniform: empty sample");
    const double expected = static_cast<double>(total) / static_cast<double>(counts.size());
    double stat = 0;
    for (const auto c : counts) {
        const double d = static_cast<double>(c) - expected;
        stat += d * d / expected;
    }
    return {stat, static_cast<std::int64_t>(counts.size()) - 1};
}

ChiSquare chi_square_two_sample(std::span<const std::uint64_t> a,
                                std::span<const std::uint64_t> b) {
    if (a.size() != b.size() || a.empty())
        throw std::invalid_argument("chi_square_two_sample: size mismatch");
    double stat = 0;
    std::int64_t populated = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double s = static_cast<double>(a[i]) + static_cast<double>(b[i]);
        if (s == 0) continue;
        ++populated;
        const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
        stat += d * d / s;
    }
    return {stat, populated - 1};
}

double chi2_critical_1e3(std::int64_t df) {
    // Upper 1e-3 quantiles of the chi-square distribution for the df values
    // exercised by the suite.
    switch (df) {
        case 3: return 16.2662;
        case 7: return 24.3219;
        case 11: return 31.2641;
        case 19: return 43.8202;
        case 27: return 55.4760;
        case 39: return 72.0547;
        case 43: return 77.4186;
        case 44: return 78.7495;
        default:
            throw std::invalid_argument("chi2_critical_1e3: df not in frozen table");
    }
}

} // namespace idla
