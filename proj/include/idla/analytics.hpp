#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "idla/aggregation.hpp"
#include "idla/rational.hpp"
#include "idla/rng.hpp"

namespace idla {

/// Inner defect / outer excess of a cluster relative to the diamond D_n,
/// plus the occupancy profile of the layers beyond n.
struct FluctuationReport {
    std::int32_t n = 0;
    std::int32_t delta_in = 0;   // n - max{r : D_r subset of A}
    std::int32_t delta_out = 0;  // max occupied norm - n
    std::vector<std::uint32_t> outer_profile; // Z_k = #(A ∩ L_{n+k}), k >= 1
};

FluctuationReport fluctuation_metrics(const Cluster& cluster, std::int32_t n);

struct Envelope {
    double inner_radius = 0;
    double outer_radius = 0;
    bool inner_clamped = false; // envelope vacuous at tiny n
};

/// Containment envelopes for A(v_n): (n - 4 sqrt(n ln n), n + 20 sqrt(n ln n))
/// for general layered kernels, and (n - 6 log_r n, n + 6 log_r n) with
/// r = p/q when p > 1/2. A negative inner radius is clamped to 0 and flagged.
Envelope theorem_envelopes(std::int32_t n, const Rational& p);

struct AxisTimeSample {
    std::int32_t m = 0;
    std::uint64_t t = 0; // realized T_m; always >= m
};

/// Axis occupation times for the outward-directed kernel (p = 0 only):
/// T_m = sum of independent geometrics X_i with success probability 1/4i,
/// drawn by inverse CDF without simulating walks.
std::vector<AxisTimeSample> simulate_axis_times(std::int32_t m, std::int32_t replicas,
                                                RandomStream& rng);

inline double axis_time_mean(std::int32_t m) {
    return 2.0 * m * (m + 1.0); // sum of Ex X_i = 4i
}

/// B_m = sum of Var X_i = 16 i^2 - 4 i, by direct summation.
double axis_time_variance(std::int32_t m);

/// Iterated-logarithm band 2m(m+1) +- (1-eps) sqrt(32 m^3 ln ln m / 3);
/// a scaling diagnostic, not an assertion. Requires m >= 16.
std::pair<double, double> lil_envelope(std::int32_t m, double eps);

/// Chernoff tail bounds for a sum of independent indicators with the given
/// mean: upper tail exp(-b^2 / (2(mean + b/3))), lower tail
/// exp(-b^2 / (2 mean)).
std::pair<double, double> chernoff_bounds(double mean, double b);

struct ChiSquare {
    double statistic = 0;
    std::int64_t degrees_of_freedom = 0;
};

/// Goodness of fit against the uniform distribution over the cells.
ChiSquare chi_square_uniform(std::span<const std::uint64_t> counts);

/// Two-sample statistic for equal-size samples: sum (a_i-b_i)^2/(a_i+b_i)
/// over cells with a_i + b_i > 0; df = populated cells - 1.
ChiSquare chi_square_two_sample(std::span<const std::uint64_t> a,
                                std::span<const std::uint64_t> b);

/// Upper critical value of the chi-square distribution at alpha = 1e-3 for
/// the handful of df values used by the test suite (frozen table).
double chi2_critical_1e3(std::int64_t df);

} // namespace idla
