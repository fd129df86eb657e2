#include "doctest.h"

#include <cmath>

#include "idla/analytics.hpp"

using namespace idla;

namespace {

Cluster full_diamond(std::int32_t n) {
    Cluster c(n + 2);
    for (std::int64_t k = 0; k <= n; ++k)
        for (std::int64_t i = 0; i < layer_size(k); ++i)
            c.add(site_on_layer(k, i));
    return c;
}

} // namespace

TEST_CASE("fluctuation metrics on exact diamonds") {
    for (const std::int32_t n : {0, 1, 7, 40}) {
        const auto r = fluctuation_metrics(full_diamond(n), n);
        CHECK(r.n == n);
        CHECK(r.delta_in == 0);
        CHECK(r.delta_out == 0);
        CHECK(r.outer_profile.empty());
    }
}

TEST_CASE("fluctuation metrics see one-site perturbations") {
    const std::int32_t n = 5;
    Cluster c(n + 2);
    for (std::int64_t k = 0; k <= n; ++k)
        for (std::int64_t i = 0; i < layer_size(k); ++i)
            if (!(k == n && i == 0)) c.add(site_on_layer(k, i)); // skip (5,0)
    c.add({6, 0});

    const auto r = fluctuation_metrics(c, n);
    CHECK(r.delta_in == 1);
    CHECK(r.delta_out == 1);
    CHECK(r.outer_profile == std::vector<std::uint32_t>{1});
}

TEST_CASE("theorem envelopes") {
    const auto general = theorem_envelopes(100, {1, 2});
    CHECK(general.inner_radius ==
          doctest::Approx(100 - 4 * std::sqrt(100 * std::log(100.0))));
    CHECK(general.outer_radius ==
          doctest::Approx(100 + 20 * std::sqrt(100 * std::log(100.0))));
    CHECK(general.inner_radius == doctest::Approx(14.159).epsilon(1e-3));
    CHECK(!general.inner_clamped);

    // inward-biased regime: logarithmic band of half-width 6 log_r n
    const auto biased = theorem_envelopes(100, {3, 4});
    const double half = 6.0 * std::log(100.0) / std::log(3.0);
    CHECK(half == doctest::Approx(25.151).epsilon(1e-3));
    CHECK(biased.inner_radius == doctest::Approx(100 - half));
    CHECK(biased.outer_radius == doctest::Approx(100 + half));

    // tiny n: the general inner radius goes negative and is clamped
    const auto tiny = theorem_envelopes(2, {1, 2});
    CHECK(tiny.inner_radius == 0.0);
    CHECK(tiny.inner_clamped);
}

TEST_CASE("axis time moments") {
    CHECK(axis_time_mean(1) == 4.0);
    CHECK(axis_time_mean(200) == 80400.0);
    CHECK(axis_time_variance(1) == 12.0);
    CHECK(axis_time_variance(200) == 42906800.0);
}

TEST_CASE("simulated axis times match the moments") {
    RandomStream rng(808);

    const int reps1 = 20000;
    auto samples = simulate_axis_times(1, reps1, rng);
    CHECK(samples.size() == reps1);
    double sum = 0;
    for (const auto& s : samples) {
        CHECK(s.m == 1);
        CHECK(s.t >= 1);
        sum += static_cast<double>(s.t);
    }
    double tol = 4 * std::sqrt(axis_time_variance(1) / reps1);
    CHECK(std::abs(sum / reps1 - 4.0) < tol);

    const int reps = 2000;
    const std::int32_t m = 30;
    samples = simulate_axis_times(m, reps, rng);
    sum = 0;
    for (const auto& s : samples) {
        CHECK(s.t >= static_cast<std::uint64_t>(m));
        sum += static_cast<double>(s.t);
    }
    tol = 4 * std::sqrt(axis_time_variance(m) / reps);
    CHECK(std::abs(sum / reps - axis_time_mean(m)) < tol);
}

TEST_CASE("iterated-logarithm envelope") {
    const std::int32_t m = 10000;
    const auto [lo, hi] = lil_envelope(m, 0.0);
    const double center = axis_time_mean(m);
    CHECK(hi - center == doctest::Approx(center - lo));
    const double half =
        std::sqrt(32.0 * std::pow(m, 3) * std::log(std::log(m)) / 3.0);
    CHECK(hi - lo == doctest::Approx(2 * half));
    CHECK(half == doctest::Approx(4.8667e6).epsilon(1e-3));

    const auto [lo2, hi2] = lil_envelope(m, 0.25);
    CHECK(hi2 - lo2 == doctest::Approx(0.75 * 2 * half));
}

TEST_CASE("Chernoff tail bounds") {
    const auto [upper, lower] = chernoff_bounds(100, 30);
    CHECK(upper == doctest::Approx(std::exp(-900.0 / 220.0)));
    CHECK(lower == doctest::Approx(std::exp(-4.5)));
    CHECK(upper == doctest::Approx(0.016726).epsilon(1e-4));
    CHECK(lower == doctest::Approx(0.011109).epsilon(1e-4));

    const auto [u0, l0] = chernoff_bounds(100, 0);
    CHECK(l0 == 1.0);
    CHECK(u0 == 1.0);

    double prev_u = 1.0, prev_l = 1.0;
    for (double b = 1; b <= 60; b += 1) {
        const auto [u, l] = chernoff_bounds(100, b);
        CHECK(u <= prev_u);
        CHECK(l <= prev_l);
        CHECK(l >= 0.0);
        CHECK(u <= 1.0);
        prev_u = u;
        prev_l = l;
    }
}

TEST_CASE("chi-square statistics") {
    const std::uint64_t even[] = {12, 8};
    auto chi = chi_square_uniform(even);
    CHECK(chi.statistic == doctest::Approx(0.8));
    CHECK(chi.degrees_of_freedom == 1);

    const std::uint64_t flat[] = {10, 10, 10, 10};
    chi = chi_square_uniform(flat);
    CHECK(chi.statistic == 0.0);
    CHECK(chi.degrees_of_freedom == 3);

    // empty cells drop out of the two-sample statistic
    const std::uint64_t a[] = {10, 0, 6};
    const std::uint64_t b[] = {8, 0, 10};
    chi = chi_square_two_sample(a, b);
    CHECK(chi.degrees_of_freedom == 1);
    CHECK(chi.statistic == doctest::Approx(4.0 / 18.0 + 16.0 / 16.0));
}

TEST_CASE("frozen critical values") {
    CHECK(chi2_critical_1e3(3) == doctest::Approx(16.2662));
    CHECK(chi2_critical_1e3(19) == doctest::Approx(43.8202));
    CHECK(chi2_critical_1e3(43) == doctest::Approx(77.4186));
}
