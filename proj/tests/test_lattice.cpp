#include "doctest.h"

#include <cmath>
#include <map>
#include <set>

#include "idla/lattice.hpp"

using namespace idla;

TEST_CASE("norm1 basics") {
    CHECK(norm1({0, 0}) == 0);
    CHECK(norm1({3, -2}) == 5);
    for (const Site s : layer_sites(7)) CHECK(norm1(s) == 7);
}

TEST_CASE("layer sizes and diamond volumes") {
    CHECK(layer_size(0) == 1);
    CHECK(layer_size(1) == 4);
    CHECK(layer_size(5) == 20);
    CHECK(diamond_volume(0) == 1);
    CHECK(diamond_volume(100) == 20201);
    CHECK(diamond_volume(350) == 245701);

    // partial sums of layer sizes telescope to the diamond volume
    std::int64_t sum = 0;
    for (std::int64_t k = 0; k <= 500; ++k) {
        sum += layer_size(k);
        CHECK(sum == diamond_volume(k));
    }
}

TEST_CASE("layer_sites enumerates each layer exactly once") {
    CHECK(layer_sites(0) == std::vector<Site>{kOrigin});

    const auto l1 = layer_sites(1);
    CHECK(l1 == std::vector<Site>{{1, 0}, {0, 1}, {-1, 0}, {0, -1}});

    for (std::int64_t k : {2, 5, 17, 50}) {
        const auto sites = layer_sites(k);
        CHECK(static_cast<std::int64_t>(sites.size()) == layer_size(k));
        std::set<Site> unique(sites.begin(), sites.end());
        CHECK(unique.size() == sites.size());
        // brute-force cross-check over the bounding box
        std::set<Site> expected;
        for (std::int32_t x = static_cast<std::int32_t>(-k); x <= k; ++x)
            for (std::int32_t y = static_cast<std::int32_t>(-k); y <= k; ++y)
                if (norm1({x, y}) == k) expected.insert({x, y});
        CHECK(unique == expected);
    }
}

TEST_CASE("layer traversal starts at (k,0) counterclockwise") {
    CHECK(site_on_layer(3, 0) == Site{3, 0});
    CHECK(site_on_layer(3, 1) == Site{2, 1});
    CHECK(site_on_layer(3, 3) == Site{0, 3});
    CHECK(site_on_layer(3, 11) == Site{2, -1});
}

TEST_CASE("uniform_layer_site is uniform and deterministic") {
    RandomStream rng(7);
    CHECK(uniform_layer_site(0, rng) == kOrigin);

    const int draws = 120000;
    const std::int64_t k = 3;
    std::map<Site, int> counts;
    for (int i = 0; i < draws; ++i) ++counts[uniform_layer_site(k, rng)];
    CHECK(counts.size() == 12);
    const double expect = draws / 12.0;
    const double sigma = std::sqrt(draws * (1.0 / 12) * (11.0 / 12));
    for (const auto& [site, c] : counts)
        CHECK(std::abs(c - expect) < 4 * sigma);

    RandomStream a(99), b(99);
    for (int i = 0; i < 100; ++i)
        CHECK(uniform_layer_site(5, a) == uniform_layer_site(5, b));
}
