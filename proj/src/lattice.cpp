#include "idla/lattice.hpp"

#include <cassert>

namespace idla {

Site site_on_layer(std::int64_t k, std::int64_t i) {
    assert(k >= 0 && i >= 0 && i < layer_size(k));
    if (k == 0) return kOrigin;
    const std::int64_t quadrant = i / k;
    const std::int64_t j = i % k;
    const auto c = [](std::int64_t v) { return static_cast<std::int32_t>(v); };
    switch (quadrant) {
        case 0: return {c(k - j), c(j)};
        case 1: return {c(-j), c(k - j)};
        case 2: return {c(-(k - j)), c(-j)};
        default: return {c(j), c(-(k - j))};
    }
}

std::vector<Site> layer_sites(std::int64_t k) {
    std::vector<Site> out;
    out.reserve(static_cast<std::size_t>(layer_size(k)));
    for (std::int64_t i = 0; i < layer_size(k); ++i)
        out.push_back(site_on_layer(k, i));
    return out;
}

Site uniform_layer_site(std::int64_t k, RandomStream& rng) {
    if (k == 0) return kOrigin;
    return site_on_layer(k, static_cast<std::int64_t>(
                                rng.below(static_cast<std::uint64_t>(4 * k))));
}

} // namespace idla
