#pragma once

#include <cstdint>
#include <cstdlib>
#include <compare>
#include <vector>

#include "idla/rng.hpp"

namespace idla {

/// Lattice point of Z^2. Coordinates are 32-bit; radii beyond 2^30 are
/// rejected at configuration time.
struct Site {
    std::int32_t x = 0;
    std::int32_t y = 0;

    friend auto operator<=>(const Site&, const Site&) = default;
};

constexpr Site kOrigin{0, 0};

/// L^1 norm |x| + |y|, the layer index of the site.
inline std::int64_t norm1(Site s) {
    return std::abs(static_cast<std::int64_t>(s.x)) +
           std::abs(static_cast<std::int64_t>(s.y));
}

/// Number of sites in layer L_k: 1 for k=0, 4k otherwise.
inline std::int64_t layer_size(std::int64_t k) {
    return k == 0 ? 1 : 4 * k;
}

/// Number of sites in the diamond D_n: 2n(n+1)+1.
inline std::int64_t diamond_volume(std::int64_t n) {
    return 2 * n * (n + 1) + 1;
}

/// The i-th site of layer L_k in traversal order: start at (k,0), proceed
/// counterclockwise. O(1), no list materialized.
Site site_on_layer(std::int64_t k, std::int64_t i);

/// All sites with norm1 = k, in traversal order; length = layer_size(k).
std::vector<Site> layer_sites(std::int64_t k);

/// A site of L_k with probability exactly 1/layer_size(k) each.
/// k = 0 returns the origin without consuming a draw.
Site uniform_layer_site(std::int64_t k, RandomStream& rng);

/// Occupancy predicate over sites; implemented by Cluster.
class SiteSet {
public:
    virtual ~SiteSet() = default;
    virtual bool contains(Site s) const = 0;
};

} // namespace idla
