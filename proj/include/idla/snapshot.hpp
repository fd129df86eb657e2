#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "idla/aggregation.hpp"
#include "idla/errors.hpp"

namespace idla {

struct SnapshotHeader {
    int format_version = 1;
    std::string kernel;       // family name
    std::string p;            // rational, e.g. "3/4"
    std::uint64_t seed = 0;
    std::uint64_t particles = 0;
    std::string start_digest; // 64-bit hex digest of the start multiset
    std::int32_t bounding_radius = 0;
};

std::string digest_starts(const ParticleConfig& starts);

/// Text snapshot: `#`-prefixed header lines, then one `x,y,order` line per
/// occupied site in settlement order (the first settled site has order 0).
/// Returns bytes written.
std::size_t write_snapshot(const Cluster& cluster, const SnapshotHeader& header,
                           std::ostream& sink);

/// Reconstructs the cluster with its invariants revalidated.
/// Throws ParseError with a line number on malformed input and
/// InvariantViolation if the rebuilt counts disagree with the sites.
std::pair<Cluster, SnapshotHeader> read_snapshot(std::istream& source);

enum class RenderStyle { Occupancy, SettlementOrder };

/// Binary PGM (P5), one pixel per lattice site over the bounding square of
/// the occupied set. Occupancy style uses {0, 255}; settlement-order style a
/// linear grayscale ramp by order (early bright).
std::vector<unsigned char> render_pgm(const Cluster& cluster, RenderStyle style);

} // namespace idla
