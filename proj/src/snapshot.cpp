#include "idla/snapshot.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "idla/rng.hpp"

namespace idla {

std::string digest_starts(const ParticleConfig& starts) {
    std::uint64_t h = 0x5a17ab1ed1a90000ull;
    for (const auto& [s, c] : starts) {
        h = mix64(h ^ (static_cast<std::uint64_t>(static_cast<std::uint32_t>(s.x)) << 32 |
                       static_cast<std::uint32_t>(s.y)));
        h = mix64(h ^ c);
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::size_t write_snapshot(const Cluster& cluster, const SnapshotHeader& header,
                           std::ostream& sink) {
    std::ostringstream os;
    os << "# idla-snapshot format_version=" << header.format_version << "\n"
       << "# kernel=" << header.kernel << "\n"
       << "# p=" << header.p << "\n"
       << "# seed=" << header.seed << "\n"
       << "# particles=" << header.particles << "\n"
       << "# starts=" << header.start_digest << "\n"
       << "# bounding_radius=" << header.bounding_radius << "\n";
    std::size_t order = 0;
    for (const Site s : cluster.order_log())
        os << s.x << "," << s.y << "," << order++ << "\n";
    const std::string text = os.str();
    sink.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!sink) throw std::runtime_error("write_snapshot: sink write failure");
    return text.size();
}

namespace {

std::string header_value(const std::string& line, int lineno) {
    const auto eq = line.find('=');
    if (eq == std::string::npos)
        throw ParseError("read_snapshot: malformed header line", lineno);
    return line.substr(eq + 1);
}

} // namespace

std::pair<Cluster, SnapshotHeader> read_snapshot(std::istream& source) {
    SnapshotHeader header;
    std::vector<Site> sites;
    std::string line;
    int lineno = 0;
    std::size_t expected_order = 0;
    while (std::getline(source, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (line.find("format_version=") != std::string::npos)
                header.format_version = std::stoi(header_value(line, lineno));
            else if (line.rfind("# kernel=", 0) == 0)
                header.kernel = header_value(line, lineno);
            else if (line.rfind("# p=", 0) == 0)
                header.p = header_value(line, lineno);
            else if (line.rfind("# seed=", 0) == 0)
                header.seed = std::stoull(header_value(line, lineno));
            else if (line.rfind("# particles=", 0) == 0)
                header.particles = std::stoull(header_value(line, lineno));
            else if (line.rfind("# starts=", 0) == 0)
                header.start_digest = header_value(line, lineno);
            else if (line.rfind("# bounding_radius=", 0) == 0)
                header.bounding_radius = std::stoi(header_value(line, lineno));
            continue;
        }
        Site s;
        std::size_t order = 0;
        const char* ptr = line.data();
        const char* end = ptr + line.size();
        auto r1 = std::from_chars(ptr, end, s.x);
        if (r1.ec != std::errc{} || r1.ptr == end || *r1.ptr != ',')
            throw ParseError("read_snapshot: bad data line", lineno);
        auto r2 = std::from_chars(r1.ptr + 1, end, s.y);
        if (r2.ec != std::errc{} || r2.ptr == end || *r2.ptr != ',')
            throw ParseError("read_snapshot: bad data line", lineno);
        auto r3 = std::from_chars(r2.ptr + 1, end, order);
        if (r3.ec != std::errc{} || r3.ptr != end)
            throw ParseError("read_snapshot: bad data line", lineno);
        if (order != expected_order)
            throw ParseError("read_snapshot: settlement order out of sequence", lineno);
        ++expected_order;
        sites.push_back(s);
    }
    if (sites.empty()) throw ParseError("read_snapshot: no data lines", lineno);

    std::int64_t max_norm = 0;
    for (const Site s : sites) max_norm = std::max(max_norm, norm1(s));
    Cluster cluster(static_cast<std::int32_t>(
        std::max<std::int64_t>(max_norm, header.bounding_radius)));
    for (const Site s : sites) {
        if (cluster.contains(s))
            throw InvariantViolation("read_snapshot: duplicate site");
        cluster.add(s);
    }
    cluster.check_invariants();
    return {std::move(cluster), std::move(header)};
}

std::vector<unsigned char> render_pgm(const Cluster& cluster, RenderStyle style) {
    std::int32_t extent = 0;
    for (const Site s : cluster.order_log())
        extent = std::max({extent, std::abs(s.x), std::abs(s.y)});
    const std::int64_t side = 2 * static_cast<std::int64_t>(extent) + 1;

    std::ostringstream head;
    head << "P5\n" << side << " " << side << "\n255\n";
    const std::string h = head.str();

    std::vector<unsigned char> out(h.begin(), h.end());
    const std::size_t payload_at = out.size();
    out.resize(payload_at + static_cast<std::size_t>(side * side), 0);

    const std::size_t total = cluster.size();
    std::size_t order = 0;
    for (const Site s : cluster.order_log()) {
        // row 0 is the top of the image (y = +extent)
        const std::size_t px = static_cast<std::size_t>(
            (static_cast<std::int64_t>(extent) - s.y) * side + (s.x + extent));
        unsigned char v = 255;
        if (style == RenderStyle::SettlementOrder && total > 1)
            v = static_cast<unsigned char>(255 - (200 * order) / (total - 1));
        out[payload_at + px] = v;
        ++order;
    }
    return out;
}

} // namespace idla
