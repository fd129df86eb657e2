#include "doctest.h"

#include <sstream>
#include <string>

#include "idla/aggregation.hpp"
#include "idla/snapshot.hpp"

using namespace idla;

namespace {

SnapshotHeader header_for(const ParticleConfig& starts) {
    SnapshotHeader h;
    h.kernel = "mixture";
    h.p = "1/2";
    h.seed = 77;
    h.particles = 0;
    for (const auto& [s, c] : starts) h.particles += c;
    h.start_digest = digest_starts(starts);
    return h;
}

} // namespace

TEST_CASE("snapshot of a single-site cluster") {
    Cluster c(1);
    c.add(kOrigin);
    auto h = header_for({{kOrigin, 1}});
    h.bounding_radius = c.bounding_radius();

    std::ostringstream os;
    const auto bytes = write_snapshot(c, h, os);
    const std::string text = os.str();
    CHECK(bytes == text.size());
    CHECK(text.find("# idla-snapshot format_version=1\n") == 0);
    CHECK(text.find("# kernel=mixture\n") != std::string::npos);
    CHECK(text.find("# p=1/2\n") != std::string::npos);
    CHECK(text.substr(text.size() - 6) == "0,0,0\n");
}

TEST_CASE("snapshot round trip preserves sites, order and header") {
    const KernelSpec mix{KernelFamily::Mixture, {1, 2}};
    for (const std::uint64_t seed : {1ull, 2ull, 3ull}) {
        const ParticleConfig starts{{kOrigin, 400}};
        const auto c = grow(mix, starts, seed);
        auto h = header_for(starts);
        h.seed = seed;
        h.bounding_radius = c.bounding_radius();

        std::ostringstream os;
        write_snapshot(c, h, os);
        std::istringstream is(os.str());
        const auto [back, h2] = read_snapshot(is);

        CHECK(back.order_log() == c.order_log());
        CHECK(back.inner_full_radius() == c.inner_full_radius());
        CHECK(back.max_norm() == c.max_norm());
        CHECK(h2.kernel == h.kernel);
        CHECK(h2.p == h.p);
        CHECK(h2.seed == h.seed);
        CHECK(h2.particles == h.particles);
        CHECK(h2.start_digest == h.start_digest);
        CHECK(h2.bounding_radius == h.bounding_radius);

        // writing the reconstruction reproduces the bytes
        std::ostringstream os2;
        write_snapshot(back, h2, os2);
        CHECK(os2.str() == os.str());
    }
}

TEST_CASE("snapshot round trip at diamond scale") {
    const std::int32_t n = 50; // v_50 = 5101 sites
    Cluster c(n);
    for (std::int64_t k = 0; k <= n; ++k)
        for (std::int64_t i = 0; i < layer_size(k); ++i)
            c.add(site_on_layer(k, i));
    auto h = header_for({{kOrigin, static_cast<std::uint64_t>(diamond_volume(n))}});
    h.bounding_radius = n;

    std::ostringstream os;
    write_snapshot(c, h, os);
    std::istringstream is(os.str());
    const auto [back, h2] = read_snapshot(is);
    CHECK(back.size() == c.size());
    CHECK(back.inner_full_radius() == n);
}

TEST_CASE("read_snapshot rejects malformed input with line numbers") {
    auto parse = [](const std::string& text) {
        std::istringstream is(text);
        return read_snapshot(is);
    };

    CHECK_THROWS_AS(parse(""), ParseError);
    CHECK_THROWS_AS(parse("# kernel=mixture\n"), ParseError);
    CHECK_THROWS_AS(parse("0,0\n"), ParseError);
    CHECK_THROWS_AS(parse("0,0,zero\n"), ParseError);
    CHECK_THROWS_AS(parse("0,0,1\n"), ParseError);           // order must start at 0
    CHECK_THROWS_AS(parse("0,0,0\n1,0,2\n"), ParseError);    // order gap
    CHECK_THROWS_AS(parse("0,0,0\n0,0,1\n"), InvariantViolation); // duplicate site

    try {
        parse("0,0,0\n1,0,1\nbroken\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 3);
    }
}

TEST_CASE("digest is order-insensitive over the multiset and count-sensitive") {
    const ParticleConfig a{{kOrigin, 3}, {Site{1, 0}, 2}};
    const ParticleConfig b{{Site{1, 0}, 2}, {kOrigin, 3}};
    const ParticleConfig c{{kOrigin, 4}, {Site{1, 0}, 2}};
    CHECK(digest_starts(a) == digest_starts(b));
    CHECK(digest_starts(a) != digest_starts(c));
    CHECK(digest_starts(a).size() == 16);
}

TEST_CASE("PGM rendering") {
    Cluster c(2);
    c.add(kOrigin);
    for (const Site s : layer_sites(1)) c.add(s);

    const auto img = render_pgm(c, RenderStyle::Occupancy);
    const std::string head = "P5\n3 3\n255\n";
    CHECK(std::string(img.begin(), img.begin() + head.size()) == head);
    const auto* px = img.data() + head.size();
    CHECK(img.size() == head.size() + 9);
    // plus-shaped occupancy, row 0 at the top
    const unsigned char expect[9] = {0, 255, 0, 255, 255, 255, 0, 255, 0};
    for (int i = 0; i < 9; ++i) CHECK(px[i] == expect[i]);

}

TEST_CASE("PGM settlement ramp is monotone in order") {
    Cluster c(2);
    c.add(kOrigin);
    for (const Site s : layer_sites(1)) c.add(s);
    const auto img = render_pgm(c, RenderStyle::SettlementOrder);
    const std::string head = "P5\n3 3\n255\n";
    const auto* px = img.data() + head.size();
    // order: origin, (1,0), (0,1), (-1,0), (0,-1)
    CHECK(px[4] == 255);
    CHECK(px[5] == 255 - 200 * 1 / 4);
    CHECK(px[1] == 255 - 200 * 2 / 4);
    CHECK(px[3] == 255 - 200 * 3 / 4);
    CHECK(px[7] == 255 - 200 * 4 / 4);
}

TEST_CASE("diamond render is symmetric under 90-degree rotation") {
    const std::int32_t n = 9;
    Cluster c(n);
    for (std::int64_t k = 0; k <= n; ++k)
        for (std::int64_t i = 0; i < layer_size(k); ++i)
            c.add(site_on_layer(k, i));
    const auto img = render_pgm(c, RenderStyle::Occupancy);
    const std::int64_t side = 2 * n + 1;
    const std::string head = "P5\n19 19\n255\n";
    CHECK(std::string(img.begin(), img.begin() + head.size()) == head);
    auto pixel = [&](std::int64_t row, std::int64_t col) {
        return img[head.size() + static_cast<std::size_t>(row * side + col)];
    };
    for (std::int64_t r = 0; r < side; ++r)
        for (std::int64_t col = 0; col < side; ++col)
            CHECK(pixel(r, col) == pixel(col, side - 1 - r));
}
