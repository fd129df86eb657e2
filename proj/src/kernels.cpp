#include "idla/kernels.hpp"

#include <algorithm>
#include <cassert>
#include <cstdlib>
#include <map>
#include <sstream>
#include <stdexcept>

namespace idla {

Rational Rational::parse(const std::string& text) {
    const auto slash = text.find('/');
    if (slash != std::string::npos) {
        const std::int64_t num = std::stoll(text.substr(0, slash));
        const std::int64_t den = std::stoll(text.substr(slash + 1));
        return {num, den};
    }
    const auto dot = text.find('.');
    if (dot == std::string::npos) return {std::stoll(text), 1};
    const std::string whole = text.substr(0, dot);
    const std::string frac = text.substr(dot + 1);
    if (frac.size() > 15) throw std::invalid_argument("Rational::parse: too many digits");
    std::int64_t den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    const bool neg = !whole.empty() && whole[0] == '-';
    std::int64_t num = (whole.empty() || whole == "-") ? 0 : std::stoll(whole);
    std::int64_t fnum = frac.empty() ? 0 : std::stoll(frac);
    num = num * den + (neg ? -fnum : fnum);
    return {num, den};
}

std::string KernelSpec::name() const {
    switch (family) {
        case KernelFamily::OutwardLayered: return "outward";
        case KernelFamily::InwardLayered: return "inward";
        case KernelFamily::Mixture: return "mixture";
        case KernelFamily::ReflectedAxes: return "reflected";
        case KernelFamily::SimpleRandomWalk: return "srw";
    }
    return "?";
}

namespace {

using Row = std::vector<RowEntry>;

std::int32_t sgn(std::int32_t v) { return v < 0 ? -1 : 1; }

void push(Row& row, Site t, Rational prob) {
    if (prob.num() != 0) row.push_back({t, prob});
}

// Q_out in canonical coordinates with axis reflections applied to targets.
Row qout_row(Site s) {
    Row row;
    const std::int32_t sx = sgn(s.x), sy = sgn(s.y);
    const std::int64_t a = std::abs(s.x), b = std::abs(s.y);
    if (a == 0 && b == 0) {
        for (Site t : {Site{1, 0}, Site{0, 1}, Site{-1, 0}, Site{0, -1}})
            push(row, t, {1, 4});
    } else if (b == 0) { // on the x-axis
        push(row, {static_cast<std::int32_t>(sx * (a + 1)), 0}, {a, a + 1});
        push(row, {static_cast<std::int32_t>(sx * a), 1}, {1, 2 * (a + 1)});
        push(row, {static_cast<std::int32_t>(sx * a), -1}, {1, 2 * (a + 1)});
    } else if (a == 0) { // on the y-axis
        push(row, {0, static_cast<std::int32_t>(sy * (b + 1))}, {b, b + 1});
        push(row, {1, static_cast<std::int32_t>(sy * b)}, {1, 2 * (b + 1)});
        push(row, {-1, static_cast<std::int32_t>(sy * b)}, {1, 2 * (b + 1)});
    } else {
        push(row, {static_cast<std::int32_t>(sx * a), static_cast<std::int32_t>(sy * (b + 1))},
             {2 * b + 1, 2 * (a + b + 1)});
        push(row, {static_cast<std::int32_t>(sx * (a + 1)), static_cast<std::int32_t>(sy * b)},
             {2 * a + 1, 2 * (a + b + 1)});
    }
    return row;
}

Row qin_row(Site s) {
    Row row;
    const std::int32_t sx = sgn(s.x), sy = sgn(s.y);
    const std::int64_t a = std::abs(s.x), b = std::abs(s.y);
    if (a == 0 && b == 0) {
        push(row, kOrigin, 1); // absorbing
    } else if (b == 0) {
        push(row, {static_cast<std::int32_t>(sx * (a - 1)), 0}, 1);
    } else if (a == 0) {
        push(row, {0, static_cast<std::int32_t>(sy * (b - 1))}, 1);
    } else {
        push(row, {static_cast<std::int32_t>(sx * a), static_cast<std::int32_t>(sy * (b - 1))},
             {2 * b - 1, 2 * (a + b - 1)});
        push(row, {static_cast<std::int32_t>(sx * (a - 1)), static_cast<std::int32_t>(sy * b)},
             {2 * a - 1, 2 * (a + b - 1)});
    }
    return row;
}

Row srw_row(Site s) {
    Row row;
    push(row, {s.x + 1, s.y}, {1, 4});
    push(row, {s.x - 1, s.y}, {1, 4});
    push(row, {s.x, s.y + 1}, {1, 4});
    push(row, {s.x, s.y - 1}, {1, 4});
    return row;
}

// Simple random walk with inward steps reflected to outward steps on the
// axes; at the origin, 1/4 to each neighbor.
Row reflected_row(Site s) {
    const std::int32_t sx = sgn(s.x), sy = sgn(s.y);
    if (s.x != 0 && s.y != 0) return srw_row(s);
    Row row;
    if (s.x == 0 && s.y == 0) return srw_row(s);
    if (s.y == 0) {
        push(row, {s.x + sx, 0}, {1, 2});
        push(row, {s.x, 1}, {1, 4});
        push(row, {s.x, -1}, {1, 4});
    } else {
        push(row, {0, s.y + sy}, {1, 2});
        push(row, {1, s.y}, {1, 4});
        push(row, {-1, s.y}, {1, 4});
    }
    return row;
}

Row mixture_row(const Rational& p, Site s) {
    const Rational q = Rational(1) - p;
    std::map<Site, Rational> acc;
    for (const auto& e : qin_row(s)) {
        auto [it, fresh] = acc.emplace(e.target, p * e.prob);
        if (!fresh) it->second = it->second + p * e.prob;
    }
    for (const auto& e : qout_row(s)) {
        auto [it, fresh] = acc.emplace(e.target, q * e.prob);
        if (!fresh) it->second = it->second + q * e.prob;
    }
    Row row;
    for (const auto& [t, prob] : acc) push(row, t, prob);
    return row;
}

void sort_row(Row& row) {
    std::sort(row.begin(), row.end(),
              [](const RowEntry& a, const RowEntry& b) { return a.target < b.target; });
}

std::string site_str(Site s) {
    return "(" + std::to_string(s.x) + "," + std::to_string(s.y) + ")";
}

} // namespace

TransitionRow transitions(const KernelSpec& spec, Site s) {
    Row row;
    switch (spec.family) {
        case KernelFamily::OutwardLayered: row = qout_row(s); break;
        case KernelFamily::InwardLayered: row = qin_row(s); break;
        case KernelFamily::Mixture: row = mixture_row(spec.p, s); break;
        case KernelFamily::ReflectedAxes: row = reflected_row(s); break;
        case KernelFamily::SimpleRandomWalk: row = srw_row(s); break;
    }
    sort_row(row);
#ifndef NDEBUG
    Rational sum{0, 1};
    for (const auto& e : row) sum = sum + e.prob;
    assert(sum == Rational(1));
#endif
    return row;
}

std::string Violation::line() const {
    std::ostringstream os;
    switch (axiom) {
        case Axiom::U1:
            os << "U1 k=" << k << " l=" << l << " x=" << site_str(a)
               << " y=" << site_str(b) << " prob=" << sum_a.str();
            break;
        case Axiom::U2:
            os << "U2 k=" << k << " x=" << site_str(a)
               << " no positive transition to layer " << (k + 1);
            break;
        case Axiom::U3:
            os << "U3 k=" << k << " l=" << l << " y=" << site_str(a)
               << " z=" << site_str(b) << " sum_y=" << sum_a.str()
               << " sum_z=" << sum_b.str();
            break;
    }
    return os.str();
}

std::string ValidationReport::text() const {
    std::string out;
    for (const auto& v : violations) {
        out += v.line();
        out += '\n';
    }
    return out;
}

ValidationReport validate_uniform_layering(const KernelSpec& spec, std::int64_t kmax) {
    if (kmax < 1) throw std::invalid_argument("validate_uniform_layering: kmax >= 1");
    kmax = std::min<std::int64_t>(kmax, 1000);
    ValidationReport report;
    report.kmax = kmax;

    for (std::int64_t k = 0; k <= kmax; ++k) {
        // Column sums per target layer reached from L_k.
        std::map<std::int64_t, std::map<Site, Rational>> colsums;
        for (std::int64_t i = 0; i < layer_size(k); ++i) {
            const Site x = site_on_layer(k, i);
            bool reaches_next = false;
            for (const auto& e : transitions(spec, x)) {
                const std::int64_t l = norm1(e.target);
                if (l > k + 1)
                    report.violations.push_back(
                        {Violation::Axiom::U1, k, l, x, e.target, e.prob, {0, 1}});
                if (l == k + 1) reaches_next = true;
                auto [it, fresh] = colsums[l].emplace(e.target, e.prob);
                if (!fresh) it->second = it->second + e.prob;
            }
            if (!reaches_next)
                report.violations.push_back(
                    {Violation::Axiom::U2, k, k + 1, x, {}, {0, 1}, {0, 1}});
        }
        // (U3): within each receiving layer, every site (including ones that
        // receive nothing) must carry the same column sum.
        for (const auto& [l, sums] : colsums) {
            const Rational ref = sums.begin()->second;
            const Site ref_site = sums.begin()->first;
            bool reported = false;
            if (static_cast<std::int64_t>(sums.size()) < layer_size(l) &&
                !(ref == Rational(0))) {
                // find a site of L_l absent from the map
                for (std::int64_t i = 0; i < layer_size(l) && !reported; ++i) {
                    const Site z = site_on_layer(l, i);
                    if (!sums.count(z)) {
                        report.violations.push_back(
                            {Violation::Axiom::U3, k, l, ref_site, z, ref, {0, 1}});
                        reported = true;
                    }
                }
            }
            for (const auto& [z, sum] : sums) {
                if (reported) break;
                if (!(sum == ref)) {
                    report.violations.push_back(
                        {Violation::Axiom::U3, k, l, ref_site, z, ref, sum});
                    reported = true;
                }
            }
        }
    }
    return report;
}

// --- compiled sampling ------------------------------------------------------

struct KernelSampler::CompiledRow {
    static constexpr int kMax = 5; // mixture origin: self-loop + 4 neighbors
    Site targets[kMax];
    std::uint64_t thresholds[kMax]; // cumulative, 64-bit fixed point
    int n = 0;

    Site pick(std::uint64_t u) const {
        for (int i = 0; i + 1 < n; ++i)
            if (u < thresholds[i]) return targets[i];
        return targets[n - 1];
    }
};

KernelSampler::KernelSampler(KernelSpec spec, std::int32_t initial_radius)
    : spec_(std::move(spec)), radius_(std::max(initial_radius, 4)) {
    const std::int64_t side = 2 * static_cast<std::int64_t>(radius_) + 1;
    rows_.resize(static_cast<std::size_t>(side * side));
}

KernelSampler::~KernelSampler() = default;
KernelSampler::KernelSampler(KernelSampler&&) noexcept = default;
KernelSampler& KernelSampler::operator=(KernelSampler&&) noexcept = default;

namespace {

KernelSampler::CompiledRow* compile_row_impl(const KernelSpec& spec, Site s) {
    const TransitionRow row = transitions(spec, s);
    auto out = new KernelSampler::CompiledRow();
    out->n = static_cast<int>(row.size());
    Rational cum{0, 1};
    for (int i = 0; i < out->n; ++i) {
        out->targets[i] = row[static_cast<std::size_t>(i)].target;
        cum = cum + row[static_cast<std::size_t>(i)].prob;
        const unsigned __int128 scaled =
            (static_cast<unsigned __int128>(cum.num()) << 64) /
            static_cast<unsigned __int128>(cum.den());
        out->thresholds[i] = cum == Rational(1)
                                 ? ~0ull
                                 : static_cast<std::uint64_t>(scaled);
    }
    return out;
}

} // namespace

KernelSampler::CompiledRow& KernelSampler::row(Site s) {
    while (std::max(std::abs(s.x), std::abs(s.y)) > radius_)
        regrow(radius_ * 2);
    const std::int64_t side = 2 * static_cast<std::int64_t>(radius_) + 1;
    auto& slot = rows_[static_cast<std::size_t>((s.x + radius_) * side +
                                                (s.y + radius_))];
    if (!slot) slot.reset(compile_row_impl(spec_, s));
    return *slot;
}

void KernelSampler::regrow(std::int32_t new_radius) {
    const std::int64_t old_side = 2 * static_cast<std::int64_t>(radius_) + 1;
    const std::int64_t side = 2 * static_cast<std::int64_t>(new_radius) + 1;
    std::vector<std::unique_ptr<CompiledRow>> next(
        static_cast<std::size_t>(side * side));
    for (std::int64_t x = -radius_; x <= radius_; ++x)
        for (std::int64_t y = -radius_; y <= radius_; ++y) {
            auto& old = rows_[static_cast<std::size_t>((x + radius_) * old_side +
                                                       (y + radius_))];
            if (old)
                next[static_cast<std::size_t>((x + new_radius) * side +
                                              (y + new_radius))] = std::move(old);
        }
    rows_ = std::move(next);
    radius_ = new_radius;
}

Site KernelSampler::sample(Site s, std::uint64_t u) {
    return row(s).pick(u);
}

Site sample_step(const KernelSpec& spec, Site s, RandomStream& rng) {
    std::unique_ptr<KernelSampler::CompiledRow> row(compile_row_impl(spec, s));
    return row->pick(rng.next());
}

} // namespace idla
