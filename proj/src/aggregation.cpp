#include "idla/aggregation.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <new>
#include <set>
#include <stdexcept>

namespace idla {

// --- Cluster ----------------------------------------------------------------

Cluster::Cluster(std::int32_t bounding_radius) : radius_(bounding_radius) {
    if (bounding_radius < 0 || bounding_radius > (1 << 30))
        throw std::invalid_argument("Cluster: bounding radius out of range");
    const std::int64_t side = 2 * static_cast<std::int64_t>(radius_) + 1;
    bits_.assign(static_cast<std::size_t>(side * side), 0);
    layer_counts_.assign(static_cast<std::size_t>(radius_) + 1, 0);
}

void Cluster::add(Site s) {
    const std::int64_t k = norm1(s);
    if (k > radius_) regrow(static_cast<std::int32_t>(std::max<std::int64_t>(k, 2 * radius_)));
    auto& bit = bits_[idx(s)];
    if (bit) throw InvariantViolation("Cluster::add: site already occupied");
    bit = 1;
    ++layer_counts_[static_cast<std::size_t>(k)];
    max_norm_ = std::max(max_norm_, static_cast<std::int32_t>(k));
    while (inner_full_ < radius_ &&
           layer_counts_[static_cast<std::size_t>(inner_full_) + 1] ==
               layer_size(inner_full_ + 1))
        ++inner_full_;
    order_.push_back(s);
}

void Cluster::regrow(std::int32_t new_radius) {
    if (new_radius > (1 << 30))
        throw BoundingRadiusExceeded("Cluster: radius beyond 2^30");
    try {
        const std::int64_t side = 2 * static_cast<std::int64_t>(new_radius) + 1;
        std::vector<std::uint8_t> next(static_cast<std::size_t>(side * side), 0);
        for (const Site s : order_)
            next[static_cast<std::size_t>((s.x + new_radius) * side +
                                          (s.y + new_radius))] = 1;
        bits_ = std::move(next);
        radius_ = new_radius;
        layer_counts_.resize(static_cast<std::size_t>(new_radius) + 1, 0);
    } catch (const std::bad_alloc&) {
        throw BoundingRadiusExceeded("Cluster: bitmap growth failed (out of memory)");
    }
}

void Cluster::check_invariants() const {
    std::vector<std::uint32_t> counts(layer_counts_.size(), 0);
    std::int32_t maxn = -1;
    std::size_t occupied = 0;
    for (std::int32_t x = -radius_; x <= radius_; ++x)
        for (std::int32_t y = -radius_ + std::abs(x); y <= radius_ - std::abs(x); ++y) {
            const Site s{x, y};
            if (bits_[idx(s)]) {
                ++occupied;
                const auto k = norm1(s);
                ++counts[static_cast<std::size_t>(k)];
                maxn = std::max(maxn, static_cast<std::int32_t>(k));
            }
        }
    if (occupied != order_.size())
        throw InvariantViolation("Cluster: occupied count != order log length");
    if (counts != layer_counts_)
        throw InvariantViolation("Cluster: layer counts out of sync");
    if (maxn != max_norm_)
        throw InvariantViolation("Cluster: max norm out of sync");
    std::int32_t full = -1;
    while (full < radius_ &&
           counts[static_cast<std::size_t>(full) + 1] == layer_size(full + 1))
        ++full;
    if (full != inner_full_)
        throw InvariantViolation("Cluster: inner full radius out of sync");
}

// --- sequential growth ------------------------------------------------------

namespace {

struct ParticleStop {
    Site site;
    bool frozen; // stopped by first-hitting the freeze layer
};

// Walks one particle over the current cluster. Freeze (first hit of
// freeze_layer) takes precedence over cluster exit at the same instant.
// The shortcut replaces the excursions of a walker sitting at the origin by a
// direct uniform draw on the first layer not fully occupied (capped at the
// freeze layer so a first hit of L_n is never skipped).
ParticleStop run_particle(KernelSampler& sampler, const Cluster& cluster, Site start,
                          bool shortcut, std::optional<std::int32_t> freeze_layer,
                          std::uint64_t step_cap, RandomStream& rng) {
    Site pos = start;
    std::uint64_t steps = 0;
    for (;;) {
        if (freeze_layer && norm1(pos) == *freeze_layer) return {pos, true};
        if (!cluster.contains(pos)) return {pos, false};
        if (shortcut && pos == kOrigin) {
            std::int64_t target = cluster.inner_full_radius() + 1;
            if (freeze_layer) target = std::min<std::int64_t>(target, *freeze_layer);
            pos = uniform_layer_site(target, rng);
            continue;
        }
        if (steps >= step_cap)
            throw StepCapExceeded("grow: per-walk step cap exceeded");
        pos = sampler.step(pos, rng);
        ++steps;
    }
}

bool shortcut_enabled(const KernelSpec& spec, Shortcut policy) {
    switch (policy) {
        case Shortcut::Off: return false;
        case Shortcut::On:
            if (!spec.layered())
                throw std::invalid_argument("shortcut=on requires a layered kernel");
            return true;
        case Shortcut::Auto: return spec.inward_biased();
    }
    return false;
}

std::int32_t initial_bounding_radius(std::int64_t total, std::int64_t max_start_norm) {
    // Outer envelope of the shape theorem plus margin, one allocation in the
    // common case.
    const double n = std::sqrt(static_cast<double>(total) / 2.0) + 1.0;
    const double margin = 20.0 * std::sqrt(n * std::log(std::max(n, 3.0)));
    return static_cast<std::int32_t>(max_start_norm + n + margin) + 8;
}

} // namespace

Cluster grow(const KernelSpec& spec, const ParticleConfig& starts,
             std::uint64_t seed, const GrowOptions& opts) {
    std::int64_t total = 0;
    std::int64_t max_start_norm = 0;
    for (const auto& [s, c] : starts) {
        total += static_cast<std::int64_t>(c);
        if (c > 0) max_start_norm = std::max(max_start_norm, norm1(s));
    }
    if (total < 1) throw std::invalid_argument("grow: need at least one particle");

    const bool shortcut = shortcut_enabled(spec, opts.shortcut);
    Cluster cluster(initial_bounding_radius(total, max_start_norm));
    KernelSampler sampler(spec, 64);

    std::uint64_t particle = 0;
    for (const auto& [start, count] : starts) {
        for (std::uint64_t c = 0; c < count; ++c, ++particle) {
            if (particle == 0 || !cluster.contains(start)) {
                cluster.add(start); // settles immediately (sigma = 0)
            } else {
                RandomStream rng(derive_stream(seed, particle));
                const auto stop = run_particle(sampler, cluster, start, shortcut,
                                               std::nullopt, opts.step_cap, rng);
                cluster.add(stop.site);
            }
            if (opts.debug_check_interval &&
                (particle + 1) % opts.debug_check_interval == 0)
                cluster.check_invariants();
        }
    }
    return cluster;
}

StoppedResult grow_stopped(const KernelSpec& spec, std::int32_t n,
                           std::uint64_t seed, const GrowOptions& opts) {
    if (n < 1) throw std::invalid_argument("grow_stopped: n >= 1");
    const bool shortcut = shortcut_enabled(spec, opts.shortcut);
    StoppedResult result{Cluster(n), {}};
    Cluster& cluster = result.cluster;
    KernelSampler sampler(spec, std::min(n + 1, 256));

    cluster.add(kOrigin);
    const std::int64_t walkers = diamond_volume(n) - 1;
    for (std::int64_t i = 1; i <= walkers; ++i) {
        RandomStream rng(derive_stream(seed, static_cast<std::uint64_t>(i)));
        const auto stop = run_particle(sampler, cluster, kOrigin, shortcut, n,
                                       opts.step_cap, rng);
        if (stop.frozen) ++result.frozen_counts[stop.site];
        if (!cluster.contains(stop.site)) cluster.add(stop.site);
        if (opts.debug_check_interval && i % static_cast<std::int64_t>(
                                                 opts.debug_check_interval) == 0)
            cluster.check_invariants();
    }
    return result;
}

Cluster grow_extended(const KernelSpec& spec, std::int32_t n, std::uint64_t m,
                      std::uint64_t seed, const GrowOptions& opts) {
    if (n < 1) throw std::invalid_argument("grow_extended: n >= 1");
    const bool shortcut = shortcut_enabled(spec, opts.shortcut);
    Cluster cluster(initial_bounding_radius(diamond_volume(n) +
                                                static_cast<std::int64_t>(m),
                                            0));
    for (std::int64_t k = 0; k <= n; ++k)
        for (std::int64_t i = 0; i < layer_size(k); ++i)
            cluster.add(site_on_layer(k, i));

    KernelSampler sampler(spec, 64);
    for (std::uint64_t i = 0; i < m; ++i) {
        RandomStream rng(derive_stream(seed, i));
        const auto stop = run_particle(sampler, cluster, kOrigin, shortcut,
                                       std::nullopt, opts.step_cap, rng);
        cluster.add(stop.site);
    }
    return cluster;
}

// --- card stacks and the abelian engine -------------------------------------

CardStacks::CardStacks(std::uint64_t seed, KernelSpec spec)
    : seed_(seed), spec_(std::move(spec)), sampler_(spec_, 16) {}

void CardStacks::set_override(Site x, std::vector<Site> labels) {
    overrides_[x] = std::move(labels);
}

Site CardStacks::card(Site x, std::uint64_t t) const {
    if (!overrides_.empty()) {
        auto it = overrides_.find(x);
        if (it != overrides_.end() && t < it->second.size())
            return it->second[static_cast<std::size_t>(t)];
    }
    const std::uint64_t key =
        (static_cast<std::uint64_t>(static_cast<std::uint32_t>(x.x)) << 32) |
        static_cast<std::uint32_t>(x.y);
    const std::uint64_t u = mix64(mix64(seed_ ^ mix64(key)) ^ t);
    return sampler_.sample(x, u);
}

namespace {

// Exact membership structures per scheduler; a site is present iff it
// currently holds >= 2 particles.
class UnstableSet {
public:
    UnstableSet(Scheduler scheduler, std::uint64_t seed)
        : scheduler_(scheduler), rng_(derive_stream(seed, 0x7ab1eull)) {}

    void insert(Site s) {
        switch (scheduler_) {
            case Scheduler::Fifo:
            case Scheduler::Lifo:
                if (member_.insert(s).second) queue_.push_back(s);
                break;
            case Scheduler::Lexicographic:
                ordered_.insert(s);
                break;
            case Scheduler::Random:
                if (!pos_.count(s)) {
                    pos_[s] = pool_.size();
                    pool_.push_back(s);
                }
                break;
        }
    }

    void erase(Site s) {
        switch (scheduler_) {
            case Scheduler::Fifo:
            case Scheduler::Lifo:
                member_.erase(s); // queue entries are skipped lazily
                break;
            case Scheduler::Lexicographic:
                ordered_.erase(s);
                break;
            case Scheduler::Random: {
                auto it = pos_.find(s);
                if (it == pos_.end()) break;
                const std::size_t i = it->second;
                pool_[i] = pool_.back();
                pos_[pool_[i]] = i;
                pool_.pop_back();
                pos_.erase(it);
                break;
            }
        }
    }

    bool pick(Site& out) {
        switch (scheduler_) {
            case Scheduler::Fifo:
                while (!queue_.empty()) {
                    const Site s = queue_.front();
                    queue_.pop_front();
                    if (member_.count(s)) {
                        queue_.push_back(s); // rotate; stays selectable
                        out = s;
                        return true;
                    }
                }
                return false;
            case Scheduler::Lifo:
                while (!queue_.empty()) {
                    const Site s = queue_.back();
                    if (member_.count(s)) {
                        out = s;
                        return true;
                    }
                    queue_.pop_back();
                }
                return false;
            case Scheduler::Lexicographic:
                if (ordered_.empty()) return false;
                out = *ordered_.begin();
                return true;
            case Scheduler::Random:
                if (pool_.empty()) return false;
                out = pool_[static_cast<std::size_t>(rng_.below(pool_.size()))];
                return true;
        }
        return false;
    }

private:
    Scheduler scheduler_;
    std::deque<Site> queue_;
    std::set<Site> member_;
    std::set<Site> ordered_;
    std::vector<Site> pool_;
    std::map<Site, std::size_t> pos_;
    RandomStream rng_;
};

} // namespace

AbelianResult abelian_run(const ParticleConfig& initial, StackDealer& dealer,
                          const AbelianOptions& opts) {
    std::map<Site, std::uint64_t> counts;
    for (const auto& [s, c] : initial)
        if (c > 0) counts[s] = c;

    UnstableSet unstable(opts.scheduler, opts.random_seed);
    for (const auto& [s, c] : counts)
        if (c >= 2) unstable.insert(s);

    AbelianResult result;
    std::uint64_t moves = 0;
    Site x;
    while (unstable.pick(x)) {
        if (++moves > opts.move_budget)
            throw MoveBudgetExceeded("abelian_run: move budget exceeded");
        const Site y = dealer.draw(x);
        ++result.odometer[x];
        if (y != x) { // an origin self-loop card burns without moving mass
            auto& cx = counts[x];
            --cx;
            if (cx < 2) unstable.erase(x);
            auto& cy = counts[y];
            ++cy;
            if (cy >= 2) unstable.insert(y);
        }
    }

    for (const auto& [s, c] : counts)
        if (c > 0) result.final_config[s] = c;
    return result;
}

AbelianResult abelian_run(const ParticleConfig& initial, const CardStacks& stacks,
                          const AbelianOptions& opts) {
    StackDealer dealer(stacks);
    return abelian_run(initial, dealer, opts);
}

CoupleResult monotone_couple(const ParticleConfig& xs, const ParticleConfig& ys,
                             const CardStacks& stacks, const AbelianOptions& opts) {
    for (const auto& [s, c] : xs) {
        auto it = ys.find(s);
        const std::uint64_t yc = it == ys.end() ? 0 : it->second;
        if (c > yc)
            throw std::invalid_argument("monotone_couple: xs must be <= ys pointwise");
    }
    const auto small = abelian_run(xs, stacks, opts);
    const auto big = abelian_run(ys, stacks, opts);

    CoupleResult out;
    for (const auto& [s, c] : small.final_config) out.small_set.push_back(s);
    for (const auto& [s, c] : big.final_config) out.big_set.push_back(s);
    out.contained = std::includes(out.big_set.begin(), out.big_set.end(),
                                  out.small_set.begin(), out.small_set.end());
    return out;
}

CoupledStopped grow_stopped_coupled(std::int32_t n, const CardStacks& stacks) {
    if (n < 1) throw std::invalid_argument("grow_stopped_coupled: n >= 1");
    StackDealer dealer(stacks);
    CoupledStopped out{{Cluster(n), {}}, {}};
    Cluster& cluster = out.stopped.cluster;

    cluster.add(kOrigin);
    const std::int64_t walkers = diamond_volume(n) - 1;
    for (std::int64_t i = 1; i <= walkers; ++i) {
        Site pos = kOrigin;
        std::uint64_t steps = 0;
        for (;;) {
            if (norm1(pos) == n) {
                ++out.stopped.frozen_counts[pos];
                break;
            }
            if (!cluster.contains(pos)) break;
            if (steps++ >= kDefaultStepCap)
                throw StepCapExceeded("grow_stopped_coupled: step cap exceeded");
            pos = dealer.draw(pos);
        }
        if (!cluster.contains(pos)) cluster.add(pos);
    }

    // Complete to A(v_n): each occupied site holds one particle, plus the
    // extra frozen ones at layer n; stabilize with the same dealer.
    ParticleConfig config;
    for (const Site s : cluster.order_log()) config[s] = 1;
    for (const auto& [z, count] : out.stopped.frozen_counts) config[z] = count;
    const auto completed = abelian_run(config, dealer, {});
    for (const auto& [s, c] : completed.final_config) out.full_set.push_back(s);
    return out;
}

} // namespace idla
