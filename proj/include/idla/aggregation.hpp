#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "idla/errors.hpp"
#include "idla/kernels.hpp"
#include "idla/lattice.hpp"
#include "idla/walk.hpp"

namespace idla {

/// Occupied-site bitmap over a bounded diamond, with per-layer occupancy
/// counts, the inner full radius and the settlement-order log maintained
/// incrementally. The bitmap doubles its radius on demand.
class Cluster final : public SiteSet {
public:
    explicit Cluster(std::int32_t bounding_radius);

    bool contains(Site s) const override {
        if (norm1(s) > radius_) return false;
        return bits_[idx(s)] != 0;
    }

    /// Marks s occupied and appends it to the order log. s must not already
    /// be occupied.
    void add(Site s);

    std::size_t size() const { return order_.size(); }
    std::int32_t bounding_radius() const { return radius_; }
    /// Largest a such that D_a is fully occupied; -1 for the empty cluster.
    std::int32_t inner_full_radius() const { return inner_full_; }
    /// Largest occupied norm; -1 for the empty cluster.
    std::int32_t max_norm() const { return max_norm_; }
    std::uint32_t layer_count(std::int64_t k) const {
        return k >= 0 && k < static_cast<std::int64_t>(layer_counts_.size())
                   ? layer_counts_[k]
                   : 0;
    }
    const std::vector<Site>& order_log() const { return order_; }

    /// Recomputes layer counts, inner full radius and max norm from the
    /// bitmap and compares with the maintained values.
    /// Throws InvariantViolation on mismatch.
    void check_invariants() const;

private:
    std::size_t idx(Site s) const {
        const std::int64_t side = 2 * static_cast<std::int64_t>(radius_) + 1;
        return static_cast<std::size_t>((s.x + radius_) * side + (s.y + radius_));
    }
    void regrow(std::int32_t new_radius);

    std::int32_t radius_;
    std::vector<std::uint8_t> bits_;
    std::vector<std::uint32_t> layer_counts_;
    std::int32_t inner_full_ = -1;
    std::int32_t max_norm_ = -1;
    std::vector<Site> order_;
};

/// Multiset of particle start points.
using ParticleConfig = std::map<Site, std::uint64_t>;

enum class Shortcut { Off, On, Auto };

struct GrowOptions {
    Shortcut shortcut = Shortcut::Auto;
    std::uint64_t step_cap = kDefaultStepCap;
    /// Revalidate incrementally maintained cluster values every this many
    /// particles; 0 disables.
    std::uint64_t debug_check_interval = 0;
};

/// Sequential internal DLA: releases the particles of `starts` one at a time
/// (sorted by start site, then multiplicity index). The first particle
/// defines the initial cluster; each later one walks until first exiting the
/// current cluster and settles there. With shortcut engaged, a walker
/// sitting at the origin with D_{inner_full_radius} fully occupied jumps
/// straight to a uniform site of the next layer.
/// Particle i's walk is driven by the stream derive_stream(seed, i).
Cluster grow(const KernelSpec& spec, const ParticleConfig& starts,
             std::uint64_t seed, const GrowOptions& opts = {});

/// Stopped process S(v_n): origin particles additionally freeze on first
/// hitting layer L_n. frozen_counts[z] is N_z, the number of particles whose
/// stop was a first hit of L_n at z (including stops that were also cluster
/// exits).
struct StoppedResult {
    Cluster cluster;
    std::map<Site, std::uint32_t> frozen_counts;
};

StoppedResult grow_stopped(const KernelSpec& spec, std::int32_t n,
                           std::uint64_t seed, const GrowOptions& opts = {});

/// Extended process E(m): the cluster starts as the fully occupied diamond
/// D_n and m further particles aggregate from the origin.
Cluster grow_extended(const KernelSpec& spec, std::int32_t n, std::uint64_t m,
                      std::uint64_t seed, const GrowOptions& opts = {});

/// Diaconis-Fulton stacks: the t-th card at site x has label distribution
/// transitions(spec, x), fully determined by (seed, x, t) through a
/// counter-based PRF, so replays are exact without storing burned cards.
/// Explicit per-site override sequences take precedence over the PRF.
class CardStacks {
public:
    CardStacks(std::uint64_t seed, KernelSpec spec);

    void set_override(Site x, std::vector<Site> labels);
    Site card(Site x, std::uint64_t t) const;
    const KernelSpec& spec() const { return spec_; }

private:
    std::uint64_t seed_;
    KernelSpec spec_;
    std::map<Site, std::vector<Site>> overrides_;
    mutable KernelSampler sampler_;
};

/// Per-site card cursors over a CardStacks; shared by runs that must consume
/// a common card sequence.
class StackDealer {
public:
    explicit StackDealer(const CardStacks& stacks) : stacks_(&stacks) {}
    Site draw(Site x) { return stacks_->card(x, cursors_[x]++); }
    std::uint64_t burned(Site x) const {
        auto it = cursors_.find(x);
        return it == cursors_.end() ? 0 : it->second;
    }
    const std::map<Site, std::uint64_t>& cursors() const { return cursors_; }

private:
    const CardStacks* stacks_;
    std::map<Site, std::uint64_t> cursors_;
};

enum class Scheduler { Fifo, Lifo, Random, Lexicographic };

struct AbelianOptions {
    Scheduler scheduler = Scheduler::Fifo;
    std::uint64_t random_seed = 0;   // tie-break stream for Scheduler::Random
    std::uint64_t move_budget = 100'000'000ull;
};

struct AbelianResult {
    ParticleConfig final_config;              // all counts <= 1
    std::map<Site, std::uint64_t> odometer;   // cards burned per site this run
};

/// Repeatedly picks a site holding >= 2 particles per the scheduler, burns
/// its top card and moves one particle to the card's label, until stable.
AbelianResult abelian_run(const ParticleConfig& initial, const CardStacks& stacks,
                          const AbelianOptions& opts = {});

/// Continuation form: cards come from `dealer`, whose cursors advance.
AbelianResult abelian_run(const ParticleConfig& initial, StackDealer& dealer,
                          const AbelianOptions& opts = {});

struct CoupleResult {
    std::vector<Site> small_set;
    std::vector<Site> big_set;
    bool contained = false;
};

/// Runs abelian_run on xs and on ys over the same stacks and reports whether
/// the first stable occupied set is contained in the second. Requires
/// xs <= ys pointwise.
CoupleResult monotone_couple(const ParticleConfig& xs, const ParticleConfig& ys,
                             const CardStacks& stacks,
                             const AbelianOptions& opts = {});

/// Stopped process driven by shared stacks, then completed to the full
/// cluster A(v_n) by stabilizing the frozen particles with the same dealer.
struct CoupledStopped {
    StoppedResult stopped;       // S(v_n) and the N_z counts
    std::vector<Site> full_set;  // A(v_n) under the same stacks
};

CoupledStopped grow_stopped_coupled(std::int32_t n, const CardStacks& stacks);

} // namespace idla
