#pragma once

#include <cstdint>
#include <optional>

#include "idla/errors.hpp"
#include "idla/kernels.hpp"
#include "idla/lattice.hpp"

namespace idla {

inline constexpr std::uint64_t kDefaultStepCap = 1'000'000'000ull;

/// Stopping rule for a single walk. Any combination of triggers may be set;
/// the rule fires at the first step where any trigger holds (FirstOf is the
/// union of set triggers). ExitSet fires at time 0 if the start is already
/// outside the set.
struct StopRule {
    const SiteSet* exit_set = nullptr; // fires when the walker leaves the set
    std::optional<std::int64_t> hit_layer;
    std::optional<Site> hit_site;
    std::uint64_t step_cap = kDefaultStepCap;

    static StopRule exit_of(const SiteSet& set) {
        StopRule r;
        r.exit_set = &set;
        return r;
    }
    static StopRule layer(std::int64_t k) {
        StopRule r;
        r.hit_layer = k;
        return r;
    }
    static StopRule site(Site z) {
        StopRule r;
        r.hit_site = z;
        return r;
    }
    /// Union of the triggers of both rules; step_cap is the minimum.
    static StopRule first_of(const StopRule& a, const StopRule& b);
};

enum class StopCause { ExitSet, HitSite, HitLayer };

struct WalkOutcome {
    Site stop_site{};
    std::uint64_t steps = 0;
    StopCause rule_fired = StopCause::ExitSet;
};

/// Simulates X(0)=start, X(t+1) ~ transitions(spec, X(t)) until the rule
/// fires; returns the first firing. Trigger priority at a simultaneous
/// firing: ExitSet, HitSite, HitLayer.
/// Throws StepCapExceeded past rule.step_cap steps.
WalkOutcome walk_until(const KernelSpec& spec, Site start, const StopRule& rule,
                       RandomStream& rng);

/// Same, reusing a compiled sampler across calls.
WalkOutcome walk_until(KernelSampler& sampler, Site start, const StopRule& rule,
                       RandomStream& rng);

/// Gambler's ruin: probability that the layer chain started on layer l hits
/// the origin before layer n. (r^n - r^l)/(r^n - 1) with r = p/(1-p) for
/// p != 1/2, and (n-l)/n at p = 1/2. Evaluated in overflow-free form.
double hit_origin_before_layer_prob(const Rational& p, std::int64_t l, std::int64_t n);

/// Upper bound (4k-1) r^{k-n} on Pr_o(tau_z >= tau_n) for z in L_k, valid
/// for p > 1/2.
double avoidance_bound(const Rational& p, std::int64_t k, std::int64_t n);

/// Fast path for a walker sitting at the origin with the diamond D_a fully
/// occupied: nothing can happen strictly inside D_a, and the first visit to
/// layer a+1 lands uniformly on L_{a+1}, so the escape site is drawn
/// directly instead of simulating the excursions.
Site escape_occupied_diamond(const KernelSpec& spec, std::int64_t a, RandomStream& rng);

} // namespace idla
