#include "idla/walk.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace idla {

StopRule StopRule::first_of(const StopRule& a, const StopRule& b) {
    StopRule r;
    r.exit_set = a.exit_set ? a.exit_set : b.exit_set;
    r.hit_layer = a.hit_layer ? a.hit_layer : b.hit_layer;
    r.hit_site = a.hit_site ? a.hit_site : b.hit_site;
    r.step_cap = std::min(a.step_cap, b.step_cap);
    return r;
}

namespace {

bool fired(const StopRule& rule, Site pos, StopCause& cause) {
    if (rule.exit_set && !rule.exit_set->contains(pos)) {
        cause = StopCause::ExitSet;
        return true;
    }
    if (rule.hit_site && pos == *rule.hit_site) {
        cause = StopCause::HitSite;
        return true;
    }
    if (rule.hit_layer && norm1(pos) == *rule.hit_layer) {
        cause = StopCause::HitLayer;
        return true;
    }
    return false;
}

} // namespace

WalkOutcome walk_until(KernelSampler& sampler, Site start, const StopRule& rule,
                       RandomStream& rng) {
    if (rule.step_cap == 0)
        throw std::invalid_argument("walk_until: step_cap must be positive");
    Site pos = start;
    StopCause cause;
    std::uint64_t steps = 0;
    while (!fired(rule, pos, cause)) {
        if (steps >= rule.step_cap)
            throw StepCapExceeded("walk_until: step cap " +
                                  std::to_string(rule.step_cap) + " exceeded");
        pos = sampler.step(pos, rng);
        ++steps;
    }
    return {pos, steps, cause};
}

WalkOutcome walk_until(const KernelSpec& spec, Site start, const StopRule& rule,
                       RandomStream& rng) {
    KernelSampler sampler(spec, 16);
    return walk_until(sampler, start, rule, rng);
}

double hit_origin_before_layer_prob(const Rational& p, std::int64_t l, std::int64_t n) {
    if (!(l > 0 && l < n))
        throw std::invalid_argument("hit_origin_before_layer_prob: need 0 < l < n");
    if (p.num() == 0) return 0.0; // outward-directed walk never decreases the norm
    if (p == Rational(1, 2))
        return static_cast<double>(n - l) / static_cast<double>(n);
    const double log_r = std::log(p.to_double()) - std::log(1.0 - p.to_double());
    if (log_r > 0) {
        // r > 1: (r^n - r^l)/(r^n - 1) = (1 - r^{l-n})/(1 - r^{-n}),
        // all exponents negative so nothing overflows.
        return (1.0 - std::exp(static_cast<double>(l - n) * log_r)) /
               (1.0 - std::exp(static_cast<double>(-n) * log_r));
    }
    // r < 1: (r^l - r^n)/(1 - r^n).
    const double rl = std::exp(static_cast<double>(l) * log_r);
    const double rn = std::exp(static_cast<double>(n) * log_r);
    return (rl - rn) / (1.0 - rn);
}

double avoidance_bound(const Rational& p, std::int64_t k, std::int64_t n) {
    if (!(k > 0 && k < n))
        throw std::invalid_argument("avoidance_bound: need 0 < k < n");
    if (!(Rational(1, 2) < p))
        throw std::invalid_argument("avoidance_bound: requires p > 1/2");
    const double log_r = std::log(p.to_double()) - std::log(1.0 - p.to_double());
    return static_cast<double>(4 * k - 1) *
           std::exp(static_cast<double>(k - n) * log_r);
}

Site escape_occupied_diamond(const KernelSpec& spec, std::int64_t a, RandomStream& rng) {
    if (!spec.layered())
        throw std::invalid_argument("escape_occupied_diamond: layered kernels only");
    if (a < 0) throw std::invalid_argument("escape_occupied_diamond: a >= 0");
    return uniform_layer_site(a + 1, rng);
}

} // namespace idla
