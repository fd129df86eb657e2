#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "idla/lattice.hpp"
#include "idla/rational.hpp"
#include "idla/rng.hpp"

namespace idla {

enum class KernelFamily {
    OutwardLayered,   // Q_out: norm grows by 1 every step
    InwardLayered,    // Q_in: norm shrinks by 1; origin absorbing
    Mixture,          // Q_p = p Q_in + (1-p) Q_out
    ReflectedAxes,    // simple random walk with inward steps reflected on the axes
    SimpleRandomWalk, // 1/4 to each neighbor; deliberately not layered
};

/// Walk law selector. `p` is meaningful only for Mixture; Mixture with p=0
/// yields rows identical to OutwardLayered.
struct KernelSpec {
    KernelFamily family = KernelFamily::Mixture;
    Rational p{0, 1};

    Rational q() const { return Rational(1) - p; }
    bool inward_biased() const {
        return family == KernelFamily::Mixture && Rational(1, 2) < p;
    }
    /// Layer-drift ratio r = p/q.
    double drift_ratio() const { return p.to_double() / q().to_double(); }
    bool layered() const { return family != KernelFamily::SimpleRandomWalk; }
    std::string name() const;
};

struct RowEntry {
    Site target;
    Rational prob;
};

/// One exact transition row: strictly positive probabilities summing to 1,
/// entries ordered by target coordinates (x, then y).
using TransitionRow = std::vector<RowEntry>;

/// Exact rational transition row at site s per the kernel's closed forms;
/// quadrants other than the first are obtained by reflection symmetry.
TransitionRow transitions(const KernelSpec& spec, Site s);

struct Violation {
    enum class Axiom { U1, U2, U3 };
    Axiom axiom;
    std::int64_t k = 0;      // source layer
    std::int64_t l = 0;      // target layer (U1/U3)
    Site a{};                // U1/U2: offending source; U3: witness y
    Site b{};                // U3: witness z
    Rational sum_a{0, 1};
    Rational sum_b{0, 1};
    std::string line() const;
};

struct ValidationReport {
    std::int64_t kmax = 0;
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
    std::string text() const; // one line per violation
};

/// Checks (U1)-(U3) in exact rational arithmetic for all layers k <= kmax.
/// Violations are report content, not failures. kmax is capped at 1000.
ValidationReport validate_uniform_layering(const KernelSpec& spec, std::int64_t kmax);

/// Draws the next site from transitions(spec, s) by inverse-CDF over the
/// row's fixed ordering; consumes exactly one 64-bit draw.
Site sample_step(const KernelSpec& spec, Site s, RandomStream& rng);

/// Per-site compiled sampler rows (cumulative 64-bit fixed-point thresholds),
/// cached in a dense grid that grows on demand. Not shareable between threads.
class KernelSampler {
public:
    explicit KernelSampler(KernelSpec spec, std::int32_t initial_radius = 64);
    ~KernelSampler();
    KernelSampler(KernelSampler&&) noexcept;
    KernelSampler& operator=(KernelSampler&&) noexcept;

    const KernelSpec& spec() const { return spec_; }

    Site step(Site s, RandomStream& rng) { return sample(s, rng.next()); }

    /// Inverse-CDF lookup with a caller-supplied 64-bit value (used by the
    /// card-stack engine, where the value is a counter-based PRF output).
    Site sample(Site s, std::uint64_t u);

    struct CompiledRow; // cumulative fixed-point thresholds; defined in the .cpp

private:
    CompiledRow& row(Site s);
    void regrow(std::int32_t new_radius);

    KernelSpec spec_;
    std::int32_t radius_;
    std::vector<std::unique_ptr<CompiledRow>> rows_;
};

} // namespace idla
