// Command-line driver for layered-walk internal DLA simulations.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <mutex>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "idla/aggregation.hpp"
#include "idla/analytics.hpp"
#include "idla/snapshot.hpp"

using namespace idla;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

KernelFamily parse_family(const std::string& name) {
    if (name == "outward") return KernelFamily::OutwardLayered;
    if (name == "inward") return KernelFamily::InwardLayered;
    if (name == "mixture") return KernelFamily::Mixture;
    if (name == "reflected") return KernelFamily::ReflectedAxes;
    if (name == "srw") return KernelFamily::SimpleRandomWalk;
    throw ConfigError("unknown kernel '" + name +
                      "' (expected outward|inward|mixture|reflected|srw)");
}

Rational parse_p(const std::string& text) {
    Rational p;
    try {
        p = Rational::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("bad --p value: ") + e.what());
    }
    if (p < Rational(0) || !(p < Rational(1)))
        throw ConfigError("p must lie in [0,1)");
    return p;
}

Shortcut parse_shortcut(const std::string& text) {
    if (text == "auto") return Shortcut::Auto;
    if (text == "on") return Shortcut::On;
    if (text == "off") return Shortcut::Off;
    throw ConfigError("--shortcut must be auto|on|off");
}

// "x,y" or "x,y:count" particle start entries.
ParticleConfig parse_starts(const std::vector<std::string>& entries) {
    ParticleConfig starts;
    for (const auto& entry : entries) {
        Site s{};
        std::uint64_t count = 1;
        char colon = 0;
        std::istringstream is(entry);
        char comma = 0;
        if (!(is >> s.x >> comma >> s.y) || comma != ',')
            throw ConfigError("bad --start entry '" + entry + "' (want x,y[:count])");
        if (is >> colon) {
            if (colon != ':' || !(is >> count) || count == 0)
                throw ConfigError("bad --start entry '" + entry + "'");
        }
        starts[s] += count;
    }
    return starts;
}

unsigned worker_count() {
    if (const char* env = std::getenv("IDLA_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

// Runs fn(replica) across workers; results are collected by replica index so
// output order never depends on completion order.
std::vector<std::string> run_replicas(std::int64_t replicas,
                                      const std::function<std::string(std::int64_t)>& fn) {
    std::vector<std::string> rows(static_cast<std::size_t>(replicas));
    const unsigned workers =
        std::min<unsigned>(worker_count(), static_cast<unsigned>(replicas));
    if (workers <= 1) {
        for (std::int64_t r = 0; r < replicas; ++r)
            rows[static_cast<std::size_t>(r)] = fn(r);
        return rows;
    }
    std::atomic<std::int64_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                const std::int64_t r = next.fetch_add(1);
                if (r >= replicas) return;
                try {
                    rows[static_cast<std::size_t>(r)] = fn(r);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    return;
                }
            }
        });
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return rows;
}

std::string replica_path(const std::string& base, std::int64_t replica,
                         std::int64_t replicas) {
    if (replicas == 1) return base;
    return base + "." + std::to_string(replica);
}

void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot open output file '" + path + "'");
    os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!os) throw std::runtime_error("write failed for '" + path + "'");
}

std::string format_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

// Largest n with v_n <= total; the reference radius for free-particle runs.
std::int32_t reference_radius(std::uint64_t total) {
    std::int32_t n = 0;
    while (diamond_volume(n + 1) <= static_cast<std::int64_t>(total)) ++n;
    return n;
}

// --- grow -------------------------------------------------------------------

struct GrowArgs {
    std::string kernel;
    std::string p = "0";
    std::int32_t n = -1;
    std::uint64_t particles = 0;
    std::vector<std::string> starts;
    std::uint64_t seed = 0;
    std::int64_t replicas = 1;
    std::string shortcut = "auto";
    std::string out;
    std::string image;
    std::uint64_t step_cap = kDefaultStepCap;
};

int cmd_grow(const GrowArgs& args) {
    const KernelSpec spec{parse_family(args.kernel), parse_p(args.p)};
    if ((args.n >= 0) == (args.particles > 0))
        throw ConfigError("grow: give exactly one of --n and --particles");
    if (args.replicas < 1) throw ConfigError("--replicas must be >= 1");

    const std::uint64_t total =
        args.n >= 0 ? static_cast<std::uint64_t>(diamond_volume(args.n))
                    : args.particles;
    ParticleConfig starts = args.starts.empty() ? ParticleConfig{{kOrigin, total}}
                                                : parse_starts(args.starts);
    if (!args.starts.empty()) {
        std::uint64_t listed = 0;
        for (const auto& [s, c] : starts) listed += c;
        if (listed != total)
            throw ConfigError("--start multiset must account for every particle");
    }

    GrowOptions opts;
    opts.shortcut = parse_shortcut(args.shortcut);
    opts.step_cap = args.step_cap;
    const std::int32_t n_ref = args.n >= 0 ? args.n : reference_radius(total);

    const auto rows = run_replicas(args.replicas, [&](std::int64_t r) {
        const std::uint64_t run_seed = r == 0 ? args.seed : derive_stream(args.seed, r);
        const auto cluster = grow(spec, starts, run_seed, opts);

        SnapshotHeader header;
        header.kernel = spec.name();
        header.p = spec.p.str();
        header.seed = run_seed;
        header.particles = total;
        header.start_digest = digest_starts(starts);
        header.bounding_radius = cluster.bounding_radius();
        if (!args.out.empty()) {
            std::ostringstream os;
            write_snapshot(cluster, header, os);
            write_file(replica_path(args.out, r, args.replicas), os.str());
        }
        if (!args.image.empty()) {
            const auto img = render_pgm(cluster, RenderStyle::SettlementOrder);
            write_file(replica_path(args.image, r, args.replicas),
                       std::string(img.begin(), img.end()));
        }

        const auto fluct = fluctuation_metrics(cluster, n_ref);
        std::ostringstream row;
        row << r << "," << spec.name() << "," << spec.p.str() << "," << n_ref << ","
            << run_seed << "," << cluster.size() << "," << fluct.delta_in << ","
            << fluct.delta_out << "," << cluster.max_norm() << "\n";
        return row.str();
    });

    std::cout << "replica,kernel,p,n,seed,sites,delta_in,delta_out,max_norm\n";
    for (const auto& row : rows) std::cout << row;
    return 0;
}

// --- validate ---------------------------------------------------------------

int cmd_validate(const std::string& kernel, const std::string& p, std::int64_t kmax) {
    const KernelSpec spec{parse_family(kernel), parse_p(p)};
    if (kmax < 1 || kmax > 1000) throw ConfigError("--kmax must lie in [1,1000]");
    const auto report = validate_uniform_layering(spec, kmax);
    std::cout << report.text();
    if (report.ok())
        std::cout << "uniform layering holds for " << spec.name() << " p="
                  << spec.p.str() << " up to k=" << kmax << "\n";
    return report.ok() ? 0 : kExitRuntime;
}

// --- fluct ------------------------------------------------------------------

struct FluctArgs {
    std::string kernel;
    std::string p = "0";
    std::vector<std::int32_t> ns;
    std::uint64_t seed = 0;
    std::int64_t seeds = 1;
    std::string shortcut = "auto";
    std::string out;
};

int cmd_fluct(const FluctArgs& args) {
    const KernelSpec spec{parse_family(args.kernel), parse_p(args.p)};
    if (args.ns.empty()) throw ConfigError("fluct: give at least one --n");
    if (args.seeds < 1) throw ConfigError("--seeds must be >= 1");
    for (const auto n : args.ns)
        if (n < 2) throw ConfigError("fluct: every --n must be >= 2");

    GrowOptions opts;
    opts.shortcut = parse_shortcut(args.shortcut);

    std::vector<std::pair<std::int32_t, std::int64_t>> jobs;
    for (const auto n : args.ns)
        for (std::int64_t s = 0; s < args.seeds; ++s) jobs.emplace_back(n, s);

    const auto rows =
        run_replicas(static_cast<std::int64_t>(jobs.size()), [&](std::int64_t j) {
            const auto [n, s] = jobs[static_cast<std::size_t>(j)];
            const std::uint64_t run_seed =
                s == 0 ? args.seed : derive_stream(args.seed, static_cast<std::uint64_t>(s));
            const ParticleConfig starts{
                {kOrigin, static_cast<std::uint64_t>(diamond_volume(n))}};
            const auto cluster = grow(spec, starts, run_seed, opts);
            const auto fluct = fluctuation_metrics(cluster, n);
            const auto env = theorem_envelopes(n, spec.p);
            const bool within =
                n - fluct.delta_in >= static_cast<std::int32_t>(std::ceil(env.inner_radius)) &&
                n + fluct.delta_out <= static_cast<std::int32_t>(std::floor(env.outer_radius));
            std::ostringstream row;
            row << spec.name() << "," << spec.p.str() << "," << n << "," << run_seed
                << "," << fluct.delta_in << "," << fluct.delta_out << ","
                << format_double(env.inner_radius) << ","
                << format_double(env.outer_radius) << "," << (within ? 1 : 0) << "\n";
            return row.str();
        });

    std::ostringstream table;
    table << "kernel,p,n,seed,delta_in,delta_out,inner_envelope,outer_envelope,"
             "within_envelope\n";
    for (const auto& row : rows) table << row;
    if (args.out.empty())
        std::cout << table.str();
    else
        write_file(args.out, table.str());
    return 0;
}

// --- axis -------------------------------------------------------------------

struct AxisArgs {
    std::int32_t m = 0;
    std::int64_t replicas = 1;
    std::string eps = "0";
    std::uint64_t seed = 0;
    std::string out;
};

int cmd_axis(const AxisArgs& args) {
    if (args.m < 1) throw ConfigError("--m must be >= 1");
    if (args.replicas < 1) throw ConfigError("--replicas must be >= 1");
    double eps = 0;
    try {
        eps = Rational::parse(args.eps).to_double();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("bad --eps value: ") + e.what());
    }
    if (eps < 0 || eps >= 1) throw ConfigError("--eps must lie in [0,1)");

    RandomStream rng(args.seed);
    const auto samples =
        simulate_axis_times(args.m, static_cast<std::int32_t>(args.replicas), rng);

    double sum = 0, sumsq = 0;
    std::ostringstream table;
    table << "replica,t\n";
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double t = static_cast<double>(samples[i].t);
        sum += t;
        sumsq += t * t;
        table << i << "," << samples[i].t << "\n";
    }
    if (args.out.empty())
        std::cout << table.str();
    else
        write_file(args.out, table.str());

    const double count = static_cast<double>(samples.size());
    const double mean = sum / count;
    const double variance =
        count > 1 ? (sumsq - count * mean * mean) / (count - 1) : 0.0;
    std::cerr << "mean=" << format_double(mean)
              << " expected_mean=" << format_double(axis_time_mean(args.m))
              << " variance=" << format_double(variance)
              << " expected_variance=" << format_double(axis_time_variance(args.m))
              << "\n";
    if (args.m >= 16) {
        const auto [lo, hi] = lil_envelope(args.m, eps);
        std::int64_t outside = 0;
        for (const auto& s : samples) {
            const double t = static_cast<double>(s.t);
            if (t < lo || t > hi) ++outside;
        }
        std::cerr << "lil_lower=" << format_double(lo)
                  << " lil_upper=" << format_double(hi)
                  << " outside_fraction=" << format_double(outside / count) << "\n";
    }
    return 0;
}

// --- abelian-check ----------------------------------------------------------

struct AbelianArgs {
    std::string kernel = "mixture";
    std::string p = "1/2";
    std::int64_t trials = 20;
    std::int64_t pairs = 200;
    std::uint64_t seed = 0;
};

int cmd_abelian_check(const AbelianArgs& args) {
    const KernelSpec spec{parse_family(args.kernel), parse_p(args.p)};
    if (args.trials < 1 || args.pairs < 0)
        throw ConfigError("--trials >= 1 and --pairs >= 0 required");

    const Scheduler schedulers[] = {Scheduler::Fifo, Scheduler::Lifo,
                                    Scheduler::Random, Scheduler::Lexicographic};
    bool all_ok = true;
    for (std::int64_t trial = 0; trial < args.trials; ++trial) {
        const std::uint64_t trial_seed =
            derive_stream(args.seed, static_cast<std::uint64_t>(trial));
        CardStacks stacks(trial_seed, spec);
        RandomStream rng(derive_stream(trial_seed, 1));
        ParticleConfig initial;
        const int piles = 1 + static_cast<int>(rng.below(5));
        for (int i = 0; i < piles; ++i)
            initial[uniform_layer_site(rng.below(3), rng)] += 1 + rng.below(12);

        AbelianOptions reference_opts;
        const auto reference = abelian_run(initial, stacks, reference_opts);
        bool agree = true;
        for (const Scheduler sched : schedulers) {
            AbelianOptions opts;
            opts.scheduler = sched;
            opts.random_seed = trial_seed + 1;
            const auto res = abelian_run(initial, stacks, opts);
            agree = agree && res.final_config == reference.final_config &&
                    res.odometer == reference.odometer;
        }
        std::cout << "trial " << trial << ": " << (agree ? "agree" : "DISAGREE")
                  << "\n";
        all_ok = all_ok && agree;
    }

    std::int64_t contained = 0;
    for (std::int64_t pair = 0; pair < args.pairs; ++pair) {
        const std::uint64_t pair_seed =
            derive_stream(args.seed, 1000000 + static_cast<std::uint64_t>(pair));
        CardStacks stacks(pair_seed, spec);
        RandomStream rng(derive_stream(pair_seed, 2));
        ParticleConfig xs, ys;
        for (int i = 0; i < 3; ++i) {
            const Site s = uniform_layer_site(rng.below(3), rng);
            const std::uint64_t small = rng.below(10);
            xs[s] += small;
            ys[s] += small + rng.below(6);
        }
        if (monotone_couple(xs, ys, stacks).contained) ++contained;
    }
    std::cout << "monotone pairs contained: " << contained << "/" << args.pairs
              << "\n";
    all_ok = all_ok && contained == args.pairs;
    return all_ok ? 0 : kExitRuntime;
}

// --- hitprob ----------------------------------------------------------------

struct HitprobArgs {
    std::string p = "1/2";
    std::int64_t l = 0;
    std::int64_t n = 0;
    std::int64_t walks = 50000;
    std::uint64_t seed = 0;
};

int cmd_hitprob(const HitprobArgs& args) {
    const Rational p = parse_p(args.p);
    if (!(0 <= args.l && args.l < args.n))
        throw ConfigError("hitprob: need 0 <= l < n");
    if (args.walks < 1) throw ConfigError("--walks must be >= 1");

    const double closed = hit_origin_before_layer_prob(p, args.l, args.n);
    const KernelSpec spec{KernelFamily::Mixture, p};
    KernelSampler sampler(spec, static_cast<std::int32_t>(args.n) + 1);
    RandomStream rng(args.seed);
    const StopRule rule =
        StopRule::first_of(StopRule::site(kOrigin), StopRule::layer(args.n));
    std::int64_t hits = 0;
    for (std::int64_t i = 0; i < args.walks; ++i) {
        const Site start = uniform_layer_site(args.l, rng);
        if (walk_until(sampler, start, rule, rng).rule_fired == StopCause::HitSite)
            ++hits;
    }
    const double mc = static_cast<double>(hits) / static_cast<double>(args.walks);
    const double sigma =
        std::sqrt(std::max(closed * (1 - closed) / static_cast<double>(args.walks),
                           1e-300));
    std::cout << "closed_form,monte_carlo,abs_diff,sigma_units\n"
              << format_double(closed) << "," << format_double(mc) << ","
              << format_double(std::abs(mc - closed)) << ","
              << format_double(std::abs(mc - closed) / sigma) << "\n";
    return 0;
}

// Expands `--config <path>` (or --config=<path>) in place: each `key=value`
// line of the file becomes a `--key value` pair with flag semantics identical
// to the command line. Later explicit flags still win for single-use options.
std::vector<std::string> expand_config(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    for (std::size_t i = 0; i < args.size(); ++i) {
        std::string path;
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw ConfigError("--config needs a path");
            path = args[i + 1];
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                       args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
        } else {
            continue;
        }
        std::ifstream is(path);
        if (!is) throw ConfigError("cannot open config file '" + path + "'");
        std::vector<std::string> expanded;
        std::string line;
        int lineno = 0;
        while (std::getline(is, line)) {
            ++lineno;
            if (line.empty() || line[0] == '#') continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos || eq == 0)
                throw ConfigError("config file '" + path + "' line " +
                                  std::to_string(lineno) + ": want key=value");
            expanded.push_back("--" + line.substr(0, eq));
            expanded.push_back(line.substr(eq + 1));
        }
        args.insert(args.begin() + static_cast<std::ptrdiff_t>(i),
                    expanded.begin(), expanded.end());
        i += expanded.size();
        --i; // revisit position after splice
    }
    return args;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Internal DLA with uniformly layered random walks"};
    app.require_subcommand(1);

    GrowArgs grow_args;
    auto* grow_cmd = app.add_subcommand("grow", "Grow aggregation clusters");
    grow_cmd->add_option("--kernel", grow_args.kernel, "Kernel family")->required();
    grow_cmd->add_option("--p", grow_args.p, "Mixture parameter in [0,1)");
    grow_cmd->add_option("--n", grow_args.n, "Diamond radius; releases v_n particles");
    grow_cmd->add_option("--particles", grow_args.particles, "Explicit particle count");
    grow_cmd->add_option("--start", grow_args.starts,
                         "Start entry x,y[:count]; repeatable");
    grow_cmd->add_option("--seed", grow_args.seed, "Master seed")->required();
    grow_cmd->add_option("--replicas", grow_args.replicas, "Independent replicas");
    grow_cmd->add_option("--shortcut", grow_args.shortcut, "auto|on|off");
    grow_cmd->add_option("--out", grow_args.out, "Snapshot CSV path");
    grow_cmd->add_option("--image", grow_args.image, "PGM image path");
    grow_cmd->add_option("--step-cap", grow_args.step_cap, "Per-walk step cap");

    std::string validate_kernel, validate_p = "0";
    std::int64_t validate_kmax = 200;
    std::uint64_t validate_seed = 0;
    auto* validate_cmd =
        app.add_subcommand("validate", "Check the uniform layering axioms");
    validate_cmd->add_option("--kernel", validate_kernel, "Kernel family")->required();
    validate_cmd->add_option("--p", validate_p, "Mixture parameter");
    validate_cmd->add_option("--kmax", validate_kmax, "Largest layer checked");
    validate_cmd->add_option("--seed", validate_seed, "Master seed (unused)")
        ->required();

    FluctArgs fluct_args;
    auto* fluct_cmd =
        app.add_subcommand("fluct", "Fluctuation sweep against the envelopes");
    fluct_cmd->add_option("--kernel", fluct_args.kernel, "Kernel family")->required();
    fluct_cmd->add_option("--p", fluct_args.p, "Mixture parameter");
    fluct_cmd->add_option("--n", fluct_args.ns, "Diamond radius; repeatable")
        ->required();
    fluct_cmd->add_option("--seed", fluct_args.seed, "Master seed")->required();
    fluct_cmd->add_option("--seeds", fluct_args.seeds, "Seeds per n");
    fluct_cmd->add_option("--shortcut", fluct_args.shortcut, "auto|on|off");
    fluct_cmd->add_option("--out", fluct_args.out, "CSV path (stdout if absent)");

    AxisArgs axis_args;
    auto* axis_cmd = app.add_subcommand("axis", "Axis occupation time samples");
    axis_cmd->add_option("--m", axis_args.m, "Axis distance")->required();
    axis_cmd->add_option("--replicas", axis_args.replicas, "Sample count");
    axis_cmd->add_option("--eps", axis_args.eps, "Envelope slack in [0,1)");
    axis_cmd->add_option("--seed", axis_args.seed, "Master seed")->required();
    axis_cmd->add_option("--out", axis_args.out, "CSV path (stdout if absent)");

    AbelianArgs abelian_args;
    auto* abelian_cmd = app.add_subcommand(
        "abelian-check", "Scheduler invariance and monotonicity fuzzing");
    abelian_cmd->add_option("--kernel", abelian_args.kernel, "Kernel family");
    abelian_cmd->add_option("--p", abelian_args.p, "Mixture parameter");
    abelian_cmd->add_option("--trials", abelian_args.trials, "Scheduler trials");
    abelian_cmd->add_option("--pairs", abelian_args.pairs, "Monotone pairs");
    abelian_cmd->add_option("--seed", abelian_args.seed, "Master seed")->required();

    HitprobArgs hitprob_args;
    auto* hitprob_cmd =
        app.add_subcommand("hitprob", "Closed-form vs Monte Carlo ruin probability");
    hitprob_cmd->add_option("--p", hitprob_args.p, "Mixture parameter");
    hitprob_cmd->add_option("--l", hitprob_args.l, "Start layer")->required();
    hitprob_cmd->add_option("--n", hitprob_args.n, "Absorbing layer")->required();
    hitprob_cmd->add_option("--walks", hitprob_args.walks, "Monte Carlo walks");
    hitprob_cmd->add_option("--seed", hitprob_args.seed, "Master seed")->required();

    try {
        auto args = expand_config(argc, argv);
        std::reverse(args.begin(), args.end()); // CLI11 consumes back to front
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help and friends
        app.exit(e);
        return kExitConfig;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        if (grow_cmd->parsed()) return cmd_grow(grow_args);
        if (validate_cmd->parsed())
            return cmd_validate(validate_kernel, validate_p, validate_kmax);
        if (fluct_cmd->parsed()) return cmd_fluct(fluct_args);
        if (axis_cmd->parsed()) return cmd_axis(axis_args);
        if (abelian_cmd->parsed()) return cmd_abelian_check(abelian_args);
        if (hitprob_cmd->parsed()) return cmd_hitprob(hitprob_args);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitConfig;
}
