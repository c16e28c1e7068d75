#include "storymap/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "storymap/errors.hpp"

namespace storymap {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Unbiased draw from [0, bound) (Lemire's multiply-and-reject).
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
    unsigned __int128 product = static_cast<unsigned __int128>(rng()) * bound;
    auto low = static_cast<std::uint64_t>(product);
    if (low < bound) {
        const std::uint64_t floor = (0 - bound) % bound;
        while (low < floor) {
            product = static_cast<unsigned __int128>(rng()) * bound;
            low = static_cast<std::uint64_t>(product);
        }
    }
    return static_cast<std::uint64_t>(product >> 64);
}

Direction classify(double pct_le, double pct_ge, double threshold) {
    const bool le = pct_le >= threshold;
    const bool ge = pct_ge >= threshold;
    if (le && ge) return Direction::both;
    if (le) return Direction::at_most;
    if (ge) return Direction::at_least;
    return Direction::none;
}

}  // namespace

std::string to_string(Direction d) {
    switch (d) {
        case Direction::at_most: return "<=";
        case Direction::at_least: return ">=";
        case Direction::both: return "both";
        case Direction::none: break;
    }
    return "none";
}

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) {
    return splitmix64(splitmix64(seed) ^ splitmix64(trial + 0x5851F42D4C957F2Dull));
}

std::vector<std::size_t> trial_permutation(std::uint64_t seed, std::uint64_t trial, std::size_t n) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::mt19937_64 rng(trial_seed(seed, trial));
    for (std::size_t i = n; i > 1; --i) {
        const auto j = static_cast<std::size_t>(bounded(rng, i));
        std::swap(perm[i - 1], perm[j]);
    }
    return perm;
}

RandomizationReport randomize_test(const UnitSeries& series, std::size_t n_trials, std::uint64_t seed,
                                   double threshold_percent, unsigned workers) {
    const auto n = series.size();
    if (n < 3) throw TooFewUnits("randomization needs at least 3 units, got " + std::to_string(n));
    if (n_trials == 0) throw InputError("number of trials must be at least 1");
    workers = std::max(1u, workers);

    const auto real = style_profile(series);

    using Counts = std::array<std::size_t, kAttributeCount>;
    std::vector<Counts> le(workers, Counts{}), ge(workers, Counts{});
    auto run = [&](unsigned w) {
        for (std::size_t t = w; t < n_trials; t += workers) {
            const auto perm = trial_permutation(seed, t, n);
            const auto trial = style_profile(series, perm);
            for (std::size_t a = 0; a < kAttributeCount; ++a) {
                if (real.values[a] <= trial.values[a]) ++le[w][a];
                if (real.values[a] >= trial.values[a]) ++ge[w][a];
            }
        }
    };
    if (workers == 1) {
        run(0);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
    }

    RandomizationReport report;
    report.n_units = n;
    report.n_trials = n_trials;
    report.seed = seed;
    report.threshold_percent = threshold_percent;
    for (std::size_t a = 0; a < kAttributeCount; ++a) {
        auto& c = report.attributes[a];
        c.real = real.values[a];
        for (unsigned w = 0; w < workers; ++w) {
            c.trials_at_least_real += le[w][a];
            c.trials_at_most_real += ge[w][a];
        }
        c.fraction_le = static_cast<double>(c.trials_at_least_real) / static_cast<double>(n_trials);
        c.fraction_ge = static_cast<double>(c.trials_at_most_real) / static_cast<double>(n_trials);
        c.direction = classify(100.0 * c.fraction_le, 100.0 * c.fraction_ge, threshold_percent);
    }
    return report;
}

RandomizationReport randomize_repeated(const UnitSeries& series, std::size_t n_trials, std::uint64_t seed,
                                       std::size_t runs, double threshold_percent, unsigned workers) {
    if (runs == 0) throw InputError("number of repeated runs must be at least 1");
    RandomizationReport first;
    RepeatedRuns rep;
    rep.runs = runs;
    for (std::size_t r = 0; r < runs; ++r) {
        const auto run_seed = r == 0 ? seed : splitmix64(seed ^ splitmix64(r));
        auto report = randomize_test(series, n_trials, run_seed, threshold_percent, workers);
        for (std::size_t a = 0; a < kAttributeCount; ++a) {
            if (100.0 * report.attributes[a].fraction_le >= threshold_percent) rep.le_share[a] += 1.0;
            if (100.0 * report.attributes[a].fraction_ge >= threshold_percent) rep.ge_share[a] += 1.0;
        }
        if (r == 0) first = std::move(report);
    }
    for (std::size_t a = 0; a < kAttributeCount; ++a) {
        rep.le_share[a] /= static_cast<double>(runs);
        rep.ge_share[a] /= static_cast<double>(runs);
    }
    first.repeated = rep;
    return first;
}

std::vector<SignificanceRow> summarize_table(const std::vector<NamedReport>& reports, double threshold_percent) {
    std::vector<SignificanceRow> rows;
    for (const auto& [script, report] : reports) {
        for (std::size_t a = 0; a < kAttributeCount; ++a) {
            const auto& c = report.attributes[a];
            const double le = 100.0 * c.fraction_le;
            const double ge = 100.0 * c.fraction_ge;
            if (le >= threshold_percent)
                rows.push_back({script, a + 1, Direction::at_most, static_cast<int>(std::lround(le))});
            if (ge >= threshold_percent)
                rows.push_back({script, a + 1, Direction::at_least, static_cast<int>(std::lround(ge))});
        }
    }
    return rows;
}

std::string format_significance_table(const std::vector<SignificanceRow>& rows) {
    std::size_t script_w = std::string_view("script").size();
    for (const auto& r : rows) script_w = std::max(script_w, r.script.size());
    std::ostringstream os;
    os << std::left << std::setw(static_cast<int>(script_w)) << "script" << "  attribute  direction  % of cases\n";
    for (const auto& r : rows) {
        os << std::left << std::setw(static_cast<int>(script_w)) << r.script << "  " << std::right << std::setw(9)
           << r.attribute << "  " << std::setw(9) << to_string(r.direction) << "  " << std::setw(9) << r.percent
           << "%\n";
    }
    return os.str();
}

}  // namespace storymap
