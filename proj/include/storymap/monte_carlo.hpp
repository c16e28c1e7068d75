#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "storymap/style_metrics.hpp"

namespace storymap {

inline constexpr std::size_t kDefaultTrials = 999;
inline constexpr double kDefaultThresholdPercent = 80.0;

enum class Direction { none, at_most, at_least, both };

std::string to_string(Direction d);

struct AttributeComparison {
    double real = 0.0;
    std::size_t trials_at_least_real = 0;  // trials with real <= trial
    std::size_t trials_at_most_real = 0;   // trials with real >= trial
    double fraction_le = 0.0;              // real <= trial
    double fraction_ge = 0.0;              // real >= trial
    Direction direction = Direction::none;

    bool operator==(const AttributeComparison&) const = default;
};

struct RepeatedRuns {
    std::size_t runs = 0;
    // Share of runs in which the single-run fraction reached the threshold.
    std::array<double, kAttributeCount> le_share{};
    std::array<double, kAttributeCount> ge_share{};

    bool operator==(const RepeatedRuns&) const = default;
};

struct RandomizationReport {
    std::size_t n_units = 0;
    std::size_t n_trials = 0;
    std::uint64_t seed = 0;
    double threshold_percent = kDefaultThresholdPercent;
    std::array<AttributeComparison, kAttributeCount> attributes{};
    std::optional<RepeatedRuns> repeated;

    bool operator==(const RandomizationReport&) const = default;
};

// Sub-seed for one trial, derived from the master seed by counter so results
// never depend on how trials are scheduled.
std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial);

// Uniform permutation of 0..n-1 (Fisher-Yates) for a given trial.
std::vector<std::size_t> trial_permutation(std::uint64_t seed, std::uint64_t trial, std::size_t n);

// Compares the real order against n_trials uniformly shuffled orders of the
// same units. Ties count toward both tails. Throws TooFewUnits below three
// units and InputError for zero trials.
RandomizationReport randomize_test(const UnitSeries& series, std::size_t n_trials, std::uint64_t seed,
                                   double threshold_percent = kDefaultThresholdPercent, unsigned workers = 1);

// Runs `runs` independent single-run tests (seeds derived from `seed`) and
// records how often each attribute cleared the threshold. The first run is
// the report's single-run result.
RandomizationReport randomize_repeated(const UnitSeries& series, std::size_t n_trials, std::uint64_t seed,
                                       std::size_t runs, double threshold_percent = kDefaultThresholdPercent,
                                       unsigned workers = 1);

struct SignificanceRow {
    std::string script;
    std::size_t attribute = 0;  // 1..9
    Direction direction = Direction::none;  // at_most or at_least
    int percent = 0;

    bool operator==(const SignificanceRow&) const = default;
};

struct NamedReport {
    std::string script;
    RandomizationReport report;
};

// One row per (script, attribute, tail) whose fraction reaches the threshold,
// with the percentage rounded to an integer.
std::vector<SignificanceRow> summarize_table(const std::vector<NamedReport>& reports, double threshold_percent);

// Aligned plain-text rendering of the significance table.
std::string format_significance_table(const std::vector<SignificanceRow>& rows);

}  // namespace storymap
