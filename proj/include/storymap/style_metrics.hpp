#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "storymap/ca_engine.hpp"

namespace storymap {

inline constexpr std::size_t kAttributeCount = 9;

// The nine style attributes of an ordered unit sequence:
//   1, 2  mean / variance of squared factor-space step distance (movement)
//   3, 4  mean / variance of squared orientation change
//   5     mean |step length change|        (absolute tempo)
//   6     mean step length change          (signed tempo)
//   7, 8  mean / variance of squared length change (rhythm)
//   9     mean of sign(change) * change^2  (signed rhythm)
// Variances are population variances over the n-1 steps.
struct StyleProfile {
    std::array<double, kAttributeCount> values{};
    std::vector<double> lengths;
    // Only one step was available, so attributes 2, 4 and 8 are reported as 0.
    bool insufficient_for_variance = false;

    double attribute(std::size_t number) const { return values.at(number - 1); }
    static std::string_view attribute_name(std::size_t number);

    bool operator==(const StyleProfile&) const = default;
};

struct StepMoments {
    double mean = 0.0;
    double variance = 0.0;
};

// Per-unit inputs to the attributes, rows in sequence order.
struct UnitSeries {
    Eigen::MatrixXd projections;
    Eigen::MatrixXd orientations;
    std::vector<double> lengths;
    // false for units whose orientation is undefined (projection at the
    // origin); those units are skipped by the orientation attributes.
    std::vector<bool> orientation_valid;

    std::size_t size() const { return lengths.size(); }
    static UnitSeries from_embedding(const CorrespondenceEmbedding& embedding, std::span<const double> lengths);
};

// Squared Euclidean step distances between consecutive rows (visited in
// `order`, or natural order when empty). Throws TooFewUnits below two rows.
StepMoments movement_attrs(const Eigen::MatrixXd& points, std::span<const std::size_t> order = {});
StepMoments movement_attrs(const CorrespondenceEmbedding& embedding);

// Throws ZeroNormRow when any row of the embedding lies at the origin.
StepMoments orientation_attrs(const CorrespondenceEmbedding& embedding);
// Skips rows with valid[i] == false; throws TooFewUnits if fewer than two remain.
StepMoments orientation_attrs(const Eigen::MatrixXd& orientations, const std::vector<bool>& valid,
                              std::span<const std::size_t> order = {});

struct TempoAttrs {
    double abs_mean = 0.0;     // a5
    double signed_mean = 0.0;  // a6
};
TempoAttrs tempo_attrs(std::span<const double> lengths);

struct RhythmAttrs {
    double mean = 0.0;         // a7
    double variance = 0.0;     // a8
    double signed_mean = 0.0;  // a9
};
RhythmAttrs rhythm_attrs(std::span<const double> lengths);

// Throws DimensionMismatch when lengths and embedding rows disagree.
StyleProfile style_profile(const CorrespondenceEmbedding& embedding, std::span<const double> lengths);
// Profile of the series visited in `order` (a permutation of 0..n-1, or
// natural order when empty).
StyleProfile style_profile(const UnitSeries& series, std::span<const std::size_t> order = {});

}  // namespace storymap
