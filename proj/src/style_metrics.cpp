#include "storymap/style_metrics.hpp"

#include <algorithm>
#include <cmath>

#include "storymap/errors.hpp"

namespace storymap {

namespace {

// Order-independent sums: values are added in sorted order, and signed sums
// are formed as (sum of positives) - (sum of magnitudes of negatives).
double sorted_sum(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    double sum = 0.0;
    for (double x : v) sum += x;
    return sum;
}

double signed_sum(const std::vector<double>& v) {
    std::vector<double> pos, neg;
    for (double x : v) {
        if (x > 0.0) pos.push_back(x);
        else if (x < 0.0) neg.push_back(-x);
    }
    return sorted_sum(std::move(pos)) - sorted_sum(std::move(neg));
}

StepMoments moments(const std::vector<double>& steps) {
    StepMoments m;
    if (steps.empty()) return m;
    const auto n = static_cast<double>(steps.size());
    m.mean = sorted_sum(steps) / n;
    std::vector<double> dev(steps.size());
    for (std::size_t t = 0; t < steps.size(); ++t) dev[t] = (steps[t] - m.mean) * (steps[t] - m.mean);
    m.variance = sorted_sum(std::move(dev)) / n;
    return m;
}

std::size_t at(std::span<const std::size_t> order, std::size_t t) {
    return order.empty() ? t : order[t];
}

std::size_t sequence_size(std::size_t natural, std::span<const std::size_t> order) {
    if (!order.empty() && order.size() != natural)
        throw DimensionMismatch("order has " + std::to_string(order.size()) + " entries for " +
                                std::to_string(natural) + " units");
    return natural;
}

std::vector<double> length_steps(std::span<const double> lengths) {
    if (lengths.size() < 2) throw TooFewUnits("need at least 2 unit lengths, got " + std::to_string(lengths.size()));
    std::vector<double> d(lengths.size() - 1);
    for (std::size_t t = 0; t + 1 < lengths.size(); ++t) d[t] = lengths[t + 1] - lengths[t];
    return d;
}

double sign(double x) {
    return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
}

}  // namespace

std::string_view StyleProfile::attribute_name(std::size_t number) {
    static constexpr std::array<std::string_view, kAttributeCount> names{
        "movement mean",   "movement variance", "orientation mean", "orientation variance", "absolute tempo",
        "signed tempo",    "rhythm mean",       "rhythm variance",  "signed rhythm"};
    return names.at(number - 1);
}

UnitSeries UnitSeries::from_embedding(const CorrespondenceEmbedding& embedding, std::span<const double> lengths) {
    if (lengths.size() != embedding.n_rows())
        throw DimensionMismatch(std::to_string(lengths.size()) + " lengths for " + std::to_string(embedding.n_rows()) +
                                " embedded units");
    UnitSeries s;
    s.projections = embedding.row_projections;
    s.orientations = embedding.row_correlations;
    s.lengths.assign(lengths.begin(), lengths.end());
    s.orientation_valid.assign(lengths.size(), true);
    for (auto i : embedding.zero_norm_rows) s.orientation_valid[i] = false;
    return s;
}

StepMoments movement_attrs(const Eigen::MatrixXd& points, std::span<const std::size_t> order) {
    const auto n = sequence_size(static_cast<std::size_t>(points.rows()), order);
    if (n < 2) throw TooFewUnits("need at least 2 units, got " + std::to_string(n));
    std::vector<double> steps(n - 1);
    for (std::size_t t = 0; t + 1 < n; ++t) {
        const auto a = static_cast<Eigen::Index>(at(order, t));
        const auto b = static_cast<Eigen::Index>(at(order, t + 1));
        steps[t] = (points.row(b) - points.row(a)).squaredNorm();
    }
    return moments(steps);
}

StepMoments movement_attrs(const CorrespondenceEmbedding& embedding) {
    return movement_attrs(embedding.row_projections);
}

StepMoments orientation_attrs(const CorrespondenceEmbedding& embedding) {
    if (embedding.has_zero_norm_rows())
        throw ZeroNormRow("row " + std::to_string(embedding.zero_norm_rows.front() + 1) +
                          " has no orientation (projection at the origin)");
    return orientation_attrs(embedding.row_correlations, std::vector<bool>(embedding.n_rows(), true));
}

StepMoments orientation_attrs(const Eigen::MatrixXd& orientations, const std::vector<bool>& valid,
                              std::span<const std::size_t> order) {
    const auto n = sequence_size(static_cast<std::size_t>(orientations.rows()), order);
    if (valid.size() != n) throw DimensionMismatch("validity mask does not match the unit count");
    std::vector<Eigen::Index> seq;
    seq.reserve(n);
    for (std::size_t t = 0; t < n; ++t)
        if (valid[at(order, t)]) seq.push_back(static_cast<Eigen::Index>(at(order, t)));
    if (seq.size() < 2) throw TooFewUnits("need at least 2 units with an orientation, got " + std::to_string(seq.size()));
    std::vector<double> steps(seq.size() - 1);
    for (std::size_t t = 0; t + 1 < seq.size(); ++t)
        steps[t] = (orientations.row(seq[t + 1]) - orientations.row(seq[t])).squaredNorm();
    return moments(steps);
}

TempoAttrs tempo_attrs(std::span<const double> lengths) {
    const auto d = length_steps(lengths);
    std::vector<double> a(d.size());
    for (std::size_t t = 0; t < d.size(); ++t) a[t] = std::abs(d[t]);
    const auto n = static_cast<double>(d.size());
    return {sorted_sum(std::move(a)) / n, signed_sum(d) / n};
}

RhythmAttrs rhythm_attrs(std::span<const double> lengths) {
    const auto d = length_steps(lengths);
    std::vector<double> r(d.size()), sr(d.size());
    for (std::size_t t = 0; t < d.size(); ++t) {
        r[t] = d[t] * d[t];
        sr[t] = sign(d[t]) * r[t];
    }
    const auto m = moments(r);
    return {m.mean, m.variance, signed_sum(sr) / static_cast<double>(d.size())};
}

StyleProfile style_profile(const CorrespondenceEmbedding& embedding, std::span<const double> lengths) {
    if (lengths.size() != embedding.n_rows())
        throw DimensionMismatch(std::to_string(lengths.size()) + " lengths for " + std::to_string(embedding.n_rows()) +
                                " embedded units");
    if (embedding.has_zero_norm_rows())
        throw ZeroNormRow("row " + std::to_string(embedding.zero_norm_rows.front() + 1) +
                          " has no orientation (projection at the origin)");
    return style_profile(UnitSeries::from_embedding(embedding, lengths));
}

StyleProfile style_profile(const UnitSeries& series, std::span<const std::size_t> order) {
    const auto n = sequence_size(series.size(), order);
    if (n < 2) throw TooFewUnits("need at least 2 units, got " + std::to_string(n));
    if (static_cast<std::size_t>(series.projections.rows()) != n ||
        static_cast<std::size_t>(series.orientations.rows()) != n)
        throw DimensionMismatch("series matrices do not match the unit count");

    StyleProfile p;
    p.lengths.resize(n);
    for (std::size_t t = 0; t < n; ++t) p.lengths[t] = series.lengths[at(order, t)];

    const auto move = movement_attrs(series.projections, order);
    const auto orient = orientation_attrs(series.orientations, series.orientation_valid, order);
    const auto tempo = tempo_attrs(p.lengths);
    const auto rhythm = rhythm_attrs(p.lengths);
    p.values = {move.mean,      move.variance,     orient.mean,     orient.variance,   tempo.abs_mean,
                tempo.signed_mean, rhythm.mean, rhythm.variance, rhythm.signed_mean};
    p.insufficient_for_variance = n < 3;
    return p;
}

}  // namespace storymap
