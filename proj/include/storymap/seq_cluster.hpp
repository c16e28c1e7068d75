#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "storymap/ca_engine.hpp"

namespace storymap {

// One agglomeration of two interval-adjacent clusters. Positions are 1-based
// and refer to the unit sequence: left is [left_first..left_last], right is
// [left_last+1..right_last].
struct Merge {
    std::size_t left_first = 0;
    std::size_t left_last = 0;
    std::size_t right_last = 0;
    double height = 0.0;

    std::size_t right_first() const { return left_last + 1; }
    bool operator==(const Merge&) const = default;
};

// Contiguity-constrained hierarchy. Merges are listed in agglomeration order
// with non-decreasing heights; leaves are in sequence order.
struct Dendrogram {
    std::size_t leaf_count = 0;
    std::vector<Merge> merges;
    std::vector<std::size_t> leaf_labels;  // unit indices shown at the leaves

    // Height of the merge that first joins positions a and b (ultrametric
    // distance); 0 when a == b.
    double cophenetic(std::size_t a, std::size_t b) const;
};

// Complete-link agglomeration restricted to sequence-adjacent clusters, using
// Euclidean distances between the rows of `points`. Built with a nearest-
// neighbour chain; equal heights are resolved toward the pair further left.
// Throws TooFewUnits for fewer than two rows.
Dendrogram cluster(const Eigen::MatrixXd& points);
// Throws DimensionMismatch when the vectors differ in length.
Dendrogram cluster(const std::vector<std::vector<double>>& points);

// Clusters the signed-cosine (orientation) vectors of the embedding's rows.
Dendrogram cluster_by_orientation(const CorrespondenceEmbedding& embedding);
// Clusters the factor projections themselves.
Dendrogram cluster_by_projection(const CorrespondenceEmbedding& embedding);

using SegmentRange = std::pair<std::size_t, std::size_t>;  // 1-based, inclusive

// Splits the sequence into k contiguous segments by undoing the k-1 highest
// merges (among equal heights, the later merge is undone first).
// Throws InvalidK unless 1 <= k <= leaf_count.
std::vector<SegmentRange> cut(const Dendrogram& dendrogram, std::size_t k);

// Newick with branch lengths equal to height differences.
std::string to_newick(const Dendrogram& dendrogram);

}  // namespace storymap
