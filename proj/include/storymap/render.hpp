#pragma once

#include <cstddef>
#include <string>

#include "storymap/ca_engine.hpp"
#include "storymap/seq_cluster.hpp"

namespace storymap::render {

// Leaves left to right in sequence order, merge heights on the vertical axis.
std::string dendrogram_svg(const Dendrogram& d, const std::string& title);

// Same tree as a Graphviz digraph; internal nodes carry their heights and
// edges their branch lengths.
std::string dendrogram_dot(const Dendrogram& d, const std::string& title);

// Scatter of rows (labelled with unit labels) and columns (unlabelled dots)
// on two 1-based factor axes. Throws InputError when an axis exceeds the
// factors available for rows or columns.
std::string factor_plane_svg(const CorrespondenceEmbedding& e, std::size_t axis_x, std::size_t axis_y,
                             const std::string& title);

}  // namespace storymap::render
