#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "storymap/script_ingest.hpp"

namespace storymap {

enum class CountMode { presence, frequency };

std::string to_string(CountMode mode);
CountMode count_mode_from_string(const std::string& name);

// Units x vocabulary cross-tabulation, stored row-wise sparse. Rows keep the
// unit indices they came from; columns are vocabulary words in lexicographic
// (byte) order.
class ContingencyTable {
public:
    struct Entry {
        std::size_t col;
        std::uint64_t count;
        bool operator==(const Entry&) const = default;
    };

    ContingencyTable() = default;
    // Rows must hold strictly increasing column indices with non-zero counts.
    ContingencyTable(std::vector<std::size_t> row_labels, std::vector<std::string> col_labels,
                     std::vector<std::vector<Entry>> rows, CountMode mode);

    std::size_t n_rows() const { return row_labels_.size(); }
    std::size_t n_cols() const { return col_labels_.size(); }
    CountMode mode() const { return mode_; }

    const std::vector<std::size_t>& row_labels() const { return row_labels_; }
    const std::vector<std::string>& col_labels() const { return col_labels_; }
    std::span<const Entry> row(std::size_t i) const { return rows_[i]; }

    std::uint64_t at(std::size_t i, std::size_t j) const;
    const std::vector<std::uint64_t>& row_sums() const { return row_sums_; }
    const std::vector<std::uint64_t>& col_sums() const { return col_sums_; }
    std::uint64_t total() const { return total_; }
    std::size_t nonzeros() const;

    // Row-major dense copy.
    std::vector<std::vector<std::uint64_t>> dense() const;
    ContingencyTable transposed() const;
    ContingencyTable binarized() const;

    bool operator==(const ContingencyTable&) const = default;

private:
    std::vector<std::size_t> row_labels_;
    std::vector<std::string> col_labels_;
    std::vector<std::vector<Entry>> rows_;
    CountMode mode_ = CountMode::presence;
    std::vector<std::uint64_t> row_sums_;
    std::vector<std::uint64_t> col_sums_;
    std::uint64_t total_ = 0;
};

// Throws DegenerateInput with fewer than two units or an empty vocabulary.
ContingencyTable build_table(std::span<const SceneUnit> units, CountMode mode);

struct PruneLog {
    std::vector<std::size_t> dropped_rows;      // row labels
    std::vector<std::string> dropped_columns;   // words
    bool empty() const { return dropped_rows.empty() && dropped_columns.empty(); }
};

struct PrunedTable {
    ContingencyTable table;
    PruneLog log;
};

// Removes all-zero rows and columns. Throws EmptyAfterPrune if nothing is left.
PrunedTable prune(const ContingencyTable& table);

struct ZipfSummary {
    std::vector<std::pair<std::string, std::uint64_t>> ranked;
    // histogram[f] = number of words with total frequency f (index 0 unused)
    std::vector<std::size_t> frequency_histogram;
};

// Top-k words by descending column total, ties broken lexicographically.
// Throws DegenerateInput on a presence-mode table.
ZipfSummary zipf_summary(const ContingencyTable& table, std::size_t top_k);

}  // namespace storymap
